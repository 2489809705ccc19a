"""Rooted trees: the network topology every algorithm runs on.

Nodes are the dense integers ``0..n-1``.  Each node knows its parent; the
root carries the sentinel ``ROOT`` (``-1`` in the text format).
"""
from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

ROOT = -1


class TreeError(ValueError):
    """Base class for invalid tree input."""


class MalformedIntegerError(TreeError):
    pass


class ParentOutOfRangeError(TreeError):
    pass


class CycleError(TreeError):
    pass


class RootCountError(TreeError):
    pass


class InvalidNodeError(TreeError, IndexError):
    pass


@dataclass(frozen=True)
class Tree:
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    root: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        parent = tuple(int(p) for p in self.parent)
        object.__setattr__(self, "parent", parent)
        _check_parents(parent)
        kids: list[list[int]] = [[] for _ in parent]
        for v, p in enumerate(parent):
            if p != ROOT:
                kids[p].append(v)
        object.__setattr__(self, "children", tuple(tuple(c) for c in kids))
        object.__setattr__(self, "root", parent.index(ROOT))

    @property
    def n(self) -> int:
        return len(self.parent)

    def __len__(self) -> int:
        return len(self.parent)

    def check(self, v: int) -> int:
        if not isinstance(v, int) or not 0 <= v < self.n:
            raise InvalidNodeError(f"node {v!r} is not in 0..{self.n - 1}")
        return v

    @cached_property
    def depths(self) -> tuple[int, ...]:
        d = [0] * self.n
        for v in self.preorder:
            if v != self.root:
                d[v] = d[self.parent[v]] + 1
        return tuple(d)

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        order, stack = [], [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        return tuple(order)

    @cached_property
    def postorder(self) -> tuple[int, ...]:
        # children before parents
        return tuple(reversed(self.preorder))

    def neighbors(self, v: int) -> tuple[int, ...]:
        p = self.parent[v]
        return self.children[v] if p == ROOT else (p,) + self.children[v]

    def subtree(self, v: int) -> list[int]:
        """Nodes of the subtree rooted at ``v``, in preorder."""
        self.check(v)
        out, stack = [], [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]


def _check_parents(parent: Sequence[int]) -> None:
    n = len(parent)
    if n == 0:
        raise RootCountError("tree must have at least one node")
    for v, p in enumerate(parent):
        if p != ROOT and not 0 <= p < n:
            raise ParentOutOfRangeError(f"node {v}: parent {p} not in 0..{n - 1}")
        if p == v:
            raise CycleError(f"node {v} is its own parent")
    # colour-walk every node toward the root; revisiting the current walk is a cycle
    state = [0] * n  # 0 unseen, 1 on current walk, 2 known to reach a root
    for start in range(n):
        walk = []
        v = start
        while v != ROOT and state[v] == 0:
            state[v] = 1
            walk.append(v)
            v = parent[v]
        if v != ROOT and state[v] == 1:
            raise CycleError(f"cycle through node {v}")
        for u in walk:
            state[u] = 2
    roots = [v for v, p in enumerate(parent) if p == ROOT]
    if len(roots) != 1:
        raise RootCountError(f"expected exactly one root, found {len(roots)}: {roots}")


def parse_tree(text: str) -> Tree:
    """Parse the two-line tree format: ``n`` then ``n`` parent indices."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MalformedIntegerError("line 1: missing node count")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise MalformedIntegerError(f"line 1: malformed integer {lines[0].strip()!r}") from None
    if n < 1:
        raise RootCountError(f"line 1: node count must be positive, got {n}")
    tokens = lines[1].split() if len(lines) > 1 else []
    if len(lines) > 2:
        raise TreeError(f"line 3: unexpected content {lines[2]!r}")
    if len(tokens) != n:
        raise TreeError(f"line 2: expected {n} parent entries, found {len(tokens)}")
    parent = []
    for v, tok in enumerate(tokens):
        try:
            parent.append(int(tok))
        except ValueError:
            raise MalformedIntegerError(f"line 2, node {v}: malformed integer {tok!r}") from None
    return Tree(tuple(parent))


def serialize(tree: Tree) -> str:
    return f"{tree.n}\n{' '.join(map(str, tree.parent))}\n"


def prufer_decode(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    """Edges of the labelled tree on ``n`` nodes with Prufer code ``seq``."""
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def from_edges(n: int, edges: Sequence[tuple[int, int]], root: int = 0) -> Tree:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    parent = [ROOT] * n
    seen = [False] * n
    seen[root] = True
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                queue.append(w)
    if not all(seen):
        raise TreeError("edge list is not connected")
    return Tree(tuple(parent))


def random_prufer(n: int, seed: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.randrange(n) for _ in range(n - 2)]


def random_tree(n: int, seed: int) -> Tree:
    """Uniform random labelled tree on ``n`` nodes rooted at 0."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n == 1:
        return Tree((ROOT,))
    return from_edges(n, prufer_decode(random_prufer(n, seed), n))


def path_tree(n: int) -> Tree:
    return Tree((ROOT,) + tuple(range(n - 1)))


def star_tree(n: int) -> Tree:
    return Tree((ROOT,) + (0,) * (n - 1))


def depth(tree: Tree, v: int) -> int:
    return tree.depths[tree.check(v)]


def distance(tree: Tree, u: int, v: int) -> int:
    tree.check(u)
    tree.check(v)
    d = tree.depths
    hops = 0
    while d[u] > d[v]:
        u, hops = tree.parent[u], hops + 1
    while d[v] > d[u]:
        v, hops = tree.parent[v], hops + 1
    while u != v:
        u, v, hops = tree.parent[u], tree.parent[v], hops + 2
    return hops


def distance_matrix(tree: Tree) -> list[list[int]]:
    return [[distance(tree, u, v) for v in range(tree.n)] for u in range(tree.n)]
