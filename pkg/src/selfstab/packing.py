"""Self-stabilizing maximum K-packing on rooted trees.

Every node holds a table ``M[0..K]``: ``M[i]`` is the size of a largest
K-packing of its subtree whose shallowest member sits at depth ``>= i``
below the node (``i = 0`` lets the node itself be black).  Tables flow up
the tree (rule R1); the operating index ``j`` flows down (R2); each node
then picks the branch that realises ``M[j]`` (R3) and publishes it as
``(t, a, color)`` so its children can derive their own index.
"""
from __future__ import annotations

import random
from functools import lru_cache
from typing import Mapping, NamedTuple, Sequence

from .engine import Ball, LabeledGraph, RelabelingSystem, Rule
from .tree import Tree, distance

BLACK = "B"
WHITE = "W"
NONE = None


class InconsistentTables(ValueError):
    """No branch attains the requested table entry; the state is corrupt."""


class PackingNodeState(NamedTuple):
    M: tuple[int, ...]
    j: int
    t: int
    a: int | None
    color: str

    def to_json(self) -> dict:
        return {"M": list(self.M), "j": self.j, "t": self.t, "a": self.a, "color": self.color}

    @classmethod
    def from_json(cls, obj: dict) -> "PackingNodeState":
        return cls(tuple(int(x) for x in obj["M"]), int(obj["j"]), int(obj["t"]), obj["a"], obj["color"])


def _check_k(K: int) -> None:
    if not isinstance(K, int) or K < 1:
        raise ValueError(f"K must be a positive integer, got {K!r}")


def _sibling_level(t: int, K: int) -> int:
    # children other than the designated one must keep their members this deep
    return max(t - 1, K - t)


@lru_cache(maxsize=1 << 17)
def _designated_forms(child_tables: tuple[tuple[int, ...], ...], K: int):
    """Best value of each designated form ``t = 1..K`` and its first achieving child index."""
    forms = {}
    for t in range(1, K + 1):
        s = _sibling_level(t, K)
        base = sum(c[s] for c in child_tables)
        best, best_idx = None, None
        for idx, c in enumerate(child_tables):
            val = base - c[s] + c[t - 1]
            if best is None or val > best:
                best, best_idx = val, idx
        forms[t] = (best, best_idx)
    return forms


@lru_cache(maxsize=1 << 17)
def _table(child_tables: tuple[tuple[int, ...], ...], K: int) -> tuple[int, ...]:
    M = [0] * (K + 1)
    if child_tables:
        forms = _designated_forms(child_tables, K)
        running = None
        for t in range(K, 0, -1):
            # suffix maximum: a designated form alone is not monotone in t
            val = forms[t][0]
            running = val if running is None else max(running, val)
            M[t] = running
    black = 1 + sum(c[K] for c in child_tables)
    M[0] = max(black, M[1])
    return tuple(M)


def packing_table(child_tables: Sequence[Sequence[int]], K: int) -> tuple[int, ...]:
    _check_k(K)
    tables = tuple(tuple(c) for c in child_tables)
    for c in tables:
        if len(c) != K + 1:
            raise ValueError(f"child table has length {len(c)}, expected {K + 1}")
    return _table(tables, K)


def _resolve(M, children: tuple[int, ...], tables, j: int, K: int):
    if not 0 <= j <= K:
        raise ValueError(f"operating index {j} outside 0..{K}")
    if j == 0 and 1 + sum(c[K] for c in tables) >= M[1]:
        return 0, NONE, BLACK
    lo = max(j, 1)
    target = M[lo]
    if not tables:
        if target != 0:
            raise InconsistentTables(f"leaf cannot attain {target} at level {lo}")
        return lo, NONE, WHITE
    forms = _designated_forms(tables, K)
    for t in range(lo, K + 1):
        val, idx = forms[t]
        if val == target:
            return t, children[idx], WHITE
    raise InconsistentTables(f"no designated form attains M[{lo}] = {target}")


def resolve_choice(
    M: Sequence[int], child_tables: Mapping[int, Sequence[int]], j: int, K: int
) -> tuple[int, int | None, str]:
    """Deterministic branch realising ``M[j]``: BLACK on ties at ``j = 0``,
    then the smallest level, then the smallest child identifier."""
    _check_k(K)
    children = tuple(sorted(child_tables))
    tables = tuple(tuple(child_tables[c]) for c in children)
    return _resolve(tuple(M), children, tables, j, K)


def imposed_index(
    parent_state: PackingNodeState, child: int, K: int, parent_children: Sequence[int] | None = None
) -> int:
    """Operating index a parent's published choice imposes on ``child``.

    Clamped to ``0..K`` so that corrupt parent fields never leak an
    out-of-range index downward.
    """
    if parent_children is not None and child not in parent_children:
        raise ValueError(f"node {child} is not a child of this parent")
    if parent_state.color == BLACK:
        return K
    t = parent_state.t
    idx = t - 1 if child == parent_state.a else _sibling_level(t, K)
    return min(max(idx, 0), K)


def _child_tables(b: Ball):
    return tuple(lab.M for _, lab in b.child_labels)


def packing_rules(K: int) -> RelabelingSystem:
    _check_k(K)

    def table_of(b: Ball):
        return _table(_child_tables(b), K)

    def index_of(b: Ball) -> int:
        if b.is_root:
            return 0
        return imposed_index(b.parent_label, b.center, K)

    def choice_of(b: Ball):
        lab = b.center_label
        return _resolve(lab.M, b.children, _child_tables(b), lab.j, K)

    def r1_guard(b):
        return b.center_label.M != table_of(b)

    def r1_update(b):
        return b.center_label._replace(M=table_of(b))

    def r2_guard(b):
        return b.center_label.j != index_of(b)

    def r2_update(b):
        return b.center_label._replace(j=index_of(b))

    def r3_guard(b):
        lab = b.center_label
        return (lab.t, lab.a, lab.color) != choice_of(b)

    def r3_update(b):
        t, a, color = choice_of(b)
        return b.center_label._replace(t=t, a=a, color=color)

    rules = (
        Rule("R1", r1_guard, r1_update),
        Rule("R2", r2_guard, r2_update),
        Rule("R3", r3_guard, r3_update),
    )
    return RelabelingSystem(rules, illegitimate=packing_illegitimate(K), name=f"kpacking(K={K})")


def packing_illegitimate(K: int):
    """Predicate flagging balls no correct execution can produce.

    Only the centre's own fields and the centre/parent colour pair are
    inspected, so a planted fault is reported at exactly one centre.
    """

    def bad(b: Ball) -> bool:
        lab = b.center_label
        if not isinstance(lab, PackingNodeState):
            return True
        if len(lab.M) != K + 1 or any(x < 0 for x in lab.M):
            return True
        if not (0 <= lab.j <= K and 0 <= lab.t <= K):
            return True
        if lab.color not in (BLACK, WHITE):
            return True
        if lab.a is not NONE and lab.a not in b.children:
            return True
        if lab.color == BLACK and (lab.t != 0 or lab.a is not NONE):
            return True
        if lab.color == WHITE and lab.t == 0:
            return True
        parent = b.parent_label
        return lab.color == BLACK and parent is not None and getattr(parent, "color", None) == BLACK

    return bad


def reset_label(K: int) -> PackingNodeState:
    return PackingNodeState((0,) * (K + 1), 0, 1, NONE, WHITE)


def snap_packing_rules(K: int) -> RelabelingSystem:
    """``packing_rules`` plus a correction rule that resets flagged labels first."""
    base = packing_rules(K)
    bad = base.illegitimate
    reset = reset_label(K)
    correction = Rule("C1", bad, lambda b: reset)
    return RelabelingSystem(base.rules, (correction,), bad, name=f"snap-kpacking(K={K})")


def silent_configuration(tree: Tree, K: int) -> LabeledGraph:
    """The unique silent configuration, computed with one pass up and one down."""
    _check_k(K)
    n = tree.n
    M: list[tuple[int, ...] | None] = [None] * n
    for v in tree.postorder:
        M[v] = _table(tuple(M[c] for c in tree.children[v]), K)
    labels: list[PackingNodeState | None] = [None] * n
    for v in tree.preorder:
        p = tree.parent[v]
        j = 0 if p < 0 else imposed_index(labels[p], v, K)
        kids = tree.children[v]
        t, a, color = _resolve(M[v], kids, tuple(M[c] for c in kids), j, K)
        labels[v] = PackingNodeState(M[v], j, t, a, color)
    return LabeledGraph(tree, labels)


def random_label(tree: Tree, K: int, rng: random.Random, corrupt: float = 0.25) -> PackingNodeState:
    """Arbitrary label: each field uniform over its range, or out of range
    with probability ``corrupt``."""
    n = tree.n

    def small(hi: int) -> int:
        if rng.random() < corrupt:
            return rng.choice([rng.randint(-hi - 1, -1), rng.randint(hi + 1, 2 * hi + 2)])
        return rng.randint(0, hi)

    M = tuple(small(n) for _ in range(K + 1))
    if rng.random() < corrupt:
        a = rng.choice([rng.randint(n, 2 * n), rng.randint(-3, -1)])
    else:
        a = rng.choice([NONE] + list(range(n)))
    return PackingNodeState(M, small(K), small(K), a, rng.choice((BLACK, WHITE)))


def random_configuration(tree: Tree, K: int, seed: int, corrupt: float = 0.25) -> LabeledGraph:
    rng = random.Random(seed)
    return LabeledGraph(tree, [random_label(tree, K, rng, corrupt) for _ in range(tree.n)])


def blacks(g: LabeledGraph) -> set[int]:
    return {v for v, lab in enumerate(g.labels) if lab.color == BLACK}


def validate_packing(tree: Tree, blacks: set[int] | Sequence[int], K: int) -> bool:
    members = sorted(set(blacks))
    return all(
        distance(tree, u, v) > K for i, u in enumerate(members) for v in members[i + 1 :]
    )
