"""Ground truth by exhaustive enumeration, plus a centralized two-pass solver.

Brute force scans every subset as a bitmask (vectorised with numpy) and
checks validity from a precomputed all-pairs distance matrix.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import domination, packing
from .tree import Tree

MAX_BRUTE_N = 20
INFEASIBLE = None


class OracleTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    optimum: int
    witness: frozenset[int]
    optima_count: int | None  # None when the solver does not enumerate


def all_pairs(tree: Tree) -> np.ndarray:
    """BFS from every node."""
    n = tree.n
    dist = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        dist[s, s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in tree.neighbors(u):
                if dist[s, w] < 0:
                    dist[s, w] = dist[s, u] + 1
                    queue.append(w)
    return dist


def _near_masks(dist: np.ndarray, nodes: list[int], K: int) -> list[int]:
    """For each position p in ``nodes``: bitmask of positions within distance K."""
    return [
        sum(1 << q for q, w in enumerate(nodes) if dist[u, w] <= K) for u in nodes
    ]


def _subsets(size: int) -> np.ndarray:
    if size > MAX_BRUTE_N:
        raise OracleTooLarge(f"{size} nodes is beyond exhaustive search (max {MAX_BRUTE_N})")
    return np.arange(1 << size, dtype=np.int64)


def _packing_valid(masks: np.ndarray, near: list[int]) -> np.ndarray:
    ok = np.ones(masks.shape, dtype=bool)
    for p, m in enumerate(near):
        others = m & ~(1 << p)
        ok &= ((masks >> p) & 1 == 0) | (masks & others == 0)
    return ok


def _dominated(masks: np.ndarray, near: list[int]) -> np.ndarray:
    """Bitmask of positions dominated by each subset."""
    cover = np.zeros(masks.shape, dtype=np.int64)
    for p, m in enumerate(near):
        cover |= np.where((masks >> p) & 1 == 1, m, 0)
    return cover


def _result(masks, sizes, feasible, best, nodes) -> OracleResult:
    hits = np.flatnonzero(feasible & (sizes == best))
    w = int(masks[hits[0]])
    witness = frozenset(nodes[p] for p in range(len(nodes)) if w >> p & 1)
    return OracleResult(int(best), witness, int(hits.size))


def brute_force_packing(tree: Tree, K: int) -> OracleResult:
    nodes = list(range(tree.n))
    masks = _subsets(tree.n)
    near = _near_masks(all_pairs(tree), nodes, K)
    sizes = np.bitwise_count(masks)
    ok = _packing_valid(masks, near)
    return _result(masks, sizes, ok, sizes[ok].max(), nodes)


def brute_force_domination(tree: Tree, K: int) -> OracleResult:
    nodes = list(range(tree.n))
    masks = _subsets(tree.n)
    near = _near_masks(all_pairs(tree), nodes, K)
    sizes = np.bitwise_count(masks)
    ok = _dominated(masks, near) == (1 << tree.n) - 1
    return _result(masks, sizes, ok, sizes[ok].min(), nodes)


def _subtree_setup(tree: Tree, v: int, K: int):
    nodes = tree.subtree(v)
    dist = all_pairs(tree)
    rel_depth = np.array([dist[v, u] for u in nodes], dtype=np.int64)
    masks = _subsets(len(nodes))
    return nodes, rel_depth, masks, _near_masks(dist, nodes, K)


def _min_member_depth(masks: np.ndarray, rel_depth: np.ndarray) -> np.ndarray:
    # the empty set has no shallowest member: treat it as infinitely deep
    out = np.full(masks.shape, np.iinfo(np.int64).max, dtype=np.int64)
    for p, d in enumerate(rel_depth):
        out = np.where((masks >> p) & 1 == 1, np.minimum(out, d), out)
    return out


def constrained_packing_table(tree: Tree, v: int, K: int) -> list[int]:
    """Every ``constrained_packing_opt(tree, v, i, K)`` for ``i = 0..K``."""
    nodes, rel_depth, masks, near = _subtree_setup(tree, v, K)
    sizes = np.bitwise_count(masks)
    ok = _packing_valid(masks, near)
    shallow = _min_member_depth(masks, rel_depth)
    return [int(sizes[ok & (shallow >= i)].max()) for i in range(K + 1)]


def constrained_packing_opt(tree: Tree, v: int, i: int, K: int) -> int:
    if not 0 <= i <= K:
        raise ValueError(f"level {i} outside 0..{K}")
    return constrained_packing_table(tree, v, K)[i]


def constrained_domination_table(tree: Tree, v: int, K: int) -> list[int | None]:
    """Every ``constrained_domination_opt(tree, v, j, K)`` for ``j = 0..2K``."""
    nodes, rel_depth, masks, near = _subtree_setup(tree, v, K)
    sizes = np.bitwise_count(masks)
    cover = _dominated(masks, near)
    shallow = _min_member_depth(masks, rel_depth)
    out: list[int | None] = []
    for j in range(2 * K + 1):
        if j <= K:
            need = (1 << len(nodes)) - 1
            ok = (cover == need) & (shallow <= j)
        else:
            m = j - K
            need = sum(1 << p for p, d in enumerate(rel_depth) if d >= m)
            ok = (cover & need) == need
        out.append(int(sizes[ok].min()) if ok.any() else INFEASIBLE)
    return out


def constrained_domination_opt(tree: Tree, v: int, j: int, K: int) -> int | None:
    if not 0 <= j <= 2 * K:
        raise ValueError(f"index {j} outside 0..{2 * K}")
    return constrained_domination_table(tree, v, K)[j]


def centralized_solver(tree: Tree, K: int, problem: str) -> OracleResult:
    """Tables bottom-up, choices top-down, no daemon."""
    if problem == "pack":
        g = packing.silent_configuration(tree, K)
        chosen = packing.blacks(g)
        optimum = g.labels[tree.root].M[0]
    elif problem == "dom":
        g = domination.silent_configuration(tree, K)
        chosen = packing.blacks(g)
        optimum = g.labels[tree.root].D[K]
    else:
        raise ValueError(f"unknown problem {problem!r}")
    if len(chosen) != optimum:
        raise AssertionError(f"backtracking chose {len(chosen)} nodes, table says {optimum}")
    return OracleResult(optimum, frozenset(chosen), None)


def solve(tree: Tree, K: int, problem: str) -> OracleResult:
    """Brute force when affordable, otherwise the centralized solver."""
    if tree.n <= MAX_BRUTE_N:
        if problem == "pack":
            return brute_force_packing(tree, K)
        if problem == "dom":
            return brute_force_domination(tree, K)
        raise ValueError(f"unknown problem {problem!r}")
    return centralized_solver(tree, K, problem)
