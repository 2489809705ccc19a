"""Self-stabilizing minimum K-domination on rooted trees.

Same three-rule skeleton as :mod:`selfstab.packing`, over a table
``D[0..2K]`` per node.  Writing ``T[v]`` for the subtree of ``v`` and
depths relative to ``v``:

* ``D[i]``, ``i <= K``: fewest members inside ``T[v]`` that dominate all of
  ``T[v]`` with one member at depth ``<= i``;
* ``D[K + m]``, ``m = 1..K``: fewest members inside ``T[v]`` that dominate
  every vertex of ``T[v]`` at depth ``>= m``.  The shallower vertices are
  left to a member outside ``T[v]`` at distance ``<= K + 1 - m`` from ``v``.

Each entry only relaxes the previous one, so the table is non-increasing.
A subtree whose own vertices wait for outside help never offers useful
reach upward (its helper is strictly closer than its shallowest member),
which is why one integer per state is enough.
"""
from __future__ import annotations

import random
from functools import lru_cache
from typing import Mapping, NamedTuple, Sequence

from .engine import Ball, LabeledGraph, RelabelingSystem, Rule
from .packing import BLACK, NONE, WHITE, InconsistentTables, _check_k
from .tree import Tree, distance


class DominationNodeState(NamedTuple):
    D: tuple[int, ...]
    j: int
    t: int | None
    a: int | None
    color: str

    def to_json(self) -> dict:
        return {"D": list(self.D), "j": self.j, "t": self.t, "a": self.a, "color": self.color}

    @classmethod
    def from_json(cls, obj: dict) -> "DominationNodeState":
        t = obj["t"]
        return cls(
            tuple(int(x) for x in obj["D"]),
            int(obj["j"]),
            None if t is None else int(t),
            obj["a"],
            obj["color"],
        )


def help_index(h: int, K: int) -> int:
    """Table index for a subtree whose nearest outside member is ``h`` away."""
    return 2 * K + 1 - h if h <= K else K


def helper_distance(j: int, K: int) -> int | None:
    """Inverse of :func:`help_index` on the promise entries; None below them."""
    return 2 * K + 1 - j if j > K else None


@lru_cache(maxsize=1 << 17)
def _options(tables: tuple[tuple[int, ...], ...], K: int):
    """Cost of every branch of the recurrence.

    Returns ``black`` and, for each entry ``j``, the ordered candidate list
    ``[(cost, t, child_index), ...]`` with ``(cost, None, None)`` for the
    branch that relies only on outside help.
    """
    black = 1 + sum(c[2 * K] for c in tables)
    cand: list[list[tuple[int, int | None, int | None]]] = [[] for _ in range(2 * K + 1)]

    def designated(t: int, sib: int):
        base = sum(c[sib] for c in tables)
        return [(base - c[sib] + c[t - 1], t, idx) for idx, c in enumerate(tables)]

    if tables:
        for j in range(1, K + 1):
            for t in range(1, j + 1):
                cand[j].extend(designated(t, help_index(t + 1, K)))
        for j in range(K + 1, 2 * K + 1):
            h = helper_distance(j, K)
            for t in range(1, K + 1):
                cand[j].extend(designated(t, help_index(min(h, t) + 1, K)))
    for j in range(K + 1, 2 * K + 1):
        h = helper_distance(j, K)
        cand[j].append((sum(c[help_index(h + 1, K)] for c in tables), None, None))
    return black, cand


@lru_cache(maxsize=1 << 17)
def _table(tables: tuple[tuple[int, ...], ...], K: int) -> tuple[int, ...]:
    black, cand = _options(tables, K)
    return tuple(min([black] + [c[0] for c in cand[j]]) for j in range(2 * K + 1))


def domination_table(child_tables: Sequence[Sequence[int]], K: int) -> tuple[int, ...]:
    _check_k(K)
    tables = tuple(tuple(c) for c in child_tables)
    for c in tables:
        if len(c) != 2 * K + 1:
            raise ValueError(f"child table has length {len(c)}, expected {2 * K + 1}")
    return _table(tables, K)


def _resolve(D, children: tuple[int, ...], tables, j: int, K: int):
    if not 0 <= j <= 2 * K:
        raise ValueError(f"operating index {j} outside 0..{2 * K}")
    black, cand = _options(tables, K)
    target = D[j]
    if black == target:
        return 0, NONE, BLACK
    for cost, t, idx in cand[j]:
        if cost == target:
            return t, (NONE if idx is None else children[idx]), WHITE
    raise InconsistentTables(f"no branch attains D[{j}] = {target}")


def resolve_choice_dom(
    D: Sequence[int], child_tables: Mapping[int, Sequence[int]], j: int, K: int
) -> tuple[int | None, int | None, str]:
    _check_k(K)
    children = tuple(sorted(child_tables))
    tables = tuple(tuple(child_tables[c]) for c in children)
    return _resolve(tuple(D), children, tables, j, K)


def imposed_index_dom(
    parent_state: DominationNodeState,
    child: int,
    K: int,
    parent_children: Sequence[int] | None = None,
) -> int:
    if parent_children is not None and child not in parent_children:
        raise ValueError(f"node {child} is not a child of this parent")
    if parent_state.color == BLACK:
        idx = help_index(1, K)
    else:
        t = parent_state.t
        if t is not None and child == parent_state.a:
            idx = t - 1
        else:
            sources = [d for d in (helper_distance(parent_state.j, K), t) if d is not None]
            idx = help_index(min(sources) + 1, K) if sources else K
    return min(max(idx, 0), 2 * K)


def _child_tables(b: Ball):
    return tuple(lab.D for _, lab in b.child_labels)


def domination_rules(K: int) -> RelabelingSystem:
    _check_k(K)

    def table_of(b):
        return _table(_child_tables(b), K)

    def index_of(b):
        if b.is_root:
            return K
        return imposed_index_dom(b.parent_label, b.center, K)

    def choice_of(b):
        lab = b.center_label
        return _resolve(lab.D, b.children, _child_tables(b), lab.j, K)

    def r1_guard(b):
        return b.center_label.D != table_of(b)

    def r1_update(b):
        return b.center_label._replace(D=table_of(b))

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
    return RelabelingSystem(rules, illegitimate=domination_illegitimate(K), name=f"kdomination(K={K})")


def domination_illegitimate(K: int):
    def bad(b: Ball) -> bool:
        lab = b.center_label
        if not isinstance(lab, DominationNodeState):
            return True
        if len(lab.D) != 2 * K + 1 or any(x < 0 for x in lab.D):
            return True
        if not 0 <= lab.j <= 2 * K or lab.color not in (BLACK, WHITE):
            return True
        if lab.color == BLACK:
            return lab.t != 0 or lab.a is not NONE
        if lab.t is None:
            # the root must be dominated from inside
            return lab.a is not NONE or b.is_root
        return not 1 <= lab.t <= K or lab.a not in b.children

    return bad


def silent_configuration(tree: Tree, K: int) -> LabeledGraph:
    _check_k(K)
    n = tree.n
    D: list = [None] * n
    for v in tree.postorder:
        D[v] = _table(tuple(D[c] for c in tree.children[v]), K)
    labels: list = [None] * n
    for v in tree.preorder:
        p = tree.parent[v]
        j = K if p < 0 else imposed_index_dom(labels[p], v, K)
        kids = tree.children[v]
        t, a, color = _resolve(D[v], kids, tuple(D[c] for c in kids), j, K)
        labels[v] = DominationNodeState(D[v], j, t, a, color)
    return LabeledGraph(tree, labels)


def random_label(tree: Tree, K: int, rng: random.Random, corrupt: float = 0.25) -> DominationNodeState:
    n = tree.n

    def small(hi: int) -> int:
        if rng.random() < corrupt:
            return rng.choice([rng.randint(-hi - 1, -1), rng.randint(hi + 1, 2 * hi + 2)])
        return rng.randint(0, hi)

    D = tuple(small(n) for _ in range(2 * K + 1))
    t = NONE if rng.random() < 0.2 else small(K)
    if rng.random() < corrupt:
        a = rng.choice([rng.randint(n, 2 * n), rng.randint(-3, -1)])
    else:
        a = rng.choice([NONE] + list(range(n)))
    return DominationNodeState(D, small(2 * K), t, a, rng.choice((BLACK, WHITE)))


def random_configuration(tree: Tree, K: int, seed: int, corrupt: float = 0.25) -> LabeledGraph:
    rng = random.Random(seed)
    return LabeledGraph(tree, [random_label(tree, K, rng, corrupt) for _ in range(tree.n)])


def validate_domination(tree: Tree, blacks: set[int] | Sequence[int], K: int) -> bool:
    members = set(blacks)
    return all(any(distance(tree, v, s) <= K for s in members) for v in range(tree.n))
