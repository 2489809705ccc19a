"""Graph relabeling systems on rooted trees under a central daemon.

A rule sees the closed radius-1 neighbourhood of a node (its ``Ball``) and
may rewrite that node's label only.  At every step the daemon picks one
enabled node; the first rule (correction rules before ordinary rules)
whose guard holds there fires.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Any, Callable, Hashable, NamedTuple, Sequence

from .tree import ROOT, InvalidNodeError, Tree

ABSENT = None
SILENT = None


class Ball(NamedTuple):
    center: int
    center_label: Any
    parent_label: Any  # ABSENT at the root
    child_labels: tuple[tuple[int, Any], ...]

    @property
    def is_root(self) -> bool:
        return self.parent_label is ABSENT

    @property
    def children(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.child_labels)


@dataclass(frozen=True)
class Rule:
    name: str
    guard: Callable[[Ball], bool]
    update: Callable[[Ball], Hashable]


@dataclass(frozen=True)
class RelabelingSystem:
    rules: tuple[Rule, ...]
    correction_rules: tuple[Rule, ...] = ()
    illegitimate: Callable[[Ball], bool] | None = None
    name: str = "system"

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "correction_rules", tuple(self.correction_rules))
        names = [r.name for r in self.all_rules]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate rule names: {names}")

    @property
    def all_rules(self) -> tuple[Rule, ...]:
        return self.correction_rules + self.rules

    def rule_names(self) -> list[str]:
        return [r.name for r in self.all_rules]

    def active_rule(self, b: Ball) -> Rule | None:
        """The highest-priority rule whose guard holds on ``b``."""
        for rule in self.all_rules:
            if rule.guard(b):
                return rule
        return None


class LabeledGraph:
    """A tree with one label per node.  Labels are replaced, never mutated."""

    __slots__ = ("tree", "labels")

    def __init__(self, tree: Tree, labels: Sequence[Any]):
        if len(labels) != tree.n:
            raise ValueError(f"need {tree.n} labels, got {len(labels)}")
        self.tree = tree
        self.labels = list(labels)

    def copy(self) -> "LabeledGraph":
        return LabeledGraph(self.tree, self.labels)

    def __eq__(self, other):
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self.tree == other.tree and self.labels == other.labels

    def __repr__(self):
        return f"LabeledGraph(n={self.tree.n}, labels={self.labels!r})"


def ball(g: LabeledGraph, v: int) -> Ball:
    tree = g.tree
    if not isinstance(v, int) or not 0 <= v < tree.n:
        raise InvalidNodeError(f"node {v!r} is not in 0..{tree.n - 1}")
    labels = g.labels
    p = tree.parent[v]
    return Ball(
        v,
        labels[v],
        ABSENT if p == ROOT else labels[p],
        tuple((c, labels[c]) for c in tree.children[v]),
    )


def enabled(sys: RelabelingSystem, g: LabeledGraph) -> set[tuple[int, str]]:
    out = set()
    for v in range(g.tree.n):
        rule = sys.active_rule(ball(g, v))
        if rule is not None:
            out.add((v, rule.name))
    return out


def is_silent(sys: RelabelingSystem, g: LabeledGraph) -> bool:
    return all(sys.active_rule(ball(g, v)) is None for v in range(g.tree.n))


def find_illegitimate(g: LabeledGraph, sys: RelabelingSystem) -> list[int]:
    if sys.illegitimate is None:
        raise ValueError(f"{sys.name} has no illegitimate-configuration predicate")
    return [v for v in range(g.tree.n) if sys.illegitimate(ball(g, v))]


class Strategy(str, enum.Enum):
    RANDOM = "RANDOM"
    ROUND_ROBIN = "ROUND_ROBIN"
    GREEDY_DEEPEST = "GREEDY_DEEPEST"
    GREEDY_SHALLOWEST = "GREEDY_SHALLOWEST"
    GREEDY_MAX_ENABLED_AFTER = "GREEDY_MAX_ENABLED_AFTER"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        try:
            return cls[name.upper().replace("-", "_")]
        except KeyError:
            raise ValueError(
                f"unknown daemon {name!r}; choose from {', '.join(s.name for s in cls)}"
            ) from None


@dataclass(frozen=True)
class Daemon:
    """Central scheduler.

    The choice is a pure function of (strategy, seed, step index, state), so
    replaying a run reproduces it move for move.
    """

    strategy: Strategy = Strategy.RANDOM
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.strategy, Strategy):
            object.__setattr__(self, "strategy", Strategy.parse(str(self.strategy)))


@dataclass
class RunReport:
    moves_total: int
    moves_by_rule: dict[str, int]
    stabilized: bool
    steps_to_silence: int | None
    final: LabeledGraph
    trace: list[tuple[int, int, str]] | None = None

    def trace_jsonl(self) -> str:
        return "".join(
            json.dumps({"step": s, "node": v, "rule": r}) + "\n" for s, v, r in self.trace or ()
        )


_MASK = (1 << 64) - 1


def mix64(seed: int, step_index: int) -> int:
    """splitmix64 finaliser of (seed, step): a stateless per-step random draw."""
    z = (seed * 0x9E3779B97F4A7C15 + (step_index + 1) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def default_max_moves(n: int) -> int:
    return 64 * n**3


class Simulation:
    """Incremental executor for one run.

    Keeps the active rule of every node and re-evaluates only the closed
    neighbourhood of the node that just moved; the result is identical to
    calling ``step`` repeatedly.
    """

    def __init__(self, sys: RelabelingSystem, g: LabeledGraph, daemon: Daemon):
        self.sys = sys
        self.g = g
        self.daemon = daemon
        tree = g.tree
        self.tree = tree
        self.depths = tree.depths
        self.closed = [(v,) + tree.neighbors(v) for v in range(tree.n)]
        self.active: dict[int, Rule] = {}
        for v in range(tree.n):
            self._refresh(v)
        self._gain: dict[int, int] = {}
        if daemon.strategy is Strategy.GREEDY_MAX_ENABLED_AFTER:
            self._near2 = [
                sorted({w for u in self.closed[v] for w in self.closed[u]}) for v in range(tree.n)
            ]

    def _refresh(self, v: int) -> None:
        rule = self.sys.active_rule(ball(self.g, v))
        if rule is None:
            self.active.pop(v, None)
        else:
            self.active[v] = rule

    def enabled(self) -> set[tuple[int, str]]:
        return {(v, r.name) for v, r in self.active.items()}

    def _gain_of(self, v: int) -> int:
        """Change in the number of enabled nodes if ``v`` fires now."""
        if v in self._gain:
            return self._gain[v]
        labels = self.g.labels
        rule = self.active[v]
        old = labels[v]
        before = sum(1 for u in self.closed[v] if u in self.active)
        labels[v] = rule.update(ball(self.g, v))
        try:
            after = sum(
                1 for u in self.closed[v] if self.sys.active_rule(ball(self.g, u)) is not None
            )
        finally:
            labels[v] = old
        self._gain[v] = after - before
        return after - before

    def choose(self, step_index: int) -> int:
        nodes = sorted(self.active)
        if len(nodes) == 1:
            return nodes[0]
        strategy = self.daemon.strategy
        if strategy is Strategy.RANDOM:
            return nodes[mix64(self.daemon.seed, step_index) % len(nodes)]
        if strategy is Strategy.ROUND_ROBIN:
            cursor = (self.daemon.seed + step_index) % self.tree.n
            for v in nodes:
                if v >= cursor:
                    return v
            return nodes[0]
        d = self.depths
        if strategy is Strategy.GREEDY_DEEPEST:
            return max(nodes, key=lambda v: (d[v], -v))
        if strategy is Strategy.GREEDY_SHALLOWEST:
            return min(nodes, key=lambda v: (d[v], v))
        # GREEDY_MAX_ENABLED_AFTER: keep as many nodes enabled as possible
        return max(nodes, key=lambda v: (self._gain_of(v), d[v], -v))

    def fire(self, v: int) -> str:
        rule = self.active[v]
        self.g.labels[v] = rule.update(ball(self.g, v))
        for u in self.closed[v]:
            self._refresh(u)
        if self._gain:
            for u in self._near2[v]:
                self._gain.pop(u, None)
        return rule.name

    def step(self, step_index: int) -> tuple[int, str] | None:
        if not self.active:
            return SILENT
        v = self.choose(step_index)
        return v, self.fire(v)


def step(
    sys: RelabelingSystem, g: LabeledGraph, daemon: Daemon, step_index: int
) -> tuple[int, str] | None:
    """Apply one move to ``g`` in place; returns ``(node, rule)`` or SILENT."""
    return Simulation(sys, g, daemon).step(step_index)


def run(
    sys: RelabelingSystem,
    g: LabeledGraph,
    daemon: Daemon,
    max_moves: int | None = None,
    trace: bool = False,
) -> RunReport:
    """Step a copy of ``g`` until silence or ``max_moves``; ``g`` is untouched."""
    if max_moves is None:
        max_moves = default_max_moves(g.tree.n)
    if max_moves < 0:
        raise ValueError("max_moves must be nonnegative")
    sim = Simulation(sys, g.copy(), daemon)
    by_rule = {name: 0 for name in sys.rule_names()}
    log: list[tuple[int, int, str]] | None = [] if trace else None
    moves = 0
    while moves < max_moves:
        moved = sim.step(moves)
        if moved is SILENT:
            break
        v, name = moved
        by_rule[name] += 1
        if log is not None:
            log.append((moves, v, name))
        moves += 1
    stabilized = not sim.active
    return RunReport(
        moves_total=moves,
        moves_by_rule=by_rule,
        stabilized=stabilized,
        steps_to_silence=moves if stabilized else None,
        final=sim.g,
        trace=log,
    )

