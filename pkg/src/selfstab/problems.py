"""The two shipped problems behind one interface, and the single-run driver
the CLI and the acceptance sweeps share."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

from . import domination, oracles, packing
from .engine import Daemon, LabeledGraph, RelabelingSystem, RunReport, run
from .tree import Tree


@dataclass(frozen=True)
class Problem:
    name: str
    rules: Callable[[int], RelabelingSystem]
    silent_configuration: Callable[[Tree, int], LabeledGraph]
    random_configuration: Callable[..., LabeledGraph]
    state_type: type
    validate: Callable[[Tree, set, int], bool]
    table_field: str

    def table(self, label) -> tuple[int, ...]:
        return getattr(label, self.table_field)

    def table_length(self, K: int) -> int:
        return K + 1 if self.name == "pack" else 2 * K + 1

    def root_value(self, g: LabeledGraph, K: int) -> int:
        t = self.table(g.labels[g.tree.root])
        return t[0] if self.name == "pack" else t[K]

    def load_labels(self, tree: Tree, text: str, K: int) -> LabeledGraph:
        """One JSON object per line, node order; table lengths are checked."""
        rows = [ln for ln in text.splitlines() if ln.strip()]
        if len(rows) != tree.n:
            raise ValueError(f"label file has {len(rows)} entries for {tree.n} nodes")
        labels = []
        for v, row in enumerate(rows):
            try:
                lab = self.state_type.from_json(json.loads(row))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"label line {v + 1}: {exc}") from None
            if len(self.table(lab)) != self.table_length(K):
                raise ValueError(f"label line {v + 1}: table length must be {self.table_length(K)}")
            labels.append(lab)
        return LabeledGraph(tree, labels)


PROBLEMS = {
    "pack": Problem(
        "pack",
        packing.packing_rules,
        packing.silent_configuration,
        packing.random_configuration,
        packing.PackingNodeState,
        packing.validate_packing,
        "M",
    ),
    "dom": Problem(
        "dom",
        domination.domination_rules,
        domination.silent_configuration,
        domination.random_configuration,
        domination.DominationNodeState,
        domination.validate_domination,
        "D",
    ),
}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose pack or dom") from None


@dataclass
class Outcome:
    report: RunReport
    blacks: list[int]
    valid: bool
    optimum: int
    optimal: bool
    oracle: str

    @property
    def achieved(self) -> int:
        return len(self.blacks)

    @property
    def ok(self) -> bool:
        return self.report.stabilized and self.valid and self.optimal


def judge(problem: Problem, tree: Tree, K: int, report: RunReport) -> Outcome:
    chosen = sorted(packing.blacks(report.final))
    valid = problem.validate(tree, chosen, K)
    if tree.n <= oracles.MAX_BRUTE_N:
        optimum, source = oracles.solve(tree, K, problem.name).optimum, "brute force"
    else:
        optimum, source = oracles.centralized_solver(tree, K, problem.name).optimum, "centralized"
    optimal = report.stabilized and valid and len(chosen) == optimum
    return Outcome(report, chosen, valid, optimum, optimal, source)


def simulate(
    problem: Problem,
    tree: Tree,
    K: int,
    daemon: Daemon,
    initial: LabeledGraph,
    max_moves: int | None = None,
    trace: bool = False,
) -> Outcome:
    report = run(problem.rules(K), initial, daemon, max_moves=max_moves, trace=trace)
    return judge(problem, tree, K, report)
