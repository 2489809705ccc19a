"""Invariant checks for stabilized runs, shared by ``selfstab verify`` and the tests.

Each check returns a list of human-readable failures (empty when it holds).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import oracles
from .engine import Daemon, LabeledGraph, Strategy, run
from .problems import Problem, judge
from .tree import Tree, random_tree, serialize


def table_semantics(problem: Problem, tree: Tree, K: int, g: LabeledGraph) -> list[str]:
    out = []
    for v in range(tree.n):
        mine = problem.table(g.labels[v])
        if problem.name == "pack":
            ref = oracles.constrained_packing_table(tree, v, K)
        else:
            ref = oracles.constrained_domination_table(tree, v, K)
        for i, (got, want) in enumerate(zip(mine, ref)):
            if want is not oracles.INFEASIBLE and got != want:
                out.append(f"node {v} entry {i}: table {got}, exhaustive {want}")
    return out


def monotone_tables(problem: Problem, g: LabeledGraph) -> list[str]:
    out = []
    for v, lab in enumerate(g.labels):
        t = problem.table(lab)
        if any(t[i] < t[i + 1] for i in range(len(t) - 1)):
            out.append(f"node {v}: table {list(t)} is not non-increasing")
    return out


def root_law(problem: Problem, tree: Tree, K: int, g: LabeledGraph) -> list[str]:
    best = oracles.solve(tree, K, problem.name).optimum
    got = problem.root_value(g, K)
    return [] if got == best else [f"root table reports {got}, optimum is {best}"]


@dataclass
class Sweep:
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    def record(self, what: str, tree: Tree, problems: list[str]) -> None:
        self.checked += 1
        for p in problems:
            self.failures.append(f"{what}: {p}\n  tree: {serialize(tree).strip().replace(chr(10), ' | ')}")


def verify_instance(problem: Problem, tree: Tree, K: int, states: int, seed: int, sweep: Sweep) -> None:
    """Every stabilization invariant on one (tree, K)."""
    tag = f"{problem.name} n={tree.n} K={K}"
    fix = problem.silent_configuration(tree, K)
    sys = problem.rules(K)
    closure = run(sys, fix, Daemon(Strategy.RANDOM, seed))
    sweep.record(f"{tag} closure", tree, [] if closure.moves_total == 0 else [
        f"silent configuration moved {closure.moves_total} times"])
    for s in range(states):
        init = problem.random_configuration(tree, K, seed + s)
        for strategy in Strategy:
            outcome = judge(problem, tree, K, run(sys, init, Daemon(strategy, seed + s)))
            what = f"{tag} daemon={strategy.name} state={seed + s}"
            issues = []
            if not outcome.report.stabilized:
                issues.append("did not stabilize")
            if not outcome.valid:
                issues.append(f"invalid black set {outcome.blacks}")
            elif not outcome.optimal:
                issues.append(f"achieved {outcome.achieved}, optimum {outcome.optimum}")
            final = outcome.report.final
            if final.labels != fix.labels:
                issues.append("silent configuration differs from the fixpoint")
            sweep.record(what, tree, issues)
    sweep.record(f"{tag} tables", tree, table_semantics(problem, tree, K, fix))
    sweep.record(f"{tag} monotone", tree, monotone_tables(problem, fix))
    sweep.record(f"{tag} root", tree, root_law(problem, tree, K, fix))


def verify_sweep(problems: list[Problem], max_n: int, k_list: list[int], trees: int,
                 states: int, seed: int) -> Sweep:
    sweep = Sweep()
    for problem in problems:
        for K in k_list:
            for n in range(1, max_n + 1):
                for r in range(trees):
                    tree = random_tree(n, seed + 1000 * n + r)
                    verify_instance(problem, tree, K, states, seed + r, sweep)
    return sweep
