import itertools
from collections import deque

import pytest

from selfstab.tree import Tree, path_tree, star_tree


def bfs_distances(tree: Tree, source: int) -> list[int]:
    adj = [[] for _ in range(tree.n)]
    for v, p in enumerate(tree.parent):
        if p >= 0:
            adj[v].append(p)
            adj[p].append(v)
    dist = [-1] * tree.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def naive_optimum(tree: Tree, K: int, problem: str) -> int:
    """itertools enumeration, kept apart from the numpy oracle it cross-checks."""
    dist = [bfs_distances(tree, v) for v in range(tree.n)]
    nodes = range(tree.n)
    sizes = range(tree.n, -1, -1) if problem == "pack" else range(tree.n + 1)
    for size in sizes:
        for S in itertools.combinations(nodes, size):
            if problem == "pack":
                if all(dist[u][v] > K for u, v in itertools.combinations(S, 2)):
                    return size
            elif all(any(dist[v][s] <= K for s in S) for v in nodes):
                return size
    raise AssertionError("unreachable")


@pytest.fixture
def p3():
    return path_tree(3)


@pytest.fixture
def star4():
    return star_tree(4)


ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=lambda k: int(k.split(".")[0])):
            terminalreporter.write_line(ACCEPTANCE[key])
