import pytest
from hypothesis import given, settings, strategies as st

from selfstab import oracles
from selfstab.domination import (
    DominationNodeState,
    domination_rules,
    domination_table,
    help_index,
    helper_distance,
    imposed_index_dom,
    random_configuration,
    resolve_choice_dom,
    silent_configuration,
    validate_domination,
)
from selfstab.engine import Daemon, Strategy, find_illegitimate, is_silent, run
from selfstab.packing import BLACK, NONE, WHITE, InconsistentTables, blacks
from selfstab.tree import Tree, path_tree, random_tree, star_tree

from conftest import naive_optimum


def test_table_lone_vertex():
    assert domination_table([], 1) == (1, 1, 0)
    assert domination_table([], 3) == (1, 1, 1, 1, 0, 0, 0)


def test_table_p3_center():
    assert oracles.constrained_domination_table(star_tree(3), 0, 1) == [1, 1, 1]
    assert domination_table([(1, 1, 0), (1, 1, 0)], 1) == (1, 1, 1)


def test_table_star_center():
    assert oracles.constrained_domination_table(star_tree(4), 0, 1) == [1, 1, 1]
    assert domination_table([(1, 1, 0)] * 3, 1) == (1, 1, 1)


def test_promise_entries_relax_towards_2k():
    # P7 rooted at an end, K=2: entry K+m only asks for depths >= m to be covered
    t = path_tree(7)
    ref = oracles.constrained_domination_table(t, 0, 2)
    assert ref == [2, 2, 2, 2, 1]
    assert list(silent_configuration(t, 2).labels[0].D) == ref


def test_table_errors():
    with pytest.raises(ValueError):
        domination_table([(1, 0)], 1)
    with pytest.raises(ValueError):
        domination_table([], 0)


def test_help_index_roundtrip():
    for K in (1, 2, 3):
        assert help_index(1, K) == 2 * K
        assert help_index(K + 1, K) == K
        for j in range(K + 1, 2 * K + 1):
            assert help_index(helper_distance(j, K), K) == j
        assert helper_distance(K, K) is None


def test_resolve_examples():
    assert resolve_choice_dom((1, 1, 0), {}, 1, 1) == (0, NONE, BLACK)
    assert resolve_choice_dom((1, 1, 0), {}, 2, 1) == (NONE, NONE, WHITE)
    assert resolve_choice_dom((1, 1, 1), {1: (1, 1, 0), 2: (1, 1, 0)}, 1, 1) == (0, NONE, BLACK)
    with pytest.raises(InconsistentTables):
        resolve_choice_dom((0, 0, 0), {1: (1, 1, 0)}, 1, 1)
    with pytest.raises(ValueError):
        resolve_choice_dom((1, 1, 0), {}, 3, 1)


def _state(color, j, t, a, K):
    return DominationNodeState((0,) * (2 * K + 1), j, t, a, color)


def test_imposed_index_examples():
    assert imposed_index_dom(_state(BLACK, 1, 0, NONE, 1), 3, 1) == 2
    assert imposed_index_dom(_state(BLACK, 2, 0, NONE, 2), 3, 2) == 4
    assert imposed_index_dom(_state(WHITE, 2, 1, 5, 2), 5, 2) == 0
    # no internal member, helper at distance K: one hop further is useless
    assert imposed_index_dom(_state(WHITE, 3, NONE, NONE, 2), 5, 2) == 2
    # helper at distance 1 (entry 2K) and no internal member: child sees it at 2
    assert imposed_index_dom(_state(WHITE, 4, NONE, NONE, 2), 5, 2) == help_index(2, 2) == 3
    with pytest.raises(ValueError):
        imposed_index_dom(_state(WHITE, 2, 1, 5, 2), 9, 2, parent_children=(5,))


@pytest.mark.parametrize("strategy", list(Strategy))
def test_p3_picks_the_middle(strategy):
    p3 = path_tree(3)
    assert oracles.brute_force_domination(p3, 1).optimum == 1
    for seed in range(30):
        r = run(domination_rules(1), random_configuration(p3, 1, seed), Daemon(strategy, seed))
        assert r.stabilized and blacks(r.final) == {1}


def test_p6_needs_two():
    p6 = path_tree(6)
    assert naive_optimum(p6, 1, "dom") == 2
    for seed in range(10):
        r = run(domination_rules(1), random_configuration(p6, 1, seed), Daemon(Strategy.RANDOM, seed))
        assert r.stabilized and len(blacks(r.final)) == 2


def test_validate_domination_examples():
    p3 = path_tree(3)
    assert validate_domination(p3, {0, 1, 2}, 1)
    assert not validate_domination(p3, set(), 1)
    assert validate_domination(p3, {1}, 1)
    assert not validate_domination(p3, {0}, 1)


def test_fixpoint_is_silent():
    for seed in range(20):
        t = random_tree(15, seed)
        assert is_silent(domination_rules(2), silent_configuration(t, 2))


monotone_tables = st.integers(1, 3).flatmap(
    lambda K: st.tuples(
        st.just(K),
        st.lists(
            st.lists(st.integers(0, 6), min_size=2 * K + 1, max_size=2 * K + 1).map(
                lambda xs: tuple(sorted(xs, reverse=True))
            ),
            max_size=4,
        ),
    )
)


@given(monotone_tables)
def test_table_monotone_for_monotone_children(case):
    K, children = case
    D = domination_table(children, K)
    assert all(D[i] >= D[i + 1] for i in range(2 * K))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10**6), st.integers(1, 3))
def test_fixpoint_invariants(n, seed, K):
    t = random_tree(n, seed)
    g = silent_configuration(t, K)
    for v, lab in enumerate(g.labels):
        assert list(lab.D) == oracles.constrained_domination_table(t, v, K)
        if not t.children[v]:
            assert lab.D == (1,) * (K + 1) + (0,) * K
        if lab.color == BLACK:
            assert lab.t == 0
    best = oracles.brute_force_domination(t, K).optimum
    assert g.labels[t.root].D[K] == best == len(blacks(g))
    assert validate_domination(t, blacks(g), K)
    assert find_illegitimate(g, domination_rules(K)) == []


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10**6), st.integers(1, 3), st.sampled_from(list(Strategy)))
def test_any_start_reaches_the_fixpoint(n, seed, K, strategy):
    t = random_tree(n, seed)
    r = run(domination_rules(K), random_configuration(t, K, seed), Daemon(strategy, seed))
    assert r.stabilized
    assert r.final.labels == silent_configuration(t, K).labels


def test_root_can_sit_anywhere():
    t = Tree((1, 3, 3, -1, 3, 4))
    for K in (1, 2):
        g = silent_configuration(t, K)
        assert len(blacks(g)) == naive_optimum(t, K, "dom")


def test_state_json_roundtrip():
    s = DominationNodeState((2, 1, 1, 0, 0), 3, None, None, WHITE)
    assert DominationNodeState.from_json(s.to_json()) == s
    assert s.to_json()["t"] is None and s.to_json()["D"] == [2, 1, 1, 0, 0]
