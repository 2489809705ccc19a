import random

import pytest
from hypothesis import given, settings, strategies as st

from selfstab import oracles
from selfstab.engine import Daemon, LabeledGraph, Strategy, enabled, find_illegitimate, is_silent, run
from selfstab.packing import (
    BLACK,
    NONE,
    WHITE,
    InconsistentTables,
    PackingNodeState,
    blacks,
    imposed_index,
    packing_rules,
    packing_table,
    random_configuration,
    resolve_choice,
    silent_configuration,
    snap_packing_rules,
    validate_packing,
)
from selfstab.tree import Tree, path_tree, random_tree, star_tree


def test_table_leaf():
    assert packing_table([], 2) == (1, 0, 0)


def test_table_star_center():
    # brute force on the 4-node star: no leaf lies at depth >= 2, hence the trailing 0
    assert oracles.constrained_packing_table(star_tree(4), 0, 2) == [1, 1, 0]
    assert packing_table([(1, 0, 0)] * 3, 2) == (1, 1, 0)


def test_table_p3_center():
    assert oracles.constrained_packing_table(star_tree(3), 0, 1) == [2, 2]
    assert packing_table([(1, 0), (1, 0)], 1) == (2, 2)


def test_table_p2_upper():
    assert oracles.constrained_packing_table(path_tree(2), 0, 2) == [1, 1, 0]
    assert packing_table([(1, 0, 0)], 2) == (1, 1, 0)


def test_table_errors():
    with pytest.raises(ValueError):
        packing_table([(1, 0)], 2)
    with pytest.raises(ValueError):
        packing_table([], 0)


def test_designated_form_needs_suffix_max():
    # P5 rooted at its centre, K=3: designating at level 1 forces the other arm
    # to depth >= 3 (value 1) while level 2 allows both ends (value 2)
    t = Tree((-1, 0, 1, 4, 0))
    assert oracles.constrained_packing_table(t, 0, 3) == [2, 2, 2, 0]
    arm = (1, 1, 0, 0)
    assert packing_table([arm, arm], 3) == (2, 2, 2, 0)
    assert resolve_choice((2, 2, 2, 0), {1: arm, 4: arm}, 1, 3) == (2, 1, WHITE)


def test_resolve_leaf():
    assert resolve_choice((1, 0), {}, 0, 1) == (0, NONE, BLACK)
    assert resolve_choice((1, 0), {}, 1, 1) == (1, NONE, WHITE)


def test_resolve_p3_center_prefers_smaller_child():
    assert resolve_choice((2, 2), {1: (1, 0), 2: (1, 0)}, 0, 1) == (1, 1, WHITE)


def test_resolve_errors():
    with pytest.raises(ValueError):
        resolve_choice((1, 0), {}, 2, 1)
    with pytest.raises(InconsistentTables):
        resolve_choice((5, 5), {1: (1, 0)}, 1, 1)


def _state(color, t=0, a=NONE, K=3):
    return PackingNodeState((0,) * (K + 1), 0, t, a, color)


def test_imposed_index_examples():
    assert imposed_index(_state(BLACK), 4, 3) == 3
    parent = _state(WHITE, t=1, a=4)
    assert imposed_index(parent, 4, 3) == 0
    assert imposed_index(parent, 5, 3) == 2
    top = _state(WHITE, t=3, a=4)
    assert imposed_index(top, 4, 3) == 2 and imposed_index(top, 5, 3) == 2
    with pytest.raises(ValueError):
        imposed_index(parent, 9, 3, parent_children=(4, 5))


def test_imposed_index_clamps_corrupt_parent():
    assert imposed_index(_state(WHITE, t=-7, a=None), 1, 2) == 2
    assert imposed_index(_state(WHITE, t=-7, a=1), 1, 2) == 0
    assert imposed_index(_state(WHITE, t=40, a=1), 1, 2) == 2


def test_fixpoint_is_silent():
    for seed in range(20):
        t = random_tree(15, seed)
        assert is_silent(packing_rules(2), silent_configuration(t, 2))


def test_corrupt_leaf_table_enables_r1_there():
    t = random_tree(12, 5)
    g = silent_configuration(t, 2)
    leaf = next(v for v in range(t.n) if not t.children[v])
    g.labels[leaf] = g.labels[leaf]._replace(M=(7, 7, 7))
    on = enabled(packing_rules(2), g)
    assert (leaf, "R1") in on
    assert on <= {(leaf, "R1"), (t.parent[leaf], "R1")}


@pytest.mark.parametrize("strategy", list(Strategy))
def test_p3_stabilizes_to_both_ends(strategy):
    p3 = path_tree(3)
    assert oracles.brute_force_packing(p3, 1).optimum == 2
    assert oracles.brute_force_packing(p3, 1).optima_count == 1
    for seed in range(30):
        r = run(packing_rules(1), random_configuration(p3, 1, seed), Daemon(strategy, seed))
        assert r.stabilized and blacks(r.final) == {0, 2}


def test_validate_packing_examples():
    p3 = path_tree(3)
    assert validate_packing(p3, set(), 1)
    assert validate_packing(p3, {1}, 1)
    assert validate_packing(p3, {0, 2}, 1)
    assert not validate_packing(p3, {0, 2}, 2)


monotone_tables = st.integers(1, 3).flatmap(
    lambda K: st.tuples(
        st.just(K),
        st.lists(
            st.lists(st.integers(0, 6), min_size=K + 1, max_size=K + 1).map(
                lambda xs: tuple(sorted(xs, reverse=True))
            ),
            max_size=4,
        ),
    )
)


@given(monotone_tables)
def test_table_monotone_for_monotone_children(case):
    K, children = case
    M = packing_table(children, K)
    assert all(M[i] >= M[i + 1] for i in range(K))
    assert M[0] <= 1 + sum(c[0] for c in children)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10**6), st.integers(1, 3))
def test_fixpoint_invariants(n, seed, K):
    t = random_tree(n, seed)
    g = silent_configuration(t, K)
    for v, lab in enumerate(g.labels):
        assert list(lab.M) == oracles.constrained_packing_table(t, v, K)
        assert lab.M[0] <= n
        if not t.children[v]:
            assert lab.M == (1,) + (0,) * K
        if lab.color == BLACK:
            assert lab.t == 0 and lab.a is NONE
    assert g.labels[t.root].M[0] == oracles.brute_force_packing(t, K).optimum
    assert len(blacks(g)) == g.labels[t.root].M[0]
    assert validate_packing(t, blacks(g), K)
    assert find_illegitimate(g, packing_rules(K)) == []


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10**6), st.integers(1, 3), st.sampled_from(list(Strategy)))
def test_any_start_reaches_the_fixpoint(n, seed, K, strategy):
    t = random_tree(n, seed)
    r = run(packing_rules(K), random_configuration(t, K, seed), Daemon(strategy, seed))
    assert r.stabilized
    assert r.final.labels == silent_configuration(t, K).labels


def _value_faults(t, K, seed):
    rng = random.Random(seed)
    g = random_configuration(t, K, seed)
    for v in range(t.n):
        lab = g.labels[v]
        if rng.random() < 0.5:
            g.labels[v] = lab._replace(color=BLACK, t=rng.randint(-2, K + 2))
    return g


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10**6), st.integers(1, 3))
def test_snap_variant_reaches_same_fixpoint(n, seed, K):
    t = random_tree(n, seed)
    r = run(snap_packing_rules(K), _value_faults(t, K, seed), Daemon(Strategy.RANDOM, seed))
    assert r.stabilized
    assert r.final.labels == silent_configuration(t, K).labels
    assert find_illegitimate(r.final, snap_packing_rules(K)) == []


def test_snap_correction_fires_first():
    t = path_tree(4)
    g = silent_configuration(t, 1)
    g.labels[2] = g.labels[2]._replace(color=BLACK, t=3)
    sys = snap_packing_rules(1)
    assert (2, "C1") in enabled(sys, g)
    r = run(sys, g, Daemon(Strategy.GREEDY_SHALLOWEST, 0), trace=True)
    first_at_2 = next(rule for _, v, rule in r.trace if v == 2)
    assert first_at_2 == "C1"
    assert r.final.labels == silent_configuration(t, 1).labels


def test_state_json_roundtrip():
    s = PackingNodeState((2, 1, 0), 1, 2, 5, WHITE)
    assert PackingNodeState.from_json(s.to_json()) == s
    assert s.to_json() == {"M": [2, 1, 0], "j": 1, "t": 2, "a": 5, "color": "W"}


def test_corrupt_initial_states_cover_out_of_range_values():
    t = random_tree(10, 0)
    labels = [lab for s in range(50) for lab in random_configuration(t, 2, s).labels]
    assert any(x < 0 or x > 10 for lab in labels for x in lab.M)
    assert any(not 0 <= lab.j <= 2 for lab in labels)
    assert any(lab.a is not None and not 0 <= lab.a < 10 for lab in labels)


def test_labeled_graph_equality():
    t = path_tree(2)
    assert LabeledGraph(t, [1, 2]) == LabeledGraph(t, [1, 2])
