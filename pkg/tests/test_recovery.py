import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_small_graph, rk_literal, tree_erasure_enumeration
from untainted.channels import ChannelModel
from untainted.graph import TannerGraph, random_regular_graph
from untainted.puncturing import untainted_puncture
from untainted.recovery import (
    CHECK,
    SYMBOL,
    UNRECOVERABLE,
    TreeBuilder,
    attach_check,
    bec_tree_erasure,
    build_recovery_tree,
    check_extra_check_ordering,
    classify_recovery,
    mc_tree_error,
    random_recovery_tree,
    random_tree_pair,
)


def simple_tree(n_checks, leaves_per_check):
    b = TreeBuilder()
    root = b.add(SYMBOL, -1, -1, 1)
    for _ in range(n_checks):
        c = b.add(CHECK, root)
        for _ in range(leaves_per_check):
            b.add(SYMBOL, c)
    return b.build()


# classification

def test_empty_pattern(hamming):
    cls = classify_recovery(hamming, [])
    assert cls.punctured == ()
    assert np.all(cls.survived_at == -1)


def test_gadget_steps(step_gadget):
    g, P = step_gadget
    cls = classify_recovery(g, P)
    assert cls.steps_of_punctured() == {0: 1, 1: 2, 3: 3}
    assert list(cls.survived_at) == [1, 2, 3]
    assert rk_literal(g.to_matrix(), set(P)) == {0: 1, 1: 2, 3: 3}


def test_unrecoverable():
    # two punctured symbols sharing their only check
    g = TannerGraph.from_edges(3, 1, [(0, 0), (1, 0), (2, 0)])
    cls = classify_recovery(g, [0, 1])
    assert cls.step[0] == UNRECOVERABLE and cls.step[1] == UNRECOVERABLE
    assert cls.survived_at[0] == -1


def test_max_steps_cutoff(step_gadget):
    g, P = step_gadget
    cls = classify_recovery(g, P, max_steps=2)
    assert cls.steps_of_punctured() == {0: 1, 1: 2, 3: UNRECOVERABLE}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_classification_matches_literal_definition(seed):
    rng = np.random.default_rng(seed)
    H = random_small_graph(rng, n_max=8)
    g = TannerGraph.from_matrix(H)
    for r in range(g.n + 1):
        for P in itertools.combinations(range(g.n), r):
            cls = classify_recovery(g, P)
            want = rk_literal(H, set(P))
            got = {v: s for v, s in cls.steps_of_punctured().items() if s != UNRECOVERABLE}
            assert got == want


def test_untainted_all_step_one(regular96):
    pat = untainted_puncture(regular96, seed=3)
    cls = classify_recovery(regular96, pat)
    assert all(cls.step[v] == 1 for v in pat.order)
    for v in pat.order:
        for c in regular96.symbol_adj[v]:
            assert cls.survived_at[c] == 1
    # no check has two punctured neighbors
    punct = set(pat.order)
    assert all(sum(w in punct for w in a) <= 1 for a in regular96.check_adj)


# trees

def test_step1_tree_shape(regular96):
    pat = untainted_puncture(regular96, seed=1)
    cls = classify_recovery(regular96, pat)
    v = pat.order[0]
    t = build_recovery_tree(regular96, cls, v)
    t.validate()
    checks = [i for i in range(t.size) if t.kind[i] == CHECK]
    leaves = t.leaves()
    assert len(checks) == 3 and len(leaves) == 3 * 5
    assert max(t.depth) == 2
    assert not any(t.punctured[i] for i in leaves)


def test_gadget_step2_tree(step_gadget):
    g, P = step_gadget
    cls = classify_recovery(g, P)
    t = build_recovery_tree(g, cls, 1)
    t.validate()
    # v1 -> c1 -> v0 -> c0 -> v2; c2 is pruned because v3 has step 3
    assert [(int(t.kind[i]), int(t.origin[i]), int(t.depth[i])) for i in range(t.size)] == [
        (SYMBOL, 1, 0), (CHECK, 1, 1), (SYMBOL, 0, 2), (CHECK, 0, 3), (SYMBOL, 2, 4)
    ]
    eps, pe = bec_tree_erasure(t, 0.3)
    assert eps == pytest.approx(0.3) and pe == pytest.approx(0.15)
    assert "c1" in t.dump() and "->" in t.dump("dot")


def test_tree_errors(step_gadget):
    g, P = step_gadget
    cls = classify_recovery(g, P)
    with pytest.raises(ValueError):
        build_recovery_tree(g, cls, 2)
    cls2 = classify_recovery(g, P, max_steps=2)
    with pytest.raises(ValueError):
        build_recovery_tree(g, cls2, 3)


def test_cycle_flag():
    # 4-cycle v0-c0-v1-c1-v0 plus leaves so v0 (step 2 via v1) sees v1 twice
    g = TannerGraph.from_edges(4, 3, [(0, 0), (1, 0), (0, 1), (1, 1), (1, 2), (2, 2), (3, 0)])
    # v1 step 1 via c2; v0 step 2 via c0 or c1 (c0 also has unpunctured v3)
    cls = classify_recovery(g, [0, 1])
    assert cls.step[1] == 1 and cls.step[0] == 2
    t = build_recovery_tree(g, cls, 0)
    t.validate()
    assert not t.locally_tree_like


def test_degree_one_check_pins_symbol():
    # c1 touches only v1, so it recovers v1 by itself; v0 then follows via c0
    g = TannerGraph.from_edges(2, 2, [(0, 0), (1, 0), (1, 1)])
    cls = classify_recovery(g, [0, 1])
    assert cls.steps_of_punctured() == {0: 2, 1: 1}
    t1 = build_recovery_tree(g, cls, 1)
    t1.validate()
    assert t1.size == 2 and bec_tree_erasure(t1, 0.4) == (0.0, 0.0)
    t0 = build_recovery_tree(g, cls, 0)
    t0.validate()
    assert t0.size == 4 and bec_tree_erasure(t0, 0.4)[0] == 0.0
    assert mc_tree_error(t0, ChannelModel.bsc(0.3), 1000).p_e == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_graph_trees_valid(seed):
    rng = np.random.default_rng(seed)
    H = random_small_graph(rng, n_max=10)
    g = TannerGraph.from_matrix(H)
    P = [v for v in range(g.n) if rng.random() < 0.4]
    cls = classify_recovery(g, P)
    for v in P:
        if cls.step[v] >= 1:
            t = build_recovery_tree(g, cls, v)
            t.validate()
            if len(t.leaves()) <= 12:
                assert bec_tree_erasure(t, 0.3)[0] == pytest.approx(tree_erasure_enumeration(t, 0.3), abs=1e-12)


# BEC recursion

def test_bec_examples():
    t1 = simple_tree(1, 2)
    eps, pe = bec_tree_erasure(t1, 0.1)
    assert eps == pytest.approx(0.19) and pe == pytest.approx(0.095)
    assert tree_erasure_enumeration(t1, 0.1) == pytest.approx(0.19)
    t2 = simple_tree(2, 2)
    eps2, pe2 = bec_tree_erasure(t2, 0.5)
    assert eps2 == pytest.approx(0.5625) and tree_erasure_enumeration(t2, 0.5) == pytest.approx(0.5625)
    assert bec_tree_erasure(t1, 0.5)[0] == pytest.approx(0.75)
    assert pe2 == pytest.approx(0.28125) and bec_tree_erasure(t1, 0.5)[1] == pytest.approx(0.375)
    assert bec_tree_erasure(t2, 0.0) == (0.0, 0.0)
    assert bec_tree_erasure(t2, 1.0) == (1.0, 0.5)


def test_bec_exact_rationals():
    t = simple_tree(2, 2)
    eps, pe = bec_tree_erasure(t, Fraction(1, 2))
    assert eps == Fraction(9, 16) and pe == Fraction(9, 32)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from([0.1, 0.3, 0.5, 0.9]))
def test_bec_matches_enumeration(seed, alpha):
    rng = np.random.default_rng(seed)
    while True:
        t = random_recovery_tree(rng, int(rng.integers(1, 4)))
        if len(t.leaves()) <= 14:
            break
    t.validate()
    eps, pe = bec_tree_erasure(t, alpha)
    assert 0 <= eps <= 1 and 0 <= pe <= 0.5
    assert eps == pytest.approx(tree_erasure_enumeration(t, alpha), abs=1e-12)


def test_extra_check_examples():
    one, two = simple_tree(1, 2), simple_tree(2, 2)
    from untainted.recovery import TreePair
    rep = check_extra_check_ordering([TreePair(one, two, 0, 0)], [0.0, 0.25, 0.5, 0.75, 1.0])
    assert rep.ok
    row = next(r for r in rep.rows if r.alpha == 0.5)
    assert (row.pe_without, row.pe_with) == (0.375, 0.28125)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_extra_check_random_pairs(seed):
    rng = np.random.default_rng(seed)
    pr = random_tree_pair(rng, int(rng.integers(1, 4)))
    assert pr.with_.size > pr.without.size
    assert check_extra_check_ordering([pr], [0.0, 0.2, 0.5, 0.8, 0.99, 1.0]).ok


def test_attach_check_keeps_order():
    base = simple_tree(1, 2)
    sub = TreeBuilder()
    c = sub.add(CHECK)
    sub.add(SYMBOL, c)
    t = attach_check(base, 0, sub.build())
    t.validate()
    assert t.size == base.size + 2
    with pytest.raises(ValueError):
        attach_check(base, 1, sub.build())


def test_validate_rejects_bad_trees():
    b = TreeBuilder()
    r = b.add(SYMBOL, -1, -1, 1)
    c = b.add(CHECK, r)
    b.add(SYMBOL, c, -1, 1)  # punctured leaf
    with pytest.raises(ValueError):
        b.build().validate()


# Monte-Carlo tree error

def test_mc_degenerate_is_half():
    t = simple_tree(2, 3)
    est = mc_tree_error(t, ChannelModel.degenerate(), 1000, seed=1)
    assert est.p_e == 0.5


def test_mc_bec_matches_recursion():
    t = simple_tree(1, 2)
    est = mc_tree_error(t, ChannelModel.bec(0.1), 10**6, seed=2)
    assert abs(est.p_e - 0.095) <= 3 * est.std_err


def test_mc_bsc_noiseless_limit():
    t = simple_tree(2, 3)
    assert mc_tree_error(t, ChannelModel.bsc(1e-9), 20000, seed=3).p_e == 0.0


def test_mc_deterministic_and_validated():
    t = simple_tree(2, 3)
    a = mc_tree_error(t, ChannelModel.awgn(0.9), 10000, seed=4)
    assert a == mc_tree_error(t, ChannelModel.awgn(0.9), 10000, seed=4)
    with pytest.raises(ValueError):
        mc_tree_error(t, ChannelModel.awgn(0.9), 0)


def test_mc_extra_check_pairs():
    rng = np.random.default_rng(7)
    for i in range(4):
        pr = random_tree_pair(rng, int(rng.integers(1, 3)))
        for ch in (ChannelModel.bsc(0.07), ChannelModel.awgn(0.8)):
            a = mc_tree_error(pr.without, ch, 20000, seed=10 + i)
            b = mc_tree_error(pr.with_, ch, 20000, seed=100 + i)
            assert a.p_e >= b.p_e - 3 * np.hypot(a.std_err, b.std_err)
