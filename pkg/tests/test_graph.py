import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SINGLE_CHECK_ALIST
from oracles import bfs_neighborhood
from untainted.graph import (
    AlistError,
    Kind,
    TannerGraph,
    chk,
    degree,
    hamming74,
    neighborhood,
    parse_alist,
    random_regular_graph,
    sym,
    to_alist,
)

HAMMING_ALIST = """7 3
3 4
1 1 2 1 2 2 3
4 4 4
1 0 0
2 0 0
1 2 0
3 0 0
1 3 0
2 3 0
1 2 3
1 3 5 7
2 3 6 7
4 5 6 7
"""


def test_parse_single_check():
    g = parse_alist(SINGLE_CHECK_ALIST)
    assert (g.n, g.m) == (2, 1)
    assert g.check_adj == ((0, 1),)
    assert degree(g, chk(0)) == 2


def test_parse_hamming_zero_padded():
    g = parse_alist(HAMMING_ALIST)
    assert (g.n, g.m) == (7, 3)
    assert [len(a) for a in g.check_adj] == [4, 4, 4]
    assert g.edges == hamming74().edges


def test_edge_set_mismatch():
    bad = SINGLE_CHECK_ALIST.replace("\n1 2\n", "\n1 0\n", 1)
    # the degree line now disagrees with the list length
    with pytest.raises(AlistError):
        parse_alist(bad)
    # consistent degrees but the check side lists the wrong symbol
    text = "2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n"
    with pytest.raises(AlistError, match="mismatch"):
        parse_alist(text)


@pytest.mark.parametrize("text,msg", [
    ("2\n", "header"),
    ("2 1\n1 2\n1 1\n", "degree"),
    ("2 1\n1 2\n1 1\n2\n1\n1\n", "adjacency"),
    ("2 1\n1 2\n1 1\n2\n3\n1\n1 2\n", "range"),
    ("2 1\n1 2\n1 1\n2\n1\n1\n1 1\n", "duplicate"),
    ("2 1\n1 x\n1 1\n2\n1\n1\n1 2\n", "non-integer"),
])
def test_malformed(text, msg):
    with pytest.raises(AlistError, match=msg):
        parse_alist(text)


def test_duplicate_edges_rejected():
    with pytest.raises(ValueError):
        TannerGraph.from_edges(2, 1, [(0, 0), (0, 0)])


def test_roundtrip_with_isolated_nodes():
    g = TannerGraph.from_edges(4, 3, [(0, 0), (1, 0), (2, 2)])
    g2 = parse_alist(to_alist(g))
    assert g2.edges == g.edges and (g2.n, g2.m) == (4, 3)


def test_serializer_is_sorted_and_unpadded(hamming):
    lines = to_alist(hamming).splitlines()
    assert lines[4] == "1"
    assert lines[-1] == "4 5 6 7"
    assert "0" not in lines[4:][0].split()


def test_neighborhood_examples(single_check):
    z = sym(0)
    assert neighborhood(single_check, z, 0) == {z}
    assert neighborhood(single_check, z, 2) == {sym(0), chk(0), sym(1)}
    comp = {sym(0), sym(1), chk(0)}
    assert neighborhood(single_check, z, 50) == comp


def test_degree_examples(single_check, hamming):
    assert degree(single_check, sym(0)) == 1
    assert degree(single_check, chk(0)) == 2
    assert degree(hamming, chk(1)) == 4


def test_invalid_node(single_check):
    with pytest.raises(IndexError):
        degree(single_check, sym(5))
    with pytest.raises(IndexError):
        neighborhood(single_check, chk(1), 1)


def _graph_from_matrix_strategy():
    @st.composite
    def build(draw):
        n = draw(st.integers(1, 25))
        m = draw(st.integers(1, 25))
        bits = draw(st.lists(st.booleans(), min_size=n * m, max_size=n * m))
        return np.array(bits, dtype=np.uint8).reshape(m, n)
    return build()


@settings(max_examples=60, deadline=None)
@given(_graph_from_matrix_strategy())
def test_neighborhood_matches_bfs_oracle(H):
    g = TannerGraph.from_matrix(H)
    m, n = H.shape
    for kind, size in ((Kind.SYMBOL, n), (Kind.CHECK, m)):
        for i in range(size):
            z = sym(i) if kind is Kind.SYMBOL else chk(i)
            prev = None
            for k in range(7):
                got = neighborhood(g, z, k)
                want = bfs_neighborhood(H, ("s" if kind is Kind.SYMBOL else "c", i), k)
                assert {("s" if w.kind is Kind.SYMBOL else "c", w.index) for w in got} == want
                if prev is not None:
                    assert prev <= got
                prev = got
            assert len(neighborhood(g, z, 1)) == degree(g, z) + 1


@settings(max_examples=40, deadline=None)
@given(_graph_from_matrix_strategy())
def test_alist_roundtrip(H):
    g = TannerGraph.from_matrix(H)
    assert parse_alist(to_alist(g)).edges == g.edges


def test_random_regular_graph_degrees():
    g = random_regular_graph(96, 3, 6, seed=3)
    assert g.m == 48
    assert {len(a) for a in g.symbol_adj} == {3}
    assert {len(a) for a in g.check_adj} == {6}
    assert random_regular_graph(96, 3, 6, seed=3) == g


def test_graph_is_immutable(single_check):
    with pytest.raises(Exception):
        single_check.n = 5
