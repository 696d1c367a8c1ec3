from __future__ import annotations

from fractions import Fraction

import numpy as np

from cmloops import (
    DegreeSequence,
    RngStream,
    bipartite_multi,
    directed_stats,
    edge_counts,
    enumerate_matchings,
    loop_multi_stats,
    sample_cm,
    truncated_multi,
)
from cmloops.pairing import Matching
from cmloops.stats import EdgeCounts


def _undirected_counts(mapping):
    return EdgeCounts("undirected", dict(mapping))


def _counts_directed(mapping):
    return EdgeCounts("directed", dict(mapping))


def test_two_loop_outcome():
    seq = DegreeSequence.undirected([2, 2])
    loops = Matching.from_partner(seq, np.array([1, 0, 3, 2]))
    st = loop_multi_stats(edge_counts(loops))
    assert (st.s, st.m, st.s_ind, st.simple) == (2, 0, 2, False)
    assert st.m_tilde == 0 and st.m_ind == 0
    assert st.removed == 2


def test_double_edge_outcome():
    seq = DegreeSequence.undirected([2, 2])
    parallel = Matching.from_partner(seq, np.array([2, 3, 0, 1]))
    st = loop_multi_stats(edge_counts(parallel))
    assert (st.s, st.m, st.m_tilde, st.m_ind) == (0, 1, 1, 1)
    assert not st.simple
    assert st.removed == 1


def test_triple_edge_counts_pairs_not_edges():
    # X_12 = 3: C(3,2)=3 multi-edge pairs but only 2 surplus edges
    st = loop_multi_stats(_undirected_counts({(1, 2): 3}))
    assert st.m == 3
    assert st.m_tilde == 2
    assert st.m_ind == 1


def test_stats_invariants_exhaustive_small():
    for degrees in ([2, 2], [3, 3], [2, 2, 2], [3, 2, 1], [4, 2, 2], [3, 3, 3, 3]):
        seq = DegreeSequence.undirected(degrees)
        for m, _ in enumerate_matchings(seq):
            counts = edge_counts(m)
            st = loop_multi_stats(counts)
            assert st.simple == (st.s == 0 and st.m == 0)
            assert (st.m == 0) == (st.m_tilde == 0)
            assert st.m_tilde <= st.m
            assert st.s_ind <= st.s
            assert st.m_ind <= st.m_tilde
            assert st.removed == st.s + st.m_tilde
            if all(x < 3 for (i, j), x in counts.counts.items() if i != j):
                assert st.m == st.m_tilde


def test_truncated_multi_examples():
    seq = DegreeSequence.undirected([2, 2, 5, 5])
    for r in range(30):
        counts = edge_counts(sample_cm(seq, RngStream(3, r)))
        st = loop_multi_stats(counts)
        assert truncated_multi(counts, seq, 5) == st.m  # m_cut >= d_max
        assert truncated_multi(counts, seq, 0) == 0
        only12 = truncated_multi(counts, seq, 2)
        x = counts.counts.get((1, 2), 0)
        assert only12 == x * (x - 1) // 2


def test_directed_stats_examples():
    cyc = _counts_directed({(1, 2): 1, (2, 1): 1})
    st = directed_stats(cyc)
    assert (st.s, st.m) == (0, 0)  # opposite directions are not multi-edges
    assert st.simple

    loops = _counts_directed({(1, 1): 1, (2, 2): 1})
    assert directed_stats(loops).s == 2

    par = _counts_directed({(1, 2): 2})
    st = directed_stats(par)
    assert st.m == 1
    assert not st.simple


def test_bipartite_multi_examples():
    assert bipartite_multi(EdgeCounts("bipartite", {(1, 1): 2})) == 1
    assert bipartite_multi(EdgeCounts("bipartite", {(1, 1): 1, (2, 2): 1})) == 0
    # l=(2,1), r=(2,1): M=1 iff both v1-left half-edges hit v1-right, p=1/3
    seq = DegreeSequence.bipartite([2, 1], [2, 1])
    hits = Fraction(0)
    for m, p in enumerate_matchings(seq):
        if bipartite_multi(edge_counts(m)) == 1:
            hits += p
    assert hits == Fraction(1, 3)
