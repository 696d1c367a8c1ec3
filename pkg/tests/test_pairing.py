from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from cmloops import (
    CapExceededError,
    DegreeSequence,
    InvalidCouplingError,
    RngStream,
    double_factorial,
    edge_counts,
    enumerate_matchings,
    erase,
    halfedge_from_index,
    halfedge_index,
    loop_multi_stats,
    rewire_force_double,
    rewire_force_selfloop,
    sample_bcm,
    sample_cm,
    sample_dcm,
    write_matching,
)
from cmloops.pairing import HalfEdge, Matching
from cmloops.stats import degree_identity_holds


def _matchings(seq, cap=None):
    return [m for m, _ in enumerate_matchings(seq, cap)]


def test_double_factorial():
    assert [double_factorial(k) for k in (-1, 0, 1, 3, 5, 11)] == [1, 1, 1, 3, 15, 10395]


def test_enumerate_counts_and_probabilities():
    for degrees, count in (([2, 2], 3), ([1, 1], 1), ([3, 3, 3, 3], 10395)):
        seq = DegreeSequence.undirected(degrees)
        total = Fraction(0)
        seen = set()
        n = 0
        for m, p in enumerate_matchings(seq):
            assert p == Fraction(1, count)
            seen.add(m.pairs)
            total += p
            n += 1
        assert n == count == len(seen)
        assert total == 1


def test_enumerate_cap_error_names_cap():
    seq = DegreeSequence.undirected([3] * 6)
    with pytest.raises(CapExceededError, match="16"):
        list(enumerate_matchings(seq))
    # the cap is a parameter: a lowered one blocks, a matching one unlocks
    small = DegreeSequence.undirected([3, 3, 3, 3])
    with pytest.raises(CapExceededError, match="4"):
        list(enumerate_matchings(small, cap=4))
    assert len(_matchings(small, cap=12)) == double_factorial(11)


def test_sample_cm_single_matching():
    seq = DegreeSequence.undirected([2])
    m = sample_cm(seq, RngStream(0, 0))
    assert m.pairs == ((0, 1),)


def test_sample_cm_uniform_small():
    # frequency of each matching within 4 sigma of 1/(ell-1)!!
    reps = 20000
    for degrees in ([2, 2], [1, 1, 1, 1]):
        seq = DegreeSequence.undirected(degrees)
        support = {m.pairs for m in _matchings(seq)}
        freq = Counter()
        for r in range(reps):
            freq[sample_cm(seq, RngStream(99, r)).pairs] += 1
        assert set(freq) == support
        p = 1.0 / len(support)
        tol = 4.0 * math.sqrt(p * (1.0 - p) / reps)
        for c in freq.values():
            assert abs(c / reps - p) < tol


def test_sample_dcm_examples():
    forced = sample_dcm(DegreeSequence.directed([1], [1]), RngStream(0, 0))
    assert forced.pairs == ((0, 0),)

    two_loops = DegreeSequence.directed([2], [2])
    for r in range(8):
        counts = edge_counts(sample_dcm(two_loops, RngStream(1, r)))
        assert counts.counts == {(1, 1): 2}

    seq = DegreeSequence.directed([1, 1], [1, 1])
    freq = Counter(sample_dcm(seq, RngStream(5, r)).pairs for r in range(4000))
    assert set(freq) == {m.pairs for m in _matchings(seq)}
    assert len(freq) == 2
    for c in freq.values():
        assert abs(c / 4000 - 0.5) < 4.0 * math.sqrt(0.25 / 4000)


def test_sample_bcm_examples():
    forced = DegreeSequence.bipartite([2], [2])
    for r in range(8):
        counts = edge_counts(sample_bcm(forced, RngStream(2, r)))
        assert counts.counts == {(1, 1): 2}

    perm = DegreeSequence.bipartite([1, 1], [1, 1])
    for r in range(16):
        counts = edge_counts(sample_bcm(perm, RngStream(3, r)))
        assert sorted(counts.counts.values()) == [1, 1]
        rows = {i for i, _ in counts.counts}
        cols = {j for _, j in counts.counts}
        assert rows == cols == {1, 2}

    funnel = DegreeSequence.bipartite([1, 1], [2])
    for r in range(8):
        counts = edge_counts(sample_bcm(funnel, RngStream(4, r)))
        assert counts.counts == {(1, 1): 1, (2, 1): 1}


def test_edge_counts_examples():
    seq2 = DegreeSequence.undirected([2])
    assert edge_counts(_matchings(seq2)[0]).counts == {(1, 1): 1}

    seq22 = DegreeSequence.undirected([2, 2])
    parallel = Matching.from_partner(seq22, np.array([2, 3, 0, 1]))
    assert edge_counts(parallel).counts == {(1, 2): 2}

    cyc = DegreeSequence.directed([1, 1], [1, 1])
    cyclic = Matching.from_assign(cyc, np.array([1, 0]))
    assert edge_counts(cyclic).counts == {(2, 1): 1, (1, 2): 1}


def test_degree_identity_on_samples():
    seq = DegreeSequence.undirected([3, 2, 2, 1])
    for r in range(50):
        counts = edge_counts(sample_cm(seq, RngStream(11, r)))
        assert degree_identity_holds(counts, seq)


def test_bijection_samples_match_marginal_degrees():
    # every directed edge (i, j) consumes one out-slot of i and one in-slot
    # of j, so the count matrix has out-degrees as row sums and in-degrees
    # as column sums; same shape for bipartite left/right
    specs = [
        (DegreeSequence.directed([2, 1], [1, 2]), sample_dcm, (1, 2), (2, 1)),
        (DegreeSequence.bipartite([2, 2], [3, 1]), sample_bcm, (2, 2), (3, 1)),
    ]
    for seq, sampler, rows, cols in specs:
        for r in range(50):
            counts = edge_counts(sampler(seq, RngStream(11, r))).counts
            for i, want in enumerate(rows, start=1):
                assert sum(c for (a, _), c in counts.items() if a == i) == want
            for j, want in enumerate(cols, start=1):
                assert sum(c for (_, b), c in counts.items() if b == j) == want


def test_rewire_selfloop_examples():
    seq = DegreeSequence.undirected([2, 2])
    parallel = Matching.from_partner(seq, np.array([2, 3, 0, 1]))
    s, t = HalfEdge(1, 1), HalfEdge(1, 2)
    out = rewire_force_selfloop(parallel, s, t)
    assert edge_counts(out).counts == {(1, 1): 1, (2, 2): 1}
    # identity case: forcing a pair that is already matched
    assert rewire_force_selfloop(out, s, t).pairs == out.pairs
    with pytest.raises(InvalidCouplingError):
        rewire_force_selfloop(parallel, HalfEdge(1, 1), HalfEdge(2, 1))


def test_rewire_selfloop_pushforward_is_conditional():
    # d=(2,1,1): pushforward of the uniform law equals the conditional law
    seq = DegreeSequence.undirected([2, 1, 1])
    s, t = HalfEdge(1, 1), HalfEdge(1, 2)
    target = Counter()
    for m in _matchings(seq):
        out = rewire_force_selfloop(m, s, t)
        counts = edge_counts(out)
        assert counts.counts.get((1, 1), 0) == 1
        target[out.pairs] += 1
    conditioned = [
        m.pairs for m in _matchings(seq) if edge_counts(m).counts.get((1, 1), 0) == 1
    ]
    assert set(target) == set(conditioned)
    weights = set(target.values())
    assert len(weights) == 1  # uniform over the conditioned support


def test_rewire_selfloop_never_destroys_other_loop():
    seq = DegreeSequence.undirected([2, 2, 1, 1])
    s, t = HalfEdge(1, 1), HalfEdge(1, 2)
    for m in _matchings(seq):
        before = edge_counts(m).counts.get((2, 2), 0)
        after = edge_counts(rewire_force_selfloop(m, s, t)).counts.get((2, 2), 0)
        assert after >= before


def test_rewire_double_examples():
    seq = DegreeSequence.undirected([2, 2])
    hs = (HalfEdge(1, 1), HalfEdge(2, 1), HalfEdge(1, 2), HalfEdge(2, 2))
    target = Matching.from_partner(seq, np.array([2, 3, 0, 1]))
    assert rewire_force_double(target, *hs).pairs == target.pairs
    # starting from the two-self-loop matching the repair is forced
    loops = Matching.from_partner(seq, np.array([1, 0, 3, 2]))
    out = rewire_force_double(loops, *hs)
    assert edge_counts(out).counts == {(1, 2): 2}
    with pytest.raises(InvalidCouplingError):
        rewire_force_double(loops, HalfEdge(1, 1), HalfEdge(1, 2), HalfEdge(2, 1), HalfEdge(2, 2))


def test_rewire_double_pushforward_is_conditional():
    # d=(2,2,2,2): forcing the double edge between v1 and v2 from a uniform
    # source lands uniformly on the 3 conditioned matchings
    seq = DegreeSequence.undirected([2, 2, 2, 2])
    hs = (HalfEdge(1, 1), HalfEdge(2, 1), HalfEdge(1, 2), HalfEdge(2, 2))
    rng = RngStream(17, 0)
    required = {(0, 2), (1, 3)}
    source = _matchings(seq)
    freq = Counter()
    per_source = 90
    reps = per_source * len(source)
    for m in source:
        for _ in range(per_source):
            out = rewire_force_double(m, *hs, rng=rng)
            assert required <= {tuple(sorted(p)) for p in out.pairs}
            freq[out.pairs] += 1
    conditioned = [
        m.pairs for m in source if required <= {tuple(sorted(p)) for p in m.pairs}
    ]
    assert len(conditioned) == 3
    assert set(freq) == set(conditioned)
    p = 1.0 / 3.0
    tol = 4.0 * math.sqrt(p * (1 - p) / reps)
    for c in freq.values():
        assert abs(c / reps - p) < tol


def test_erase_examples():
    seq = DegreeSequence.undirected([2, 2])
    parallel = edge_counts(Matching.from_partner(seq, np.array([2, 3, 0, 1])))
    kept, removed = erase(parallel)
    assert kept.counts == {(1, 2): 1}
    assert removed == 1

    loop = edge_counts(_matchings(DegreeSequence.undirected([2]))[0])
    kept, removed = erase(loop)
    assert kept.counts == {}
    assert removed == 1

    simple = edge_counts(
        Matching.from_partner(DegreeSequence.undirected([1, 1]), np.array([1, 0]))
    )
    kept, removed = erase(simple)
    assert kept.counts == {(1, 2): 1}
    assert removed == 0


def test_erase_matches_stats_removed():
    seq = DegreeSequence.undirected([3, 3, 2, 2])
    for r in range(40):
        counts = edge_counts(sample_cm(seq, RngStream(23, r)))
        _, removed = erase(counts)
        assert removed == loop_multi_stats(counts).removed


def test_halfedge_index_roundtrip():
    seq = DegreeSequence.undirected([2, 3, 1])
    k = 0
    for v, d in enumerate([2, 3, 1], start=1):
        for slot in range(1, d + 1):
            he = HalfEdge(v, slot)
            assert halfedge_index(seq, he) == k
            assert halfedge_from_index(seq, k, "plain") == he
            k += 1


def test_write_matching_format(tmp_path):
    seq = DegreeSequence.undirected([2, 2])
    m = Matching.from_partner(seq, np.array([2, 3, 0, 1]))
    path = tmp_path / "m.txt"
    write_matching(path, m)
    assert path.read_text(encoding="utf-8") == "1:1 2:1\n1:2 2:2\n"
