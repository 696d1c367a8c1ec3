from __future__ import annotations

import numpy as np
import pytest

from cmloops import (
    DegreeSequence,
    RngStream,
    edge_counts,
    loop_multi_stats,
    regular_degrees,
    run_montecarlo,
    sample_cm,
    truncated_multi,
)


def test_thread_count_never_changes_tables():
    seq = DegreeSequence.undirected(regular_degrees(30, 3))
    base = run_montecarlo(seq, 300, 42, threads=1)
    for threads in (2, 3, 7):
        other = run_montecarlo(seq, 300, 42, threads=threads)
        assert np.array_equal(base.table, other.table)


def test_batch_size_never_changes_tables():
    seq = DegreeSequence.undirected(regular_degrees(30, 3))
    base = run_montecarlo(seq, 300, 42)
    alt = run_montecarlo(seq, 300, 42, batch_size=17)
    assert np.array_equal(base.table, alt.table)


def test_rows_match_direct_sampling():
    # replicate r of the engine equals sample_cm on stream (seed, r)
    seq = DegreeSequence.undirected([3, 3, 2, 2])
    res = run_montecarlo(seq, 8, 7, m_cut=2)
    for r in range(8):
        counts = edge_counts(sample_cm(seq, RngStream(7, r)))
        st = loop_multi_stats(counts)
        row = res.table[r]
        cols = dict(zip(res.columns, row.tolist()))
        assert cols["s"] == st.s
        assert cols["m"] == st.m
        assert cols["m_tilde"] == st.m_tilde
        assert cols["s_ind"] == st.s_ind
        assert cols["m_ind"] == st.m_ind
        assert cols["removed"] == st.removed
        assert cols["m_trunc"] == truncated_multi(counts, seq, 2)


def test_column_layout_per_flavor():
    und = run_montecarlo(DegreeSequence.undirected([2, 2]), 4, 0)
    assert und.columns == ("s", "m", "m_tilde", "s_ind", "m_ind", "removed")
    dire = run_montecarlo(DegreeSequence.directed([1, 1], [1, 1]), 4, 0)
    assert dire.columns == ("s", "m")
    bip = run_montecarlo(DegreeSequence.bipartite([2], [2]), 4, 0)
    assert bip.columns == ("m",)
    assert bip.column("m").tolist() == [1, 1, 1, 1]  # forced double edge


def test_result_views():
    seq = DegreeSequence.undirected(regular_degrees(20, 3))
    res = run_montecarlo(seq, 500, 3)
    hist = res.dist("s")
    assert hist.total == 500
    assert sum(hist.counts.values()) == 500
    joint = res.joint()
    assert joint.marginal_s().counts == hist.counts
    simple = res.simple_fraction()
    matches = sum(
        c for (s, m), c in joint.counts.items() if s == 0 and m == 0
    )
    assert simple == matches / 500
    assert res.means()["s"] == pytest.approx(float(res.column("s").mean()))


def test_table_is_readonly():
    res = run_montecarlo(DegreeSequence.undirected([2, 2]), 4, 0)
    with pytest.raises(ValueError):
        res.table[0, 0] = 99


def test_argument_validation():
    seq = DegreeSequence.undirected([2, 2])
    with pytest.raises(ValueError):
        run_montecarlo(seq, 0, 0)
    with pytest.raises(ValueError):
        run_montecarlo(seq, 4, 0, threads=0)
    with pytest.raises(ValueError):
        run_montecarlo(DegreeSequence.directed([1], [1]), 4, 0, m_cut=1)
