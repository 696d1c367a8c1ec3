"""Loop and multi-edge statistics of a single pairing outcome.

These operate on EdgeCounts dictionaries; the Monte Carlo engine computes the
same quantities in bulk inside the batch kernels, and tests pin the two routes
against each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degseq import BIPARTITE, DIRECTED, UNDIRECTED, DegreeSequence
from .errors import InvalidCouplingError
from .pairing import EdgeCounts


@dataclass(frozen=True)
class LoopMultiStats:
    """Counts for one undirected pairing outcome.

    s: self-loop pairs, sum of X_ii.
    m: multi-edge pairs, sum over i<j of C(X_ij, 2).
    m_tilde: surplus edges, sum over i<j of (X_ij - 1)+.
    s_ind: vertices carrying at least one self-loop.
    m_ind: vertex pairs joined by at least two edges.
    removed: edges dropped by the erasure, s + m_tilde.
    simple: no self-loops and no multi-edges (s == 0 and m == 0).
    """

    s: int
    m: int
    m_tilde: int
    s_ind: int
    m_ind: int
    removed: int
    simple: bool


def loop_multi_stats(counts: EdgeCounts) -> LoopMultiStats:
    if counts.kind != UNDIRECTED:
        raise InvalidCouplingError(f"loop_multi_stats needs undirected counts, got {counts.kind}")
    s = m = m_tilde = s_ind = m_ind = 0
    for (i, j), x in counts.counts.items():
        if i == j:
            s += x
            s_ind += 1
        else:
            m += x * (x - 1) // 2
            m_tilde += x - 1
            if x >= 2:
                m_ind += 1
    return LoopMultiStats(
        s=s,
        m=m,
        m_tilde=m_tilde,
        s_ind=s_ind,
        m_ind=m_ind,
        removed=s + m_tilde,
        simple=(s == 0 and m == 0),
    )


def truncated_multi(counts: EdgeCounts, seq: DegreeSequence, m_cut: int) -> int:
    """Multi-edge pairs restricted to endpoints of degree <= m_cut."""
    if counts.kind != UNDIRECTED:
        raise InvalidCouplingError(f"truncated_multi needs undirected counts, got {counts.kind}")
    d = seq.degrees
    total = 0
    for (i, j), x in counts.counts.items():
        if i != j and x >= 2 and d[i - 1] <= m_cut and d[j - 1] <= m_cut:
            total += x * (x - 1) // 2
    return total


@dataclass(frozen=True)
class DirectedStats:
    """Counts for one directed pairing outcome.

    s: directed self-loops, sum of X_ii.
    m: directed multi-edge pairs, sum over ordered i != j of C(X_ij, 2).
    """

    s: int
    m: int
    simple: bool


def directed_stats(counts: EdgeCounts) -> DirectedStats:
    if counts.kind != DIRECTED:
        raise InvalidCouplingError(f"directed_stats needs directed counts, got {counts.kind}")
    s = m = 0
    for (tail, head), x in counts.counts.items():
        if tail == head:
            s += x
        else:
            m += x * (x - 1) // 2
    return DirectedStats(s=s, m=m, simple=(s == 0 and m == 0))


def bipartite_multi(counts: EdgeCounts) -> int:
    """Multi-edge pairs of a bipartite outcome: sum over (i, j) of C(X_ij, 2)."""
    if counts.kind != BIPARTITE:
        raise InvalidCouplingError(f"bipartite_multi needs bipartite counts, got {counts.kind}")
    return sum(x * (x - 1) // 2 for x in counts.counts.values())


def degree_identity_holds(counts: EdgeCounts, seq: DegreeSequence) -> bool:
    """Check d_i = 2 X_ii + sum_{j != i} X_ij for every vertex (undirected)."""
    if counts.kind != UNDIRECTED:
        raise InvalidCouplingError("degree_identity_holds needs undirected counts")
    d = seq.degrees
    acc = np.zeros(d.size, dtype=np.int64)
    for (i, j), x in counts.counts.items():
        if i == j:
            acc[i - 1] += 2 * x
        else:
            acc[i - 1] += x
            acc[j - 1] += x
    return bool(np.array_equal(acc, d))
