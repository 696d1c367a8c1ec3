"""Pairings of half-edges: sampling, exhaustive enumeration, and rewiring.

Half-edges are identified as (vertex, slot) with 1-based vertex and slot, and
are globally ordered by that pair; internally they map to 0-based flat indices
per side.  A matching stores its pairs canonically: undirected pairs are
(smaller index, larger index) sorted by first element; directed/bipartite
pairs are (level-side index, chosen-side index) sorted by the level side.

Sampling is sequential pairing: the lowest unmatched half-edge is repeatedly
paired with a uniform choice among the remaining unmatched ones, which yields
the uniform distribution over pairings in O(ell) per draw.  The same walk
drives the level-side-to-choice-side bijections of the directed and bipartite
models.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import _kernels
from .degseq import BIPARTITE, DIRECTED, UNDIRECTED, DegreeSequence
from .errors import CapExceededError, InvalidCouplingError, InvalidDegreeSequenceError
from .rng import RngStream

ENUM_CAP_UNDIRECTED = 16  # at most 15!! = 2,027,025 pairings
ENUM_CAP_BIJECTION = 8  # at most 8! = 40,320 bijections

_SIDES = {
    UNDIRECTED: ("plain", "plain"),
    DIRECTED: ("in", "out"),
    BIPARTITE: ("left", "right"),
}


def double_factorial(n: int) -> int:
    """n!! for odd n >= -1 (and even n), with (-1)!! = 1."""
    result = 1
    for k in range(n, 1, -2):
        result *= k
    return result


@dataclass(frozen=True, order=True)
class HalfEdge:
    """One attachment point: slot `slot` of vertex `vertex` (both 1-based)."""

    vertex: int
    slot: int
    side: str = "plain"

    def __str__(self) -> str:
        return f"{self.vertex}:{self.slot}"


def _side_degrees(seq: DegreeSequence, side: str) -> np.ndarray:
    first, second = _SIDES[seq.kind]
    if side == first:
        return seq.a
    if side == second and seq.b is not None:
        return seq.b
    raise InvalidCouplingError(f"side {side!r} does not exist for a {seq.kind} sequence")


def halfedge_index(seq: DegreeSequence, he: HalfEdge) -> int:
    """Flat 0-based index of a half-edge within its side."""
    degrees = _side_degrees(seq, he.side)
    if not 1 <= he.vertex <= degrees.size:
        raise InvalidCouplingError(f"vertex {he.vertex} out of range 1..{degrees.size}")
    d = int(degrees[he.vertex - 1])
    if not 1 <= he.slot <= d:
        raise InvalidCouplingError(
            f"slot {he.slot} out of range 1..{d} for vertex {he.vertex} ({he.side})"
        )
    offset = int(degrees[: he.vertex - 1].sum())
    return offset + he.slot - 1


def halfedge_from_index(seq: DegreeSequence, index: int, side: str) -> HalfEdge:
    degrees = _side_degrees(seq, side)
    ends = np.cumsum(degrees)
    v = int(np.searchsorted(ends, index, side="right"))
    start = 0 if v == 0 else int(ends[v - 1])
    return HalfEdge(v + 1, index - start + 1, side)


def vertex_of_array(seq: DegreeSequence, side: str) -> np.ndarray:
    """0-based vertex index of each flat half-edge index on a side."""
    degrees = _side_degrees(seq, side)
    return np.repeat(np.arange(degrees.size, dtype=np.int64), degrees)


@dataclass(frozen=True, eq=False)
class Matching:
    """A complete pairing of the half-edges of `seq`, stored canonically."""

    seq: DegreeSequence
    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def from_partner(cls, seq: DegreeSequence, partner: np.ndarray) -> "Matching":
        pairs = tuple(
            (i, int(partner[i])) for i in range(partner.shape[0]) if int(partner[i]) > i
        )
        return cls(seq, pairs)

    @classmethod
    def from_assign(cls, seq: DegreeSequence, assign: np.ndarray) -> "Matching":
        pairs = tuple((k, int(assign[k])) for k in range(assign.shape[0]))
        return cls(seq, pairs)

    def partner_array(self) -> np.ndarray:
        if self.seq.kind != UNDIRECTED:
            raise InvalidCouplingError("partner_array is undirected-only")
        partner = np.full(2 * len(self.pairs), -1, dtype=np.int64)
        for a, b in self.pairs:
            partner[a] = b
            partner[b] = a
        return partner

    def assign_array(self) -> np.ndarray:
        if self.seq.kind == UNDIRECTED:
            raise InvalidCouplingError("assign_array is for directed/bipartite matchings")
        assign = np.empty(len(self.pairs), dtype=np.int64)
        for k, o in self.pairs:
            assign[k] = o
        return assign

    def to_lines(self) -> list[str]:
        """Dump format: one line per pair, 'v:slot v:slot', canonical order.

        For directed matchings the first label is the in half-edge and the
        second the out half-edge; for bipartite, left then right.
        """
        first_side, second_side = _SIDES[self.seq.kind]
        return [
            f"{halfedge_from_index(self.seq, a, first_side)}"
            f" {halfedge_from_index(self.seq, b, second_side)}"
            for a, b in self.pairs
        ]


def write_matching(path, matching: Matching) -> None:
    with open(path, "w") as fh:
        for line in matching.to_lines():
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def sample_cm(seq: DegreeSequence, rng: RngStream) -> Matching:
    """One uniform pairing of an undirected sequence."""
    if seq.kind != UNDIRECTED:
        raise InvalidDegreeSequenceError(f"sample_cm needs an undirected sequence, got {seq.kind}")
    u = rng.generator.random(seq.total // 2)
    return Matching.from_partner(seq, _kernels.pair_sequential(u))


def _sample_bijection(seq: DegreeSequence, rng: RngStream) -> Matching:
    u = rng.generator.random(seq.total)
    return Matching.from_assign(seq, _kernels.assign_sequential(u))


def sample_dcm(seq: DegreeSequence, rng: RngStream) -> Matching:
    """One uniform in-to-out bijection of a directed sequence."""
    if seq.kind != DIRECTED:
        raise InvalidDegreeSequenceError(f"sample_dcm needs a directed sequence, got {seq.kind}")
    return _sample_bijection(seq, rng)


def sample_bcm(seq: DegreeSequence, rng: RngStream) -> Matching:
    """One uniform left-to-right bijection of a bipartite sequence."""
    if seq.kind != BIPARTITE:
        raise InvalidDegreeSequenceError(f"sample_bcm needs a bipartite sequence, got {seq.kind}")
    return _sample_bijection(seq, rng)


# ---------------------------------------------------------------------------
# edge counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeCounts:
    """Multiplicities X_ij keyed by 1-based vertex pairs.

    Undirected keys are (i, j) with i <= j and X_ii counting self-loop pairs;
    directed keys are ordered (tail, head); bipartite keys are (left, right).
    """

    kind: str
    counts: dict[tuple[int, int], int]


def edge_counts(matching: Matching) -> EdgeCounts:
    seq = matching.seq
    counts: dict[tuple[int, int], int] = {}
    if seq.kind == UNDIRECTED:
        v = vertex_of_array(seq, "plain")
        for a, b in matching.pairs:
            i, j = int(v[a]) + 1, int(v[b]) + 1
            key = (i, j) if i <= j else (j, i)
            counts[key] = counts.get(key, 0) + 1
    elif seq.kind == DIRECTED:
        v_in = vertex_of_array(seq, "in")
        v_out = vertex_of_array(seq, "out")
        for k, o in matching.pairs:
            key = (int(v_out[o]) + 1, int(v_in[k]) + 1)  # (tail, head)
            counts[key] = counts.get(key, 0) + 1
    else:
        v_l = vertex_of_array(seq, "left")
        v_r = vertex_of_array(seq, "right")
        for k, o in matching.pairs:
            key = (int(v_l[k]) + 1, int(v_r[o]) + 1)
            counts[key] = counts.get(key, 0) + 1
    return EdgeCounts(seq.kind, counts)


def erase(counts: EdgeCounts) -> tuple[EdgeCounts, int]:
    """Drop self-loops and collapse multiplicities to 1 (undirected).

    Returns the simple edge counts and the number of removed edges:
    all self-loop pairs plus the surplus X_ij - 1 of each multi-edge.
    """
    if counts.kind != UNDIRECTED:
        raise InvalidCouplingError("erase is undirected-only")
    simple: dict[tuple[int, int], int] = {}
    removed = 0
    for (i, j), x in counts.counts.items():
        if i == j:
            removed += x
        else:
            simple[(i, j)] = 1
            removed += x - 1
    return EdgeCounts(UNDIRECTED, simple), removed


# ---------------------------------------------------------------------------
# exhaustive enumeration
# ---------------------------------------------------------------------------


def _check_cap(ell: int, cap: int | None, default: int) -> None:
    effective = default if cap is None else cap
    if ell > effective:
        raise CapExceededError(
            f"enumeration over {ell} half-edges exceeds the cap of {effective}; "
            f"pass a larger cap explicitly to override"
        )


def enumerate_matchings(
    seq: DegreeSequence, cap: int | None = None
) -> Iterator[tuple[Matching, Fraction]]:
    """Yield every matching with its exact probability (uniform law).

    Undirected sequences are capped at ell <= 16 (15!! = 2,027,025 pairings),
    directed/bipartite at ell <= 8 (8! = 40,320 bijections) unless `cap`
    overrides.
    """
    ell = seq.total
    if seq.kind == UNDIRECTED:
        _check_cap(ell, cap, ENUM_CAP_UNDIRECTED)
        prob = Fraction(1, double_factorial(ell - 1))
        partner = [-1] * ell
        pairs: list[tuple[int, int]] = []

        def walk() -> Iterator[Matching]:
            i = next((t for t in range(ell) if partner[t] < 0), -1)
            if i < 0:
                yield Matching(seq, tuple(pairs))
                return
            for j in range(i + 1, ell):
                if partner[j] < 0:
                    partner[i], partner[j] = j, i
                    pairs.append((i, j))
                    yield from walk()
                    pairs.pop()
                    partner[i], partner[j] = -1, -1

        for matching in walk():
            yield matching, prob
    else:
        _check_cap(ell, cap, ENUM_CAP_BIJECTION)
        prob = Fraction(1, math.factorial(ell))
        for sigma in itertools.permutations(range(ell)):
            yield Matching(seq, tuple(enumerate(sigma))), prob


@dataclass(frozen=True)
class ExactLaw:
    """Exact joint law of (loop count, multi-edge count) by full enumeration.

    joint_counts maps (s, m) to the number of matchings realizing it; nm is
    the total number of matchings, so probabilities are joint_counts / nm.
    """

    seq: DegreeSequence
    nm: int
    joint_counts: dict[tuple[int, int], int]
    mean_s: Fraction
    mean_m: Fraction
    p_simple: Fraction

    def prob(self, s: int, m: int) -> Fraction:
        return Fraction(self.joint_counts.get((s, m), 0), self.nm)


def exact_joint_law(seq: DegreeSequence, cap: int | None = None) -> ExactLaw:
    """Enumerate every matching and tally the joint (s, m) distribution."""
    ell = seq.total
    if seq.kind == UNDIRECTED:
        _check_cap(ell, cap, ENUM_CAP_UNDIRECTED)
        joint, sums = _kernels.enum_cm_joint(vertex_of_array(seq, "plain"), seq.n)
    else:
        _check_cap(ell, cap, ENUM_CAP_BIJECTION)
        if seq.kind == DIRECTED:
            joint, sums = _kernels.enum_bij_joint(
                vertex_of_array(seq, "in"), vertex_of_array(seq, "out"), seq.n, seq.n, True
            )
        else:
            joint, sums = _kernels.enum_bij_joint(
                vertex_of_array(seq, "left"),
                vertex_of_array(seq, "right"),
                seq.n_right,
                seq.n,
                False,
            )
    nm = int(sums[0])
    s_idx, m_idx = np.nonzero(joint)
    counts = {(int(s), int(m)): int(joint[s, m]) for s, m in zip(s_idx, m_idx)}
    return ExactLaw(
        seq=seq,
        nm=nm,
        joint_counts=counts,
        mean_s=Fraction(int(sums[1]), nm),
        mean_m=Fraction(int(sums[2]), nm),
        p_simple=Fraction(int(sums[3]), nm),
    )


# ---------------------------------------------------------------------------
# rewiring couplings (undirected)
# ---------------------------------------------------------------------------


def _require_selfloop_target(seq: DegreeSequence, s: HalfEdge, t: HalfEdge) -> tuple[int, int]:
    if seq.kind != UNDIRECTED:
        raise InvalidCouplingError("rewiring couplings are undirected-only")
    if s.vertex != t.vertex:
        raise InvalidCouplingError(
            f"self-loop target needs both half-edges on one vertex, got {s} and {t}"
        )
    if (s.vertex, s.slot) == (t.vertex, t.slot):
        raise InvalidCouplingError("self-loop target needs two distinct half-edges")
    hs, ht = halfedge_index(seq, s), halfedge_index(seq, t)
    return (hs, ht) if hs < ht else (ht, hs)


def _selfloop_rewire_partner(partner: np.ndarray, hs: int, ht: int) -> np.ndarray:
    """Force the pair (hs, ht); deterministic repair of the two freed ends."""
    out = partner.copy()
    if out[hs] == ht:
        return out
    a, b = int(out[hs]), int(out[ht])
    out[hs], out[ht] = ht, hs
    out[a], out[b] = b, a
    return out


def rewire_force_selfloop(
    matching: Matching, s: HalfEdge, t: HalfEdge, rng: RngStream | None = None
) -> Matching:
    """Condition on the self-loop (s, t) by local rewiring.

    If (s, t) is already paired the matching is returned unchanged; otherwise
    the two edges containing s and t are broken, (s, t) is paired, and the two
    freed half-edges are paired with each other.  The repair is deterministic,
    so `rng` is accepted only for signature symmetry with the double-edge
    rewiring.
    """
    hs, ht = _require_selfloop_target(matching.seq, s, t)
    partner = matching.partner_array()
    return Matching.from_partner(matching.seq, _selfloop_rewire_partner(partner, hs, ht))


def _require_double_target(
    seq: DegreeSequence, s1: HalfEdge, t1: HalfEdge, s2: HalfEdge, t2: HalfEdge
) -> tuple[int, int, int, int]:
    if seq.kind != UNDIRECTED:
        raise InvalidCouplingError("rewiring couplings are undirected-only")
    if s1.vertex != s2.vertex:
        raise InvalidCouplingError("double-edge target needs s1, s2 on one vertex")
    if t1.vertex != t2.vertex:
        raise InvalidCouplingError("double-edge target needs t1, t2 on one vertex")
    if s1.vertex == t1.vertex:
        raise InvalidCouplingError("double-edge target needs two distinct vertices")
    if (s1.vertex, s1.slot) == (s2.vertex, s2.slot) or (t1.vertex, t1.slot) == (
        t2.vertex,
        t2.slot,
    ):
        raise InvalidCouplingError("double-edge target needs four distinct half-edges")
    return (
        halfedge_index(seq, s1),
        halfedge_index(seq, t1),
        halfedge_index(seq, s2),
        halfedge_index(seq, t2),
    )


def _double_rewire_branches(
    partner: np.ndarray, hs1: int, ht1: int, hs2: int, ht2: int
) -> list[np.ndarray]:
    """All equally likely outcomes of forcing pairs (hs1, ht1), (hs2, ht2).

    Returns one partner array when the repair is forced (0 or 2 freed
    half-edges) and three when 4 half-edges are freed, in which case the
    repair law is uniform over their 3 perfect pairings.
    """
    if partner[hs1] == ht1 and partner[hs2] == ht2:
        return [partner.copy()]
    targets = {hs1, ht1, hs2, ht2}
    freed = sorted(int(partner[x]) for x in (hs1, ht1, hs2, ht2) if int(partner[x]) not in targets)
    base = partner.copy()
    base[hs1], base[ht1] = ht1, hs1
    base[hs2], base[ht2] = ht2, hs2
    if not freed:
        return [base]
    if len(freed) == 2:
        a, b = freed
        base[a], base[b] = b, a
        return [base]
    a, b, c, d = freed
    branches = []
    for (p, q), (r, w) in (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))):
        br = base.copy()
        br[p], br[q] = q, p
        br[r], br[w] = w, r
        branches.append(br)
    return branches


def rewire_force_double(
    matching: Matching,
    s1: HalfEdge,
    t1: HalfEdge,
    s2: HalfEdge,
    t2: HalfEdge,
    rng: RngStream | None = None,
) -> Matching:
    """Condition on the double edge {(s1, t1), (s2, t2)} by local rewiring.

    If both pairs are present the matching is unchanged.  Otherwise every edge
    containing one of the four target half-edges is broken, the two target
    pairs are formed, and the freed half-edges (0, 2, or 4 of them) are paired
    up: deterministically when fewer than 4, else uniformly over the 3 perfect
    pairings, which requires `rng`.
    """
    hs1, ht1, hs2, ht2 = _require_double_target(matching.seq, s1, t1, s2, t2)
    partner = matching.partner_array()
    branches = _double_rewire_branches(partner, hs1, ht1, hs2, ht2)
    if len(branches) == 1:
        picked = branches[0]
    else:
        if rng is None:
            raise InvalidCouplingError("this rewiring frees four half-edges and needs rng")
        picked = branches[int(rng.generator.integers(0, len(branches)))]
    return Matching.from_partner(matching.seq, picked)
