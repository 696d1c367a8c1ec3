"""Exact finite-size law engine for loop and double-edge events.

Everything here works by full enumeration of the pairing law on tiny
sequences, with counts kept as integers over the common denominators
NM = (ell-1)!! (plain probabilities) and 3*NM (rewiring pushforwards, whose
branch weights are 1/3 or 1), so every reported quantity is an exact
Fraction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .degseq import UNDIRECTED, DegreeSequence
from .errors import InvalidCouplingError
from .pairing import (
    HalfEdge,
    _double_rewire_branches,
    _selfloop_rewire_partner,
    double_factorial,
    enumerate_matchings,
    halfedge_index,
)

IndexPair = tuple[int, int]


def _ordered(a: int, b: int) -> IndexPair:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class SelfLoopEvent:
    """The event that the two half-edges (vertex, slots[0]) and
    (vertex, slots[1]) pair with each other, forming a loop."""

    vertex: int
    slots: tuple[int, int]

    def __post_init__(self) -> None:
        s1, s2 = self.slots
        if not s1 < s2:
            raise InvalidCouplingError(f"loop event slots must be increasing, got {self.slots}")

    def halfedges(self) -> tuple[HalfEdge, HalfEdge]:
        return (HalfEdge(self.vertex, self.slots[0]), HalfEdge(self.vertex, self.slots[1]))

    def required_pairs(self, seq: DegreeSequence) -> tuple[IndexPair, ...]:
        s, t = self.halfedges()
        return (_ordered(halfedge_index(seq, s), halfedge_index(seq, t)),)


@dataclass(frozen=True)
class DoubleEdgeEvent:
    """The event that (s_vertex, s_slots[k]) pairs with (t_vertex, t_slots[k])
    for k = 0, 1, forming two parallel edges.

    s_slots are increasing; t_slots are merely distinct, because their order
    selects which target half-edge matches which source slot and swapping
    them names a different event.
    """

    s_vertex: int
    s_slots: tuple[int, int]
    t_vertex: int
    t_slots: tuple[int, int]

    def __post_init__(self) -> None:
        if self.s_vertex == self.t_vertex:
            raise InvalidCouplingError("double-edge event needs two distinct vertices")
        s1, s2 = self.s_slots
        if not s1 < s2:
            raise InvalidCouplingError(
                f"double-edge event source slots must be increasing, got {self.s_slots}"
            )
        if self.t_slots[0] == self.t_slots[1]:
            raise InvalidCouplingError("double-edge event target slots must be distinct")

    def halfedges(self) -> tuple[HalfEdge, HalfEdge, HalfEdge, HalfEdge]:
        return (
            HalfEdge(self.s_vertex, self.s_slots[0]),
            HalfEdge(self.t_vertex, self.t_slots[0]),
            HalfEdge(self.s_vertex, self.s_slots[1]),
            HalfEdge(self.t_vertex, self.t_slots[1]),
        )

    def required_pairs(self, seq: DegreeSequence) -> tuple[IndexPair, ...]:
        s1, t1, s2, t2 = (halfedge_index(seq, h) for h in self.halfedges())
        return (_ordered(s1, t1), _ordered(s2, t2))


Event = SelfLoopEvent | DoubleEdgeEvent


def selfloop_events(seq: DegreeSequence) -> list[SelfLoopEvent]:
    """Every loop event: one per vertex and unordered slot pair."""
    out = []
    for v, d in enumerate(seq.degrees.tolist(), start=1):
        for s1, s2 in itertools.combinations(range(1, d + 1), 2):
            out.append(SelfLoopEvent(v, (s1, s2)))
    return out


def double_edge_events(seq: DegreeSequence) -> list[DoubleEdgeEvent]:
    """Every double-edge event, canonically with s_vertex < t_vertex.

    A vertex pair (i, j) carries C(d_i, 2) * d_j * (d_j - 1) events: unordered
    source slots times ordered target slots.
    """
    degrees = seq.degrees.tolist()
    out = []
    for i, j in itertools.combinations(range(1, seq.n + 1), 2):
        for s_slots in itertools.combinations(range(1, degrees[i - 1] + 1), 2):
            for t_slots in itertools.permutations(range(1, degrees[j - 1] + 1), 2):
                out.append(DoubleEdgeEvent(i, s_slots, j, t_slots))
    return out


def all_events(seq: DegreeSequence) -> list[Event]:
    return [*selfloop_events(seq), *double_edge_events(seq)]


@dataclass(frozen=True)
class CouplingReport:
    """Exact rewiring-coupling discrepancy between two events.

    e_diff is the mean absolute change of beta's indicator when the pairing
    is rewired to force alpha; e_signed the signed version; bhj_term the
    product p_alpha * e_diff appearing in the total variation bound.
    """

    p_alpha: Fraction
    p_beta: Fraction
    e_diff: Fraction
    e_signed: Fraction
    cov: Fraction
    bhj_term: Fraction


class EnumeratedLaw:
    """Uniform pairing law of one undirected sequence, fully materialized.

    Holds the partner array of every matching plus an index for O(1) lookup,
    so event indicators, rewiring pushforwards, and coupling discrepancies
    all reduce to integer array arithmetic.
    """

    def __init__(self, seq: DegreeSequence, cap: int | None = None):
        if seq.kind != UNDIRECTED:
            raise InvalidCouplingError("exact event laws are undirected-only")
        self.seq = seq
        rows = [m.partner_array() for m, _ in enumerate_matchings(seq, cap)]
        self.partners = np.stack(rows)
        self.nm = self.partners.shape[0]
        assert self.nm == double_factorial(seq.total - 1)
        self._index = {row.tobytes(): i for i, row in enumerate(rows)}
        # events hash by value, so indicators and pushforwards are memoized;
        # callers must treat the returned arrays as read-only
        self._ind_cache: dict[Event, np.ndarray] = {}
        self._push_cache: dict[Event, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def matching_index(self, partner: np.ndarray) -> int:
        return self._index[np.ascontiguousarray(partner, dtype=np.int64).tobytes()]

    def indicator(self, event: Event) -> np.ndarray:
        """Boolean vector over matchings: all required pairs present."""
        hit = self._ind_cache.get(event)
        if hit is None:
            hit = np.ones(self.nm, dtype=bool)
            for a, b in event.required_pairs(self.seq):
                hit &= self.partners[:, a] == b
            self._ind_cache[event] = hit
        return hit

    def indicator_matrix(self, events: list[Event]) -> np.ndarray:
        return np.stack([self.indicator(e) for e in events]) if events else np.zeros(
            (0, self.nm), dtype=bool
        )

    def probability(self, event: Event) -> Fraction:
        return Fraction(int(self.indicator(event).sum()), self.nm)

    def pushforward(self, event: Event) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Rewiring map forcing `event`, as (src, dst, weight) arrays.

        Row weights sum to 3 per source matching (denominator 3 * nm), so the
        pushforward mass of destination m is sum of weight over dst == m,
        divided by 3 * nm.
        """
        cached = self._push_cache.get(event)
        if cached is not None:
            return cached
        src: list[int] = []
        dst: list[int] = []
        wgt: list[int] = []
        if isinstance(event, SelfLoopEvent):
            (hs, ht), = event.required_pairs(self.seq)
            for s in range(self.nm):
                src.append(s)
                dst.append(self.matching_index(_selfloop_rewire_partner(self.partners[s], hs, ht)))
                wgt.append(3)
        else:
            (hs1, ht1), (hs2, ht2) = event.required_pairs(self.seq)
            for s in range(self.nm):
                branches = _double_rewire_branches(self.partners[s], hs1, ht1, hs2, ht2)
                w = 3 // len(branches)
                for br in branches:
                    src.append(s)
                    dst.append(self.matching_index(br))
                    wgt.append(w)
        out = (
            np.asarray(src, dtype=np.int64),
            np.asarray(dst, dtype=np.int64),
            np.asarray(wgt, dtype=np.int64),
        )
        self._push_cache[event] = out
        return out

    def conditional_tv(self, event: Event) -> Fraction:
        """Exact TV distance between the pushforward of the rewiring and the
        law conditioned on the event; zero certifies the coupling."""
        ind = self.indicator(event)
        n_e = int(ind.sum())
        if n_e == 0:
            raise InvalidCouplingError(f"event {event} has probability zero")
        _, dst, wgt = self.pushforward(event)
        q_num = np.zeros(self.nm, dtype=np.int64)
        np.add.at(q_num, dst, wgt)
        # common denominator 3 * nm * n_e
        cond_num = ind.astype(np.int64) * (3 * self.nm)
        gap = int(np.abs(q_num * n_e - cond_num).sum())
        return Fraction(gap, 2 * 3 * self.nm * n_e)

    def discrepancy(self, alpha: Event, beta: Event) -> CouplingReport:
        """Exact coupling discrepancy of beta under the rewiring forcing alpha.

        Also certifies the exchange identity p_alpha * E[I_beta - J] =
        -Cov(I_alpha, I_beta), which the construction guarantees.
        """
        pairs_a = frozenset(alpha.required_pairs(self.seq))
        pairs_b = frozenset(beta.required_pairs(self.seq))
        if pairs_a == pairs_b:
            raise InvalidCouplingError("coupling discrepancy needs two distinct events")
        ia = self.indicator(alpha).astype(np.int64)
        ib = self.indicator(beta).astype(np.int64)
        n_a, n_b = int(ia.sum()), int(ib.sum())
        n_ab = int((ia & ib).sum())
        src, dst, wgt = self.pushforward(alpha)
        ej_num = int(ib[dst] @ wgt)
        cross_num = int((ib[src] & ib[dst]) @ wgt)
        denom = 3 * self.nm
        e_signed = Fraction(3 * n_b - ej_num, denom)
        e_diff = Fraction(3 * n_b + ej_num - 2 * cross_num, denom)
        p_alpha = Fraction(n_a, self.nm)
        p_beta = Fraction(n_b, self.nm)
        cov = Fraction(n_ab, self.nm) - p_alpha * p_beta
        assert p_alpha * e_signed == -cov
        return CouplingReport(
            p_alpha=p_alpha,
            p_beta=p_beta,
            e_diff=e_diff,
            e_signed=e_signed,
            cov=cov,
            bhj_term=p_alpha * e_diff,
        )


def coupling_discrepancy(
    seq: DegreeSequence, alpha: Event, beta: Event, cap: int | None = None
) -> CouplingReport:
    """Exact coupling discrepancy on a freshly enumerated law; see
    EnumeratedLaw.discrepancy for the quantities reported."""
    return EnumeratedLaw(seq, cap).discrepancy(alpha, beta)
