"""Empirical distributions and the distances used to judge the limit laws.

Total variation against Poisson targets is computed over the grid
0..K with K = (largest observed outcome) + ceil(10 + 10 * lambda); the
Poisson mass beyond K enters as one closed-form tail term, so the result is
exact for the given sample.  Thinning, the thinned one-dimensional reduction
of a joint sample, and a Kolmogorov-Smirnov distance against the standard
normal cover the remaining checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from ._exactlaw import (
    CouplingReport,
    DoubleEdgeEvent,
    EnumeratedLaw,
    Event,
    SelfLoopEvent,
    all_events,
    coupling_discrepancy,
    double_edge_events,
    selfloop_events,
)
from .degseq import DegreeSequence
from .errors import UndefinedValueError
from .rng import RngStream

__all__ = [
    "CouplingReport",
    "DoubleEdgeEvent",
    "EmpiricalDist",
    "EnumeratedLaw",
    "Event",
    "JointEmpiricalDist",
    "SelfLoopEvent",
    "all_events",
    "coupling_discrepancy",
    "cramer_wold_check",
    "double_edge_events",
    "ks_normal",
    "poisson_pmf",
    "selfloop_events",
    "thin",
    "tv_joint",
    "tv_poisson",
]


@dataclass(frozen=True)
class EmpiricalDist:
    """Tally of nonnegative integer outcomes."""

    counts: dict[int, int]
    total: int

    def __post_init__(self) -> None:
        if self.total != sum(self.counts.values()):
            raise ValueError("total must equal the sum of counts")
        if any(k < 0 or c <= 0 for k, c in self.counts.items()):
            raise ValueError("outcomes must be nonnegative and counts positive")

    @classmethod
    def from_samples(cls, samples: Iterable[int] | np.ndarray) -> "EmpiricalDist":
        arr = np.asarray(samples, dtype=np.int64)
        vals, cnts = np.unique(arr, return_counts=True)
        return cls({int(v): int(c) for v, c in zip(vals, cnts)}, int(arr.size))

    def merge(self, other: "EmpiricalDist") -> "EmpiricalDist":
        merged = dict(self.counts)
        for k, c in other.counts.items():
            merged[k] = merged.get(k, 0) + c
        return EmpiricalDist(merged, self.total + other.total)

    def pmf(self, k: int) -> Fraction:
        return Fraction(self.counts.get(k, 0), self.total)

    def mean(self) -> float:
        return sum(k * c for k, c in self.counts.items()) / self.total

    def max_outcome(self) -> int:
        return max(self.counts) if self.counts else 0

    def csv_rows(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items())


@dataclass(frozen=True)
class JointEmpiricalDist:
    """Tally of pairs of nonnegative integer outcomes."""

    counts: dict[tuple[int, int], int]
    total: int

    def __post_init__(self) -> None:
        if self.total != sum(self.counts.values()):
            raise ValueError("total must equal the sum of counts")
        if any(s < 0 or m < 0 or c <= 0 for (s, m), c in self.counts.items()):
            raise ValueError("outcomes must be nonnegative and counts positive")

    @classmethod
    def from_samples(cls, s: np.ndarray, m: np.ndarray) -> "JointEmpiricalDist":
        s = np.asarray(s, dtype=np.int64)
        m = np.asarray(m, dtype=np.int64)
        if s.shape != m.shape:
            raise ValueError("joint tally needs equally many s and m outcomes")
        pairs, cnts = np.unique(np.stack([s, m], axis=1), axis=0, return_counts=True)
        return cls({(int(a), int(b)): int(c) for (a, b), c in zip(pairs, cnts)}, int(s.size))

    def merge(self, other: "JointEmpiricalDist") -> "JointEmpiricalDist":
        merged = dict(self.counts)
        for k, c in other.counts.items():
            merged[k] = merged.get(k, 0) + c
        return JointEmpiricalDist(merged, self.total + other.total)

    def marginal_s(self) -> EmpiricalDist:
        out: dict[int, int] = {}
        for (s, _), c in self.counts.items():
            out[s] = out.get(s, 0) + c
        return EmpiricalDist(out, self.total)

    def marginal_m(self) -> EmpiricalDist:
        out: dict[int, int] = {}
        for (_, m), c in self.counts.items():
            out[m] = out.get(m, 0) + c
        return EmpiricalDist(out, self.total)

    def csv_rows(self) -> list[tuple[int, int, int]]:
        return sorted((s, m, c) for (s, m), c in self.counts.items())


def _log_pmf_grid(lam: float, k_max: int) -> np.ndarray:
    """log Poisson(lam) pmf on 0..k_max; lam == 0 gives a point mass at 0."""
    if lam == 0.0:
        out = np.full(k_max + 1, -np.inf)
        out[0] = 0.0
        return out
    k = np.arange(k_max + 1, dtype=np.float64)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, k_max + 1)))))
    return k * math.log(lam) - lam - log_fact


def poisson_pmf(lam: float, k: int) -> float:
    """P(Po(lam) = k), evaluated in log-space to survive large lam and k."""
    lam = float(lam)
    if lam < 0:
        raise UndefinedValueError(f"Poisson rate must be nonnegative, got {lam}")
    if k < 0:
        return 0.0
    if lam == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def _pmf_grid(lam: float, k_max: int) -> np.ndarray:
    if lam < 0:
        raise UndefinedValueError(f"Poisson rate must be nonnegative, got {lam}")
    return np.exp(_log_pmf_grid(float(lam), k_max))


def _grid_limit(max_observed: int, lam: float) -> int:
    return max_observed + math.ceil(10 + 10 * lam)


def tv_poisson(dist: EmpiricalDist, lam: float) -> float:
    """Total variation between an empirical law and Po(lam)."""
    if dist.total < 1:
        raise ValueError("tv_poisson needs at least one sample")
    lam = float(lam)
    k_max = _grid_limit(dist.max_outcome(), lam)
    pmf = _pmf_grid(lam, k_max)
    emp = np.zeros(k_max + 1)
    for k, c in dist.counts.items():
        emp[k] = c / dist.total
    tail = max(0.0, 1.0 - float(pmf.sum()))
    return 0.5 * (float(np.abs(emp - pmf).sum()) + tail)


def tv_joint(dist: JointEmpiricalDist, lam_s: float, lam_m: float) -> float:
    """Total variation between a joint empirical law and Po(lam_s) x Po(lam_m)."""
    if dist.total < 1:
        raise ValueError("tv_joint needs at least one sample")
    lam_s, lam_m = float(lam_s), float(lam_m)
    s_max = max((s for s, _ in dist.counts), default=0)
    m_max = max((m for _, m in dist.counts), default=0)
    ks = _grid_limit(s_max, lam_s)
    km = _grid_limit(m_max, lam_m)
    pmf = np.outer(_pmf_grid(lam_s, ks), _pmf_grid(lam_m, km))
    emp = np.zeros_like(pmf)
    for (s, m), c in dist.counts.items():
        emp[s, m] = c / dist.total
    tail = max(0.0, 1.0 - float(pmf.sum()))
    return 0.5 * (float(np.abs(emp - pmf).sum()) + tail)


def thin(x: int | np.ndarray, p: float, rng: RngStream) -> int | np.ndarray:
    """Binomial(x, p) sample: keep each of x items independently with
    probability p.  Accepts a scalar count or an array of counts."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"thinning probability must lie in [0, 1], got {p}")
    out = rng.generator.binomial(np.asarray(x, dtype=np.int64), p)
    return int(out) if np.ndim(x) == 0 else out


def cramer_wold_check(
    samples: Iterable[tuple[int, int]] | np.ndarray,
    p: float,
    q: float,
    lambda_s: float | Fraction,
    lambda_m: float | Fraction,
    rng: RngStream,
) -> float:
    """TV of the thinned combination against its Poisson target.

    Per sample (s, m) draw W = Bin(s, p) + Bin(m, q); if the joint law is the
    product of the Poisson limits then W is Po(p*lambda_s + q*lambda_m), so a
    small TV over a grid of (p, q) certifies the joint convergence.
    """
    arr = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("cramer_wold_check needs samples of (s, m) pairs")
    w = thin(arr[:, 0], p, rng) + thin(arr[:, 1], q, rng)
    return tv_poisson(EmpiricalDist.from_samples(w), p * float(lambda_s) + q * float(lambda_m))


def ks_normal(scores: Iterable[float] | np.ndarray) -> float:
    """Kolmogorov-Smirnov distance between an empirical law and N(0, 1)."""
    x = np.sort(np.asarray(scores, dtype=np.float64))
    n = x.size
    if n < 2:
        raise ValueError("ks_normal needs at least two scores")
    cdf = 0.5 * (1.0 + np.array([math.erf(v / math.sqrt(2.0)) for v in x.tolist()]))
    steps = np.arange(1, n + 1) / n
    d_plus = float((steps - cdf).max())
    d_minus = float((cdf - (steps - 1.0 / n)).max())
    return max(d_plus, d_minus)
