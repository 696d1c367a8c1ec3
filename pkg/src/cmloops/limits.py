"""Exact Poisson rates, approximation-bound factors, and simplicity estimates.

The loop statistic of an undirected sequence has exact mean
lambda_s = sum_i d_i(d_i-1) / (2(ell-1)) and the multi-edge statistic
lambda_m = sum_{i<j} (d_i)_2 (d_j)_2 / (2(ell-1)(ell-3)); both are computed
as exact rationals, the pair sum via the O(n) identity
sum_{i<j} a_i a_j = ((sum a)^2 - sum a^2) / 2.

Bound factors are reported without their unspecified universal constant, so
they are only meaningful in ratios and trends, never as absolute certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .degseq import (
    BIPARTITE,
    DIRECTED,
    UNDIRECTED,
    DegreeSequence,
    fraction_jsonable,
    side_moment,
)
from .errors import InvalidDegreeSequenceError, UndefinedValueError
from .pairing import ENUM_CAP_UNDIRECTED, double_factorial, vertex_of_array


def _falling2(degrees: np.ndarray) -> tuple[int, int]:
    """Exact (sum of d(d-1), sum of [d(d-1)]^2)."""
    d_max = int(degrees.max())
    if degrees.size * (max(d_max, 1) ** 4) < 2**62:
        f2 = degrees * (degrees - 1)
        return int(f2.sum()), int((f2 * f2).sum())
    vals = [int(d) * (int(d) - 1) for d in degrees.tolist()]
    return sum(vals), sum(v * v for v in vals)


def lambda_pair(seq: DegreeSequence) -> tuple[Fraction, Fraction | None]:
    """Exact means (lambda_s, lambda_m) of the loop and multi-edge counts.

    lambda_m is None (undefined marker) when ell < 4; in that range no vertex
    pair can carry two edges anyway.
    """
    if seq.kind != UNDIRECTED:
        raise InvalidDegreeSequenceError(f"lambda_pair needs an undirected sequence, got {seq.kind}")
    ell = seq.total
    t2, t2sq = _falling2(seq.degrees)
    lam_s = Fraction(t2, 2 * (ell - 1))
    if ell < 4:
        return lam_s, None
    pair_sum = (t2 * t2 - t2sq) // 2  # sum over i<j of (d_i)_2 (d_j)_2
    lam_m = Fraction(pair_sum, 2 * (ell - 1) * (ell - 3))
    return lam_s, lam_m


def lambda_truncated(seq: DegreeSequence, m_cut: int) -> Fraction | None:
    """Exact mean of the multi-edge count restricted to degrees <= m_cut."""
    if seq.kind != UNDIRECTED:
        raise InvalidDegreeSequenceError("lambda_truncated needs an undirected sequence")
    ell = seq.total
    if ell < 4:
        return None
    small = seq.degrees[seq.degrees <= m_cut]
    if small.size == 0:
        return Fraction(0)
    t2, t2sq = _falling2(small)
    pair_sum = (t2 * t2 - t2sq) // 2
    return Fraction(pair_sum, 2 * (ell - 1) * (ell - 3))


def lambda_directed(seq: DegreeSequence) -> tuple[Fraction, Fraction | None]:
    """Exact means (lambda_s, lambda_m) for the directed model.

    lambda_s = sum_i d_in,i d_out,i / ell; lambda_m sums (d_in,i)_2 (d_out,j)_2
    over ordered i != j, normalized by 2 ell (ell - 1); None when ell < 2.
    """
    if seq.kind != DIRECTED:
        raise InvalidDegreeSequenceError(f"lambda_directed needs a directed sequence, got {seq.kind}")
    din, dout = seq.in_degrees, seq.out_degrees
    ell = seq.total
    lam_s = Fraction(int((din * dout).sum()), ell)
    if ell < 2:
        return lam_s, None
    a = din * (din - 1)
    b = dout * (dout - 1)
    cross = int(a.sum()) * int(b.sum()) - int((a * b).sum())  # sum over i != j
    lam_m = Fraction(cross, 2 * ell * (ell - 1))
    return lam_s, lam_m


def lambda_bipartite(seq: DegreeSequence) -> Fraction | None:
    """Exact mean of the bipartite multi-edge count; None when ell < 2."""
    if seq.kind != BIPARTITE:
        raise InvalidDegreeSequenceError(f"lambda_bipartite needs a bipartite sequence, got {seq.kind}")
    ell = seq.total
    if ell < 2:
        return None
    dl, dr = seq.left, seq.right
    tl = int((dl * (dl - 1)).sum())
    tr = int((dr * (dr - 1)).sum())
    return Fraction(tl * tr, 2 * ell * (ell - 1))


def _vee1(x: Fraction) -> Fraction:
    return x if x > 1 else Fraction(1)


@dataclass(frozen=True)
class SteinBounds:
    """Constant-free Poisson-approximation bound factors.

    bound_s bounds the loop count's distance to Poisson, bound_m the
    multi-edge count's, bound_sum the total's, all up to one universal
    constant.  None marks factors whose rate is undefined (ell too small).
    """

    bound_s: Fraction | None
    bound_m: Fraction | None
    bound_sum: Fraction | None


def _check_flavor(seq: DegreeSequence, flavor: str | None) -> None:
    if flavor is not None and flavor != seq.kind:
        raise InvalidDegreeSequenceError(
            f"flavor {flavor!r} does not match the sequence kind {seq.kind!r}"
        )


def stein_bounds(seq: DegreeSequence, flavor: str | None = None) -> SteinBounds:
    _check_flavor(seq, flavor)
    if seq.kind == UNDIRECTED:
        ell = seq.total
        t2, _ = _falling2(seq.degrees)
        nu = Fraction(t2, ell)
        mu3 = side_moment(seq.degrees, 3, ell)
        bound_s = nu * nu / (ell * _vee1(nu / 2))
        _, lam_m = lambda_pair(seq)
        if lam_m is None:
            return SteinBounds(bound_s, None, None)
        numer = mu3 * mu3 + nu**4
        lam_s = Fraction(t2, 2 * (ell - 1))
        return SteinBounds(
            bound_s,
            numer / (ell * _vee1(lam_m)),
            numer / (ell * _vee1(lam_s + lam_m)),
        )
    if seq.kind == DIRECTED:
        ell = seq.total
        lam_s, lam_m = lambda_directed(seq)
        bound_s = lam_s * lam_s / (ell * _vee1(lam_s))
        if lam_m is None:
            return SteinBounds(bound_s, None, None)
        numer = side_moment(seq.in_degrees, 3, ell) * side_moment(seq.out_degrees, 3, ell) + lam_m * lam_m
        return SteinBounds(
            bound_s,
            numer / (ell * _vee1(lam_m)),
            numer / (ell * _vee1(lam_s + lam_m)),
        )
    # bipartite: no self-loops, the loop statistic is identically zero
    ell = seq.total
    lam_m = lambda_bipartite(seq)
    if lam_m is None:
        return SteinBounds(Fraction(0), None, None)
    numer = side_moment(seq.left, 3, ell) * side_moment(seq.right, 3, ell) + lam_m * lam_m
    bound_m = numer / (ell * _vee1(lam_m))
    return SteinBounds(Fraction(0), bound_m, bound_m)


def simplicity_estimate(seq: DegreeSequence, flavor: str | None = None) -> float:
    """exp(-(lambda_s + lambda_m)), the limiting probability of simplicity.

    When lambda_m carries the undefined marker (ell < 4 undirected, ell < 2
    otherwise) its numerator is provably zero, so it contributes nothing.
    """
    _check_flavor(seq, flavor)
    if seq.kind == UNDIRECTED:
        lam_s, lam_m = lambda_pair(seq)
    elif seq.kind == DIRECTED:
        lam_s, lam_m = lambda_directed(seq)
    else:
        lam_s, lam_m = Fraction(0), lambda_bipartite(seq)
    total = lam_s + (lam_m if lam_m is not None else Fraction(0))
    return math.exp(-float(total))


def log_double_factorial_odd(ell: int) -> float:
    """log((ell-1)!!) for even ell, via (ell-1)!! = ell! / (2^(ell/2) (ell/2)!)."""
    half = ell // 2
    return math.lgamma(ell + 1) - half * math.log(2.0) - math.lgamma(half + 1)


@dataclass(frozen=True)
class GraphCountResult:
    """Estimated and (when enumerable) exact number of simple graphs.

    log_estimate is log of exp(-(lambda_s+lambda_m)) (ell-1)!! / prod d_i!;
    exact is the integer count when ell is within the enumeration cap, else
    None; p_simple_exact = (#simple pairings) / (ell-1)!! alongside it.
    """

    log_estimate: float
    estimate: float
    exact: int | None
    p_simple_exact: Fraction | None

    def to_jsonable(self) -> dict:
        return {
            "log_estimate": self.log_estimate,
            "estimate": self.estimate,
            "exact": self.exact,
            "p_simple_exact": None
            if self.p_simple_exact is None
            else fraction_jsonable(self.p_simple_exact),
        }


def graph_count_estimate(seq: DegreeSequence, cap: int | None = None) -> GraphCountResult:
    """Estimate (and exactly count, within the cap) simple graphs with degrees d.

    The estimate divides the simplicity probability estimate into the number
    of pairings per graph; the exact branch enumerates pairings and uses
    exact count = (#simple pairings) / prod d_i!, which is always integral.
    """
    if seq.kind != UNDIRECTED:
        raise InvalidDegreeSequenceError("graph_count_estimate needs an undirected sequence")
    d = seq.degrees
    ell = seq.total
    lam_s, lam_m = lambda_pair(seq)
    total_rate = float(lam_s + (lam_m if lam_m is not None else Fraction(0)))
    log_est = (
        -total_rate
        + log_double_factorial_odd(ell)
        - sum(math.lgamma(int(di) + 1) for di in d.tolist())
    )
    try:
        est = math.exp(log_est)
    except OverflowError:
        est = math.inf
    exact = None
    p_simple = None
    effective_cap = ENUM_CAP_UNDIRECTED if cap is None else cap
    if ell <= effective_cap:
        _, sums = _kernels.enum_cm_joint(vertex_of_array(seq, "plain"), seq.n)
        n_simple = int(sums[3])
        denom = math.prod(math.factorial(int(di)) for di in d.tolist())
        if n_simple % denom != 0:
            raise UndefinedValueError(
                f"simple pairing count {n_simple} not divisible by prod d_i! = {denom}"
            )
        exact = n_simple // denom
        p_simple = Fraction(n_simple, double_factorial(ell - 1))
    return GraphCountResult(log_estimate=log_est, estimate=est, exact=exact, p_simple_exact=p_simple)


def standardized_score(stat, center: float, scale: float):
    """(stat - center) / sqrt(scale); scale must be positive."""
    if scale <= 0:
        raise UndefinedValueError(f"standardized_score needs scale > 0, got {scale}")
    arr = np.asarray(stat, dtype=np.float64)
    out = (arr - float(center)) / math.sqrt(float(scale))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LimitReport:
    """Exact rates, bound factors, and count estimates for one sequence.

    log_count_est (log of the estimated simple-graph count) is populated for
    undirected sequences only.  Bound factors omit the universal constant;
    callers may scale them by their own C.
    """

    flavor: str
    ell: int
    lambda_s: Fraction
    lambda_m: Fraction | None
    bound_s: Fraction | None
    bound_m: Fraction | None
    bound_sum: Fraction | None
    p_simple_est: float
    log_count_est: float | None

    def to_jsonable(self) -> dict:
        return {
            "flavor": self.flavor,
            "ell": self.ell,
            "lambda_s": fraction_jsonable(self.lambda_s),
            "lambda_m": fraction_jsonable(self.lambda_m),
            "bound_s": fraction_jsonable(self.bound_s),
            "bound_m": fraction_jsonable(self.bound_m),
            "bound_sum": fraction_jsonable(self.bound_sum),
            "p_simple_est": self.p_simple_est,
            "log_count_est": self.log_count_est,
        }


def limit_report(seq: DegreeSequence) -> LimitReport:
    if seq.kind == UNDIRECTED:
        lam_s, lam_m = lambda_pair(seq)
        log_count = graph_count_estimate(seq, cap=0).log_estimate
    elif seq.kind == DIRECTED:
        lam_s, lam_m = lambda_directed(seq)
        log_count = None
    else:
        lam_s, lam_m = Fraction(0), lambda_bipartite(seq)
        log_count = None
    bounds = stein_bounds(seq)
    return LimitReport(
        flavor=seq.kind,
        ell=seq.total,
        lambda_s=lam_s,
        lambda_m=lam_m,
        bound_s=bounds.bound_s,
        bound_m=bounds.bound_m,
        bound_sum=bounds.bound_sum,
        p_simple_est=simplicity_estimate(seq),
        log_count_est=log_count,
    )
