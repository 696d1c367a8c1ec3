"""Degree sequences: validation, exact moments, and power-law construction.

A degree sequence fixes one of three pairing models:

* undirected: one list of degrees, even total, half-edges paired among
  themselves;
* directed: in- and out-degree lists with equal totals, in-half-edges matched
  bijectively to out-half-edges;
* bipartite: left and right degree lists with equal totals, left half-edges
  matched bijectively to right half-edges.

All exact quantities (factorial moments, tail counts) are returned as
`fractions.Fraction` built from integer sums, never from floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InvalidDegreeSequenceError

UNDIRECTED = "undirected"
DIRECTED = "directed"
BIPARTITE = "bipartite"
KINDS = (UNDIRECTED, DIRECTED, BIPARTITE)


def _as_degree_array(values, what: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidDegreeSequenceError(f"{what}: need a nonempty 1-d sequence")
    if not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(arr)
        if not np.array_equal(rounded, arr):
            raise InvalidDegreeSequenceError(f"{what}: degrees must be integers")
        arr = rounded
    arr = arr.astype(np.int64)
    if (arr < 1).any():
        bad = int(np.argmax(arr < 1))
        raise InvalidDegreeSequenceError(
            f"{what}: degrees must be >= 1, found {int(arr[bad])} at position {bad}"
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    """A validated degree sequence for one of the three pairing models.

    `a` holds the undirected degrees, in-degrees, or left degrees; `b` holds
    out-degrees or right degrees and is None for the undirected kind.
    Vertices are 1-based in all user-facing text; arrays are 0-indexed.
    """

    kind: str
    a: np.ndarray
    b: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidDegreeSequenceError(f"unknown kind {self.kind!r}")
        if self.kind == UNDIRECTED:
            if self.b is not None:
                raise InvalidDegreeSequenceError("undirected sequences take one degree list")
            if int(self.a.sum()) % 2 != 0:
                raise InvalidDegreeSequenceError(
                    f"undirected total degree must be even, got {int(self.a.sum())}"
                )
        else:
            if self.b is None:
                raise InvalidDegreeSequenceError(f"{self.kind} sequences need two degree lists")
            ta, tb = int(self.a.sum()), int(self.b.sum())
            if ta != tb:
                side = "in/out" if self.kind == DIRECTED else "left/right"
                raise InvalidDegreeSequenceError(
                    f"{self.kind} {side} totals must match, got {ta} vs {tb}"
                )
            if self.kind == DIRECTED and self.a.shape != self.b.shape:
                raise InvalidDegreeSequenceError(
                    "directed in- and out-degree lists must have the same length"
                )

    # ----- constructors -------------------------------------------------

    @classmethod
    def undirected(cls, degrees) -> "DegreeSequence":
        return cls(UNDIRECTED, _as_degree_array(degrees, "degrees"))

    @classmethod
    def directed(cls, in_degrees, out_degrees) -> "DegreeSequence":
        return cls(
            DIRECTED,
            _as_degree_array(in_degrees, "in-degrees"),
            _as_degree_array(out_degrees, "out-degrees"),
        )

    @classmethod
    def bipartite(cls, left, right) -> "DegreeSequence":
        return cls(
            BIPARTITE,
            _as_degree_array(left, "left degrees"),
            _as_degree_array(right, "right degrees"),
        )

    # ----- views ---------------------------------------------------------

    @property
    def degrees(self) -> np.ndarray:
        if self.kind != UNDIRECTED:
            raise InvalidDegreeSequenceError(f".degrees is undirected-only, kind={self.kind}")
        return self.a

    @property
    def in_degrees(self) -> np.ndarray:
        if self.kind != DIRECTED:
            raise InvalidDegreeSequenceError(f".in_degrees is directed-only, kind={self.kind}")
        return self.a

    @property
    def out_degrees(self) -> np.ndarray:
        if self.kind != DIRECTED:
            raise InvalidDegreeSequenceError(f".out_degrees is directed-only, kind={self.kind}")
        return self.b

    @property
    def left(self) -> np.ndarray:
        if self.kind != BIPARTITE:
            raise InvalidDegreeSequenceError(f".left is bipartite-only, kind={self.kind}")
        return self.a

    @property
    def right(self) -> np.ndarray:
        if self.kind != BIPARTITE:
            raise InvalidDegreeSequenceError(f".right is bipartite-only, kind={self.kind}")
        return self.b

    @property
    def n(self) -> int:
        """Vertex count (undirected/directed) or left vertex count (bipartite)."""
        return int(self.a.size)

    @property
    def n_right(self) -> int:
        if self.b is None:
            raise InvalidDegreeSequenceError("n_right needs a two-sided sequence")
        return int(self.b.size)

    @property
    def total(self) -> int:
        """Number of half-edges on the (first) side: ell for undirected,
        the shared total for directed/bipartite."""
        return int(self.a.sum())

    def key(self) -> tuple:
        """Hashable identity, usable as a cache key."""
        b = () if self.b is None else tuple(int(x) for x in self.b)
        return (self.kind, tuple(int(x) for x in self.a), b)


def regular_degrees(n: int, r: int) -> np.ndarray:
    if n < 1 or r < 1:
        raise InvalidDegreeSequenceError(f"regular sequence needs n >= 1, r >= 1, got {n}, {r}")
    return np.full(n, r, dtype=np.int64)


# ---------------------------------------------------------------------------
# exact moments
# ---------------------------------------------------------------------------


def _falling_sum(degrees: np.ndarray, r: int) -> int:
    """Exact sum of d*(d-1)*...*(d-r+1) over the sequence."""
    d_max = int(degrees.max())
    n = degrees.size
    # int64 is exact while n * d_max^r stays well below 2^63
    if n * (max(d_max, 1) ** r) < 2**62:
        prod = np.ones_like(degrees)
        for k in range(r):
            prod = prod * (degrees - k)
        return int(prod.sum())
    return sum(math.prod(int(d) - k for k in range(r)) for d in degrees.tolist())


def _sq_falling2_sum(degrees: np.ndarray) -> int:
    """Exact sum of (d*(d-1))^2 over the sequence."""
    d_max = int(degrees.max())
    n = degrees.size
    if n * (max(d_max, 1) ** 4) < 2**62:
        f2 = degrees * (degrees - 1)
        return int((f2 * f2).sum())
    return sum((int(d) * (int(d) - 1)) ** 2 for d in degrees.tolist())


@dataclass(frozen=True)
class MomentSummary:
    """Exact factorial moments of a degree sequence, normalized by ell.

    mu_r = sum_i (d_i)_r / ell, with (d)_r the falling factorial; mu1 == 1
    always.  nu is mu2.  chi = sum_i (d_i(d_i-1))^2 / (4(ell-1)(ell-3)) is a
    diagnostic correction term and is None when ell < 4.
    """

    ell: int
    mu1: Fraction
    mu2: Fraction
    mu3: Fraction
    mu4: Fraction
    nu: Fraction
    chi: Fraction | None
    d_max: int

    def to_jsonable(self) -> dict:
        out = {
            "ell": self.ell,
            "d_max": self.d_max,
        }
        for name in ("mu1", "mu2", "mu3", "mu4", "nu", "chi"):
            out[name] = fraction_jsonable(getattr(self, name))
        return out


def fraction_jsonable(x: Fraction | None) -> dict | None:
    """Render an exact value for JSON: exact num/den string plus float."""
    if x is None:
        return None
    return {"exact": f"{x.numerator}/{x.denominator}", "float": float(x)}


def compute_moments(seq: DegreeSequence) -> MomentSummary:
    """Exact moments for an undirected sequence."""
    d = seq.degrees
    ell = seq.total
    mus = [Fraction(_falling_sum(d, r), ell) for r in (1, 2, 3, 4)]
    chi = None
    if ell >= 4:
        chi = Fraction(_sq_falling2_sum(d), 4 * (ell - 1) * (ell - 3))
    return MomentSummary(
        ell=ell,
        mu1=mus[0],
        mu2=mus[1],
        mu3=mus[2],
        mu4=mus[3],
        nu=mus[1],
        chi=chi,
        d_max=int(d.max()),
    )


def side_moment(degrees: np.ndarray, r: int, ell: int) -> Fraction:
    """mu_r for one side of a two-sided sequence (shared normalizer ell)."""
    return Fraction(_falling_sum(degrees, r), ell)


def empirical_tail(seq: DegreeSequence, x: float) -> Fraction:
    """Empirical CDF F_n(x) = (1/n) * #{j : d_j <= x} of an undirected sequence."""
    d = seq.degrees
    return Fraction(int((d <= x).sum()), int(d.size))


# ---------------------------------------------------------------------------
# power-law construction
# ---------------------------------------------------------------------------


def _powerlaw_cdf(k: int, tau: float, c: float) -> float:
    """F(k) = max(0, 1 - c * k^-(tau-1)) for k >= 1; F(0) = 0."""
    if k <= 0:
        return 0.0
    return max(0.0, 1.0 - c * float(k) ** (1.0 - tau))


@dataclass(frozen=True)
class PowerLawSpec:
    """Parameters of the deterministic power-law degree construction.

    The number of vertices with degree exactly k is n_k = ceil(n F(k)) -
    ceil(n F(k-1)) with tail 1 - F(x) = c x^-(tau-1), clipped so F is a valid
    CDF on {1, 2, ...}.  No upper cutoff is imposed; the maximum degree works
    out to roughly (c n)^(1/(tau-1)).
    """

    n: int
    tau: float
    c: float

    def __post_init__(self):
        if self.n < 1:
            raise InvalidDegreeSequenceError(f"powerlaw needs n >= 1, got {self.n}")
        if not self.tau > 1.0:
            raise InvalidDegreeSequenceError(f"powerlaw needs tau > 1, got {self.tau}")
        if not self.c > 0.0:
            raise InvalidDegreeSequenceError(f"powerlaw needs c > 0, got {self.c}")

    def cdf(self, k: int) -> float:
        return _powerlaw_cdf(k, self.tau, self.c)

    def build(self) -> DegreeSequence:
        return DegreeSequence.undirected(powerlaw_degrees(self.n, self.tau, self.c))


def powerlaw_degrees(n: int, tau: float, c: float) -> np.ndarray:
    """Deterministic power-law degrees, largest first, parity-fixed.

    If the total is odd, one maximum-degree vertex is incremented by 1 so the
    sequence is pairable.
    """
    spec = PowerLawSpec(n, tau, c)
    counts: list[tuple[int, int]] = []  # (degree, multiplicity)
    prev = 0  # ceil(n F(k-1)); F(0) = 0
    k = 0
    while prev < n:
        k += 1
        cum = min(n, math.ceil(n * spec.cdf(k)))
        if cum > prev:
            counts.append((k, cum - prev))
        prev = cum
    degrees = np.repeat(
        np.array([deg for deg, _ in counts], dtype=np.int64)[::-1],
        np.array([mult for _, mult in counts], dtype=np.int64)[::-1],
    )
    if int(degrees.sum()) % 2 != 0:
        degrees = degrees.copy()
        degrees[0] += 1  # one max-degree vertex absorbs the parity fix
    return degrees


# ---------------------------------------------------------------------------
# degree files
# ---------------------------------------------------------------------------


def read_undirected_degrees(path) -> np.ndarray:
    """One integer per line; blank lines and '#' comments are skipped."""
    values = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise InvalidDegreeSequenceError(
                f"{path}:{lineno}: expected one integer per line, got {raw!r}"
            ) from None
    if not values:
        raise InvalidDegreeSequenceError(f"{path}: no degrees found")
    return np.asarray(values, dtype=np.int64)


def read_directed_degrees(path) -> tuple[np.ndarray, np.ndarray]:
    """Two comma-separated integers per line: in-degree, out-degree."""
    ins, outs = [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise InvalidDegreeSequenceError(
                f"{path}:{lineno}: expected 'in,out' per line, got {raw!r}"
            )
        try:
            ins.append(int(parts[0]))
            outs.append(int(parts[1]))
        except ValueError:
            raise InvalidDegreeSequenceError(
                f"{path}:{lineno}: expected 'in,out' integers, got {raw!r}"
            ) from None
    if not ins:
        raise InvalidDegreeSequenceError(f"{path}: no degrees found")
    return np.asarray(ins, dtype=np.int64), np.asarray(outs, dtype=np.int64)
