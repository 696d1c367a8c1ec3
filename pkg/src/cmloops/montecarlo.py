"""Threaded Monte Carlo driver for the pairing statistics.

Replicate r draws its uniforms from the dedicated stream (master_seed, r),
and batches cover fixed index ranges, so the result table is byte-identical
for any thread count: scheduling decides only who fills which preallocated
slice.  Per-replicate work is one kernel call on a row of uniforms.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .degseq import BIPARTITE, DIRECTED, UNDIRECTED, DegreeSequence
from .dist import EmpiricalDist, JointEmpiricalDist
from .pairing import vertex_of_array
from .rng import RngStream

DEFAULT_BATCH = 4096

_COLUMNS = {
    UNDIRECTED: ("s", "m", "m_tilde", "s_ind", "m_ind", "removed"),
    DIRECTED: ("s", "m"),
    BIPARTITE: ("m",),
}


@dataclass(frozen=True)
class MonteCarloResult:
    """Replicate-by-replicate statistics table plus the run's identity."""

    seq: DegreeSequence
    reps: int
    master_seed: int
    m_cut: int | None
    backend: str
    columns: tuple[str, ...]
    table: np.ndarray

    def column(self, name: str) -> np.ndarray:
        return self.table[:, self.columns.index(name)]

    def dist(self, name: str) -> EmpiricalDist:
        return EmpiricalDist.from_samples(self.column(name))

    def joint(self) -> JointEmpiricalDist:
        if self.seq.kind == BIPARTITE:
            zeros = np.zeros(self.reps, dtype=np.int64)
            return JointEmpiricalDist.from_samples(zeros, self.column("m"))
        return JointEmpiricalDist.from_samples(self.column("s"), self.column("m"))

    def means(self) -> dict[str, float]:
        return {name: float(self.column(name).mean()) for name in self.columns}

    def simple_fraction(self) -> float:
        if self.seq.kind == BIPARTITE:
            return float((self.column("m") == 0).mean())
        return float(((self.column("s") == 0) & (self.column("m") == 0)).mean())


def _batch_ranges(reps: int, batch: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + batch, reps)) for lo in range(0, reps, batch)]


def run_montecarlo(
    seq: DegreeSequence,
    reps: int,
    master_seed: int,
    threads: int = 1,
    m_cut: int | None = None,
    batch_size: int = DEFAULT_BATCH,
) -> MonteCarloResult:
    """Sample `reps` pairings and tally their statistics, one row each.

    m_cut adds an m_trunc column (multi-edge count between vertices of degree
    at most m_cut), undirected only.
    """
    if reps < 1:
        raise ValueError(f"reps must be positive, got {reps}")
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}")
    if m_cut is not None and seq.kind != UNDIRECTED:
        raise ValueError("m_cut applies to undirected sequences only")

    columns = _COLUMNS[seq.kind]
    if seq.kind == UNDIRECTED:
        width = seq.total // 2
        vertex_of = vertex_of_array(seq, "plain")
        small = (seq.degrees <= m_cut) if m_cut is not None else np.ones(seq.n, dtype=bool)
        if m_cut is not None:
            columns = columns + ("m_trunc",)

        def run_batch(u: np.ndarray) -> np.ndarray:
            return _kernels.cm_batch(u, vertex_of, seq.n, small)

        keep = slice(0, len(columns))
    else:
        width = seq.total
        if seq.kind == DIRECTED:
            v_level = vertex_of_array(seq, "in")
            v_choice = vertex_of_array(seq, "out")
            ncols, diag = seq.n, True
            keep = slice(0, 2)
        else:
            v_level = vertex_of_array(seq, "left")
            v_choice = vertex_of_array(seq, "right")
            ncols, diag = seq.n, False
            keep = slice(1, 2)

        def run_batch(u: np.ndarray) -> np.ndarray:
            return _kernels.bij_batch(u, v_level, v_choice, ncols, diag)

    table = np.empty((reps, len(columns)), dtype=np.int64)

    def fill(span: tuple[int, int]) -> None:
        lo, hi = span
        u = np.empty((hi - lo, width), dtype=np.float64)
        for row, r in enumerate(range(lo, hi)):
            u[row] = RngStream(master_seed, r).generator.random(width)
        table[lo:hi] = run_batch(u)[:, keep]

    spans = _batch_ranges(reps, batch_size)
    if threads == 1 or len(spans) == 1:
        for span in spans:
            fill(span)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, spans))

    table.setflags(write=False)
    return MonteCarloResult(
        seq=seq,
        reps=reps,
        master_seed=master_seed,
        m_cut=m_cut,
        backend=_kernels.current_backend(),
        columns=columns,
        table=table,
    )
