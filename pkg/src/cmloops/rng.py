"""Deterministic random streams.

A stream is addressed by (master_seed, stream_index).  The same address always
yields the same draw sequence, no matter which thread consumes it or in which
order streams are created.  Replicate r of a Monte Carlo run owns stream
(master_seed, r), which is what makes results independent of --threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class RngStream:
    """A named, reproducible random stream.

    Two streams with different indices are statistically independent; two
    streams with the same (master_seed, stream_index) produce identical
    sequences.  The underlying generator is created lazily and is stateful:
    successive draws from one stream advance it.
    """

    master_seed: int
    stream_index: int
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.master_seed < 0 or self.stream_index < 0:
            raise ValueError("master_seed and stream_index must be nonnegative")

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            self._gen = np.random.default_rng((self.master_seed, self.stream_index))
        return self._gen
