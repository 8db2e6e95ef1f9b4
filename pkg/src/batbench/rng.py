"""Seedable random streams and per-run substream derivation.

Every optimizer run owns exactly one :class:`RandomStream`; replicate runs
derive decorrelated seeds from a master seed with :func:`derive_run_seed`.
All stochastic state lives in the wrapped numpy generator, so compiled
kernels can consume the same stream (numba supports ``np.random.Generator``
natively and shares its state with the interpreter).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["RandomStream", "derive_run_seed"]


def derive_run_seed(master_seed: int, run_index: int) -> int:
    """Hash (master_seed, run_index) into a decorrelated 64-bit run seed.

    Uses numpy's SeedSequence entropy-mixing, so distinct run indices give
    statistically independent substreams of the master seed.
    """
    if run_index < 0:
        raise ValueError(f"run_index must be >= 0, got {run_index}")
    ss = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, int(run_index)])
    return int(ss.generate_state(1, np.uint64)[0])


class RandomStream:
    """Deterministic stream of uniform random numbers owned by one run.

    Two streams constructed from the same seed produce identical sequences.
    The stream must never be shared across concurrent tasks; concurrency is
    obtained by giving each run its own stream.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.default_rng(self.seed)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed})"

    @property
    def generator(self) -> np.random.Generator:
        """Underlying numpy generator. State is shared with this stream."""
        return self._gen

    def uniform01(self) -> float:
        """Next uniform draw in [0, 1)."""
        return self._gen.random()

    def uniform_in(self, lo: float, hi: float) -> float:
        """Uniform draw in [lo, hi), computed as lo + (hi - lo) * uniform01()."""
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"bounds must be finite, got [{lo}, {hi})")
        if lo >= hi:
            raise ValueError(f"need lo < hi, got [{lo}, {hi})")
        val = lo + (hi - lo) * self._gen.random()
        # For extremely narrow intervals the scaling can round up to hi.
        if val >= hi:
            val = np.nextafter(hi, lo)
        return val
