"""Deterministic Brownian paths on a fine dyadic tick grid.

A path is addressed by (seed, path_index) and sampled on ticks 0..2^K of the
horizon [0, T]. Randomness is counter-based: Philox keyed by (seed, path_index)
produces one 64-bit word per tick, turned into a standard normal through the
inverse normal CDF, so any word can be regenerated in isolation and queries are
order-independent.

The path values W(tick) are built by dyadic midpoint refinement: word 0 drives
the endpoint W(T), and the word attached to tick m*2^v (m odd) drives the
midpoint of its enclosing dyadic interval. Because words are keyed by the
interval structure rather than the tick spacing, the same (seed, path_index)
at resolutions K and K+1 agree exactly on the coarser lattice.

Every W(tick) is rounded to an integer multiple of 2^-42. Brownian increments
are differences of these integers, which makes increment arithmetic exact:
increments over adjacent ranges add up bit-for-bit, in any order, to the
increment over the union. The sub-picoscale rounding is far below the
statistical resolution of any experiment run on these paths.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

QUANT_BITS = 42
LATTICE = 2.0**-QUANT_BITS
_SCALE = float(2**QUANT_BITS)


def _normal_words(seed: int, path_index: int, start: int, count: int) -> np.ndarray:
    """Standard normals for word indices [start, start+count) of one keyed stream."""
    block, lane = divmod(int(start), 4)
    bg = np.random.Philox(counter=[block, 0, 0, 0], key=[seed, path_index])
    raw = bg.random_raw(lane + count)[lane:]
    # 52-bit uniform offset to the cell centre: u in (0, 1) strictly, symmetric about 1/2
    u = ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52
    return ndtri(u)


class PathDriver:
    """One Brownian path, reproducible from (seed, path_index, resolution_exp, horizon)."""

    def __init__(self, seed: int, path_index: int, resolution_exp: int = 18, horizon: float = 1.0):
        seed = int(seed)
        path_index = int(path_index)
        resolution_exp = int(resolution_exp)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {seed}")
        if not 0 <= path_index < 2**64:
            raise ValueError(f"path_index must fit in 64 bits, got {path_index}")
        if not 1 <= resolution_exp <= 26:
            raise ValueError(f"resolution_exp must be in [1, 26], got {resolution_exp}")
        if not (horizon > 0.0 and np.isfinite(horizon)):
            raise ValueError(f"horizon must be positive and finite, got {horizon!r}")
        self.seed = seed
        self.path_index = path_index
        self.resolution_exp = resolution_exp
        self.horizon = float(horizon)
        self._lattice: np.ndarray | None = None

    @property
    def n_ticks(self) -> int:
        return 1 << self.resolution_exp

    @property
    def tick(self) -> float:
        """Fine mesh width delta = T / 2^K."""
        return self.horizon / self.n_ticks

    def _heap_index(self, ticks):
        """Map tick -> refinement word index (0 = endpoint, 2^l + k = level-l midpoint k)."""
        ticks = np.asarray(ticks, dtype=np.int64)
        low = ticks & -ticks  # lowest set bit, 2^v
        v = np.log2(np.where(ticks == 0, 1, low)).astype(np.int64)
        level = self.resolution_exp - 1 - v
        heap = (np.int64(1) << level) + (ticks >> (v + 1))
        return np.where(ticks == 0, np.int64(0), heap)

    def gaussian_at(self, tick_index):
        """Standard normal attached to a tick; pure function of (seed, path_index, tick).

        Accepts an int or an integer array; arrays are served from one bulk draw.
        """
        ticks = np.asarray(tick_index, dtype=np.int64)
        if np.any(ticks < 0) or np.any(ticks >= self.n_ticks):
            raise ValueError(f"tick out of range [0, {self.n_ticks})")
        heap = self._heap_index(ticks)
        if ticks.ndim == 0:
            return float(_normal_words(self.seed, self.path_index, int(heap), 1)[0])
        words = _normal_words(self.seed, self.path_index, 0, int(heap.max()) + 1)
        return words[heap]

    def lattice_values(self) -> np.ndarray:
        """Quantized path W(tick)/2^-42 as int64 for ticks 0..2^K (built once, cached)."""
        if self._lattice is None:
            self._lattice = _build_lattice(
                self.seed, self.path_index, self.resolution_exp, self.horizon
            )
        return self._lattice

    def increment(self, tick_a, tick_b):
        """Brownian increment W(tick_b) - W(tick_a); exact multiple of 2^-42.

        Increments over adjacent ranges accumulate bit-exactly to the increment
        over their union. Scalar or vectorized over tick arrays.
        """
        a = np.asarray(tick_a, dtype=np.int64)
        b = np.asarray(tick_b, dtype=np.int64)
        if np.any(a < 0) or np.any(b > self.n_ticks) or np.any(a > b):
            raise ValueError(f"need 0 <= tick_a <= tick_b <= {self.n_ticks}")
        values = self.lattice_values()
        out = (values[b] - values[a]) * LATTICE
        return float(out) if out.ndim == 0 else out


def _build_lattice(seed: int, path_index: int, resolution_exp: int, horizon: float) -> np.ndarray:
    n = 1 << resolution_exp
    g = _normal_words(seed, path_index, 0, n)
    values = np.zeros(n + 1, dtype=np.int64)
    values[n] = np.int64(np.rint(np.sqrt(horizon) * g[0] * _SCALE))
    for level in range(resolution_exp):
        step = n >> level  # parent spacing in ticks
        half = step >> 1
        mids = np.arange(half, n, step, dtype=np.int64)
        noise = np.sqrt(horizon / (1 << level) / 4.0) * _SCALE  # bridge stdev, scaled
        mid_f = (values[mids - half] + values[mids + half]) * 0.5
        mid_f += g[(1 << level) : (1 << (level + 1))] * noise
        values[mids] = np.rint(mid_f).astype(np.int64)
    return values
