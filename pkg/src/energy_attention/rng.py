"""Deterministic Gaussian sampling for reproducible problem generation.

The generator is a SplitMix64 integer stream fed through Box-Muller, so the
same seed produces bit-identical matrices on every platform and every
library version. All CLI problem generation and head perturbation noise
goes through this module; tests may use numpy's own generators freely.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class GaussianStream:
    """Seeded stream of independent N(0, 1) draws.

    SplitMix64 supplies 64-bit words; each pair of words is mapped to two
    normals via Box-Muller. The second normal of each pair is cached, so
    draw order alone determines the sequence.
    """

    def __init__(self, seed: int):
        if seed < 0 or seed > _MASK64:
            raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
        self._state = seed & _MASK64
        self._spare: float | None = None

    def _next_word(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def normal(self) -> float:
        """One standard normal draw."""
        if self._spare is not None:
            value, self._spare = self._spare, None
            return value
        # u1 in (0, 1] keeps log() finite; u2 in [0, 1).
        u1 = ((self._next_word() >> 11) + 1) * 2.0**-53
        u2 = (self._next_word() >> 11) * 2.0**-53
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = 2.0 * math.pi * u2
        self._spare = radius * math.sin(angle)
        return radius * math.cos(angle)

    def matrix(self, rows: int, cols: int, scale: float = 1.0) -> np.ndarray:
        """Row-major (rows, cols) matrix of N(0, scale^2) entries."""
        if rows < 1 or cols < 1:
            raise ValueError(f"matrix dimensions must be positive, got {rows}x{cols}")
        out = np.empty((rows, cols), dtype=np.float64)
        for i in range(rows):
            for k in range(cols):
                out[i, k] = scale * self.normal()
        return out
