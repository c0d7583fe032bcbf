"""Deterministic random streams: xoshiro256++ seeded by splitmix64.

Every randomized routine in the package draws from a :class:`SeededRNG`.
Arrays are filled in C (row-major) order.  Normal variates come from the
Box–Muller transform, two per pair of uniforms; when an odd count is asked
for, the unused second variate of the last pair is discarded.
"""

from __future__ import annotations

import numpy as np

from ._kernels import backend as _default_backend

_MASK = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    state = (state + GOLDEN_GAMMA) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def derive_seed(base_seed: int, index: int) -> int:
    """The ``index``-th (0-based) splitmix64 output starting from ``base_seed``.

    Used to give each experiment trial its own stream; adding trials never
    changes the seeds of earlier ones.
    """
    state = (int(base_seed) + int(index) * GOLDEN_GAMMA) & _MASK
    return splitmix64(state)[1]


class SeededRNG:
    """A single-owner xoshiro256++ stream."""

    def __init__(self, seed: int, backend=None):
        seed = int(seed)
        if not 0 <= seed <= _MASK:
            raise ValueError("seed must fit in 64 unsigned bits")
        self.seed = seed
        self._k = backend if backend is not None else _default_backend
        words = []
        s = seed
        for _ in range(4):
            s, out = splitmix64(s)
            words.append(out)
        self.state = np.array(words, dtype=np.uint64)

    def next_u64(self, size: int | None = None):
        n = 1 if size is None else int(size)
        out = np.empty(n, dtype=np.uint64)
        self._k.fill_u64(self.state, out)
        return int(out[0]) if size is None else out

    def random(self, size=None):
        """Uniform doubles on [0, 1) with 53 random bits."""
        shape = () if size is None else size
        out = np.empty(int(np.prod(shape, dtype=np.int64)), dtype=np.float64)
        self._k.fill_uniform(self.state, out)
        return float(out[0]) if size is None else out.reshape(shape)

    def uniform(self, low=0.0, high=1.0, size=None):
        u = self.random(size)
        return low + (high - low) * u

    def standard_normal(self, size=None):
        shape = () if size is None else size
        out = np.empty(int(np.prod(shape, dtype=np.int64)), dtype=np.float64)
        self._k.fill_normal(self.state, out)
        return float(out[0]) if size is None else out.reshape(shape)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return loc + scale * self.standard_normal(size)

    def integer_below(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection of the low tail."""
        n = int(n)
        if n < 1:
            raise ValueError("n must be positive")
        threshold = ((1 << 64) - n) % n
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % n

    def permutation(self, n: int) -> np.ndarray:
        """Fisher–Yates shuffle of ``range(n)``."""
        perm = list(range(int(n)))
        for i in range(len(perm) - 1, 0, -1):
            j = self.integer_below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return np.array(perm, dtype=np.int64)

    def choice(self, n: int, k: int) -> np.ndarray:
        """``k`` distinct indices from ``range(n)``, in draw order."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot choose {k} of {n}")
        return self.permutation(n)[:k]


def seeded_rng(seed: int) -> SeededRNG:
    return SeededRNG(seed)
