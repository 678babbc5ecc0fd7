"""Pure-NumPy kernel backend.

Same operations and the same per-element accumulation order as the compiled
backend (sites ascending, then pairs ascending), so the two agree to
rounding. ``num_threads`` is accepted for signature parity and ignored.
"""

from __future__ import annotations

import numpy as np


def _signs(L: int, i: int) -> np.ndarray:
    """sigma^z eigenvalues (+-1) of bit i over the 2^L basis states."""
    idx = np.arange(1 << L, dtype=np.int64)
    return (((idx >> i) & 1) * 2 - 1).astype(np.float64)


def weighted_sz_sum(L: int, w: np.ndarray, out: np.ndarray, num_threads: int = 1) -> None:
    """out[b] = sum_i w[i] * s_i(b) with s_i(b) = 2 bit_i(b) - 1."""
    out[:] = 0.0
    for i in range(L):
        out += w[i] * _signs(L, i)


def pair_zz_sum(
    L: int,
    pair_i: np.ndarray,
    pair_j: np.ndarray,
    pair_w: np.ndarray,
    out: np.ndarray,
    num_threads: int = 1,
) -> None:
    """out[b] = sum_p w[p] * s_{i_p}(b) * s_{j_p}(b)."""
    out[:] = 0.0
    for i, j, w in zip(pair_i, pair_j, pair_w):
        out += w * (_signs(L, int(i)) * _signs(L, int(j)))


def apply_x_rotations(
    amps: np.ndarray, L: int, angles: np.ndarray, num_threads: int = 1
) -> None:
    """In-place exp(-i a_i sigma^x_i) on every site i, amplitudes (2^L,)."""
    for i in range(L):
        c = np.cos(angles[i])
        s = np.sin(angles[i])
        view = amps.reshape(1 << (L - i - 1), 2, 1 << i)
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :]
        view[:, 0, :] = c * lo - 1j * s * hi
        view[:, 1, :] = c * hi - 1j * s * lo
