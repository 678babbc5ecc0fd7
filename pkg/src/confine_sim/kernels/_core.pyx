# cython: language_level=3
"""Compiled kernels for the state-vector engine.

Per-element accumulation order matches :mod:`confine_sim.kernels.pure`
(sites ascending, then pairs ascending). Every basis amplitude is written by
exactly one thread, so results do not depend on ``num_threads``.
"""

from cython.parallel cimport prange
from libc.math cimport cos, sin
from libc.stdint cimport int64_t


def weighted_sz_sum(int L, double[::1] w, double[::1] out, int num_threads=1):
    """out[b] = sum_i w[i] * s_i(b), s_i(b) = 2 bit_i(b) - 1."""
    cdef int64_t dim = (<int64_t>1) << L
    cdef int64_t b
    cdef int i
    cdef int nt = num_threads if num_threads > 0 else 1
    cdef double acc
    if w.shape[0] != L:
        raise ValueError("weight vector has wrong length")
    if out.shape[0] != dim:
        raise ValueError("output vector has wrong length")
    for b in prange(dim, nogil=True, num_threads=nt, schedule='static'):
        acc = 0.0
        for i in range(L):
            if (b >> i) & 1:
                acc = acc + w[i]
            else:
                acc = acc - w[i]
        out[b] = acc


def pair_zz_sum(int L, int64_t[::1] pair_i, int64_t[::1] pair_j,
                double[::1] pair_w, double[::1] out, int num_threads=1):
    """out[b] = sum_p w[p] * s_{i_p}(b) * s_{j_p}(b)."""
    cdef int64_t dim = (<int64_t>1) << L
    cdef int64_t b
    cdef Py_ssize_t p, n_pairs = pair_i.shape[0]
    cdef int nt = num_threads if num_threads > 0 else 1
    cdef double acc
    cdef int same
    if pair_j.shape[0] != n_pairs or pair_w.shape[0] != n_pairs:
        raise ValueError("pair arrays have mismatched lengths")
    if out.shape[0] != dim:
        raise ValueError("output vector has wrong length")
    for b in prange(dim, nogil=True, num_threads=nt, schedule='static'):
        acc = 0.0
        for p in range(n_pairs):
            same = ((b >> pair_i[p]) & 1) == ((b >> pair_j[p]) & 1)
            if same:
                acc = acc + pair_w[p]
            else:
                acc = acc - pair_w[p]
        out[b] = acc


def apply_x_rotations(double complex[::1] amps, int L, double[::1] angles,
                      int num_threads=1):
    """In-place exp(-i a_i sigma^x_i) on every site i, amplitudes (2^L,)."""
    cdef int64_t dim = amps.shape[0]
    cdef int64_t half = dim >> 1
    cdef int64_t m, bit, lowmask, i0, i1
    cdef int i
    cdef int nt = num_threads if num_threads > 0 else 1
    cdef double c, s, nr0, ni0, nr1, ni1
    cdef double complex u, v
    if dim != ((<int64_t>1) << L):
        raise ValueError("amplitude vector has wrong length")
    if angles.shape[0] != L:
        raise ValueError("angle vector has wrong length")
    for i in range(L):
        c = cos(angles[i])
        s = sin(angles[i])
        bit = (<int64_t>1) << i
        lowmask = bit - 1
        for m in prange(half, nogil=True, num_threads=nt, schedule='static'):
            i0 = ((m >> i) << (i + 1)) | (m & lowmask)
            i1 = i0 | bit
            u = amps[i0]
            v = amps[i1]
            nr0 = c * u.real + s * v.imag
            ni0 = c * u.imag - s * v.real
            nr1 = c * v.real + s * u.imag
            ni1 = c * v.imag - s * u.real
            amps[i0] = nr0 + 1j * ni0
            amps[i1] = nr1 + 1j * ni1
