# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Mirrors ``_fallback.py`` operation for operation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

DEF OPTIMAL = 0
DEF UNBOUNDED = 1
DEF ITERATION_LIMIT = 2

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double TWO_M32 = 2.0 ** -32


cdef extern from *:
    """
    static inline int popre_popcount(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    """
    int popre_popcount(unsigned long long x) nogil


cdef inline void _pivot(double[:, ::1] T, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t rows = T.shape[0], cols = T.shape[1], k, l
    cdef double p = T[i, j], f
    for l in range(cols):
        T[i, l] = T[i, l] / p
    for k in range(rows):
        if k == i:
            continue
        f = T[k, j]
        if f == 0.0:
            continue
        for l in range(cols):
            T[k, l] = T[k, l] - f * T[i, l]
        T[k, j] = 0.0
    T[i, j] = 1.0


def simplex_pivots(double[:, ::1] T, int64_t[::1] basis, Py_ssize_t ncols,
                   Py_ssize_t max_iter, double pivot_tol, double opt_tol):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t it = 0, i, j, k
    cdef double relaxed, r, v, tol, cmax, big
    cdef int status
    with nogil:
        while True:
            j = -1
            for k in range(ncols):
                if T[m, k] < -opt_tol:
                    j = k
                    break
            if j < 0:
                status = OPTIMAL
                break
            if it >= max_iter:
                status = ITERATION_LIMIT
                break
            cmax = 1.0
            for k in range(m):
                if fabs(T[k, j]) > cmax:
                    cmax = fabs(T[k, j])
            tol = pivot_tol * cmax
            relaxed = -1.0
            for k in range(m):
                if T[k, j] > tol:
                    v = T[k, rhs] if T[k, rhs] > 0.0 else 0.0
                    r = (v + pivot_tol) / T[k, j]
                    if relaxed < 0.0 or r < relaxed:
                        relaxed = r
            if relaxed < 0.0:
                status = UNBOUNDED
                break
            i = -1
            big = 0.0
            for k in range(m):
                if T[k, j] > tol:
                    v = T[k, rhs] if T[k, rhs] > 0.0 else 0.0
                    if v / T[k, j] <= relaxed:
                        if i < 0 or T[k, j] > big or (T[k, j] == big and basis[k] < basis[i]):
                            i = k
                            big = T[k, j]
            _pivot(T, i, j)
            basis[i] = j
            it += 1
    return status, it


def pivot(double[:, ::1] T, Py_ssize_t i, Py_ssize_t j):
    with nogil:
        _pivot(T, i, j)


def prefix_histograms(const uint64_t[:, ::1] bits, const uint64_t[:, ::1] vis,
                      const uint64_t[:, ::1] cands, Py_ssize_t length):
    cdef Py_ssize_t m = bits.shape[0], W = bits.shape[1], K = cands.shape[0]
    cdef Py_ssize_t s, c, wd, w
    cdef uint64_t[::1] pref = _prefix_masks(length, W)
    counts_arr = np.zeros((K, length + 1), dtype=np.int64)
    cdef int64_t[:, ::1] counts = counts_arr
    with nogil:
        for s in range(m):
            for c in range(K):
                w = 0
                for wd in range(W):
                    w += popre_popcount((bits[s, wd] ^ cands[c, wd]) & vis[s, wd] & pref[wd])
                counts[c, w] += 1
    return counts_arr


cdef uint64_t[::1] _prefix_masks(Py_ssize_t length, Py_ssize_t W):
    out = np.zeros(W, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef Py_ssize_t wd, nb
    for wd in range(W):
        nb = min(max(length - 64 * wd, 0), 64)
        if nb == 64:
            o[wd] = 0xFFFFFFFFFFFFFFFFULL
        elif nb > 0:
            o[wd] = (1ULL << nb) - 1ULL
    return o


cdef inline uint64_t _word(uint64_t key, uint64_t index) noexcept nogil:
    cdef uint64_t z = key + (index + 1ULL) * GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def random_words(uint64_t key, index):
    idx = np.ascontiguousarray(index, dtype=np.uint64)
    out = np.empty_like(idx)
    cdef const uint64_t[::1] iv = idx.reshape(-1)
    cdef uint64_t[::1] ov = out.reshape(-1)
    cdef Py_ssize_t t
    with nogil:
        for t in range(iv.shape[0]):
            ov[t] = _word(key, iv[t])
    return out


def sample_population(const uint64_t[:, ::1] support, const double[::1] pick_prob,
                      const int64_t[::1] pick_alias, const double[::1] mask_prob,
                      const int64_t[::1] mask_alias, Py_ssize_t n, bint erasure,
                      uint64_t key, uint64_t offset, Py_ssize_t count):
    cdef Py_ssize_t W = support.shape[1]
    cdef Py_ssize_t nblocks = (n + 7) // 8
    cdef uint64_t stride = 1 + nblocks
    cdef uint64_t S = support.shape[0]
    cdef uint64_t[::1] nmask = _prefix_masks(n, W)
    bits_arr = np.empty((count, W), dtype=np.uint64)
    vis_arr = np.empty((count, W), dtype=np.uint64)
    cdef uint64_t[:, ::1] bits = bits_arr
    cdef uint64_t[:, ::1] vis = vis_arr
    cdef uint64_t noise[4]
    cdef Py_ssize_t s, b, wd
    cdef uint64_t base, r, m8
    cdef int64_t col, pick
    cdef double u
    if W > 4:
        raise ValueError("strings longer than 256 positions are not supported")
    with nogil:
        for s in range(count):
            base = (offset + <uint64_t>s) * stride
            r = _word(key, base)
            col = <int64_t>(((r >> 32) * S) >> 32)
            u = <double>(r & 0xFFFFFFFFULL) * TWO_M32
            pick = col if u < pick_prob[col] else pick_alias[col]
            for wd in range(W):
                noise[wd] = 0
            for b in range(nblocks):
                r = _word(key, base + 1 + <uint64_t>b)
                col = <int64_t>(r >> 56)
                u = <double>(r & 0xFFFFFFFFULL) * TWO_M32
                # branchless alias pick: the comparison is a coin flip
                m8 = <uint64_t>(mask_alias[col] ^ ((col ^ mask_alias[col]) & -(<int64_t>(u < mask_prob[col]))))
                noise[(8 * b) // 64] |= m8 << ((8 * b) % 64)
            for wd in range(W):
                noise[wd] &= nmask[wd]
                if erasure:
                    vis[s, wd] = nmask[wd] & ~noise[wd]
                    bits[s, wd] = support[pick, wd] & vis[s, wd]
                else:
                    vis[s, wd] = nmask[wd]
                    bits[s, wd] = support[pick, wd] ^ noise[wd]
    return bits_arr, vis_arr
