"""Pure numpy implementations of the hot kernels.

Every function here has a compiled twin in ``_core.pyx`` with the same
signature and the same arithmetic, so either backend gives identical
results on identical inputs.
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_LOW32 = np.uint64(0xFFFFFFFF)
_TWO_M32 = 2.0 ** -32

# samples per chunk when generating populations; bounds temporary memory
_CHUNK = 1 << 20


def simplex_pivots(T, basis, ncols, max_iter, pivot_tol, opt_tol):
    """Run primal simplex pivots on a dense tableau in place.

    ``T`` has one row per constraint plus a final reduced-cost row; its last
    column is the right-hand side.  Only columns ``< ncols`` may enter.  The
    entering column is the lowest-index one with a negative reduced cost
    (Bland).  The leaving row uses a two-pass ratio test: ratios are first
    relaxed by ``pivot_tol``, then the largest pivot among the rows within
    the relaxed minimum wins, exact ties going to the lowest basis index.
    Returns ``(status, pivots_done)``.
    """
    m = T.shape[0] - 1
    it = 0
    while True:
        d = T[m, :ncols]
        cand = np.flatnonzero(d < -opt_tol)
        if cand.size == 0:
            return OPTIMAL, it
        if it >= max_iter:
            return ITERATION_LIMIT, it
        j = cand[0]
        col = T[:m, j]
        tol = pivot_tol * max(1.0, float(np.max(np.abs(col), initial=0.0)))
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return UNBOUNDED, it
        rhs = np.maximum(T[rows, -1], 0.0)
        relaxed = ((rhs + pivot_tol) / col[rows]).min()
        ok = rows[rhs / col[rows] <= relaxed]
        big = col[ok].max()
        ties = ok[col[ok] >= big]
        i = ties[np.argmin(basis[ties])]
        pivot(T, i, j)
        basis[i] = j
        it += 1


def pivot(T, i, j):
    row = T[i] / T[i, j]
    f = T[:, j].copy()
    f[i] = 0.0
    T -= np.outer(f, row)
    T[i] = row
    T[:, j] = 0.0
    T[i, j] = 1.0


def prefix_histograms(bits, vis, cands, length):
    """Weight histograms of ``(y XOR u) AND visible`` over the first
    ``length`` positions, one row per candidate ``u``."""
    m, W = bits.shape
    k = cands.shape[0]
    pref = prefix_masks(length, W)
    counts = np.zeros((k, length + 1), dtype=np.int64)
    live = vis & pref
    for c in range(k):
        w = np.bitwise_count((bits ^ cands[c]) & live).sum(axis=1, dtype=np.int64)
        counts[c] = np.bincount(w, minlength=length + 1)
    return counts


def prefix_masks(length, W):
    out = np.zeros(W, dtype=np.uint64)
    for wd in range(W):
        nb = min(max(length - 64 * wd, 0), 64)
        if nb == 64:
            out[wd] = np.uint64(0xFFFFFFFFFFFFFFFF)
        elif nb > 0:
            out[wd] = np.uint64((1 << nb) - 1)
    return out


def _splitmix(state):
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def random_words(key, index):
    """Counter-based stream: word ``index`` of the splitmix64 sequence
    started at ``key``."""
    with np.errstate(over="ignore"):
        state = np.uint64(key) + (index + np.uint64(1)) * GOLDEN
        return _splitmix(state)


def sample_population(support, pick_prob, pick_alias, mask_prob, mask_alias,
                      n, erasure, key, offset, count):
    """Draw ``count`` noisy samples (packed) from a finite-support population.

    Sample ``s`` uses stream words ``s*stride .. s*stride+stride-1`` where
    ``stride = 1 + ceil(n/8)``: the first picks the support string through
    the alias table, the rest pick one 8-position noise mask each.
    """
    W = support.shape[1]
    nblocks = (n + 7) // 8
    stride = 1 + nblocks
    S = np.uint64(support.shape[0])
    nmask = prefix_masks(n, W)
    bits = np.empty((count, W), dtype=np.uint64)
    vis = np.empty((count, W), dtype=np.uint64)
    for start in range(0, count, _CHUNK):
        stop = min(start + _CHUNK, count)
        s = np.arange(offset + start, offset + stop, dtype=np.uint64)
        base = s * np.uint64(stride)
        r = random_words(key, base)
        col = (((r >> np.uint64(32)) * S) >> np.uint64(32)).astype(np.int64)
        u = (r & _LOW32).astype(np.float64) * _TWO_M32
        pick = np.where(u < pick_prob[col], col, pick_alias[col])
        x = support[pick]
        noise = np.zeros((stop - start, W), dtype=np.uint64)
        for b in range(nblocks):
            r = random_words(key, base + np.uint64(1 + b))
            col = (r >> np.uint64(56)).astype(np.int64)
            u = (r & _LOW32).astype(np.float64) * _TWO_M32
            m8 = np.where(u < mask_prob[col], col, mask_alias[col]).astype(np.uint64)
            noise[:, (8 * b) // 64] |= m8 << np.uint64((8 * b) % 64)
        noise &= nmask
        if erasure:
            v = nmask & ~noise
            bits[start:stop] = x & v
            vis[start:stop] = v
        else:
            bits[start:stop] = x ^ noise
            vis[start:stop] = nmask
    return bits, vis
