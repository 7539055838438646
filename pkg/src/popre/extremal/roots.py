"""Polynomials with a high-order root at 1 and a large constant term.

``construct_repeated_root_poly(M, T)`` maximizes ``a_0`` over real
``p(z) = sum_{j<=M} a_j z^j`` with ``sum|a_j| <= 2`` and
``p(1) = p'(1) = ... = p^(T-1)(1) = 0``.  The derivative conditions are the
falling-factorial moments ``sum_j a_j C(j, k) = 0`` for ``k < T``; each row is
divided by ``C(M, k)`` so the LP stays well scaled.

A basic optimum is supported on exactly ``T + 1`` exponents (fewer cannot
carry ``T`` independent moment conditions), and on a fixed support ``S`` the
conditions pin ``a`` down to a multiple of the divided-difference weights
``1 / prod_{l in S, l != j} (j - l)``.  Those weights are recomputed in exact
rational arithmetic, so the returned roots at 1 are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import lp
from .regions import Arc, Segment, sup_on_region
from .verify import VerificationRecord


@dataclass(frozen=True, eq=False)
class RepeatedRootPoly:
    """``coeffs[j]`` multiplies ``z^j``; ``T`` roots at 1; ``sum|coeffs| = 2``."""

    coeffs: np.ndarray
    M: int
    T: int
    a0_level: float
    coeffs_exact: tuple = field(repr=False)
    lp_level: float = float("nan")

    @property
    def length(self):
        return float(np.abs(self.coeffs).sum())

    def tail_length(self):
        return float(np.abs(self.coeffs[1:]).sum())

    def ratio(self):
        """``|a_0| / sum_{j>=1} |a_j|``."""
        return abs(float(self.coeffs[0])) / self.tail_length()

    def derivative_at_one(self, k):
        """Exact ``p^(k)(1) = sum_j a_j j (j-1) ... (j-k+1)``."""
        total = Fraction(0)
        for j, a in enumerate(self.coeffs_exact):
            if a:
                total += a * math.perm(j, k)
        return total

    def root_multiplicity(self):
        """Number of vanishing derivatives at 1 (exact)."""
        k = 0
        while k <= self.M and self.derivative_at_one(k) == 0:
            k += 1
        return k


def erdelyi_T(M, L):
    """``floor(min((2/7) sqrt(M ln(1/L)), M))``."""
    return int(math.floor(min(2.0 / 7.0 * math.sqrt(M * math.log(1.0 / L)), M)))


def moment_rows(M, T):
    """``(T, M+1)`` matrix of ``C(j, k) / C(M, k)``."""
    rows = np.zeros((T, M + 1))
    for k in range(T):
        top = math.comb(M, k)
        rows[k] = [math.comb(j, k) / top for j in range(M + 1)]
    return rows


def divided_difference_weights(support):
    """Exact ``1 / prod_{l != j} (j - l)`` for each ``j`` in ``support``."""
    out = []
    for j in support:
        d = 1
        for l in support:
            if l != j:
                d *= j - l
        out.append(Fraction(1, d))
    return out


def construct_repeated_root_poly(M, T):
    M, T = int(M), int(T)
    if M < 1:
        raise ValueError(f"M must be positive, got {M}")
    if not 0 <= T <= M:
        raise ValueError(f"need 0 <= T <= M, got T={T}, M={M}")
    if T == 0:
        exact = [Fraction(2)] + [Fraction(0)] * M
        return RepeatedRootPoly(np.array([float(v) for v in exact]), M, 0, 2.0, tuple(exact), 2.0)

    k = M + 1
    mom = moment_rows(M, T)
    A = np.vstack([np.hstack([mom, -mom]), np.ones((1, 2 * k))])
    rels = [lp.EQ] * T + [lp.LE]
    b = np.concatenate([np.zeros(T), [2.0]])
    cost = np.zeros(2 * k)
    cost[0], cost[k] = -1.0, 1.0
    sol = lp.solve_lp(lp.LpProblem(cost, A, rels, b))
    if not sol.optimal:
        raise lp.LpError(f"repeated-root LP ended {sol.status.value}")
    a = sol.x[:k] - sol.x[k:]

    order = np.argsort(-np.abs(a[1:]), kind="stable") + 1
    support = sorted([0] + [int(j) for j in order[:T]])
    w = divided_difference_weights(support)
    scale = Fraction(2) / sum(abs(v) for v in w)
    if w[0] < 0:
        scale = -scale
    exact = [Fraction(0)] * k
    for j, v in zip(support, w):
        exact[j] = v * scale
    coeffs = np.array([float(v) for v in exact])
    return RepeatedRootPoly(coeffs, M, T, float(exact[0]), tuple(exact), float(-sol.objective))


def _normalized(poly, cap):
    big = max(abs(v) for v in poly.coeffs_exact)
    scale = cap / float(big)
    return poly.coeffs * scale, scale


def verify_root_bounds(poly, k):
    """Check the segment and arc bounds for ``k`` roots at 1.

    Segment ``[1 - k/(9M), 1]`` with ``|a_j| <= 1``: ``sup|p| <= (M+1)(e/9)^k``.
    Arc ``|theta| <= k/(9M)`` with ``|a_j| <= 9``: ``sup|p| <= 9(M+1)(e/9)^k``.
    The coefficients are rescaled to make the largest one exactly 1 (resp. 9),
    the strictest instance each hypothesis allows; the scales are recorded.
    """
    k = int(k)
    if k < 0:
        raise ValueError("k must be nonnegative")
    mult = poly.root_multiplicity()
    if k > mult:
        raise ValueError(f"polynomial has {mult} roots at 1, fewer than k={k}")
    M = poly.M
    width = k / (9.0 * M)

    seg_coeffs, seg_scale = _normalized(poly, 1.0)
    seg_bound = (M + 1) * (math.e / 9.0) ** k
    seg = sup_on_region(seg_coeffs, Segment(1.0 - width, 1.0))

    arc_coeffs, arc_scale = _normalized(poly, 9.0)
    arc_bound = 9.0 * (M + 1) * (math.e / 9.0) ** k
    if k == 0:
        v = abs(float(np.sum(arc_coeffs)))
        arc_val = arc_up = v
    else:
        arc = sup_on_region(arc_coeffs, Arc(-width, width))
        arc_val, arc_up = arc.value, arc.upper

    params = {"M": M, "k": k, "T": poly.T}
    return (
        VerificationRecord.build("segment_root_bound", seg.value, seg.upper, seg_bound,
                                 direction="le", scale=seg_scale, **params),
        VerificationRecord.build("arc_root_bound", arc_val, arc_up, arc_bound,
                                 direction="le", scale=arc_scale, **params),
    )
