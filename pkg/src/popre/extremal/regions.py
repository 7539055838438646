"""Curves in the complex plane and certified suprema of polynomials on them.

Every region is traced by a real parameter ``phi``; along it ``|Q|^2`` is a
trigonometric polynomial whose degree is known in advance.  That gives an
honest discretization bound: for a trigonometric polynomial ``T >= 0`` of
degree ``D``, Bernstein's inequality ``|T''| <= D^2 max|T|`` means a grid with
spacing ``h`` misses at most ``D^2 max|T| h^2 / 8`` near an interior maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GRID_MIN = 4096
GRID_PER_DEGREE = 64
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_REFINE_STEPS = 60
_REFINE_CANDIDATES = 8


class RegionSpec:
    """Base class: a closed curve or an arc, parameterized by ``phi``."""

    periodic = True

    def param_range(self):
        return 0.0, 2.0 * math.pi

    def point(self, phi):
        raise NotImplementedError

    def trig_degree(self, degree):
        """Degree of ``|Q(point(phi))|^2`` as a trigonometric polynomial."""
        return degree


@dataclass(frozen=True)
class UnitCircle(RegionSpec):
    def point(self, phi):
        return np.exp(1j * np.asarray(phi, dtype=float))


@dataclass(frozen=True)
class Arc(RegionSpec):
    """``{e^{i theta} : theta_lo <= theta <= theta_hi}``."""

    theta_lo: float
    theta_hi: float
    periodic = False

    def __post_init__(self):
        if not (-math.pi <= self.theta_lo < self.theta_hi <= math.pi):
            raise ValueError(f"arc needs -pi <= theta_lo < theta_hi <= pi, got "
                             f"[{self.theta_lo}, {self.theta_hi}]")

    def param_range(self):
        return self.theta_lo, self.theta_hi

    def point(self, phi):
        return np.exp(1j * np.asarray(phi, dtype=float))


@dataclass(frozen=True)
class Segment(RegionSpec):
    """Real interval ``[x_lo, x_hi]``, traced as ``mid + half*cos(phi)``."""

    x_lo: float
    x_hi: float

    def __post_init__(self):
        if not self.x_lo <= self.x_hi:
            raise ValueError(f"segment needs x_lo <= x_hi, got [{self.x_lo}, {self.x_hi}]")

    def point(self, phi):
        mid = 0.5 * (self.x_lo + self.x_hi)
        half = 0.5 * (self.x_hi - self.x_lo)
        return (mid + half * np.cos(np.asarray(phi, dtype=float))).astype(complex)

    def trig_degree(self, degree):
        return 2 * degree


@dataclass(frozen=True)
class CircleDisk(RegionSpec):
    """Boundary circle of the disk ``D_radius(center)``."""

    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def point(self, phi):
        return self.center + self.radius * np.exp(1j * np.asarray(phi, dtype=float))


@dataclass(frozen=True)
class EllipseB(RegionSpec):
    """``B_{a,r} = {(1 - 8a) + 4a(z + 1/z) : |z| = r}``.

    For ``r = 1`` this degenerates to the segment ``[1 - 16a, 1]`` (traversed
    twice).
    """

    a: float
    r: float

    def __post_init__(self):
        if not (self.a > 0 and self.r > 0):
            raise ValueError(f"EllipseB needs a > 0 and r > 0, got a={self.a}, r={self.r}")

    def point(self, phi):
        z = self.r * np.exp(1j * np.asarray(phi, dtype=float))
        return (1.0 - 8.0 * self.a) + 4.0 * self.a * (z + 1.0 / z)

    def trig_degree(self, degree):
        return 2 * degree

    def semi_axes(self):
        """(major, minor) half-lengths ``4a(r + 1/r)`` and ``4a|r - 1/r|``."""
        return 4.0 * self.a * (self.r + 1.0 / self.r), 4.0 * self.a * abs(self.r - 1.0 / self.r)


@dataclass(frozen=True)
class SupResult:
    """``value`` is attained (a lower bound); ``upper`` is certified."""

    value: float
    upper: float
    argmax: complex
    grid_size: int

    @property
    def error(self):
        return self.upper - self.value


def poly_eval(coeffs, v):
    """``sum_j coeffs[j] v^j`` by Horner's rule, vectorized over ``v``."""
    coeffs = np.asarray(coeffs)
    v = np.asarray(v)
    out = np.zeros(v.shape, dtype=complex)
    for a in coeffs[::-1]:
        out = out * v + a
    return out


def _trim(coeffs):
    coeffs = np.asarray(coeffs)
    nz = np.flatnonzero(coeffs != 0)
    return coeffs[: nz[-1] + 1] if nz.size else coeffs[:1]


def grid_size(trig_deg):
    return max(GRID_MIN, GRID_PER_DEGREE * max(int(trig_deg), 1))


def _golden_max(f, lo, hi):
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(_REFINE_STEPS):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def sup_on_region(coeffs, region, grid=None):
    """Supremum of ``|Q|`` over ``region`` for ``Q(v) = sum_j coeffs[j] v^j``.

    Evaluates a uniform grid of ``max(4096, 64 * D)`` parameter values
    (``D`` the trigonometric degree of ``|Q|^2`` along the region), refines
    the best local maxima by golden-section search, and returns the attained
    value together with a certified upper bound.
    """
    coeffs = _trim(coeffs)
    deg = coeffs.size - 1
    D = region.trig_degree(deg)
    N = grid if grid is not None else grid_size(D)
    lo, hi = region.param_range()
    if region.periodic:
        phis = lo + (hi - lo) * np.arange(N) / N
        h = (hi - lo) / N
    else:
        phis = np.linspace(lo, hi, N)
        h = (hi - lo) / (N - 1)
    vals = np.abs(poly_eval(coeffs, region.point(phis)))
    best = int(np.argmax(vals))
    g = float(vals[best])

    # |Q|^2 is a nonnegative trig polynomial of degree D
    shrink = 0.5 * (D * h) ** 2 / 4.0
    if region.periodic:
        upper = g / math.sqrt(1.0 - shrink) if shrink < 1.0 else math.inf
    else:
        # on the unit circle max|T| <= L(Q)^2, so an endpoint-or-interior
        # argument bounds what the grid can miss
        length = float(np.sum(np.abs(coeffs)))
        upper = math.sqrt(g * g + shrink * length ** 2)

    def f(phi):
        return float(abs(poly_eval(coeffs, region.point(phi))))

    value, arg_phi = g, phis[best]
    if deg > 0:
        left = np.roll(vals, 1)
        right = np.roll(vals, -1)
        if not region.periodic:
            left[0] = -1.0
            right[-1] = -1.0
        peaks = np.flatnonzero((vals >= left) & (vals >= right))
        peaks = peaks[np.argsort(vals[peaks])[::-1][:_REFINE_CANDIDATES]]
        for k in peaks:
            a, b = phis[k] - h, phis[k] + h
            if not region.periodic:
                a, b = max(a, lo), min(b, hi)
            x, fx = _golden_max(f, a, b)
            if fx > value:
                value, arg_phi = fx, x
    upper = max(upper, value)
    return SupResult(value, upper, complex(region.point(arg_phi)), N)

