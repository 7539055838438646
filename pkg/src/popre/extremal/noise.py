"""Signed certificates ``c`` and the noise polynomials they induce.

A certificate ``c`` (difference of two weight distributions) doubles as the
coefficient vector of ``Q_c(v) = sum_i c_i v^i``.  Pushed through the
channel it becomes a polynomial in ``z`` with coefficients ``c @ A``:

* bit-flip: ``F_c(z) = sum_i c_i f1(z)^i f0(z)^(n-i)`` with
  ``f1 = (1-nu)/2 + (1+nu)/2 z`` and ``f0 = (1+nu)/2 + (1-nu)/2 z``;
* erasure: ``E_c(z) = Q_c((1-nu) + nu z)``.

With ``w = f1/f0`` (a Moebius map of the unit circle onto itself),
``F_c(z) = (nu / ((1+nu)/2 - (1-nu)/2 w))^n Q_c(w)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..channel import NoiseKind, build_channel_matrix
from .regions import poly_eval

SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DeltaVector:
    """``c`` with ``sum(c) = 0`` and ``sum|c| <= 2``: a difference of two
    probability vectors over weights ``0..n``."""

    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=float).ravel()
        if c.size < 2:
            raise ValueError("a certificate needs at least two coefficients")
        if abs(c.sum()) > SUM_TOL:
            raise ValueError(f"coefficients must sum to 0, got {c.sum():.3g}")
        if np.abs(c).sum() > 2.0 + SUM_TOL:
            raise ValueError(f"coefficient length {np.abs(c).sum():.12g} exceeds 2")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def n(self):
        return self.c.size - 1

    @property
    def length(self):
        """``L(Q_c)``: the sum of absolute coefficients."""
        return float(np.abs(self.c).sum())

    @property
    def eps_level(self):
        """Largest ``eps`` with ``|c_0| >= 2 eps``."""
        return abs(float(self.c[0])) / 2.0

    def split(self):
        """Probability vectors ``(p, p')`` with ``p - p' = c``; the unused mass
        ``1 - L/2`` is placed on a common weight."""
        plus = np.maximum(self.c, 0.0)
        minus = np.maximum(-self.c, 0.0)
        rest = max(0.0, 1.0 - plus.sum())
        common = np.zeros_like(plus)
        common[int(np.argmin(np.abs(self.c)))] = rest
        return plus + common, minus + common


def random_delta(n, rng, concentration=1.0):
    """Random element of the certificate set: the difference of two Dirichlet
    draws over weights ``0..n``."""
    alpha = np.full(n + 1, concentration)
    c = rng.dirichlet(alpha) - rng.dirichlet(alpha)
    c -= c.mean()  # cancel rounding in the sum
    return DeltaVector(c)


def noise_poly_coeffs(c, model, n=None):
    """Coefficients in ``z`` of ``F_c`` (bit-flip) or ``E_c`` (erasure): ``c @ A``."""
    c = np.asarray(getattr(c, "c", c), dtype=float)
    n = c.size - 1 if n is None else n
    if c.size != n + 1:
        raise ValueError(f"certificate of length {c.size} does not match n = {n}")
    return c @ build_channel_matrix(model, n).a


def modulus_factor(nu, theta, form="cosine"):
    """``|nu / ((1+nu)/2 - (1-nu)/2 e^{i theta})|`` from either closed form:

    ``cosine``: ``sqrt(2 nu^2 / ((1 - cos t) + (1 + cos t) nu^2))``;
    ``sine``:   ``(1 + (1 - nu^2) sin^2(t/2) / nu^2)^(-1/2)``.
    """
    theta = np.asarray(theta, dtype=float)
    if form == "cosine":
        ct = np.cos(theta)
        sq = 2.0 * nu * nu / ((1.0 - ct) + (1.0 + ct) * nu * nu)
    elif form == "sine":
        sq = 1.0 / (1.0 + (1.0 - nu * nu) * np.sin(theta / 2.0) ** 2 / (nu * nu))
    else:
        raise ValueError(f"unknown form {form!r}")
    return np.sqrt(sq)


def mobius_w(nu, z):
    """``w = f1(z) / f0(z)``; maps the unit circle onto itself."""
    return ((1 - nu) / 2 + (1 + nu) / 2 * z) / ((1 + nu) / 2 + (1 - nu) / 2 * z)


@dataclass(frozen=True)
class NoisePolyValue:
    value: complex
    direct: complex
    factored: complex | None = None

    @property
    def modulus(self):
        return abs(self.value)


_ON_CURVE_TOL = 1e-9


def eval_noise_poly(c, model, point):
    """Evaluate the noise polynomial of certificate ``c`` at one point.

    ``point`` is either a real angle ``theta`` (meaning ``z = e^{i theta}``)
    or a complex number: ``z`` on the unit circle for bit-flip, ``u`` on the
    circle ``|u - (1-nu)| = nu`` for erasure.  Bit-flip values are computed
    twice, directly from the product form and through ``Q_c(w)``.
    """
    c = np.asarray(getattr(c, "c", c), dtype=float)
    n = c.size - 1
    nu = model.nu
    if isinstance(point, complex) or np.iscomplexobj(point):
        point = complex(point)
        if model.kind is NoiseKind.ERASURE:
            if abs(abs(point - (1 - nu)) - nu) > _ON_CURVE_TOL * max(1.0, nu):
                raise ValueError("erasure points must lie on |u - (1-nu)| = nu")
            z = (point - (1 - nu)) / nu
        else:
            if abs(abs(point) - 1.0) > _ON_CURVE_TOL:
                raise ValueError("bit-flip points must lie on the unit circle")
            z = point
    else:
        theta = float(point)
        if not (-math.pi < theta <= math.pi):
            raise ValueError(f"theta must lie in (-pi, pi], got {theta}")
        z = cmath.exp(1j * theta)

    if model.kind is NoiseKind.ERASURE:
        u = (1 - nu) + nu * z
        direct = complex(poly_eval(c, u))
        return NoisePolyValue(direct, direct)

    f1 = (1 - nu) / 2 + (1 + nu) / 2 * z
    f0 = (1 + nu) / 2 + (1 - nu) / 2 * z
    direct = sum(complex(ci) * f1 ** i * f0 ** (n - i) for i, ci in enumerate(c))
    w = f1 / f0
    factor = nu / ((1 + nu) / 2 - (1 - nu) / 2 * w)
    factored = factor ** n * complex(poly_eval(c, w))
    return NoisePolyValue(direct, direct, factored)
