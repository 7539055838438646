"""Exact ``eta(eps, nu)`` from the LP, checked against the circle supremum."""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

import numpy as np

from .. import lp
from .._config import max_n
from ..channel import NoiseKind, NoiseModel, build_channel_matrix
from .noise import DeltaVector
from .regions import UnitCircle, sup_on_region

SANDWICH_RTOL = 1e-6


class SandwichViolation(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class EtaReport:
    """``eta`` with its optimal certificate.

    ``circle_sup`` is the maximum of ``|F_c|`` (bit-flip) or ``|E_c|``
    (erasure) on the unit circle for that certificate, ``circle_sup_upper``
    its certified upper bound.
    """

    model: NoiseModel
    n: int
    eps: float
    eta: float
    certificate: DeltaVector
    circle_sup: float
    circle_sup_upper: float
    precision: str = "double"

    def sandwich(self):
        """``(lower, upper)`` bounds on ``eta`` implied by the circle supremum."""
        return self.circle_sup, math.sqrt(self.n + 1) * self.circle_sup_upper

    def to_dict(self):
        return {
            "model": self.model.kind.value,
            "nu": self.model.nu,
            "n": self.n,
            "eps": self.eps,
            "eta": self.eta,
            "circle_sup": self.circle_sup,
            "circle_sup_upper": self.circle_sup_upper,
            "precision": self.precision,
            "certificate": [float(v) for v in self.certificate.c],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def check_sandwich(eta, circle_lo, circle_hi, n, rtol=SANDWICH_RTOL):
    """``circle_sup <= eta <= sqrt(n+1) circle_sup`` up to relative slack."""
    lo_ok = circle_lo <= eta * (1.0 + rtol) + 1e-15
    hi_ok = eta <= math.sqrt(n + 1) * circle_hi * (1.0 + rtol) + 1e-15
    return lo_ok and hi_ok


def eta_exact(model, n, eps):
    """LP value of ``min ||cA||_1`` over certificates with ``c_0 = 2 eps``.

    Results are cached per ``(model, n, eps)``.
    """
    if not isinstance(model, NoiseModel):
        raise TypeError(f"expected a NoiseModel, got {type(model).__name__}")
    limit = max_n()
    if not (1 <= int(n) <= limit):
        raise ValueError(f"eta_exact supports 1 <= n <= {limit}, got {n}")
    if not (0.0 < eps < 0.5):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps!r}")
    return _eta_cached(NoiseKind(model.kind), float(model.nu), int(n), float(eps))


@functools.lru_cache(maxsize=512)
def _eta_cached(kind, nu, n, eps):
    model = NoiseModel(kind, nu)
    channel = build_channel_matrix(model, n)
    sol = lp.solve_lp(lp.build_eta_lp(channel, eps))
    if not sol.optimal:
        raise lp.LpError(f"eta LP ended {sol.status.value}")
    c = lp.eta_certificate(sol, n + 1)
    cert = DeltaVector(c)
    coeffs = c @ channel.a
    sup = sup_on_region(coeffs, UnitCircle())
    if not check_sandwich(sol.objective, sup.value, sup.upper, n):
        raise SandwichViolation(
            f"eta={sol.objective:.6g} outside [{sup.value:.6g}, sqrt(n+1)*{sup.upper:.6g}]"
        )
    return EtaReport(model, n, eps, float(sol.objective), cert, sup.value, sup.upper,
                     sol.precision)


def noise_coefficients(report):
    """``c @ A`` for the report's certificate."""
    return np.asarray(report.certificate.c) @ build_channel_matrix(report.model, report.n).a
