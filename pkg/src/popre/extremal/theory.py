"""Closed-form bound values with every hidden constant set to 1.

All exponents are "unit-constant" forms: the true bounds carry unknown
absolute constants in front, so only their scaling is meaningful.
Out-of-range parameters never raise; each theorem's hypothesis is reported
as a boolean instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from ..channel import NoiseKind
from .inequalities import three_lines_bound


@dataclass(frozen=True)
class TheoryBounds:
    model: str
    nu: float
    n: int
    eps: float
    exponent_bitflip_lo: float
    exponent_bitflip_hi: float
    exponent_erasure: float
    three_lines: float
    bitflip_M: int
    bitflip_T: float
    bitflip_theta_star: float
    bitflip_theta_star_lower: float
    erasure_M: int
    erasure_T: float
    erasure_theta: float
    hypotheses: dict = field(default_factory=dict)
    constants: str = "unit-constant"

    @property
    def hypothesis_met(self):
        """Whether the headline lower-bound hypothesis holds for this model.

        Bit-flip uses the main theorem's range ``ln(1/eps)/n <= nu <=
        1 - ln(1/eps)/n``; erasure uses the three-lines range ``nu < 1/2``.
        """
        key = "bitflip_main" if self.model == NoiseKind.BITFLIP.value else "erasure_three_lines"
        return self.hypotheses[key]

    @property
    def exponent(self):
        """The unit-constant exponent matching the model (and nu branch)."""
        if self.model == NoiseKind.ERASURE.value:
            return self.exponent_erasure
        return self.exponent_bitflip_lo if self.nu <= 0.5 else self.exponent_bitflip_hi

    def to_dict(self):
        out = asdict(self)
        out["hypothesis_met"] = self.hypothesis_met
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _floor(x):
    # guard against 1/0.1**2 = 99.99999999999999 style rounding
    return int(math.floor(x * (1.0 + 1e-12)))


def _nan_if_zero(num, den):
    return num / den if den else float("nan")


def theory_bounds(model, n, eps):
    nu = float(model.nu)
    n = int(n)
    eps = float(eps)
    if not (0.0 < eps < 1.0) or n < 1:
        raise ValueError("theory_bounds needs 0 < eps < 1 and n >= 1")
    L = math.log(1.0 / eps)
    L2 = math.log(2.0 / eps)
    one_m = 1.0 - nu * nu

    exp_lo = n ** (1 / 3) * L ** (2 / 3) / nu ** (2 / 3)
    exp_hi = n ** (1 / 3) * L ** (2 / 3) * (1.0 - nu) ** (1 / 3)
    exp_er = L / nu

    # bit-flip construction: M, T repeated roots, arc half-width theta*
    bM = _floor(n ** (2 / 3) * L ** (1 / 3) * one_m ** (2 / 3) * nu ** (-4 / 3))
    half_L = math.log(1.0 / (2.0 * eps)) if eps < 0.5 else 0.0
    bT = 2.0 / 7.0 * math.sqrt(bM * half_L)
    b_theta = _nan_if_zero(2.0 * bT, 9.0 * bM)
    b_theta_lower = (
        0.1 * nu ** (2 / 3) * L ** (1 / 3) / (n * one_m) ** (1 / 3) if one_m > 0 else float("nan")
    )

    # erasure construction
    eM = _floor(L / nu ** 2)
    eT = 2.0 / 7.0 * L / nu
    e_theta = 2.0 * nu / 63.0

    hyp = {
        "bitflip_main": L / n <= nu <= 1.0 - L / n,
        "bitflip_lower": 2.0 * L2 / n <= nu <= 1.0 - 2.0 * L2 / n,
        "bitflip_upper": (2.0 * L2 / n) ** 0.25 <= nu <= 1.0 - 2.0 * L2 / n,
        "erasure_main": math.sqrt(16.0 * L / n) <= nu <= 1.0 / 160.0,
        "erasure_three_lines": nu < 0.5,
        "erasure_upper": nu <= 0.1 and L / nu ** 2 <= n,
    }
    return TheoryBounds(
        model=NoiseKind(model.kind).value, nu=nu, n=n, eps=eps,
        exponent_bitflip_lo=exp_lo, exponent_bitflip_hi=exp_hi, exponent_erasure=exp_er,
        three_lines=three_lines_bound(eps, nu),
        bitflip_M=bM, bitflip_T=bT, bitflip_theta_star=b_theta,
        bitflip_theta_star_lower=b_theta_lower,
        erasure_M=eM, erasure_T=eT, erasure_theta=e_theta,
        hypotheses=hyp,
    )
