"""Hadamard-type inequalities checked on concrete polynomials."""

from __future__ import annotations

import math

import numpy as np

from .regions import CircleDisk, EllipseB, sup_on_region
from .verify import VerificationRecord


def three_lines_bound(eps, nu):
    """Lower bound on ``max |Q|`` over ``|u - (1-nu)| = nu`` when ``|Q(0)| >= 2 eps``
    and ``|Q| <= 2`` on the unit circle: ``2 eps^((1-nu)/nu)`` for ``nu < 1/2``
    and ``2 eps`` (maximum modulus) otherwise."""
    if not (0.0 < nu <= 1.0):
        raise ValueError(f"nu must lie in (0, 1], got {nu}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if nu < 0.5:
        return 2.0 * eps ** ((1.0 - nu) / nu)
    return 2.0 * eps


def three_lines_check(coeffs, nu, eps=None):
    """Compare ``sup |Q_c|`` on the erasure circle with :func:`three_lines_bound`.

    ``eps`` defaults to ``|c_0| / 2``.  Requires ``sum|c| <= 2``.
    """
    c = np.asarray(getattr(coeffs, "c", coeffs), dtype=float)
    length = float(np.abs(c).sum())
    if length > 2.0 + 1e-9:
        raise ValueError(f"coefficient length {length:.6g} exceeds 2")
    eps = abs(float(c[0])) / 2.0 if eps is None else float(eps)
    bound = three_lines_bound(eps, nu)
    sup = sup_on_region(c, CircleDisk(1.0 - nu, nu))
    return VerificationRecord.build("three_lines_lower_bound", sup.value, sup.upper, bound,
                                    direction="ge", nu=nu, eps=eps)


def three_circle_check(coeffs, a):
    """Three-circle chain on ``B_{a,r}``: with ``D = D_{4a}(1-4a)``,

    ``sup_D |Q| <= sqrt(sup_{B_{a,1}} |Q|) * sqrt(sup_{B_{a,4}} |Q|)``, and,
    when ``sum|c| <= 2``, the coarser majorant
    ``sqrt(sup_{B_{a,1}} |Q|) * 2 sqrt(exp(9 a n))`` with ``n = deg Q``.
    Returns the list of records (one or two).
    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    c = np.asarray(getattr(coeffs, "c", coeffs), dtype=float)
    n = c.size - 1
    disk = sup_on_region(c, CircleDisk(1.0 - 4.0 * a, 4.0 * a))
    b1 = sup_on_region(c, EllipseB(a, 1.0))
    b4 = sup_on_region(c, EllipseB(a, 4.0))
    sups = {"sup_disk": disk.value, "sup_b1": b1.value, "sup_b4": b4.value}
    records = [
        VerificationRecord.build(
            "three_circle", disk.value, disk.upper,
            math.sqrt(b1.value * b4.value), bound_upper=math.sqrt(b1.upper * b4.upper),
            a=a, **sups,
        )
    ]
    if float(np.abs(c).sum()) <= 2.0 + 1e-9:
        major = 2.0 * math.sqrt(math.exp(9.0 * a * n))
        records.append(VerificationRecord.build(
            "three_circle_corollary", disk.value, disk.upper,
            math.sqrt(b1.value) * major, bound_upper=math.sqrt(b1.upper) * major,
            a=a, n=n, **sups,
        ))
    return records
