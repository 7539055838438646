"""Bundles of verification records for certificates and constructions."""

from __future__ import annotations

import math

import numpy as np

from ..channel import NoiseKind, build_channel_matrix
from .eta import SANDWICH_RTOL, eta_exact
from .inequalities import three_circle_check, three_lines_check
from .regions import UnitCircle, sup_on_region
from .roots import construct_repeated_root_poly, erdelyi_T, verify_root_bounds
from .verify import VerificationRecord

DEFAULT_A = 0.05
DEFAULT_L = 0.05


def sandwich_records(c, model, n, rtol=SANDWICH_RTOL):
    """``sup_circle |F| <= ||cA||_1 <= sqrt(n+1) sup_circle |F|`` as two records.

    Both sides allow the grid-error certificate of the supremum plus a
    relative slack ``rtol`` on the l1 norm.
    """
    c = np.asarray(getattr(c, "c", c), dtype=float)
    coeffs = c @ build_channel_matrix(model, n).a
    l1 = float(np.abs(coeffs).sum())
    sup = sup_on_region(coeffs, UnitCircle())
    root = math.sqrt(n + 1)
    return (
        VerificationRecord.build("sandwich_lower", sup.value, sup.upper,
                                 l1 * (1.0 + rtol) + 1e-15, direction="le", l1=l1, n=n),
        VerificationRecord.build("sandwich_upper", root * sup.value, root * sup.upper,
                                 l1 * (1.0 - rtol) - 1e-15, direction="ge", l1=l1, n=n),
    )


def erdelyi_record(poly, L):
    """``|a_0| >= L sum_{j>=1} |a_j|`` for a repeated-root construction."""
    tail = poly.tail_length()
    a0 = abs(float(poly.coeffs[0]))
    return VerificationRecord.build("erdelyi_ratio", a0, a0, L * tail, direction="ge",
                                    M=poly.M, T=poly.T, L=L, ratio=a0 / tail)


def certificate_records(model, n, eps, a=DEFAULT_A):
    """Checks on the optimal eta certificate at ``(model, n, eps)``."""
    rep = eta_exact(model, n, eps)
    c = np.asarray(rep.certificate.c)
    out = list(sandwich_records(c, model, n))
    if model.kind is NoiseKind.ERASURE and model.nu < 0.5:
        out.append(three_lines_check(c, model.nu))
    out.extend(three_circle_check(c, a))
    return out


def construction_records(M, L=DEFAULT_L, T=None):
    """Root-bound and ratio checks for ``construct_repeated_root_poly(M, T)``."""
    T = erdelyi_T(M, L) if T is None else int(T)
    poly = construct_repeated_root_poly(M, T)
    out = list(verify_root_bounds(poly, T))
    if T == erdelyi_T(M, L):
        out.append(erdelyi_record(poly, L))
    return out
