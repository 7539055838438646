"""Exact eta, circle suprema, repeated-root polynomials and inequality checks."""

from .checks import (
    certificate_records,
    construction_records,
    erdelyi_record,
    sandwich_records,
)
from .eta import EtaReport, SandwichViolation, check_sandwich, eta_exact, noise_coefficients
from .inequalities import three_circle_check, three_lines_bound, three_lines_check
from .noise import (
    DeltaVector,
    NoisePolyValue,
    eval_noise_poly,
    mobius_w,
    modulus_factor,
    noise_poly_coeffs,
    random_delta,
)
from .regions import (
    Arc,
    CircleDisk,
    EllipseB,
    RegionSpec,
    Segment,
    SupResult,
    UnitCircle,
    poly_eval,
    sup_on_region,
)
from .roots import (
    RepeatedRootPoly,
    construct_repeated_root_poly,
    divided_difference_weights,
    erdelyi_T,
    verify_root_bounds,
)
from .theory import TheoryBounds, theory_bounds
from .verify import VerificationRecord, records_to_json

__all__ = [
    "Arc", "CircleDisk", "DeltaVector", "EllipseB", "EtaReport", "NoisePolyValue",
    "RegionSpec", "RepeatedRootPoly", "SandwichViolation", "Segment", "SupResult",
    "TheoryBounds", "UnitCircle", "VerificationRecord", "check_sandwich",
    "construct_repeated_root_poly", "divided_difference_weights", "erdelyi_T",
    "eta_exact", "eval_noise_poly", "mobius_w", "modulus_factor", "noise_coefficients",
    "noise_poly_coeffs", "poly_eval", "random_delta", "records_to_json", "sup_on_region",
    "theory_bounds", "certificate_records", "construction_records", "erdelyi_record",
    "sandwich_records", "three_circle_check", "three_lines_bound", "three_lines_check",
    "verify_root_bounds",
]
