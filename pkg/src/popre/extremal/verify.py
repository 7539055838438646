"""Verification records for numerically checked inequalities."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class VerificationRecord:
    """One checked inequality ``measured <= bound`` (or ``>=``).

    ``measured`` is an attained value and ``measured_upper`` a certified
    upper bound on the true quantity; ``bound``/``bound_upper`` bracket the
    right-hand side the same way when it is itself a computed supremum.  An
    inequality is *violated* only when the evidence is conclusive (for
    ``le``: the attained value already exceeds every admissible bound); it
    is *certified* when even the worst case allowed by the discretization
    error satisfies it.
    """

    name: str
    measured: float
    measured_upper: float
    bound: float
    direction: str = "le"
    bound_upper: float | None = None
    details: dict = field(default_factory=dict)

    @classmethod
    def build(cls, name, measured, measured_upper, bound, direction="le", bound_upper=None,
              **details):
        if direction not in ("le", "ge"):
            raise ValueError(f"direction must be 'le' or 'ge', got {direction!r}")
        bu = float(bound) if bound_upper is None else float(bound_upper)
        return cls(name, float(measured), float(measured_upper), float(bound), direction, bu,
                   details)

    @property
    def slack(self):
        """Margin in the worst case; positive means certified."""
        if self.direction == "le":
            return self.bound - self.measured_upper
        return self.measured - self.bound

    @property
    def violated(self):
        if self.direction == "le":
            return self.measured > self.bound_upper
        return self.measured_upper < self.bound

    @property
    def certified(self):
        return self.slack >= 0

    def to_dict(self):
        return {
            "name": self.name,
            "measured": self.measured,
            "measured_upper": self.measured_upper,
            "bound": self.bound,
            "bound_upper": self.bound_upper,
            "direction": self.direction,
            "slack": self.slack,
            "certified": self.certified,
            "violated": self.violated,
            **{k: v for k, v in self.details.items()},
        }


def records_to_json(records):
    return json.dumps([r.to_dict() for r in records], indent=2)
