"""Point-mass estimation: symmetrized weight histograms and the l1-fit LP.

XOR-ing every sample with the target ``u`` moves ``D(u)`` to the all-zeros
string, and the Hamming weight of the shifted sample (count of visible ones
under erasure) is a sufficient statistic once coordinates are exchangeable.
The weight histogram ``qhat`` then approximates ``p @ A`` with ``p_0 = D(u)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import _kernels, lp
from .channel import build_channel_matrix, parse_bits
from .extremal import eta_exact
from .samples import pack_string

DELTA_MODES = ("oracle", "manual")
SAMPLE_CONSTANT = 16


class InsufficientSamples(ValueError):
    def __init__(self, have, need):
        self.have, self.need = have, need
        super().__init__(f"estimation needs at least {need} samples, batch has {have}")


@dataclass(frozen=True)
class EstimateReport:
    target: str
    estimate: float
    eps: float
    samples_used: int
    delta_used: float
    accuracy: float
    raw_estimate: float
    clamped: bool
    repetitions: int = 1
    delta_mode: str = "oracle"

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _as_fraction(x):
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    # the shortest decimal that round-trips, so 0.1 means 1/10
    return Fraction(repr(float(x)))


def required_samples(n, delta):
    """``ceil(16 (n + 1) / delta^2)``, evaluated exactly."""
    d = _as_fraction(delta)
    if not (0 < d < 1):
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    if int(n) < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return math.ceil(SAMPLE_CONSTANT * (int(n) + 1) / (d * d))


def boost_repetitions(n, eps):
    """Odd repetition count ``2 ceil(ln(3n/eps)) + 1`` for median boosting."""
    return 2 * math.ceil(math.log(3.0 * max(int(n), 1) / eps)) + 1


def symmetrized_counts(batch, cands, length=None):
    """Weight counts of ``(y XOR u)`` over the first ``length`` positions.

    ``cands`` is a list of bit strings (each of length ``length``); returns a
    ``(len(cands), length + 1)`` integer array.
    """
    length = batch.n if length is None else int(length)
    if not 1 <= length <= batch.n:
        raise ValueError(f"prefix length {length} outside 1..{batch.n}")
    W = batch.bits.shape[1]
    packed = np.zeros((len(cands), W), dtype=np.uint64)
    for k, u in enumerate(cands):
        if len(u) != length:
            raise ValueError(f"candidate {u!r} has length {len(u)}, expected {length}")
        row = pack_string(u)
        packed[k, : row.size] = row
    return _kernels.prefix_histograms(
        np.ascontiguousarray(batch.bits), np.ascontiguousarray(batch.vis), packed, length
    )


def project_and_symmetrize(batch, u):
    """Normalized weight histogram ``qhat`` of the batch shifted by ``u``."""
    u = u if isinstance(u, str) else "".join(str(int(b)) for b in parse_bits(u))
    if len(u) != batch.n:
        raise ValueError(f"target has length {len(u)}, samples have length {batch.n}")
    counts = symmetrized_counts(batch, [u])[0]
    return counts / counts.sum()


def fit_point_mass(qhat, channel):
    """Solve ``min_p ||qhat - pA||_1``; returns ``(p, residual)``."""
    sol = lp.solve_lp(lp.build_l1_fit_lp(channel, qhat))
    if not sol.optimal:
        raise lp.LpError(f"l1 fit LP ended {sol.status.value}")
    k = channel.n + 1
    return sol.x[:k], float(sol.objective)


def _clamp(x):
    y = min(1.0, max(0.0, x))
    return y, y != x


def oracle_delta(model, n, eps):
    """``eta(eps/2)`` at length ``n``: the l1 budget that buys accuracy ``2 eps``."""
    return eta_exact(model, n, eps / 2.0).eta


def resolve_delta(model, n, eps, delta_mode="oracle", delta=None):
    if delta_mode not in DELTA_MODES:
        raise ValueError(f"delta_mode must be one of {DELTA_MODES}, got {delta_mode!r}")
    if not (0.0 < eps < 0.5):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps!r}")
    if delta_mode == "manual":
        if delta is None:
            raise ValueError("manual delta mode needs an explicit delta")
        if not (0.0 < delta < 1.0):
            raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
        return float(delta)
    if delta is not None:
        raise ValueError("an explicit delta is only accepted in manual mode")
    return oracle_delta(model, n, eps)


def estimate_from_qhat(qhat, channel, target, eps, delta_used=float("nan"), samples_used=0,
                       delta_mode="oracle"):
    """Report for a single histogram already shifted by ``target``."""
    p, _ = fit_point_mass(qhat, channel)
    raw = float(p[0])
    est, clamped = _clamp(raw)
    return EstimateReport(target, est, eps, int(samples_used), float(delta_used), 2.0 * eps,
                          raw, clamped, 1, delta_mode)


def estimate_point_mass(batch, u, eps, delta_mode="oracle", delta=None, boost=False):
    """Estimate ``D(u)`` to accuracy ``2 eps`` from a noisy sample batch.

    ``delta_mode="oracle"`` sets ``delta = eta(eps/2)`` from the exact LP;
    ``"manual"`` uses the caller's ``delta``.  The batch must hold
    ``required_samples(n, delta)`` samples, times the repetition count
    ``2 ceil(ln(3n/eps)) + 1`` when ``boost`` asks for a median of
    independent sub-batch estimates.
    """
    u = u if isinstance(u, str) else "".join(str(int(b)) for b in parse_bits(u))
    if len(u) != batch.n:
        raise ValueError(f"target has length {len(u)}, samples have length {batch.n}")
    d = resolve_delta(batch.model, batch.n, eps, delta_mode, delta)
    per = required_samples(batch.n, d)
    reps = boost_repetitions(batch.n, eps) if boost else 1
    if len(batch) < per * reps:
        raise InsufficientSamples(len(batch), per * reps)
    channel = build_channel_matrix(batch.model, batch.n)
    parts = batch.split(reps) if reps > 1 else [batch]
    raws = []
    for part in parts:
        p, _ = fit_point_mass(project_and_symmetrize(part, u), channel)
        raws.append(float(p[0]))
    raw = float(np.median(raws))
    est, clamped = _clamp(raw)
    used = sum(len(part) for part in parts)
    return EstimateReport(u, est, eps, used, d, 2.0 * eps, raw, clamped, reps, delta_mode)
