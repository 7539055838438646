"""Branch-and-prune recovery of the heavy strings of a noisy population.

Stage ``i`` extends every surviving ``(i-1)``-bit prefix by one bit and
estimates the marginal mass of each extension on the first ``i`` positions.
Product noise restricted to a set of positions is the same noise model on
that set, so the point-mass estimator runs unchanged at dimension ``i``.

Samples are streamed: every stage draws fresh sub-batches in chunks, each
chunk is reduced to per-candidate weight counts immediately, and all
candidates of a stage share the same sub-batches.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import build_channel_matrix
from .estimate import (
    boost_repetitions,
    fit_point_mass,
    required_samples,
    resolve_delta,
    symmetrized_counts,
)

CHUNK = 1 << 20


class EnumerationOverflow(RuntimeError):
    """A stage kept more prefixes than the heavy-hitter count allows."""

    def __init__(self, stage, size, limit):
        self.stage, self.size, self.limit = stage, size, limit
        super().__init__(
            f"enumeration overflow at stage {stage}: {size} prefixes survive, limit {limit}"
        )


@dataclass(frozen=True)
class PrefixSet:
    prefixes: tuple
    stage: int
    estimates: tuple = ()

    def __post_init__(self):
        if len(set(self.prefixes)) != len(self.prefixes):
            raise ValueError("prefix set has duplicates")
        if any(len(x) != self.stage for x in self.prefixes):
            raise ValueError(f"every prefix must have length {self.stage}")

    def __len__(self):
        return len(self.prefixes)

    def __iter__(self):
        return iter(self.prefixes)

    def __contains__(self, x):
        return x in self.prefixes


@dataclass(frozen=True)
class RecoveryResult:
    """Reported ``(string, probability)`` pairs plus every final estimate."""

    entries: tuple
    eps: float
    candidates: tuple = field(default=(), repr=False)
    history: tuple = field(default=(), repr=False)

    def as_dict(self):
        return dict(self.entries)

    def refilter(self, eps):
        """Entries that the same final estimates would report at threshold ``eps``."""
        kept = tuple((x, p) for x, p in self.candidates if p >= eps)
        return RecoveryResult(kept, float(eps), self.candidates, self.history)

    def to_dict(self):
        return {"eps": self.eps, "entries": [{"x": x, "p": p} for x, p in self.entries]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data):
        entries = tuple((str(e["x"]), float(e["p"])) for e in data["entries"])
        return cls(entries, float(data["eps"]), entries)


def _check_eps(eps):
    if not (0.0 < eps < 0.5):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps!r}")


def size_limit(eps):
    """Abort threshold ``2 ceil(2/eps)`` on the number of surviving prefixes."""
    return 2 * math.ceil(2.0 / eps)


def estimate_candidates(sampler, model, cands, length, eps, *, boost=True,
                        delta_mode="oracle", delta=None, chunk=CHUNK):
    """Median-of-sub-batch estimates of the marginal mass of each candidate.

    ``eps`` is the estimator parameter (accuracy ``2 eps``).  Returns the
    raw medians (unclamped) and the number of samples drawn.
    """
    cands = list(cands)
    if not cands:
        return np.zeros(0), 0
    d = resolve_delta(model, length, eps, delta_mode, delta)
    per = required_samples(length, d)
    reps = boost_repetitions(length, eps) if boost else 1
    channel = build_channel_matrix(model, length)
    raws = np.empty((reps, len(cands)))
    for r in range(reps):
        counts = np.zeros((len(cands), length + 1), dtype=np.int64)
        left = per
        while left:
            m = min(left, chunk)
            counts += symmetrized_counts(sampler(m), cands, length)
            left -= m
        for k in range(len(cands)):
            p, _ = fit_point_mass(counts[k] / per, channel)
            raws[r, k] = p[0]
    return np.median(raws, axis=0), per * reps


def enumerate_heavy_hitters(sampler, model, n, eps, *, boost=True, delta_mode="oracle",
                            delta=None, chunk=CHUNK):
    """Prefixes of length ``n`` that contain every string of mass ``>= eps``.

    Each stage estimates to accuracy ``eps/4`` and keeps the extensions
    whose estimate is at least ``3 eps / 4``.
    """
    _check_eps(eps)
    n = int(n)
    if getattr(sampler, "n", n) != n:
        raise ValueError(f"sampler produces length {sampler.n}, expected {n}")
    limit = size_limit(eps)
    current = PrefixSet(("",), 0)
    history = []
    for i in range(1, n + 1):
        cands = [x + b for x in current for b in "01"]
        est, _ = estimate_candidates(sampler, model, cands, i, eps / 8.0, boost=boost,
                                     delta_mode=delta_mode, delta=delta, chunk=chunk)
        keep = [(x, float(v)) for x, v in zip(cands, est) if v >= 0.75 * eps]
        current = PrefixSet(tuple(x for x, _ in keep), i, tuple(v for _, v in keep))
        history.append(current)
        if len(current) > limit:
            raise EnumerationOverflow(i, len(current), limit)
        if not current.prefixes:
            # nothing heavy: the empty set is already final
            return PrefixSet((), n), tuple(history)
    return current, tuple(history)


def recover_distribution(sampler, model, n, eps, *, boost=True, delta_mode="oracle",
                         delta=None, chunk=CHUNK):
    """Enumerate heavy strings, re-estimate each to accuracy ``eps/2``, keep those ``>= eps``."""
    survivors, history = enumerate_heavy_hitters(
        sampler, model, n, eps, boost=boost, delta_mode=delta_mode, delta=delta, chunk=chunk
    )
    cands = list(survivors)
    est, _ = estimate_candidates(sampler, model, cands, int(n), eps / 4.0, boost=boost,
                                 delta_mode=delta_mode, delta=delta, chunk=chunk)
    final = tuple((x, min(1.0, max(0.0, float(v)))) for x, v in zip(cands, est))
    entries = tuple((x, p) for x, p in final if p >= eps)
    return RecoveryResult(entries, float(eps), final, history)
