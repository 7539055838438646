"""Scaling sweeps of the exact eta, least-squares fits, and recovery benchmarks."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._config import max_n
from .channel import NoiseKind, NoiseModel
from .extremal import eta_exact, theory_bounds
from .recover import recover_distribution
from .samples import PopulationSampler

CSV_HEADER = (
    "model", "nu", "eps", "n", "eta", "circle_sup",
    "exponent_bitflip_lo", "exponent_bitflip_hi", "exponent_erasure", "flag",
)
FLAG_OK = "ok"
FLAG_HYPOTHESIS = "hypothesis_unmet"
FLAG_FAILED = "failed"
FIT_MODES = ("power", "exponent")


@dataclass(frozen=True)
class SweepGrid:
    model: str
    ns: tuple
    epss: tuple
    nus: tuple
    seed: int = 0

    def __post_init__(self):
        kind = NoiseKind(self.model).value
        object.__setattr__(self, "model", kind)
        for name in ("ns", "epss", "nus"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise ValueError(f"sweep grid needs at least one value in {name}")
            object.__setattr__(self, name, vals)
        limit = max_n()
        if any(not (1 <= int(n) <= limit) for n in self.ns):
            raise ValueError(f"grid n values must lie in 1..{limit}")
        if any(not (0.0 < e < 0.5) for e in self.epss):
            raise ValueError("grid eps values must lie in (0, 1/2)")
        if any(not (0.0 < v <= 1.0) for v in self.nus):
            raise ValueError("grid nu values must lie in (0, 1]")

    def cells(self):
        return [(float(nu), float(eps), int(n))
                for nu in self.nus for eps in self.epss for n in self.ns]

    @classmethod
    def from_dict(cls, data):
        return cls(data["model"], tuple(int(v) for v in data["n"]),
                   tuple(float(v) for v in data["eps"]), tuple(float(v) for v in data["nu"]),
                   int(data.get("seed", 0)))


@dataclass(frozen=True)
class FitResult:
    predictor: str
    slope: float
    intercept: float
    r_squared: float
    residuals: tuple
    mode: str = "power"

    def to_dict(self):
        out = asdict(self)
        out["residuals"] = list(self.residuals)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _cell(model, nu, eps, n):
    row = {"model": model, "nu": nu, "eps": eps, "n": n}
    try:
        rep = eta_exact(NoiseModel(NoiseKind(model), nu), n, eps)
        th = theory_bounds(rep.model, n, eps)
    except Exception as exc:  # a failed cell is recorded, never fatal
        nan = float("nan")
        row.update(eta=nan, circle_sup=nan, exponent_bitflip_lo=nan, exponent_bitflip_hi=nan,
                   exponent_erasure=nan, flag=FLAG_FAILED, error=f"{type(exc).__name__}: {exc}")
        return row
    row.update(
        eta=rep.eta, circle_sup=rep.circle_sup,
        exponent_bitflip_lo=th.exponent_bitflip_lo, exponent_bitflip_hi=th.exponent_bitflip_hi,
        exponent_erasure=th.exponent_erasure,
        flag=FLAG_OK if th.hypothesis_met else FLAG_HYPOTHESIS,
    )
    return row


def _sort_key(row):
    return (row["model"], row["nu"], row["eps"], row["n"])


def scaling_sweep(grid, jobs=1):
    """One row per grid cell, sorted by ``(model, nu, eps, n)``."""
    cells = grid.cells()
    if jobs is None or jobs <= 1 or len(cells) == 1:
        rows = [_cell(grid.model, *c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=int(jobs)) as pool:
            futures = [pool.submit(_cell, grid.model, *c) for c in cells]
            rows = [f.result() for f in futures]
    return sorted(rows, key=_sort_key)


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([_fmt(row[k]) for k in CSV_HEADER])
    return buf.getvalue()


def read_sweep_csv(fh):
    rows = []
    for rec in csv.DictReader(fh):
        row = dict(rec)
        row["n"] = int(row["n"])
        for k in CSV_HEADER:
            if k not in ("model", "n", "flag"):
                row[k] = float(row[k])
        rows.append(row)
    return rows


def fit_power_law(xs, ys, mode="power", predictor="x"):
    """Least squares of ``ys`` on ``log(xs)`` (power mode) or on ``xs`` (exponent mode)."""
    if mode not in FIT_MODES:
        raise ValueError(f"mode must be one of {FIT_MODES}, got {mode!r}")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be vectors of equal length")
    if xs.size < 3:
        raise ValueError(f"a fit needs at least 3 points, got {xs.size}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("fit data must be finite")
    if np.any(xs <= 0):
        raise ValueError("predictors must be positive")
    u = np.log(xs) if mode == "power" else xs
    du = u - u.mean()
    sxx = float(du @ du)
    if sxx <= 1e-300 or np.ptp(u) == 0:
        raise ValueError("degenerate predictor: zero variance")
    slope = float(du @ (ys - ys.mean())) / sxx
    intercept = float(ys.mean() - slope * u.mean())
    res = ys - (intercept + slope * u)
    dy = ys - ys.mean()
    sst = float(dy @ dy)
    r2 = 1.0 if sst == 0 else min(1.0, max(0.0, 1.0 - float(res @ res) / sst))
    return FitResult(predictor, slope, intercept, r2, tuple(float(r) for r in res), mode)


RESPONSES = ("log_inv_eta", "loglog_inv_eta")
PREDICTORS = ("n", "inv_eps")


def fit_sweep(rows, predictor="n", response="log_inv_eta", mode="power"):
    """Fit a sweep column against ``n`` or ``1/eps``, skipping flagged rows.

    ``log_inv_eta`` is ``log(1/eta)``; ``loglog_inv_eta`` is
    ``log(log(1/eta))``, whose power-law slope is the exponent ``a`` in
    ``log(1/eta) ~ n^a``.
    """
    if predictor not in PREDICTORS:
        raise ValueError(f"predictor must be one of {PREDICTORS}, got {predictor!r}")
    if response not in RESPONSES:
        raise ValueError(f"response must be one of {RESPONSES}, got {response!r}")
    xs, ys = [], []
    for row in rows:
        if row["flag"] != FLAG_OK:
            continue
        y = math.log(1.0 / row["eta"])
        if response == "loglog_inv_eta":
            y = math.log(y)
        xs.append(row["n"] if predictor == "n" else 1.0 / row["eps"])
        ys.append(y)
    return fit_power_law(xs, ys, mode=mode, predictor=f"{response}~{predictor}")


@dataclass(frozen=True)
class RecoveryTrial:
    seed: int
    success: bool
    max_error: float
    reported: tuple
    samples: int
    seconds: float
    error: str = ""


@dataclass
class RecoveryBenchmark:
    trials: list = field(default_factory=list)

    @property
    def successes(self):
        return sum(t.success for t in self.trials)

    def to_dict(self):
        return {"successes": self.successes, "trials": [asdict(t) for t in self.trials]}


def recovery_benchmark(strings, probs, model, eps, seeds):
    """Run recovery per seed; success means the reported support is exactly the
    strings of mass at least ``eps`` and each reported mass is within ``2 eps``."""
    truth = dict(zip(strings, probs))
    heavy = {x for x, p in truth.items() if p >= eps}
    bench = RecoveryBenchmark()
    n = len(strings[0])
    for seed in seeds:
        sampler = PopulationSampler(list(strings), list(probs), model, seed=int(seed))
        t0 = time.perf_counter()
        try:
            res = recover_distribution(sampler, model, n, eps)
        except Exception as exc:
            bench.trials.append(RecoveryTrial(int(seed), False, float("inf"), (),
                                              sampler.drawn, time.perf_counter() - t0,
                                              f"{type(exc).__name__}: {exc}"))
            continue
        got = res.as_dict()
        err = max((abs(p - truth.get(x, 0.0)) for x, p in got.items()), default=0.0)
        ok = set(got) == heavy and err <= 2.0 * eps
        bench.trials.append(RecoveryTrial(int(seed), ok, float(err), res.entries, sampler.drawn,
                                          time.perf_counter() - t0))
    return bench
