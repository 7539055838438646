"""Acceptance criteria, each with its tolerance and runtime limit."""

import math
from fractions import Fraction

import numpy as np
import pytest

from _oracles import eta_grid_search, random_lp, vertex_enumeration
from popre.channel import NoiseModel, build_channel_matrix
from popre.estimate import estimate_from_qhat, symmetrized_counts
from popre.experiments import SweepGrid, fit_sweep, recovery_benchmark, scaling_sweep
from popre.extremal import (
    RepeatedRootPoly,
    construct_repeated_root_poly,
    erdelyi_T,
    erdelyi_record,
    eta_exact,
    random_delta,
    sandwich_records,
    three_circle_check,
    three_lines_check,
    verify_root_bounds,
)
from popre.lp import max_violation, solve_lp
from popre.samples import PopulationSampler

pytestmark = pytest.mark.slow
NUS = [round(0.1 * k, 1) for k in range(1, 10)]
MODELS = ["bitflip", "erasure"]


def test_criterion_01_channel(criterion):
    c = criterion(1, "channel matrices and sampling", 60)
    with c.run():
        worst_tv = 0.0
        for kind in MODELS:
            for nu in NUS:
                model = NoiseModel(kind, nu)
                for n in range(1, 33):
                    a = build_channel_matrix(model, n).a
                    assert np.all(a >= 0)
                    assert np.abs(a.sum(axis=1) - 1).max() <= 1e-10
                    if kind == "erasure":
                        assert np.all(np.triu(a, 1) == 0)
                    else:
                        assert np.abs(a - a[::-1, ::-1]).max() <= 1e-10
                    for i in sorted({0, n // 2, n}):
                        x = "1" * i + "0" * (n - i)
                        batch = PopulationSampler([x], [1.0], model, seed=n * 10 + i)(100_000)
                        hist = symmetrized_counts(batch, ["0" * n])[0] / 100_000
                        worst_tv = max(worst_tv, 0.5 * np.abs(hist - a[i]).sum())
        c.note(f"max TV {worst_tv:.4f}")
        assert worst_tv <= 0.02


def test_criterion_02_lp(criterion):
    c = criterion(2, "simplex vs vertex enumeration", 60)
    with c.run():
        rng = np.random.default_rng(2)
        counts = {"optimal": 0, "infeasible": 0, "unbounded": 0}
        worst = 0.0
        for k in range(500):
            P = random_lp(rng, k)
            status, value = vertex_enumeration(P)
            sol = solve_lp(P)
            assert sol.status.value == status, f"LP {k}: {sol.status.value} vs {status}"
            counts[status] += 1
            if status == "optimal":
                worst = max(worst, abs(sol.objective - value))
                assert max_violation(P, sol.x) <= 1e-8
        c.note(f"{counts}, max gap {worst:.1e}")
        assert worst <= 1e-6
        assert min(counts.values()) > 0


def test_criterion_03_eta_oracle(criterion):
    c = criterion(3, "eta vs brute-force grid", 120)
    with c.run():
        worst = 0.0
        for kind in MODELS:
            for nu in (0.2, 0.5, 0.8):
                model = NoiseModel(kind, nu)
                for n in (1, 2, 3):
                    for eps in (0.05, 0.1):
                        eta = eta_exact(model, n, eps).eta
                        grid = eta_grid_search(build_channel_matrix(model, n).a, eps)
                        worst = max(worst, abs(eta - grid))
            for n in (1, 3, 8, 16):
                for eps in (0.05, 0.1, 0.3):
                    assert abs(eta_exact(NoiseModel(kind, 1.0), n, eps).eta - 4 * eps) <= 1e-8
        c.note(f"max |eta - grid| {worst:.1e}")
        assert worst <= 1e-3


def test_criterion_04_sandwich(criterion):
    c = criterion(4, "circle sandwich on random certificates", 120)
    with c.run():
        rng = np.random.default_rng(4)
        violations = 0
        for kind in MODELS:
            for _ in range(200):
                model = NoiseModel(kind, float(rng.uniform(0.1, 0.9)))
                delta = random_delta(32, rng, concentration=float(rng.choice([0.2, 1.0])))
                violations += sum(r.violated for r in sandwich_records(delta, model, 32))
        c.note(f"{violations} violations in 800 checks")
        assert violations == 0


def _as_root_poly(coeffs):
    """Exact-sum copy of a certificate, usable as a one-root polynomial."""
    exact = [Fraction(float(v)) for v in coeffs]
    exact[-1] -= sum(exact)
    floats = np.array([float(v) for v in exact])
    return RepeatedRootPoly(floats, len(exact) - 1, 1, abs(floats[0]), tuple(exact))


def test_criterion_05_inequalities(criterion):
    c = criterion(5, "segment, arc, three-circle and three-lines bounds", 300)
    with c.run():
        records, equalities = [], []
        for M in range(1, 201):
            Ts = {erdelyi_T(M, 0.02), erdelyi_T(M, 0.05), min(2, M)}
            for T in sorted(Ts):
                poly = construct_repeated_root_poly(M, T)
                records += verify_root_bounds(poly, T)
                circle = three_circle_check(poly.coeffs, 0.05)
                # T = 0 gives a constant, where the three-circle bound is an equality
                (records if T >= 1 else equalities).extend(circle)
                if T >= 1:
                    records.append(three_lines_check(poly.coeffs, 0.3))
        rng = np.random.default_rng(5)
        for _ in range(100):
            delta = random_delta(int(rng.integers(4, 40)), rng)
            records += verify_root_bounds(_as_root_poly(delta.c), 1)
            records += three_circle_check(delta.c, float(rng.uniform(0.01, 0.06)))
            records.append(three_lines_check(delta.c, float(rng.uniform(0.05, 0.49))))
        for kind_nu in (0.2, 0.3, 0.4):
            rep = eta_exact(NoiseModel("erasure", kind_nu), 16, 0.1)
            records.append(three_lines_check(rep.certificate, kind_nu))
        slack = {}
        for r in records:
            slack[r.name] = min(slack.get(r.name, math.inf), r.slack)
        c.note(f"{len(records)} records, min slack "
               + ", ".join(f"{k}={v:.3g}" for k, v in sorted(slack.items())))
        c.note(f"{len(equalities)} equality cases certified")
        assert not any(r.violated for r in records + equalities)
        assert all(v > 0 for v in slack.values())
        assert all(r.certified for r in equalities)


def test_criterion_06_erdelyi(criterion):
    c = criterion(6, "Erdelyi ratio guarantee", 120)
    with c.run():
        ratios = []
        for M in (25, 49, 100):
            for L in (0.02, 0.05):
                T = math.floor(2 / 7 * math.sqrt(M * math.log(1 / L)))
                assert T == erdelyi_T(M, L)
                poly = construct_repeated_root_poly(M, T)
                rec = erdelyi_record(poly, L)
                ratios.append(round(poly.ratio(), 3))
                assert poly.root_multiplicity() >= T
                assert abs(poly.coeffs[0]) >= L * poly.tail_length()
                assert not rec.violated
        c.note(f"ratios {ratios}")


def test_criterion_07_erasure_scaling(criterion):
    c = criterion(7, "erasure eta scaling in 1/eps", 300)
    with c.run():
        rows = scaling_sweep(SweepGrid("erasure", (64,), (0.1, 0.05, 0.025, 0.0125), (0.2,)))
        assert all(r["flag"] == "ok" for r in rows)
        fit = fit_sweep(rows, predictor="inv_eps", response="log_inv_eta", mode="power")
        c.note(f"slope {fit.slope:.3f}, R^2 {fit.r_squared:.4f}, "
               "eta " + ", ".join(format(r["eta"], ".3g") for r in rows))
        assert 1.0 <= fit.slope <= 10.0
        assert fit.r_squared >= 0.95


def test_criterion_08_bitflip_scaling(criterion):
    c = criterion(8, "bit-flip eta scaling in n", 600)
    with c.run():
        rows = scaling_sweep(SweepGrid("bitflip", (16, 24, 32, 48, 64), (0.01,), (0.5,)))
        assert all(r["flag"] == "ok" for r in rows)
        fit = fit_sweep(rows, predictor="n", response="loglog_inv_eta", mode="power")
        c.note(f"slope {fit.slope:.3f}, R^2 {fit.r_squared:.4f}, "
               "eta " + ", ".join(format(r["eta"], ".3g") for r in rows))
        assert 0.2 <= fit.slope <= 0.5
        assert fit.r_squared >= 0.9


def test_criterion_09_recovery(criterion):
    c = criterion(9, "end-to-end recovery over 20 seeds", 600)
    with c.run():
        strings = ["0000000000", "1111100000", "1010101010"]
        bench = recovery_benchmark(strings, [0.5, 0.3, 0.2], NoiseModel("bitflip", 0.7), 0.15,
                                   seeds=range(20))
        worst = max(t.max_error for t in bench.trials)
        c.note(f"{bench.successes}/20 successes, max error {worst:.4f}")
        assert bench.successes >= 18


def test_criterion_10_certificate_consistency(criterion):
    c = criterion(10, "certificate pair and estimator soundness", 120)
    with c.run():
        rng = np.random.default_rng(10)
        n = 16
        worst_eta, worst_est = 0.0, 0.0
        for _ in range(50):
            model = NoiseModel(str(rng.choice(MODELS)), float(rng.uniform(0.3, 0.95)))
            eps = float(rng.uniform(0.03, 0.2))
            rep = eta_exact(model, n, eps)
            ch = build_channel_matrix(model, n)
            p, p2 = rep.certificate.split()
            q, q2 = p @ ch.a, p2 @ ch.a
            worst_eta = max(worst_eta, abs(np.abs(q - q2).sum() - rep.eta))
            delta = rep.eta / 2
            # the midpoint is delta away from both pushforwards: the hardest histogram
            r = rng.dirichlet(np.ones(n + 1))
            shift = 0.999 * delta / np.abs(r - q).sum()
            for qhat in ((q + q2) / 2, (1 - shift) * q + shift * r):
                assert np.abs(qhat - q).sum() <= delta + 1e-8
                est = estimate_from_qhat(qhat, ch, "0" * n, eps).raw_estimate
                worst_est = max(worst_est, abs(est - p[0]) - 2 * eps)
        c.note(f"max |l1 - eta| {worst_eta:.1e}, max excess over 2eps {worst_est:.1e}")
        assert worst_eta <= 1e-8
        assert worst_est <= 1e-9
