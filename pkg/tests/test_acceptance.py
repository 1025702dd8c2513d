"""One test per acceptance criterion, each printing a single PASS/FAIL line."""

import time

import numpy as np
import pytest

from brlab import calculus, estimators, models, symbols
from brlab import space as sp
from brlab.bench import scenarios
from brlab.bench.config import parse_spec
from brlab.bench.runner import record_json, run_spec, strip_timing


def test_subordination_identity(verdict):
    t0 = time.perf_counter()
    worst = scenarios.subordination_max_residual(R_list=(1.0, 2.0), n_m=9)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed <= 10.0
    verdict("subordination identity", ok, f"residual={worst:.2e} time={elapsed:.2f}s")
    assert len(scenarios.subordination_grid()) == 25
    assert ok


def test_dyadic_reconstruction(verdict):
    err = scenarios.dyadic_max_error(rhos=(0.5, 1.0, 2.0), k_max=20)
    ok = err <= 1e-5
    verdict("dyadic reconstruction", ok, f"max error={err:.2e}")
    assert ok


def test_phi_delta_reconstruction_and_decay(verdict):
    rows = []
    for delta in (1 / 4, 1 / 8, 1 / 16):
        err, fit = scenarios.phi_delta_report(delta)
        rows.append((delta, err, fit.exponent))
    ok = all(err <= 1e-6 and slope <= -4 for _, err, slope in rows)
    detail = " ".join(f"delta={d:g}:err={e:.1e},slope={s:.1f}" for d, e, s in rows)
    verdict("phi_delta pieces", ok, detail)
    assert ok


def test_partition_identities(verdict):
    errs = scenarios.partition_errors(np.random.default_rng(2024), n=1000)
    ok = max(errs.values()) <= 1e-12
    verdict("partitions of unity", ok, " ".join(f"{k}={v:.1e}" for k, v in errs.items()))
    assert ok


L2_LAW_MODELS = {
    "torus-1d": lambda: models.torus_model(1, 32, 128),
    "torus-2d": lambda: models.torus_model(2, 8, 32),
    "interval-dirichlet": lambda: models.interval_dirichlet_model(32, 129),
    "hermite-1d": lambda: models.hermite_model(1, 64, 16.0, 400),
    "bessel-radial": lambda: models.bessel_model(3, 0.0, 20, 1.0, 200, allow_experimental=True),
}


def test_square_function_l2_law(verdict):
    deltas = [2.0 ** -k for k in range(2, 7)]
    consts = [calculus.tdelta_l2_constant(d) for d in deltas]
    rng = np.random.default_rng(7)
    worst = {}
    for name, build in L2_LAW_MODELS.items():
        m = build()
        err = 0.0
        for d, c in zip(deltas, consts):
            for _ in range(20):
                f = models.random_band_limited(m, rng, zero_mode=False)
                T = calculus.square_Tdelta(m, d, f)
                err = max(err, abs(sp.lp_norm(m.space, T, 2) / sp.lp_norm(m.space, f, 2) - c))
        worst[name] = err
    slope = np.polyfit(np.log(deltas), np.log(consts), 1)[0]
    ok = max(worst.values()) <= 1e-6 and abs(slope - 0.5) <= 0.02
    verdict("T_delta L2 law", ok,
            f"max error={max(worst.values()):.1e} delta-slope={slope:.4f}")
    assert ok


def test_finite_speed_of_propagation(verdict):
    t_list = [0.2, 0.5, 1.0]
    rows = []
    for coarse, fine in (
        (models.torus_model(1, 128, 512), models.torus_model(1, 256, 1024)),
        (models.interval_dirichlet_model(128, 513), models.interval_dirichlet_model(256, 1025)),
    ):
        a = [r["relative_mass"] for r in estimators.check_fs(coarse, t_list)["rows"]]
        b = [r["relative_mass"] for r in estimators.check_fs(fine, t_list)["rows"]]
        rows.append((coarse.model_kind, max(a), all(y <= x / 2 for x, y in zip(a, b))))
    ok = all(m <= 1e-6 and halves for _, m, halves in rows)
    detail = " ".join(f"{k}:mass={m:.1e},halves={h}" for k, m, h in rows)
    verdict("finite speed of propagation", ok, detail)
    assert ok


def test_net_overlap(verdict):
    rows = []
    for dims, n_pts in ((1, 200), (2, 40)):
        space = sp.uniform_grid("torus-periodic", n_pts, dims)
        h = space.min_spacing
        for k in (1, 3, 9):
            rows.append(scenarios.net_report(space, 10 * h * k) | {"dims": dims})
    ok = all(r["separated"] and r["covering"] and r["partition"] and r["K"] <= 41 ** r["dims"]
             for r in rows)
    verdict("net invariants and overlap", ok,
            " ".join(f"n={r['dims']}:K={r['K']}" for r in rows))
    assert ok


def test_cluster_estimates(verdict):
    herm = models.hermite_model(1, 64, 16.0, 400)
    worst = 0.0
    for k in range(41):
        modes = estimators.cluster_modes(herm, 2 * k + 1, "L")
        assert modes.size == 1
        b = estimators.cluster_norm(herm, 1.0, modes)
        h = herm.basis[:, modes[0]]
        exact = sp.lp_norm(herm.space, h, np.inf) ** 2
        worst = max(worst, abs(b.lower - exact) / exact, abs(b.upper - exact) / exact)
    torus = models.torus_model(1, 80, 400)
    fit = estimators.cluster_constant(torus, 1.0, [float(x) for x in range(0, 65, 4)], "sqrtL")
    spread = fit.meta["constant_spread"]
    ok = worst <= 1e-8 and spread <= 2.0 * (1 + 1e-12)
    verdict("spectral cluster estimates", ok,
            f"hermite closed-form error={worst:.1e} torus constant spread={spread:.3f}")
    assert ok


@pytest.mark.slow
def test_maximal_threshold_sweep(verdict):
    t0 = time.perf_counter()
    fits = estimators.maximal_threshold_sweep(
        64.0, [0.1, 0.8], [64, 128, 256, 512], scenarios.SWEEP_FACTORIES["torus-1d"], seed=1)
    elapsed = time.perf_counter() - t0
    cls = {a: f.meta["classification"] for a, f in fits.items()}
    ok = cls[0.8] == "flat" and cls[0.1] == "growing" and elapsed <= 300
    verdict("maximal threshold sweep", ok,
            " ".join(f"alpha={a}:{c}(slope={fits[a].exponent:.3f}+-{fits[a].stderr:.3f})"
                     for a, c in cls.items()) + f" time={elapsed:.1f}s")
    assert ok


def test_mellin_machinery(verdict):
    err = scenarios.mellin_reconstruction_error(512.0)
    u_list = [16, 32, 64, 128, 256]
    smooth = symbols.mellin_weight_growth(scenarios.br_profile(1.0), 0.5, u_list)
    rough = symbols.mellin_weight_growth(scenarios.br_profile(0.3), 0.5, u_list)
    monotone = bool(np.all(np.diff(rough["values"]) > 0))
    ok = (err <= 1e-6 and smooth["verdict"] == "convergent"
          and rough["verdict"] == "divergent" and monotone)
    verdict("Mellin machinery", ok,
            f"reconstruction={err:.1e} alpha=1:{smooth['verdict']} "
            f"alpha=0.3:{rough['verdict']}")
    assert ok


def test_weighted_square_function(verdict):
    m = models.torus_model(1, 32, 128)
    deltas = [1.0, 0.25, 0.125, 0.0625, 0.03125]
    rep = scenarios.weighted_square_run(m, deltas, 6, 2.0, 1.0, np.random.default_rng(11))
    rng = np.random.default_rng(12)
    worst = 0.0
    for d in deltas:
        c2 = calculus.tdelta_operator_norm(m, d) ** 2
        for _ in range(2):
            f = models.random_band_limited(m, rng, zero_mode=False)
            lhs, rhs = estimators.weighted_square_sides(m, d, f, np.ones(m.space.size), 1.0)
            worst = max(worst, abs(lhs / rhs - c2))
    ok = rep["violations"] == 0 and worst <= 1e-6
    verdict("weighted square function", ok,
            f"violations={rep['violations']} unit-weight error={worst:.1e}")
    assert ok


def test_determinism_across_workers(verdict):
    spec = parse_spec(scenarios.SCENARIOS["verify-identities"].default_config())
    one = record_json(strip_timing(run_spec(spec, workers=1)))
    eight = record_json(strip_timing(run_spec(spec, workers=8)))
    again = record_json(strip_timing(run_spec(spec, workers=1)))
    ok = one == eight == again
    verdict("determinism", ok, f"record bytes={len(one)} identical={ok}")
    assert ok
