"""Acceptance gate: one test per shipped guarantee, full stated sizes.

Each test prints one PASS/FAIL line with the measured values, then asserts.
All stochastic criteria run at the documented sizes and tolerances under the
fixed acceptance seed; nothing here is tuned per seed.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from resband.cli import main
from resband.laws import (
    FiniteSupportLaw,
    FixedCount,
    GeometricLaw,
    GeometricTailLaw,
    law_from_q,
    law_under_q,
)
from resband.model import ModelParams, scale_fn
from resband.montecarlo import (
    ExperimentConfig,
    LawSpec,
    compare_samples,
    run_compare,
    run_sweep,
    validate_htransform,
    validate_martingale,
    validate_optimality,
    validate_pn,
)
from resband.simulate import SimConfig, simulate_path
from resband.strategy import (
    Phase,
    PhaseState,
    classic_strategy,
    conditioned_drift,
    martingale_value,
    mixture_weight,
    optimal_strategy_fixed,
    optimal_strategy_random,
    project_unit,
    strategy_grid,
)

SEED = 20260819
DEFAULT_BETA = (0.1, 0.1, 0.2, 0.2, 0.2, 0.1, 0.1)


def report(criterion: str, ok: bool, detail: str) -> None:
    state = "PASS" if ok else "FAIL"
    print(f"acceptance {criterion}: {state} [{detail}]")
    assert ok, f"{criterion}: {detail}"


@pytest.fixture(scope="module")
def params() -> ModelParams:
    return ModelParams.from_log_band(
        mu0=0.1, sigma=0.15, r=0.02, alpha=1.0, epsilon=0.3
    )


def default_law_config(n_paths: int) -> ExperimentConfig:
    return ExperimentConfig(
        seed=SEED,
        n_paths=n_paths,
        law=LawSpec(kind="finite", beta=DEFAULT_BETA),
    )


def test_criterion_01_parameter_derivation(params):
    d_mu = abs(params.mu - 0.5916)
    d_p = abs(params.p - 0.1165)
    ok = d_mu <= 5e-4 and d_p <= 5e-4
    report(
        "criterion 1 (parameter derivation)",
        ok,
        f"mu={params.mu:.6f} (|d|={d_mu:.2e}), p={params.p:.6f} (|d|={d_p:.2e})",
    )


def test_criterion_02_crossing_probability_law(params):
    rep = validate_pn(params, SimConfig(seed=SEED), n_max=2, n_paths=100_000)
    zs = {c.n: c.z for c in rep.checks}
    ok = rep.passed and abs(zs[1]) <= 3.0 and abs(zs[2]) <= 3.0
    report(
        "criterion 2 (P(A_n) = p^n, 1e5 paths)",
        ok,
        f"z(n=1)={zs[1]:+.2f}, z(n=2)={zs[2]:+.2f}, anomalies={rep.anomalies}",
    )


def test_criterion_03_htransform_durations(params):
    rep = validate_htransform(params, SimConfig(seed=SEED), n_samples=10_000)
    ok = (
        rep.passed
        and abs(rep.mean_z) < 3.0
        and abs(rep.var_z) < 3.0
        and rep.ecdf_distance < 0.03
        and abs(rep.rate_z) <= 3.0
    )
    report(
        "criterion 3 (h-transform durations, 1e4 each)",
        ok,
        f"mean_z={rep.mean_z:+.2f}, var_z={rep.var_z:+.2f}, "
        f"ecdf={rep.ecdf_distance:.4f}, rate_z={rep.rate_z:+.2f}, "
        f"dropped={rep.dropped_conditioned}",
    )


def test_criterion_04_martingale_property(params):
    rep = validate_martingale(
        params, SimConfig(seed=SEED), n=2, times=(0.5, 1.0, 2.0), n_paths=100_000
    )
    zs = ", ".join(f"z(t={c.t})={c.z:+.2f}" for c in rep.checks)
    ok = rep.passed and all(abs(c.z) <= 3.0 for c in rep.checks)
    report(
        "criterion 4 (martingale mean of M_t^2, 1e5 paths)",
        ok,
        f"{zs}, anomalies={rep.anomalies}",
    )


def test_criterion_05_strategy_structure(params):
    pi_c = classic_strategy(params)
    law = FiniteSupportLaw(law_from_q(DEFAULT_BETA, params.p))

    up_free_exact = True
    down_strict = True
    projected_in_range = True
    down_points = 0
    for idx in range(5):
        path = simulate_path(params, 2 + idx % 3, SimConfig(seed=SEED, path_index=idx))
        raw = strategy_grid(path.x, path.phase, path.i0, params, law)
        down = path.phase == int(Phase.DOWN)
        down_points += int(down.sum())
        up_free_exact &= bool((raw[~down] == pi_c).all())
        down_strict &= bool((raw[down] < pi_c).all())
        proj = project_unit(raw)
        projected_in_range &= bool(((proj >= 0.0) & (proj <= 1.0)).all())

    fixed_dev = 0.0
    xs = np.linspace(-1.0, params.epsilon - 1e-3, 41)
    for n in (1, 2, 4):
        fixed_law = FixedCount(n)
        for x in xs:
            for i0 in range(n):
                state = PhaseState(x=float(x), i0=i0, phase=Phase.DOWN)
                fixed_dev = max(
                    fixed_dev,
                    abs(
                        optimal_strategy_random(state, params, fixed_law)
                        - optimal_strategy_fixed(state, params, n)
                    ),
                )

    def series_pi(state: PhaseState, pmf, n_terms: int) -> float:
        p = params.p
        head = sum(pmf(n) for n in range(state.i0 + 1))
        tail = sum(pmf(n) * p ** (n - 1 - state.i0) for n in range(state.i0 + 1, n_terms))
        s_eps = scale_fn(params.epsilon, params.mu)
        s_lo = scale_fn(-params.alpha, params.mu)
        ratio = (s_eps - scale_fn(state.x, params.mu)) / (s_eps - s_lo)
        down = ratio * tail
        return pi_c + conditioned_drift(state.x, params) / params.sigma * (
            down / (head + down)
        )

    series_dev = 0.0
    closed_laws = [
        GeometricLaw(0.3),
        GeometricLaw(0.7),
        GeometricTailLaw((0.3, 0.2)),
    ]
    for closed_law in closed_laws:
        for x in np.linspace(-1.0, params.epsilon - 1e-3, 21):
            for i0 in (0, 1, 3):
                state = PhaseState(x=float(x), i0=i0, phase=Phase.DOWN)
                series_dev = max(
                    series_dev,
                    abs(
                        optimal_strategy_random(state, params, closed_law)
                        - series_pi(state, closed_law.pmf, 4000)
                    ),
                )

    ok = (
        up_free_exact
        and down_strict
        and down_points > 0
        and projected_in_range
        and fixed_dev < 1e-12
        and series_dev < 1e-10
    )
    report(
        "criterion 5 (strategy structure)",
        ok,
        f"up/free exact={up_free_exact}, down strict={down_strict} "
        f"({down_points} pts), fixed dev={fixed_dev:.2e}, series dev={series_dev:.2e}",
    )


def test_criterion_06_optimality_margins():
    rep = validate_optimality(default_law_config(2000), delta=0.25)
    classic = rep.margin_for("classic")
    plus = rep.margin_for("plus_delta")
    minus = rep.margin_for("minus_delta")
    shifted_not_better = all(
        m.margin >= -2.0 * m.std_err for m in (plus, minus)
    )
    classic_beaten = classic.margin >= 2.0 * classic.std_err and classic.margin > 0.0
    ok = rep.passed and shifted_not_better and classic_beaten
    report(
        "criterion 6 (optimality, 2000 CRN paths)",
        ok,
        f"margin +delta={plus.margin:+.4f} (se {plus.std_err:.4f}), "
        f"-delta={minus.margin:+.4f} (se {minus.std_err:.4f}), "
        f"classic={classic.margin:+.4f} (se {classic.std_err:.4f})",
    )


def test_criterion_07_headline_experiment():
    summary = run_compare(default_law_config(2000))
    in_band = 0.5 <= summary.mean <= 1.2
    positive = summary.mean > 3.0 * summary.std_err
    ok = in_band and positive
    report(
        "criterion 7 (headline advantage, 2000 paths)",
        ok,
        f"mean={summary.mean:.4f}, se={summary.std_err:.4f}, "
        f"band=[0.5, 1.2], z={summary.mean / summary.std_err:.1f}",
    )


def test_criterion_08_parameter_sweeps():
    mu_means = [s.mean for s in run_sweep(default_law_config(2000), "mu0", (0.1, 0.15, 0.2))]
    mu_increasing = mu_means[0] < mu_means[1] < mu_means[2]

    alpha_values = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2)
    alpha_sums = run_sweep(default_law_config(1000), "alpha", alpha_values)
    means = [s.mean for s in alpha_sums]
    ses = [s.std_err for s in alpha_sums]
    inversions = [
        i
        for i in range(len(means) - 1)
        if means[i + 1] < means[i]
    ]
    inversions_ok = len(inversions) <= 1 and all(
        means[i] - means[i + 1] < 2.0 * math.hypot(ses[i], ses[i + 1])
        for i in inversions
    )
    d_lo = abs(means[0] - 0.4889)
    d_hi = abs(means[-1] - 1.0139)
    endpoints_ok = d_lo <= 0.15 and d_hi <= 0.15

    ok = mu_increasing and inversions_ok and endpoints_ok
    report(
        "criterion 8 (mu0 and alpha sweeps)",
        ok,
        f"mu0 means={[round(m, 4) for m in mu_means]}, "
        f"alpha means={[round(m, 4) for m in means]}, "
        f"inversions={len(inversions)}, |d(0.5)|={d_lo:.4f}, |d(1.2)|={d_hi:.4f}",
    )


def test_criterion_09_exact_algebra(params):
    p = params.p

    alpha_w = law_from_q(DEFAULT_BETA, p)
    beta_back = law_under_q(FiniteSupportLaw(tuple(alpha_w)), p)
    round_trip = max(abs(a - b) for a, b in zip(beta_back, DEFAULT_BETA))

    geo_dev = 0.0
    geo_min = 1.0
    for q in (0.2, 0.5, 0.9):
        law = GeometricLaw(q)
        w0 = law.pmf(0) / law.event_prob(p)
        geo_dev = max(geo_dev, abs(w0 - (1.0 - p * q)))
        geo_min = min(geo_min, w0)

    grid = np.linspace(-2.0, params.epsilon - 0.01, 201)
    s_eps = scale_fn(params.epsilon, params.mu)
    naive = params.mu + 2.0 * params.mu * scale_fn(grid, params.mu) / (
        s_eps - scale_fn(grid, params.mu)
    )
    coth = -params.mu / np.tanh(params.mu * (params.epsilon - grid))
    drift_dev = float(
        max(
            np.max(np.abs(naive - coth)),
            np.max(np.abs(params.mu + conditioned_drift(grid, params) - coth)),
        )
    )

    lo = -params.alpha
    cont_floor = abs(
        martingale_value(2, PhaseState(x=lo, i0=0, phase=Phase.DOWN), params)
        - martingale_value(2, PhaseState(x=lo, i0=1, phase=Phase.UP), params)
    )
    cont_top = abs(
        martingale_value(2, PhaseState(x=0.0, i0=1, phase=Phase.UP), params)
        - martingale_value(2, PhaseState(x=0.0, i0=1, phase=Phase.DOWN), params)
    )
    cont_free = abs(
        martingale_value(2, PhaseState(x=0.0, i0=2, phase=Phase.UP), params)
        - martingale_value(2, PhaseState(x=0.0, i0=2, phase=Phase.FREE), params)
    )
    continuity = max(cont_floor, cont_top, cont_free)

    ok = (
        round_trip < 1e-12
        and geo_dev < 1e-12
        and geo_min >= 0.88
        and drift_dev < 1e-10
        and continuity < 1e-12
    )
    report(
        "criterion 9 (exact algebra)",
        ok,
        f"beta round trip={round_trip:.2e}, geo 1-pq dev={geo_dev:.2e} "
        f"(min {geo_min:.4f}), drift id={drift_dev:.2e}, continuity={continuity:.2e}",
    )


def test_criterion_10_reproducibility(tmp_path):
    byte_identical = True
    for sub, argv in (
        ("sim", ["simulate", "--seed", str(SEED)]),
        ("cmp", ["compare", "--seed", str(SEED), "--paths", "200"]),
    ):
        outs = []
        for rep_dir in ("r1", "r2"):
            out_dir = tmp_path / sub / rep_dir
            assert main(argv + ["--out", str(out_dir)]) == 0
            name = "path.csv" if sub == "sim" else "compare.csv"
            outs.append((out_dir / name).read_bytes())
        byte_identical &= outs[0] == outs[1]

    cfg = default_law_config(300)
    head = compare_samples(cfg, start_index=0, n_paths=120)
    tail = compare_samples(cfg, start_index=120, n_paths=180)
    full = compare_samples(cfg)
    merged = np.concatenate((head, tail))
    split_exact = bool(np.array_equal(merged, full)) and (
        float(merged.mean()) == float(full.mean())
    )

    ok = byte_identical and split_exact
    report(
        "criterion 10 (reproducibility)",
        ok,
        f"csv byte-identical={byte_identical}, split-merge exact={split_exact}",
    )
