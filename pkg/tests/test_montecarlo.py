"""Tests for the experiment harness, validators and result writers."""

from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest

from resband.laws import (
    FiniteSupportLaw,
    FixedCount,
    GeometricLaw,
    GeometricTailLaw,
    law_from_q,
)
from resband.model import ModelParams
from resband.montecarlo import (
    TABLE_COLUMNS,
    ExperimentConfig,
    LawSpec,
    McSummary,
    compare_samples,
    compare_table,
    run_compare,
    run_sweep,
    summary_record,
    sweep_table,
    validate_htransform,
    validate_martingale,
    validate_optimality,
    validate_pn,
    write_jsonl,
    write_table,
)
from resband.simulate import SimConfig

DEFAULT_BETA = (0.1, 0.1, 0.2, 0.2, 0.2, 0.1, 0.1)


@pytest.fixture(scope="module")
def params() -> ModelParams:
    return ModelParams.from_log_band(
        mu0=0.1, sigma=0.15, r=0.02, alpha=1.0, epsilon=0.3
    )


class TestLawSpec:
    def test_fixed_resolves(self, params):
        law = LawSpec(kind="fixed", n=3).strategy_law(params)
        assert isinstance(law, FixedCount)
        assert law.pmf(3) == 1.0

    def test_geometric_resolves(self, params):
        law = LawSpec(kind="geometric", q=0.4).strategy_law(params)
        assert isinstance(law, GeometricLaw)
        assert law.pmf(0) == pytest.approx(0.6)

    def test_finite_weights_are_conditioned_side(self, params):
        spec = LawSpec(kind="finite", beta=DEFAULT_BETA)
        law = spec.strategy_law(params)
        assert isinstance(law, FiniteSupportLaw)
        np.testing.assert_allclose(
            law.weights, law_from_q(DEFAULT_BETA, params.p), rtol=1e-12
        )

    def test_finite_weights_renormalized(self):
        spec = LawSpec(kind="finite", beta=(0.5, 0.5 + 2e-10))
        assert sum(spec.beta) == pytest.approx(1.0, abs=1e-15)

    def test_geometric_tail_resolves(self, params):
        spec = LawSpec(kind="geometric_tail", head=(0.3, 0.2))
        law = spec.strategy_law(params)
        assert isinstance(law, GeometricTailLaw)
        assert law.head == spec.head

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": "unknown"},
            {"kind": "fixed", "n": -1},
            {"kind": "geometric", "q": 1.0},
            {"kind": "geometric", "q": -0.1},
            {"kind": "finite", "beta": ()},
            {"kind": "finite", "beta": (0.5, -0.1)},
            {"kind": "finite", "beta": (0.2, 0.2)},
            {"kind": "geometric_tail", "head": (1.1,)},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            LawSpec(**kwargs)


class TestExperimentConfig:
    def test_defaults_resolve(self):
        cfg = ExperimentConfig(seed=1)
        assert cfg.params().p == pytest.approx(0.11654398390167689, abs=1e-15)
        assert cfg.sim(7).path_index == 7
        assert cfg.sim(7).seed == 1
        assert isinstance(cfg.strategy_law(), FixedCount)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_paths": 1},
            {"w0": 0.0},
            {"w0": math.inf},
            {"mu0": 0.0},
            {"dt": -1e-3},
            {"sigma": 0.0},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ExperimentConfig(seed=1, **kwargs)


class TestMcSummary:
    def test_from_samples(self):
        s = McSummary.from_samples("demo", np.array([1.0, 2.0, 3.0, 4.0]))
        assert s.quantity == "demo"
        assert s.mean == pytest.approx(2.5)
        assert s.std_dev == pytest.approx(np.std([1, 2, 3, 4], ddof=1))
        assert s.std_err == pytest.approx(s.std_dev / 2.0)
        assert s.n == 4

    def test_needs_two_samples(self):
        with pytest.raises(ValueError, match="two samples"):
            McSummary.from_samples("demo", np.array([1.0]))


class TestCompare:
    def test_split_merge_is_exact(self):
        cfg = ExperimentConfig(seed=11, n_paths=40)
        head = compare_samples(cfg, start_index=0, n_paths=17)
        tail = compare_samples(cfg, start_index=17, n_paths=23)
        full = compare_samples(cfg)
        np.testing.assert_array_equal(np.concatenate((head, tail)), full)

    def test_zero_crossings_ties_classic(self):
        cfg = ExperimentConfig(seed=11, n_paths=10, law=LawSpec(kind="fixed", n=0))
        diffs = compare_samples(cfg)
        assert (diffs == 0.0).all()

    def test_run_compare_matches_samples(self):
        cfg = ExperimentConfig(seed=11, n_paths=30)
        summary = run_compare(cfg)
        ref = McSummary.from_samples(summary.quantity, compare_samples(cfg))
        assert summary == ref
        assert summary.n == 30
        assert "W" in summary.quantity

    def test_run_compare_deterministic(self):
        cfg = ExperimentConfig(seed=12, n_paths=25)
        assert run_compare(cfg) == run_compare(cfg)

    def test_seed_changes_samples(self):
        a = compare_samples(ExperimentConfig(seed=1, n_paths=12))
        b = compare_samples(ExperimentConfig(seed=2, n_paths=12))
        assert not np.array_equal(a, b)


class TestSweep:
    def test_sweep_rederives_parameters(self):
        cfg = ExperimentConfig(seed=13, n_paths=12)
        out = run_sweep(cfg, "mu0", (0.1, 0.15))
        assert len(out) == 2
        direct = run_compare(ExperimentConfig(seed=13, n_paths=12, mu0=0.15))
        assert out[1] == direct

    def test_rejects_unknown_param(self):
        cfg = ExperimentConfig(seed=13, n_paths=12)
        with pytest.raises(ValueError, match="sweep parameter"):
            run_sweep(cfg, "sigma", (0.1,))

    def test_rejects_empty_values(self):
        cfg = ExperimentConfig(seed=13, n_paths=12)
        with pytest.raises(ValueError, match="at least one value"):
            run_sweep(cfg, "alpha", ())


class TestValidators:
    def test_pn_small_run_passes(self, params):
        rep = validate_pn(params, SimConfig(seed=5), n_max=2, n_paths=4000)
        assert rep.passed
        assert rep.anomalies == 0
        assert len(rep.checks) == 3
        assert rep.checks[0].expected == 1.0
        assert rep.checks[0].observed == 1.0
        assert rep.checks[1].expected == pytest.approx(params.p, abs=1e-15)
        assert all(abs(c.z) <= 3.0 for c in rep.checks)

    def test_pn_rejects_bad_nmax(self, params):
        with pytest.raises(ValueError, match="n_max"):
            validate_pn(params, SimConfig(seed=5), n_max=0, n_paths=100)

    def test_martingale_small_run_passes(self, params):
        rep = validate_martingale(params, SimConfig(seed=5), n=2, n_paths=4000)
        assert rep.passed
        assert rep.anomalies == 0
        assert [c.t for c in rep.checks] == [0.5, 1.0, 2.0]
        assert all(c.expected == pytest.approx(params.p**2) for c in rep.checks)
        assert all(abs(c.z) <= 3.0 for c in rep.checks)

    @pytest.mark.parametrize("times", [(), (0.0, 1.0), (1.0, 0.5)])
    def test_martingale_rejects_bad_times(self, params, times):
        with pytest.raises(ValueError):
            validate_martingale(params, SimConfig(seed=5), times=times, n_paths=100)

    def test_htransform_durations_match(self, params):
        rep = validate_htransform(params, SimConfig(seed=5), n_samples=2000)
        assert rep.passed
        assert rep.dropped_conditioned == 0
        assert rep.anomalies == 0
        assert rep.ecdf_distance < 0.03
        assert abs(rep.mean_z) < 3.0
        assert abs(rep.var_z) < 3.0
        assert abs(rep.rate_z) <= 3.0
        assert rep.rate_expected == pytest.approx(params.p, abs=1e-15)

    def test_htransform_detects_wrong_drift(self, params):
        bad = ModelParams.from_log_band(
            mu0=0.16, sigma=0.15, r=0.02, alpha=1.0, epsilon=0.3
        )
        rep = validate_htransform(
            params, SimConfig(seed=5), n_samples=2000, conditioned_params=bad
        )
        assert not rep.passed
        assert rep.ecdf_distance > 0.03

    def test_htransform_rejects_tiny_sample(self, params):
        with pytest.raises(ValueError, match="n_samples"):
            validate_htransform(params, SimConfig(seed=5), n_samples=100)

    def test_htransform_refuses_infeasible_oracle(self):
        wide = ModelParams.from_log_band(
            mu0=0.1, sigma=0.15, r=0.02, alpha=8.0, epsilon=0.3
        )
        with pytest.raises(RuntimeError, match="oracle"):
            validate_htransform(wide, SimConfig(seed=5), n_samples=1000)

    def test_optimality_small_run(self):
        cfg = ExperimentConfig(seed=17, n_paths=80)
        rep = validate_optimality(cfg)
        assert rep.passed
        for name in ("plus_delta", "minus_delta"):
            margin = rep.margin_for(name)
            assert margin.margin == 0.0
            assert margin.std_err == 0.0
        classic = rep.margin_for("classic")
        assert classic.margin > 0.0
        assert classic.margin > 2.0 * classic.std_err
        assert set(rep.mean_log_wealth) == {
            "pi_star",
            "plus_delta",
            "minus_delta",
            "classic",
        }

    def test_optimality_rejects_negative_delta(self):
        with pytest.raises(ValueError, match="delta"):
            validate_optimality(ExperimentConfig(seed=17, n_paths=4), delta=-0.1)


class TestWriters:
    def test_compare_table_roundtrip(self, tmp_path):
        cfg = ExperimentConfig(seed=11, n_paths=20)
        summary = run_compare(cfg)
        rows = compare_table(cfg, summary)
        assert len(rows) == 1
        assert math.isnan(rows[0]["param_value"])
        out = tmp_path / "compare.csv"
        write_table(out, rows)
        with open(out, newline="") as fh:
            parsed = list(csv.reader(fh))
        assert parsed[0] == list(TABLE_COLUMNS)
        assert len(parsed) == 2
        assert float(parsed[1][1]) == pytest.approx(summary.mean, rel=1e-5)
        assert int(parsed[1][4]) == 20

    def test_sweep_table_rederives_p(self, tmp_path):
        cfg = ExperimentConfig(seed=13, n_paths=12)
        values = (0.8, 1.0)
        summaries = run_sweep(cfg, "alpha", values)
        rows = sweep_table(cfg, "alpha", values, summaries)
        assert [r["param_value"] for r in rows] == [0.8, 1.0]
        p_08 = ModelParams.from_log_band(
            mu0=0.1, sigma=0.15, r=0.02, alpha=0.8, epsilon=0.3
        ).p
        assert rows[0]["p"] == pytest.approx(p_08, abs=1e-15)
        assert rows[1]["p"] == pytest.approx(cfg.params().p, abs=1e-15)

    def test_summary_record_and_jsonl(self, tmp_path):
        cfg = ExperimentConfig(seed=11, n_paths=20)
        summary = run_compare(cfg)
        rec = summary_record("compare", cfg, summary)
        assert rec["seed"] == 11
        assert rec["param"] is None
        swept = summary_record("sweep", cfg, summary, "mu0", 0.15)
        assert swept["value"] == 0.15
        assert swept["p"] != rec["p"]
        out = tmp_path / "summary.jsonl"
        write_jsonl(out, [rec, swept])
        with open(out) as fh:
            lines = [json.loads(line) for line in fh]
        assert len(lines) == 2
        assert lines[0]["experiment"] == "compare"
        assert lines[1]["mean"] == pytest.approx(summary.mean)
        keys = list(lines[0])
        assert keys == sorted(keys)
