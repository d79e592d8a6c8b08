"""Backend parity: compiled and pure-Python kernels are bit-identical."""

import os
import subprocess
import sys

import numpy as np
import pytest

from resband._kernels import pyref
from resband.model import ModelParams
from resband.simulate import (
    CROSS_NORMAL_BLOCK,
    UNIFORM_BLOCK,
    normal_draw,
    path_rng,
    uniform_draw,
)

fast = pytest.importorskip(
    "resband._kernels._fast", reason="compiled backend not built"
)

PARAMS = ModelParams.from_log_band(mu0=0.1, sigma=0.15, r=0.02, alpha=1.0, epsilon=0.3)
DT = 1e-3
GUARD = 1e-4 * PARAMS.epsilon


def run_conditioned(kernel, seed, path_index, n_forced, n_steps=10_000, early_stop=0):
    rng = path_rng(seed, path_index)
    x = np.empty(n_steps + 1)
    db = np.empty(n_steps)
    phase = np.empty(n_steps + 1, dtype=np.int8)
    i0 = np.empty(n_steps + 1, dtype=np.int32)
    ret = kernel.simulate_conditioned(
        PARAMS.mu,
        PARAMS.alpha,
        PARAMS.epsilon,
        GUARD,
        DT,
        n_steps,
        n_forced,
        100,
        early_stop,
        normal_draw(rng),
        x,
        db,
        phase,
        i0,
    )
    return ret, x, db, phase, i0


def run_crossings(kernel, seed, path_index, probe_idx=None, max_steps=200_000):
    rng = path_rng(seed, path_index)
    if probe_idx is None:
        probe_idx = np.empty(0, dtype=np.int64)
    probe_x = np.empty(probe_idx.size)
    probe_i0 = np.empty(probe_idx.size, dtype=np.int32)
    probe_leg = np.empty(probe_idx.size, dtype=np.int8)
    ret = kernel.simulate_crossings(
        PARAMS.mu,
        PARAMS.alpha,
        PARAMS.epsilon,
        DT,
        max_steps,
        normal_draw(rng, CROSS_NORMAL_BLOCK),
        uniform_draw(rng, UNIFORM_BLOCK),
        probe_idx,
        probe_x,
        probe_i0,
        probe_leg,
    )
    return ret, probe_x, probe_i0, probe_leg


class TestConditionedParity:
    @pytest.mark.parametrize("path_index", [0, 1, 5])
    @pytest.mark.parametrize("n_forced", [0, 1, 3, 6])
    def test_bit_identical(self, path_index, n_forced):
        ret_a, xa, dba, pha, ia = run_conditioned(pyref, 42, path_index, n_forced)
        ret_b, xb, dbb, phb, ib = run_conditioned(fast, 42, path_index, n_forced)
        assert ret_a == ret_b
        assert np.array_equal(xa, xb)
        assert np.array_equal(dba, dbb)
        assert np.array_equal(pha, phb)
        assert np.array_equal(ia, ib)

    def test_early_stop_parity(self):
        ret_a, xa, _, _, ia = run_conditioned(pyref, 9, 2, 1, n_steps=20_000, early_stop=1)
        ret_b, xb, _, _, ib = run_conditioned(fast, 9, 2, 1, n_steps=20_000, early_stop=1)
        assert ret_a == ret_b
        end = ret_a[1]
        assert end < 20_000
        assert xa[end] <= -PARAMS.alpha
        assert ia[end] == 1
        assert np.array_equal(xa[: end + 1], xb[: end + 1])


class TestCrossingsParity:
    def test_bit_identical_over_paths(self):
        probe_idx = np.array([500, 1000, 2000], dtype=np.int64)
        for path_index in range(40):
            ret_a, xa, ia, la = run_crossings(pyref, 123, path_index, probe_idx.copy())
            ret_b, xb, ib, lb = run_crossings(fast, 123, path_index, probe_idx.copy())
            assert ret_a == ret_b
            assert np.array_equal(xa, xb)
            assert np.array_equal(ia, ib)
            assert np.array_equal(la, lb)

    def test_no_probes(self):
        ret_a, _, _, _ = run_crossings(pyref, 123, 3)
        ret_b, _, _, _ = run_crossings(fast, 123, 3)
        assert ret_a == ret_b
        cnt, hit, gfd, ghit, steps = ret_a
        assert hit >= 0
        assert cnt >= 0
        assert steps <= 200_000


class TestKernelBehavior:
    @pytest.mark.parametrize("kernel", [pyref, fast], ids=["python", "compiled"])
    def test_deterministic(self, kernel):
        ret1, x1, _, _, _ = run_conditioned(kernel, 7, 0, 2, n_steps=2000)
        ret2, x2, _, _, _ = run_conditioned(kernel, 7, 0, 2, n_steps=2000)
        assert ret1 == ret2
        assert np.array_equal(x1, x2)
        ret3, x3, _, _, _ = run_conditioned(kernel, 7, 1, 2, n_steps=2000)
        assert not np.array_equal(x1, x3)

    @pytest.mark.parametrize("kernel", [pyref, fast], ids=["python", "compiled"])
    def test_down_phase_respects_guard(self, kernel):
        # wide guard forces frequent rejections; every Down-phase point must
        # stay strictly below the guard level and forced steps get counted
        guard = 0.25
        n_steps = 4000
        rng = path_rng(3, 0)
        x = np.empty(n_steps + 1)
        db = np.empty(n_steps)
        phase = np.empty(n_steps + 1, dtype=np.int8)
        i0 = np.empty(n_steps + 1, dtype=np.int32)
        _, _, forced = kernel.simulate_conditioned(
            PARAMS.mu,
            PARAMS.alpha,
            PARAMS.epsilon,
            guard,
            DT,
            n_steps,
            3,
            1,
            0,
            normal_draw(rng),
            x,
            db,
            phase,
            i0,
        )
        down = phase == 0
        assert np.all(x[down] < PARAMS.epsilon - guard)
        assert forced >= 0

    @pytest.mark.parametrize("kernel", [pyref, fast], ids=["python", "compiled"])
    def test_flip_into_guard_strip_raises(self, kernel):
        # scripted variates: eleven -3 draws dive past -alpha (first crossing
        # of two, so the path enters the Up phase), then a 45 jolt crosses 0
        # landing inside the guard strip, which the kernel must refuse
        script = np.concatenate((np.full(11, -3.0), np.full(60, 45.0), np.zeros(200)))
        state = {"used": False}

        def draw():
            if state["used"]:
                return np.zeros(64)
            state["used"] = True
            return script.copy()

        n_steps = 1000
        x = np.empty(n_steps + 1)
        db = np.empty(n_steps)
        phase = np.empty(n_steps + 1, dtype=np.int8)
        i0 = np.empty(n_steps + 1, dtype=np.int32)
        with pytest.raises(RuntimeError, match="guard strip"):
            kernel.simulate_conditioned(
                PARAMS.mu,
                PARAMS.alpha,
                PARAMS.epsilon,
                GUARD,
                DT,
                n_steps,
                2,
                100,
                0,
                draw,
                x,
                db,
                phase,
                i0,
            )

    @pytest.mark.parametrize("kernel", [pyref, fast], ids=["python", "compiled"])
    def test_crossings_deterministic(self, kernel):
        probe_idx = np.array([250, 750], dtype=np.int64)
        r1 = run_crossings(kernel, 11, 4, probe_idx.copy())
        r2 = run_crossings(kernel, 11, 4, probe_idx.copy())
        assert r1[0] == r2[0]
        assert np.array_equal(r1[1], r2[1])


class TestBackendSelection:
    @staticmethod
    def run_with_backend(value: str) -> subprocess.CompletedProcess:
        env = dict(os.environ)
        if value:
            env["RESBAND_BACKEND"] = value
        else:
            env.pop("RESBAND_BACKEND", None)
        return subprocess.run(
            [sys.executable, "-c", "import resband; print(resband.BACKEND)"],
            capture_output=True,
            text=True,
            env=env,
            timeout=60,
        )

    def test_forced_python(self):
        proc = self.run_with_backend("py")
        assert proc.returncode == 0
        assert proc.stdout.strip() == "python"

    def test_forced_compiled(self):
        proc = self.run_with_backend("c")
        assert proc.returncode == 0
        assert proc.stdout.strip() == "compiled"

    def test_default_prefers_compiled(self):
        proc = self.run_with_backend("")
        assert proc.returncode == 0
        assert proc.stdout.strip() == "compiled"

    def test_rejects_unknown_backend(self):
        proc = self.run_with_backend("fortran")
        assert proc.returncode != 0
        assert "RESBAND_BACKEND" in proc.stderr
