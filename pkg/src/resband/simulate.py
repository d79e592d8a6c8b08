"""Path simulation and wealth evolution.

Paths of the conditioned log price are produced by the stepping kernels in
``resband._kernels`` on a uniform grid of spacing ``dt``; phase transitions
are detected at grid points.  Wealth follows the log-Euler scheme

    ln w[k+1] = ln w[k] + (r + pi (mu0 - r) - pi^2 sigma^2 / 2) dt
                + pi sigma db[k]

where ``db`` is the driving Brownian increment recorded with the path, so a
fully invested account (pi = 1, w0 = s0 = 1) tracks the simulated price
exactly.

Reproducibility: every path owns a generator seeded by the stateless mix
``SeedSequence((seed, path_index))``, the believed crossing count is sampled
first (one uniform), and kernels then consume normals (and bridge uniforms)
in blocks.  Identical seeds give identical paths on either kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from . import _kernels
from .laws import XiLaw
from .model import ModelParams
from .strategy import Phase, PhaseState, project_unit

__all__ = [
    "SimConfig",
    "PathRecord",
    "WealthSeries",
    "path_rng",
    "sample_xi",
    "simulate_path",
    "simulate_unconditioned",
    "evolve_wealth",
]

NORMAL_BLOCK = 8192
CROSS_NORMAL_BLOCK = 1024
UNIFORM_BLOCK = 256
GUARD_FRACTION = 1e-4


@dataclass(frozen=True)
class SimConfig:
    """Grid, seeding and guard settings for one simulated path.

    ``guard`` is the width of the strip below the breakout level that Down
    proposals may not enter (defaults to ``GUARD_FRACTION * epsilon``);
    ``max_reject`` bounds the resampling attempts per step before a forced
    half-step down is taken.
    """

    dt: float = 1e-3
    horizon: float = 10.0
    seed: int = 0
    path_index: int = 0
    guard: float | None = None
    max_reject: int = 100

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if self.n_steps < 1:
            raise ValueError(
                f"horizon {self.horizon} must cover at least one step of dt={self.dt}"
            )
        if not (0 <= self.seed < 2**64):
            raise ValueError(f"seed must be a 64-bit nonnegative integer, got {self.seed}")
        if self.path_index < 0:
            raise ValueError(f"path_index must be nonnegative, got {self.path_index}")
        if self.guard is not None and not (self.guard > 0.0):
            raise ValueError(f"guard must be positive when given, got {self.guard}")
        if self.max_reject < 1:
            raise ValueError(f"max_reject must be at least 1, got {self.max_reject}")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))


@dataclass(frozen=True)
class PathRecord:
    """One simulated path on the grid.

    ``phase`` holds :class:`~resband.strategy.Phase` codes (0 down, 1 up,
    2 free), ``i0`` the completed downcrossings, both recorded after the
    transition at each grid point.  ``db[k]`` is the Brownian increment
    driving step k.  ``t_eps`` is the first Free-phase grid time at or above
    the breakout level (None if the horizon ended first); for unconditioned
    paths it is the breakout time itself.  ``xi_realized`` is the forced
    crossing count, None for unconditioned paths.
    """

    times: np.ndarray
    x: np.ndarray
    db: np.ndarray
    phase: np.ndarray
    i0: np.ndarray
    dt: float
    xi_realized: int | None
    t_eps: float | None
    forced_steps: int = 0

    def state_at(self, k: int) -> PhaseState:
        return PhaseState(
            x=float(self.x[k]), i0=int(self.i0[k]), phase=Phase(int(self.phase[k]))
        )

    def price(self, params: ModelParams) -> np.ndarray:
        """Price path z = s0 * exp(sigma * x)."""
        return params.s0 * np.exp(params.sigma * self.x)


@dataclass(frozen=True)
class WealthSeries:
    """Wealth along a path and the projected fractions actually applied."""

    w: np.ndarray
    pi_used: np.ndarray


def path_rng(seed: int, path_index: int) -> np.random.Generator:
    """Per-path generator from a stateless (seed, path_index) mix."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, path_index))))


def normal_draw(rng: np.random.Generator, block: int = NORMAL_BLOCK) -> Callable[[], np.ndarray]:
    def draw() -> np.ndarray:
        return rng.standard_normal(block)

    return draw


def uniform_draw(rng: np.random.Generator, block: int = UNIFORM_BLOCK) -> Callable[[], np.ndarray]:
    def draw() -> np.ndarray:
        return rng.random(block)

    return draw


def resolve_guard(params: ModelParams, cfg: SimConfig) -> float:
    guard = cfg.guard if cfg.guard is not None else GUARD_FRACTION * params.epsilon
    if not (0.0 < guard < params.epsilon):
        raise ValueError(
            f"guard must lie strictly between 0 and epsilon={params.epsilon}, got {guard}"
        )
    return guard


def sample_xi(
    law: XiLaw,
    params: ModelParams,
    rng: np.random.Generator,
    measure: Literal["P", "Q"] = "Q",
) -> int:
    """Draw a crossing count from ``law``, consuming exactly one uniform.

    Under ``"P"`` the raw weights are used; under ``"Q"`` the weights
    conditioned on the believed event, beta_n = alpha_n p^n / P(A_xi).
    """
    if measure == "P":
        pmf = law.pmf
    elif measure == "Q":
        p = params.p
        total = law.event_prob(p)

        def pmf(n: int) -> float:
            return law.pmf(n) * p**n / total

    else:
        raise ValueError(f"measure must be 'P' or 'Q', got {measure!r}")
    bound = law.support_bound()
    u = rng.random()
    acc = 0.0
    for n in range(1_000_000):
        if bound is not None and n >= bound:
            return bound
        acc += pmf(n)
        if u < acc or 1.0 - acc < 1e-15:
            return n
    raise RuntimeError("crossing-count cdf walk failed to terminate")


def simulate_path(
    params: ModelParams,
    n_forced: int,
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
) -> PathRecord:
    """Simulate the log price conditioned on ``n_forced`` downcrossings.

    The path starts at x = 0 in the Down phase (Free immediately when
    ``n_forced`` is 0) and runs to the horizon; the breakout level is not
    absorbing, ``t_eps`` only records the first Free-phase touch.
    """
    if n_forced < 0:
        raise ValueError(f"n_forced must be nonnegative, got {n_forced}")
    if rng is None:
        rng = path_rng(cfg.seed, cfg.path_index)
    n_steps = cfg.n_steps
    guard = resolve_guard(params, cfg)
    x = np.empty(n_steps + 1)
    db = np.empty(n_steps)
    phase = np.empty(n_steps + 1, dtype=np.int8)
    i0 = np.empty(n_steps + 1, dtype=np.int32)
    t_eps_idx, _, forced = _kernels.simulate_conditioned(
        params.mu,
        params.alpha,
        params.epsilon,
        guard,
        cfg.dt,
        n_steps,
        n_forced,
        cfg.max_reject,
        0,
        normal_draw(rng),
        x,
        db,
        phase,
        i0,
    )
    return PathRecord(
        times=np.arange(n_steps + 1) * cfg.dt,
        x=x,
        db=db,
        phase=phase,
        i0=i0,
        dt=cfg.dt,
        xi_realized=n_forced,
        t_eps=t_eps_idx * cfg.dt if t_eps_idx >= 0 else None,
        forced_steps=forced,
    )


def _next_at_or_after(sorted_idx: np.ndarray, start: int) -> int | None:
    pos = int(np.searchsorted(sorted_idx, start))
    return int(sorted_idx[pos]) if pos < sorted_idx.shape[0] else None


def simulate_unconditioned(
    params: ModelParams,
    cfg: SimConfig,
    rng: np.random.Generator | None = None,
) -> PathRecord:
    """Simulate the raw drifted log price with grid-level band bookkeeping.

    Used as a brute-force oracle: phases and counts follow the same
    grid-point detection rules as the conditioned simulator, the count is
    frozen once a grid point reaches the breakout level and the remaining
    points are marked Free.
    """
    if rng is None:
        rng = path_rng(cfg.seed, cfg.path_index)
    n = cfg.n_steps
    dxs = params.mu * cfg.dt + math.sqrt(cfg.dt) * rng.standard_normal(n)
    x = np.cumsum(np.concatenate(((0.0,), dxs)))
    db = dxs - params.mu * cfg.dt
    phase = np.empty(n + 1, dtype=np.int8)
    i0 = np.empty(n + 1, dtype=np.int32)
    phase[0] = int(Phase.DOWN)
    i0[0] = 0
    down_ix = np.nonzero(x <= -params.alpha)[0]
    up_ix = np.nonzero(x >= 0.0)[0]
    eps_ix = np.nonzero(x >= params.epsilon)[0]
    leg = int(Phase.DOWN)
    cnt = 0
    done = -1
    s = 1
    while s <= n:
        if leg == int(Phase.DOWN):
            jd = _next_at_or_after(down_ix, s)
            je = _next_at_or_after(eps_ix, s)
            if jd is None and je is None:
                break
            if je is not None and (jd is None or je < jd):
                phase[s:je] = leg
                i0[s:je] = cnt
                done = je
                break
            phase[s:jd] = leg
            i0[s:jd] = cnt
            cnt += 1
            leg = int(Phase.UP)
            phase[jd] = leg
            i0[jd] = cnt
            s = jd + 1
        else:
            ju = _next_at_or_after(up_ix, s)
            if ju is None:
                break
            phase[s:ju] = leg
            i0[s:ju] = cnt
            if x[ju] >= params.epsilon:
                done = ju
                break
            leg = int(Phase.DOWN)
            phase[ju] = leg
            i0[ju] = cnt
            s = ju + 1
    if done >= 0:
        phase[done:] = int(Phase.FREE)
        i0[done:] = cnt
    else:
        phase[s:] = leg
        i0[s:] = cnt
    return PathRecord(
        times=np.arange(n + 1) * cfg.dt,
        x=x,
        db=db,
        phase=phase,
        i0=i0,
        dt=cfg.dt,
        xi_realized=None,
        t_eps=done * cfg.dt if done >= 0 else None,
        forced_steps=0,
    )


def evolve_wealth(
    path: PathRecord,
    pi,
    params: ModelParams,
    w0: float = 1.0,
    project: bool = True,
) -> WealthSeries:
    """Evolve wealth along a path under a strategy.

    ``pi`` may be a constant fraction, an array of raw fractions at every
    grid point (the last one is informational), or a callable mapping a
    :class:`PhaseState` to a fraction.  Fractions are projected onto [0, 1]
    before trading unless ``project`` is disabled.
    """
    if not (w0 > 0.0 and math.isfinite(w0)):
        raise ValueError(f"w0 must be positive and finite, got {w0}")
    n = path.db.shape[0]
    if callable(pi):
        pi_arr = np.array([float(pi(path.state_at(k))) for k in range(n + 1)])
    elif np.ndim(pi) == 0:
        pi_arr = np.full(n + 1, float(pi))
    else:
        pi_arr = np.asarray(pi, dtype=float)
        if pi_arr.shape != (n + 1,):
            raise ValueError(
                f"strategy array must have one value per grid point ({n + 1}), "
                f"got shape {pi_arr.shape}"
            )
    pu = pi_arr[:n]
    if project:
        pu = project_unit(pu)
    dlog = (
        params.r + pu * (params.mu0 - params.r) - 0.5 * pu * pu * params.sigma**2
    ) * path.dt + pu * params.sigma * path.db
    w = np.exp(np.cumsum(np.concatenate(((math.log(w0),), dlog))))
    if not np.isfinite(w).all():
        raise RuntimeError("wealth overflowed or became non-finite")
    return WealthSeries(w=w, pi_used=pu)
