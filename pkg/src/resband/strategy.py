"""Log-optimal allocation when the price is believed to stay in the band.

Classic setting: a trader holding the constant fraction
pi_c = (mu0 - r) / sigma^2 of wealth in the risky asset maximizes expected
log wealth under the unconditioned price.  Conditioning on xi further
downcrossings before the breakout changes the price law during the forced
crossings: the conditioned process carries the extra drift

    conditioned_drift(x) = 2 mu S(x) / (S(eps) - S(x))
                         = 2 mu / expm1(-2 mu (eps - x)),

negative for mu > 0, and the optimal fraction becomes

    pi* = pi_c + conditioned_drift(x) / sigma * (down weight / total weight)

where the weight ratio comes from the posterior mixture over the remaining
scenarios.  With i0 crossings done and the path inside a forced crossing,
the conditional probability M_t^n of scenario A_n given the running state is

    down phase:  p^(n-1-i0) * (S(eps) - S(x)) / (S(eps) - S(-alpha))
    up phase:    p^(n-i0)                        (both 1 once i0 >= n)

and the mixture weight aggregates these against the believed count law.
Once every required crossing is done the conditioning is exhausted and pi*
falls back to pi_c.  Fractions are projected onto [0, 1] before trading.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .laws import FixedCount, XiLaw
from .model import ModelParams

__all__ = [
    "Phase",
    "PhaseState",
    "MixtureWeight",
    "martingale_value",
    "conditioned_drift",
    "classic_strategy",
    "optimal_strategy_fixed",
    "mixture_weight",
    "optimal_strategy_random",
    "project_unit",
    "strategy_grid",
]


class Phase(enum.IntEnum):
    """Where the path stands relative to the forced-crossing cycle."""

    DOWN = 0  # inside a forced downcrossing, heading for -alpha
    UP = 1    # crossing done, returning to 0
    FREE = 2  # all required crossings done


@dataclass(frozen=True)
class PhaseState:
    """Running state of a path: level, completed crossings, phase."""

    x: float
    i0: int
    phase: Phase

    def __post_init__(self) -> None:
        if self.i0 < 0:
            raise ValueError(f"i0 must be nonnegative, got {self.i0}")


@dataclass(frozen=True)
class MixtureWeight:
    """Posterior weight of the remaining scenarios.

    ``value`` is the total conditional weight of the believed event given the
    running state; ``down_mass`` is the part contributed by scenarios whose
    current forced crossing is still incomplete (zero in Up and Free phases).
    Satisfies 0 <= down_mass <= value <= 1.
    """

    value: float
    down_mass: float


def _down_ratio(x: float, params: ModelParams) -> float:
    """R(x) = (S(eps) - S(x)) / (S(eps) - S(-alpha)), in (0, 1] for x in [-alpha, eps)."""
    s_eps = math.exp(-2.0 * params.mu * params.epsilon)
    s_x = math.exp(-2.0 * params.mu * x)
    s_lo = math.exp(2.0 * params.mu * params.alpha)
    return (s_eps - s_x) / (s_eps - s_lo)


def martingale_value(n: int, state: PhaseState, params: ModelParams) -> float:
    """Conditional probability of A_n (n downcrossings before breakout).

    Evaluates the closed form for the running state; constant 1 once the
    n-th crossing is complete.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if state.i0 >= n:
        return 1.0
    p = params.p
    if state.phase == Phase.DOWN:
        if state.x >= params.epsilon:
            raise ValueError(
                f"down-phase state beyond the breakout level: x={state.x}"
            )
        return p ** (n - 1 - state.i0) * _down_ratio(state.x, params)
    return p ** (n - state.i0)


def conditioned_drift(x, params: ModelParams):
    """Extra drift of the conditioned log-price during a forced crossing.

    Equal to 2 mu S(x) / (S(eps) - S(x)), computed in the cancellation-free
    form 2 mu / expm1(-2 mu (eps - x)).  Negative for mu > 0.  Accepts a
    scalar or ndarray ``x`` strictly below eps.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr >= params.epsilon):
        raise ValueError("conditioned drift is defined only below the breakout level")
    out = 2.0 * params.mu / np.expm1(-2.0 * params.mu * (params.epsilon - arr))
    return float(out) if out.ndim == 0 else out


def classic_strategy(params: ModelParams) -> float:
    """Constant log-optimal fraction pi_c = (mu0 - r) / sigma^2."""
    return (params.mu0 - params.r) / params.sigma**2


def optimal_strategy_fixed(state: PhaseState, params: ModelParams, n: int) -> float:
    """Raw optimal fraction when exactly n downcrossings are believed.

    During an incomplete forced crossing the conditioned drift applies in
    full; in Up and Free phases (and once i0 >= n) the classic fraction is
    optimal.  The returned value is unprojected.
    """
    pi_c = classic_strategy(params)
    if state.phase == Phase.DOWN and state.i0 < n:
        return pi_c + conditioned_drift(state.x, params) / params.sigma
    return pi_c


def mixture_weight(law: XiLaw, state: PhaseState, params: ModelParams) -> MixtureWeight:
    """Posterior scenario weight for a believed count law at a running state."""
    p = params.p
    head = law.head_mass(state.i0)
    tail = law.down_tail(state.i0, p)
    if state.phase == Phase.DOWN:
        if state.x >= params.epsilon:
            raise ValueError(
                f"down-phase state beyond the breakout level: x={state.x}"
            )
        down = _down_ratio(state.x, params) * tail
        return MixtureWeight(value=head + down, down_mass=down)
    return MixtureWeight(value=head + p * tail, down_mass=0.0)


def optimal_strategy_random(state: PhaseState, params: ModelParams, law: XiLaw) -> float:
    """Raw optimal fraction when the believed count follows ``law``.

    The fixed-count adjustment is scaled by the posterior mass of the
    scenarios still inside a forced crossing; it vanishes in Up and Free
    phases, recovering the classic fraction exactly.
    """
    pi_c = classic_strategy(params)
    mw = mixture_weight(law, state, params)
    if mw.down_mass == 0.0:
        return pi_c
    ratio = mw.down_mass / mw.value
    return pi_c + conditioned_drift(state.x, params) / params.sigma * ratio


def project_unit(pi):
    """Clamp a fraction (scalar or array) onto the tradable range [0, 1]."""
    out = np.clip(pi, 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def strategy_grid(
    x: np.ndarray,
    phase: np.ndarray,
    i0: np.ndarray,
    params: ModelParams,
    law: XiLaw,
) -> np.ndarray:
    """Raw optimal fraction along a recorded path, vectorized.

    ``x``, ``phase`` and ``i0`` are parallel arrays as produced by the
    simulator; ``law`` may be :class:`FixedCount` to recover the fixed-count
    strategy.  Agrees pointwise with the scalar functions.
    """
    pi_c = classic_strategy(params)
    out = np.full(x.shape, pi_c)
    mask = np.asarray(phase) == int(Phase.DOWN)
    if not mask.any():
        return out
    xs = np.asarray(x, dtype=float)[mask]
    i0s = np.asarray(i0)[mask].astype(np.int64)
    i_max = int(i0s.max())
    p = params.p
    head_tab = np.array([law.head_mass(i) for i in range(i_max + 1)])
    tail_tab = np.array([law.down_tail(i, p) for i in range(i_max + 1)])
    s_eps = math.exp(-2.0 * params.mu * params.epsilon)
    s_lo = math.exp(2.0 * params.mu * params.alpha)
    ratio_x = (s_eps - np.exp(-2.0 * params.mu * xs)) / (s_eps - s_lo)
    down = ratio_x * tail_tab[i0s]
    value = head_tab[i0s] + down
    cd = 2.0 * params.mu / np.expm1(-2.0 * params.mu * (params.epsilon - xs))
    frac = np.where(down > 0.0, down / value, 0.0)
    out[mask] = pi_c + cd / params.sigma * frac
    return out
