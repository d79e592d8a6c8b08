"""Market parameters and band-crossing probabilities.

The price is modelled as Z_t = s0 * exp(sigma * X_t) where X is a Brownian
motion with reduced drift mu = (mu0 - sigma^2/2) / sigma.  A resistance band
is marked by two price levels s0_minus < s0 < s0_plus, or equivalently by the
log-scale offsets

    alpha   = -log(s0_minus / s0) / sigma   (depth of a downcrossing),
    epsilon =  log(s0_plus / s0) / sigma    (breakout level).

A downcrossing is a move of X from 0 down to -alpha; the band is broken when
X reaches epsilon.  The probability that, starting from 0, X completes a
downcrossing before breaking out is

    p = (S(eps) - S(0)) / (S(eps) - S(-alpha)),    S(x) = exp(-2 mu x),

valid for mu > 0, where hitting -alpha is certain once the breakout race is
lost.  Repeated crossings are independent, so n of them happen before the
breakout with probability p^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MarketInputs",
    "ModelParams",
    "derive_params",
    "scale_fn",
    "crossing_prob_p",
    "prob_an",
]


@dataclass(frozen=True)
class MarketInputs:
    """Raw market description in price units.

    Attributes
    ----------
    mu0 : float
        Arithmetic drift of the price.
    sigma : float
        Volatility, must be positive.
    r : float
        Risk-free rate.
    s0 : float
        Current price, must be positive.
    s0_minus : float
        Lower band level, in (0, s0).
    s0_plus : float
        Breakout level, above s0.
    """

    mu0: float
    sigma: float
    r: float
    s0: float
    s0_minus: float
    s0_plus: float

    def __post_init__(self) -> None:
        if not (self.sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not (self.s0 > 0.0):
            raise ValueError(f"s0 must be positive, got {self.s0}")
        if not (0.0 < self.s0_minus < self.s0 < self.s0_plus):
            raise ValueError(
                "band levels must satisfy 0 < s0_minus < s0 < s0_plus, got "
                f"s0_minus={self.s0_minus}, s0={self.s0}, s0_plus={self.s0_plus}"
            )


@dataclass(frozen=True)
class ModelParams:
    """Derived model parameters on the log scale.

    Built by :func:`derive_params`; carries the original inputs plus the
    reduced drift mu, the band offsets alpha and epsilon, and the single
    downcrossing probability p.
    """

    mu0: float
    sigma: float
    r: float
    s0: float
    alpha: float
    epsilon: float
    mu: float
    p: float

    @classmethod
    def from_log_band(
        cls,
        mu0: float,
        sigma: float,
        r: float,
        alpha: float,
        epsilon: float,
        s0: float = 1.0,
    ) -> "ModelParams":
        """Construct params directly from log-scale band offsets."""
        if not (sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {sigma}")
        if not (alpha > 0.0 and epsilon > 0.0):
            raise ValueError(
                f"degenerate band geometry: alpha={alpha}, epsilon={epsilon}"
            )
        inputs = MarketInputs(
            mu0=mu0,
            sigma=sigma,
            r=r,
            s0=s0,
            s0_minus=s0 * math.exp(-sigma * alpha),
            s0_plus=s0 * math.exp(sigma * epsilon),
        )
        return derive_params(inputs)


def scale_fn(x, mu: float):
    """Scale function S(x) = exp(-2 mu x) of the drifted Brownian motion.

    Accepts a scalar or ndarray ``x`` and returns the same shape.
    """
    return np.exp(-2.0 * mu * np.asarray(x))


def _p_from(mu: float, alpha: float, epsilon: float) -> float:
    if not (alpha > 0.0 and epsilon > 0.0):
        raise ValueError(f"degenerate band geometry: alpha={alpha}, epsilon={epsilon}")
    s_eps = math.exp(-2.0 * mu * epsilon)
    s_lo = math.exp(2.0 * mu * alpha)
    return (s_eps - 1.0) / (s_eps - s_lo)


def crossing_prob_p(params: ModelParams) -> float:
    """Probability p of one full downcrossing before breakout, from X = 0."""
    return _p_from(params.mu, params.alpha, params.epsilon)


def prob_an(p: float, n: int) -> float:
    """P(A_n) = p^n: probability of at least n downcrossings before breakout."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if n < 0 or n != int(n):
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    return p ** int(n)


def derive_params(inputs: MarketInputs) -> ModelParams:
    """Derive log-scale parameters from market inputs.

    Raises
    ------
    ValueError
        If the reduced drift mu = (mu0 - sigma^2/2)/sigma is not strictly
        positive.  With mu <= 0 the breakout is not certain and the model's
        crossing-count analysis does not apply: drift regime not supported.
    """
    mu = (inputs.mu0 - inputs.sigma**2 / 2.0) / inputs.sigma
    if not (mu > 0.0):
        raise ValueError(
            f"drift regime not supported: mu = (mu0 - sigma^2/2)/sigma = {mu:.6g} "
            "must be strictly positive"
        )
    alpha = -math.log(inputs.s0_minus / inputs.s0) / inputs.sigma
    epsilon = math.log(inputs.s0_plus / inputs.s0) / inputs.sigma
    p = _p_from(mu, alpha, epsilon)
    return ModelParams(
        mu0=inputs.mu0,
        sigma=inputs.sigma,
        r=inputs.r,
        s0=inputs.s0,
        alpha=alpha,
        epsilon=epsilon,
        mu=mu,
        p=p,
    )
