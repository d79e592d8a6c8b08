"""Distributions for the required number of downcrossings.

The trader believes the band will see xi full downcrossings before the
breakout, where xi is an integer random variable with weights
alpha_n = P(xi = n).  Scenario n is the event A_n (at least n downcrossings
happen), which has probability p^n, so the believed event A_xi has

    P(A_xi) = sum_n alpha_n p^n.

Conditioning on A_xi reweights the count: under the conditioned measure the
weights become beta_n = alpha_n p^n / P(A_xi).  Both directions of that
conversion are provided, together with the head and discounted-tail sums
used by the allocation formulas:

    A(i0) = sum_{n <= i0} alpha_n
    D(i0) = sum_{n > i0} alpha_n p^(n - 1 - i0)

where i0 is the number of downcrossings completed so far.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "XiLaw",
    "FixedCount",
    "GeometricLaw",
    "FiniteSupportLaw",
    "GeometricTailLaw",
    "prob_axi",
    "law_under_q",
    "law_from_q",
    "finite_law_from_q",
]

# Weight vectors summing to 1 within EXACT_TOL pass through unchanged; within
# RENORM_TOL they are renormalized; anything further off is rejected.
EXACT_TOL = 1e-12
RENORM_TOL = 1e-9


def _clean_weights(raw) -> tuple[float, ...]:
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("weights must be a nonempty 1-d sequence")
    if not np.isfinite(arr).all():
        raise ValueError("weights must be finite")
    if (arr < 0.0).any():
        raise ValueError("weights must be nonnegative")
    total = float(arr.sum())
    if abs(total - 1.0) <= EXACT_TOL:
        return tuple(float(v) for v in arr)
    if abs(total - 1.0) <= RENORM_TOL:
        return tuple(float(v / total) for v in arr)
    raise ValueError(f"weights sum to {total!r}, not 1 within {RENORM_TOL}")


def _check_p(p: float) -> None:
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")


class XiLaw:
    """Base class for downcrossing-count distributions."""

    def pmf(self, n: int) -> float:
        """P(xi = n)."""
        raise NotImplementedError

    def event_prob(self, p: float) -> float:
        """P(A_xi) = sum_n alpha_n p^n."""
        raise NotImplementedError

    def head_mass(self, i0: int) -> float:
        """A(i0) = sum_{n <= i0} alpha_n, the scenarios already satisfied."""
        raise NotImplementedError

    def down_tail(self, i0: int, p: float) -> float:
        """D(i0) = sum_{n > i0} alpha_n p^(n - 1 - i0)."""
        raise NotImplementedError

    def support_bound(self) -> int | None:
        """Largest n with positive mass, or None for unbounded support."""
        raise NotImplementedError


@dataclass(frozen=True)
class FixedCount(XiLaw):
    """Deterministic count: xi = n with probability 1."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 0 or self.n != int(self.n):
            raise ValueError(f"n must be a nonnegative integer, got {self.n}")

    def pmf(self, n: int) -> float:
        return 1.0 if n == self.n else 0.0

    def event_prob(self, p: float) -> float:
        _check_p(p)
        return p**self.n

    def head_mass(self, i0: int) -> float:
        return 1.0 if i0 >= self.n else 0.0

    def down_tail(self, i0: int, p: float) -> float:
        _check_p(p)
        if self.n <= i0:
            return 0.0
        return p ** (self.n - 1 - i0)

    def support_bound(self) -> int | None:
        return self.n


@dataclass(frozen=True)
class GeometricLaw(XiLaw):
    """Geometric count: P(xi = n) = q^n (1 - q), n >= 0."""

    q: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.q < 1.0):
            raise ValueError(f"q must lie in [0, 1), got {self.q}")

    def pmf(self, n: int) -> float:
        if n < 0:
            return 0.0
        return self.q**n * (1.0 - self.q)

    def event_prob(self, p: float) -> float:
        _check_p(p)
        return (1.0 - self.q) / (1.0 - p * self.q)

    def head_mass(self, i0: int) -> float:
        if i0 < 0:
            return 0.0
        return 1.0 - self.q ** (i0 + 1)

    def down_tail(self, i0: int, p: float) -> float:
        _check_p(p)
        i0 = max(i0, -1)
        return (1.0 - self.q) * self.q ** (i0 + 1) / (1.0 - p * self.q)

    def support_bound(self) -> int | None:
        return 0 if self.q == 0.0 else None


@dataclass(frozen=True)
class FiniteSupportLaw(XiLaw):
    """Arbitrary weights alpha_0 .. alpha_N on {0, .., N}."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", _clean_weights(self.weights))

    def pmf(self, n: int) -> float:
        if 0 <= n < len(self.weights):
            return self.weights[n]
        return 0.0

    def event_prob(self, p: float) -> float:
        _check_p(p)
        return float(sum(w * p**n for n, w in enumerate(self.weights)))

    def head_mass(self, i0: int) -> float:
        return float(sum(self.weights[: i0 + 1])) if i0 >= 0 else 0.0

    def down_tail(self, i0: int, p: float) -> float:
        _check_p(p)
        return float(
            sum(
                w * p ** (n - 1 - i0)
                for n, w in enumerate(self.weights)
                if n > i0
            )
        )

    def support_bound(self) -> int | None:
        return len(self.weights) - 1


@dataclass(frozen=True)
class GeometricTailLaw(XiLaw):
    """Explicit head weights followed by a geometric tail.

    The head alpha_0 .. alpha_N sums to some S in (0, 1); the remaining mass
    is spread geometrically, alpha_n = q^n (1 - q) for n > N, with
    q = (1 - S)^(1/(N+1)) chosen so that the total mass is exactly 1:
    the tail sums to q^(N+1) = 1 - S.
    """

    head: tuple[float, ...]

    def __post_init__(self) -> None:
        arr = np.asarray(self.head, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("head must be a nonempty 1-d sequence")
        if not np.isfinite(arr).all() or (arr < 0.0).any():
            raise ValueError("head weights must be finite and nonnegative")
        total = float(arr.sum())
        if not (0.0 < total < 1.0):
            raise ValueError(f"head mass must lie strictly in (0, 1), got {total}")
        object.__setattr__(self, "head", tuple(float(v) for v in arr))

    @property
    def head_total(self) -> float:
        return float(sum(self.head))

    @property
    def q(self) -> float:
        n_head = len(self.head)
        return (1.0 - self.head_total) ** (1.0 / n_head)

    def pmf(self, n: int) -> float:
        if n < 0:
            return 0.0
        if n < len(self.head):
            return self.head[n]
        q = self.q
        return q**n * (1.0 - q)

    def event_prob(self, p: float) -> float:
        _check_p(p)
        q = self.q
        n_head = len(self.head)
        head = sum(w * p**n for n, w in enumerate(self.head))
        tail = (1.0 - q) * (p * q) ** n_head / (1.0 - p * q)
        return float(head + tail)

    def head_mass(self, i0: int) -> float:
        if i0 < 0:
            return 0.0
        if i0 < len(self.head):
            return float(sum(self.head[: i0 + 1]))
        return 1.0 - self.q ** (i0 + 1)

    def down_tail(self, i0: int, p: float) -> float:
        _check_p(p)
        q = self.q
        n_last = len(self.head) - 1
        head = sum(
            w * p ** (n - 1 - i0) for n, w in enumerate(self.head) if n > i0
        )
        m0 = max(n_last, i0) + 1
        tail = (1.0 - q) * q**m0 * p ** (m0 - 1 - i0) / (1.0 - p * q)
        return float(head + tail)

    def support_bound(self) -> int | None:
        return None


def prob_axi(law: XiLaw, p: float) -> float:
    """P(A_xi): probability the believed number of downcrossings occurs."""
    return law.event_prob(p)


def law_under_q(law: XiLaw, p: float, tail_tol: float = 1e-12) -> np.ndarray:
    """Weights of xi conditioned on A_xi: beta_n = alpha_n p^n / P(A_xi).

    Unbounded laws are truncated once the left-out conditional mass drops
    below ``tail_tol``, and the returned vector is renormalized to sum to 1.
    """
    _check_p(p)
    total = law.event_prob(p)
    bound = law.support_bound()
    if bound is not None:
        beta = np.array([law.pmf(n) * p**n / total for n in range(bound + 1)])
    else:
        vals: list[float] = []
        acc = 0.0
        n = 0
        while acc < 1.0 - tail_tol and n < 100_000:
            b = law.pmf(n) * p**n / total
            vals.append(b)
            acc += b
            n += 1
        beta = np.array(vals)
    return beta / beta.sum()


def law_from_q(beta, p: float) -> np.ndarray:
    """Invert the conditioning: alpha_n = (beta_n / p^n) / sum_i beta_i / p^i.

    ``beta`` are weights of the count observed under the conditioned measure;
    the result is the matching unconditioned weight vector.
    """
    _check_p(p)
    b = np.asarray(_clean_weights(beta))
    raw = b / p ** np.arange(b.size)
    return raw / raw.sum()


def finite_law_from_q(beta, p: float) -> FiniteSupportLaw:
    """Build the finite-support law whose conditioned weights are ``beta``."""
    return FiniteSupportLaw(tuple(law_from_q(beta, p)))
