"""Closed-form worst-case and concentration bounds.

All quantile-average bias bounds are expressed in standard-deviation
units (mean 0, sd 1 normalization).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, UnsupportedParameterError


@dataclass(frozen=True)
class BoundQuery:
    epsilon: float = 0.0
    gamma: float = 1.0
    k: float = 1.0
    t: float = 0.0  # deviation in units of sigma/sqrt(k)
    n: int = 1
    sigma: float = 1.0

    def __post_init__(self):
        if self.gamma < 0 or self.sigma <= 0 or self.n < 1:
            raise DomainError("require gamma >= 0, sigma > 0, n >= 1")
        if not 0.0 <= self.epsilon <= 1.0 / (1.0 + self.gamma) + 1e-12:
            raise DomainError("epsilon outside [0, 1/(1+gamma)]")


def sup_qa_general(epsilon: float, gamma: float) -> float:
    """Worst-case |QA - mean|/sd over all finite-variance distributions."""
    if gamma < 0:
        raise DomainError("gamma must be nonnegative")
    if epsilon <= 0:
        raise DomainError("bound diverges as epsilon -> 0 (infinite at epsilon=0)")
    if epsilon > 1.0 / (1.0 + gamma) + 1e-12:
        raise DomainError("epsilon outside (0, 1/(1+gamma)]")
    ge = gamma * epsilon
    return 0.5 * (math.sqrt(ge / (1.0 - ge)) + math.sqrt((1.0 - epsilon) / epsilon))


def sup_qa_unimodal(epsilon: float, gamma: float) -> float:
    """Refined worst-case bound for unimodal distributions (gamma < 5).

    Piecewise in epsilon with the branch seam at 1/6; continuous there.
    """
    if gamma < 0:
        raise DomainError("gamma must be nonnegative")
    if gamma >= 5.0:
        raise UnsupportedParameterError(
            "unimodal bound for gamma >= 5 is not covered by this implementation"
        )
    if epsilon <= 0:
        raise DomainError("bound diverges as epsilon -> 0 (infinite at epsilon=0)")
    if epsilon > 1.0 / (1.0 + gamma) + 1e-12:
        raise DomainError("epsilon outside (0, 1/(1+gamma)]")
    ge = gamma * epsilon
    right = math.sqrt(3.0 * ge / (4.0 - 3.0 * ge))
    if epsilon <= 1.0 / 6.0:
        left = math.sqrt(4.0 / (9.0 * epsilon) - 1.0)
    else:
        left = math.sqrt(3.0 * (1.0 - epsilon) / (4.0 - 3.0 * (1.0 - epsilon)))
    return 0.5 * (left + right)


def concentration_bound(q: BoundQuery) -> float:
    """P(gamma-MoM - mean > t*sigma/sqrt(k)) <= exp(-2n/k * (1/(1+gamma) - 1/(k+t^2))^2)."""
    if q.k < 1 or q.n < q.k:
        raise DomainError("require k >= 1 and n >= k")
    gap = 1.0 / (1.0 + q.gamma) - 1.0 / (q.k + q.t * q.t)
    return math.exp(-2.0 * q.n / q.k * gap * gap)


def monotone_k_interval(gamma: float, t: float) -> tuple[float, float]:
    """Closed-form k-interval on which the concentration bound is nonincreasing."""
    if gamma < 0:
        raise DomainError("gamma must be nonnegative")
    t2 = t * t
    if t2 >= gamma + 1.0:
        raise DomainError("empty interval: t^2 >= gamma + 1")
    k_lo = gamma - t2 + 1.0
    disc = 9.0 * gamma * gamma + 18.0 * gamma - 8.0 * gamma * t2 - 8.0 * t2 + 9.0
    k_hi = 0.5 * math.sqrt(disc) + 0.5 * (3.0 * gamma - 2.0 * t2 + 3.0)
    return k_lo, k_hi


def gamma_mom_bias_bound(k: float, gamma: float, sigma: float) -> float:
    """Conservative asymptotic bias bound sqrt(gamma/k) * sigma."""
    if k < 1 or gamma < 0 or sigma <= 0:
        raise DomainError("require k >= 1, gamma >= 0, sigma > 0")
    return math.sqrt(gamma / k) * sigma


def lambert_w_minus1(x: float) -> float:
    """W_{-1} branch of the Lambert W function on [-1/e, 0).

    Halley iteration from an asymptotic seed: near the branch point the
    series in sqrt(2(1 + e*x)), near zero the log-log expansion.
    """
    if not -1.0 / math.e <= x < 0.0:
        raise DomainError("W_-1 is real only on [-1/e, 0)")
    if x == -1.0 / math.e:
        return -1.0
    p2 = 2.0 * (1.0 + math.e * x)
    if p2 < 0.5:
        p = math.sqrt(p2)
        w = -1.0 - p - p2 / 3.0
    else:
        lx = math.log(-x)
        w = lx - math.log(-lx)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        step = f / denom
        w -= step
        if abs(step) <= 1e-14 * abs(w):
            break
    return w


def expected_hl_exponential(lam: float) -> float:
    """E[Hodges-Lehmann estimator] for an exponential with scale lam."""
    if lam <= 0:
        raise DomainError("scale must be positive")
    return (-lambert_w_minus1(-0.5 / math.e) - 1.0) / 2.0 * lam
