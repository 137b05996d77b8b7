"""Order-statistic (L-type) location estimators.

All estimators operate on a sorted sample and are expressed through
fractional element weights: each order statistic X_i owns the unit
interval (i-1, i] of the position axis, and every block/trim boundary is
converted to per-element weights by interval overlap.  With integral
boundaries this reduces exactly to the whole-element definitions; with
fractional boundaries the straddled element receives the fractional part
of the boundary as weight (deterministic, O(n)).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    GeometryError,
    OverTrimError,
    ParameterError,
)

_TOL = 1e-9


class QuantileConvention(enum.Enum):
    CEILING = "ceiling"
    MIDPOINT = "midpoint"


CEILING = QuantileConvention.CEILING
MIDPOINT = QuantileConvention.MIDPOINT


class SQMContinuityWarning(UserWarning):
    """Breakdown-point continuity caveat for the stratified quantile mean."""


@dataclass(frozen=True)
class SortedSample:
    """Ascending order statistics of an i.i.d. sample."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise DomainError("sample must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(v)):
            raise DomainError("sample values must be finite")
        if np.any(np.diff(v) < 0):
            raise DomainError("sample values must be nondecreasing")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_data(cls, data) -> "SortedSample":
        return cls(np.sort(np.asarray(data, dtype=float)))

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class TrimSpec:
    """(epsilon, gamma) trimming pair with binomial order and strata count."""

    epsilon: float
    gamma: float = 1.0
    nu: int = 3
    strata: int = 3

    def __post_init__(self):
        if self.epsilon < 0 or self.gamma < 0:
            raise DomainError("epsilon and gamma must be nonnegative")
        if self.epsilon > 1.0 / (1.0 + self.gamma) + _TOL:
            raise DomainError(
                f"epsilon={self.epsilon} exceeds 1/(1+gamma)={1/(1+self.gamma):.6g}"
            )
        if self.nu < 1:
            raise DomainError("nu must be >= 1")
        if self.strata < 3 or self.strata % 2 == 0:
            raise DomainError("strata count b must be odd and >= 3")


def _as_sample(s) -> SortedSample:
    if isinstance(s, SortedSample):
        return s
    return SortedSample.from_data(s)


def _overlap_weights(n: int, lo: float, hi: float) -> np.ndarray:
    """Weight of each order statistic: overlap of (i-1, i] with [lo, hi]."""
    i = np.arange(1, n + 1, dtype=float)
    return np.clip(np.minimum(i, hi) - np.maximum(i - 1.0, lo), 0.0, 1.0)


def empirical_quantile(s, p: float, conv: QuantileConvention = CEILING) -> float:
    """Empirical quantile X_ceil(np); p=0 maps to the minimum.

    The midpoint convention averages the two straddling order statistics
    when n*p is integral.
    """
    s = _as_sample(s)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"quantile level {p} outside [0, 1]")
    n, x = s.n, s.values
    pos = n * p
    near = round(pos)
    if conv is MIDPOINT and abs(pos - near) <= _TOL * max(1.0, n) and 1 <= near < n:
        return 0.5 * (x[near - 1] + x[near])
    idx = math.ceil(pos - _TOL)
    idx = min(max(idx, 1), n)
    return float(x[idx - 1])


def quantile_average(
    s, t: TrimSpec, defn: str = "eq1", conv: QuantileConvention = CEILING
) -> float:
    """Half-sum of two empirical quantiles at asymmetric trim levels."""
    s = _as_sample(s)
    eps, g = t.epsilon, t.gamma
    if defn == "eq1":
        return 0.5 * (
            empirical_quantile(s, g * eps, conv) + empirical_quantile(s, 1.0 - eps, conv)
        )
    if defn == "eq2":
        return 0.5 * (
            empirical_quantile(s, eps, conv) + empirical_quantile(s, 1.0 - g * eps, conv)
        )
    raise DomainError(f"unknown quantile-average definition {defn!r}")


def trimmed_mean(s, t: TrimSpec) -> float:
    """Mean after discarding n*gamma*eps smallest and n*eps largest values."""
    s = _as_sample(s)
    n, x = s.n, s.values
    lo = n * t.gamma * t.epsilon
    hi = n - n * t.epsilon
    if hi - lo <= _TOL:
        raise OverTrimError("trim proportions leave an empty core")
    w = _overlap_weights(n, lo, hi)
    return float(np.dot(w, x) / (hi - lo))


def winsorized_mean(s, t: TrimSpec) -> float:
    """Trimmed tails replaced by the nearest retained order statistics."""
    s = _as_sample(s)
    n, x = s.n, s.values
    g = n * t.gamma * t.epsilon
    h = n * t.epsilon
    if n - h - g <= _TOL:
        raise OverTrimError("trim proportions leave an empty core")
    w = _overlap_weights(n, g, n - h)
    if g > _TOL:
        w[min(int(math.floor(g + _TOL)), n - 1)] += g
    if h > _TOL:
        w[max(int(math.ceil(n - h - _TOL)), 1) - 1] += h
    return float(np.dot(w, x) / n)


def block_winsorized_mean(s, t: TrimSpec) -> float:
    """Double-weights the innermost left/right retained blocks.

    The doubled blocks have sizes n*gamma*eps and n*eps, so the implied
    weights sum to n exactly.
    """
    s = _as_sample(s)
    n, x = s.n, s.values
    g = n * t.gamma * t.epsilon
    h = n * t.epsilon
    if math.floor(g + _TOL) < 1 or math.floor(h + _TOL) < 1:
        raise GeometryError("block Winsorization needs at least one element per block")
    if 2 * g + 2 * h > n + _TOL:
        raise GeometryError("doubled blocks overlap: 2*eps*(1+gamma) > 1")
    w = _overlap_weights(n, g, n - h)
    w += _overlap_weights(n, g, 2 * g)
    w += _overlap_weights(n, n - 2 * h, n - h)
    return float(np.dot(w, x) / n)


def _sm_blocks(n: int, t: TrimSpec) -> list[tuple[float, float]]:
    """Block position intervals of the stratified mean (middle stratum).

    Blocks come in mirror pairs at the positions of the double-sum
    definition, plus a centered block when the block count is odd or has a
    fractional part; with fewer than two blocks the construction
    degenerates to the trimmed core [n*eps, n*(1-eps)], which keeps the
    breakdown point continuous in eps.
    """
    b = t.strata
    eps = t.epsilon
    width = 2.0 * n * eps / (b - 1)
    j_real = (b - 1) / (2.0 * b * eps)
    if j_real < 1.0 - _TOL:
        raise GeometryError("parameters yield zero stratified blocks")
    if j_real < 2.0 - _TOL:
        return [(n * eps, n * (1.0 - eps))]
    j_count = int(math.floor(j_real + _TOL))
    integral = abs(j_real - round(j_real)) <= _TOL
    blocks: list[tuple[float, float]] = []
    for j in range(1, j_count // 2 + 1):
        lo = (2 * b * j - b - 1) * n * eps / (b - 1)
        blocks.append((lo, lo + width))
        blocks.append((n - lo - width, n - lo))
    if j_count % 2 == 1 or not integral:
        blocks.append((n / 2.0 - width / 2.0, n / 2.0 + width / 2.0))
    return blocks


def stratified_mean(s, t: TrimSpec) -> float:
    """Mean of the middle stratum after grouping ordered blocks into b strata."""
    s = _as_sample(s)
    n, x = s.n, s.values
    w = np.zeros(n)
    for lo, hi in _sm_blocks(n, t):
        w += _overlap_weights(n, lo, hi)
    total = w.sum()
    if total <= _TOL:
        raise GeometryError("stratified blocks carry no weight")
    return float(np.dot(w, x) / total)


def binomial_mean(s, t: TrimSpec) -> float:
    """Block-weighted mean with alternating-binomial per-group weights.

    Group j of each period carries weight 1 - (-1)^j C(nu, j), applied to
    the block and its mirror image; weights may be negative for odd
    nu >= 3 but their signed total is preserved.
    """
    s = _as_sample(s)
    n, x = s.n, s.values
    eps, g, nu = t.epsilon, t.gamma, t.nu
    periods_real = 0.5 / (eps * (nu + 1))
    periods = int(math.floor(periods_real + _TOL))
    if periods < 1:
        raise GeometryError("epsilon too large for the requested binomial order")
    fractional = periods_real - periods > _TOL
    w = np.zeros(n)

    def block(i, j):
        lo = n * g * eps * (j + (i - 1) * (nu + 1))
        hi = n * eps * (j + (i - 1) * (nu + 1) + 1)
        return 1.0 - (-1.0) ** j * math.comb(nu, j), lo, hi

    for i in range(1, periods + 1):
        for j in range(nu + 1):
            wj, lo, hi = block(i, j)
            if wj == 0.0:
                continue
            if hi > n / 2.0 + _TOL * n:
                raise GeometryError("binomial blocks exceed the lower half-sample")
            w += wj * _overlap_weights(n, lo, hi)
            w += wj * _overlap_weights(n, n - hi, n - lo)
    if fractional and abs(g - 1.0) <= _TOL:
        # fractional tail period: its first weighted block is recentred on
        # the sample middle (breakdown-point continuity, mirroring the
        # stratified-mean construction)
        for j in range(nu + 1):
            wj, lo, hi = block(periods + 1, j)
            if wj != 0.0:
                width = hi - lo
                w += wj * _overlap_weights(n, (n - width) / 2.0, (n + width) / 2.0)
                break
    total = w.sum()
    if abs(total) <= _TOL:
        raise GeometryError("binomial weights cancel to zero")
    return float(np.dot(w, x) / total)


def stratified_quantile_mean(
    s, t: TrimSpec, conv: QuantileConvention = CEILING
) -> float:
    """Equal-weight average of quantile averages at odd multiples of eps."""
    s = _as_sample(s)
    eps, g = t.epsilon, t.gamma
    m_real = 0.25 / eps
    m = round(m_real)
    if m < 1 or abs(m_real - m) > 1e-6:
        nearest = 0.25 / max(m, 1)
        raise ParameterError(
            f"1/(4*eps) = {m_real:.6g} is not integral; nearest valid eps is "
            f"{nearest:.6g}",
            suggestion=nearest,
        )
    warnings.warn(
        "SQM term counts force 1/eps to be a multiple of 4; the breakdown "
        "point is not continuous in eps at these values",
        SQMContinuityWarning,
        stacklevel=2,
    )
    acc = 0.0
    for i in range(1, m + 1):
        lvl = (2 * i - 1) * eps
        acc += 0.5 * (
            empirical_quantile(s, g * lvl, conv)
            + empirical_quantile(s, 1.0 - lvl, conv)
        )
    return acc / m


def median(s) -> float:
    """Midpoint convention: even-length samples average the central pair."""
    return float(np.median(_as_sample(s).values))


def subsample_average(
    estimator,
    data,
    t: TrimSpec,
    r: int = 100,
    seed: int = 0,
) -> float:
    """Decimal-boundary fallback: average the estimator over r subsamples.

    Subsamples are drawn without replacement at the largest size n' <= n
    making n'*eps and n'*gamma*eps integral; results are averaged.
    """
    data = np.asarray(data, dtype=float)
    n = data.size

    def boundaries_integral(m: int) -> bool:
        for v in (m * t.epsilon, m * t.gamma * t.epsilon):
            if abs(v - round(v)) > _TOL:
                return False
        return True

    n_sub = next((m for m in range(n, 0, -1) if boundaries_integral(m)), 0)
    if n_sub == 0:
        raise ParameterError("no subsample size makes the trim boundaries integral")
    if n_sub == n:
        return estimator(SortedSample.from_data(data), t)
    rng = np.random.default_rng(seed)
    out = 0.0
    for _ in range(r):
        sub = rng.choice(data, size=n_sub, replace=False)
        out += estimator(SortedSample.from_data(sub), t)
    return out / r
