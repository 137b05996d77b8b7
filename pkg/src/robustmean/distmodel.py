"""Parametric distribution models and quasi/pseudo random sampling.

Each distribution is described by a small immutable spec (family + shape +
scale + location) exposing the quantile function, density, and moments.
Sampling pushes Sobol or seeded-uniform streams through the quantile
function (inverse-CDF transform).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize
from scipy import stats as sps
from scipy.stats import qmc

from .errors import (
    DomainError,
    InfiniteEndpointError,
    MomentDivergenceError,
    RangeError,
    UnsupportedDimensionError,
)

FAMILIES = (
    "exponential",
    "weibull",
    "gamma",
    "lognormal",
    "pareto",
    "gaussian",
    "generalized_gaussian",
    "uniform",
)

# Families whose standard form needs a shape parameter.
_SHAPED = {"weibull", "gamma", "lognormal", "pareto", "generalized_gaussian"}

# Support type of the *standard* (location 0) member: (left bounded, right bounded)
_BOUNDED = {
    "exponential": (True, False),
    "weibull": (True, False),
    "gamma": (True, False),
    "lognormal": (True, False),
    "pareto": (True, False),
    "gaussian": (False, False),
    "generalized_gaussian": (False, False),
    "uniform": (True, True),
}

SOBOL_MAX_DIM = 64


@dataclass(frozen=True)
class DistributionSpec:
    """Parametric family plus parameters.

    ``shape`` is the Weibull/gamma/Pareto alpha, the generalized-Gaussian
    beta, or the lognormal sdlog; it is ignored (may be None) for the
    shapeless families.  ``scale`` is the scale lambda (x_m for Pareto);
    ``location`` shifts the support.
    """

    family: str
    shape: float | None = None
    scale: float = 1.0
    location: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        if not self.scale > 0:
            raise DomainError("scale must be positive")
        if self.family in _SHAPED:
            if self.shape is None or not self.shape > 0:
                raise DomainError(f"{self.family} requires a positive shape parameter")


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    sd: float
    skewness: float
    kurtosis: float  # non-excess (Gaussian = 3)

    def __post_init__(self):
        if not self.sd > 0:
            raise DomainError("standard deviation must be positive")


@dataclass
class SampleVector:
    """An i.i.d. sample with its generation provenance."""

    values: np.ndarray
    sorted: bool
    provenance: str  # quasi | pseudo | external
    seed: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.sorted and np.any(np.diff(self.values) < 0):
            raise DomainError("sorted flag set on a non-sorted sample")


@lru_cache(maxsize=256)
def _frozen(spec: DistributionSpec):
    fam, a, lam, mu = spec.family, spec.shape, spec.scale, spec.location
    if fam == "exponential":
        return sps.expon(loc=mu, scale=lam)
    if fam == "weibull":
        return sps.weibull_min(a, loc=mu, scale=lam)
    if fam == "gamma":
        return sps.gamma(a, loc=mu, scale=lam)
    if fam == "lognormal":
        return sps.lognorm(a, loc=mu, scale=lam)
    if fam == "pareto":
        # scipy's support is [scale, inf) at loc=0, i.e. x_m = scale.
        return sps.pareto(a, loc=mu, scale=lam)
    if fam == "gaussian":
        return sps.norm(loc=mu, scale=lam)
    if fam == "generalized_gaussian":
        return sps.gennorm(a, loc=mu, scale=lam)
    return sps.uniform(loc=mu, scale=lam)


def scaled(spec: DistributionSpec, mult: float, shift: float = 0.0) -> DistributionSpec:
    """Spec of ``mult * X + shift`` for X ~ spec (mult > 0)."""
    if not mult > 0:
        raise DomainError("scale multiplier must be positive")
    return DistributionSpec(
        family=spec.family,
        shape=spec.shape,
        scale=spec.scale * mult,
        location=spec.location * mult + shift,
    )


def quantile(spec: DistributionSpec, p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"quantile level {p} outside [0, 1]")
    left_bounded, right_bounded = _BOUNDED[spec.family]
    if p == 0.0 and not left_bounded:
        raise InfiniteEndpointError(f"{spec.family}: Q(0) = -inf")
    if p == 1.0 and not right_bounded:
        raise InfiniteEndpointError(f"{spec.family}: Q(1) = +inf")
    return float(_frozen(spec).ppf(p))


def quantiles(spec: DistributionSpec, p: np.ndarray) -> np.ndarray:
    """Vectorized quantile; endpoints must be avoided by the caller."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise DomainError("quantile levels outside [0, 1]")
    return np.asarray(_frozen(spec).ppf(p), dtype=float)


def density(spec: DistributionSpec, x: float) -> float:
    return float(_frozen(spec).pdf(x))


def cdf(spec: DistributionSpec, x: float) -> float:
    return float(_frozen(spec).cdf(x))


def _pareto_check_moments(alpha: float, order: int):
    for m in range(1, order + 1):
        if alpha <= m:
            raise MomentDivergenceError(
                f"pareto with alpha={alpha} has no finite moment of order {m}",
                order=m,
            )


def moment_summary(spec: DistributionSpec) -> MomentSummary:
    """Closed-form mean, sd, skewness, and (non-excess) kurtosis."""
    if spec.family == "pareto":
        _pareto_check_moments(spec.shape, 4)
    m, v, sk, ex = _frozen(spec).stats(moments="mvsk")
    m, v, sk, ex = float(m), float(v), float(sk), float(ex)
    if not (math.isfinite(m) and math.isfinite(v) and math.isfinite(sk) and math.isfinite(ex)):
        raise MomentDivergenceError(
            f"{spec.family}: moments up to order 4 are not all finite", order=4
        )
    return MomentSummary(mean=m, sd=math.sqrt(v), skewness=sk, kurtosis=ex + 3.0)


def numeric_moment_summary(spec: DistributionSpec, delta: float = 1e-12) -> MomentSummary:
    """Quantile-domain quadrature of E[X^m]; independent of moment_summary.

    Integrates Q(p)^m over (delta, 1-delta) with adaptive Gauss-Kronrod
    quadrature.  Used as a cross-check oracle; relative tolerance 1e-10.
    """
    dist = _frozen(spec)

    def raw(order: int) -> float:
        val, _ = integrate.quad(
            lambda p: dist.ppf(p) ** order, delta, 1.0 - delta,
            epsrel=1e-10, limit=400,
        )
        return val

    m1 = raw(1)
    m2 = raw(2)
    m3 = raw(3)
    m4 = raw(4)
    var = m2 - m1 * m1
    sd = math.sqrt(var)
    mu3 = m3 - 3 * m1 * m2 + 2 * m1**3
    mu4 = m4 - 4 * m1 * m3 + 6 * m1 * m1 * m2 - 3 * m1**4
    return MomentSummary(mean=m1, sd=sd, skewness=mu3 / sd**3, kurtosis=mu4 / var**2)


_KURTOSIS_BRACKETS = {
    # shape bracket chosen so kurtosis is monotone on it
    "gamma": (1e-2, 5e3),
    "weibull": (0.35, 3.2),  # right-skewed branch only
    "lognormal": (0.05, 2.5),
    "pareto": (4.02, 1e6),
    "generalized_gaussian": (0.3, 15.0),
}

_FIXED_KURTOSIS = {"exponential": 9.0, "gaussian": 3.0, "uniform": 1.8}


def _kurtosis_of_shape(family: str, shape: float) -> float:
    return moment_summary(DistributionSpec(family, shape=shape)).kurtosis


def solve_param_for_kurtosis(
    family: str, kurtosis_target: float, scale: float = 1.0
) -> DistributionSpec:
    """Find the shape parameter reproducing a target (non-excess) kurtosis."""
    if family in _FIXED_KURTOSIS:
        k = _FIXED_KURTOSIS[family]
        if abs(k - kurtosis_target) <= 1e-6:
            return DistributionSpec(family, scale=scale)
        raise RangeError(
            f"{family} has fixed kurtosis {k}", attainable=(k, k)
        )
    if family not in _KURTOSIS_BRACKETS:
        raise DomainError(f"unknown family {family!r}")
    lo, hi = _KURTOSIS_BRACKETS[family]
    k_lo = _kurtosis_of_shape(family, lo)
    k_hi = _kurtosis_of_shape(family, hi)
    k_min, k_max = min(k_lo, k_hi), max(k_lo, k_hi)
    if not (k_min <= kurtosis_target <= k_max):
        raise RangeError(
            f"{family}: kurtosis {kurtosis_target} outside attainable "
            f"[{k_min:.6g}, {k_max:.6g}]",
            attainable=(k_min, k_max),
        )
    root = optimize.brentq(
        lambda s: _kurtosis_of_shape(family, s) - kurtosis_target,
        lo, hi, xtol=1e-13, rtol=8.9e-16,
    )
    spec = DistributionSpec(family, shape=float(root), scale=scale)
    if abs(moment_summary(spec).kurtosis - kurtosis_target) > 1e-6:
        raise RangeError(
            f"{family}: root finding did not reach kurtosis {kurtosis_target}",
            attainable=(k_min, k_max),
        )
    return spec


def sobol_sequence(n: int, dim: int = 1, skip: int = 0) -> np.ndarray:
    """First ``n`` points of the standard (unscrambled) Sobol sequence.

    The raw sequence starts at the all-zero point; ``skip`` fast-forwards
    past the first ``skip`` points.  Deterministic and bit-exact.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if dim < 1 or dim > SOBOL_MAX_DIM:
        raise UnsupportedDimensionError(
            f"dim={dim} outside supported range 1..{SOBOL_MAX_DIM}"
        )
    eng = qmc.Sobol(d=dim, scramble=False, bits=30)
    if skip:
        eng.fast_forward(skip)
    with warnings.catch_warnings():
        # n need not be a power of two for estimation use
        warnings.simplefilter("ignore", UserWarning)
        pts = eng.random(n)
    return pts


def draw_sample(
    spec: DistributionSpec,
    n: int,
    mode: str = "quasi",
    seed: int = 0,
    skip: int = 1,
) -> SampleVector:
    """Sorted i.i.d.-style sample via the inverse-CDF transform.

    quasi mode uses a 1-D Sobol stream (skip >= 1 so the zero point, whose
    quantile may be -inf, is never used); pseudo mode uses a seeded uniform
    PRNG stream.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if mode == "quasi":
        if skip < 1:
            raise DomainError("quasi mode requires skip >= 1")
        u = sobol_sequence(n, dim=1, skip=skip)[:, 0]
    elif mode == "pseudo":
        u = np.random.default_rng(seed).random(n)
    else:
        raise DomainError(f"unknown sampling mode {mode!r}")
    x = quantiles(spec, u)
    x.sort()
    return SampleVector(values=x, sorted=True, provenance=mode, seed=seed)
