"""U-statistic kernel machinery and the weighted Hodges-Lehmann family.

A kernel of order k maps k sample values to their (weighted) mean; the
sorted kernel outputs over all k-subsets form the kernel sequence.  Exact
enumeration is used when feasible, otherwise a seeded quasi-bootstrap
draws index sets without replacement.  Fractional kernel orders are
realized by mixing floor(k)- and ceil(k)-sized draws.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError
from .estimators import (
    CEILING,
    QuantileConvention,
    SortedSample,
    TrimSpec,
    _as_sample,
    binomial_mean,
    empirical_quantile,
    quantile_average,
    stratified_quantile_mean,
    trimmed_mean,
    winsorized_mean,
)

EXACT_CAP = 10_000_000


@dataclass(frozen=True)
class KernelSpec:
    """Kernel order, weights, and evaluation strategy.

    ``k`` may be fractional (realized by the quasi-bootstrap mix);
    ``weights`` default to all ones, the plain Hodges-Lehmann kernel.
    """

    k: float
    weights: tuple[float, ...] | None = None
    budget: int = 1_000_000
    seed: int = 0
    mode: str = "auto"  # exact | bootstrap | auto

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("kernel order k must be >= 1")
        if self.mode not in ("exact", "bootstrap", "auto"):
            raise DomainError(f"unknown kernel mode {self.mode!r}")
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if len(w) != math.ceil(self.k):
                raise DomainError("weights must have ceil(k) entries")
            if any(v < 0 for v in w) or sum(w) == 0:
                raise DomainError("weights must be nonnegative and not all zero")
            object.__setattr__(self, "weights", w)
        if self.budget < 1:
            raise DomainError("budget must be >= 1")


@dataclass(frozen=True)
class KernelSequence:
    """Sorted kernel outputs with their provenance."""

    values: np.ndarray
    source_n: int
    k_used: float
    exhaustive: bool


@dataclass(frozen=True)
class BootstrapPlan:
    draws_floor: int
    draws_ceil: int

    @property
    def total(self) -> int:
        return self.draws_floor + self.draws_ceil


def breakdown_mapping(epsilon0: float, k: float) -> float:
    """Overall breakdown point of a k-kernel estimator with inner eps0."""
    if not 0.0 <= epsilon0 < 1.0:
        raise DomainError("epsilon0 must lie in [0, 1)")
    if k < 1:
        raise DomainError("k must be >= 1")
    return 1.0 - (1.0 - epsilon0) ** (1.0 / k)


def breakdown_mapping_inverse(epsilon: float, k: float) -> float:
    """Inner breakdown point reproducing the requested overall epsilon."""
    if not 0.0 <= epsilon < 1.0:
        raise DomainError("epsilon must lie in [0, 1)")
    if k < 1:
        raise DomainError("k must be >= 1")
    return 1.0 - (1.0 - epsilon) ** k


def quasi_bootstrap_plan(k: float, b: int) -> BootstrapPlan:
    """Split b kernel draws between floor(k)- and ceil(k)-sized subsets.

    The floor share is (1 - k + floor(k)) * b, rounded half-even; the two
    counts always sum to b.
    """
    if k < 1 or b < 1:
        raise DomainError("need k >= 1 and b >= 1")
    frac = k - math.floor(k)
    draws_floor = round((1.0 - frac) * b)
    draws_floor = min(max(draws_floor, 0), b)
    return BootstrapPlan(draws_floor=draws_floor, draws_ceil=b - draws_floor)


def _draw_index_sets(rng: np.random.Generator, n: int, k: int, count: int) -> np.ndarray:
    """count x k index matrix, distinct indices within each row."""
    if k > n:
        raise DomainError(f"kernel order {k} exceeds sample size {n}")
    if k == n:
        return np.tile(np.arange(n), (count, 1))
    if k == 1:
        return rng.integers(0, n, size=(count, 1))
    if 4 * k * k >= n:
        # dense regime: per-row partial shuffles
        mat = np.tile(np.arange(n), (count, 1))
        mat = rng.permuted(mat, axis=1)
        return mat[:, :k]
    idx = rng.integers(0, n, size=(count, k))
    while True:
        srt = np.sort(idx, axis=1)
        bad = np.nonzero((np.diff(srt, axis=1) == 0).any(axis=1))[0]
        if bad.size == 0:
            return idx
        idx[bad] = rng.integers(0, n, size=(bad.size, k))


def _kernel_values(x: np.ndarray, idx: np.ndarray, weights) -> np.ndarray:
    sub = x[idx]
    if weights is None:
        return sub.mean(axis=1)
    w = np.asarray(weights[: idx.shape[1]], dtype=float)
    return sub @ (w / w.sum())


def _enumerate_exact(x: np.ndarray, k: int, weights) -> np.ndarray:
    n = x.size
    if k == 1:
        return x.copy() if weights is None else x.copy()
    if k == n:
        return np.array([_kernel_values(x, np.arange(n)[None, :], weights)[0]])
    if k == 2:
        iu, ju = np.triu_indices(n, k=1)
        if weights is None:
            return 0.5 * (x[iu] + x[ju])
        w = np.asarray(weights[:2], dtype=float)
        return (x[iu] * w[0] + x[ju] * w[1]) / w.sum()
    m = math.comb(n, k)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.intp,
        count=m * k,
    )
    return _kernel_values(x, flat.reshape(m, k), weights)


def kernel_sequence(s, spec: KernelSpec) -> KernelSequence:
    """Sorted sequence of kernel evaluations over k-subsets of the sample."""
    s = _as_sample(s)
    n, x = s.n, s.values
    k = spec.k
    if k > n:
        raise DomainError(f"kernel order {k} exceeds sample size {n}")
    integral = abs(k - round(k)) < 1e-12
    mode = spec.mode
    if mode == "auto":
        if integral and math.comb(n, round(k)) <= EXACT_CAP:
            mode = "exact"
        else:
            mode = "bootstrap"
    if mode == "exact":
        if not integral:
            raise DomainError("exact mode requires an integral kernel order")
        kk = round(k)
        if math.comb(n, kk) > EXACT_CAP:
            raise CapacityError(
                f"C({n},{kk}) exceeds the enumeration cap {EXACT_CAP}; "
                "use bootstrap mode"
            )
        vals = _enumerate_exact(x, kk, spec.weights)
        vals.sort()
        return KernelSequence(values=vals, source_n=n, k_used=k, exhaustive=True)
    rng = np.random.default_rng(spec.seed)
    plan = quasi_bootstrap_plan(k, spec.budget)
    parts = []
    for kk, count in ((math.floor(k), plan.draws_floor), (math.ceil(k), plan.draws_ceil)):
        if count == 0:
            continue
        idx = _draw_index_sets(rng, n, kk, count)
        parts.append(_kernel_values(x, idx, spec.weights))
    vals = np.concatenate(parts)
    vals.sort()
    return KernelSequence(values=vals, source_n=n, k_used=k, exhaustive=False)


_INNER = {
    "qa": quantile_average,
    "tm": trimmed_mean,
    "wm": winsorized_mean,
    "sqm": stratified_quantile_mean,
    "bm": binomial_mean,
}


def weighted_hl_mean(
    s,
    spec: KernelSpec,
    wa: str = "median",
    t: TrimSpec | None = None,
    conv: QuantileConvention = CEILING,
) -> float:
    """L-layer estimator applied to the kernel sequence.

    ``t.epsilon`` is the requested *overall* breakdown point; the inner
    estimator always runs at eps0 = 1 - (1 - eps)^k so the two layers stay
    consistent.  The median case with k=2 and all-one weights is the
    classic Hodges-Lehmann estimator.
    """
    seq = kernel_sequence(s, spec)
    sample = SortedSample(seq.values)
    if wa == "median":
        return float(np.median(seq.values))
    if wa not in _INNER:
        raise DomainError(f"unknown inner estimator {wa!r}")
    if t is None:
        raise DomainError(f"inner estimator {wa!r} requires a TrimSpec")
    eps0 = breakdown_mapping_inverse(t.epsilon, spec.k)
    inner = TrimSpec(epsilon=eps0, gamma=t.gamma, nu=t.nu, strata=t.strata)
    fn = _INNER[wa]
    if wa in ("qa", "sqm"):
        return fn(sample, inner, conv=conv)
    return fn(sample, inner)


def gamma_median_of_means(
    s,
    k: int,
    gamma: float = 1.0,
    seed: int = 0,
    shuffle: bool = True,
) -> float:
    """gamma/(1+gamma) quantile of equal-block means.

    The sample is randomly shifted (seeded shuffle) before partitioning;
    when k does not divide n the trailing remainder is dropped.  gamma=1
    reproduces the classic median of means.
    """
    values = np.asarray(getattr(s, "values", s), dtype=float)
    n = values.size
    if k < 1 or k > n:
        raise DomainError(f"block size {k} outside 1..{n}")
    if gamma < 0:
        raise DomainError("gamma must be nonnegative")
    if shuffle:
        values = np.random.default_rng(seed).permutation(values)
    b = n // k
    means = values[: b * k].reshape(b, k).mean(axis=1)
    level = gamma / (1.0 + gamma)
    return empirical_quantile(SortedSample.from_data(means), level, conv=QuantileConvention.MIDPOINT)


def median_of_randomized_means(s, k: int, b: int, seed: int = 0) -> float:
    """Median of b block means, each block an independent size-k draw."""
    values = np.asarray(getattr(s, "values", s), dtype=float)
    n = values.size
    if k < 1 or k > n:
        raise DomainError(f"block size {k} outside 1..{n}")
    if b < 1:
        raise DomainError("block count b must be >= 1")
    rng = np.random.default_rng(seed)
    idx = _draw_index_sets(rng, n, k, b)
    return float(np.median(values[idx].mean(axis=1)))
