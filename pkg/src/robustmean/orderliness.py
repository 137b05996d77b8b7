"""Numerical verification of orderliness and weighted inequalities.

The checks are explicitly numerical certificates: "holds" means no
residual beyond tolerance on the probed grids, not an analytic proof.
Derivatives of the quantile-average curve are estimated by finite
differences on a uniform epsilon grid so that table-supplied quantile
functions work as well as parametric ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import distmodel
from .distmodel import DistributionSpec, draw_sample
from .errors import (
    DomainError,
    MomentDivergenceError,
    PrecisionError,
    ResolutionError,
)
from .estimators import MIDPOINT, SortedSample, empirical_quantile
from .kernels import KernelSpec, kernel_sequence

_QUAD_OPTS = dict(epsrel=1e-10, limit=400)


@dataclass(frozen=True)
class GridSpec:
    points: int = 4096
    eps_min: float = 1e-4
    eps_max: float | None = None  # defaults to 1/(1+gamma) - 1e-4
    fd_step: float | None = None  # defaults to the grid spacing

    def __post_init__(self):
        if self.points < 8:
            raise DomainError("grid needs at least 8 points")
        if self.eps_min <= 0:
            raise DomainError("eps_min must be positive")

    def eps_grid(self, gamma: float) -> np.ndarray:
        hi = self.eps_max if self.eps_max is not None else 1.0 / (1.0 + gamma) - 1e-4
        if not self.eps_min < hi:
            raise DomainError("empty epsilon grid")
        return np.linspace(self.eps_min, hi, self.points)


@dataclass
class OrderlinessReport:
    nu: int
    gamma: float
    holds: bool
    violations: list[tuple[float, int, float]]
    worst_residual: float
    tolerance: float


class TabulatedQuantile:
    """Quantile function given as a (p, Q(p)) table, linearly interpolated."""

    def __init__(self, p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if p.size < 2 or np.any(np.diff(p) <= 0):
            raise DomainError("table p column must be strictly increasing")
        if np.any((p < 0) | (p > 1)):
            raise DomainError("table p column must lie in [0, 1]")
        self._p = p
        self._q = q

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p < self._p[0]) | (p > self._p[-1])):
            raise DomainError("quantile level outside the tabulated range")
        return np.interp(p, self._p, self._q)


def _quantile_fn(dist):
    if isinstance(dist, DistributionSpec):
        return lambda p: distmodel.quantiles(dist, np.asarray(p, dtype=float))
    if isinstance(dist, TabulatedQuantile):
        return dist.quantile
    if callable(dist):
        return lambda p: np.asarray(dist(np.asarray(p, dtype=float)), dtype=float)
    raise DomainError("dist must be a DistributionSpec, TabulatedQuantile, or callable")


def qa_curve(dist, gamma: float, grid: GridSpec = GridSpec()):
    """(epsilon, QA(epsilon, gamma)) on the grid, population quantiles."""
    q = _quantile_fn(dist)
    eps = grid.eps_grid(gamma)
    qa = 0.5 * (q(gamma * eps) + q(1.0 - eps))
    return eps, qa


def check_nu_gamma_orderliness(
    dist,
    nu: int,
    gamma: float,
    grid: GridSpec = GridSpec(),
    tol: float | None = None,
) -> OrderlinessReport:
    """Sign conditions (-1)^j d^j QA / d eps^j >= 0 for j = 1..nu.

    Derivatives are order-j forward differences on the uniform grid; the
    default tolerance absorbs discretization error as a fraction of the
    QA range.
    """
    if nu < 1:
        raise DomainError("nu must be >= 1")
    if grid.points < 4 * nu:
        raise ResolutionError(f"grid of {grid.points} points too coarse for order {nu}")
    eps, qa = qa_curve(dist, gamma, grid)
    if tol is None:
        tol = 1e-7 * float(np.ptp(qa))
    violations: list[tuple[float, int, float]] = []
    worst = 0.0
    for j in range(1, nu + 1):
        resid = (-1.0) ** j * np.diff(qa, n=j)
        bad = np.nonzero(resid < -tol)[0]
        for i in bad:
            violations.append((float(eps[i]), j, float(resid[i])))
        if resid.size:
            worst = min(worst, float(resid.min()))
    return OrderlinessReport(
        nu=nu,
        gamma=gamma,
        holds=not violations,
        violations=violations,
        worst_residual=worst,
        tolerance=tol,
    )


# -- population weighted averages by quantile integration ---------------------


def _require_finite_mean(dist):
    if isinstance(dist, DistributionSpec):
        m = distmodel._frozen(dist).stats(moments="m")
        if not math.isfinite(float(m)):
            raise MomentDivergenceError(
                f"{dist.family}: infinite mean, weighted functionals diverge", order=1
            )


def _quad_q(q, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    val, _ = integrate.quad(lambda u: float(q(u)), lo, hi, **_QUAD_OPTS)
    return val


def population_qa(dist, eps: float, gamma: float) -> float:
    q = _quantile_fn(dist)
    return 0.5 * float(q(gamma * eps) + q(1.0 - eps))


def population_tm(dist, eps: float, gamma: float) -> float:
    q = _quantile_fn(dist)
    lo, hi = gamma * eps, 1.0 - eps
    return _quad_q(q, lo, hi) / (hi - lo)


def population_wm(dist, eps: float, gamma: float) -> float:
    q = _quantile_fn(dist)
    core = _quad_q(q, gamma * eps, 1.0 - eps)
    return core + gamma * eps * float(q(gamma * eps)) + eps * float(q(1.0 - eps))


def population_bwm(dist, eps: float, gamma: float) -> float:
    q = _quantile_fn(dist)
    core = _quad_q(q, gamma * eps, 1.0 - eps)
    left = _quad_q(q, gamma * eps, 2.0 * gamma * eps)
    right = _quad_q(q, 1.0 - 2.0 * eps, 1.0 - eps)
    return core + left + right


def population_sqm(dist, eps: float, gamma: float) -> float:
    m = round(0.25 / eps)
    if m < 1 or abs(0.25 / eps - m) > 1e-9:
        raise DomainError("population SQM needs 1/(4 eps) integral")
    return sum(
        population_qa(dist, (2 * i - 1) * eps, gamma) for i in range(1, m + 1)
    ) / m


def population_bm2(dist, eps: float, gamma: float) -> float:
    """Population binomial mean of order 2 (weight-3 alternating blocks)."""
    q = _quantile_fn(dist)
    periods = int(math.floor(1.0 / (6.0 * eps) + 1e-9))
    if periods < 1:
        raise DomainError("epsilon too large for a population BM2 block")
    acc = 0.0
    mass = 0.0
    for i in range(1, periods + 1):
        lo = gamma * eps * (1 + 3 * (i - 1))
        hi = eps * (2 + 3 * (i - 1))
        acc += 3.0 * (_quad_q(q, lo, hi) + _quad_q(q, 1.0 - hi, 1.0 - lo))
        mass += 3.0 * 2.0 * (hi - lo)
    return acc / mass


def check_weighted_inequality(
    dist,
    target: str,
    gamma: float,
    grid: GridSpec = GridSpec(points=25, eps_min=0.01),
    tol: float = 1e-9,
) -> OrderlinessReport:
    """Pointwise inequality chain on the epsilon grid.

    targets: 'tm' (TM nonincreasing and QA >= TM), 'wm' (WM >= TM),
    'bwm' (WM >= BWM), 'sqm_vs_bm2' (SQM >= BM2).
    """
    _require_finite_mean(dist)
    violations: list[tuple[float, int, float]] = []
    worst = 0.0

    def note(eps, resid):
        nonlocal worst
        worst = min(worst, resid)
        if resid < -tol:
            violations.append((eps, 1, resid))

    if target == "sqm_vs_bm2":
        # both constructions must be complete: 1/(4 eps) integral for the
        # SQM term count and 1/(6 eps) integral for whole BM2 periods, so
        # 1/eps runs over multiples of 12
        for m in range(1, grid.points + 1):
            eps = 1.0 / (12.0 * m)
            if eps < grid.eps_min:
                break
            note(eps, population_sqm(dist, eps, gamma) - population_bm2(dist, eps, gamma))
    else:
        if target == "bwm":
            # doubled blocks must fit: 2*eps*(1+gamma) <= 1
            hi = 0.5 / (1.0 + gamma) - 1e-4
            grid = GridSpec(points=grid.points, eps_min=grid.eps_min,
                            eps_max=min(grid.eps_max or hi, hi),
                            fd_step=grid.fd_step)
        eps_grid = grid.eps_grid(gamma)
        if target == "tm":
            tm = np.array([population_tm(dist, e, gamma) for e in eps_grid])
            qa = np.array([population_qa(dist, e, gamma) for e in eps_grid])
            for e, d in zip(eps_grid[1:], -np.diff(tm)):
                note(float(e), float(d))
            for e, d in zip(eps_grid, qa - tm):
                note(float(e), float(d))
        elif target == "wm":
            for e in eps_grid:
                note(float(e), population_wm(dist, e, gamma) - population_tm(dist, e, gamma))
        elif target == "bwm":
            for e in eps_grid:
                note(float(e), population_wm(dist, e, gamma) - population_bwm(dist, e, gamma))
        else:
            raise DomainError(f"unknown inequality target {target!r}")

    return OrderlinessReport(
        nu=1,
        gamma=gamma,
        holds=not violations,
        violations=violations,
        worst_residual=worst,
        tolerance=tol,
    )


def check_u_orderliness(
    dist,
    gamma: float,
    k_list,
    n: int = 100_000,
    budget: int = 200_000,
    seed: int = 0,
) -> OrderlinessReport:
    """Monotone direction of the gamma-median kernel curve across k.

    For each k the estimator is the gamma/(1+gamma) quantile of the
    bootstrap kernel sequence (the matched-breakdown quantile-average
    layer degenerates to the gamma-median).  Direction is verified within
    3 combined batch standard errors.
    """
    k_list = sorted(k_list)
    if budget < 1000:
        raise PrecisionError("bootstrap budget too small for a usable standard error")
    if not isinstance(dist, DistributionSpec):
        raise DomainError("U-orderliness check needs a sampleable DistributionSpec")
    sample = draw_sample(dist, n, mode="quasi")
    level = gamma / (1.0 + gamma)
    n_batches = 16
    estimates, ses = [], []
    for i, k in enumerate(k_list):
        spec = KernelSpec(k=float(k), budget=budget, seed=seed + 7919 * i, mode="bootstrap")
        seq = kernel_sequence(SortedSample(sample.values), spec).values
        estimates.append(
            empirical_quantile(SortedSample.from_data(seq), level, conv=MIDPOINT)
        )
        batches = np.array_split(np.random.default_rng(seed + i).permutation(seq), n_batches)
        per_batch = [
            empirical_quantile(SortedSample.from_data(bat), level, conv=MIDPOINT)
            for bat in batches
        ]
        ses.append(float(np.std(per_batch, ddof=1)) / math.sqrt(n_batches))
    diffs = np.diff(estimates)
    comb = 3.0 * np.sqrt(np.array(ses[:-1]) ** 2 + np.array(ses[1:]) ** 2)
    up_ok = diffs >= -comb
    down_ok = diffs <= comb
    holds = bool(np.all(up_ok) or np.all(down_ok))
    violations = []
    worst = 0.0
    for i, d in enumerate(diffs):
        slack = max(-(d + comb[i]), d - comb[i])  # positive when outside both bands
        if not (up_ok[i] or down_ok[i]):
            violations.append((float(k_list[i]), 1, float(d)))
        worst = min(worst, float(-abs(d) if slack > 0 else 0.0))
    return OrderlinessReport(
        nu=1,
        gamma=gamma,
        holds=holds,
        violations=violations,
        worst_residual=worst,
        tolerance=float(comb.max()) if comb.size else 0.0,
    )


def hl2_density(dist: DistributionSpec, x: float) -> float:
    """Density of the pairwise-mean kernel by numeric self-convolution.

    Requires a distribution supported on [0, inf).
    """
    lo_bounded, _ = distmodel._BOUNDED[dist.family]
    if not lo_bounded or distmodel.quantile(dist, 0.0) < -1e-12:
        raise DomainError("hl2 density requires support within [0, inf)")
    if x < 0:
        raise DomainError("x must be nonnegative")
    if x == 0:
        return 0.0
    f = distmodel._frozen(dist).pdf
    val, _ = integrate.quad(
        lambda u: 2.0 * f(u) * f(2.0 * x - u), 0.0, 2.0 * x, epsrel=1e-8, limit=400
    )
    return float(val)
