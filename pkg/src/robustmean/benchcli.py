"""Monte-Carlo benchmark harness emitting deterministic CSV.

Bias sweeps across kurtosis-matched families, standard-error studies,
variance comparisons, and breakdown probes.  Roster entries and
replications are independent tasks with seeds derived as seed ^ task
index; results are emitted in config order, so output bytes do not depend
on how the tasks are scheduled.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field, fields

import numpy as np

from .distmodel import (
    DistributionSpec,
    FAMILIES,
    draw_sample,
    moment_summary,
    solve_param_for_kurtosis,
)
from .errors import ConfigError, RangeError
from .estimators import (
    SQMContinuityWarning,
    SortedSample,
    TrimSpec,
    binomial_mean,
    block_winsorized_mean,
    median,
    stratified_mean,
    stratified_quantile_mean,
    trimmed_mean,
    winsorized_mean,
)
from .kernels import (
    KernelSpec,
    breakdown_mapping,
    gamma_median_of_means,
    weighted_hl_mean,
)

CSV_SCHEMA = "robustmean-csv-v1; std_bias = (estimate - mean) / sd"

PAPER_SCALE_N = 3_686_000
PAPER_SCALE_R = 1000

# Kernel orders matching an overall breakdown point of 1/8:
# (1 - eps0)^(1/k) = 7/8 with eps0 = 1/4 (midhinge) and 1/2 (median).
K_SQHLM = math.log(4.0 / 3.0) / math.log(8.0 / 7.0)
K_MHLM = math.log(2.0) / math.log(8.0 / 7.0)

DEFAULT_KURTOSIS = {
    "weibull": (4.0, 6.0, 9.0),
    "gamma": (4.0, 6.0, 9.0),
    "lognormal": (4.0, 6.0, 9.0),
    "pareto": (10.0, 15.0, 25.0),
    "exponential": (9.0,),
    "gaussian": (3.0,),
    "uniform": (1.8,),
}

_PLAIN = {
    "sm": stratified_mean,
    "wm": winsorized_mean,
    "bwm": block_winsorized_mean,
    "bm": binomial_mean,
    "sqm": stratified_quantile_mean,
    "tm": trimmed_mean,
}


@dataclass(frozen=True)
class RosterEntry:
    """One estimator configuration; ``epsilon`` is the overall breakdown point."""

    ident: str
    kind: str  # mean | median | mom | one of _PLAIN | whlm
    epsilon: float = 0.125
    gamma: float = 1.0
    nu: int = 3
    strata: int = 3
    k: float | None = None
    inner: str = "median"  # inner estimator for whlm

    def __post_init__(self):
        if self.kind in _PLAIN:
            TrimSpec(self.epsilon, self.gamma, self.nu, self.strata)
        elif self.kind == "whlm":
            if self.k is None:
                raise ConfigError(f"{self.ident}: whlm entries need a kernel order k")
            KernelSpec(k=self.k)
            if self.inner != "median":
                TrimSpec(self.epsilon, self.gamma, self.nu, self.strata)
        elif self.kind == "mom":
            if self.k is None or self.k < 1 or self.k != int(self.k):
                raise ConfigError(f"{self.ident}: mom entries need an integral k >= 1")
        elif self.kind not in ("mean", "median"):
            raise ConfigError(f"{self.ident}: unknown estimator kind {self.kind!r}")

    def overall_breakdown(self) -> float:
        if self.kind == "mean":
            return 0.0
        if self.kind == "median":
            return 0.5
        if self.kind == "whlm" and self.inner == "median":
            return breakdown_mapping(0.5, self.k)
        if self.kind == "mom":
            return breakdown_mapping(0.5, self.k)
        return self.epsilon

    def evaluate(self, sample: SortedSample, budget: int, seed: int) -> float:
        t = TrimSpec(self.epsilon, self.gamma, self.nu, self.strata)
        if self.kind == "mean":
            return float(sample.values.mean())
        if self.kind == "median":
            return median(sample)
        if self.kind == "mom":
            return gamma_median_of_means(sample, int(self.k), self.gamma, seed=seed)
        if self.kind == "whlm":
            spec = KernelSpec(k=self.k, budget=budget, seed=seed, mode="bootstrap")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SQMContinuityWarning)
                return weighted_hl_mean(sample, spec, wa=self.inner, t=t)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SQMContinuityWarning)
            return _PLAIN[self.kind](sample, t)


FIG1_ROSTER: tuple[RosterEntry, ...] = (
    RosterEntry("stm", "sm"),
    RosterEntry("swm", "wm"),
    RosterEntry("bwm", "bwm"),
    RosterEntry("bm2", "bm", nu=2),
    RosterEntry("bm3", "bm", nu=3),
    RosterEntry("sqm", "sqm"),
    RosterEntry("thlm_k2", "whlm", k=2.0, inner="tm"),
    RosterEntry("wihlm_k2", "whlm", k=2.0, inner="wm"),
    RosterEntry("sqhlm", "whlm", k=K_SQHLM, inner="sqm"),
    RosterEntry("mhlm", "whlm", k=K_MHLM, inner="median"),
    RosterEntry("thlm_k5", "whlm", k=5.0, inner="tm"),
    RosterEntry("wihlm_k5", "whlm", k=5.0, inner="wm"),
)


@dataclass(frozen=True)
class ResultRow:
    family: str
    shape: float
    kurtosis: float
    estimator: str
    epsilon: float
    gamma: float
    k: float
    n: int
    estimate: float
    std_bias: float
    se: float
    seed: int
    reason: str = ""


RESULT_COLUMNS = tuple(f.name for f in fields(ResultRow))


@dataclass(frozen=True)
class SweepConfig:
    families: tuple[str, ...] = ("weibull", "gamma", "lognormal", "pareto")
    kurtosis: dict[str, tuple[float, ...]] = field(
        default_factory=lambda: dict(DEFAULT_KURTOSIS)
    )
    roster: tuple[RosterEntry, ...] = FIG1_ROSTER
    n: int = 100_000
    replications: int = 200
    mode: str = "quasi"
    seed: int = 0
    budget: int = 500_000
    paper_scale: bool = False
    output: str | None = None

    def __post_init__(self):
        for fam in self.families:
            if fam not in FAMILIES:
                raise ConfigError(f"unknown family {fam!r}")
            if not self.kurtosis.get(fam):
                raise ConfigError(f"no kurtosis grid for family {fam!r}")
        if self.mode not in ("quasi", "pseudo"):
            raise ConfigError(f"unknown sampling mode {self.mode!r}")
        if self.n < 2 or self.replications < 2 or self.budget < 1:
            raise ConfigError("require n >= 2, replications >= 2, budget >= 1")
        if not self.roster:
            raise ConfigError("empty estimator roster")
        # shared-breakdown parity across the roster
        eps = [e.overall_breakdown() for e in self.roster]
        if max(eps) - min(eps) > 1e-12:
            raise ConfigError(
                f"roster breakdown points differ: min {min(eps):.12g}, "
                f"max {max(eps):.12g}"
            )

    @property
    def effective_n(self) -> int:
        return PAPER_SCALE_N if self.paper_scale else self.n

    @property
    def effective_r(self) -> int:
        return PAPER_SCALE_R if self.paper_scale else self.replications


def _family_specs(cfg: SweepConfig):
    """(family, kurtosis, spec-or-None, reason) in config order."""
    for fam in cfg.families:
        for kappa in cfg.kurtosis[fam]:
            try:
                yield fam, kappa, solve_param_for_kurtosis(fam, kappa), ""
            except RangeError as exc:
                yield fam, kappa, None, str(exc)


def run_bias_sweep(cfg: SweepConfig) -> list[ResultRow]:
    """One quasi (or pseudo) sample per (family, kurtosis); whole roster on it."""
    rows: list[ResultRow] = []
    task = 0
    for fam, kappa, spec, reason in _family_specs(cfg):
        if spec is None:
            for entry in cfg.roster:
                rows.append(
                    ResultRow(fam, math.nan, kappa, entry.ident, entry.epsilon,
                              entry.gamma, entry.k or math.nan, cfg.effective_n,
                              math.nan, math.nan, math.nan, cfg.seed, reason)
                )
                task += 1
            continue
        ms = moment_summary(spec)
        sample = SortedSample(
            draw_sample(spec, cfg.effective_n, mode=cfg.mode, seed=cfg.seed).values
        )
        for entry in cfg.roster:
            tseed = cfg.seed ^ task
            est = entry.evaluate(sample, cfg.budget, tseed)
            rows.append(
                ResultRow(fam, spec.shape or math.nan, kappa, entry.ident,
                          entry.epsilon, entry.gamma, entry.k or math.nan,
                          cfg.effective_n, est, (est - ms.mean) / ms.sd,
                          math.nan, tseed)
            )
            task += 1
    return rows


def run_se_study(cfg: SweepConfig) -> list[ResultRow]:
    """R seeded pseudo replications per (family, kurtosis, estimator).

    Emits the mean estimate and SE = sd of the estimates across
    replications.
    """
    rows: list[ResultRow] = []
    task = 0
    r = cfg.effective_r
    for fam, kappa, spec, reason in _family_specs(cfg):
        if spec is None:
            for entry in cfg.roster:
                rows.append(
                    ResultRow(fam, math.nan, kappa, entry.ident, entry.epsilon,
                              entry.gamma, entry.k or math.nan, cfg.effective_n,
                              math.nan, math.nan, math.nan, cfg.seed, reason)
                )
                task += 1
            continue
        ms = moment_summary(spec)
        samples = [
            SortedSample(
                draw_sample(spec, cfg.effective_n, mode="pseudo",
                            seed=cfg.seed ^ (1_000_003 + rep)).values
            )
            for rep in range(r)
        ]
        for entry in cfg.roster:
            ests = np.array(
                [entry.evaluate(samples[rep], cfg.budget, cfg.seed ^ (task + rep))
                 for rep in range(r)]
            )
            mean_est = float(ests.mean())
            rows.append(
                ResultRow(fam, spec.shape or math.nan, kappa, entry.ident,
                          entry.epsilon, entry.gamma, entry.k or math.nan,
                          cfg.effective_n, mean_est,
                          (mean_est - ms.mean) / ms.sd,
                          float(ests.std(ddof=1)), cfg.seed ^ task)
            )
            task += r
    return rows


def run_variance_compare(
    spec: DistributionSpec,
    k: int,
    n: int,
    r: int,
    seed: int = 0,
    budget: int = 200_000,
):
    """Per-replication mHLM_k vs MoM_k on the same pseudo sample.

    Returns (mhlm_estimates, mom_estimates, variance_ratio) with
    ratio = Var(mHLM) / Var(MoM); for k = n both collapse to the sample
    mean and the ratio is defined as 1.
    """
    if k < 1 or k > n:
        raise ConfigError(f"block size {k} outside 1..{n}")
    if r < 2:
        raise ConfigError("need at least 2 replications")
    mhlm = np.empty(r)
    mom = np.empty(r)
    for rep in range(r):
        tseed = seed ^ rep
        sample = SortedSample(
            draw_sample(spec, n, mode="pseudo", seed=tseed).values
        )
        kspec = KernelSpec(k=float(k), budget=budget, seed=tseed)
        mhlm[rep] = weighted_hl_mean(sample, kspec, wa="median")
        mom[rep] = gamma_median_of_means(sample, k, gamma=1.0, seed=tseed)
    v_mhlm = float(mhlm.var(ddof=1))
    v_mom = float(mom.var(ddof=1))
    ratio = 1.0 if v_mom == 0.0 and v_mhlm == 0.0 else v_mhlm / v_mom
    return mhlm, mom, ratio


def run_breakdown_probe(
    estimator,
    n: int = 1000,
    fractions=(0.05, 0.1, 0.25, 0.5),
    magnitude: float = 1e12,
    seed: int = 0,
    baseline: DistributionSpec = DistributionSpec("gaussian"),
):
    """Replace the top floor(c*n) values with +magnitude per fraction c.

    Returns a list of (fraction, estimate, broken) where broken means
    |estimate| > 1e6.
    """
    base = draw_sample(baseline, n, mode="pseudo", seed=seed).values
    out = []
    for c in fractions:
        if not 0.0 <= c <= 0.5:
            raise ConfigError(f"contamination fraction {c} outside [0, 0.5]")
        m = int(math.floor(c * n))
        data = base.copy()
        if m:
            data[-m:] = magnitude
        est = estimator(SortedSample.from_data(data))
        out.append((float(c), float(est), bool(abs(est) > 1e6)))
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return format(v, ".17g")
    return str(v)


def write_result_csv(rows, out) -> None:
    """ResultRow CSV with a schema metadata comment; LF line endings."""

    def emit(fh):
        fh.write(f"# {CSV_SCHEMA}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for row in rows:
            w.writerow([_fmt(getattr(row, c)) for c in RESULT_COLUMNS])

    if isinstance(out, (str, bytes)):
        with open(out, "w", newline="") as fh:
            emit(fh)
    else:
        emit(out)


def result_csv_text(rows) -> str:
    buf = io.StringIO()
    write_result_csv(rows, buf)
    return buf.getvalue()
