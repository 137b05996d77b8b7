"""Command-line interface.

Subcommands: estimate, sweep, se-study, variance-compare, breakdown,
bounds, orderliness.  Options may come from a ``key = value`` config file
(``#`` comments allowed); command-line flags override config values.
Exit codes: 0 success, 2 config error, 3 numeric/domain error,
4 capacity error.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import benchcli, bounds, orderliness
from .benchcli import (
    DEFAULT_KURTOSIS,
    FIG1_ROSTER,
    RosterEntry,
    SweepConfig,
    run_bias_sweep,
    run_breakdown_probe,
    run_se_study,
    run_variance_compare,
    write_result_csv,
)
from .distmodel import DistributionSpec, FAMILIES
from .errors import CapacityError, ConfigError, DomainError
from .estimators import SortedSample

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_CAPACITY = 4


def read_config(path: str) -> dict[str, str]:
    """Line-oriented ``key = value`` pairs; ``#`` starts a comment."""
    out: dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, val = line.split("=", 1)
                out[key.strip()] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return out


def _merge(args: argparse.Namespace, config: dict[str, str], defaults) -> dict:
    """Config fills in options the command line left at their defaults."""
    merged = vars(args).copy()
    for key, raw in config.items():
        attr = key.replace("-", "_")
        if attr not in merged:
            raise ConfigError(f"unknown config key {key!r}")
        if merged[attr] == defaults.get(attr):
            cur = defaults.get(attr)
            if isinstance(cur, bool):
                merged[attr] = raw.lower() in ("1", "true", "yes")
            elif isinstance(cur, int):
                merged[attr] = int(raw)
            elif isinstance(cur, float):
                merged[attr] = float(raw)
            elif isinstance(cur, tuple):
                merged[attr] = tuple(v.strip() for v in raw.split(","))
            else:
                merged[attr] = raw
    return merged


def _dist_from(opts) -> DistributionSpec:
    return DistributionSpec(
        family=opts["family"],
        shape=opts.get("shape"),
        scale=opts.get("scale", 1.0),
        location=opts.get("location", 0.0),
    )


def _roster_entry(opts) -> RosterEntry:
    return RosterEntry(
        ident=opts["estimator"],
        kind=opts["estimator"],
        epsilon=opts["epsilon"],
        gamma=opts["gamma"],
        nu=opts["nu"],
        strata=opts["strata"],
        k=opts["k"],
        inner=opts["inner"],
    )


def _out_stream(path):
    return open(path, "w", newline="") if path else sys.stdout


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--output", default=None, help="output CSV path (default stdout)")
    p.add_argument("--seed", type=int, default=0)


def _add_estimator_flags(p: argparse.ArgumentParser):
    p.add_argument("--estimator", default="median",
                   help="mean|median|mom|tm|wm|bwm|sm|bm|sqm|whlm")
    p.add_argument("--epsilon", type=float, default=0.125)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--nu", type=int, default=3)
    p.add_argument("--strata", type=int, default=3)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--inner", default="median")
    p.add_argument("--budget", type=int, default=500_000)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="robustmean")
    sub = ap.add_subparsers(dest="command", required=True)
    ap.subcommands = {}

    _orig_add_parser = sub.add_parser

    def add_parser(name, **kw):
        p = _orig_add_parser(name, **kw)
        ap.subcommands[name] = p
        return p

    sub.add_parser = add_parser

    p = sub.add_parser("estimate", help="run one estimator on a data file")
    p.add_argument("data", help="input file, one real per line")
    _add_estimator_flags(p)
    _add_common(p)

    p = sub.add_parser("sweep", help="bias sweep over kurtosis-matched families")
    p.add_argument("--families", default="weibull,gamma,lognormal,pareto")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--budget", type=int, default=500_000)
    p.add_argument("--mode", default="quasi", choices=("quasi", "pseudo"))
    p.add_argument("--paper-scale", action="store_true")
    _add_common(p)

    p = sub.add_parser("se-study", help="standard errors across replications")
    p.add_argument("--families", default="gaussian")
    p.add_argument("--n", type=int, default=5184)
    p.add_argument("--replications", type=int, default=200)
    p.add_argument("--budget", type=int, default=500_000)
    p.add_argument("--paper-scale", action="store_true")
    _add_common(p)

    p = sub.add_parser("variance-compare", help="mHLM_k vs MoM_k variance")
    p.add_argument("--family", default="lognormal")
    p.add_argument("--shape", type=float, default=1.0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--replications", type=int, default=1000)
    p.add_argument("--budget", type=int, default=200_000)
    _add_common(p)

    p = sub.add_parser("breakdown", help="contamination probe")
    _add_estimator_flags(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--fractions", default="0.05,0.1,0.25,0.5")
    p.add_argument("--magnitude", type=float, default=1e12)
    _add_common(p)

    p = sub.add_parser("bounds", help="tabulate worst-case bounds")
    p.add_argument("--epsilon", type=float, default=0.125)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--points", type=int, default=0,
                   help="if > 0, tabulate a grid of this many epsilons")
    _add_common(p)

    p = sub.add_parser("orderliness", help="numerical orderliness certificate")
    p.add_argument("--family", default="exponential")
    p.add_argument("--shape", type=float, default=None)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--table", default=None,
                   help="two-column p Q(p) text file instead of a family")
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--points", type=int, default=4096)
    _add_common(p)

    return ap


def _cmd_estimate(opts) -> int:
    data = np.loadtxt(opts["data"], dtype=float, ndmin=1)
    entry = _roster_entry(opts)
    est = entry.evaluate(SortedSample.from_data(data), opts["budget"], opts["seed"])
    out = _out_stream(opts["output"])
    try:
        out.write(f"{est:.17g}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _sweep_config(opts) -> SweepConfig:
    fams = tuple(
        f.strip() for f in (
            opts["families"] if isinstance(opts["families"], str)
            else ",".join(opts["families"])
        ).split(",") if f.strip()
    )
    return SweepConfig(
        families=fams,
        n=opts["n"],
        replications=opts.get("replications", 200),
        mode=opts.get("mode", "quasi"),
        seed=opts["seed"],
        budget=opts["budget"],
        paper_scale=opts.get("paper_scale", False),
        output=opts["output"],
    )


def _cmd_sweep(opts) -> int:
    cfg = _sweep_config(opts)
    write_result_csv(run_bias_sweep(cfg), cfg.output or sys.stdout)
    return EXIT_OK


def _cmd_se_study(opts) -> int:
    cfg = _sweep_config(opts)
    write_result_csv(run_se_study(cfg), cfg.output or sys.stdout)
    return EXIT_OK


def _cmd_variance_compare(opts) -> int:
    fam = opts["family"]
    shape = opts["shape"] if fam in ("weibull", "gamma", "lognormal", "pareto",
                                     "generalized_gaussian") else None
    spec = DistributionSpec(fam, shape=shape, scale=opts["scale"])
    mhlm, mom, ratio = run_variance_compare(
        spec, opts["k"], opts["n"], opts["replications"],
        seed=opts["seed"], budget=opts["budget"],
    )
    out = _out_stream(opts["output"])
    try:
        out.write(f"# {benchcli.CSV_SCHEMA}; variance_ratio = {ratio:.17g}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("replication", "mhlm", "mom"))
        for i, (a, b) in enumerate(zip(mhlm, mom)):
            w.writerow((i, format(a, ".17g"), format(b, ".17g")))
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_breakdown(opts) -> int:
    entry = _roster_entry(opts)
    fractions = tuple(float(v) for v in str(opts["fractions"]).split(","))
    probe = run_breakdown_probe(
        lambda s: entry.evaluate(s, opts["budget"], opts["seed"]),
        n=opts["n"], fractions=fractions, magnitude=opts["magnitude"],
        seed=opts["seed"],
    )
    out = _out_stream(opts["output"])
    try:
        out.write(f"# {benchcli.CSV_SCHEMA}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("fraction", "estimate", "broken"))
        for c, est, broken in probe:
            w.writerow((format(c, ".17g"), format(est, ".17g"), int(broken)))
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_bounds(opts) -> int:
    gamma = opts["gamma"]
    if opts["points"] > 0:
        eps_grid = np.linspace(1e-4, 1.0 / (1.0 + gamma) - 1e-4, opts["points"])
    else:
        eps_grid = [opts["epsilon"]]
    out = _out_stream(opts["output"])
    try:
        out.write(f"# {benchcli.CSV_SCHEMA}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("epsilon", "gamma", "sup_qa_general", "sup_qa_unimodal"))
        for eps in eps_grid:
            general = bounds.sup_qa_general(float(eps), gamma)
            unimodal = (bounds.sup_qa_unimodal(float(eps), gamma)
                        if gamma < 5.0 else float("nan"))
            w.writerow((format(float(eps), ".17g"), format(gamma, ".17g"),
                        format(general, ".17g"), format(unimodal, ".17g")))
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_orderliness(opts) -> int:
    if opts["table"]:
        tab = np.loadtxt(opts["table"], dtype=float, ndmin=2)
        if tab.shape[1] != 2:
            raise ConfigError("quantile table must have two columns: p Q(p)")
        dist = orderliness.TabulatedQuantile(tab[:, 0], tab[:, 1])
    else:
        fam = opts["family"]
        shape = opts["shape"]
        dist = DistributionSpec(fam, shape=shape, scale=opts["scale"])
    grid = orderliness.GridSpec(points=opts["points"])
    report = orderliness.check_nu_gamma_orderliness(
        dist, opts["nu"], opts["gamma"], grid=grid
    )
    out = _out_stream(opts["output"])
    try:
        out.write(f"# {benchcli.CSV_SCHEMA}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("nu", "gamma", "holds", "violations", "worst_residual",
                    "tolerance"))
        w.writerow((report.nu, format(report.gamma, ".17g"), int(report.holds),
                    len(report.violations), format(report.worst_residual, ".17g"),
                    format(report.tolerance, ".17g")))
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


_COMMANDS = {
    "estimate": _cmd_estimate,
    "sweep": _cmd_sweep,
    "se-study": _cmd_se_study,
    "variance-compare": _cmd_variance_compare,
    "breakdown": _cmd_breakdown,
    "bounds": _cmd_bounds,
    "orderliness": _cmd_orderliness,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    defaults = {
        a.dest: a.default for a in ap.subcommands[args.command]._actions
    }
    try:
        config = read_config(args.config) if getattr(args, "config", None) else {}
        opts = _merge(args, config, defaults)
        return _COMMANDS[args.command](opts)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
