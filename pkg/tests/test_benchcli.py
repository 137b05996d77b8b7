import io
import math

import numpy as np
import pytest

from robustmean import cli
from robustmean.benchcli import (
    FIG1_ROSTER,
    RESULT_COLUMNS,
    RosterEntry,
    SweepConfig,
    result_csv_text,
    run_bias_sweep,
    run_breakdown_probe,
    run_se_study,
    run_variance_compare,
)
from robustmean.distmodel import DistributionSpec
from robustmean.errors import ConfigError
from robustmean.estimators import SortedSample


class TestRoster:
    def test_parity_all_share_breakdown(self):
        for entry in FIG1_ROSTER:
            assert entry.overall_breakdown() == pytest.approx(0.125, abs=1e-12)

    def test_roster_size_and_idents(self):
        assert len(FIG1_ROSTER) == 12
        assert len({e.ident for e in FIG1_ROSTER}) == 12

    def test_entry_validation(self):
        with pytest.raises(ConfigError):
            RosterEntry("bad", "whlm")  # missing k
        with pytest.raises(ConfigError):
            RosterEntry("bad", "telepathy")
        with pytest.raises(ConfigError):
            RosterEntry("bad", "mom", k=2.5)

    def test_mean_entry_zero_breakdown(self):
        assert RosterEntry("mean", "mean").overall_breakdown() == 0.0

    def test_evaluate_known_sample(self):
        s = SortedSample(np.arange(1.0, 9.0))
        assert RosterEntry("m", "median").evaluate(s, 1000, 0) == 4.5
        assert RosterEntry("w", "wm", epsilon=0.25).evaluate(s, 1000, 0) == 4.5


class TestSweepConfig:
    def test_rejects_unknown_family(self):
        with pytest.raises(ConfigError):
            SweepConfig(families=("cauchy",))

    def test_rejects_mixed_breakdown_roster(self):
        roster = (RosterEntry("a", "tm"), RosterEntry("b", "tm", epsilon=0.25))
        with pytest.raises(ConfigError):
            SweepConfig(roster=roster)

    def test_rejects_bad_mode(self):
        with pytest.raises(ConfigError):
            SweepConfig(mode="halton")

    def test_paper_scale_sizes(self):
        cfg = SweepConfig(paper_scale=True)
        assert cfg.effective_n == 3_686_000
        assert cfg.effective_r == 1000
        assert SweepConfig().effective_n == 100_000


SMALL = dict(n=4000, budget=20_000, replications=50)


class TestBiasSweep:
    def test_row_consistency(self):
        cfg = SweepConfig(families=("gamma",), kurtosis={"gamma": (6.0,)}, **SMALL)
        rows = run_bias_sweep(cfg)
        assert len(rows) == len(FIG1_ROSTER)
        from robustmean.distmodel import moment_summary, solve_param_for_kurtosis

        ms = moment_summary(solve_param_for_kurtosis("gamma", 6.0))
        for r in rows:
            assert r.family == "gamma"
            assert r.estimate == pytest.approx(ms.mean + r.std_bias * ms.sd, rel=1e-9)
            assert r.reason == ""

    def test_deterministic(self):
        cfg = SweepConfig(families=("weibull",), kurtosis={"weibull": (4.0,)}, **SMALL)
        assert result_csv_text(run_bias_sweep(cfg)) == result_csv_text(run_bias_sweep(cfg))

    def test_gaussian_symmetric_bias_small(self):
        cfg = SweepConfig(families=("gaussian",), kurtosis={"gaussian": (3.0,)}, **SMALL)
        for r in run_bias_sweep(cfg):
            assert abs(r.std_bias) < 0.05

    def test_infeasible_kurtosis_skipped_with_reason(self):
        cfg = SweepConfig(families=("gamma",), kurtosis={"gamma": (2.5,)}, **SMALL)
        rows = run_bias_sweep(cfg)
        assert len(rows) == len(FIG1_ROSTER)
        for r in rows:
            assert r.reason != ""
            assert math.isnan(r.estimate)


class TestSeStudy:
    def _se(self, entry):
        cfg = SweepConfig(
            families=("gaussian",), kurtosis={"gaussian": (3.0,)},
            roster=(entry,), n=1024, replications=300, budget=1000,
        )
        (row,) = run_se_study(cfg)
        return row.se

    def test_gaussian_mean_se(self):
        got = self._se(RosterEntry("mean", "mean"))
        assert got == pytest.approx(1.0 / math.sqrt(1024), rel=0.10)

    def test_gaussian_median_se(self):
        got = self._se(RosterEntry("med", "median"))
        assert got == pytest.approx(
            math.sqrt(math.pi / 2.0) / math.sqrt(1024), rel=0.12
        )

    def test_same_seed_identical_bytes(self):
        roster = (RosterEntry("med", "median"),)
        cfg = SweepConfig(
            families=("exponential",), kurtosis={"exponential": (9.0,)},
            roster=roster, n=500, replications=20, budget=1000, seed=5,
        )
        assert result_csv_text(run_se_study(cfg)) == result_csv_text(run_se_study(cfg))


class TestVarianceCompare:
    def test_degenerate_k_equals_n(self):
        spec = DistributionSpec("gaussian")
        mhlm, mom, ratio = run_variance_compare(spec, k=64, n=64, r=20)
        np.testing.assert_allclose(mhlm, mom, rtol=1e-12)
        assert ratio == pytest.approx(1.0)

    def test_gaussian_sanity_band(self):
        spec = DistributionSpec("gaussian")
        _, _, ratio = run_variance_compare(spec, k=2, n=256, r=200)
        assert 0.5 < ratio < 2.0

    def test_validation(self):
        with pytest.raises(ConfigError):
            run_variance_compare(DistributionSpec("gaussian"), k=0, n=10, r=10)
        with pytest.raises(ConfigError):
            run_variance_compare(DistributionSpec("gaussian"), k=2, n=10, r=1)


class TestBreakdownProbe:
    def test_mean_breaks_at_any_fraction(self):
        probe = run_breakdown_probe(
            lambda s: float(s.values.mean()), n=1000, fractions=(0.001,)
        )
        assert probe[0][2] is True

    def test_trimmed_mean_bounded_below_breakdown(self):
        from robustmean.estimators import TrimSpec, trimmed_mean

        probe = run_breakdown_probe(
            lambda s: trimmed_mean(s, TrimSpec(0.125)), n=1000, fractions=(0.05,)
        )
        assert probe[0][2] is False

    def test_fraction_range(self):
        with pytest.raises(ConfigError):
            run_breakdown_probe(lambda s: 0.0, fractions=(0.7,))


class TestCsvFormat:
    def test_schema_and_line_endings(self):
        cfg = SweepConfig(families=("uniform",), kurtosis={"uniform": (1.8,)}, **SMALL)
        text = result_csv_text(run_bias_sweep(cfg))
        lines = text.split("\n")
        assert lines[0].startswith("# robustmean-csv-v1")
        assert lines[1] == ",".join(RESULT_COLUMNS)
        assert "\r" not in text
        assert text.endswith("\n")

    def test_nan_serialized_empty(self):
        cfg = SweepConfig(families=("gamma",), kurtosis={"gamma": (2.5,)}, **SMALL)
        text = result_csv_text(run_bias_sweep(cfg))
        row = text.split("\n")[2].split(",")
        assert row[RESULT_COLUMNS.index("estimate")] == ""


class TestCli:
    def test_estimate_median(self, tmp_path, capsys):
        data = tmp_path / "data.txt"
        data.write_text("".join(f"{v}\n" for v in range(1, 10)))
        rc = cli.main(["estimate", str(data), "--estimator", "median"])
        assert rc == 0
        assert capsys.readouterr().out.strip() == "5"

    def test_estimate_to_file(self, tmp_path):
        data = tmp_path / "data.txt"
        data.write_text("".join(f"{v}\n" for v in range(1, 9)))
        out = tmp_path / "out.txt"
        rc = cli.main([
            "estimate", str(data), "--estimator", "wm",
            "--epsilon", "0.25", "--output", str(out),
        ])
        assert rc == 0
        assert float(out.read_text()) == 4.5

    def test_config_file_fills_defaults(self, tmp_path, capsys):
        data = tmp_path / "data.txt"
        data.write_text("".join(f"{v}\n" for v in range(1, 9)))
        conf = tmp_path / "run.conf"
        conf.write_text("estimator = wm  # winsorize\nepsilon = 0.25\n")
        rc = cli.main(["estimate", str(data), "--config", str(conf)])
        assert rc == 0
        assert float(capsys.readouterr().out) == 4.5

    def test_flag_overrides_config(self, tmp_path, capsys):
        data = tmp_path / "data.txt"
        data.write_text("".join(f"{v}\n" for v in range(1, 10)))
        conf = tmp_path / "run.conf"
        conf.write_text("estimator = mean\n")
        rc = cli.main(["estimate", str(data), "--config", str(conf),
                       "--estimator", "median"])
        assert rc == 0
        assert capsys.readouterr().out.strip() == "5"

    def test_unknown_config_key_exit_2(self, tmp_path, capsys):
        data = tmp_path / "data.txt"
        data.write_text("1\n2\n3\n")
        conf = tmp_path / "run.conf"
        conf.write_text("estimatorr = median\n")
        assert cli.main(["estimate", str(data), "--config", str(conf)]) == 2

    def test_domain_error_exit_3(self, tmp_path, capsys):
        data = tmp_path / "data.txt"
        data.write_text("1\n2\n3\n4\n")
        rc = cli.main(["estimate", str(data), "--estimator", "tm",
                       "--epsilon", "0.7"])
        assert rc == 3

    def test_bounds_grid(self, tmp_path):
        out = tmp_path / "bounds.csv"
        rc = cli.main(["bounds", "--points", "5", "--gamma", "0.5",
                       "--output", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "epsilon,gamma,sup_qa_general,sup_qa_unimodal"
        assert len(lines) == 7

    def test_bounds_domain_error(self, capsys):
        assert cli.main(["bounds", "--epsilon", "0"]) == 3

    def test_breakdown_subcommand(self, tmp_path):
        out = tmp_path / "b.csv"
        rc = cli.main(["breakdown", "--estimator", "tm", "--epsilon", "0.125",
                       "--fractions", "0.05,0.25", "--n", "400",
                       "--output", str(out)])
        assert rc == 0
        rows = out.read_text().splitlines()
        assert rows[1] == "fraction,estimate,broken"
        assert rows[2].endswith(",0")
        assert rows[3].endswith(",1")

    def test_orderliness_subcommand(self, tmp_path):
        out = tmp_path / "o.csv"
        rc = cli.main(["orderliness", "--family", "exponential", "--nu", "2",
                       "--points", "512", "--output", str(out)])
        assert rc == 0
        rows = out.read_text().splitlines()
        header = rows[1].split(",")
        vals = dict(zip(header, rows[2].split(",")))
        assert vals["holds"] == "1"

    def test_orderliness_from_table(self, tmp_path):
        from robustmean.distmodel import quantiles

        p = np.linspace(1e-5, 1 - 1e-5, 20001)
        q = quantiles(DistributionSpec("exponential"), p)
        table = tmp_path / "q.txt"
        np.savetxt(table, np.column_stack([p, q]))
        out = tmp_path / "o.csv"
        rc = cli.main(["orderliness", "--table", str(table), "--nu", "1",
                       "--points", "256", "--output", str(out)])
        assert rc == 0

    def test_sweep_deterministic_bytes(self, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            rc = cli.main(["sweep", "--families", "uniform", "--n", "3000",
                           "--budget", "10000", "--output", str(out)])
            assert rc == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_variance_compare_subcommand(self, tmp_path):
        out = tmp_path / "v.csv"
        rc = cli.main(["variance-compare", "--family", "gaussian", "--k", "2",
                       "--n", "128", "--replications", "50",
                       "--output", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert "variance_ratio" in lines[0]
        assert len(lines) == 52
