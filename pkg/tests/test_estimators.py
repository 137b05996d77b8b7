import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robustmean.errors import (
    DomainError,
    GeometryError,
    OverTrimError,
    ParameterError,
)
from robustmean.estimators import (
    CEILING,
    MIDPOINT,
    SQMContinuityWarning,
    SortedSample,
    TrimSpec,
    binomial_mean,
    block_winsorized_mean,
    empirical_quantile,
    median,
    quantile_average,
    stratified_mean,
    stratified_quantile_mean,
    subsample_average,
    trimmed_mean,
    winsorized_mean,
)


def seq(n):
    return SortedSample(np.arange(1.0, n + 1.0))


def sqm_quiet(s, t, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SQMContinuityWarning)
        return stratified_quantile_mean(s, t, **kw)


def sqm_mid(s, t):
    return sqm_quiet(s, t, conv=MIDPOINT)


ALL_ESTIMATORS = [
    # midpoint quantile convention keeps the quantile average exactly
    # mirror-symmetric when n*eps lands on an order statistic
    ("qa", lambda s, t: quantile_average(s, t, conv=MIDPOINT)),
    ("tm", trimmed_mean),
    ("wm", winsorized_mean),
    ("bwm", block_winsorized_mean),
    ("sm", stratified_mean),
    ("bm2", lambda s, t: binomial_mean(s, TrimSpec(t.epsilon, t.gamma, 2, t.strata))),
    ("bm3", lambda s, t: binomial_mean(s, TrimSpec(t.epsilon, t.gamma, 3, t.strata))),
    ("sqm", sqm_mid),
    ("median", lambda s, t: median(s)),
]


class TestSortedSample:
    def test_rejects_unsorted(self):
        with pytest.raises(DomainError):
            SortedSample(np.array([2.0, 1.0]))

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            SortedSample(np.array([1.0, np.inf]))

    def test_from_data_sorts(self):
        s = SortedSample.from_data([3, 1, 2])
        np.testing.assert_array_equal(s.values, [1.0, 2.0, 3.0])

    def test_trimspec_validation(self):
        with pytest.raises(DomainError):
            TrimSpec(epsilon=0.6, gamma=1.0)
        with pytest.raises(DomainError):
            TrimSpec(epsilon=0.1, strata=4)
        with pytest.raises(DomainError):
            TrimSpec(epsilon=0.1, nu=0)
        TrimSpec(epsilon=0.4, gamma=0.5)


class TestEmpiricalQuantile:
    def test_ceiling_convention(self):
        s = seq(10)
        assert empirical_quantile(s, 0.25) == 3.0  # ceil(2.5)
        assert empirical_quantile(s, 0.2) == 2.0  # integral n*p
        assert empirical_quantile(s, 0.0) == 1.0
        assert empirical_quantile(s, 1.0) == 10.0

    def test_midpoint_convention(self):
        s = seq(10)
        assert empirical_quantile(s, 0.5, conv=MIDPOINT) == 5.5
        assert empirical_quantile(s, 0.25, conv=MIDPOINT) == 3.0  # non-integral

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            empirical_quantile(seq(5), 1.2)

    def test_median_even_average(self):
        assert median(seq(8)) == 4.5
        assert median(seq(9)) == 5.0


class TestWorkedExamples:
    def test_trimmed_mean(self):
        assert trimmed_mean(seq(10), TrimSpec(0.2, 0.5)) == pytest.approx(5.0)
        assert trimmed_mean(seq(8), TrimSpec(0.25)) == pytest.approx(4.5)

    def test_winsorized_mean(self):
        assert winsorized_mean(seq(10), TrimSpec(0.2, 0.5)) == pytest.approx(5.3)
        assert winsorized_mean(seq(8), TrimSpec(0.25)) == pytest.approx(4.5)

    def test_block_winsorized_mean(self):
        assert block_winsorized_mean(seq(8), TrimSpec(0.125)) == pytest.approx(4.5)
        assert block_winsorized_mean(seq(8), TrimSpec(0.25)) == pytest.approx(4.5)

    def test_stratified_mean(self):
        assert stratified_mean(seq(9), TrimSpec(1 / 3)) == pytest.approx(5.0)
        assert stratified_mean(seq(8), TrimSpec(0.125)) == pytest.approx(4.5)
        assert stratified_mean(seq(12), TrimSpec(1 / 6)) == pytest.approx(6.5)

    def test_binomial_mean(self):
        assert binomial_mean(seq(16), TrimSpec(0.125, nu=3)) == pytest.approx(8.5)

    def test_stratified_quantile_mean(self):
        assert sqm_quiet(seq(8), TrimSpec(0.125)) == pytest.approx(4.0)

    def test_midhinge_case(self):
        s = seq(8)
        midhinge = 0.5 * (empirical_quantile(s, 0.25) + empirical_quantile(s, 0.75))
        assert sqm_quiet(s, TrimSpec(0.25)) == pytest.approx(midhinge)

    def test_quantile_average_asymmetric_forms(self):
        s = seq(8)
        t = TrimSpec(0.25, 0.5)
        eq1 = 0.5 * (empirical_quantile(s, 0.125) + empirical_quantile(s, 0.75))
        eq2 = 0.5 * (empirical_quantile(s, 0.25) + empirical_quantile(s, 0.875))
        assert quantile_average(s, t, defn="eq1") == pytest.approx(eq1)
        assert quantile_average(s, t, defn="eq2") == pytest.approx(eq2)


class TestErrors:
    def test_over_trim(self):
        with pytest.raises(OverTrimError):
            trimmed_mean(seq(4), TrimSpec(0.5))

    def test_bwm_needs_whole_block(self):
        with pytest.raises(GeometryError):
            block_winsorized_mean(seq(5), TrimSpec(0.1))

    def test_bm_epsilon_too_large(self):
        with pytest.raises(GeometryError):
            binomial_mean(seq(20), TrimSpec(0.3, nu=3))

    def test_sqm_needs_integral_count(self):
        with pytest.raises(ParameterError) as exc:
            stratified_quantile_mean(seq(20), TrimSpec(0.11))
        assert exc.value.suggestion == pytest.approx(0.25 / 2)

    def test_sqm_warns_on_breakdown_continuity(self):
        with pytest.warns(SQMContinuityWarning):
            stratified_quantile_mean(seq(8), TrimSpec(0.125))


class TestIdentities:
    def test_bm1_equals_bwm_quarter(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            s = SortedSample.from_data(rng.normal(size=int(rng.integers(4, 80))))
            assert binomial_mean(s, TrimSpec(0.25, nu=1)) == pytest.approx(
                block_winsorized_mean(s, TrimSpec(0.25)), abs=1e-12
            )

    def test_bm2_equals_sm3(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            s = SortedSample.from_data(rng.normal(size=int(rng.integers(6, 90))))
            for eps in (1 / 12, 1 / 8, 1 / 6):
                assert binomial_mean(s, TrimSpec(eps, nu=2)) == pytest.approx(
                    stratified_mean(s, TrimSpec(eps, strata=3)), abs=1e-12
                )

    def test_sm_degenerates_to_tm(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            s = SortedSample.from_data(rng.normal(size=int(rng.integers(5, 70))))
            for eps in (0.2, 0.25, 0.3):
                assert stratified_mean(s, TrimSpec(eps)) == pytest.approx(
                    trimmed_mean(s, TrimSpec(eps)), abs=1e-12
                )


@st.composite
def samples(draw):
    n = draw(st.integers(16, 96))
    vals = draw(
        st.lists(
            st.floats(-1e3, 1e3, allow_nan=False, width=64),
            min_size=n, max_size=n,
        )
    )
    return np.sort(np.asarray(vals, dtype=float))


@pytest.mark.parametrize("name,fn", ALL_ESTIMATORS, ids=[e[0] for e in ALL_ESTIMATORS])
@settings(max_examples=40, deadline=None)
@given(data=samples(), lam=st.floats(0.1, 50.0), mu=st.floats(-100.0, 100.0))
def test_equivariance(name, fn, data, lam, mu):
    t = TrimSpec(0.125)
    base = fn(SortedSample(data), t)
    moved = fn(SortedSample(np.sort(lam * data + mu)), t)
    scale = max(1.0, abs(lam) * float(np.max(np.abs(data))) + abs(mu))
    assert moved == pytest.approx(lam * base + mu, abs=1e-12 * scale)


@pytest.mark.parametrize("name,fn", ALL_ESTIMATORS, ids=[e[0] for e in ALL_ESTIMATORS])
@settings(max_examples=40, deadline=None)
@given(data=samples(), center=st.floats(-50.0, 50.0))
def test_mirror_symmetric_midpoint(name, fn, data, center):
    mirrored = np.sort(np.concatenate([center + data, center - data]))
    est = fn(SortedSample(mirrored), TrimSpec(0.125))
    scale = max(1.0, abs(center) + float(np.max(np.abs(data))))
    assert est == pytest.approx(center, abs=1e-12 * scale)


@pytest.mark.parametrize("name,fn", ALL_ESTIMATORS, ids=[e[0] for e in ALL_ESTIMATORS])
def test_within_sample_range(name, fn):
    rng = np.random.default_rng(9)
    for _ in range(20):
        s = SortedSample.from_data(rng.lognormal(size=40))
        est = fn(s, TrimSpec(0.125))
        assert s.values[0] - 1e-12 <= est <= s.values[-1] + 1e-12


class TestSubsampleAverage:
    def test_integral_boundaries_bypass(self):
        data = np.arange(1.0, 17.0)
        t = TrimSpec(0.125)
        assert subsample_average(trimmed_mean, data, t) == pytest.approx(
            trimmed_mean(SortedSample(data), t)
        )

    def test_fractional_boundaries_average(self):
        rng = np.random.default_rng(4)
        data = rng.normal(size=17)
        t = TrimSpec(0.125)
        a = subsample_average(trimmed_mean, data, t, r=50, seed=0)
        b = subsample_average(trimmed_mean, data, t, r=50, seed=0)
        assert a == b
        assert abs(a - np.mean(data)) < 1.0
