"""Containers, cross-correlation, partial-sum scaling and log-log fitting."""

import math

import numpy as np
import pytest

from plcc.core import (
    FluctuationCurve,
    ScalingFit,
    TimeSeries,
    fit_loglog,
    partial_sum_scaling,
    profile,
    sample_ccf,
    series_values,
)
from plcc.errors import (
    DegenerateInput,
    InvalidInput,
    InvalidParameter,
    NonPositiveOrdinate,
)
from plcc.montecarlo import split_seed


# =========================================================================
# series_values / TimeSeries / profile
# =========================================================================


def test_series_values_accepts_lists_and_timeseries():
    v = series_values([1, 2, 3])
    assert v.dtype == float
    assert v.tolist() == [1.0, 2.0, 3.0]
    ts = TimeSeries(np.arange(5.0), label="demo")
    assert series_values(ts) is ts.values


def test_series_values_validation():
    with pytest.raises(InvalidInput):
        series_values([])
    with pytest.raises(InvalidInput):
        series_values([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(InvalidInput):
        series_values([1.0, np.nan])
    with pytest.raises(InvalidInput):
        series_values([1.0, np.inf])


def test_timeseries_is_read_only():
    ts = TimeSeries([1.0, 2.0, 3.0])
    assert len(ts) == 3
    with pytest.raises(ValueError):
        ts.values[0] = 9.0


def test_profile_hand_example():
    # mean of (2, 4, 6) is 4; cumulative sums of (-2, 0, 2)
    p = profile([2.0, 4.0, 6.0])
    assert p.values.tolist() == [-2.0, -2.0, 0.0]
    assert p.source_length == 3


def test_profile_ends_near_zero():
    x = np.random.default_rng(11).standard_normal(1000)
    p = profile(x)
    assert abs(p.values[-1]) < 1e-9 * np.abs(x).sum()


def test_profile_constant_series_is_all_zero():
    p = profile(np.full(64, 3.25))
    assert np.all(p.values == 0.0)


def test_profile_needs_two_observations():
    with pytest.raises(InvalidInput):
        profile([1.0])


# =========================================================================
# sample cross-correlation
# =========================================================================


def _ccf_oracle(x, y, k):
    """Direct implementation of the pinned estimator for one lag."""
    t = len(x)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if k >= 0:
        num = float(dx[: t - k] @ dy[k:])
    else:
        num = float(dx[-k:] @ dy[: t + k])
    return num / denom


def test_sample_ccf_matches_bruteforce_oracle():
    rng = np.random.default_rng(21)
    x = rng.standard_normal(64)
    y = rng.standard_normal(64)
    got = dict(sample_ccf(x, y, 5))
    for k in range(-5, 6):
        assert got[k] == pytest.approx(_ccf_oracle(x, y, k), abs=1e-14)
    assert got[0] == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)


def test_sample_ccf_lag_convention():
    # y runs one step behind x: y_{t+1} = x_t, so the peak sits at k = +1
    rng = np.random.default_rng(22)
    x = rng.standard_normal(512)
    y = np.empty_like(x)
    y[1:] = x[:-1]
    y[0] = 0.0
    got = dict(sample_ccf(x, y, 3))
    assert got[1] > 0.95
    assert all(abs(got[k]) < 0.2 for k in got if k != 1)


def test_sample_ccf_swap_symmetry_and_bounds():
    rng = np.random.default_rng(23)
    x = rng.standard_normal(200)
    y = rng.standard_normal(200)
    fwd = dict(sample_ccf(x, y, 7))
    rev = dict(sample_ccf(y, x, 7))
    for k in fwd:
        assert fwd[k] == rev[-k]
        assert -1.0 <= fwd[k] <= 1.0


def test_sample_ccf_independent_noise_is_small():
    a = np.random.default_rng(3001).standard_normal(10000)
    b = np.random.default_rng(3002).standard_normal(10000)
    got = dict(sample_ccf(a, b, 5))
    assert abs(got[5]) < 0.05
    assert abs(got[-5]) < 0.05


def test_sample_ccf_validation():
    x = np.arange(10.0)
    with pytest.raises(InvalidInput):
        sample_ccf(x, np.arange(9.0), 2)
    with pytest.raises(InvalidParameter):
        sample_ccf(x, x, -1)
    with pytest.raises(InvalidInput):
        sample_ccf(x, x, 5)  # 2 * 5 >= 10
    with pytest.raises(DegenerateInput):
        sample_ccf(np.full(10, 2.0), x, 2)


# =========================================================================
# partial-sum scaling
# =========================================================================


def test_partial_sum_block_construction_oracle():
    rng = np.random.default_rng(31)
    x = rng.standard_normal(64)
    y = rng.standard_normal(64)
    curve = partial_sum_scaling(x, None, [4, 8, 16])
    cross = partial_sum_scaling(x, y, [4, 8, 16])
    assert curve.kind == "dfa" and cross.kind == "dcca"
    for i, t in enumerate((4, 8, 16)):
        m = 64 // t
        sx = x[: m * t].reshape(m, t).sum(axis=1)
        sy = y[: m * t].reshape(m, t).sum(axis=1)
        assert curve.values[i] == pytest.approx(np.var(sx, ddof=1), rel=1e-12)
        assert cross.values[i] == pytest.approx(np.cov(sx, sy, ddof=1)[0, 1], rel=1e-12)


def test_partial_sum_iid_exponent_near_half():
    grid = np.unique(np.geomspace(4, 16384 // 4, 20).astype(int))
    fits = []
    for rep in range(100):
        w = np.random.default_rng(split_seed(909, rep)).standard_normal(16384)
        curve = partial_sum_scaling(w, None, grid)
        fit = fit_loglog(np.column_stack([curve.scales, curve.values]), 2.0)
        fits.append(fit.exponent)
    assert 0.45 < np.mean(fits) < 0.55


def test_partial_sum_long_memory_exponent():
    from plcc.arfima import generate_arfima

    grid = np.unique(np.geomspace(4, 16384 // 4, 20).astype(int))
    fits = []
    for rep in range(100):
        a = generate_arfima(0.4, 16384, split_seed(910, rep))
        curve = partial_sum_scaling(a, None, grid)
        fits.append(fit_loglog(np.column_stack([curve.scales, curve.values]), 2.0).exponent)
    # finite-sample downward bias keeps the mean below the asymptotic 0.9
    assert 0.75 < np.mean(fits) < 0.90


def test_partial_sum_validation():
    x = np.random.default_rng(1).standard_normal(256)
    with pytest.raises(InvalidInput):
        partial_sum_scaling(x, None, [4, 8])
    with pytest.raises(InvalidInput):
        partial_sum_scaling(x, None, [2, 8, 16])
    with pytest.raises(InvalidInput):
        partial_sum_scaling(x, None, [4, 8, 100])
    with pytest.raises(InvalidInput):
        partial_sum_scaling(x, None, [4, 8, 8, 16])
    with pytest.raises(InvalidInput):
        partial_sum_scaling(x, None, [4.5, 8, 16])
    with pytest.raises(InvalidInput):
        partial_sum_scaling(x, np.zeros(128), [4, 8, 16])


# =========================================================================
# log-log fitting
# =========================================================================


def test_fit_loglog_exact_power_law():
    s = np.array([10.0, 20.0, 40.0, 80.0, 160.0])
    fit = fit_loglog(np.column_stack([s, 3.0 * s**1.8]), divisor=2.0)
    assert fit.exponent == pytest.approx(0.9, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-10)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.stderr < 1e-12
    assert fit.range_used == (10.0, 160.0)


def test_fit_loglog_negative_divisor():
    w = np.geomspace(0.01, 0.5, 12)
    fit = fit_loglog(np.column_stack([w, w**-0.8]), divisor=-2.0)
    assert fit.exponent == pytest.approx(0.4, abs=1e-12)


def test_fit_loglog_stderr_divides_by_divisor():
    rng = np.random.default_rng(5)
    s = np.geomspace(10, 300, 15)
    vals = s**1.2 * np.exp(rng.normal(0, 0.1, s.size))
    f2 = fit_loglog(np.column_stack([s, vals]), divisor=2.0)
    f4 = fit_loglog(np.column_stack([s, vals]), divisor=4.0)
    assert f4.stderr == pytest.approx(f2.stderr / 2.0, rel=1e-12)
    assert f4.exponent == pytest.approx(f2.exponent / 2.0, rel=1e-12)


def test_fit_loglog_validation():
    good = np.column_stack([np.arange(1.0, 6.0), np.arange(1.0, 6.0)])
    with pytest.raises(InvalidParameter):
        fit_loglog(good, divisor=0.0)
    with pytest.raises(InvalidInput):
        fit_loglog(good[:2], divisor=2.0)
    with pytest.raises(InvalidInput):
        fit_loglog(np.array([1.0, 2.0, 3.0]), divisor=2.0)
    bad = good.copy()
    bad[2, 1] = -1.0
    with pytest.raises(NonPositiveOrdinate):
        fit_loglog(bad, divisor=2.0)
    bad = good.copy()
    bad[2, 0] = 0.0
    with pytest.raises(InvalidInput):
        fit_loglog(bad, divisor=2.0)
    flat = good.copy()
    flat[:, 0] = 7.0
    with pytest.raises(InvalidInput):
        fit_loglog(flat, divisor=2.0)


def test_scalingfit_field_validation():
    with pytest.raises(InvalidParameter):
        ScalingFit(0.5, 0.0, -0.1, 0.9, (1.0, 2.0))
    with pytest.raises(InvalidParameter):
        ScalingFit(0.5, 0.0, 0.1, 1.5, (1.0, 2.0))


def test_fluctuation_curve_validation():
    with pytest.raises(InvalidInput):
        FluctuationCurve(np.array([4, 8]), np.array([1.0]), "dfa")
    with pytest.raises(InvalidParameter):
        FluctuationCurve(np.array([4]), np.array([1.0]), "other")
    with pytest.raises(InvalidInput):
        FluctuationCurve(np.array([4]), np.array([-1.0]), "dfa")
    FluctuationCurve(np.array([4]), np.array([-1.0]), "dcca")  # signed is fine
