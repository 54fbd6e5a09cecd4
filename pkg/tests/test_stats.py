import math

import numpy as np
import pytest

from linewalk.core.errors import LinewalkException
from linewalk.core.rng import stream_generator
from linewalk.stats import (
    epsilon,
    exact_mean,
    fit_power_law,
    interquartile_range,
    ks_two_sample,
    scaling_params,
    standard_error,
)

# ==================================
# Scaling parameters
# ==================================

@pytest.mark.parametrize("alpha,expected", [(0.5, 0.5), (1.0, 0.0), (2.0, 0.0), (0.25, 1.5)])
def test_epsilon(alpha, expected):
    """max((1/alpha - 1) / 2, 0)."""
    assert epsilon(alpha) == pytest.approx(expected)


def test_case2_exponents():
    """alpha = (0.5, 1.5): only H is heavy."""
    params = scaling_params(0.5, 1.5)
    assert params.case == "case2"
    assert params.gammas() == pytest.approx((0.75, 0.5))
    assert params.delta == pytest.approx(1.5)
    assert params.csrw_gamma2 == pytest.approx(1.0 / 3.0)


def test_case1_exponents():
    """Both tails heavy with eps1 * eps2 = 1/9."""
    params = scaling_params(0.6, 0.6)
    assert params.case == "case1"
    assert params.eps_product == pytest.approx(1.0 / 9.0)
    assert params.gammas() == pytest.approx((0.75, 0.75))


def test_diffusive_exponents():
    """Integrable lines give diffusive scaling."""
    params = scaling_params(2.0, 2.0)
    assert params.case == "diffusive"
    assert params.gammas() == pytest.approx((0.5, 0.5))


def test_supercritical_has_no_exponents():
    """eps1 * eps2 >= 1 leaves gamma undefined."""
    params = scaling_params(0.2, 0.2)
    assert params.supercritical
    assert params.csrw_gamma2 is None
    with pytest.raises(LinewalkException) as exc:
        params.gammas()
    assert exc.value.code == "supercritical"


def test_moment_exponents_use_minus_alphas():
    """A_i come from eps_i^+ of the minus exponents."""
    params = scaling_params(0.6, 0.9, 0.3, 0.45)
    p1, p2 = epsilon(0.3), epsilon(0.45)
    assert params.A1 == pytest.approx((1 + p1) / (1 - p1 * p2))
    assert params.A2 == pytest.approx((1 + p2) / (1 - p1 * p2))
    assert params.to_dict()["case"] == "case1"


def test_minus_alpha_must_be_smaller():
    """alpha_i^- lies in (0, alpha_i)."""
    with pytest.raises(LinewalkException):
        scaling_params(0.6, 0.9, 0.6, 0.45)

# ==================================
# Kolmogorov-Smirnov
# ==================================

def test_ks_rejection_rate_under_null():
    """Same-law samples are rejected at roughly the 1% level."""
    gen = stream_generator(17, "ks", 0)
    rejections = sum(
        ks_two_sample(gen.normal(size=200), gen.normal(size=200)).rejects for _ in range(1000)
    )
    assert 3 <= rejections <= 30


def test_ks_detects_shift():
    """A unit shift is rejected."""
    gen = stream_generator(17, "ks", 1)
    result = ks_two_sample(gen.normal(size=500), gen.normal(1.0, size=500))
    assert result.rejects
    assert result.critical_value == pytest.approx(1.628 * math.sqrt(2 / 500))


def test_ks_empty_sample():
    """An empty side is an error, not a statistic."""
    with pytest.raises(LinewalkException) as exc:
        ks_two_sample([], [1.0])
    assert exc.value.code == "empty_sample"

# ==================================
# Power-law fits
# ==================================

def test_fit_recovers_exact_power():
    """log-log slope of 3 s**0.5 is 0.5."""
    scales = 2.0 ** np.arange(10, 18)
    fit = fit_power_law(scales, 3.0 * scales ** 0.5)
    assert fit.slope == pytest.approx(0.5)
    assert fit.intercept == pytest.approx(math.log(3.0))
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.reportable


def test_fit_needs_range_to_report():
    """Fewer than four scales or under two decades is not reportable."""
    assert not fit_power_law([2.0 ** 10, 2.0 ** 11, 2.0 ** 17], [1.0, 2.0, 3.0]).reportable
    assert not fit_power_law(2.0 ** np.arange(10, 15), np.arange(1.0, 6.0)).reportable


def test_fit_rejects_nonpositive():
    """Logs need positive values."""
    with pytest.raises(LinewalkException):
        fit_power_law([1.0, 2.0], [1.0, 0.0])

# ==================================
# Reductions
# ==================================

def test_exact_mean_is_order_independent():
    """fsum makes the mean independent of summation order."""
    values = [1e16, 1.0, -1e16, 3.0, 0.1, 0.2]
    assert exact_mean(values) == exact_mean(values[::-1])
    assert exact_mean(values) == pytest.approx(4.3 / 6)


def test_exact_mean_empty():
    with pytest.raises(LinewalkException):
        exact_mean([])


def test_standard_error_and_iqr():
    assert math.isnan(standard_error([1.0]))
    assert standard_error([1.0, 3.0]) == pytest.approx(1.0)
    assert interquartile_range(np.arange(101.0)) == pytest.approx(50.0)
