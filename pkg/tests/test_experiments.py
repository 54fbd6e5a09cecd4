import logging

import numpy as np
import pytest

from linewalk.core.errors import LinewalkException
from linewalk.envgen import CONSTANT, STABLE_INCREMENTS, EnvironmentSpec
from linewalk.experiments import (
    environment_scale,
    ergodic_average,
    exponent_fit,
    exponent_fits,
    line_moment,
    overscaling_study,
    quadratic_variation_check,
    ratio_statistic,
    ratio_study,
    walk_horizon,
    xstar_moment_check,
)
from linewalk.walker import CSRW, VSRW


@pytest.fixture
def flat():
    """Both lines constant 1: X is a simple random walk."""
    return EnvironmentSpec(h_mode=CONSTANT, v_mode=CONSTANT, seed=3)


@pytest.fixture
def stable():
    return EnvironmentSpec(alpha1=0.5, alpha2=1.5, h_mode=STABLE_INCREMENTS, seed=4)

# ==================================
# Horizons
# ==================================

def test_walk_horizon(stable, flat):
    """Only the stable-mode CSRW runs to T**delta."""
    assert walk_horizon(stable, CSRW, 2.0 ** 8) == pytest.approx(2.0 ** 12)
    assert walk_horizon(stable, VSRW, 2.0 ** 8) == 2.0 ** 8
    assert walk_horizon(flat, CSRW, 2.0 ** 8) == 2.0 ** 8


def test_environment_scale(stable, flat):
    assert environment_scale(stable, 64.0) == 64.0
    assert environment_scale(flat, 64.0) == 1.0

# ==================================
# Exponent fits
# ==================================

def test_simple_walk_is_diffusive(flat):
    """Median |X_i(T)| of the simple walk grows like T**0.5."""
    run = exponent_fits(flat, VSRW, [2.0 ** p for p in range(6, 11)], runs=200)
    assert run.fits["x1"].slope == pytest.approx(0.5, abs=0.15)
    assert run.fits["x2"].slope == pytest.approx(0.5, abs=0.15)
    assert len(run.rows) == 5 * 200
    assert all(rate == 0.0 for rate in run.exclusion_rates.values())


def test_fit_refused_when_truncated(flat):
    """A jump cap far below the horizon excludes every run."""
    with pytest.raises(LinewalkException) as exc:
        exponent_fits(flat, VSRW, [64.0, 128.0], runs=4, jump_cap=10)
    assert exc.value.code == "fit_refused"


def test_rows_do_not_depend_on_workers(flat):
    """Inline and pooled runs return identical rows."""
    inline = exponent_fits(flat, VSRW, [16.0, 32.0], runs=8, workers=1)
    pooled = exponent_fits(flat, VSRW, [16.0, 32.0], runs=8, workers=2)
    assert inline.rows == pooled.rows
    assert inline.fits["x1"].slope == pooled.fits["x1"].slope


def test_exponent_fit_component(flat):
    with pytest.raises(LinewalkException):
        exponent_fit(flat, VSRW, 3, [16.0, 32.0], runs=2)

# ==================================
# Clock ratio
# ==================================

def test_ratio_is_one_for_unit_columns():
    """With V = 1 the two clocks coincide."""
    spec = EnvironmentSpec(alpha1=0.6, v_mode=CONSTANT, seed=8)
    ratios = ratio_statistic(spec, 16.0, runs=4)
    np.testing.assert_allclose(ratios, 1.0, rtol=1e-12)


def test_ratio_needs_unit_mean():
    """The ratio statistic assumes E[V] = 1."""
    with pytest.raises(LinewalkException):
        ratio_statistic(EnvironmentSpec(v_mode=CONSTANT, v_mean=2.0), 16.0, runs=2)


def test_ratio_study_table():
    spec = EnvironmentSpec(alpha1=0.6, v_mode=CONSTANT, seed=8)
    table = ratio_study(spec, [16.0, 32.0], runs=3)["table"]
    assert [row["T"] for row in table] == [16.0, 32.0]
    assert table[0]["mean"] == pytest.approx(1.0)
    assert table[0]["iqr"] == pytest.approx(0.0, abs=1e-12)

# ==================================
# Ergodic averages
# ==================================

def test_ergodic_average_constant():
    """The time average of H = 2 is 2."""
    spec = EnvironmentSpec(h_mode=CONSTANT, v_mode=CONSTANT, h_floor=2.0)
    assert ergodic_average(spec, VSRW, 100.0, (1.0, 0.0)) == pytest.approx(2.0)


def test_line_moment():
    """Closed-form moments per mode."""
    assert line_moment(EnvironmentSpec(alpha1=2.0), "horizontal", 1.0) == pytest.approx(2.0)
    assert line_moment(EnvironmentSpec(v_mode=CONSTANT, v_mean=3.0), "vertical", 2.0) == pytest.approx(9.0)
    with pytest.raises(LinewalkException) as exc:
        line_moment(EnvironmentSpec(alpha1=0.5, h_mode=STABLE_INCREMENTS), "horizontal", 0.5)
    assert exc.value.code == "configuration_error"

# ==================================
# Martingales and moments
# ==================================

def test_quadratic_variation_structure():
    """All four martingale means sit within a few standard errors of 0."""
    spec = EnvironmentSpec(alpha1=2.0, alpha2=2.0, seed=5)
    result = quadratic_variation_check(spec, 50.0, runs=200)
    assert result["runs"] == 200
    for name in ("x1", "x2", "qv1", "qv2"):
        assert abs(result[name]["mean"]) <= 5 * result[name]["se"]


def test_overscaling_warns_below_threshold(caplog):
    """a at or below the threshold is allowed but logged."""
    spec = EnvironmentSpec(alpha1=2.0, alpha2=2.0, seed=6)
    with caplog.at_level(logging.WARNING, logger="linewalk.experiments"):
        result = overscaling_study(spec, (0.5, 0.5), [16.0, 32.0], runs=4)
    assert "does not exceed the threshold" in caplog.text
    assert result["thresholds"] == pytest.approx([1.0, 1.0])
    assert len(result["table"]) == 2


def test_xstar_needs_subcritical_plus_exponents():
    """A_i are undefined when eps1+ eps2+ >= 1."""
    with pytest.raises(LinewalkException):
        xstar_moment_check(EnvironmentSpec(alpha1=0.2, alpha2=0.2), (0.1, 0.1), [16.0, 32.0], runs=2)
