import logging

import numpy as np
import pytest

from linewalk.core.errors import LinewalkException
from linewalk.core.rng import stream_generator
from linewalk.envgen import SubordinatorPath
from linewalk.limits import (
    BM_ROUTE,
    KSProcessSample,
    brownian_path,
    fin_pair,
    invert_ks,
    ks_from_component,
    ks_sample,
    limit_pair,
)
from linewalk.local_times import local_times, simulate_srw

T_PROXY = 2.0 ** 10
GRID = np.linspace(0.0, 1.0, 9)


@pytest.fixture
def subordinator():
    return SubordinatorPath(0.5, 2.0 ** -8, 404)

# ==================================
# Brownian motion
# ==================================

def test_brownian_variance():
    """B(1) has variance 2 with the default diffusion coefficient."""
    ends = [brownian_path([0.0, 0.5, 1.0], stream)[-1] for stream in range(2000)]
    assert np.var(ends) == pytest.approx(2.0, abs=0.25)


def test_brownian_grid_must_start_at_zero():
    """Grids are increasing and start at 0."""
    with pytest.raises(LinewalkException) as exc:
        brownian_path([0.5, 1.0], 0)
    assert exc.value.code == "domain_error"

# ==================================
# Kesten-Spitzer clock
# ==================================

def test_ks_sample_is_increasing(subordinator):
    """Delta starts at 0 and increases strictly."""
    sample = ks_sample(0.5, GRID, stream=0, t_proxy=T_PROXY, subordinator=subordinator)
    assert sample.values[0] == 0.0
    assert sample.is_strictly_increasing()


def test_ks_sample_bm_route(subordinator):
    """The binned Brownian route also yields an increasing clock."""
    sample = ks_sample(0.5, GRID, stream=0, route=BM_ROUTE, bin_width=2.0 ** -4,
                       subordinator=subordinator)
    assert sample.provenance == BM_ROUTE
    assert sample.is_strictly_increasing()


def test_ks_from_component_is_local_time_integral(subordinator):
    """The clock is sum_k l_t(k) times the increment over site k."""
    path = simulate_srw(T_PROXY, stream_generator(3, "srw", 0))
    values = ks_from_component(path, subordinator, T_PROXY, GRID)
    field = local_times(path, T_PROXY, GRID)
    increments = subordinator.site_increments(T_PROXY, int(field.sites[0]), int(field.sites[-1]) + 1)
    expected = field.site_times @ increments / np.sqrt(T_PROXY)
    assert values == pytest.approx(expected, rel=1e-9)


def test_invert_ks(subordinator):
    """Inversion returns grid times at grid values."""
    sample = ks_sample(0.5, GRID, stream=1, t_proxy=T_PROXY, subordinator=subordinator)
    assert invert_ks(sample, sample.values[3]) == pytest.approx(GRID[3])
    with pytest.raises(LinewalkException) as exc:
        invert_ks(sample, sample.values[-1] * 2.0)
    assert exc.value.code == "clock_out_of_range"


def test_invert_ks_warns_on_coarse_grid(caplog):
    """A single step above 5% of Delta(t_max) is logged with its size."""
    sample = KSProcessSample(np.array([0.0, 0.5, 1.0]), np.array([0.0, 2.0, 10.0]), 0.5)
    with caplog.at_level(logging.WARNING, logger="linewalk.limits"):
        assert invert_ks(sample, 6.0) == pytest.approx(0.75)
    assert "step 8.0" in caplog.text and "Delta(t_max)=10.0" in caplog.text


@pytest.mark.parametrize("kwargs", [{"alpha": 1.2}, {"route": "euler"}])
def test_ks_sample_rejects(kwargs):
    """alpha outside (0, 1) and unknown routes are refused."""
    args = {"alpha": 0.5, "t_grid": GRID, "stream": 0, "t_proxy": T_PROXY, **kwargs}
    with pytest.raises(LinewalkException):
        ks_sample(**args)

# ==================================
# Limit pairs
# ==================================

def test_limit_pair_clock_matches_ks_sample(subordinator):
    """The conv pair is driven by the same clock as ks_sample on that stream."""
    pair = limit_pair(0.5, GRID, stream=2, t_proxy=T_PROXY, subordinator=subordinator)
    sample = ks_sample(0.5, GRID, stream=2, t_proxy=T_PROXY, subordinator=subordinator)
    np.testing.assert_array_equal(pair.clock, sample.values)
    assert pair.kind == "conv"
    assert pair.first[0] == 0.0 and pair.second[0] == 0.0


def test_limit_pair_second_is_rescaled_lattice(subordinator):
    """B2 is an SRW site divided by sqrt(T)."""
    pair = limit_pair(0.5, GRID, stream=3, t_proxy=T_PROXY, subordinator=subordinator)
    sites = pair.second * np.sqrt(T_PROXY)
    np.testing.assert_allclose(sites, np.round(sites))


def test_fin_pair(subordinator):
    """The inverse clock is non-decreasing and starts at 0."""
    pair = fin_pair(0.5, GRID, stream=4, t_proxy=T_PROXY, fine_points=512, subordinator=subordinator)
    assert pair.kind == "fin"
    assert pair.clock[0] == 0.0
    assert np.all(np.diff(pair.clock) >= 0)
    assert pair.first.shape == GRID.shape
