import numpy as np
import pytest

from linewalk.core.errors import LinewalkException
from linewalk.core.rng import stream_generator
from linewalk.local_times import local_times, simulate_srw


@pytest.fixture
def path():
    return simulate_srw(4096.0, stream_generator(5, "srw", 0))


def test_srw_steps_and_rate(path):
    """Nearest-neighbour steps at total rate 2."""
    assert np.all(np.abs(np.diff(path.sites)) == 1)
    assert path.sites[0] == 0
    assert path.n_jumps / 4096.0 == pytest.approx(2.0, rel=0.05)


def test_srw_is_reproducible():
    """The same stream yields the same path."""
    a = simulate_srw(100.0, stream_generator(5, "srw", 1))
    b = simulate_srw(100.0, stream_generator(5, "srw", 1))
    np.testing.assert_array_equal(a.jump_times, b.jump_times)
    np.testing.assert_array_equal(a.sites, b.sites)


def test_extension_keeps_the_past():
    """Growing a path leaves its earlier part untouched."""
    gen = stream_generator(5, "srw", 2)
    short = simulate_srw(50.0, gen)
    longer = simulate_srw(120.0, gen, start=short)
    np.testing.assert_array_equal(longer.jump_times[:short.n_jumps], short.jump_times)
    np.testing.assert_array_equal(longer.sites[:short.sites.size], short.sites)
    assert longer.horizon == 120.0


def test_local_time_mass(path):
    """Rescaled local times sum to sqrt(T) * t."""
    field = local_times(path, 1024.0, [0.5, 1.0, 4.0])
    assert field.mass(0) == pytest.approx(np.sqrt(1024.0) * 0.5)
    assert field.mass(2) == pytest.approx(np.sqrt(1024.0) * 4.0)


def test_local_time_monotone_in_t(path):
    """Holding times only grow with t."""
    field = local_times(path, 1024.0, [0.25, 1.0, 4.0])
    assert np.all(np.diff(field.site_times, axis=0) >= 0)


def test_ell_and_interpolation(path):
    """ell reads the site floor(sqrt(T) x); interpolation is linear in between."""
    field = local_times(path, 1024.0, [1.0])
    assert field.ell(0, 0.0) == field.at_site(0, 0)
    midpoint = field.interpolated(0, 0.5 / np.sqrt(1024.0))
    assert midpoint == pytest.approx(0.5 * (field.at_site(0, 0) + field.at_site(0, 1)))
    assert field.at_site(0, 10 ** 6) == 0.0


def test_window_drops_far_sites(path):
    """Sites outside the rescaled window are removed."""
    field = local_times(path, 1024.0, [1.0], x_window=(-0.1, 0.1))
    assert np.all(np.abs(field.sites / np.sqrt(1024.0)) <= 0.1)


def test_local_times_past_horizon(path):
    """T * t beyond the path horizon is refused."""
    with pytest.raises(LinewalkException) as exc:
        local_times(path, 1024.0, [8.0])
    assert exc.value.code == "horizon_not_reached"
