import numpy as np
import pytest

from linewalk.clocks import (
    additive_functional,
    csrw_weight,
    horizontal_weight,
    invert_clock,
    monomial_weight,
    time_change,
    unit_weight,
    vertical_weight,
)
from linewalk.core.errors import LinewalkException
from linewalk.envgen import CONSTANT, EnvironmentSpec, build_environment
from linewalk.stats import ks_two_sample
from linewalk.walker import CSRW, VSRW, simulate


@pytest.fixture
def env():
    return build_environment(EnvironmentSpec(alpha1=0.8, alpha2=1.5, seed=31))


@pytest.fixture
def traj(env):
    return simulate(env, VSRW, horizon=25.0, stream=2)


def test_unit_clock_is_identity(traj):
    """The clock of the unit weight is t itself."""
    clock = additive_functional(traj, unit_weight)
    t = np.linspace(0.0, 25.0, 11)
    assert clock.value(t) == pytest.approx(t)
    assert clock.final_value == pytest.approx(25.0)


def test_constant_horizontal_clock():
    """With H = 2 the horizontal clock is 2t."""
    env = build_environment(EnvironmentSpec(h_mode=CONSTANT, v_mode=CONSTANT, h_floor=2.0))
    traj = simulate(env, VSRW, horizon=10.0, stream=1)
    clock = additive_functional(traj, horizontal_weight(env))
    assert clock.final_value == pytest.approx(20.0)


def test_clock_matches_summary_integral(env, traj):
    """The stored clock agrees with a direct holding-time sum."""
    clock = additive_functional(traj, horizontal_weight(env))
    holds = np.diff(np.concatenate(([0.0], traj.jump_times, [traj.horizon])))
    h = np.array([env.H(int(x2)) for x2 in traj.positions[:, 1]])
    assert clock.final_value == pytest.approx(float(np.sum(h * holds)))


def test_inverse_round_trip(env, traj):
    """invert_clock undoes value on the attained range."""
    clock = additive_functional(traj, vertical_weight(env))
    t = np.array([0.0, 3.3, 12.0, 24.9])
    assert invert_clock(clock, clock.value(t)) == pytest.approx(t)
    assert clock.inverse().value(clock.value(7.5)) == pytest.approx(7.5)


def test_invert_outside_range(env, traj):
    """Values beyond the attained clock are refused."""
    clock = additive_functional(traj, horizontal_weight(env))
    with pytest.raises(LinewalkException) as exc:
        invert_clock(clock, clock.final_value * 2.0)
    assert exc.value.code == "clock_out_of_range"


def test_monomial_ratio_weight(env, traj):
    """H/V is applied exactly for exponents (1, -1)."""
    ratio = monomial_weight(env, 1.0, -1.0)(traj.positions)
    h = horizontal_weight(env)(traj.positions)
    v = vertical_weight(env)(traj.positions)
    np.testing.assert_array_equal(ratio, h / v)


def test_csrw_weight_is_sum(env, traj):
    """J integrates H + V."""
    np.testing.assert_allclose(
        csrw_weight(env)(traj.positions),
        horizontal_weight(env)(traj.positions) + vertical_weight(env)(traj.positions),
    )


def test_time_change_keeps_positions(env, traj):
    """X o A^{-1} visits the same sites at the clock's jump times."""
    clock = additive_functional(traj, monomial_weight(env, 1.0, 0.0))
    changed = time_change(traj, clock)
    np.testing.assert_array_equal(changed.positions, traj.positions)
    np.testing.assert_allclose(changed.jump_times, clock.value(traj.jump_times))
    assert changed.horizon == pytest.approx(clock.final_value)


def test_time_change_round_trip(env, traj):
    """Changing time by a clock and then by its inverse restores the jump times."""
    clock = additive_functional(traj, csrw_weight(env))
    back = time_change(time_change(traj, clock), clock.inverse())
    np.testing.assert_array_equal(back.positions, traj.positions)
    np.testing.assert_allclose(back.jump_times, traj.jump_times, rtol=1e-12, atol=0.0)
    assert back.horizon == pytest.approx(traj.horizon, rel=1e-12)


def test_vsrw_changed_by_total_rate_is_csrw(env):
    """The VSRW run on the clock of H + V has the law of the CSRW in the same environment."""
    t0, runs = 20.0, 400
    # H + V >= 1 + 1/3 here, so the clock passes t0 before time 15
    changed = []
    for r in range(runs):
        path = simulate(env, VSRW, horizon=15.0, stream=r)
        changed.append(float(time_change(path, additive_functional(path, csrw_weight(env))).position_at(t0)[1]))
    direct = [float(simulate(env, CSRW, horizon=t0, stream=10_000 + r).position_at(t0)[1]) for r in range(runs)]
    assert not ks_two_sample(changed, direct).rejects


def test_time_change_mismatch(env, traj):
    """A clock built from another trajectory is refused."""
    other = simulate(env, VSRW, horizon=25.0, stream=3)
    clock = additive_functional(other, unit_weight)
    with pytest.raises(LinewalkException) as exc:
        time_change(traj, clock)
    assert exc.value.code == "clock_mismatch"


def test_clock_needs_horizon(traj):
    """A clock cannot be requested past the trajectory."""
    with pytest.raises(LinewalkException):
        additive_functional(traj, unit_weight, t_max=100.0)


def test_rescaled_clock(traj):
    """scale_pre and scale_post rescale time and value."""
    clock = additive_functional(traj, unit_weight, scale_pre=5.0, scale_post=0.5)
    assert clock.horizon == pytest.approx(5.0)
    assert clock.value(2.0) == pytest.approx(5.0)
