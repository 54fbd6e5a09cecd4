import numpy as np
import pytest

from linewalk.core.errors import LinewalkException
from linewalk.core.rng import stream_generator
from linewalk.envgen import (
    CONSTANT,
    HORIZONTAL,
    STABLE_INCREMENTS,
    VERTICAL,
    EnvironmentSpec,
    LineField,
    SubordinatorPath,
    build_environment,
    draw_positive_stable,
    dump_window,
    line_value,
    pareto_moment,
    rescaled_H,
    rescaled_window,
    sample_pareto_floor,
)


@pytest.fixture
def spec():
    """The default heavy-tailed environment law."""
    return EnvironmentSpec(alpha1=0.6, alpha2=0.9, seed=7)


@pytest.fixture
def stable_spec():
    """A stable-increments horizontal field with integrable V."""
    return EnvironmentSpec(alpha1=0.5, alpha2=1.5, h_mode=STABLE_INCREMENTS, seed=11)

# ==================================
# Samplers
# ==================================

def test_pareto_inverse_cdf():
    """u**(-1/alpha) scaled by the floor."""
    assert sample_pareto_floor(2.0, 1.0, 0.25) == pytest.approx(2.0)
    assert sample_pareto_floor(1.0, 3.0, 0.5) == pytest.approx(6.0)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1])
def test_pareto_rejects_closed_interval(u):
    """Uniforms must lie strictly inside (0, 1)."""
    with pytest.raises(LinewalkException) as exc:
        sample_pareto_floor(1.5, 1.0, u)
    assert exc.value.code == "domain_error"


def test_pareto_tail_frequency():
    """P(H > L) = L**-alpha for floor 1."""
    field = LineField(EnvironmentSpec(alpha1=1.5, seed=3), HORIZONTAL)
    values = field.window(-10_000, 10_000)
    assert np.mean(values > 4.0) == pytest.approx(4.0 ** -1.5, abs=0.01)
    assert values.min() >= 1.0


def test_pareto_moment():
    """E[X**beta] = alpha floor**beta / (alpha - beta)."""
    assert pareto_moment(2.0, 1.0, 1.0) == pytest.approx(2.0)
    with pytest.raises(LinewalkException):
        pareto_moment(0.5, 1.0, 0.5)


def test_positive_stable_laplace_transform():
    """E[exp(-S)] = exp(-1) for every alpha."""
    sample = draw_positive_stable(0.5, stream_generator(1, "sampler", 0), 20_000)
    assert np.all(sample > 0)
    assert np.mean(np.exp(-sample)) == pytest.approx(np.exp(-1.0), abs=0.02)

# ==================================
# Line fields
# ==================================

def test_line_value_is_pure(spec):
    """Two fields with the same seed agree, whatever the access order."""
    first = LineField(spec, HORIZONTAL)
    second = LineField(spec, HORIZONTAL)
    forward = [first.line_value(k) for k in range(-5, 5)]
    backward = [second.line_value(k) for k in reversed(range(-5, 5))][::-1]
    assert forward == backward
    assert line_value(first, 3) == first.line_value(3)


def test_window_matches_line_value(spec):
    """Windows straddling block boundaries match pointwise lookups."""
    field = LineField(spec, VERTICAL)
    window = field.window(-1030, 1030)
    assert window[0] == field.line_value(-1030)
    assert window[-1] == field.line_value(1029)
    assert window[1030] == field.line_value(0)


def test_axes_are_independent(spec):
    """H and V draw from different streams."""
    env = build_environment(spec)
    assert [env.H(k) for k in range(5)] != [env.V(k) for k in range(5)]


def test_negative_blocks_are_distinct(spec):
    """Blocks -2, -1 and 0 come from different counters."""
    blocks = LineField(spec, HORIZONTAL).window(-2048, 1024).reshape(3, 1024)
    assert not np.array_equal(blocks[0], blocks[1])
    assert not np.array_equal(blocks[1], blocks[2])
    assert not np.array_equal(blocks[0], blocks[2])


def test_subordinator_sides_are_distinct():
    """Negative cells are not a copy of the positive ones."""
    path = SubordinatorPath(0.5, 2.0 ** -8, 17)
    assert not np.array_equal(path.increments(-2048, -1024), path.increments(-1024, 0))
    assert not np.array_equal(path.increments(-1024, 0), path.increments(0, 1024))


def test_adjacent_large_seeds_differ():
    """Seeds above 2**63 keep all 64 bits."""
    a, b = 2 ** 63 + 1, 2 ** 63 + 2
    assert stream_generator(a, "walk", 0).random() != stream_generator(b, "walk", 0).random()
    field_a = LineField(EnvironmentSpec(seed=a), HORIZONTAL).window(-4, 4)
    field_b = LineField(EnvironmentSpec(seed=b), HORIZONTAL).window(-4, 4)
    assert not np.array_equal(field_a, field_b)


@pytest.mark.parametrize("k", [-1025, -1, 0, 700])
def test_neighbouring_lines_uncorrelated(k):
    """log H(k) and log H(k+1) are uncorrelated over many seeds, across block edges too."""
    pairs = np.array([
        LineField(EnvironmentSpec(alpha1=1.5, seed=s), HORIZONTAL).window(k, k + 2) for s in range(1000)
    ])
    corr = np.corrcoef(np.log(pairs[:, 0]), np.log(pairs[:, 1]))[0, 1]
    assert abs(corr) < 0.12


def test_no_period_across_blocks(spec):
    """Values one block apart are uncorrelated on both sides of 0."""
    logs = np.log(LineField(spec, VERTICAL).window(-4096, 4096))
    corr = np.corrcoef(logs[:-1024], logs[1024:])[0, 1]
    assert abs(corr) < 0.05


def test_constant_mode():
    """Constant H uses h_floor and constant V uses v_mean."""
    env = build_environment(EnvironmentSpec(h_mode=CONSTANT, v_mode=CONSTANT, h_floor=2.0, v_mean=3.0))
    h, v = env.window(4)
    assert np.all(h == 2.0) and np.all(v == 3.0)


def test_resolved_v_floor():
    """The floor is chosen so that E[V] = v_mean when alpha2 > 1."""
    spec = EnvironmentSpec(alpha2=1.5, v_mean=1.0)
    assert spec.resolved_v_floor == pytest.approx(1.0 / 3.0)
    assert pareto_moment(1.5, spec.resolved_v_floor, 1.0) == pytest.approx(1.0)


def test_v_mean_below_floor_rejected():
    """An explicit floor above the mean is inconsistent."""
    with pytest.raises(LinewalkException):
        EnvironmentSpec(alpha2=1.5, v_floor=2.0, v_mean=1.0)


def test_stable_vertical_rejected():
    """Stable increments exist only for H."""
    with pytest.raises(LinewalkException) as exc:
        EnvironmentSpec(v_mode=STABLE_INCREMENTS)
    assert exc.value.code == "configuration_error"


def test_stable_needs_alpha_below_one():
    """A stable subordinator needs 0 < alpha1 < 1."""
    with pytest.raises(LinewalkException):
        EnvironmentSpec(alpha1=1.2, h_mode=STABLE_INCREMENTS)

# ==================================
# Stable mode
# ==================================

def test_cells_per_site():
    """1/sqrt(T) must be a whole number of mesh cells."""
    path = SubordinatorPath(0.5, 2.0 ** -8, 1)
    assert path.cells_per_site(2.0 ** 16) == 1
    assert path.cells_per_site(2.0 ** 8) == 16


def test_inadmissible_scale_lists_neighbours():
    """An off-mesh scale is refused with the nearest admissible ones."""
    path = SubordinatorPath(0.5, 2.0 ** -8, 1)
    with pytest.raises(LinewalkException) as exc:
        path.cells_per_site(1000.0)
    assert exc.value.code == "inadmissible_scale"
    assert "T in" in exc.value.remedy


def test_rescaled_window_matches_pointwise():
    """Vectorised and pointwise rescaled rates agree."""
    path = SubordinatorPath(0.5, 2.0 ** -8, 5)
    window = rescaled_window(path, 2.0 ** 10, -3, 3)
    assert window == pytest.approx([rescaled_H(path, 2.0 ** 10, k) for k in range(-3, 3)])
    assert np.all(window > 0)


def test_site_increments_sum_cells():
    """A site increment is the sum of the cells it covers."""
    path = SubordinatorPath(0.7, 2.0 ** -8, 9)
    cells = path.increments(0, 16)
    assert path.site_increments(2.0 ** 8, 0, 1)[0] == pytest.approx(cells.sum())


def test_quenched_path_shared_across_scales(stable_spec):
    """Every scale of a quenched environment uses one subordinator path."""
    small = build_environment(stable_spec, 2.0 ** 8)
    large = build_environment(stable_spec, 2.0 ** 10)
    assert small.horizontal.path is large.horizontal.path


def test_annealed_path_differs_by_scale(stable_spec):
    """Annealed coupling draws a new path per scale."""
    from dataclasses import replace
    spec = replace(stable_spec, h_coupling="annealed")
    small = build_environment(spec, 2.0 ** 8)
    large = build_environment(spec, 2.0 ** 10)
    assert small.horizontal.path.seed != large.horizontal.path.seed


def test_dump_window(spec):
    """Rows (k, H(k), V(k)) in order."""
    env = build_environment(spec)
    rows = dump_window(env, -2, 3)
    assert [r[0] for r in rows] == [-2, -1, 0, 1, 2]
    assert rows[2][1] == env.H(0) and rows[2][2] == env.V(0)
