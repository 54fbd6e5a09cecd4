from fractions import Fraction

import numpy as np
import pytest
from scipy import special

from linewalk.core.errors import LinewalkException
from linewalk.envgen import CONSTANT
from linewalk.oracles import (
    FIRST,
    SECOND,
    DiffIneqCase,
    algebraic_identities,
    closed_form_match,
    dclock_second_moment,
    diffineq_closed_form,
    diffineq_integrate,
    domination_check,
    levy_cdf,
    lt_moment_check,
    max_bound_check,
    richardson_check,
    stable_law_check,
)

# ==================================
# Differential inequalities
# ==================================

@pytest.mark.parametrize("eps", [(Fraction(3, 10), Fraction(2, 5)), (Fraction(1, 2), Fraction(1, 2)),
                                 (Fraction(0), Fraction(9, 10))])
def test_identities_are_exact(eps):
    """A1 - 1 = eps1+ A2 and A2 - 1 = eps2+ A1 hold exactly in rationals."""
    assert algebraic_identities(*eps) == (0, 0)


@pytest.mark.parametrize("system", [FIRST, SECOND])
def test_closed_form_solves_unit_case(system):
    """With C * kappa = 1 the closed form is the exact solution."""
    case = DiffIneqCase(1.0, 1.0, 0.3, 0.4)
    result = closed_form_match(case, system)
    assert case.exact_solution_expected
    assert result["passed"], result


def test_closed_form_starts_at_c_kappa():
    """Both components start at C * kappa."""
    case = DiffIneqCase(2.0, 1.5, 0.3, 0.4)
    x, y = diffineq_closed_form(case, 0.0)
    assert x == pytest.approx(3.0) and y == pytest.approx(3.0)


def test_richardson_is_small():
    """Halving the step barely moves the RK4 solution."""
    assert richardson_check(DiffIneqCase(1.0, 2.0, 0.3, 0.4), step=1e-3) < 1e-8


def test_symmetric_case_is_dominated():
    """Equal exponents keep the closed form above the solution for C+ > C."""
    result = domination_check(DiffIneqCase(1.0, 4.0, 0.5, 0.5), FIRST, c_plus=1.001)
    assert result["passed"]
    assert result["violations"] == []


def test_gap_case_is_not_dominated():
    """Unequal exponents with C * kappa != 1 break the bound near t = 0."""
    result = domination_check(DiffIneqCase(1.0, 4.0, 0.3, 0.4), FIRST, c_plus=1.001)
    assert not result["passed"]
    assert result["violations"][0] <= 0.5


def test_zero_constant_gives_zero_solution():
    """C = 0 freezes the system at 0."""
    case = DiffIneqCase(0.0, 1.0, 0.3, 0.4)
    x, y = diffineq_integrate(case)
    assert np.all(x == 0) and np.all(y == 0)
    assert closed_form_match(case)["passed"]


def test_second_system_needs_eps2():
    """B2 = A2 / eps2+ is undefined for eps2+ = 0."""
    with pytest.raises(LinewalkException) as exc:
        closed_form_match(DiffIneqCase(1.0, 1.0, 0.2, 0.0), SECOND)
    assert exc.value.code == "domain_error"


def test_c_plus_below_c_rejected():
    with pytest.raises(LinewalkException):
        domination_check(DiffIneqCase(2.0, 1.0, 0.3, 0.4), c_plus=1.0)


@pytest.mark.parametrize("kwargs", [{"C": -1.0}, {"eps1_plus": 2.0, "eps2_plus": 0.5},
                                    {"t_grid": (0.5, 1.0)}])
def test_case_validation(kwargs):
    """Negative constants, eps1+ eps2+ >= 1 and grids off 0 are refused."""
    args = {"C": 1.0, "kappa": 1.0, "eps1_plus": 0.3, "eps2_plus": 0.4, **kwargs}
    with pytest.raises(LinewalkException):
        DiffIneqCase(**args)

# ==================================
# Maxima and moments
# ==================================

def test_max_growth_slope():
    """Running maxima of Pareto lines grow like k**(1/alpha)."""
    result = max_bound_check(0.6, 0.3, [2 ** p for p in range(4, 15)], seeds=25)
    assert result["slope"] == pytest.approx(1.0 / 0.6, abs=0.3)
    assert result["total_violations"] == 0


def test_max_bound_constant_lines():
    """Constant lines have flat maxima."""
    result = max_bound_check(0.6, 0.3, [2 ** p for p in range(4, 12)], seeds=3, mode=CONSTANT)
    assert result["slope"] == pytest.approx(0.0, abs=1e-12)
    assert result["target_slope"] == 0.0
    assert result["total_violations"] == 0


def test_max_bound_needs_alpha_minus_below_alpha():
    with pytest.raises(LinewalkException):
        max_bound_check(0.6, 0.6, [16, 32], seeds=1)


def test_local_time_moments():
    """E[l_t(0)**2] grows linearly in t and both moments are monotone."""
    result = lt_moment_check(256.0, [0.25, 0.5, 1.0, 2.0], runs=200)
    assert result["monotone_p2"] and result["monotone_p4"]
    assert result["slope_p2"] == pytest.approx(1.0, abs=0.25)
    assert result["slope_p4"] <= 2.2


def test_dclock_second_moment_structure():
    """One row per T, growth in t and a finite max/min ratio."""
    result = dclock_second_moment(0.5, [2.0 ** 10, 2.0 ** 12], runs=20)
    assert [row["T"] for row in result["table"]] == [2.0 ** 10, 2.0 ** 12]
    assert result["t_slope"] > 0
    assert result["max_min_ratio"] >= 1.0
    assert result["target_t_slope"] == pytest.approx(3.0)

# ==================================
# Stable sampler
# ==================================

def test_levy_cdf():
    """P(S <= x) = erfc(1 / (2 sqrt x))."""
    assert levy_cdf(1.0) == pytest.approx(special.erfc(0.5))


def test_stable_law_check():
    """Laplace transforms and the alpha = 1/2 CDF agree with the sampler."""
    result = stable_law_check(alphas=(0.5,), lambdas=(1.0,), draws=20_000)
    assert result["laplace"][0]["target"] == pytest.approx(np.exp(-1.0))
    assert result["levy_passed"]
