"""
Scaling-parameter arithmetic, two-sample tests and power-law fits.
"""
import logging
import math
from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy import stats as scipy_stats

from linewalk.core.errors import domain_exception, empty_sample_exception, supercritical_exception

logger = logging.getLogger(__name__)

# --- Configuration ---
KS_CRITICAL_1PCT = 1.628
MIN_FIT_SCALES = 4
MIN_FIT_DECADES = 2.0


def epsilon(alpha: float) -> float:
    """max((1/alpha - 1) / 2, 0)."""
    return max(0.5 * (1.0 / alpha - 1.0), 0.0)


@dataclass(frozen=True)
class ScalingParams:
    alpha1: float
    alpha2: float
    eps1: float
    eps2: float
    eps_product: float
    delta: float
    regime: str
    gamma1: Optional[float] = None
    gamma2: Optional[float] = None
    eps1_plus: Optional[float] = None
    eps2_plus: Optional[float] = None
    A1: Optional[float] = None
    A2: Optional[float] = None

    @property
    def supercritical(self) -> bool:
        return self.regime == "supercritical"

    def gammas(self):
        """(gamma1, gamma2); raises for eps1*eps2 >= 1."""
        if self.supercritical:
            raise supercritical_exception(self.eps_product)
        return self.gamma1, self.gamma2

    @property
    def csrw_gamma2(self) -> Optional[float]:
        """Conjectured exponent gamma2 / (2 gamma1) of the CSRW vertical coordinate."""
        if self.supercritical:
            return None
        return self.gamma2 / (2.0 * self.gamma1)

    @property
    def case(self) -> str:
        if self.supercritical:
            return "supercritical"
        if self.eps1 == 0 and self.eps2 == 0:
            return "diffusive"
        if self.eps1 > 0 and self.eps2 > 0:
            return "case1"
        return "case2"

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["case"] = self.case
        data["csrw_gamma2"] = self.csrw_gamma2
        return data


def scaling_params(alpha1: float, alpha2: float, alpha1_minus: Optional[float] = None,
                   alpha2_minus: Optional[float] = None) -> ScalingParams:
    """Exponents of the line model for tail exponents (alpha1, alpha2).

    The moment-growth exponents A_i use eps_i^+ computed from the minus
    exponents when given, otherwise from the alphas themselves.
    """
    for name, value in (("alpha1", alpha1), ("alpha2", alpha2)):
        if not value > 0:
            raise domain_exception(name, value, f"{name} > 0")
    for name, minus, alpha in (("alpha1_minus", alpha1_minus, alpha1), ("alpha2_minus", alpha2_minus, alpha2)):
        if minus is not None and not 0 < minus < alpha:
            raise domain_exception(name, minus, f"0 < {name} < {alpha}")

    eps1, eps2 = epsilon(alpha1), epsilon(alpha2)
    product = eps1 * eps2
    delta = 0.5 * (1.0 + 1.0 / alpha1)
    eps1_plus = epsilon(alpha1_minus) if alpha1_minus is not None else eps1
    eps2_plus = epsilon(alpha2_minus) if alpha2_minus is not None else eps2
    plus_product = eps1_plus * eps2_plus

    gamma1 = gamma2 = a1 = a2 = None
    regime = "supercritical" if product >= 1 else "subcritical"
    if product < 1:
        gamma1 = (1.0 + eps1) / (2.0 * (1.0 - product))
        gamma2 = (1.0 + eps2) / (2.0 * (1.0 - product))
    if plus_product < 1:
        a1 = (1.0 + eps1_plus) / (1.0 - plus_product)
        a2 = (1.0 + eps2_plus) / (1.0 - plus_product)
    return ScalingParams(
        alpha1=alpha1, alpha2=alpha2, eps1=eps1, eps2=eps2, eps_product=product,
        delta=delta, regime=regime, gamma1=gamma1, gamma2=gamma2,
        eps1_plus=eps1_plus, eps2_plus=eps2_plus, A1=a1, A2=a2,
    )


# --- Two-sample test ---

@dataclass(frozen=True)
class KSResult:
    statistic: float
    critical_value: float
    n: int
    m: int

    @property
    def rejects(self) -> bool:
        return self.statistic > self.critical_value


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> KSResult:
    """Two-sample Kolmogorov-Smirnov statistic and the 1% critical value."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0:
        raise empty_sample_exception("a")
    if b.size == 0:
        raise empty_sample_exception("b")
    statistic = float(scipy_stats.ks_2samp(a, b).statistic)
    n, m = a.size, b.size
    critical = KS_CRITICAL_1PCT * math.sqrt((n + m) / (n * m))
    return KSResult(statistic, critical, int(n), int(m))


# --- Power-law fits ---

@dataclass
class ExponentFit:
    scales: np.ndarray
    statistics: np.ndarray
    slope: float
    intercept: float
    stderr: float
    r_squared: float
    exclusion_rate: float = 0.0

    @property
    def reportable(self) -> bool:
        if self.scales.size < MIN_FIT_SCALES:
            return False
        return math.log10(self.scales.max() / self.scales.min()) >= MIN_FIT_DECADES

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scales": self.scales.tolist(),
            "statistics": self.statistics.tolist(),
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "r_squared": self.r_squared,
            "exclusion_rate": self.exclusion_rate,
            "reportable": self.reportable,
        }


def fit_power_law(scales: Sequence[float], statistics: Sequence[float],
                  exclusion_rate: float = 0.0) -> ExponentFit:
    """Least-squares slope of log(statistic) against log(scale)."""
    scales = np.asarray(scales, dtype=np.float64)
    statistics = np.asarray(statistics, dtype=np.float64)
    if scales.size < 2 or scales.size != statistics.size:
        raise domain_exception("scales", scales.tolist(), "at least two scales matching the statistics")
    if np.any(scales <= 0) or np.any(statistics <= 0):
        raise domain_exception("statistics", statistics.tolist(), "positive scales and statistics")
    result = scipy_stats.linregress(np.log(scales), np.log(statistics))
    return ExponentFit(
        scales=scales,
        statistics=statistics,
        slope=float(result.slope),
        intercept=float(result.intercept),
        stderr=float(result.stderr),
        r_squared=float(result.rvalue ** 2),
        exclusion_rate=exclusion_rate,
    )


# --- Order-independent reductions ---

def exact_mean(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise empty_sample_exception("values")
    return math.fsum(values.tolist()) / values.size


def standard_error(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return float("nan")
    mean = exact_mean(values)
    variance = math.fsum(((values - mean) ** 2).tolist()) / (values.size - 1)
    return math.sqrt(variance / values.size)


def interquartile_range(values: Sequence[float]) -> float:
    q1, q3 = np.percentile(np.asarray(values, dtype=np.float64), [25, 75])
    return float(q3 - q1)
