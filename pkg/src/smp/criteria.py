from dataclasses import dataclass
from enum import Enum
import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from common.exceptions import DomainError
from common.fitting import fit_linear
from solver.quadrature import ConvergenceEnum, QuadratureModeEnum, quad_singular

from .constants import (
    ASYMPTOTIC_DELTAS,
    DEFAULT_DELTAS,
    EXPONENT_MARGIN,
    RATE_MARGIN,
    SCAN_POINTS,
    VAZQUEZ_LIMIT,
)
from .nonlinearity import Nonlinearity


logger = logging.getLogger(__name__)


class TrendEnum(Enum):
    DECREASING = 'Decreasing'
    INCREASING = 'Increasing'
    MIXED = 'Mixed'


class CriterionEnum(Enum):
    HOLDS = 'Holds'
    FAILS = 'Fails'
    INCONCLUSIVE = 'Inconclusive'


class VazquezEnum(Enum):
    SMP_HOLDS = 'SMP holds'
    SMP_MAY_FAIL = 'SMP may fail'
    INCONCLUSIVE = 'Inconclusive'


def m_delta(f: Nonlinearity, delta: float, L: float) -> float:
    """
    M_δ = max over s ∈ [0, L] of f(s)/(s + δ): a uniform and a geometric scan,
    then golden-section refinement around the best scanned point.
    """
    if not delta > 0:
        raise DomainError('δ must be positive')
    if not L > 0:
        raise DomainError('L must be positive')

    s = np.union1d(
        np.linspace(0.0, L, SCAN_POINTS),
        np.geomspace(min(delta, L) * 1e-6, L, SCAN_POINTS),
    )

    def quotient(t):
        t = min(max(t, 0.0), L)
        return float(f(t)) / (t + delta)

    values = np.asarray(f(s)) / (s + delta)
    best = int(np.argmax(values))
    value = float(values[best])
    if 0 < best < len(s) - 1:
        try:
            result = optimize.minimize_scalar(
                lambda t: -quotient(t),
                bracket=(s[best - 1], s[best], s[best + 1]),
                method='golden',
            )
            value = max(value, quotient(result.x))
        except ValueError:
            # flat neighbourhoods are not strict brackets
            pass
    return value


def classify_trend(x: Sequence[float], y: Sequence[float]) -> tuple[TrendEnum, float]:
    """
    Trend of y along increasing x judged on the last third of the points
    (at least three): monotone steps agreeing with the fitted slope.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    tail = max(3, len(x) // 3)
    x, y = x[-tail:], y[-tail:]

    slope = fit_linear(x, y).slope
    steps = np.diff(y)
    if np.all(steps < 0) and slope < 0:
        return TrendEnum.DECREASING, slope
    if np.all(steps > 0) and slope > 0:
        return TrendEnum.INCREASING, slope
    return TrendEnum.MIXED, slope


def validate_deltas(deltas: Optional[Sequence[float]]) -> np.ndarray:
    deltas = np.asarray(DEFAULT_DELTAS if deltas is None else deltas, dtype=float)
    if deltas.size < 3:
        raise DomainError('at least three δ values are needed')
    if np.any(deltas <= 0) or np.any(np.diff(deltas) >= 0):
        raise DomainError('δ values must be positive and strictly decreasing')
    return deltas


@dataclass(frozen=True)
class DecayCriterionResult:
    status: CriterionEnum
    k: float
    deltas: list
    m_deltas: list
    # ln(δ^k·e^√M_δ)
    log_trace: list
    # d ln(δ^k·e^√M_δ)/d|ln δ| on the asymptotic tail
    slope: float
    # √M_δ ~ |ln δ|^exponent on the asymptotic tail
    exponent: float

    def rows(self) -> list[dict]:
        return [
            {'delta': d, 'm_delta': m, 'log_trace': t}
            for d, m, t in zip(self.deltas, self.m_deltas, self.log_trace)
        ]


def asymptotic_deltas(deltas: np.ndarray) -> np.ndarray:
    """The δ-grid extended by the decades of ASYMPTOTIC_DELTAS below its last value."""
    extension = np.asarray(ASYMPTOTIC_DELTAS)
    return np.concatenate([deltas, extension[extension < deltas[-1] * (1 - 1e-9)]])


def fit_growth(deltas: Sequence[float], m_values: Sequence[float]) -> tuple[float, float]:
    """
    Exponent and linear rate of √M_δ against |ln δ|, both fitted on the last
    third of the grid (at least three points). Vanishing M_δ has exponent 0.
    """
    ell = -np.log(np.asarray(deltas, dtype=float))
    root = np.sqrt(np.asarray(m_values, dtype=float))
    tail = max(3, len(ell) // 3)
    ell, root = ell[-tail:], root[-tail:]

    rate = fit_linear(ell, root).slope
    if np.any(root <= 0) or np.any(ell <= 0):
        return 0.0, rate
    return fit_linear(np.log(ell), np.log(root)).slope, rate


def check_decay_criterion(
    f: Nonlinearity, k: float, deltas: Optional[Sequence[float]] = None, L: float = 1.0
) -> DecayCriterionResult:
    """
    Whether e^√M_δ = o(δ^−k), i.e. whether k·|ln δ| eventually outgrows √M_δ.
    The trace k·ln δ + √M_δ is reported on the given δ-grid; the verdict comes
    from the growth of √M_δ fitted on the grid extended to δ = 10⁻⁸⁰:
    sublinear growth holds for every k, superlinear growth fails for every k,
    and linear growth is decided by its rate against k.
    """
    if not k > 0:
        raise DomainError('k must be positive')
    deltas = validate_deltas(deltas)

    m_values = [m_delta(f, float(d), L) for d in deltas]
    log_trace = [k * math.log(d) + math.sqrt(m) for d, m in zip(deltas, m_values)]

    extended = asymptotic_deltas(deltas)
    extended_m = m_values + [m_delta(f, float(d), L) for d in extended[len(deltas) :]]
    exponent, rate = fit_growth(extended, extended_m)

    if exponent < 1 - EXPONENT_MARGIN:
        status = CriterionEnum.HOLDS
    elif exponent > 1 + EXPONENT_MARGIN:
        status = CriterionEnum.FAILS
    elif rate < k * (1 - RATE_MARGIN):
        status = CriterionEnum.HOLDS
    elif rate > k * (1 + RATE_MARGIN):
        status = CriterionEnum.FAILS
    else:
        status = CriterionEnum.INCONCLUSIVE

    slope = rate - k
    logger.info(
        f'decay criterion for f = {f}, k = {k}: {status.value} '
        f'(growth exponent {exponent:.4g}, slope {slope:.4g})'
    )
    return DecayCriterionResult(status, k, deltas.tolist(), m_values, log_trace, slope, exponent)


def _check_sign(f: Nonlinearity, limit: float):
    samples = np.geomspace(limit * 1e-16, limit, 65)
    if np.any(np.asarray(f(samples)) < 0):
        raise DomainError(f'f must be nonnegative near 0, got negative values for {f}')


def classify_vazquez_integral(f: Nonlinearity, limit: float = VAZQUEZ_LIMIT) -> VazquezEnum:
    """
    ∫₀ F(s)^(−1/2) ds = ∞ gives the strong maximum principle; a finite
    integral leaves room for dead cores. F vanishing near 0 counts as divergent.
    """
    _check_sign(f, limit)
    if f.primitive(limit * 10.0**-16) <= 0:
        logger.info(f'F vanishes near 0 for f = {f}')
        return VazquezEnum.SMP_HOLDS

    result = quad_singular(
        lambda s: f.primitive(s) ** -0.5, limit, QuadratureModeEnum.DIVERGENCE_CLASS
    )
    verdict = {
        ConvergenceEnum.DIVERGES: VazquezEnum.SMP_HOLDS,
        ConvergenceEnum.CONVERGES: VazquezEnum.SMP_MAY_FAIL,
        ConvergenceEnum.INCONCLUSIVE: VazquezEnum.INCONCLUSIVE,
    }[result.status]
    logger.info(f'Vázquez integral for f = {f}: {verdict.value} (α = {result.exponent:.4g})')
    return verdict
