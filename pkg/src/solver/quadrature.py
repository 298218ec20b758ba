"""
Quadrature of ∫₀^a φ(s) ds for integrands singular at 0.

The integral is split at the cutoffs c_k = a·10⁻ᵏ, k = 1..16; each decade is
integrated adaptively in the variable t = ln s. The partial sums S_k over
[c_k, a] are then compared with the tail model S_∞ − S_k = C·x_k^(−α),
x_k = ln(max(a, 1)/c_k): a positive decay exponent α on every consecutive triple
means convergence, no decay means divergence, and a mix is inconclusive.
Power-law singularities (tail ~ e^(−κx)) and logarithmic ones (tail ~ x^(−α))
are both captured since an exponential tail gives a growing fitted α.
"""

from dataclasses import dataclass, field
from enum import Enum
import logging
import math
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from common.exceptions import DomainError


logger = logging.getLogger(__name__)

DECADES = 16
# fitted tail exponents at or below this count as no decay
DECAY_THRESHOLD = 0.1


class QuadratureModeEnum(Enum):
    VALUE = 'Value'
    DIVERGENCE_CLASS = 'Divergence class'


class ConvergenceEnum(Enum):
    CONVERGES = 'Converges'
    DIVERGES = 'Diverges'
    INCONCLUSIVE = 'Inconclusive'


@dataclass(frozen=True)
class QuadratureResult:
    status: ConvergenceEnum
    value: float
    partial_sums: list = field(default_factory=list)
    exponent: float = math.nan

    @property
    def converges(self) -> bool:
        return self.status == ConvergenceEnum.CONVERGES


def _decade_integral(phi: Callable[[float], float], low: float, high: float) -> float:
    value, _error = integrate.quad(
        lambda t: phi(math.exp(t)) * math.exp(t),
        math.log(low),
        math.log(high),
        epsabs=0.0,
        epsrel=1e-11,
        limit=200,
    )
    return value


def partial_sums(phi: Callable[[float], float], a: float) -> tuple[np.ndarray, np.ndarray]:
    """(x_k, S_k) for k = 1..16 with x_k = ln(max(a, 1)/c_k)."""
    if not a > 0:
        raise DomainError('upper limit must be positive')

    cutoffs = a * 10.0 ** -np.arange(0, DECADES + 1)
    increments = [
        _decade_integral(phi, cutoffs[k + 1], cutoffs[k]) for k in range(DECADES)
    ]
    if not np.all(np.isfinite(increments)):
        raise DomainError('integrand is not finite on (0, a]')
    if np.min(increments) < 0:
        raise DomainError('integrand must be nonnegative')

    return np.log(max(a, 1.0) / cutoffs[1:]), np.cumsum(increments)


def _tail_exponent(x: np.ndarray, sums: np.ndarray) -> float:
    """
    α with (S₂ − S₁)/(S₃ − S₂) = (x₁^−α − x₂^−α)/(x₂^−α − x₃^−α) for three
    consecutive cutoffs; nan when the differences give no root in (0, 50].
    """
    d1, d2 = sums[1] - sums[0], sums[2] - sums[1]
    if d2 <= 0:
        return math.inf if d1 >= 0 else math.nan
    target = d1 / d2

    def mismatch(alpha):
        p = x ** -alpha
        return (p[0] - p[1]) / (p[1] - p[2]) - target

    # α → 0 gives the logarithmic ratio, larger α increases the ratio
    low, high = 1e-8, 50.0
    if mismatch(low) >= 0:
        return 0.0
    if mismatch(high) <= 0:
        return high
    return optimize.brentq(mismatch, low, high, xtol=1e-12)


def quad_singular(
    phi: Callable[[float], float],
    a: float,
    mode: QuadratureModeEnum = QuadratureModeEnum.VALUE,
) -> QuadratureResult:
    """
    Integrates φ ≥ 0 over (0, a]. In value mode a converging integral carries
    S_K + C·x_K^(−α), the extrapolated tail added to the last partial sum; in
    divergence-class mode the value stays nan.
    """
    x, sums = partial_sums(phi, a)
    exponents = []
    for k in range(len(x) - 2):
        exponents.append(_tail_exponent(x[k : k + 3], sums[k : k + 3]))

    # the last three decades decide the class
    tail = np.asarray(exponents[-3:])
    if np.any(np.isnan(tail)):
        status = ConvergenceEnum.INCONCLUSIVE
    elif np.all(tail > DECAY_THRESHOLD):
        status = ConvergenceEnum.CONVERGES
    elif np.all(tail <= DECAY_THRESHOLD):
        status = ConvergenceEnum.DIVERGES
    else:
        status = ConvergenceEnum.INCONCLUSIVE

    alpha = float(tail[-1])
    value = math.nan
    if status == ConvergenceEnum.CONVERGES and mode == QuadratureModeEnum.VALUE:
        value = float(sums[-1])
        if math.isfinite(alpha) and alpha < 50.0:
            p = x[-2:] ** -alpha
            coefficient = (sums[-1] - sums[-2]) / (p[0] - p[1])
            value += coefficient * x[-1] ** -alpha
    elif status == ConvergenceEnum.INCONCLUSIVE:
        logger.warning(f'singular quadrature inconclusive, tail exponents {tail.tolist()}')

    logger.debug(f'singular quadrature: {status.value}, α = {alpha}, value = {value}')
    return QuadratureResult(status, value, sums.tolist(), alpha)
