from dataclasses import dataclass, replace
import logging
import math
from typing import Iterable

from django.conf import settings
import numpy as np

from common.exceptions import DomainError
from operators.coefficients import CoefficientSet

from .measurement import HarnackMeasurement


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HarnackConstants:
    c0: float
    local_max_c: float
    training_size: int


def _harnack_exponent(m: HarnackMeasurement) -> float:
    """Smallest C₀ with sup ≤ e^(C₀AR)·(inf + ‖g‖)."""
    base = m.inf + m.forcing
    if base <= 0:
        return math.inf
    top = max(m.sup, m.epsilon_integral)
    return max(math.log(top / base), 0.0) / (m.A * m.R) if top > 0 else 0.0


def _local_max_constant(m: HarnackMeasurement) -> float:
    unit = replace(m, local_max_c=1.0).local_max_bound
    if unit <= 0:
        return 0.0 if m.sup <= 0 else math.inf
    return m.sup / unit


def calibrate_harnack(training: Iterable[HarnackMeasurement]) -> HarnackConstants:
    """
    C₀ and C_ε as the largest ratios measured over the training suite, padded
    by the violation tolerance.
    """
    training = list(training)
    if not training:
        raise DomainError('calibration needs at least one measurement')

    padding = 1 + settings.LAB_VIOLATION_TOLERANCE
    constants = HarnackConstants(
        c0=max(_harnack_exponent(m) for m in training) * padding,
        local_max_c=max(_local_max_constant(m) for m in training) * padding,
        training_size=len(training),
    )
    logger.info(
        f'calibrated C₀ = {constants.c0:.6g}, C_ε = {constants.local_max_c:.6g} '
        f'on {constants.training_size} measurements'
    )
    return constants


def with_constants(m: HarnackMeasurement, constants: HarnackConstants) -> HarnackMeasurement:
    return replace(m, c0=constants.c0, local_max_c=constants.local_max_c)


def held_out_violations(
    measurements: Iterable[HarnackMeasurement], constants: HarnackConstants
) -> list[HarnackMeasurement]:
    """Held-out measurements that violate an inequality under the calibrated constants."""
    violations = [
        m for m in (with_constants(m, constants) for m in measurements) if m.violated
    ]
    if violations:
        logger.warning(
            f'{len(violations)} held-out measurements violate the calibrated constants'
        )
    return violations


# constant drifts and absorptions of the training suite
TRAINING_DRIFTS = (0.0, 0.5, 1.0)
TRAINING_ABSORPTIONS = (0.0, -0.25, -1.0)

# scales of the unbounded drifts and absorptions in the held-out suite
HELD_OUT_SCALES = tuple(np.linspace(0.1, 1.0, 10))

# L^p exponents of the held-out absorptions, above p_E and below 2
HELD_OUT_ABSORPTION_P = {1: 1.5, 2: 1.8}


def _norm(x: np.ndarray) -> np.ndarray:
    return np.linalg.norm(x, axis=1)


def _first_axis(values: np.ndarray, dimension: int) -> np.ndarray:
    if dimension == 1:
        return values
    return np.stack([values] + [np.zeros_like(values)] * (dimension - 1), axis=1)


def training_suite(dimension: int) -> list[CoefficientSet]:
    """Bounded coefficients: every pairing of a constant drift and absorption."""
    suite = []
    for b in TRAINING_DRIFTS:
        drift = b if dimension == 1 else (b,) + (0.0,) * (dimension - 1)
        for c in TRAINING_ABSORPTIONS:
            suite.append(CoefficientSet(dimension=dimension, b=drift, c=c))
    return suite


def held_out_suite(dimension: int) -> list[CoefficientSet]:
    """
    Coefficients unbounded at the origin: drifts of size s|x|^(−1/2) in L^q
    with q = 3n/2 and absorptions −s|x|^(−n/2) in L^p with p < 2 from
    HELD_OUT_ABSORPTION_P. The origin is declared singular, so nodes next
    to it are sampled half a spacing away.
    """
    origin = ((0.0,) * dimension,)
    suite = []
    for scale in HELD_OUT_SCALES:
        suite.append(
            CoefficientSet(
                dimension=dimension,
                b=lambda x, s=scale: _first_axis(s * _norm(x) ** -0.5, dimension),
                q=1.5 * dimension,
                singularities=origin,
            )
        )
        suite.append(
            CoefficientSet(
                dimension=dimension,
                c=lambda x, s=scale: -s * _norm(x) ** (-dimension / 2),
                p=HELD_OUT_ABSORPTION_P[dimension],
                singularities=origin,
            )
        )
    return suite
