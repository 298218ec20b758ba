from dataclasses import dataclass
from enum import Enum
import logging
import math

import numpy as np

from common.exceptions import DomainError
from grid.domain import GridDomain, GridFunction, node_subset
from grid.norms import UlNormSpec, ul_norm

from .coefficients import CoefficientSet


logger = logging.getLogger(__name__)


class RadiusModeEnum(Enum):
    WEAK_HARNACK = 'Weak Harnack'
    LOCAL_MAX = 'Local maximum principle'


@dataclass(frozen=True)
class SharpnessConstants:
    beta_q: float
    gamma_p: float
    A_R: float
    R: float


def beta_exponent(q: float, n: int) -> float:
    if not q > n:
        raise DomainError(f'q = {q} must exceed n = {n}')
    return 1.0 if math.isinf(q) else q / (q - n)


def gamma_exponent(p: float, n: int) -> float:
    if not p > n / 2:
        raise DomainError(f'p = {p} must exceed n/2 = {n / 2}')
    return 0.5 if math.isinf(p) else p / (2 * p - n)


def exponents(q: float, p: float, n: int) -> tuple[float, float]:
    """(β_q, γ_p) = (q/(q−n), p/(2p−n)) with the limits (1, 1/2) at ∞."""
    return beta_exponent(q, n), gamma_exponent(p, n)


def compute_A(coeffs: CoefficientSet, region: GridDomain, sub=None) -> float:
    """
    A = 1 + ‖b‖^β_q_{L^q_ul} + ‖c‖^γ_p_{L^p_ul} over the region's nodes (or the
    given subset of them). With a split c = Σ c_i the zero-order term becomes
    1 + Σ‖c_i‖^γ_{p_i}, one more than for an unsplit c.
    """
    n = coeffs.dimension
    beta, gamma = exponents(coeffs.q, coeffs.p, n)
    mask = node_subset(region, sub)
    sampled = coeffs.sample(region, validate_ellipticity=False)

    drift = GridFunction(sampled.drift_magnitude, region)
    drift_norm = ul_norm(drift, UlNormSpec(coeffs.q), mask)
    value = 1.0 + drift_norm**beta

    if coeffs.c_components:
        value += 1.0
        pieces = [(sampled.c_base, coeffs.p)] + [
            (component, exponent)
            for component, (_spec, exponent) in zip(
                sampled.c_components, coeffs.c_components
            )
        ]
        for values, exponent in pieces:
            norm = ul_norm(GridFunction(values, region), UlNormSpec(exponent), mask)
            value += norm ** gamma_exponent(exponent, n)
    else:
        zero_order = GridFunction(sampled.c, region)
        value += ul_norm(zero_order, UlNormSpec(coeffs.p), mask) ** gamma

    logger.debug(f'A = {value} (β = {beta}, γ = {gamma})')
    return float(value)


def sharpness_constants(
    coeffs: CoefficientSet, region: GridDomain, R: float, sub=None
) -> SharpnessConstants:
    """The exponents (β_q, γ_p) and A_R over the region (or the given subset of it)."""
    beta, gamma = exponents(coeffs.q, coeffs.p, coeffs.dimension)
    return SharpnessConstants(
        beta_q=beta, gamma_p=gamma, A_R=compute_A(coeffs, region, sub), R=float(R)
    )


def select_r0(A: float, mode: RadiusModeEnum) -> float:
    if not A >= 1:
        raise DomainError(f'A = {A} must be at least 1')

    if mode == RadiusModeEnum.WEAK_HARNACK:
        return 1.0 / (3.0 * A)
    return 1.0 / (2.0 * A)


def landis_constant(coeffs: CoefficientSet, region: GridDomain, c0: float, sub=None) -> float:
    """
    C₁ = C₀·(1 + ‖b‖^(1/(1−n/q)) + ‖c‖^(1/(2−n/p))); the exponents coincide
    with β_q and γ_p, so C₁ = C₀·A over the whole domain.
    """
    return c0 * compute_A(coeffs, region, sub)


def is_bounded_by(measured: float, predicted: float, tolerance: float) -> bool:
    return bool(np.isfinite(measured) and measured <= predicted * (1 + tolerance))
