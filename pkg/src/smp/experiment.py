from dataclasses import dataclass, field
from enum import Enum
import logging
import math
from typing import Optional, Sequence

from django.conf import settings
import numpy as np

from common.exceptions import DomainError, PreconditionError
from grid.domain import GridFunction
from grid.norms import lebesgue_norm
from operators.constants import RadiusModeEnum, compute_A, select_r0
from operators.forms import EllipticProblem
from solver.semilinear import solve_semilinear

from .constants import MIN_TOLERANCE
from .criteria import TrendEnum, classify_trend, m_delta, validate_deltas
from .nonlinearity import Nonlinearity


logger = logging.getLogger(__name__)


class RadiusPolicyEnum(Enum):
    FIXED = 'Fixed'
    # r₁ = min(r₀/2, 1/(kC̄)) with r₀ = 1/(3A)
    SCALED = 'Scaled'


class VanishingEnum(Enum):
    VANISHES = 'u vanishes near x0'
    NO_VANISHING_FORCED = 'No vanishing forced'
    INCONCLUSIVE = 'Inconclusive'


@dataclass(frozen=True)
class RadiusPolicy:
    mode: RadiusPolicyEnum = RadiusPolicyEnum.SCALED
    radius: Optional[float] = None
    k: float = 1.0
    c_bar: float = 1.0

    def radius_for(self, A: float) -> float:
        if self.mode == RadiusPolicyEnum.FIXED:
            if not (self.radius and self.radius > 0):
                raise DomainError('a fixed radius policy needs a positive radius')
            return self.radius
        return min(select_r0(A, RadiusModeEnum.WEAK_HARNACK) / 2, 1 / (self.k * self.c_bar))


@dataclass(frozen=True)
class VazquezReport:
    x0: list
    radius: float
    epsilon: float
    deltas: list
    m_deltas: list
    # (∫_{B_r(x₀)} (u + δ)^ε)^(1/ε)
    integrals: list
    # C̄δ·exp(C̄r√M_δ), kept as logarithms
    log_bounds: list
    verdict: VanishingEnum
    field_sup: float
    rows: list = field(default_factory=list)

    @property
    def bounded(self) -> bool:
        """Every integral stays below its bound."""
        tolerance = math.log1p(settings.LAB_VIOLATION_TOLERANCE)
        return all(
            integral == 0 or math.log(integral) <= bound + tolerance
            for integral, bound in zip(self.integrals, self.log_bounds)
        )


def _interior_minimum(u: GridFunction) -> int:
    domain = u.domain
    scale = max(1.0, float(np.max(np.abs(u.values))))
    if u.values.min() < -MIN_TOLERANCE * scale:
        raise PreconditionError('u must be nonnegative')

    interior = np.flatnonzero(domain.interior)
    x0 = interior[np.argmin(u.values[interior])]
    if u.values[x0] > MIN_TOLERANCE * float(np.max(u.values)):
        raise PreconditionError(
            f'minimum {u.values[x0]:.3e} of u is not attained at an interior node'
        )
    return int(x0)


def vazquez_experiment(
    problem: EllipticProblem,
    f: Nonlinearity,
    deltas: Optional[Sequence[float]] = None,
    policy: Optional[RadiusPolicy] = None,
    u: Optional[GridFunction] = None,
    epsilon: Optional[float] = None,
) -> VazquezReport:
    """
    Shifts u to u + δ around an interior zero x₀ and compares the weak
    Harnack integral over B_r(x₀) with C̄δ·exp(C̄r√M_δ). When the bound tends
    to 0 with δ the field is forced to vanish near x₀.
    """
    policy = policy or RadiusPolicy()
    epsilon = settings.LAB_EPSILON if epsilon is None else epsilon
    deltas = validate_deltas(deltas)
    domain = problem.domain

    if u is None:
        u = solve_semilinear(problem, f).field
    elif u.domain is not domain:
        raise DomainError('u lives on another domain')
    x0 = _interior_minimum(u)

    radius = policy.radius_for(compute_A(problem.coefficients, domain))
    ball = domain.ball_mask(domain.points[x0], radius)
    cap = float(np.max(u.values))
    L = cap if cap > 0 else 1.0

    m_values, integrals, log_bounds = [], [], []
    for delta in deltas:
        m = m_delta(f, float(delta), L)
        shifted = GridFunction(np.maximum(u.values, 0.0) + delta, domain)
        m_values.append(m)
        integrals.append(lebesgue_norm(shifted, epsilon, ball))
        log_bounds.append(
            math.log(policy.c_bar * delta) + policy.c_bar * radius * math.sqrt(m)
        )

    trend, _slope = classify_trend(-np.log(deltas), log_bounds)
    verdict = {
        TrendEnum.DECREASING: VanishingEnum.VANISHES,
        TrendEnum.INCREASING: VanishingEnum.NO_VANISHING_FORCED,
        TrendEnum.MIXED: VanishingEnum.INCONCLUSIVE,
    }[trend]

    report = VazquezReport(
        x0=domain.points[x0].tolist(),
        radius=radius,
        epsilon=epsilon,
        deltas=deltas.tolist(),
        m_deltas=m_values,
        integrals=integrals,
        log_bounds=log_bounds,
        verdict=verdict,
        field_sup=float(np.max(np.abs(u.values[ball]))),
        rows=[
            {'delta': d, 'm_delta': m, 'integral': i, 'log_bound': b}
            for d, m, i, b in zip(deltas.tolist(), m_values, integrals, log_bounds)
        ],
    )
    logger.info(f'Vázquez experiment at x0 = {report.x0}, r = {radius:.4g}: {verdict.value}')
    return report
