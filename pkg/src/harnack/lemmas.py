"""
Numerical verifiers for the auxiliary statements behind the weak Harnack
inequality: the ABP estimate, the growth lemma, the ink-spots lemma and the
geometric decay of level sets. Each takes solved fields and reports whether
the statement holds on the grid.
"""

from dataclasses import dataclass
from enum import Enum
import logging
import math
from typing import Optional

from django.conf import settings
import numpy as np

from common.exceptions import DomainError, PreconditionError
from grid.domain import GEOMETRY_TOLERANCE, GridDomain, GridFunction
from grid.norms import lebesgue_norm, level_set_measure, subset_measure
from operators.assembly import assemble
from operators.forms import EllipticProblem


logger = logging.getLogger(__name__)

# round-off allowed when comparing measures and residuals
MEASURE_TOLERANCE = 1e-12
RESIDUAL_TOLERANCE = 1e-8


@dataclass(frozen=True)
class AbpReport:
    sup: float
    forcing: float
    # w satisfies L_h w ≥ g on the interior nodes
    subsolution: bool

    @property
    def ratio(self) -> float:
        if self.forcing > 0:
            return self.sup / self.forcing
        return 0.0 if self.sup <= 0 else math.inf


def abp_check(problem: EllipticProblem, w: GridFunction) -> AbpReport:
    """
    sup w against ‖g‖_{L^p(Ω⁺)} with Ω⁺ = {w > 0}, for w ≤ 0 on the boundary
    of a domain of diameter at most 1.
    """
    domain = problem.domain
    if w.domain is not domain:
        raise DomainError('w lives on another domain')
    if domain.diameter > 1 + GEOMETRY_TOLERANCE:
        raise PreconditionError(f'domain diameter {domain.diameter:.6g} exceeds 1')

    scale = max(1.0, float(np.max(np.abs(w.values))))
    if np.any(w.values[domain.boundary] > RESIDUAL_TOLERANCE * scale):
        raise PreconditionError('w must be nonpositive on the boundary')

    system = assemble(problem)
    diagonal = np.abs(system.matrix.diagonal())
    residual = (system.matrix @ w.values - system.rhs)[domain.interior]
    # rows are scaled by their diagonal so the check does not depend on h
    subsolution = bool(
        np.all(residual / diagonal[domain.interior] >= -RESIDUAL_TOLERANCE * scale)
    )

    positive = domain.interior & (w.values > 0)
    forcing = 0.0
    if positive.any():
        g = GridFunction(problem.sampled_g(), domain)
        forcing = lebesgue_norm(g, problem.coefficients.p, positive)

    report = AbpReport(sup=float(w.values.max()), forcing=forcing, subsolution=subsolution)
    logger.debug(f'ABP: sup {report.sup:.6g}, forcing {forcing:.6g}, ratio {report.ratio:.6g}')
    return report


def _ball_inside(domain: GridDomain, center, radius: float):
    if not domain.contains_ball(center, radius):
        raise DomainError(f'B_{radius}({center}) leaves the domain')
    mask = domain.ball_mask(center, radius)
    if not mask.any():
        raise DomainError(f'B_{radius}({center}) contains no nodes')
    return mask


def verify_growth_lemma(
    u: GridFunction,
    x1,
    rho: float,
    a: float,
    delta: float,
    kappa: float,
    c_bar: float,
    g: Optional[GridFunction] = None,
    p: float = math.inf,
) -> bool:
    """
    |{u > a} ∩ B_ρ(x₁)| ≥ (1 − δ)|B_ρ(x₁)| implies
    inf_{B_ρ(x₁)} u > κa − C̄ρ^(2−n/p)‖g‖_{L^p(B_2ρ(x₁))}.
    """
    domain = u.domain
    if not rho > 0:
        raise DomainError('ρ must be positive')
    double = _ball_inside(domain, x1, 2 * rho)
    ball = domain.ball_mask(x1, rho)

    if level_set_measure(u, a, ball) < (1 - delta) * subset_measure(domain, ball) * (
        1 - MEASURE_TOLERANCE
    ):
        return True

    forcing = 0.0
    if g is not None:
        if g.domain is not domain:
            raise DomainError('g lives on another domain')
        exponent = 2 - domain.dimension / p if math.isfinite(p) else 2.0
        forcing = c_bar * rho**exponent * lebesgue_norm(g, p, double)

    holds = u.min(ball) > kappa * a - forcing
    if not holds:
        logger.info(f'growth lemma fails at x₁ = {x1}, ρ = {rho}, a = {a}')
    return holds


def _check_node_sets(domain: GridDomain, E, F, ball: np.ndarray):
    E = np.asarray(E, dtype=bool)
    F = np.asarray(F, dtype=bool)
    if E.shape != (domain.size,) or F.shape != (domain.size,):
        raise DomainError('node sets do not match the domain')
    if np.any(E & ~F):
        raise DomainError('E must be contained in F')
    if np.any(F & ~ball):
        raise DomainError('F must be contained in the ball')
    return E, F


def _measure(domain: GridDomain, mask: np.ndarray) -> float:
    return float(domain.cell_volumes[mask].sum())


def inkspots_hypotheses(
    domain: GridDomain, E, F, center, radius: float, delta: float, radii=None
) -> bool:
    """
    |E| ≤ (1 − δ)|B|, and every grid-centered ball B′ ⊂ B with
    |B′ ∩ E| > (1 − δ)|B′| lies in F. Radii default to multiples of the spacing.
    """
    ball = _ball_inside(domain, center, radius)
    E, F = _check_node_sets(domain, E, F, ball)
    if _measure(domain, E) > (1 - delta) * _measure(domain, ball) * (1 + MEASURE_TOLERANCE):
        return False

    if radii is None:
        radii = domain.spacing * np.arange(1, int(radius / domain.spacing) + 1)
    center = np.atleast_1d(np.asarray(center, dtype=float))
    for y in domain.points[ball]:
        for r in radii:
            if np.linalg.norm(y - center) + r > radius * (1 + GEOMETRY_TOLERANCE):
                break
            small = domain.ball_mask(y, r)
            dense = _measure(domain, small & E) > (1 - delta) * _measure(domain, small)
            if dense and np.any(small & ~F):
                return False
    return True


class InkspotsEnum(Enum):
    HOLDS = 'Holds'
    FAILS = 'Fails'
    INAPPLICABLE = 'Hypotheses fail'


def verify_inkspots(
    domain: GridDomain, E, F, center, radius: float, delta: float, c: float, radii=None
) -> InkspotsEnum:
    """
    |E| ≤ (1 − cδ)|F| for node sets E ⊆ F ⊆ B_radius(center), checked only
    when `inkspots_hypotheses` holds for the same sets.
    """
    if not inkspots_hypotheses(domain, E, F, center, radius, delta, radii):
        logger.info(f'ink-spots hypotheses fail for the ball of radius {radius} at {center}')
        return InkspotsEnum.INAPPLICABLE

    ball = domain.ball_mask(center, radius)
    E, F = _check_node_sets(domain, E, F, ball)
    holds = _measure(domain, E) <= (1 - c * delta) * _measure(domain, F) * (
        1 + MEASURE_TOLERANCE
    ) + MEASURE_TOLERANCE
    return InkspotsEnum.HOLDS if holds else InkspotsEnum.FAILS


@dataclass(frozen=True)
class LevelSetDecayReport:
    levels: list[float]
    # |{u > M^k} ∩ B| / |B| for k = 1..kmax
    ratios: list[float]
    bounds: list[float]
    first_violation: Optional[int]

    @property
    def holds(self) -> bool:
        return self.first_violation is None


def verify_levelset_decay(
    u: GridFunction, center, rho0: float, M: float, c: float, delta: float, kmax: int
) -> LevelSetDecayReport:
    """|{u > M^k} ∩ B_ρ₀| / |B_ρ₀| against (1 − cδ)^k, k = 1..kmax."""
    ball = u.domain.ball_mask(center, rho0)
    if not ball.any():
        raise DomainError('the ball contains no nodes')
    volume = subset_measure(u.domain, ball)
    if u.min(ball) > 1:
        logger.warning(f'inf over B_ρ₀ is {u.min(ball):.6g} > 1')

    levels, ratios, bounds = [], [], []
    first_violation = None
    for k in range(1, kmax + 1):
        level = M**k
        ratio = level_set_measure(u, level, ball) / volume
        bound = (1 - c * delta) ** k
        if first_violation is None and ratio > bound * (1 + settings.LAB_VIOLATION_TOLERANCE):
            first_violation = k
        levels.append(level)
        ratios.append(ratio)
        bounds.append(bound)

    return LevelSetDecayReport(levels, ratios, bounds, first_violation)


def weak_harnack_exponent(M: float, c: float, delta: float) -> float:
    """ε = ε′/2 where M^(−ε′) = 1 − cδ."""
    if not M > 1:
        raise DomainError('M must exceed 1')
    if not 0 < c * delta < 1:
        raise DomainError('cδ must lie in (0, 1)')
    return -math.log(1 - c * delta) / math.log(M) / 2
