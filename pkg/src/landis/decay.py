from dataclasses import dataclass, field
from enum import Enum
import logging
import math
from typing import Optional, Sequence

from django.conf import settings
import numpy as np

from common.exceptions import DomainError, PreconditionError
from common.fitting import fit_linear
from grid.domain import GEOMETRY_TOLERANCE, GridDomain, GridFunction
from grid.stencils import region_boundary
from operators.assembly import assemble
from operators.coefficients import CoefficientSet
from operators.constants import is_bounded_by, landis_constant
from operators.forms import EllipticProblem
from smp.criteria import validate_deltas

from .constants import (
    COMPARISON_TOLERANCE,
    LIMINF_TOLERANCE,
    RESIDUAL_TOLERANCE,
    ZERO_TOLERANCE,
)
from .positive_solution import omega_boundary


logger = logging.getLogger(__name__)


def _validate_radii(radii: Sequence[float]) -> np.ndarray:
    radii = np.asarray(list(radii), dtype=float)
    if radii.size < 2:
        raise DomainError('at least two radii are needed to fit a rate')
    if np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise DomainError('radii must be positive and increasing')
    return radii


def _same_nodes(first: GridDomain, second: GridDomain) -> bool:
    if first is second:
        return True
    return first.points.shape == second.points.shape and bool(
        np.allclose(first.points, second.points, rtol=0.0, atol=GEOMETRY_TOLERANCE)
    )


@dataclass(frozen=True)
class DecayReport:
    radii: list
    # inf over G_R = interior nodes with inner ≤ |x| ≤ R
    infs: list
    # sup of |ψ| over the sphere shell |x| ≈ R
    shell_sups: list
    rate: float
    # C₁ = C₀·A, when the coefficients are known
    predicted: Optional[float] = None

    @property
    def within_bound(self) -> bool:
        if self.predicted is None:
            return True
        return is_bounded_by(self.rate, self.predicted, settings.LAB_VIOLATION_TOLERANCE)

    @property
    def inf_bounded(self) -> bool:
        """inf_{G_R} ψ ≥ e^(−C₁R) at every radius."""
        if self.predicted is None:
            return True
        slack = math.log1p(settings.LAB_VIOLATION_TOLERANCE)
        return all(
            math.log(inf) >= -self.predicted * R - slack
            for R, inf in zip(self.radii, self.infs)
        )

    def rows(self) -> list:
        return [
            {
                'R': R,
                'inf': inf,
                'shell_sup': sup,
                'lower_bound': math.exp(-self.predicted * R) if self.predicted else '',
            }
            for R, inf, sup in zip(self.radii, self.infs, self.shell_sups)
        ]


def measure_decay(
    psi: GridFunction,
    radii: Sequence[float],
    coefficients: Optional[CoefficientSet] = None,
    c0: Optional[float] = None,
    inner: float = 0.0,
) -> DecayReport:
    """Fits the exponential rate of R ↦ inf_{G_R} ψ."""
    radii = _validate_radii(radii)
    domain = psi.domain
    interior = domain.interior
    values = psi.values
    if np.any(values[interior] <= 0):
        raise PreconditionError('ψ must be positive at every interior node')

    norms = domain.node_norms
    infs, sups = [], []
    for R in radii:
        region = interior & (norms >= inner) & (norms <= R * (1 + GEOMETRY_TOLERANCE))
        shell = domain.shell_mask(R)
        if not (region.any() and shell.any()):
            raise DomainError(f'R = {R} leaves the grid')
        infs.append(float(values[region].min()))
        sups.append(float(np.abs(values[shell]).max()))

    rate = fit_linear(radii, -np.log(infs)).slope
    predicted = None
    if coefficients is not None:
        c0 = settings.LAB_LANDIS_C0 if c0 is None else c0
        predicted = landis_constant(coefficients, domain, c0)

    logger.debug(f'decay rate {rate:.6g} over R in [{radii[0]}, {radii[-1]}]')
    return DecayReport(
        radii=radii.tolist(),
        infs=infs,
        shell_sups=sups,
        rate=rate,
        predicted=predicted,
    )


class ComparisonEnum(Enum):
    HOLDS = 'u ≤ δψ at every node'
    BOUNDARY_NOT_ORDERED = 'u ≤ δψ fails on the boundary'
    VIOLATED = 'u ≤ δψ fails at an interior node'


def comparison_check(
    u: GridFunction, psi: GridFunction, delta: float, radius: Optional[float] = None
) -> ComparisonEnum:
    """
    Checks u ≤ δψ on the discrete boundary of Ω ∩ B_R first and, when that
    holds, at every interior node of Ω ∩ B_R.
    The discrete boundary is every node of Ω ∩ B_R with a stencil neighbour
    outside it, so R need not fall on a node radius.
    """
    if not _same_nodes(u.domain, psi.domain):
        raise DomainError('u and ψ live on different grids')
    if not delta > 0:
        raise DomainError('δ must be positive')

    domain = u.domain
    if radius is None:
        region = np.ones(domain.size, dtype=bool)
        boundary = domain.boundary
    else:
        region = domain.node_norms <= radius + domain.spacing * GEOMETRY_TOLERANCE
        boundary = region_boundary(domain, region)

    excess = u.values - delta * psi.values
    scale = max(
        1.0,
        float(np.max(np.abs(u.values[region]))),
        delta * float(np.max(psi.values[region])),
    )
    tolerance = COMPARISON_TOLERANCE * scale

    if np.any(excess[boundary] > tolerance):
        return ComparisonEnum.BOUNDARY_NOT_ORDERED
    if np.any(excess[region & ~boundary] > tolerance):
        return ComparisonEnum.VIOLATED
    return ComparisonEnum.HOLDS


class LandisVerdictEnum(Enum):
    TRIVIAL = 'Super-exponential decay, u vanishes'
    CONTRADICTION = 'Super-exponential decay of a nontrivial u'
    WITHIN_BOUND = 'Decay rate within C1'
    EXCEEDS_BOUND = 'Decay rate exceeds C1'
    NOT_A_SOLUTION = 'Not a solution'
    INCONCLUSIVE = 'Inconclusive'


@dataclass(frozen=True)
class LandisReport:
    verdict: LandisVerdictEnum
    c1: float
    residual: float
    radii: list = field(default_factory=list)
    shell_sups: list = field(default_factory=list)
    # ln(e^(C₁R)·sup_{|x|=R}|u|), −inf where u vanishes on the shell
    log_products: list = field(default_factory=list)
    rate: Optional[float] = None
    comparisons: list = field(default_factory=list)

    @property
    def comparison_violations(self) -> int:
        return sum(row['result'] == ComparisonEnum.VIOLATED for row in self.comparisons)

    @property
    def violated(self) -> bool:
        return (
            self.verdict in (LandisVerdictEnum.CONTRADICTION, LandisVerdictEnum.EXCEEDS_BOUND)
            or self.comparison_violations > 0
        )

    def rows(self) -> list:
        return [
            {'R': R, 'shell_sup': sup, 'log_product': product}
            for R, sup, product in zip(self.radii, self.shell_sups, self.log_products)
        ]


def oriented(u: GridFunction) -> GridFunction:
    """
    ±u with the sign chosen so that u ≤ 0 on ∂Ω; a sign change on ∂Ω breaks
    the hypothesis of the theorem.
    """
    on_boundary = u.values[omega_boundary(u.domain)]
    tolerance = ZERO_TOLERANCE * max(1.0, float(np.max(np.abs(u.values))))
    positive = np.any(on_boundary > tolerance)
    negative = np.any(on_boundary < -tolerance)
    if positive and negative:
        raise PreconditionError('u changes sign on ∂Ω')
    return -u if positive else u


def solution_residual(problem: EllipticProblem, u: GridFunction) -> float:
    """Diagonal-scaled interior residual of u, relative to max |u|."""
    system = assemble(problem, linearize_about=u if problem.form.is_pucci else None)
    interior = problem.domain.interior
    residual = (system.matrix @ u.values - system.rhs) / np.abs(system.matrix.diagonal())
    scale = max(1.0, float(np.max(np.abs(u.values))))
    return float(np.max(np.abs(residual[interior]), initial=0.0)) / scale


def landis_experiment(
    problem: EllipticProblem,
    u: GridFunction,
    radii: Sequence[float],
    psi: Optional[GridFunction] = None,
    deltas: Optional[Sequence[float]] = None,
    c0: Optional[float] = None,
) -> LandisReport:
    """
    Tests the dichotomy behind the decay bound: if e^(C₁R)·sup_{|x|=R}|u|
    has a vanishing liminf on the R-grid then u must be zero, otherwise the
    decay rate of u is at most C₁. With ψ the comparison u ≤ δψ is checked
    on every Ω ∩ B_R for every δ. Results are declared on B_{R_max/2} only.
    """
    domain = problem.domain
    if u.domain is not domain:
        raise DomainError('u lives on another domain')
    radii = _validate_radii(radii)
    truncation = float(domain.node_norms.max())
    if radii[-1] > truncation / 2 * (1 + GEOMETRY_TOLERANCE):
        raise DomainError(f'radii must stay within half the truncation radius {truncation}')

    c0 = settings.LAB_LANDIS_C0 if c0 is None else c0
    c1 = landis_constant(problem.coefficients, domain, c0)
    residual = solution_residual(problem, u)
    u = oriented(u)
    if residual > RESIDUAL_TOLERANCE:
        logger.warning(f'u is not a discrete solution: residual {residual:.3e}')
        return LandisReport(LandisVerdictEnum.NOT_A_SOLUTION, c1, residual)

    sups, log_products = [], []
    for R in radii:
        shell = domain.shell_mask(R)
        if not shell.any():
            raise DomainError(f'R = {R} leaves the grid')
        sup = float(np.max(np.abs(u.values[shell])))
        sups.append(sup)
        log_products.append(c1 * R + math.log(sup) if sup > 0 else -math.inf)

    tail = log_products[-max(1, len(log_products) // 3):]
    rate = None
    if min(tail) <= math.log(LIMINF_TOLERANCE):
        if float(np.max(np.abs(u.values))) <= ZERO_TOLERANCE:
            verdict = LandisVerdictEnum.TRIVIAL
        else:
            verdict = LandisVerdictEnum.CONTRADICTION
    else:
        positive = np.asarray(sups) > 0
        if positive.sum() < 2:
            verdict = LandisVerdictEnum.INCONCLUSIVE
        else:
            rate = fit_linear(radii[positive], -np.log(np.asarray(sups)[positive])).slope
            bounded = is_bounded_by(rate, c1, settings.LAB_VIOLATION_TOLERANCE)
            verdict = LandisVerdictEnum.WITHIN_BOUND if bounded else LandisVerdictEnum.EXCEEDS_BOUND

    comparisons = []
    if psi is not None:
        for delta in validate_deltas(deltas):
            for R in radii:
                result = comparison_check(u, psi, float(delta), float(R))
                comparisons.append({'delta': float(delta), 'R': float(R), 'result': result})

    report = LandisReport(
        verdict=verdict,
        c1=c1,
        residual=residual,
        radii=radii.tolist(),
        shell_sups=sups,
        log_products=log_products,
        rate=rate,
        comparisons=comparisons,
    )
    logger.info(f'Landis experiment: {verdict.value}, C1 = {c1:.4g}')
    return report
