from dataclasses import dataclass, field, replace
import logging
from typing import Optional, Sequence

from django.conf import settings
import numpy as np

from common.exceptions import DomainError, MaximumPrincipleError, PreconditionError
from grid.domain import GEOMETRY_TOLERANCE, GridDomain, GridFunction
from operators.assembly import assemble
from operators.coefficients import CoefficientSet
from operators.forms import EllipticProblem, OperatorForm
from solver.linear import solve_linear
from solver.options import SolveOptions
from solver.refinement import coarse_node_indices
from solver.semilinear import solve_semilinear

from .constants import DEFAULT_INNER_RADIUS, DEFAULT_NORMALIZATION_RADIUS, NEGATIVITY_TOLERANCE


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExteriorProblem:
    """
    Lu = 0 on Ω = ℝⁿ∖B_inner (or all of ℝⁿ when `inner_radius` is None),
    truncated to Ω ∩ B_j with u = 0 on ∂Ω and u = 1 on ∂B_j.
    """

    form: OperatorForm
    coefficients: CoefficientSet
    inner_radius: Optional[float] = DEFAULT_INNER_RADIUS
    spacing: Optional[float] = None
    angular_count: Optional[int] = None

    def __post_init__(self):
        if self.inner_radius is not None and not self.inner_radius > 0:
            raise DomainError('the excluded ball must have a positive radius')

    @property
    def dimension(self) -> int:
        return self.coefficients.dimension

    @property
    def grid_spacing(self) -> float:
        return self.spacing or settings.LAB_DEFAULT_SPACING

    def domain(self, radius: float) -> GridDomain:
        inner, h = self.inner_radius, self.grid_spacing
        if inner is not None and not radius > inner:
            raise DomainError(f'truncation radius {radius} must exceed {inner}')

        if self.dimension == 1:
            return GridDomain.interval(-radius if inner is None else inner, radius, h)
        if inner is None:
            return GridDomain.disk(radius, h, self.angular_count)
        return GridDomain.annulus(inner, radius, h, self.angular_count)

    def truncated(self, radius: float, boundary=None) -> EllipticProblem:
        if boundary is None:
            middle = 0.0 if self.inner_radius is None else (self.inner_radius + radius) / 2

            def boundary(points):
                return (np.linalg.norm(points, axis=1) > middle).astype(float)

        return EllipticProblem(
            self.domain(radius), self.form, self.coefficients, boundary=boundary
        )


def omega_boundary(domain: GridDomain) -> np.ndarray:
    """Boundary nodes on ∂Ω, that is, off the outer truncation sphere."""
    norms = domain.node_norms
    return domain.boundary & (norms < norms.max() - domain.spacing / 2)


@dataclass(frozen=True)
class PositiveSolution:
    radii: list
    fields: list
    x0: list
    compact_radius: float
    # max over Ω ∩ B_m of |ψ_{j+1} − ψ_j|
    cauchy: list = field(default_factory=list)

    @property
    def psi(self) -> GridFunction:
        return self.fields[-1]

    @property
    def positive(self) -> bool:
        psi = self.psi
        return bool(np.all(psi.values[psi.domain.interior] > 0))

    @property
    def cauchy_ratios(self) -> list:
        return [
            b / a if a > 0 else 0.0 for a, b in zip(self.cauchy[:-1], self.cauchy[1:])
        ]

    @property
    def cauchy_decreasing(self) -> bool:
        tolerance = NEGATIVITY_TOLERANCE * max(1.0, float(np.max(np.abs(self.psi.values))))
        return all(
            b <= a or b <= tolerance for a, b in zip(self.cauchy[:-1], self.cauchy[1:])
        )


def _zero(u):
    return np.zeros_like(u)


def _solve_truncation(
    problem: EllipticProblem, options: Optional[SolveOptions]
) -> GridFunction:
    system = assemble(problem)
    if not system.report.holds:
        logger.warning(f'maximum principle diagnostic failed: {system.report}')
        raise MaximumPrincipleError(report=system.report)

    if problem.form.is_pucci:
        u = solve_semilinear(problem, _zero, options).field
    else:
        u = solve_linear(system, options=options)

    if u.values.min() < -NEGATIVITY_TOLERANCE * max(1.0, float(u.values.max())):
        raise MaximumPrincipleError(report=system.report)
    return u


def build_positive_solution(
    exterior: ExteriorProblem,
    radii: Sequence[float],
    x0=None,
    compact_radius: Optional[float] = None,
    options: Optional[SolveOptions] = None,
) -> PositiveSolution:
    """
    Solves Lu_j = 0 on Ω ∩ B_j for each truncation radius j, normalizes
    ψ_j = u_j/u_j(x₀) and records how far successive ψ_j move on the compact
    set Ω ∩ B_m. Pucci forms are solved with the nonlinear iteration.
    """
    radii = [float(j) for j in radii]
    if not radii:
        raise DomainError('at least one truncation radius is needed')
    if np.any(np.diff(radii) <= 0):
        raise DomainError('truncation radii must be increasing')

    n = exterior.dimension
    if x0 is None:
        x0 = np.zeros(n)
        x0[0] = DEFAULT_NORMALIZATION_RADIUS
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if not np.linalg.norm(x0) < radii[0]:
        raise DomainError('x0 must lie inside the smallest truncation')

    m = radii[0] if compact_radius is None else float(compact_radius)
    if not 0 < m <= radii[0]:
        raise DomainError('the compact radius must lie in (0, smallest truncation]')

    if n == 2 and exterior.angular_count is None:
        # successive polar grids only nest with a common angular count
        count = exterior.domain(radii[-1]).counts[1]
        exterior = replace(exterior, angular_count=count)

    fields, cauchy = [], []
    for j in radii:
        u = _solve_truncation(exterior.truncated(j), options)
        node = u.domain.nearest_node(x0)
        value = float(u.values[node])
        if not value > 0:
            raise PreconditionError(f'u_j vanishes at the normalization point for j = {j}')

        psi = u.scaled(1.0 / value)
        if fields:
            previous = fields[-1]
            index = coarse_node_indices(previous.domain, psi.domain)
            compact = previous.domain.node_norms <= m * (1 + GEOMETRY_TOLERANCE)
            difference = np.abs(psi.values[index] - previous.values)[compact]
            cauchy.append(float(difference.max(initial=0.0)))
        fields.append(psi)
        logger.debug(f'positive solution on Ω ∩ B_{j}: u_j(x0) = {value:.6g}')

    solution = PositiveSolution(
        radii=radii,
        fields=fields,
        x0=x0.tolist(),
        compact_radius=m,
        cauchy=cauchy,
    )
    if not solution.positive:
        logger.warning('normalized positive solution vanishes at an interior node')
    logger.info(
        f'built positive solution over {len(radii)} truncations, '
        f'last Cauchy difference {cauchy[-1] if cauchy else 0.0:.3e}'
    )
    return solution
