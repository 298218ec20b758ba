from dataclasses import dataclass
import logging
import math
from typing import Optional

from django.conf import settings
import numpy as np

from common.exceptions import DomainError, PreconditionError
from common.fitting import FitResult, fit_linear
from grid.domain import GridFunction
from grid.norms import UlNormSpec, lebesgue_norm, ul_norm
from operators.assembly import assemble
from operators.constants import sharpness_constants
from operators.forms import EllipticProblem, OperatorFormEnum
from solver.linear import solve_linear

from .regions import Region


logger = logging.getLogger(__name__)

# relative size of negative values tolerated in a nonnegative solution
NEGATIVITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class HarnackMeasurement:
    R: float
    A: float
    dimension: int
    p: float
    epsilon: float
    sup: float
    inf: float
    epsilon_integral: float
    epsilon_integral_ul: float
    forcing: float
    c0: float
    local_max_c: float
    # distance between the nodes attaining sup and inf over G_R
    extremal_distance: float

    @property
    def ratio(self) -> float:
        return self.sup / self.inf if self.inf > 0 else math.inf

    @property
    def log_ratio(self) -> float:
        return math.log(self.ratio) if self.inf > 0 else math.inf

    @property
    def rate(self) -> float:
        """ln(sup/inf) per unit distance between the extremal nodes."""
        if self.extremal_distance <= 0 or self.inf <= 0:
            return 0.0 if self.sup == self.inf else math.nan
        return self.log_ratio / self.extremal_distance

    @property
    def bound(self) -> float:
        """e^(C₀AR)·(inf + ‖g‖)."""
        try:
            return math.exp(self.c0 * self.A * self.R) * (self.inf + self.forcing)
        except OverflowError:
            return math.inf

    def _local_max(self, integral: float) -> float:
        if self.local_max_c == 0 or integral == 0 and self.forcing == 0:
            return 0.0
        forcing_power = self.dimension / self.p - 2 if math.isfinite(self.p) else -2.0
        return self.local_max_c * (
            self.A ** (self.dimension / self.epsilon) * integral + self.A**forcing_power * self.forcing
        )

    @property
    def local_max_bound(self) -> float:
        """C(A^(n/ε)·‖u‖_{L^ε_ul(G′_R)} + A^(n/p−2)·‖g‖)."""
        return self._local_max(self.epsilon_integral_ul)

    @property
    def composed_bound(self) -> float:
        """The local maximum bound with the ε-integral replaced by the weak Harnack bound."""
        return self._local_max(self.bound)

    @property
    def harnack_violated(self) -> bool:
        return self.sup > self.bound * (1 + settings.LAB_VIOLATION_TOLERANCE)

    @property
    def weak_harnack_violated(self) -> bool:
        return self.epsilon_integral > self.bound * (1 + settings.LAB_VIOLATION_TOLERANCE)

    @property
    def local_max_violated(self) -> bool:
        return self.sup > self.local_max_bound * (1 + settings.LAB_VIOLATION_TOLERANCE)

    @property
    def violated(self) -> bool:
        return self.harnack_violated or self.weak_harnack_violated or self.local_max_violated

    @property
    def composition_holds(self) -> bool:
        """sup stays below the local maximum bound composed with the weak Harnack bound."""
        return self.sup <= self.composed_bound * (1 + settings.LAB_VIOLATION_TOLERANCE)

    def chain_log_bound(self, cover_size: int, chain_length: int, harnack_constant: float) -> float:
        """(1/ε)·ln m + d·ln C for a cover of m balls and chains of length d."""
        return math.log(cover_size) / self.epsilon + chain_length * math.log(harnack_constant)

    def as_row(self) -> dict:
        return {
            'R': self.R,
            'A': self.A,
            'sup': self.sup,
            'inf': self.inf,
            'ratio': self.ratio,
            'rate': self.rate,
            'epsilon_integral': self.epsilon_integral,
            'forcing': self.forcing,
            'bound': self.bound,
            'local_max_bound': self.local_max_bound,
            'violated': self.violated,
        }


def forcing_norm(problem: EllipticProblem, sub=None) -> float:
    """‖g‖_{L^p_ul(G′_R)}, plus ‖h‖_{L^q_ul(G′_R)} in divergence form."""
    domain = problem.domain
    coefficients = problem.coefficients
    g = GridFunction(problem.sampled_g(), domain)
    value = ul_norm(g, UlNormSpec(coefficients.p), sub)

    if problem.form.kind == OperatorFormEnum.DIVERGENCE:
        h = np.linalg.norm(problem.sampled_h(), axis=1)
        value += ul_norm(GridFunction(h, domain), UlNormSpec(coefficients.q), sub)
    return value


def _check_nonnegative(u: GridFunction):
    scale = max(1.0, float(np.max(np.abs(u.values))))
    if u.values.min() < -NEGATIVITY_TOLERANCE * scale:
        raise PreconditionError(
            f'solution has negative values down to {u.values.min():.3e}'
        )


def measure_harnack(
    problem: EllipticProblem,
    region: Region,
    u: Optional[GridFunction] = None,
    epsilon: Optional[float] = None,
    c0: Optional[float] = None,
    local_max_c: Optional[float] = None,
) -> HarnackMeasurement:
    """
    Measures the Harnack quantities of a nonnegative solution on G′_R (the
    problem's domain) over the nodes of G_R = `region`. The solution is
    computed from the problem when not given.
    """
    domain = problem.domain
    epsilon = settings.LAB_EPSILON if epsilon is None else epsilon
    if not epsilon > 0:
        raise DomainError('ε must be positive')
    if region.dimension != domain.dimension:
        raise DomainError('region and domain dimensions differ')

    if u is None:
        u = solve_linear(assemble(problem))
    elif u.domain is not domain:
        raise DomainError('solution lives on another domain')
    _check_nonnegative(u)

    inner = region.node_mask(domain)
    if not inner.any():
        raise DomainError('G_R contains no nodes of the domain')

    clipped = GridFunction(np.maximum(u.values, 0.0), domain)
    inner_index = np.flatnonzero(inner)
    top = inner_index[np.argmax(clipped.values[inner])]
    bottom = inner_index[np.argmin(clipped.values[inner])]

    measurement = HarnackMeasurement(
        R=region.outer,
        A=sharpness_constants(problem.coefficients, domain, region.outer).A_R,
        dimension=domain.dimension,
        p=problem.coefficients.p,
        epsilon=epsilon,
        sup=float(clipped.values[top]),
        inf=float(clipped.values[bottom]),
        epsilon_integral=lebesgue_norm(clipped, epsilon, inner),
        epsilon_integral_ul=ul_norm(clipped, UlNormSpec(epsilon, quasi=epsilon < 1)),
        forcing=forcing_norm(problem),
        c0=settings.LAB_HARNACK_C0 if c0 is None else c0,
        local_max_c=settings.LAB_LOCAL_MAX_C if local_max_c is None else local_max_c,
        extremal_distance=float(np.linalg.norm(domain.points[top] - domain.points[bottom])),
    )

    if measurement.violated:
        logger.warning(f'Harnack violation at R = {region.outer}: {measurement.as_row()}')
    logger.info(
        f'measured R = {region.outer}: ratio {measurement.ratio:.6g}, A = {measurement.A:.6g}'
    )
    return measurement


def fit_harnack_rate(measurements: list[HarnackMeasurement]) -> FitResult:
    """Slope of ln(sup/inf) against R across a sweep."""
    return fit_linear(
        [m.R for m in measurements], [m.log_ratio for m in measurements]
    )
