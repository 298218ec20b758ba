from dataclasses import dataclass
from enum import Enum
import logging
import math
from typing import Iterable, Optional

from django.conf import settings
import numpy as np

from common.exceptions import DomainError
from common.fitting import fit_linear
from grid.domain import GridDomain
from operators.coefficients import CoefficientSet
from operators.constants import compute_A
from operators.forms import EllipticProblem, OperatorForm, OperatorFormEnum
from solver.refinement import solve_refined


logger = logging.getLogger(__name__)


class BranchEnum(Enum):
    GROWING = 'Growing'
    DECAYING = 'Decaying'


def ode_rates(b: float, c: float) -> tuple[float, float]:
    """Roots D = b + √(b²+c) and D₋ = b − √(b²+c) of λ² − 2bλ − c."""
    if b < 0 or c < 0:
        raise DomainError(f'oracle coefficients must be nonnegative, got b = {b}, c = {c}')
    root = math.sqrt(b * b + c)
    return b + root, b - root


def ode_oracle(b: float, c: float, x, branch: BranchEnum = BranchEnum.GROWING):
    """
    e^(Dx) or e^(D₋x); both solve u'' − 2bu' − cu = 0 exactly and saturate
    the one-dimensional Harnack and decay bounds.
    """
    growing, decaying = ode_rates(b, c)
    rate = growing if branch == BranchEnum.GROWING else decaying
    return np.exp(rate * np.asarray(x, dtype=float))


def oracle_coefficients(b: float, c: float) -> CoefficientSet:
    # u'' − 2bu' − cu in the tr(A D²u) + b·Du + cu convention
    ode_rates(b, c)
    return CoefficientSet(dimension=1, b=-2.0 * b, c=-c)


def oracle_problem(
    b: float,
    c: float,
    length: float,
    spacing: Optional[float] = None,
    branch: BranchEnum = BranchEnum.GROWING,
) -> EllipticProblem:
    """The oracle ODE on [0, length] with the exact branch as Dirichlet data."""
    spacing = spacing or settings.LAB_DEFAULT_SPACING
    if not length > 0:
        raise DomainError('oracle interval length must be positive')

    def exact(points):
        return ode_oracle(b, c, points[:, 0], branch)

    return EllipticProblem(
        GridDomain.interval(0.0, length, spacing),
        OperatorForm(OperatorFormEnum.NONDIVERGENCE),
        oracle_coefficients(b, c),
        boundary=exact,
    )


def oracle_decay_rate(
    b: float,
    c: float,
    length: float = 10.0,
    spacing: Optional[float] = None,
    levels: int = 1,
) -> float:
    """
    Solves for the decaying branch and fits the slope of −ln u against x on
    the left half of the interval, away from the outer truncation.
    """
    problem = oracle_problem(b, c, length, spacing, BranchEnum.DECAYING)
    u = solve_refined(problem, levels)
    x = u.domain.points[:, 0]
    window = x <= length / 2
    if np.any(u.values[window] <= 0):
        raise DomainError('decaying branch solve lost positivity')

    rate = fit_linear(x[window], -np.log(u.values[window])).slope
    logger.debug(f'oracle decay rate for b = {b}, c = {c}: {rate:.6g}')
    return rate


@dataclass(frozen=True)
class LandisCalibration:
    c0: float
    # (b, c, measured rate, A)
    samples: list

    @property
    def training_size(self) -> int:
        return len(self.samples)


def calibrate_landis_c0(
    grid: Iterable[tuple[float, float]],
    length: float = 10.0,
    spacing: Optional[float] = None,
    levels: int = 1,
) -> LandisCalibration:
    """
    C₀ = max over the grid of measured decay rate / A, times 1 + tolerance.
    The decaying branch is a positive solution on the whole line, so C₁ = C₀A
    has to dominate its rate.
    """
    samples = []
    for b, c in grid:
        problem = oracle_problem(b, c, length, spacing, BranchEnum.DECAYING)
        A = compute_A(problem.coefficients, problem.domain)
        samples.append((b, c, oracle_decay_rate(b, c, length, spacing, levels), A))
    if not samples:
        raise DomainError('landis calibration needs at least one (b, c) pair')

    ratio = max(rate / A for _b, _c, rate, A in samples)
    c0 = ratio * (1 + settings.LAB_VIOLATION_TOLERANCE)
    logger.info(f'calibrated landis C0 = {c0:.6g} on {len(samples)} oracle pairs')
    return LandisCalibration(c0=c0, samples=samples)
