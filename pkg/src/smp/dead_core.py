from dataclasses import dataclass
import logging
import math
from typing import Optional

from django.conf import settings
import numpy as np
from scipy import integrate

from common.exceptions import DomainError, PreconditionError
from grid.domain import GridDomain, GridFunction
from solver.quadrature import quad_singular

from .constants import MAX_PROFILE_HALVINGS, PROFILE_RESIDUAL
from .nonlinearity import Nonlinearity


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DeadCoreProfile:
    # u on [−T, T], zero for x ≤ 0
    field: GridFunction
    half_width: float
    u0: float
    # sup over interior nodes of |u_{i+1} − 2u_i + u_{i−1}|/h² − f(u_i)|
    residual: float


def dead_core_half_width(f: Nonlinearity, u0: float) -> float:
    """T = ∫₀^u₀ dt/√(2F(t)), the distance over which u climbs from 0 to u₀."""
    if not u0 > 0:
        raise DomainError('u₀ must be positive')

    result = quad_singular(lambda t: (2 * f.primitive(t)) ** -0.5, u0)
    if not result.converges or not math.isfinite(result.value):
        raise PreconditionError('no dead core: integral diverges')
    return result.value


def ode_residual(u: GridFunction, f: Nonlinearity) -> np.ndarray:
    """u'' − f(u) by second differences at the interior nodes of an interval."""
    values = u.values
    h = u.domain.spacing
    second = (values[2:] - 2 * values[1:-1] + values[:-2]) / h**2
    return second - f(values[1:-1])


def _sample(solution, T: float, u0: float, spacing: float) -> GridFunction:
    domain = GridDomain.interval(-T, T, spacing)
    x = domain.points[:, 0]
    values = np.zeros(domain.size)
    right = x > 0
    values[right] = np.maximum(solution.sol(np.minimum(x[right], T))[0], 0.0)
    values[-1] = u0
    return GridFunction(values, domain)


def dead_core_profile(
    f: Nonlinearity, u0: float, spacing: Optional[float] = None
) -> DeadCoreProfile:
    """
    The solution of u'' = f(u) that leaves 0 with zero slope at x = 0 and
    reaches u₀ at x = T, extended by 0 for x < 0. It is integrated backward
    from (T, u₀) with the first integral u′(T) = √(2F(u₀)).
    The grid spacing is halved until the ODE residual is at most
    PROFILE_RESIDUAL.
    """
    spacing = settings.LAB_DEFAULT_SPACING if spacing is None else spacing
    T = dead_core_half_width(f, u0)

    def rhs(_x, y):
        return [y[1], float(f(y[0]))]

    solution = integrate.solve_ivp(
        rhs,
        (T, 0.0),
        [u0, math.sqrt(2 * f.primitive(u0))],
        method='DOP853',
        dense_output=True,
        rtol=1e-11,
        atol=1e-14,
    )
    if not solution.success:
        raise PreconditionError(f'profile integration failed: {solution.message}')

    # the kink at x = 0 keeps the residual O(h); halve h until it is small enough
    for _ in range(MAX_PROFILE_HALVINGS + 1):
        field = _sample(solution, T, u0, spacing)
        residual = float(np.max(np.abs(ode_residual(field, f))))
        if residual <= PROFILE_RESIDUAL:
            break
        logger.debug(f'dead core residual {residual:.3e} at h = {field.domain.spacing:.3g}, halving h')
        spacing /= 2
    else:
        logger.warning(f'dead core residual {residual:.3e} stays above {PROFILE_RESIDUAL:g}')

    logger.info(f'dead core of {f}: T = {T:.8g}, residual {residual:.3e} at h = {field.domain.spacing:.3g}')
    return DeadCoreProfile(field, T, u0, residual)
