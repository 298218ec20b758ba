from dataclasses import replace
import logging

import numpy as np

from common.exceptions import DomainError
from grid.domain import GridDomain

from .coefficients import CoefficientSet, Field


logger = logging.getLogger(__name__)


def _compose(spec: Field, x0: np.ndarray, r: float, factor: float) -> Field:
    if not callable(spec):
        return factor * np.asarray(spec, dtype=float)

    def rescaled(points: np.ndarray) -> np.ndarray:
        return factor * np.asarray(spec(x0 + r * points), dtype=float)

    return rescaled


def rescale(
    coeffs: CoefficientSet, g: Field, x0, r: float, domain: GridDomain
) -> tuple[CoefficientSet, Field]:
    """
    Blows B_{2r}(x₀) up to B₂ via y ↦ x₀ + r·y:

        A~(y) = A(x₀+ry), b~ = r·b(x₀+ry), c~ = r²·c(x₀+ry), g~ = r²·g(x₀+ry)

    so that ‖b~‖_{L^q(B₂)} = r^(1−n/q)·‖b‖_{L^q(B_{2r}(x₀))} and
    ‖c~‖_{L^p(B₂)} = r^(2−n/p)·‖c‖_{L^p(B_{2r}(x₀))}.
    """
    if not r > 0:
        raise DomainError('rescaling radius must be positive')

    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (coeffs.dimension,):
        raise DomainError('center has the wrong dimension')
    if not domain.contains_ball(x0, 2 * r):
        raise DomainError(f'B_{2 * r}({x0.tolist()}) exits the coefficient domain')

    singularities = tuple(
        tuple((np.atleast_1d(np.asarray(s, dtype=float)) - x0) / r)
        for s in coeffs.singularities
    )

    rescaled = replace(
        coeffs,
        A=_compose(coeffs.A, x0, r, 1.0),
        b=_compose(coeffs.b, x0, r, r),
        b1=_compose(coeffs.b1, x0, r, r),
        b2=_compose(coeffs.b2, x0, r, r),
        c=_compose(coeffs.c, x0, r, r**2),
        c_components=tuple(
            (_compose(spec, x0, r, r**2), exponent)
            for spec, exponent in coeffs.c_components
        ),
        singularities=singularities,
    )

    logger.debug(f'rescaled coefficients around {x0.tolist()} with r = {r}')
    return rescaled, _compose(g, x0, r, r**2)


def rescaling_factors(r: float, q: float, p: float, n: int) -> tuple[float, float]:
    """The norm factors r^(1−n/q) and r^(2−n/p) of the rescaled b and c."""
    return r ** (1 - n / q), r ** (2 - n / p)
