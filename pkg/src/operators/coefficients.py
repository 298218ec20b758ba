from dataclasses import dataclass, field
import logging
import math
from typing import Callable, Union

import numpy as np

from common.exceptions import DomainError
from grid.domain import GridDomain


logger = logging.getLogger(__name__)

# a coefficient is a constant (scalar, vector or matrix) or a vectorized
# callable of the (N, n) node array
Field = Union[float, tuple, list, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def offset_points(points: np.ndarray, singularities, spacing: float) -> np.ndarray:
    """
    Moves every node closer than spacing/2 to a declared singular point by
    spacing/2 away from it, so unbounded coefficients are sampled at finite
    values.
    """
    points = np.array(points, dtype=float)
    for singular in singularities:
        singular = np.atleast_1d(np.asarray(singular, dtype=float))
        offset = points - singular
        distance = np.linalg.norm(offset, axis=1)
        close = distance < spacing / 2
        if not close.any():
            continue

        direction = np.zeros_like(offset[close])
        nonzero = distance[close] > 0
        direction[nonzero] = offset[close][nonzero] / distance[close][nonzero, None]
        direction[~nonzero, 0] = 1.0
        points[close] = points[close] + (spacing / 2) * direction

    return points


def _evaluate(spec: Field, points: np.ndarray) -> np.ndarray:
    if callable(spec):
        return np.asarray(spec(points), dtype=float)
    return np.asarray(spec, dtype=float)


def sample_scalar(spec: Field, points: np.ndarray) -> np.ndarray:
    values = _evaluate(spec, points)
    values = np.broadcast_to(values, (points.shape[0],)).astype(float)
    if not np.all(np.isfinite(values)):
        raise DomainError('sampled scalar coefficient is not finite')
    return values


def sample_vector(spec: Field, points: np.ndarray) -> np.ndarray:
    n = points.shape[1]
    values = _evaluate(spec, points)
    if values.ndim == 1 and values.shape[0] == points.shape[0] and n == 1:
        values = values[:, None]
    elif values.ndim == 0:
        if n != 1 and values != 0:
            raise DomainError('a constant vector field needs one entry per axis')
        values = np.full((points.shape[0], n), float(values))
    values = np.broadcast_to(values, (points.shape[0], n)).astype(float)
    if not np.all(np.isfinite(values)):
        raise DomainError('sampled vector coefficient is not finite')
    return values


def sample_matrix(spec: Field, points: np.ndarray) -> np.ndarray:
    count, n = points.shape
    values = _evaluate(spec, points)
    if values.ndim == 0 or (values.ndim == 1 and values.shape[0] == count):
        # scalar field a(x) means a(x)·I
        scalar = np.broadcast_to(values, (count,))
        values = scalar[:, None, None] * np.eye(n)
    values = np.broadcast_to(values, (count, n, n)).astype(float)
    if not np.all(np.isfinite(values)):
        raise DomainError('sampled matrix coefficient is not finite')
    return values


@dataclass(frozen=True)
class CoefficientSet:
    """
    Coefficients of

        div(A Du + b₁u) + b₂·Du + cu        (divergence form)
        tr(A D²u) + b·Du + cu               (non-divergence form)
        M±_{λ,Λ}(D²u) ± |b||Du| + cu        (Pucci forms)

    with ellipticity bounds (λ, Λ) and integrability exponents q for the
    first-order and p for the zero-order coefficients. `c_components` holds an
    optional split c = c₁ + c₂ + … with one exponent per piece; the pieces are
    added to `c` in assembly.
    """

    dimension: int
    A: Field = 1.0
    b: Field = 0.0
    b1: Field = 0.0
    b2: Field = 0.0
    c: Field = 0.0
    ellipticity: tuple = (1.0, 1.0)
    q: float = math.inf
    p: float = math.inf
    c_components: tuple = ()
    singularities: tuple = ()

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise DomainError('only dimensions 1 and 2 are supported')

        lam, Lam = self.ellipticity
        if not 0 < lam <= Lam:
            raise DomainError(f'ellipticity bounds must satisfy 0 < λ ≤ Λ, got {self.ellipticity}')
        if not self.q > self.dimension:
            raise DomainError(f'q = {self.q} must exceed n = {self.dimension}')
        for _component, exponent in self.c_components:
            if not exponent > self.dimension / 2:
                raise DomainError(f'component exponent {exponent} must exceed n/2')

    def sample(self, domain: GridDomain, validate_ellipticity: bool = True) -> 'SampledCoefficients':
        if domain.dimension != self.dimension:
            raise DomainError(
                f'coefficients are {self.dimension}D but the domain is {domain.dimension}D'
            )

        points = offset_points(domain.points, self.singularities, domain.spacing)
        A = sample_matrix(self.A, points)
        if not np.allclose(A, np.swapaxes(A, 1, 2), rtol=0, atol=1e-12):
            raise DomainError('A must be symmetric at every node')

        if validate_ellipticity:
            eigenvalues = np.linalg.eigvalsh(A)
            lam, Lam = self.ellipticity
            if eigenvalues.min() < lam * (1 - 1e-12) or eigenvalues.max() > Lam * (
                1 + 1e-12
            ):
                raise DomainError(
                    f'eigenvalues of A span [{eigenvalues.min()}, {eigenvalues.max()}], '
                    f'outside the ellipticity bounds {self.ellipticity}'
                )

        c = sample_scalar(self.c, points)
        components = [sample_scalar(spec, points) for spec, _ in self.c_components]

        return SampledCoefficients(
            A=A,
            b=sample_vector(self.b, points),
            b1=sample_vector(self.b1, points),
            b2=sample_vector(self.b2, points),
            c=c + sum(components, np.zeros_like(c)),
            c_base=c,
            c_components=components,
        )


@dataclass(frozen=True, eq=False)
class SampledCoefficients:
    A: np.ndarray
    b: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    c: np.ndarray
    c_base: np.ndarray
    c_components: list = field(default_factory=list)

    @property
    def drift_magnitude(self) -> np.ndarray:
        """Pointwise |b| + |b₁| + |b₂|, the first-order size entering A_R."""
        return (
            np.linalg.norm(self.b, axis=1)
            + np.linalg.norm(self.b1, axis=1)
            + np.linalg.norm(self.b2, axis=1)
        )
