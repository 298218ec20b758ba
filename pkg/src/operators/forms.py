from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from django.conf import settings
import numpy as np

from common.exceptions import DomainError
from grid.domain import GridDomain, GridFunction

from .coefficients import CoefficientSet, Field, sample_scalar, sample_vector


class OperatorFormEnum(Enum):
    DIVERGENCE = 'Divergence'
    NONDIVERGENCE = 'Non-divergence'
    PUCCI_PLUS = 'Pucci maximal'
    PUCCI_MINUS = 'Pucci minimal'


@dataclass(frozen=True)
class OperatorForm:
    kind: OperatorFormEnum
    # explicit p_E; LAB_P_E_FRACTION·n when omitted
    p_e: Optional[float] = None

    @property
    def is_pucci(self) -> bool:
        return self.kind in (OperatorFormEnum.PUCCI_PLUS, OperatorFormEnum.PUCCI_MINUS)

    @property
    def pucci_sign(self) -> int:
        return 1 if self.kind == OperatorFormEnum.PUCCI_PLUS else -1

    def p_e_value(self, n: int) -> float:
        value = self.p_e if self.p_e is not None else settings.LAB_P_E_FRACTION * n
        if not n / 2 < value < n:
            raise DomainError(f'p_E = {value} must lie in (n/2, n) = ({n / 2}, {n})')
        return value

    def p0(self, n: int) -> float:
        if self.kind == OperatorFormEnum.DIVERGENCE:
            return n / 2
        return self.p_e_value(n)


@dataclass(frozen=True, eq=False)
class EllipticProblem:
    """
    Lu = g (+ div h in divergence form) on the domain's interior nodes with
    Dirichlet data on its boundary nodes.
    """

    domain: GridDomain
    form: OperatorForm
    coefficients: CoefficientSet
    g: Field = 0.0
    h: Field = 0.0
    boundary: Union[Field, GridFunction] = 0.0

    def __post_init__(self):
        n = self.domain.dimension
        if self.coefficients.dimension != n:
            raise DomainError('coefficient and domain dimensions differ')

        p0 = self.form.p0(n)
        if not self.coefficients.p > p0:
            raise DomainError(f'p = {self.coefficients.p} must exceed p₀ = {p0}')
        for _spec, exponent in self.coefficients.c_components:
            if not exponent > p0:
                raise DomainError(f'component exponent {exponent} must exceed p₀ = {p0}')

    def sampled_g(self) -> np.ndarray:
        return sample_scalar(self.g, self.domain.points)

    def sampled_h(self) -> np.ndarray:
        return sample_vector(self.h, self.domain.points)

    def boundary_values(self) -> np.ndarray:
        if isinstance(self.boundary, GridFunction):
            if self.boundary.domain is not self.domain:
                raise DomainError('boundary data lives on another domain')
            return np.asarray(self.boundary.values)
        return sample_scalar(self.boundary, self.domain.points)

    def with_boundary(self, boundary) -> 'EllipticProblem':
        return EllipticProblem(
            self.domain, self.form, self.coefficients, self.g, self.h, boundary
        )

    def on_domain(self, domain: GridDomain, boundary=None) -> 'EllipticProblem':
        """The same operator and data on another grid (boundary data must be a field)."""
        boundary = self.boundary if boundary is None else boundary
        if isinstance(boundary, GridFunction):
            raise DomainError('grid boundary data cannot be moved to another grid')
        return EllipticProblem(
            domain, self.form, self.coefficients, self.g, self.h, boundary
        )
