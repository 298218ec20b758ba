from dataclasses import dataclass
from enum import Enum
from typing import Optional

from django.conf import settings

from common.exceptions import DomainError


class SolveMethodEnum(Enum):
    DIRECT_BANDED = 'Banded direct'
    SPARSE_DIRECT = 'Sparse direct'
    STABILIZED_KRYLOV = 'Stabilized Krylov'


DIRECT_TOLERANCE = 1e-10
ITERATIVE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SolveOptions:
    # banded for 1D and sparse direct otherwise when omitted
    method: Optional[SolveMethodEnum] = None
    tolerance: Optional[float] = None
    max_iterations: Optional[int] = None
    damping: float = 1.0

    def __post_init__(self):
        if self.tolerance is not None and not self.tolerance > 0:
            raise DomainError('solver tolerance must be positive')
        if not 0 < self.damping <= 1:
            raise DomainError('damping must lie in (0, 1]')
        if self.max_iterations is not None and self.max_iterations < 1:
            raise DomainError('max_iterations must be at least 1')

    def method_for(self, dimension: int) -> SolveMethodEnum:
        if self.method is not None:
            return self.method
        if dimension == 1:
            return SolveMethodEnum.DIRECT_BANDED
        return SolveMethodEnum.SPARSE_DIRECT

    def tolerance_for(self, method: SolveMethodEnum) -> float:
        if self.tolerance is not None:
            return self.tolerance
        if method == SolveMethodEnum.STABILIZED_KRYLOV:
            return ITERATIVE_TOLERANCE
        return DIRECT_TOLERANCE

    @property
    def iterations(self) -> int:
        return self.max_iterations or settings.LAB_SOLVER_MAX_ITERATIONS
