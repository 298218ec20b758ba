from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from common.exceptions import DomainError
from grid.domain import GEOMETRY_TOLERANCE, GridDomain


class RegionShapeEnum(Enum):
    BALL = 'Ball'
    SHELL = 'Shell'


@dataclass(frozen=True)
class Region:
    """
    A ball B_outer or a shell B_outer∖B_inner centered at the origin. In one
    dimension the ball is the interval [−outer, outer].
    """

    shape: RegionShapeEnum
    dimension: int
    outer: float
    inner: float = 0.0

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise DomainError('only dimensions 1 and 2 are supported')
        if self.shape == RegionShapeEnum.SHELL:
            if self.dimension != 2:
                raise DomainError('shells are only connected in two dimensions')
            if not 0 < self.inner < self.outer:
                raise DomainError('shell radii must satisfy 0 < inner < outer')
        elif not self.outer > 0:
            raise DomainError('ball radius must be positive')

    def contains(self, points: np.ndarray, margin: float = 0.0) -> np.ndarray:
        """Membership of the points in the region dilated by `margin`."""
        slack = GEOMETRY_TOLERANCE * max(1.0, self.outer)
        norms = np.linalg.norm(np.atleast_2d(points), axis=1)
        inside = norms <= self.outer + margin + slack
        if self.shape == RegionShapeEnum.SHELL:
            inside &= norms >= self.inner - margin - slack
        return inside

    def contains_ball(self, center, radius: float) -> bool:
        norm = float(np.linalg.norm(np.atleast_1d(center)))
        slack = GEOMETRY_TOLERANCE * max(1.0, self.outer)
        if norm + radius > self.outer + slack:
            return False
        return self.shape == RegionShapeEnum.BALL or norm - radius >= self.inner - slack

    def node_mask(self, domain: GridDomain) -> np.ndarray:
        return self.contains(domain.points)

    def domain(self, spacing: float, angular_count: Optional[int] = None) -> GridDomain:
        if self.shape == RegionShapeEnum.SHELL:
            return GridDomain.annulus(self.inner, self.outer, spacing, angular_count)
        if self.dimension == 1:
            return GridDomain.interval(-self.outer, self.outer, spacing)
        return GridDomain.disk(self.outer, spacing, angular_count)


def harnack_regions(shape: RegionShapeEnum, R: float, dimension: int) -> tuple[Region, Region]:
    """
    (G_R, G′_R): B_R inside B_{R+1}, or B_R∖B_2 inside B_{R+1}∖B_1.
    """
    if shape == RegionShapeEnum.BALL:
        if not R > 0:
            raise DomainError('R must be positive')
        return (
            Region(shape, dimension, R),
            Region(shape, dimension, R + 1),
        )

    if not R > 2:
        raise DomainError('shell regions need R > 2')
    return (
        Region(shape, dimension, R, inner=2.0),
        Region(shape, dimension, R + 1, inner=1.0),
    )
