from dataclasses import dataclass, field
from enum import Enum
import logging
import math
from typing import Callable, Optional

import numpy as np

from common.exceptions import DomainError


logger = logging.getLogger(__name__)

# relative slack used by every geometric membership test
GEOMETRY_TOLERANCE = 1e-9


class ShapeEnum(Enum):
    INTERVAL = 'Interval'
    BOX = 'Box'
    DISK = 'Disk'
    ANNULUS = 'Annulus'


def _trapezoid_weights(count: int, step: float) -> np.ndarray:
    weights = np.full(count, step)
    weights[0] = weights[-1] = step / 2
    return weights


def _angular_count(outer_radius: float, spacing: float) -> int:
    count = max(8, math.ceil(2 * math.pi * outer_radius / spacing))
    return count + (count % 2)


@dataclass(frozen=True, eq=False)
class GridDomain:
    """
    A discretized interval, box, disk or annulus.

    Nodes are stored flat. Cartesian grids are ordered with the last axis
    fastest; polar grids (disk, annulus) are ordered ring by ring, node
    (i, j) at index i·M + j with radius `radii[i]` and angle j·2π/M.
    """

    shape: ShapeEnum
    dimension: int
    spacing: float
    points: np.ndarray
    cell_volumes: np.ndarray
    boundary: np.ndarray
    counts: tuple
    parameters: dict = field(default_factory=dict)
    radii: Optional[np.ndarray] = None
    angles: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.spacing > 0:
            raise DomainError('grid spacing must be positive')
        if self.points.shape[0] != int(np.prod(self.counts)):
            raise DomainError('node count must equal the product of axis counts')

        for array in (self.points, self.cell_volumes, self.boundary):
            array.setflags(write=False)

    @classmethod
    def interval(cls, a: float, b: float, spacing: float) -> 'GridDomain':
        if not b > a:
            raise DomainError(f'empty interval [{a}, {b}]')
        if not spacing > 0:
            raise DomainError('grid spacing must be positive')

        cells = max(2, int(round((b - a) / spacing)))
        step = (b - a) / cells
        if abs(step - spacing) > 1e-9 * spacing:
            logger.debug(f'interval spacing adjusted from {spacing} to {step}')

        x = np.linspace(a, b, cells + 1)
        boundary = np.zeros(cells + 1, dtype=bool)
        boundary[[0, -1]] = True

        return cls(
            shape=ShapeEnum.INTERVAL,
            dimension=1,
            spacing=step,
            points=x[:, None],
            cell_volumes=_trapezoid_weights(cells + 1, step),
            boundary=boundary,
            counts=(cells + 1,),
            parameters={'a': float(a), 'b': float(b)},
        )

    @classmethod
    def box(cls, lower, upper, spacing: float) -> 'GridDomain':
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.shape != (2,) or upper.shape != (2,):
            raise DomainError('box corners must be two-dimensional points')
        if np.any(upper <= lower):
            raise DomainError('box upper corner must exceed the lower corner')
        if not spacing > 0:
            raise DomainError('grid spacing must be positive')

        # one spacing for both axes keeps the five-point stencil isotropic
        cells = np.maximum(2, np.round((upper - lower) / spacing).astype(int))
        step = float(np.max((upper - lower) / cells))
        cells = np.ceil((upper - lower) / step - 1e-9).astype(int)
        upper = lower + cells * step

        axes = [np.linspace(lower[k], upper[k], cells[k] + 1) for k in range(2)]
        xx, yy = np.meshgrid(*axes, indexing='ij')
        points = np.column_stack([xx.ravel(), yy.ravel()])

        weights = np.outer(
            _trapezoid_weights(cells[0] + 1, step),
            _trapezoid_weights(cells[1] + 1, step),
        ).ravel()

        boundary = np.zeros((cells[0] + 1, cells[1] + 1), dtype=bool)
        boundary[[0, -1], :] = True
        boundary[:, [0, -1]] = True

        return cls(
            shape=ShapeEnum.BOX,
            dimension=2,
            spacing=step,
            points=points,
            cell_volumes=weights,
            boundary=boundary.ravel(),
            counts=(int(cells[0]) + 1, int(cells[1]) + 1),
            parameters={'lower': lower.tolist(), 'upper': upper.tolist()},
        )

    @classmethod
    def disk(
        cls, radius: float, spacing: float, angular_count: Optional[int] = None
    ) -> 'GridDomain':
        """
        Polar grid on the closed disk of the given radius. Rings sit at
        r_i = (i + 1/2)Δr, the last one on the boundary, so the origin is
        never a node and the radial stencil of the first ring reflects through
        the origin onto the opposite node of the same ring.
        """
        if not radius > 0:
            raise DomainError('disk radius must be positive')
        if not spacing > 0:
            raise DomainError('grid spacing must be positive')

        rings = max(1, int(round(radius / spacing - 0.5)))
        step = radius / (rings + 0.5)
        radii = (np.arange(rings + 1) + 0.5) * step
        count = angular_count or _angular_count(radius, spacing)
        if count % 2:
            raise DomainError('disk grids need an even angular count')

        inner = np.maximum(radii - step / 2, 0.0)
        outer = np.minimum(radii + step / 2, radius)
        return cls._polar(
            ShapeEnum.DISK,
            step,
            radii,
            count,
            inner,
            outer,
            boundary_rings=[rings],
            parameters={'radius': float(radius)},
        )

    @classmethod
    def annulus(
        cls,
        inner_radius: float,
        outer_radius: float,
        spacing: float,
        angular_count: Optional[int] = None,
    ) -> 'GridDomain':
        if not 0 < inner_radius < outer_radius:
            raise DomainError('annulus radii must satisfy 0 < r1 < r2')
        if not spacing > 0:
            raise DomainError('grid spacing must be positive')

        rings = max(2, int(round((outer_radius - inner_radius) / spacing)))
        step = (outer_radius - inner_radius) / rings
        radii = inner_radius + np.arange(rings + 1) * step
        count = angular_count or _angular_count(outer_radius, spacing)

        inner = np.maximum(radii - step / 2, inner_radius)
        outer = np.minimum(radii + step / 2, outer_radius)
        return cls._polar(
            ShapeEnum.ANNULUS,
            step,
            radii,
            count,
            inner,
            outer,
            boundary_rings=[0, rings],
            parameters={
                'inner_radius': float(inner_radius),
                'outer_radius': float(outer_radius),
            },
        )

    @classmethod
    def _polar(
        cls, shape, step, radii, count, inner, outer, boundary_rings, parameters
    ):
        angles = np.arange(count) * (2 * np.pi / count)
        rr, tt = np.meshgrid(radii, angles, indexing='ij')
        points = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])

        # exact area of each annular sector cell
        sector = (np.pi / count) * (outer**2 - inner**2)
        cell_volumes = np.repeat(sector, count)

        boundary = np.zeros((radii.size, count), dtype=bool)
        boundary[boundary_rings, :] = True

        return cls(
            shape=shape,
            dimension=2,
            spacing=step,
            points=points,
            cell_volumes=cell_volumes,
            boundary=boundary.ravel(),
            counts=(radii.size, count),
            parameters=parameters,
            radii=radii,
            angles=angles,
        )

    def with_spacing(
        self, spacing: float, angular_count: Optional[int] = None
    ) -> 'GridDomain':
        """The same shape rebuilt at another spacing."""
        params = self.parameters
        if self.shape == ShapeEnum.INTERVAL:
            return GridDomain.interval(params['a'], params['b'], spacing)
        if self.shape == ShapeEnum.BOX:
            return GridDomain.box(params['lower'], params['upper'], spacing)
        if self.shape == ShapeEnum.DISK:
            return GridDomain.disk(params['radius'], spacing, angular_count)
        return GridDomain.annulus(
            params['inner_radius'], params['outer_radius'], spacing, angular_count
        )

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    @property
    def is_polar(self) -> bool:
        return self.shape in (ShapeEnum.DISK, ShapeEnum.ANNULUS)

    @property
    def node_norms(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=1)

    @property
    def total_volume(self) -> float:
        return float(self.cell_volumes.sum())

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)

    def bounding_box_corners(self) -> np.ndarray:
        lower, upper = self.bounding_box()
        if self.dimension == 1:
            return np.array([lower, upper])
        return np.array(
            [
                [lower[0], lower[1]],
                [lower[0], upper[1]],
                [upper[0], lower[1]],
                [upper[0], upper[1]],
            ]
        )

    @property
    def diameter(self) -> float:
        lower, upper = self.bounding_box()
        if self.is_polar:
            return 2 * float(self.radii[-1])
        return float(np.linalg.norm(upper - lower))

    def ball_mask(self, center, radius: float) -> np.ndarray:
        """Nodes of the closed ball B_radius(center)."""
        center = np.atleast_1d(np.asarray(center, dtype=float))
        distance = np.linalg.norm(self.points - center, axis=1)
        return distance <= radius * (1 + GEOMETRY_TOLERANCE) + GEOMETRY_TOLERANCE

    def shell_mask(self, radius: float) -> np.ndarray:
        """Nodes with |x| within half a spacing of the sphere |x| = radius."""
        return np.abs(self.node_norms - radius) <= self.spacing * (
            0.5 + GEOMETRY_TOLERANCE
        )

    def contains_ball(self, center, radius: float) -> bool:
        center = np.atleast_1d(np.asarray(center, dtype=float))
        slack = GEOMETRY_TOLERANCE * max(1.0, radius)

        if self.shape == ShapeEnum.INTERVAL:
            a, b = self.parameters['a'], self.parameters['b']
            return center[0] - radius >= a - slack and center[0] + radius <= b + slack
        if self.shape == ShapeEnum.BOX:
            lower = np.asarray(self.parameters['lower'])
            upper = np.asarray(self.parameters['upper'])
            return bool(
                np.all(center - radius >= lower - slack)
                and np.all(center + radius <= upper + slack)
            )

        distance = float(np.linalg.norm(center))
        if self.shape == ShapeEnum.DISK:
            return distance + radius <= self.parameters['radius'] + slack
        return (
            distance + radius <= self.parameters['outer_radius'] + slack
            and distance - radius >= self.parameters['inner_radius'] - slack
        )

    def nearest_node(self, point) -> int:
        point = np.atleast_1d(np.asarray(point, dtype=float))
        return int(np.argmin(np.linalg.norm(self.points - point, axis=1)))

    def function(self, values) -> 'GridFunction':
        return GridFunction(np.asarray(values, dtype=float), self)

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> 'GridFunction':
        """Evaluates a vectorized callable of the (N, n) node array."""
        values = np.broadcast_to(
            np.asarray(fn(self.points), dtype=float), (self.size,)
        )
        return GridFunction(values.copy(), self)


@dataclass(frozen=True, eq=False)
class GridFunction:
    values: np.ndarray
    domain: GridDomain

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.domain.size,):
            raise DomainError(
                f'expected {self.domain.size} values, got {values.shape}'
            )
        if not np.all(np.isfinite(values)):
            raise DomainError('grid function values must be finite')

        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return self.values.size

    def max(self, mask=None) -> float:
        return float(self.values[_as_mask(self.domain, mask)].max())

    def min(self, mask=None) -> float:
        return float(self.values[_as_mask(self.domain, mask)].min())

    def shifted(self, delta: float) -> 'GridFunction':
        return GridFunction(self.values + delta, self.domain)

    def scaled(self, factor: float) -> 'GridFunction':
        return GridFunction(self.values * factor, self.domain)

    def __neg__(self):
        return self.scaled(-1.0)


def _as_mask(domain: GridDomain, sub) -> np.ndarray:
    if sub is None:
        return np.ones(domain.size, dtype=bool)

    sub = np.asarray(sub)
    if sub.dtype == bool:
        if sub.shape != (domain.size,):
            raise DomainError('node mask does not match the domain')
        mask = sub
    else:
        mask = np.zeros(domain.size, dtype=bool)
        mask[sub.astype(int)] = True

    if not mask.any():
        raise DomainError('node subset is empty')
    return mask


def node_subset(domain: GridDomain, sub=None) -> np.ndarray:
    """Normalizes a node subset (mask, index list or None for all) to a mask."""
    return _as_mask(domain, sub)
