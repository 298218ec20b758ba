"""
Chain covers of a region by overlapping balls of radius r₀.

Centers are the lattice (r₀/(2√n))ℤⁿ intersected with the region dilated by
r₀. Two balls are linked when their overlap has volume at least C₅(n)·r₀ⁿ,
C₅ being the overlap of two unit balls at unit distance; this is the same
as |X_i − X_j| ≤ r₀.
"""

from dataclasses import dataclass
import logging
import math
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from common.exceptions import DomainError, LabError
from grid.domain import GEOMETRY_TOLERANCE, GridDomain

from .regions import Region


logger = logging.getLogger(__name__)

# local grid spacing r₀/OVERLAP_RESOLUTION behind discrete overlaps
OVERLAP_RESOLUTION = 40


def overlap_volume(distance: float, radius: float, n: int) -> float:
    """Volume of B_radius(0) ∩ B_radius(x) with |x| = distance."""
    if distance >= 2 * radius:
        return 0.0
    if n == 1:
        return 2 * radius - distance
    half = distance / 2
    return 2 * radius**2 * math.acos(half / radius) - half * math.sqrt(
        4 * radius**2 - distance**2
    )


def overlap_constant(n: int) -> float:
    """C₅(n): overlap volume of two unit balls at unit distance."""
    return overlap_volume(1.0, 1.0, n)


@dataclass(frozen=True, eq=False)
class ChainCover:
    region: Region
    r0: float
    spacing: float
    centers: np.ndarray
    graph: sparse.csr_matrix

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    @property
    def dimension(self) -> int:
        return self.region.dimension

    @property
    def cardinality_constant(self) -> float:
        """m·(r₀/R)ⁿ, bounded uniformly in R and r₀."""
        return self.size * (self.r0 / self.region.outer) ** self.dimension

    def chain_constant(self, length: int) -> float:
        """d·r₀/R for a chain of d balls."""
        return length * self.r0 / self.region.outer

    def chain_between(self, start: int, end: int) -> list[int]:
        """Shortest chain of linked balls from `start` to `end`, both included."""
        if not (0 <= start < self.size and 0 <= end < self.size):
            raise DomainError(f'ball indices must lie in [0, {self.size})')
        if start == end:
            return [start]

        _order, predecessors = csgraph.breadth_first_order(
            self.graph, start, directed=False, return_predecessors=True
        )
        if predecessors[end] < 0:
            raise LabError(f'balls {start} and {end} are not connected by the overlap graph')

        chain = [end]
        while chain[-1] != start:
            chain.append(int(predecessors[chain[-1]]))
        return chain[::-1]

    def chain_overlaps(self, chain: list[int]) -> list[float]:
        return [
            overlap_volume(
                float(np.linalg.norm(self.centers[a] - self.centers[b])),
                self.r0,
                self.dimension,
            )
            for a, b in zip(chain, chain[1:])
        ]

    def discrete_overlap(self, a: int, b: int, spacing: Optional[float] = None) -> float:
        """
        Cell-volume measure of the nodes of B_{r₀}(X_a) ∩ B_{r₀}(X_b) on a local
        grid of the given spacing (r₀/OVERLAP_RESOLUTION by default) centered
        between the two balls.
        """
        spacing = spacing or self.r0 / OVERLAP_RESOLUTION
        middle = (self.centers[a] + self.centers[b]) / 2
        lower, upper = middle - self.r0 - spacing, middle + self.r0 + spacing
        if self.dimension == 1:
            domain = GridDomain.interval(lower[0], upper[0], spacing)
        else:
            domain = GridDomain.box(lower, upper, spacing)

        both = domain.ball_mask(self.centers[a], self.r0) & domain.ball_mask(
            self.centers[b], self.r0
        )
        return float(domain.cell_volumes[both].sum())

    def link_overlap_ratio(self, chain: list[int]) -> float:
        """
        Smallest discrete overlap along the chain over the linking threshold
        C₅(n)·r₀ⁿ.
        """
        threshold = overlap_constant(self.dimension) * self.r0**self.dimension
        overlaps = [self.discrete_overlap(a, b) for a, b in zip(chain, chain[1:])]
        return min(overlaps, default=threshold) / threshold

    def covers(self, domain: GridDomain) -> bool:
        """Every node of the region lies in some ball B_{r₀}(X_i)."""
        nodes = domain.points[self.region.node_mask(domain)]
        if not len(nodes):
            return True
        distance, _ = cKDTree(self.centers).query(nodes)
        return bool(np.all(distance <= self.r0 * (1 + GEOMETRY_TOLERANCE)))

    def doubled_balls_inside(self, outer: Region) -> bool:
        """B_{2r₀}(X_i) ⊂ G′_R for every center."""
        return all(outer.contains_ball(center, 2 * self.r0) for center in self.centers)

    def extreme_pair(self) -> tuple[int, int]:
        """Indices of the two centers farthest apart along the first axis."""
        first = self.centers[:, 0]
        return int(np.argmin(first)), int(np.argmax(first))


def _lattice(region: Region, spacing: float, r0: float) -> np.ndarray:
    n = region.dimension
    reach = region.outer + r0
    count = int(math.floor(reach / spacing * (1 + GEOMETRY_TOLERANCE)))
    axis = np.arange(-count, count + 1) * spacing
    if n == 1:
        points = axis[:, None]
    else:
        xx, yy = np.meshgrid(axis, axis, indexing='ij')
        points = np.column_stack([xx.ravel(), yy.ravel()])
    return points[region.contains(points, margin=r0)]


def build_chain_cover(region: Region, r0: float) -> ChainCover:
    if not 0 < r0 <= 0.5:
        raise DomainError(f'r₀ = {r0} must lie in (0, 1/2]')
    if not region.outer > 2:
        raise DomainError('chain covers need R > 2')

    n = region.dimension
    spacing = r0 / (2 * math.sqrt(n))
    centers = _lattice(region, spacing, r0)

    pairs = cKDTree(centers).query_pairs(r0 * (1 + GEOMETRY_TOLERANCE), output_type='ndarray')
    distances = np.linalg.norm(centers[pairs[:, 0]] - centers[pairs[:, 1]], axis=1)
    threshold = overlap_constant(n) * r0**n * (1 - GEOMETRY_TOLERANCE)
    linked = np.array(
        [overlap_volume(t, r0, n) >= threshold for t in distances], dtype=bool
    )
    pairs = pairs[linked]
    graph = sparse.coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
        shape=(len(centers), len(centers)),
    ).tocsr()

    components, _labels = csgraph.connected_components(graph, directed=False)
    if components != 1:
        raise LabError(f'cover overlap graph has {components} components')

    logger.debug(f'chain cover of R = {region.outer} with {len(centers)} balls of radius {r0}')
    return ChainCover(region, r0, spacing, centers, graph)
