from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy.spatial import cKDTree

from common.exceptions import DomainError

from .domain import GEOMETRY_TOLERANCE, GridFunction, node_subset


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UlNormSpec:
    """
    Uniformly local L^s norm: the sup over unit-ball windows B_1(x) of the
    local L^s norm. Exponents below 1 give the ε-quasinorm of the weak
    Harnack integral and must be requested explicitly.
    """

    exponent: float
    radius: float = 1.0
    quasi: bool = False

    def __post_init__(self):
        if not self.exponent > 0:
            raise DomainError('norm exponent must be positive')
        if self.exponent < 1 and not self.quasi:
            raise DomainError(
                f'exponent {self.exponent} < 1 is only allowed as a quasinorm'
            )
        if not self.radius > 0:
            raise DomainError('window radius must be positive')


def _power_sum(values: np.ndarray, weights: np.ndarray, s: float) -> float:
    return float(np.sum(np.abs(values) ** s * weights))


def lebesgue_norm(f: GridFunction, s: float, sub=None) -> float:
    """
    (Σ |f_i|^s · cellvol_i)^(1/s) over the node subset, max |f_i| for s = ∞.
    Exponents in (0, 1) are computed by the same formula.
    """
    if not s > 0:
        raise DomainError('norm exponent must be positive')

    mask = node_subset(f.domain, sub)
    values = f.values[mask]
    if math.isinf(s):
        return float(np.max(np.abs(values)))

    return _power_sum(values, f.domain.cell_volumes[mask], s) ** (1 / s)


def window_centers(f: GridFunction) -> np.ndarray:
    domain = f.domain
    return np.vstack([domain.points, domain.bounding_box_corners()])


def ul_norm(f: GridFunction, spec: UlNormSpec, sub=None, centers=None) -> float:
    """
    max over window centers x of ‖f‖_{L^s(Ω∩B_r(x))}, Ω being the node subset
    (all nodes by default). Centers default to every node plus the corners of
    the bounding box.
    """
    mask = node_subset(f.domain, sub)
    points = f.domain.points[mask]
    values = np.abs(f.values[mask])
    weights = f.domain.cell_volumes[mask]
    s = spec.exponent

    if math.isinf(s):
        # the window centered at the maximizing node contains it
        return float(values.max())

    if centers is None:
        centers = np.vstack([points, f.domain.bounding_box_corners()])
    radius = spec.radius * (1 + GEOMETRY_TOLERANCE) + GEOMETRY_TOLERANCE
    contributions = values**s * weights

    if f.domain.dimension == 1:
        order = np.argsort(points[:, 0], kind='stable')
        x = points[order, 0]
        prefix = np.concatenate([[0.0], np.cumsum(contributions[order])])
        c = np.asarray(centers)[:, 0]
        left = np.searchsorted(x, c - radius, side='left')
        right = np.searchsorted(x, c + radius, side='right')
        window_sums = prefix[right] - prefix[left]
    else:
        tree = cKDTree(points)
        neighbors = tree.query_ball_point(np.asarray(centers), r=radius)
        window_sums = np.array(
            [contributions[idx].sum() if idx else 0.0 for idx in neighbors]
        )

    return float(window_sums.max()) ** (1 / s)


def level_set_measure(u: GridFunction, a: float, sub=None) -> float:
    """Σ cellvol_i over nodes of the subset with u_i > a."""
    mask = node_subset(u.domain, sub)
    above = mask & (u.values > a)
    return float(u.domain.cell_volumes[above].sum())


def subset_measure(domain, sub=None) -> float:
    mask = node_subset(domain, sub)
    return float(domain.cell_volumes[mask].sum())
