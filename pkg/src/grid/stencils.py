"""
Finite-difference geometry of a grid domain.

Every domain is treated as a structured grid with one or two local axes.
Cartesian grids use the coordinate axes; polar grids use the orthonormal
frame (e_r, e_θ), with local spacings Δr and r·Δθ. Derivatives are expressed
in the local frame; the curvature terms of polar coordinates
(H_θθ = u_θθ/r² + u_r/r, H_rθ = u_rθ/r − u_θ/r²) are carried by `curvature`.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .domain import GridDomain, GridFunction, ShapeEnum


@dataclass(frozen=True, eq=False)
class StencilGeometry:
    axes: int
    # neighbor indices per axis, -1 where the neighbor does not exist
    plus: np.ndarray
    minus: np.ndarray
    # diagonal neighbors (+,+), (+,−), (−,+), (−,−) for two axes
    corners: np.ndarray
    steps: np.ndarray
    frame: np.ndarray
    curvature: np.ndarray
    # ratio of face measure to cell measure (r_{i±1/2}/r_i on radial faces)
    face_plus: np.ndarray
    face_minus: np.ndarray


def _cartesian_geometry(domain: GridDomain) -> StencilGeometry:
    counts = domain.counts
    axes = len(counts)
    grid_index = np.arange(domain.size).reshape(counts)

    plus = np.full((axes, domain.size), -1)
    minus = np.full((axes, domain.size), -1)
    for k in range(axes):
        forward = np.full(counts, -1)
        backward = np.full(counts, -1)
        upper = [slice(None)] * axes
        lower = [slice(None)] * axes
        upper[k] = slice(1, None)
        lower[k] = slice(None, -1)
        forward[tuple(lower)] = grid_index[tuple(upper)]
        backward[tuple(upper)] = grid_index[tuple(lower)]
        plus[k] = forward.ravel()
        minus[k] = backward.ravel()

    corners = np.full((4, domain.size), -1)
    if axes == 2:
        padded = np.full((counts[0] + 2, counts[1] + 2), -1)
        padded[1:-1, 1:-1] = grid_index
        for c, (di, dj) in enumerate([(1, 1), (1, -1), (-1, 1), (-1, -1)]):
            corners[c] = padded[
                1 + di : 1 + di + counts[0], 1 + dj : 1 + dj + counts[1]
            ].ravel()

    frame = np.broadcast_to(np.eye(axes), (domain.size, axes, axes)).copy()
    ones = np.ones((axes, domain.size))

    return StencilGeometry(
        axes=axes,
        plus=plus,
        minus=minus,
        corners=corners,
        steps=np.full((axes, domain.size), domain.spacing),
        frame=frame,
        curvature=np.zeros(domain.size),
        face_plus=ones,
        face_minus=ones.copy(),
    )


def _polar_geometry(domain: GridDomain) -> StencilGeometry:
    rings, count = domain.counts
    i, j = np.meshgrid(np.arange(rings), np.arange(count), indexing='ij')
    step = domain.spacing
    dtheta = 2 * np.pi / count
    is_disk = domain.shape == ShapeEnum.DISK

    def index(ii, jj):
        jj = np.mod(jj, count)
        out = ii * count + jj
        if is_disk:
            # ring −1 is the reflection of ring 0 through the origin
            reflected = np.mod(jj + count // 2, count)
            out = np.where(ii == -1, reflected, out)
        else:
            out = np.where(ii == -1, -1, out)
        return np.where(ii >= rings, -1, out)

    plus = np.stack([index(i + 1, j).ravel(), index(i, j + 1).ravel()])
    minus = np.stack([index(i - 1, j).ravel(), index(i, j - 1).ravel()])
    corners = np.stack(
        [
            index(i + 1, j + 1).ravel(),
            index(i + 1, j - 1).ravel(),
            index(i - 1, j + 1).ravel(),
            index(i - 1, j - 1).ravel(),
        ]
    )

    r = np.repeat(domain.radii, count)
    theta = np.tile(domain.angles, rings)
    frame = np.empty((domain.size, 2, 2))
    frame[:, :, 0] = np.column_stack([np.cos(theta), np.sin(theta)])
    frame[:, :, 1] = np.column_stack([-np.sin(theta), np.cos(theta)])

    face_plus = np.ones((2, domain.size))
    face_minus = np.ones((2, domain.size))
    face_plus[0] = (r + step / 2) / r
    face_minus[0] = np.maximum(r - step / 2, 0.0) / r

    return StencilGeometry(
        axes=2,
        plus=plus,
        minus=minus,
        corners=corners,
        steps=np.stack([np.full(domain.size, step), r * dtheta]),
        frame=frame,
        curvature=1.0 / r,
        face_plus=face_plus,
        face_minus=face_minus,
    )


@lru_cache(maxsize=32)
def _cached_geometry(domain: GridDomain) -> StencilGeometry:
    if domain.is_polar:
        return _polar_geometry(domain)
    return _cartesian_geometry(domain)


def stencil_geometry(domain: GridDomain) -> StencilGeometry:
    return _cached_geometry(domain)


def region_boundary(domain: GridDomain, region: np.ndarray) -> np.ndarray:
    """Nodes of the region on the domain boundary or with a stencil neighbour outside the region."""
    region = np.asarray(region, dtype=bool)
    geometry = stencil_geometry(domain)
    exposed = domain.boundary.copy()
    for neighbors in (*geometry.plus, *geometry.minus, *geometry.corners):
        present = neighbors >= 0
        exposed[present] |= ~region[neighbors[present]]
    return region & exposed


def local_gradient(u: GridFunction) -> np.ndarray:
    """
    Centered gradient in the local frame at interior nodes, shape (N, axes);
    rows of boundary nodes are zero.
    """
    geometry = stencil_geometry(u.domain)
    interior = u.domain.interior
    values = u.values
    gradient = np.zeros((u.domain.size, geometry.axes))

    for k in range(geometry.axes):
        p, m = geometry.plus[k][interior], geometry.minus[k][interior]
        gradient[interior, k] = (values[p] - values[m]) / (
            2 * geometry.steps[k][interior]
        )

    return gradient


def local_hessian(u: GridFunction) -> np.ndarray:
    """Discrete Hessian in the local frame at interior nodes, shape (N, axes, axes)."""
    geometry = stencil_geometry(u.domain)
    interior = u.domain.interior
    values = u.values
    axes = geometry.axes
    hessian = np.zeros((u.domain.size, axes, axes))
    center = values[interior]

    for k in range(axes):
        p, m = geometry.plus[k][interior], geometry.minus[k][interior]
        s = geometry.steps[k][interior]
        hessian[interior, k, k] = (values[p] - 2 * center + values[m]) / s**2

    if axes == 2:
        pp, pm, mp, mm = (geometry.corners[c][interior] for c in range(4))
        mixed = (values[pp] - values[pm] - values[mp] + values[mm]) / (
            4 * geometry.steps[0][interior] * geometry.steps[1][interior]
        )
        gradient = local_gradient(u)[interior]
        curvature = geometry.curvature[interior]
        hessian[interior, 1, 1] += curvature * gradient[:, 0]
        mixed = mixed - curvature * gradient[:, 1]
        hessian[interior, 0, 1] = hessian[interior, 1, 0] = mixed

    return hessian


def to_local_frame(geometry: StencilGeometry, vectors: np.ndarray) -> np.ndarray:
    """Cartesian vectors (N, n) to local-frame components."""
    return np.einsum('nij,ni->nj', geometry.frame, vectors)


def matrices_to_local_frame(geometry: StencilGeometry, matrices: np.ndarray) -> np.ndarray:
    """Qᵀ A Q per node for Cartesian matrices (N, n, n)."""
    return np.einsum('nki,nkl,nlj->nij', geometry.frame, matrices, geometry.frame)
