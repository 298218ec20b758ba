"""
Sparse assembly of L_h for the three operator forms.

Interior rows hold the discrete operator, boundary rows the identity (the
Dirichlet data is the right-hand side). The discrete maximum principle
diagnostic checks that −L_h restricted to interior rows is an M-matrix row
pattern: nonpositive off-diagonal entries and a nonnegative row sum.
"""

from dataclasses import dataclass
import logging
from typing import Optional

from django.conf import settings
import numpy as np
from scipy import sparse

from common.exceptions import DomainError
from grid.domain import GridDomain, GridFunction
from grid.stencils import (
    StencilGeometry,
    local_gradient,
    local_hessian,
    matrices_to_local_frame,
    stencil_geometry,
    to_local_frame,
)

from .forms import EllipticProblem, OperatorFormEnum
from .pucci import frozen_pucci_coefficients


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaximumPrincipleReport:
    holds: bool
    positive_off_diagonal: int
    negative_row_sum: int
    degenerate_rows: int
    upwind_nodes: int


@dataclass(frozen=True, eq=False)
class LinearSystem:
    matrix: sparse.csr_matrix
    rhs: np.ndarray
    domain: GridDomain
    report: MaximumPrincipleReport

    @property
    def interior(self) -> np.ndarray:
        return self.domain.interior


class _Entries:
    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add(self, rows, cols, vals):
        rows, cols, vals = np.broadcast_arrays(rows, cols, vals)
        keep = cols >= 0
        self.rows.append(rows[keep])
        self.cols.append(cols[keep])
        self.vals.append(vals[keep])

    def matrix(self, size: int) -> sparse.csr_matrix:
        rows = np.concatenate(self.rows) if self.rows else np.zeros(0, dtype=int)
        cols = np.concatenate(self.cols) if self.cols else np.zeros(0, dtype=int)
        vals = np.concatenate(self.vals) if self.vals else np.zeros(0)
        # duplicates are summed on conversion
        return sparse.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()


def _first_order(entries, nodes, plus, minus, steps, drift, diffusion, threshold):
    """Centered b·∂u, one-sided in the drift direction above the Péclet threshold."""
    peclet = np.abs(drift) * steps / np.maximum(diffusion, 1e-300)
    upwind = peclet > threshold * (1 + 1e-9)
    centered = ~upwind

    entries.add(nodes[centered], plus[centered], drift[centered] / (2 * steps[centered]))
    entries.add(nodes[centered], minus[centered], -drift[centered] / (2 * steps[centered]))

    forward = upwind & (drift > 0)
    backward = upwind & (drift <= 0)
    entries.add(nodes[forward], plus[forward], drift[forward] / steps[forward])
    entries.add(nodes[forward], nodes[forward], -drift[forward] / steps[forward])
    entries.add(nodes[backward], nodes[backward], drift[backward] / steps[backward])
    entries.add(nodes[backward], minus[backward], -drift[backward] / steps[backward])

    return upwind


def _nondivergence_rows(
    entries: _Entries,
    geometry: StencilGeometry,
    nodes: np.ndarray,
    a_local: np.ndarray,
    drift_local: np.ndarray,
    c: np.ndarray,
    threshold: float,
) -> int:
    """tr(Ã H) + β·G + c u in the local frame at the given interior nodes."""
    drift = drift_local.copy()
    if geometry.axes == 2:
        curvature = geometry.curvature[nodes]
        # H_θθ carries u_r/r, H_rθ carries −u_θ/r (counted twice)
        drift[:, 0] += a_local[:, 1, 1] * curvature
        drift[:, 1] -= 2 * a_local[:, 0, 1] * curvature

    upwind = np.zeros(nodes.size, dtype=bool)
    for k in range(geometry.axes):
        plus, minus = geometry.plus[k][nodes], geometry.minus[k][nodes]
        steps = geometry.steps[k][nodes]
        a = a_local[:, k, k]
        entries.add(nodes, plus, a / steps**2)
        entries.add(nodes, minus, a / steps**2)
        entries.add(nodes, nodes, -2 * a / steps**2)
        upwind |= _first_order(
            entries, nodes, plus, minus, steps, drift[:, k], a, threshold
        )

    if geometry.axes == 2:
        weight = 2 * a_local[:, 0, 1] / (
            4 * geometry.steps[0][nodes] * geometry.steps[1][nodes]
        )
        pp, pm, mp, mm = (geometry.corners[i][nodes] for i in range(4))
        entries.add(nodes, pp, weight)
        entries.add(nodes, pm, -weight)
        entries.add(nodes, mp, -weight)
        entries.add(nodes, mm, weight)

    entries.add(nodes, nodes, c)
    return int(upwind.sum())


def _divergence_rows(
    entries: _Entries,
    geometry: StencilGeometry,
    domain: GridDomain,
    nodes: np.ndarray,
    a_local_all: np.ndarray,
    b1_local_all: np.ndarray,
    b2_local: np.ndarray,
    c: np.ndarray,
    threshold: float,
) -> int:
    """
    Flux differences of A Du + b₁u across cell faces (midpoint-averaged
    coefficients), plus b₂·Du + c u.
    """
    if domain.is_polar and np.any(np.abs(a_local_all[:, 0, 1]) > 1e-12):
        raise DomainError(
            'divergence form on polar grids needs A diagonal in the (e_r, e_θ) frame'
        )

    upwind = np.zeros(nodes.size, dtype=bool)
    for k in range(geometry.axes):
        steps = geometry.steps[k][nodes]
        a_center = a_local_all[nodes, k, k]
        b_center = b1_local_all[nodes, k]

        for neighbors, weights, sign in (
            (geometry.plus[k][nodes], geometry.face_plus[k][nodes], 1.0),
            (geometry.minus[k][nodes], geometry.face_minus[k][nodes], -1.0),
        ):
            present = (neighbors >= 0) & (weights > 0)
            rows, nbr, w, s = nodes[present], neighbors[present], weights[present], steps[present]
            a_face = (a_center[present] + a_local_all[nbr, k, k]) / 2
            b_face = (b_center[present] + b1_local_all[nbr, k]) / 2

            # both faces contribute a(u_nbr − u)/s² scaled by the face weight
            entries.add(rows, nbr, w * a_face / s**2)
            entries.add(rows, rows, -w * a_face / s**2)

            # convective flux b₁ũ on the face, ũ taken at the face's upper node
            # when b₁ > 0 and at its lower node otherwise once upwinding is on
            peclet = np.abs(b_face) * s / np.maximum(a_face, 1e-300)
            face_upwind = peclet > threshold * (1 + 1e-9)
            centered = ~face_upwind
            factor = sign * w * b_face / s
            entries.add(rows[centered], nbr[centered], factor[centered] / 2)
            entries.add(rows[centered], rows[centered], factor[centered] / 2)

            upper_is_neighbor = sign > 0
            take_upper = face_upwind & (b_face > 0)
            take_lower = face_upwind & ~(b_face > 0)
            upper_cols = nbr if upper_is_neighbor else rows
            lower_cols = rows if upper_is_neighbor else nbr
            entries.add(rows[take_upper], upper_cols[take_upper], factor[take_upper])
            entries.add(rows[take_lower], lower_cols[take_lower], factor[take_lower])

            flagged = np.zeros(nodes.size, dtype=bool)
            flagged[np.flatnonzero(present)[face_upwind]] = True
            upwind |= flagged

        plus, minus = geometry.plus[k][nodes], geometry.minus[k][nodes]
        upwind |= _first_order(
            entries, nodes, plus, minus, steps, b2_local[:, k], a_center, threshold
        )

    if geometry.axes == 2 and not domain.is_polar:
        # ∂₀(a₀₁∂₁u) + ∂₁(a₁₀∂₀u) as products of centered differences
        s2 = 4 * domain.spacing**2
        a01 = a_local_all[:, 0, 1]
        p0, m0 = geometry.plus[0][nodes], geometry.minus[0][nodes]
        p1, m1 = geometry.plus[1][nodes], geometry.minus[1][nodes]
        pp, pm, mp, mm = (geometry.corners[i][nodes] for i in range(4))
        entries.add(nodes, pp, (a01[p0] + a01[p1]) / s2)
        entries.add(nodes, pm, -(a01[p0] + a01[m1]) / s2)
        entries.add(nodes, mp, -(a01[m0] + a01[p1]) / s2)
        entries.add(nodes, mm, (a01[m0] + a01[m1]) / s2)

    entries.add(nodes, nodes, c)
    return int(upwind.sum())


def _divergence_of(geometry: StencilGeometry, nodes: np.ndarray, h_local_all: np.ndarray) -> np.ndarray:
    result = np.zeros(nodes.size)
    for k in range(geometry.axes):
        steps = geometry.steps[k][nodes]
        for neighbors, weights, sign in (
            (geometry.plus[k][nodes], geometry.face_plus[k][nodes], 1.0),
            (geometry.minus[k][nodes], geometry.face_minus[k][nodes], -1.0),
        ):
            present = (neighbors >= 0) & (weights > 0)
            face = (h_local_all[nodes[present], k] + h_local_all[neighbors[present], k]) / 2
            result[present] += sign * weights[present] * face / steps[present]
    return result


def maximum_principle_report(
    matrix: sparse.csr_matrix, interior: np.ndarray, upwind_nodes: int = 0
) -> MaximumPrincipleReport:
    rows = matrix[np.flatnonzero(interior)].tocoo()
    interior_index = np.flatnonzero(interior)
    row_nodes = interior_index[rows.row]
    diagonal_mask = rows.col == row_nodes
    diagonal = np.zeros(interior_index.size)
    np.add.at(diagonal, rows.row[diagonal_mask], rows.data[diagonal_mask])

    scale = max(1.0, float(np.abs(rows.data).max()) if rows.nnz else 1.0)
    tolerance = 1e-12 * scale

    off = ~diagonal_mask
    positive_off = int(np.sum(rows.data[off] < -tolerance))
    row_sums = np.zeros(interior_index.size)
    np.add.at(row_sums, rows.row, rows.data)

    # entries of L_h; −L_h must have nonpositive off-diagonals and row sums ≥ 0
    negative_row_sum = int(np.sum(row_sums > tolerance))
    degenerate = int(np.sum(np.abs(diagonal) <= tolerance))

    return MaximumPrincipleReport(
        holds=positive_off == 0 and negative_row_sum == 0 and degenerate == 0,
        positive_off_diagonal=positive_off,
        negative_row_sum=negative_row_sum,
        degenerate_rows=degenerate,
        upwind_nodes=upwind_nodes,
    )


def assemble(
    problem: EllipticProblem, linearize_about: Optional[GridFunction] = None
) -> LinearSystem:
    """
    Assembles L_h u = rhs. Pucci forms are linearized by freezing the
    eigen-frame of the discrete Hessian of `linearize_about` (zero by default)
    and the direction of its gradient.
    """
    domain = problem.domain
    geometry = stencil_geometry(domain)
    nodes = np.flatnonzero(domain.interior)
    threshold = settings.LAB_PECLET_THRESHOLD
    form = problem.form.kind
    coefficients = problem.coefficients

    sampled = coefficients.sample(domain, validate_ellipticity=not problem.form.is_pucci)
    entries = _Entries()
    rhs = np.zeros(domain.size)
    rhs[nodes] = problem.sampled_g()[nodes]

    if form == OperatorFormEnum.NONDIVERGENCE:
        a_local = matrices_to_local_frame(geometry, sampled.A)[nodes]
        drift = to_local_frame(geometry, sampled.b)[nodes]
        upwind = _nondivergence_rows(
            entries, geometry, nodes, a_local, drift, sampled.c[nodes], threshold
        )
    elif form == OperatorFormEnum.DIVERGENCE:
        a_local_all = matrices_to_local_frame(geometry, sampled.A)
        b1_local_all = to_local_frame(geometry, sampled.b1)
        b2_local = to_local_frame(geometry, sampled.b2)[nodes]
        upwind = _divergence_rows(
            entries,
            geometry,
            domain,
            nodes,
            a_local_all,
            b1_local_all,
            b2_local,
            sampled.c[nodes],
            threshold,
        )
        h_local_all = to_local_frame(geometry, problem.sampled_h())
        rhs[nodes] += _divergence_of(geometry, nodes, h_local_all)
    else:
        about = linearize_about
        if about is None:
            about = domain.function(np.zeros(domain.size))
        a_local, drift = frozen_pucci_coefficients(
            local_hessian(about)[nodes],
            local_gradient(about)[nodes],
            coefficients.ellipticity,
            np.linalg.norm(sampled.b, axis=1)[nodes],
            problem.form.pucci_sign,
        )
        upwind = _nondivergence_rows(
            entries, geometry, nodes, a_local, drift, sampled.c[nodes], threshold
        )

    boundary_nodes = np.flatnonzero(domain.boundary)
    entries.add(boundary_nodes, boundary_nodes, np.ones(boundary_nodes.size))
    rhs[boundary_nodes] = problem.boundary_values()[boundary_nodes]

    matrix = entries.matrix(domain.size)
    report = maximum_principle_report(matrix, domain.interior, upwind)
    if not report.holds:
        logger.warning(f'discrete maximum principle violated: {report}')
    logger.debug(
        f'assembled {form.value} system with {domain.size} nodes, '
        f'{upwind} upwinded rows'
    )

    return LinearSystem(matrix=matrix, rhs=rhs, domain=domain, report=report)


def apply_operator(problem: EllipticProblem, u: GridFunction) -> np.ndarray:
    """
    L_h u − rhs on interior nodes (zero on boundary nodes): the discrete
    residual of u as a solution. Pucci forms are linearized about u itself,
    which evaluates the nonlinear operator exactly.
    """
    system = assemble(problem, linearize_about=u if problem.form.is_pucci else None)
    residual = system.matrix @ u.values - system.rhs
    residual[u.domain.boundary] = 0.0
    return residual
