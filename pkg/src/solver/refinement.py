import logging
from typing import Callable, Optional

import numpy as np
from scipy.spatial import cKDTree

from common.exceptions import DomainError
from grid.domain import GEOMETRY_TOLERANCE, GridDomain, GridFunction, ShapeEnum
from operators.assembly import assemble
from operators.forms import EllipticProblem

from .linear import solve_linear
from .options import SolveOptions


logger = logging.getLogger(__name__)


def coarse_node_indices(coarse: GridDomain, fine: GridDomain) -> np.ndarray:
    """Index in `fine` of every node of `coarse`; the grids must be nested."""
    distance, index = cKDTree(fine.points).query(coarse.points)
    if np.any(distance > GEOMETRY_TOLERANCE * max(1.0, coarse.diameter)):
        raise DomainError('grids are not nested')
    return index


def richardson_extrapolate(
    coarse: GridFunction, fine: GridFunction, order: int = 2, ratio: float = 2.0
) -> GridFunction:
    """u_fine + (u_fine − u_coarse)/(ratio^order − 1) on the coarse nodes."""
    index = coarse_node_indices(coarse.domain, fine.domain)
    fine_values = fine.values[index]
    factor = ratio**order - 1
    return coarse.domain.function(fine_values + (fine_values - coarse.values) / factor)


def refined_domains(domain: GridDomain, levels: int) -> list[GridDomain]:
    if levels < 0:
        raise DomainError('refinement levels must be nonnegative')
    if levels and domain.shape == ShapeEnum.DISK:
        raise DomainError('disk grids with half-offset rings do not nest')

    domains = [domain]
    for _ in range(levels):
        previous = domains[-1]
        angular = 2 * previous.counts[1] if previous.is_polar else None
        domains.append(previous.with_spacing(previous.spacing / 2, angular))
    return domains


def solve_refined(
    problem: EllipticProblem,
    levels: int,
    options: Optional[SolveOptions] = None,
    solve: Optional[Callable[[EllipticProblem], GridFunction]] = None,
) -> GridFunction:
    """
    Solves at h, h/2, …, h/2^levels and eliminates the h², h⁴, … error terms
    of the centered schemes by repeated Richardson extrapolation onto the
    coarse nodes.
    """
    if solve is None:

        def solve(p):
            return solve_linear(assemble(p), options=options)

    domains = refined_domains(problem.domain, levels)
    solutions = [solve(problem.on_domain(d)) for d in domains]
    if levels == 0:
        return solutions[0]

    coarse = problem.domain
    table = [s.values[coarse_node_indices(coarse, s.domain)] for s in solutions]
    for order in range(1, levels + 1):
        factor = 4**order - 1
        table = [
            table[k + 1] + (table[k + 1] - table[k]) / factor
            for k in range(len(table) - 1)
        ]

    logger.info(f'extrapolated {levels + 1} refinement levels on {coarse.size} nodes')
    return coarse.function(table[0])
