from dataclasses import dataclass, field
import logging
from typing import Callable, Optional

from django.conf import settings
import numpy as np
from scipy import sparse

from common.exceptions import DomainError, NonConvergenceError
from grid.domain import GridFunction
from operators.assembly import LinearSystem, assemble
from operators.forms import EllipticProblem

from .linear import solve_linear
from .options import SolveOptions


logger = logging.getLogger(__name__)

Nonlinearity = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class SemilinearSolution:
    field: GridFunction
    iterations: int
    residual_history: list = field(default_factory=list)

    @property
    def residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else 0.0


def numeric_derivative(f: Nonlinearity, u: np.ndarray) -> np.ndarray:
    """Centered difference with step max(10⁻⁶, 10⁻⁶|u|)."""
    step = np.maximum(1e-6, 1e-6 * np.abs(u))
    return (np.asarray(f(u + step)) - np.asarray(f(u - step))) / (2 * step)


def linearized_slope(f: Nonlinearity, u: np.ndarray, cap: float) -> np.ndarray:
    """
    Newton slope f'(u), replaced by the secant f(u)/u (multiplicative Picard)
    on rows where |f'(u)| exceeds the cap.
    """
    slope = numeric_derivative(f, u)
    steep = ~np.isfinite(slope) | (np.abs(slope) > cap)
    if steep.any():
        values = np.asarray(f(u[steep]), dtype=float)
        base = u[steep]
        secant = np.zeros_like(base)
        nonzero = base != 0
        secant[nonzero] = values[nonzero] / base[nonzero]
        slope = slope.copy()
        slope[steep] = secant
    return slope


class _Residual:
    """G(u) = L_h u − f(u) − rhs on interior rows, u − data on boundary rows."""

    def __init__(self, problem: EllipticProblem, f: Nonlinearity):
        self.problem = problem
        self.f = f
        self.interior = problem.domain.interior
        self._fixed = None

    def system(self, u: np.ndarray) -> LinearSystem:
        if self.problem.form.is_pucci:
            return assemble(self.problem, linearize_about=self.problem.domain.function(u))
        if self._fixed is None:
            self._fixed = assemble(self.problem)
        return self._fixed

    def __call__(self, u: np.ndarray, system=None) -> tuple[np.ndarray, object]:
        if system is None:
            system = self.system(u)
        residual = system.matrix @ u - system.rhs
        residual[self.interior] -= np.asarray(self.f(u[self.interior]), dtype=float)
        return residual, system


def _scaled_norm(residual: np.ndarray, system) -> float:
    return float(np.max(np.abs(residual / np.abs(system.matrix.diagonal())), initial=0.0))


def solve_semilinear(
    problem: EllipticProblem,
    f: Nonlinearity,
    options: Optional[SolveOptions] = None,
    initial: Optional[GridFunction] = None,
) -> SemilinearSolution:
    """
    Solves L_h u = f(u) + g with the problem's Dirichlet data by damped
    Newton iteration with backtracking on ‖G‖∞. The default initial iterate
    is the linear solve with f(0) frozen into the right-hand side. Pucci
    problems re-freeze the Hessian eigen-frame at every iterate.
    """
    options = options or SolveOptions()
    domain = problem.domain
    interior = domain.interior
    cap = settings.LAB_NEWTON_DERIVATIVE_CAP
    tolerance = options.tolerance_for(options.method_for(domain.dimension))

    residual_of = _Residual(problem, f)
    if initial is None:
        system = residual_of.system(np.zeros(domain.size))
        frozen = system.rhs.copy()
        frozen[interior] += float(np.asarray(f(np.zeros(1)))[0])
        u = solve_linear(system, frozen, options).values.copy()
    else:
        if initial.domain is not domain:
            raise DomainError('initial iterate lives on another domain')
        u = initial.values.copy()

    residual, system = residual_of(u)
    norm = _scaled_norm(residual, system)
    history = [norm]
    bound = tolerance * (1 + _scaled_norm(system.rhs, system))

    iterations = 0
    while norm > bound:
        if iterations >= options.iterations:
            raise NonConvergenceError(
                f'semilinear solve stopped after {iterations} iterations '
                f'with residual {norm:.3e}',
                residual=norm,
                history=history,
            )
        iterations += 1

        slope = np.zeros(domain.size)
        slope[interior] = linearized_slope(f, u[interior], cap)
        jacobian = (system.matrix - sparse.diags(slope)).tocsr()
        step = solve_linear(
            LinearSystem(jacobian, -residual, domain, system.report),
            options=options,
        ).values

        # backtracking on the sup norm of G
        t = options.damping
        while True:
            candidate = u + t * step
            candidate_residual, candidate_system = residual_of(candidate)
            candidate_norm = _scaled_norm(candidate_residual, candidate_system)
            if candidate_norm < norm or t < 1e-4:
                break
            t /= 2

        u, residual, system, norm = (
            candidate,
            candidate_residual,
            candidate_system,
            candidate_norm,
        )
        history.append(norm)
        logger.debug(f'semilinear iterate {iterations}: step {t}, residual {norm:.3e}')

    logger.info(f'semilinear solve converged in {iterations} iterations')
    return SemilinearSolution(domain.function(u), iterations, history)
