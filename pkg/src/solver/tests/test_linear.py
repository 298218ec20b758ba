import math

from django.test import SimpleTestCase
import numpy as np
from scipy import sparse

from common.exceptions import NonConvergenceError, SingularSystemError
from common.random import SplitMix64
from grid.domain import GridDomain
from operators.assembly import LinearSystem, assemble, maximum_principle_report
from operators.coefficients import CoefficientSet
from operators.forms import EllipticProblem, OperatorForm, OperatorFormEnum
from solver.linear import solve_linear
from solver.options import SolveMethodEnum, SolveOptions


NONDIVERGENCE = OperatorForm(OperatorFormEnum.NONDIVERGENCE)


def _raw_system(domain, matrix, rhs):
    matrix = sparse.csr_matrix(matrix)
    report = maximum_principle_report(matrix, domain.interior)
    return LinearSystem(matrix, np.asarray(rhs, dtype=float), domain, report)


class SolveLinearTestCase(SimpleTestCase):
    def test_poisson_parabola(self):
        domain = GridDomain.interval(0.0, 1.0, 0.01)
        problem = EllipticProblem(domain, NONDIVERGENCE, CoefficientSet(dimension=1), g=-1.0)

        u = solve_linear(assemble(problem))

        self.assertAlmostEqual(u.max(), 0.125, delta=1e-6)

    def test_annulus_logarithm(self):
        domain = GridDomain.annulus(1.0, 2.0, 0.01, angular_count=16)
        problem = EllipticProblem(
            domain,
            NONDIVERGENCE,
            CoefficientSet(dimension=2),
            boundary=lambda x: np.log(np.linalg.norm(x, axis=1)) / math.log(2),
        )

        u = solve_linear(assemble(problem))
        exact = np.log(domain.node_norms) / math.log(2)

        self.assertLess(np.max(np.abs(u.values - exact)) / np.max(np.abs(exact)), 1e-3)

    def test_identity_returns_rhs(self):
        domain = GridDomain.interval(0.0, 1.0, 0.1)
        rhs = SplitMix64(5).uniform(-3.0, 3.0, size=domain.size)
        system = _raw_system(domain, sparse.identity(domain.size), rhs)

        for method in (SolveMethodEnum.DIRECT_BANDED, SolveMethodEnum.SPARSE_DIRECT):
            u = solve_linear(system, options=SolveOptions(method=method))
            self.assertEqual(u.values.tolist(), rhs.tolist())

    def test_krylov_agrees_with_direct(self):
        domain = GridDomain.box([0.0, 0.0], [1.0, 1.0], 0.05)
        coeffs = CoefficientSet(
            dimension=2, b=lambda x: np.column_stack([np.sin(x[:, 1]), x[:, 0]]), c=-1.0
        )
        problem = EllipticProblem(
            domain, NONDIVERGENCE, coeffs, g=1.0, boundary=lambda x: x[:, 0] * x[:, 1]
        )
        system = assemble(problem)

        direct = solve_linear(system)
        iterative = solve_linear(
            system, options=SolveOptions(method=SolveMethodEnum.STABILIZED_KRYLOV)
        )

        self.assertTrue(np.allclose(direct.values, iterative.values, atol=1e-5))

    def test_singular_matrix(self):
        domain = GridDomain.interval(0.0, 1.0, 0.5)
        matrix = [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]]
        system = _raw_system(domain, matrix, [1.0, 0.0, -1.0])

        for method in (SolveMethodEnum.DIRECT_BANDED, SolveMethodEnum.SPARSE_DIRECT):
            with self.assertRaises(SingularSystemError):
                solve_linear(system, options=SolveOptions(method=method))

    def test_zero_diagonal_is_singular(self):
        domain = GridDomain.interval(0.0, 1.0, 0.5)
        matrix = [[1.0, 0.0, 0.0], [1.0, 0.0, 1.0], [0.0, 0.0, 1.0]]

        with self.assertRaises(SingularSystemError):
            solve_linear(_raw_system(domain, matrix, [1.0, 1.0, 1.0]))

    def test_nonconvergence_carries_residual(self):
        domain = GridDomain.box([0.0, 0.0], [1.0, 1.0], 0.05)
        problem = EllipticProblem(
            domain, NONDIVERGENCE, CoefficientSet(dimension=2), g=lambda x: np.exp(x[:, 0])
        )
        options = SolveOptions(
            method=SolveMethodEnum.STABILIZED_KRYLOV, tolerance=1e-30, max_iterations=1
        )

        with self.assertRaises(NonConvergenceError) as context:
            solve_linear(assemble(problem), options=options)

        self.assertIsNotNone(context.exception.residual)

    def test_deterministic(self):
        domain = GridDomain.disk(1.0, 0.1)
        problem = EllipticProblem(
            domain,
            NONDIVERGENCE,
            CoefficientSet(dimension=2, c=-2.0),
            g=lambda x: x[:, 0],
            boundary=lambda x: x[:, 1] ** 2,
        )

        first = solve_linear(assemble(problem))
        second = solve_linear(assemble(problem))

        self.assertEqual(first.values.tobytes(), second.values.tobytes())

    def test_comparison_on_random_pairs(self):
        generator = SplitMix64(17)
        domain = GridDomain.interval(-1.0, 1.0, 0.05)
        coeffs = CoefficientSet(
            dimension=1, b=lambda x: 30 * np.cos(4 * x[:, 0]), c=lambda x: -1 - x[:, 0] ** 2
        )
        for _ in range(10):
            low_left, low_right, g_shift = generator.uniform(-1.0, 1.0, size=3)
            gap_left, gap_right, g_gap = generator.uniform(0.0, 1.0, size=3)

            lower = EllipticProblem(
                domain,
                NONDIVERGENCE,
                coeffs,
                g=g_shift + g_gap,
                boundary=lambda x, a=low_left, b=low_right: np.where(x[:, 0] < 0, a, b),
            )
            upper = EllipticProblem(
                domain,
                NONDIVERGENCE,
                coeffs,
                g=g_shift,
                boundary=lambda x, a=low_left + gap_left, b=low_right + gap_right: np.where(
                    x[:, 0] < 0, a, b
                ),
            )

            difference = solve_linear(assemble(upper)).values - solve_linear(assemble(lower)).values
            self.assertGreaterEqual(difference.min(), -1e-10)
