from django.test import SimpleTestCase
import numpy as np

from common.exceptions import DomainError, PreconditionError
from common.random import SplitMix64
from grid.domain import GridDomain
from landis.decay import (
    ComparisonEnum,
    LandisVerdictEnum,
    comparison_check,
    landis_experiment,
    measure_decay,
)
from landis.oracle import oracle_coefficients
from landis.positive_solution import ExteriorProblem, build_positive_solution
from operators.assembly import assemble
from operators.coefficients import CoefficientSet
from operators.forms import EllipticProblem, OperatorForm, OperatorFormEnum
from solver.linear import solve_linear


NONDIVERGENCE = OperatorForm(OperatorFormEnum.NONDIVERGENCE)
HALF_LINE = GridDomain.interval(2.0, 40.0, 0.01)


def _decaying_problem():
    return EllipticProblem(
        HALF_LINE,
        NONDIVERGENCE,
        oracle_coefficients(0.0, 1.0),
        boundary=lambda x: np.exp(-x[:, 0]),
    )


class MeasureDecayTestCase(SimpleTestCase):
    def test_constant(self):
        report = measure_decay(HALF_LINE.sample(lambda x: np.ones(len(x))), [4.0, 8.0, 16.0, 32.0])

        self.assertAlmostEqual(report.rate, 0.0, places=12)

    def test_exponential(self):
        psi = HALF_LINE.sample(lambda x: np.exp(-x[:, 0]))

        report = measure_decay(psi, [5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0])

        self.assertAlmostEqual(report.rate, 1.0, delta=1e-3)
        self.assertEqual(len(report.rows()), 7)

    def test_linear_has_no_exponential_rate(self):
        psi = HALF_LINE.sample(lambda x: x[:, 0] - 2)

        report = measure_decay(psi, [4.0, 8.0, 16.0, 32.0])

        self.assertAlmostEqual(report.rate, 0.0, places=9)

    def test_predicted_bound(self):
        psi = HALF_LINE.sample(lambda x: np.exp(-x[:, 0]))

        report = measure_decay(psi, [5.0, 10.0, 20.0], oracle_coefficients(0.0, 1.0), c0=1.0)

        self.assertAlmostEqual(report.predicted, 2.0)
        self.assertTrue(report.within_bound)
        self.assertTrue(report.inf_bounded)

    def test_nonpositive_interior_rejected(self):
        psi = HALF_LINE.sample(lambda x: 3.0 - x[:, 0])

        with self.assertRaises(PreconditionError):
            measure_decay(psi, [4.0, 8.0])

    def test_invalid_radii(self):
        psi = HALF_LINE.sample(lambda x: np.ones(len(x)))

        with self.assertRaises(DomainError):
            measure_decay(psi, [4.0])
        with self.assertRaises(DomainError):
            measure_decay(psi, [8.0, 4.0])
        with self.assertRaises(DomainError):
            measure_decay(psi, [4.0, 80.0])


class ComparisonCheckTestCase(SimpleTestCase):
    def _solve(self, problem, values):
        domain = problem.domain
        return solve_linear(assemble(problem.with_boundary(domain.function(values))))

    def test_random_solved_pairs_on_an_interval(self):
        domain = GridDomain.interval(0.0, 5.0, 0.05)
        problem = EllipticProblem(domain, NONDIVERGENCE, CoefficientSet(dimension=1, b=1.0, c=-1.0))
        boundary = domain.boundary
        rng = SplitMix64(11)

        for _ in range(50):
            phi = np.zeros(domain.size)
            phi[boundary] = rng.uniform(0.0, 1.0, size=int(boundary.sum()))
            delta = rng.uniform(0.1, 2.0)
            data = np.zeros(domain.size)
            data[boundary] = delta * phi[boundary] - rng.uniform(0.0, 1.0, size=int(boundary.sum()))

            psi = self._solve(problem, phi)
            u = self._solve(problem, data)

            self.assertEqual(comparison_check(u, psi, delta), ComparisonEnum.HOLDS)

    def test_random_solved_pairs_on_an_annulus(self):
        domain = GridDomain.annulus(1.0, 2.0, 0.1, angular_count=8)
        problem = EllipticProblem(domain, NONDIVERGENCE, CoefficientSet(dimension=2, c=-2.0))
        boundary = domain.boundary
        count = int(boundary.sum())
        rng = SplitMix64(12)

        for _ in range(10):
            phi = np.zeros(domain.size)
            phi[boundary] = rng.uniform(0.0, 1.0, size=count)
            data = np.zeros(domain.size)
            data[boundary] = 0.5 * phi[boundary] - rng.uniform(0.0, 0.5, size=count)

            psi = self._solve(problem, phi)
            u = self._solve(problem, data)

            self.assertEqual(comparison_check(u, psi, 0.5), ComparisonEnum.HOLDS)

    def test_boundary_not_ordered(self):
        psi = HALF_LINE.sample(lambda x: np.exp(-x[:, 0]))

        self.assertEqual(
            comparison_check(psi.scaled(2.0), psi, 1.0), ComparisonEnum.BOUNDARY_NOT_ORDERED
        )

    def test_interior_violation(self):
        domain = GridDomain.interval(0.0, 1.0, 0.1)
        psi = domain.sample(lambda x: np.ones(len(x)))
        u = domain.function(np.where(domain.boundary, 0.0, 2.0))

        self.assertEqual(comparison_check(u, psi, 1.0), ComparisonEnum.VIOLATED)

    def test_restricted_to_a_ball(self):
        psi = HALF_LINE.sample(lambda x: np.ones(len(x)))
        # ordered on [2, 10.5] only
        u = HALF_LINE.sample(lambda x: np.where(x[:, 0] <= 10.5, 0.5, 2.0))

        self.assertEqual(comparison_check(u, psi, 1.0, radius=10.0), ComparisonEnum.HOLDS)
        self.assertEqual(comparison_check(u, psi, 1.0), ComparisonEnum.BOUNDARY_NOT_ORDERED)

    def test_radius_between_nodes(self):
        domain = GridDomain.interval(0.0, 20.0, 0.1)
        psi = domain.sample(lambda x: np.ones(len(x)))
        # the last node inside B_10.07 is x = 10, whose right neighbour is outside
        u = domain.sample(lambda x: np.where(x[:, 0] < 9.95, 0.5, 2.0))

        self.assertEqual(
            comparison_check(u, psi, 1.0, radius=10.07), ComparisonEnum.BOUNDARY_NOT_ORDERED
        )
        self.assertEqual(comparison_check(u, psi, 1.0, radius=9.93), ComparisonEnum.HOLDS)

    def test_different_grids_rejected(self):
        other = GridDomain.interval(0.0, 1.0, 0.1)

        with self.assertRaises(DomainError):
            comparison_check(
                HALF_LINE.sample(lambda x: np.ones(len(x))),
                other.sample(lambda x: np.ones(len(x))),
                1.0,
            )


class LandisExperimentTestCase(SimpleTestCase):
    RADII = [4.0, 8.0, 12.0, 16.0, 20.0]

    def test_zero_solution_is_trivial(self):
        problem = EllipticProblem(HALF_LINE, NONDIVERGENCE, oracle_coefficients(0.0, 1.0))

        report = landis_experiment(problem, HALF_LINE.function(np.zeros(HALF_LINE.size)), self.RADII)

        self.assertEqual(report.verdict, LandisVerdictEnum.TRIVIAL)
        self.assertFalse(report.violated)

    def test_decaying_oracle_within_bound(self):
        problem = _decaying_problem()
        u = solve_linear(assemble(problem))
        exterior = ExteriorProblem(NONDIVERGENCE, oracle_coefficients(0.0, 1.0))
        psi = build_positive_solution(exterior, [40.0]).psi

        report = landis_experiment(problem, u, self.RADII, psi=psi, c0=1.0)

        self.assertEqual(report.verdict, LandisVerdictEnum.WITHIN_BOUND)
        self.assertAlmostEqual(report.rate, 1.0, delta=1e-3)
        self.assertAlmostEqual(report.c1, 2.0)
        self.assertEqual(len(report.comparisons), 11 * len(self.RADII))
        self.assertEqual(report.comparison_violations, 0)
        self.assertFalse(report.violated)

    def test_rate_above_a_small_constant(self):
        problem = _decaying_problem()
        u = solve_linear(assemble(problem))

        report = landis_experiment(problem, u, self.RADII, c0=0.25)

        self.assertEqual(report.verdict, LandisVerdictEnum.EXCEEDS_BOUND)
        self.assertTrue(report.violated)

    def test_spliced_field_is_not_a_solution(self):
        problem = _decaying_problem()
        u = HALF_LINE.sample(lambda x: np.where(x[:, 0] < 10.0, np.exp(-x[:, 0]), 0.0))

        report = landis_experiment(problem, u, self.RADII)

        self.assertEqual(report.verdict, LandisVerdictEnum.NOT_A_SOLUTION)
        self.assertGreater(report.residual, 1e-8)

    def test_sign_change_on_the_inner_boundary(self):
        domain = GridDomain.annulus(2.0, 8.0, 0.5, angular_count=8)
        problem = EllipticProblem(domain, NONDIVERGENCE, CoefficientSet(dimension=2))
        u = domain.sample(lambda x: x[:, 0])

        with self.assertRaises(PreconditionError):
            landis_experiment(problem, u, [2.5, 3.5])

    def test_radii_beyond_half_the_truncation(self):
        problem = _decaying_problem()
        u = solve_linear(assemble(problem))

        with self.assertRaises(DomainError):
            landis_experiment(problem, u, [10.0, 30.0])
