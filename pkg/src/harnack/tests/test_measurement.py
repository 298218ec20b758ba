from dataclasses import replace
import math

from django.test import SimpleTestCase
import numpy as np

from common.exceptions import DomainError, PreconditionError
from harnack.calibration import calibrate_harnack, held_out_violations
from harnack.measurement import HarnackMeasurement, fit_harnack_rate, measure_harnack
from harnack.regions import RegionShapeEnum, harnack_regions
from operators.coefficients import CoefficientSet
from operators.constants import compute_A
from operators.forms import EllipticProblem, OperatorForm, OperatorFormEnum


NONDIVERGENCE = OperatorForm(OperatorFormEnum.NONDIVERGENCE)


def _interval_problem(R, coefficients, boundary, spacing=0.01):
    inner, outer = harnack_regions(RegionShapeEnum.BALL, R, 1)
    return inner, EllipticProblem(outer.domain(spacing), NONDIVERGENCE, coefficients, boundary=boundary)


class MeasureHarnackTestCase(SimpleTestCase):
    def test_constant_solution(self):
        region, problem = _interval_problem(4.0, CoefficientSet(dimension=1), 1.0)

        measurement = measure_harnack(problem, region)

        self.assertAlmostEqual(measurement.sup, 1.0, places=10)
        self.assertAlmostEqual(measurement.inf, 1.0, places=10)
        self.assertAlmostEqual(measurement.ratio, 1.0, places=10)
        self.assertFalse(measurement.violated)

    def test_cosh_ratio_and_rate(self):
        measurements = []
        for R in (4.0, 6.0, 8.0):
            region, problem = _interval_problem(
                R,
                CoefficientSet(dimension=1, c=-1.0),
                lambda x: np.cosh(x[:, 0]),
            )
            measurements.append(measure_harnack(problem, region))

        last = measurements[-1]
        self.assertAlmostEqual(last.ratio / math.cosh(8.0), 1.0, delta=1e-3)
        self.assertAlmostEqual(last.A, 2.0)
        self.assertAlmostEqual(fit_harnack_rate(measurements).slope, 1.0, delta=1e-2)
        self.assertGreater(last.ratio, 1.0)
        self.assertTrue(last.composition_holds)
        self.assertFalse(last.violated)

    def test_drift_example_rate(self):
        # u'' − 2bu' − cu = 0 with b = 3, c = 4 has the solution e^{Dx}
        D = 3 + math.sqrt(13)
        coefficients = CoefficientSet(dimension=1, b=-6.0, c=-4.0)
        region, problem = _interval_problem(4.0, coefficients, lambda x: np.exp(D * x[:, 0]))

        measurement = measure_harnack(problem, region)

        self.assertAlmostEqual(measurement.rate, D, delta=2e-2)
        self.assertAlmostEqual(measurement.extremal_distance, 8.0)
        self.assertLessEqual(measurement.rate, measurement.c0 * measurement.A)
        self.assertAlmostEqual(measurement.A, compute_A(coefficients, problem.domain))

    def test_negative_solution_rejected(self):
        region, problem = _interval_problem(4.0, CoefficientSet(dimension=1), 0.0)
        u = problem.domain.function(-np.ones(problem.domain.size))

        with self.assertRaises(PreconditionError):
            measure_harnack(problem, region, u=u)

    def test_invalid_epsilon(self):
        region, problem = _interval_problem(4.0, CoefficientSet(dimension=1), 1.0)

        with self.assertRaises(DomainError):
            measure_harnack(problem, region, epsilon=0.0)

    def test_chain_log_bound(self):
        region, problem = _interval_problem(4.0, CoefficientSet(dimension=1), 1.0)
        measurement = measure_harnack(problem, region, epsilon=0.5)

        self.assertAlmostEqual(
            measurement.chain_log_bound(53, 27, math.e), 2 * math.log(53) + 27
        )


def _measurement(R, A, sup, inf, epsilon_integral=1.0):
    return HarnackMeasurement(
        R=R,
        A=A,
        dimension=1,
        p=math.inf,
        epsilon=0.5,
        sup=sup,
        inf=inf,
        epsilon_integral=epsilon_integral,
        epsilon_integral_ul=2.0,
        forcing=0.0,
        c0=1.0,
        local_max_c=1.0,
        extremal_distance=R,
    )


class CalibrationTestCase(SimpleTestCase):
    def test_calibrated_constants(self):
        training = [_measurement(1.0, 1.0, math.e, 1.0), _measurement(2.0, 1.0, math.e, 1.0)]

        constants = calibrate_harnack(training)

        self.assertAlmostEqual(constants.c0, 1.001)
        self.assertAlmostEqual(constants.local_max_c, math.e / 2 * 1.001)
        self.assertEqual(constants.training_size, 2)
        self.assertEqual(held_out_violations(training, constants), [])

    def test_held_out_violations(self):
        constants = calibrate_harnack([_measurement(1.0, 1.0, math.e, 1.0)])
        held_out = [_measurement(1.0, 1.0, math.exp(3), 1.0), _measurement(1.0, 1.0, 1.5, 1.0)]

        violations = held_out_violations(held_out, constants)

        self.assertEqual(len(violations), 1)
        self.assertEqual(violations[0].sup, math.exp(3))

    def test_empty_training_rejected(self):
        with self.assertRaises(DomainError):
            calibrate_harnack([])


class CompositionTestCase(SimpleTestCase):
    def test_composed_bound(self):
        measurement = _measurement(1.0, 2.0, math.e, 1.0)

        # C·A^(n/ε)·e^(C₀AR)·inf with n/ε = 2
        self.assertAlmostEqual(measurement.composed_bound, 4 * math.exp(2))
        self.assertTrue(measurement.composition_holds)

    def test_sup_above_the_composed_bound(self):
        measurement = _measurement(1.0, 2.0, math.exp(4), 1.0)

        self.assertFalse(measurement.composition_holds)
        self.assertTrue(measurement.harnack_violated)

    def test_tiny_constants_break_the_composition(self):
        measurement = replace(_measurement(1.0, 1.0, 2.0, 1.0), c0=1e-9, local_max_c=1e-9)

        self.assertLess(measurement.composed_bound, 1e-8)
        self.assertFalse(measurement.composition_holds)

    def test_vanishing_local_max_constant(self):
        measurement = replace(_measurement(1.0, 1.0, 2.0, 1.0), local_max_c=0.0)

        self.assertEqual(measurement.composed_bound, 0.0)
        self.assertFalse(measurement.composition_holds)
