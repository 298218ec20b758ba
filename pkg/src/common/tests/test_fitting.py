import math

from django.test import SimpleTestCase
import numpy as np

from common.exceptions import DomainError
from common.fitting import fit_linear, fit_log_linear
from common.random import SplitMix64


class FitLogLinearTestCase(SimpleTestCase):
    def test_exponential_samples_give_exact_slope(self):
        xs = np.linspace(0.0, 3.0, 7)
        result = fit_log_linear(zip(xs, np.exp(2.0 * xs)))

        self.assertAlmostEqual(result.slope, 2.0, places=12)
        self.assertAlmostEqual(result.intercept, 0.0, places=12)
        self.assertEqual(result.count, 7)

    def test_constant_samples(self):
        result = fit_log_linear([(x, 5.0) for x in range(4)])

        self.assertAlmostEqual(result.slope, 0.0, places=12)
        self.assertAlmostEqual(result.intercept, math.log(5.0), places=12)

    def test_noisy_samples(self):
        generator = SplitMix64(20240101)
        xs = np.linspace(0.0, 2.0, 20)
        noise = generator.uniform(-0.01, 0.01, size=20)
        ys = np.exp(2.0 * xs) * (1.0 + noise)

        result = fit_log_linear(zip(xs, ys))

        self.assertLess(abs(result.slope - 2.0), 0.05)
        self.assertGreaterEqual(result.residual, 0.0)

    def test_nonpositive_value_rejected(self):
        with self.assertRaises(DomainError):
            fit_log_linear([(0.0, 1.0), (1.0, 0.0)])

    def test_single_point_rejected(self):
        with self.assertRaises(DomainError):
            fit_log_linear([(0.0, 1.0)])

    def test_fit_linear_length_mismatch(self):
        with self.assertRaises(DomainError):
            fit_linear([0.0, 1.0], [1.0])
