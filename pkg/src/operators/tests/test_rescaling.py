import math

from django.test import SimpleTestCase
import numpy as np
from scipy import integrate

from common.exceptions import DomainError
from common.random import SplitMix64
from grid.domain import GridDomain
from operators.coefficients import CoefficientSet
from operators.rescaling import rescale, rescaling_factors


def _point_value(field, y):
    return float(np.ravel(field(np.array([[y]])))[0])


class RescaleTestCase(SimpleTestCase):
    def setUp(self):
        self.domain = GridDomain.interval(-2.0, 2.0, 0.01)

    def test_constant_drift_scales_linearly(self):
        coeffs = CoefficientSet(dimension=1, b=1.0)
        rescaled, _g = rescale(coeffs, 0.0, [0.0], 0.1, self.domain)
        sampled = rescaled.sample(self.domain)

        self.assertTrue(np.allclose(sampled.b, 0.1))

    def test_constant_zero_order_term_scales_quadratically(self):
        coeffs = CoefficientSet(dimension=1, c=1.0)
        rescaled, g = rescale(coeffs, 1.0, [0.0], 0.1, self.domain)
        sampled = rescaled.sample(self.domain)

        self.assertTrue(np.allclose(sampled.c, 0.01))
        self.assertAlmostEqual(float(g), 0.01)

    def test_singular_drift_norm_identity(self):
        q, r, x0 = 3.0, 0.25, 1.0
        coeffs = CoefficientSet(dimension=1, b=lambda x: np.abs(x[:, 0]) ** -0.5, q=q)
        rescaled, _g = rescale(coeffs, 0.0, [x0], r, self.domain)

        rescaled_norm = integrate.quad(
            lambda y: abs(_point_value(rescaled.b, y)) ** q, -2.0, 2.0, epsabs=1e-12
        )[0] ** (1 / q)
        original_norm = integrate.quad(
            lambda x: abs(x) ** (-0.5 * q), x0 - 2 * r, x0 + 2 * r, epsabs=1e-12
        )[0] ** (1 / q)
        factor, _ = rescaling_factors(r, q, math.inf, 1)

        self.assertAlmostEqual(rescaled_norm, factor * original_norm, delta=1e-4)

    def test_randomized_zero_order_identity(self):
        generator = SplitMix64(11)
        for _ in range(5):
            x0 = generator.uniform(-0.8, 0.8)
            r = generator.uniform(0.1, 0.5)
            p = generator.uniform(1.0, 4.0)
            coeffs = CoefficientSet(
                dimension=1, c=lambda x: np.exp(x[:, 0]) + 1.0, p=p
            )
            rescaled, _g = rescale(coeffs, 0.0, [x0], r, self.domain)

            left = integrate.quad(
                lambda y: abs(_point_value(rescaled.c, y)) ** p, -2.0, 2.0
            )[0] ** (1 / p)
            right = integrate.quad(
                lambda x: (math.exp(x) + 1.0) ** p, x0 - 2 * r, x0 + 2 * r
            )[0] ** (1 / p)
            _, factor = rescaling_factors(r, math.inf, p, 1)

            self.assertAlmostEqual(left, factor * right, delta=1e-7 * max(1.0, right))

    def test_singularities_follow_the_rescaling(self):
        coeffs = CoefficientSet(dimension=1, singularities=((0.5,),))
        rescaled, _g = rescale(coeffs, 0.0, [1.0], 0.25, self.domain)

        self.assertAlmostEqual(rescaled.singularities[0][0], -2.0)

    def test_ball_outside_domain(self):
        with self.assertRaises(DomainError):
            rescale(CoefficientSet(dimension=1), 0.0, [1.5], 0.5, self.domain)
