import math

from django.test import SimpleTestCase

from common.exceptions import DomainError
from solver.quadrature import ConvergenceEnum, QuadratureModeEnum, quad_singular


class QuadSingularTestCase(SimpleTestCase):
    def test_inverse_square_root(self):
        result = quad_singular(lambda s: s**-0.5, 1.0)

        self.assertEqual(result.status, ConvergenceEnum.CONVERGES)
        self.assertAlmostEqual(result.value, 2.0, delta=1e-4)

    def test_inverse_is_divergent(self):
        result = quad_singular(lambda s: 1 / s, 1.0, QuadratureModeEnum.DIVERGENCE_CLASS)

        self.assertEqual(result.status, ConvergenceEnum.DIVERGES)
        self.assertTrue(math.isnan(result.value))

    def test_logarithmic_singularity_converges(self):
        result = quad_singular(lambda s: 1 / (s * abs(math.log(s)) ** 1.5), 0.5)

        self.assertTrue(result.converges)
        self.assertAlmostEqual(result.value, 2 / math.sqrt(math.log(2)), delta=1e-3)
        self.assertAlmostEqual(result.exponent, 0.5, delta=1e-3)

    def test_borderline_logarithm_diverges(self):
        result = quad_singular(lambda s: 1 / (s * abs(math.log(s)) ** 0.5), 0.5)

        self.assertEqual(result.status, ConvergenceEnum.DIVERGES)

    def test_integrand_vanishing_near_zero(self):
        result = quad_singular(lambda s: max(s - 0.1, 0.0), 1.0)

        self.assertTrue(result.converges)
        self.assertAlmostEqual(result.value, 0.405, places=8)

    def test_partial_sums_are_monotone(self):
        result = quad_singular(lambda s: s**-0.75, 2.0)

        self.assertEqual(len(result.partial_sums), 16)
        self.assertEqual(result.partial_sums, sorted(result.partial_sums))

    def test_nonpositive_limit_rejected(self):
        with self.assertRaises(DomainError):
            quad_singular(lambda s: 1.0, 0.0)
