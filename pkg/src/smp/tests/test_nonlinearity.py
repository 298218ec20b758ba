import math

from django.test import SimpleTestCase
import numpy as np

from common.exceptions import DomainError
from smp.nonlinearity import NonlinearityKindEnum, from_callable, linear, log_power, power


class NonlinearityTestCase(SimpleTestCase):
    def test_extension_by_zero(self):
        f = log_power(2.0)

        self.assertEqual(f(-1.0), 0.0)
        self.assertEqual(f(0.0), 0.0)
        self.assertEqual(f(np.array([-2.0, 0.0])).tolist(), [0.0, 0.0])
        self.assertAlmostEqual(f(math.exp(-1)), math.exp(-1))

    def test_log_power_primitive(self):
        s = 0.5
        L = math.log(s)
        # ∫₀^s t ln²t dt = s²/2·(ln²s − ln s + 1/2)
        expected = s**2 / 2 * (L**2 - L + 0.5)

        self.assertAlmostEqual(log_power(2.0).primitive(s), expected, places=10)

    def test_closed_form_primitives(self):
        self.assertAlmostEqual(power(1 / 3, 3.0).primitive(1.0), 9 / 4)
        self.assertAlmostEqual(linear(2.0).primitive(3.0), 9.0)
        self.assertEqual(linear().primitive(-1.0), 0.0)

    def test_scaled(self):
        f = power(0.5).scaled(4.0)

        self.assertAlmostEqual(f(4.0), 8.0)
        self.assertEqual(f.kind, NonlinearityKindEnum.POWER)

    def test_expression_must_vanish_at_zero(self):
        with self.assertRaises(DomainError):
            from_callable(lambda s: s + 1)

    def test_expression_defined_as_a_limit(self):
        f = from_callable(lambda s: s * np.log(s) ** 2, label='s ln²s')

        self.assertEqual(f(0.0), 0.0)
        self.assertEqual(str(f), 's ln²s')

    def test_nonpositive_power_rejected(self):
        with self.assertRaises(DomainError):
            power(0.0)
