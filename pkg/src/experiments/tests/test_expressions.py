import math

from django.test import SimpleTestCase
import numpy as np

from common.exceptions import ConfigurationError
from experiments.expressions import (
    compile_field,
    compile_matrix,
    compile_nonlinearity,
    compile_vector,
)


class CompileFieldTestCase(SimpleTestCase):
    def test_constants(self):
        self.assertEqual(compile_field(2), 2.0)
        self.assertEqual(compile_field('2^3'), 8.0)
        self.assertAlmostEqual(compile_field('exp(1)'), math.e)
        self.assertEqual(compile_field('inf'), math.inf)

    def test_variables(self):
        points = np.array([[3.0, 4.0], [1.0, 0.0]])

        self.assertTrue(np.allclose(compile_field('r')(points), [5.0, 1.0]))
        self.assertTrue(np.allclose(compile_field('x1 - 2*x2')(points), [-5.0, 1.0]))
        self.assertTrue(np.allclose(compile_field('max(x1, x2)')(points), [4.0, 1.0]))

    def test_one_dimensional_points(self):
        points = np.array([[0.0], [1.0], [-2.0]])

        self.assertTrue(np.allclose(compile_field('cosh(x1)')(points), np.cosh(points[:, 0])))
        self.assertTrue(np.allclose(compile_field('x2 + abs(x1)')(points), [0.0, 1.0, 2.0]))

    def test_singular_values_do_not_raise(self):
        values = compile_field('r^(-1/2)')(np.array([[0.0, 0.0], [4.0, 0.0]]))

        self.assertEqual(values[0], math.inf)
        self.assertAlmostEqual(values[1], 0.5)

    def test_rejected_expressions(self):
        for text in ('y + 1', '__import__', 'x1; x2', 'x1 +', '(x1', '', 'lambda'):
            with self.assertRaises(ConfigurationError):
                compile_field(text)

    def test_nonlinearity_variable_is_not_a_field_variable(self):
        with self.assertRaises(ConfigurationError):
            compile_field('s')


class CompileVectorMatrixTestCase(SimpleTestCase):
    def test_constant_vector(self):
        self.assertEqual(compile_vector([1, '2']), (1.0, 2.0))
        self.assertEqual(compile_vector(0), 0.0)

    def test_vector_field(self):
        points = np.array([[1.0, 2.0], [3.0, 4.0]])

        values = compile_vector(['x2', 1])(points)

        self.assertEqual(values.shape, (2, 2))
        self.assertTrue(np.allclose(values, [[2.0, 1.0], [4.0, 1.0]]))

    def test_matrix(self):
        self.assertEqual(compile_matrix([[1, 0], [0, 2]]), ((1.0, 0.0), (0.0, 2.0)))

        values = compile_matrix([['1 + x1', 0], [0, 1]])(np.array([[1.0, 0.0]]))

        self.assertEqual(values.shape, (1, 2, 2))
        self.assertTrue(np.allclose(values[0], [[2.0, 0.0], [0.0, 1.0]]))


class CompileNonlinearityTestCase(SimpleTestCase):
    def test_log_power(self):
        f = compile_nonlinearity('s*abs(ln(s))^2')

        self.assertAlmostEqual(float(f(np.array([math.e]))[0]), math.e)

    def test_field_variables_rejected(self):
        with self.assertRaises(ConfigurationError):
            compile_nonlinearity('x1*s')
