import math

from django.test import SimpleTestCase
import numpy as np

from common.exceptions import DomainError
from common.random import SplitMix64
from operators.pucci import pucci_apply, pucci_dual


def _random_symmetric(generator, count):
    entries = generator.uniform(-5.0, 5.0, size=3 * count).reshape(count, 3)
    matrices = np.empty((count, 2, 2))
    matrices[:, 0, 0] = entries[:, 0]
    matrices[:, 1, 1] = entries[:, 1]
    matrices[:, 0, 1] = matrices[:, 1, 0] = entries[:, 2]
    return matrices


class PucciApplyTestCase(SimpleTestCase):
    def test_indefinite_diagonal(self):
        X = np.diag([1.0, -1.0])

        self.assertAlmostEqual(float(pucci_apply(X, 1.0, 2.0, 1)), 1.0)
        self.assertAlmostEqual(float(pucci_apply(X, 1.0, 2.0, -1)), -1.0)

    def test_identity(self):
        self.assertAlmostEqual(float(pucci_apply(np.eye(2), 0.5, 3.0, 1)), 6.0)

    def test_zero_eigenvalue_contributes_nothing(self):
        X = np.diag([0.0, 2.0])

        self.assertAlmostEqual(float(pucci_apply(X, 1.0, 3.0, 1)), 6.0)
        self.assertAlmostEqual(float(pucci_apply(X, 1.0, 3.0, -1)), 2.0)

    def test_matches_closed_form_eigenvalues(self):
        lam, Lam = 0.7, 2.5
        matrices = _random_symmetric(SplitMix64(3), 500)
        a, d, b = matrices[:, 0, 0], matrices[:, 1, 1], matrices[:, 0, 1]
        half_trace = (a + d) / 2
        radius = np.sqrt(((a - d) / 2) ** 2 + b**2)
        mu = np.stack([half_trace - radius, half_trace + radius], axis=1)
        expected = Lam * np.where(mu > 0, mu, 0).sum(axis=1) + lam * np.where(
            mu < 0, mu, 0
        ).sum(axis=1)

        self.assertTrue(
            np.allclose(pucci_apply(matrices, lam, Lam, 1), expected, rtol=1e-12, atol=1e-12)
        )

    def test_nonsymmetric_rejected(self):
        with self.assertRaises(DomainError):
            pucci_apply(np.array([[1.0, 2.0], [0.0, 1.0]]), 1.0, 2.0, 1)

    def test_invalid_ellipticity_rejected(self):
        with self.assertRaises(DomainError):
            pucci_apply(np.eye(2), 2.0, 1.0, 1)


class PucciPropertiesTestCase(SimpleTestCase):
    def setUp(self):
        generator = SplitMix64(2024)
        self.X = _random_symmetric(generator, 10_000)
        self.Y = _random_symmetric(generator, 10_000)
        self.lam, self.Lam = 0.5, 2.0

    def test_subadditivity_of_maximal_operator(self):
        total = pucci_apply(self.X + self.Y, self.lam, self.Lam, 1)
        parts = pucci_apply(self.X, self.lam, self.Lam, 1) + pucci_apply(
            self.Y, self.lam, self.Lam, 1
        )

        self.assertTrue(np.all(total <= parts + 1e-10))

    def test_superadditivity_of_minimal_operator(self):
        total = pucci_apply(self.X + self.Y, self.lam, self.Lam, -1)
        parts = pucci_apply(self.X, self.lam, self.Lam, -1) + pucci_apply(
            self.Y, self.lam, self.Lam, -1
        )

        self.assertTrue(np.all(total >= parts - 1e-10))

    def test_minimal_below_maximal(self):
        self.assertTrue(
            np.all(
                pucci_apply(self.X, self.lam, self.Lam, -1)
                <= pucci_apply(self.X, self.lam, self.Lam, 1) + 1e-12
            )
        )

    def test_positive_homogeneity(self):
        for t in (0.25, 3.0, 1e3):
            scaled = pucci_apply(t * self.X, self.lam, self.Lam, 1)
            expected = t * pucci_apply(self.X, self.lam, self.Lam, 1)

            self.assertTrue(np.allclose(scaled, expected, rtol=1e-12, atol=1e-9 * t))

    def test_duality(self):
        self.assertTrue(
            np.allclose(
                pucci_dual(self.X, self.lam, self.Lam, 1),
                pucci_apply(self.X, self.lam, self.Lam, -1),
                rtol=0,
                atol=1e-12 * math.sqrt(50),
            )
        )
