import math

from django.test import SimpleTestCase
import numpy as np

from common.exceptions import DomainError
from grid.domain import GridDomain, GridFunction, ShapeEnum
from grid.stencils import local_gradient, local_hessian, region_boundary


class GridDomainTestCase(SimpleTestCase):
    def test_interval_nodes_and_boundary(self):
        domain = GridDomain.interval(0.0, 1.0, 0.1)

        self.assertEqual(domain.size, 11)
        self.assertEqual(domain.boundary.sum(), 2)
        self.assertAlmostEqual(domain.total_volume, 1.0)

    def test_box_volume(self):
        domain = GridDomain.box([0.0, 0.0], [2.0, 1.0], 0.1)

        self.assertEqual(domain.size, 21 * 11)
        self.assertAlmostEqual(domain.total_volume, 2.0)

    def test_disk_volume_and_angular_count(self):
        domain = GridDomain.disk(2.0, 0.1)
        rings, count = domain.counts

        self.assertEqual(count % 2, 0)
        self.assertLessEqual(2 * math.pi * 2.0 / count, 0.1 + 1e-12)
        self.assertAlmostEqual(domain.total_volume, math.pi * 4.0, places=10)
        self.assertAlmostEqual(domain.radii[-1], 2.0)
        self.assertEqual(domain.boundary.sum(), count)

    def test_annulus_volume(self):
        domain = GridDomain.annulus(1.0, 2.0, 0.05)

        self.assertAlmostEqual(domain.total_volume, math.pi * 3.0, places=10)
        self.assertEqual(domain.shape, ShapeEnum.ANNULUS)

    def test_nonpositive_spacing_rejected(self):
        with self.assertRaises(DomainError):
            GridDomain.interval(0.0, 1.0, 0.0)

    def test_grid_function_rejects_wrong_length(self):
        domain = GridDomain.interval(0.0, 1.0, 0.5)

        with self.assertRaises(DomainError):
            GridFunction(np.zeros(2), domain)

    def test_grid_function_rejects_nonfinite(self):
        domain = GridDomain.interval(0.0, 1.0, 0.5)

        with self.assertRaises(DomainError):
            GridFunction(np.array([0.0, np.nan, 1.0]), domain)

    def test_contains_ball(self):
        domain = GridDomain.annulus(1.0, 5.0, 0.5)

        self.assertTrue(domain.contains_ball([3.0, 0.0], 1.5))
        self.assertFalse(domain.contains_ball([3.0, 0.0], 2.5))


class StencilTestCase(SimpleTestCase):
    def test_region_boundary_counts_diagonal_neighbours(self):
        domain = GridDomain.box([-2.0, -2.0], [2.0, 2.0], 0.5)
        region = domain.node_norms <= 1.2

        boundary = region_boundary(domain, region)

        self.assertEqual(int(region.sum()), 21)
        # only the center and its four axis neighbours keep all eight neighbours inside
        self.assertEqual(int(boundary.sum()), 16)
        self.assertFalse(boundary[domain.nearest_node([0.0, 0.0])])
        self.assertTrue(boundary[domain.nearest_node([0.5, 0.5])])

    def test_polar_hessian_of_radial_quadratic(self):
        domain = GridDomain.disk(1.0, 0.1)
        u = domain.sample(lambda x: (x**2).sum(axis=1))

        hessian = local_hessian(u)[domain.interior]

        np.testing.assert_allclose(hessian[:, 0, 0], 2.0, atol=1e-9)
        np.testing.assert_allclose(hessian[:, 1, 1], 2.0, atol=1e-9)
        np.testing.assert_allclose(hessian[:, 0, 1], 0.0, atol=1e-9)

    def test_box_hessian_of_product(self):
        domain = GridDomain.box([-1.0, -1.0], [1.0, 1.0], 0.1)
        u = domain.sample(lambda x: x[:, 0] * x[:, 1])

        hessian = local_hessian(u)[domain.interior]

        np.testing.assert_allclose(hessian[:, 0, 1], 1.0, atol=1e-9)
        np.testing.assert_allclose(hessian[:, 0, 0], 0.0, atol=1e-9)

    def test_polar_gradient_of_linear_function(self):
        domain = GridDomain.annulus(1.0, 2.0, 0.05)
        u = domain.sample(lambda x: x[:, 0])
        gradient = local_gradient(u)[domain.interior]
        theta = np.arctan2(domain.points[:, 1], domain.points[:, 0])[domain.interior]

        # centered differences of cos θ in θ carry an O(Δθ²) error
        np.testing.assert_allclose(gradient[:, 0], np.cos(theta), atol=1e-9)
        np.testing.assert_allclose(gradient[:, 1], -np.sin(theta), atol=1e-3)
