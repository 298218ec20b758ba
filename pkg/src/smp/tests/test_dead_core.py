import math

from django.test import SimpleTestCase
import numpy as np

from common.exceptions import PreconditionError
from smp.dead_core import dead_core_half_width, dead_core_profile
from smp.nonlinearity import linear, log_power, power


class DeadCoreProfileTestCase(SimpleTestCase):
    def test_cube_root_closed_form(self):
        # x(u) = √2·u^(1/3), so u = (x/√2)³ and u₀ = 1/(2√2) is reached at T = 1
        profile = dead_core_profile(power(1 / 3, 3.0), 1 / (2 * math.sqrt(2)), spacing=1e-4)
        x = profile.field.domain.points[:, 0]
        exact = (np.maximum(x, 0.0) / math.sqrt(2)) ** 3

        self.assertAlmostEqual(profile.half_width, 1.0, delta=1e-4)
        self.assertLess(np.max(np.abs(profile.field.values - exact)), 1e-4)
        self.assertLessEqual(profile.residual, 1e-4)

    def test_coarse_grid_is_refined_until_the_residual_is_small(self):
        # the kink at x = 0 leaves a residual of u₀·h, so h = 1e-3 needs two halvings
        profile = dead_core_profile(power(1 / 3, 3.0), 1 / (2 * math.sqrt(2)), spacing=1e-3)

        self.assertLessEqual(profile.residual, 1e-4)
        self.assertAlmostEqual(profile.field.domain.spacing, 2.5e-4, delta=1e-6)

    def test_fine_grid_is_kept(self):
        profile = dead_core_profile(power(1 / 3, 3.0), 1 / (2 * math.sqrt(2)), spacing=1e-4)

        self.assertAlmostEqual(profile.field.domain.spacing, 1e-4, delta=1e-7)

    def test_profile_vanishes_on_the_left(self):
        profile = dead_core_profile(power(1 / 3, 3.0), 1 / (2 * math.sqrt(2)), spacing=1e-3)
        x = profile.field.domain.points[:, 0]

        self.assertTrue(np.all(profile.field.values[x <= 0] == 0.0))
        self.assertGreaterEqual(profile.field.values.min(), 0.0)

    def test_linear_has_no_dead_core(self):
        with self.assertRaises(PreconditionError):
            dead_core_half_width(linear(), 1.0)

    def test_cubic_logarithm(self):
        profile = dead_core_profile(log_power(3.0), 0.1, spacing=1e-3)

        self.assertTrue(math.isfinite(profile.half_width))
        self.assertGreater(profile.half_width, 0.0)
        self.assertLessEqual(profile.residual, 1e-4)
