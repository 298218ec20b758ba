from django.test import SimpleTestCase

from common.random import SplitMix64


class SplitMix64TestCase(SimpleTestCase):
    def test_reference_output_for_zero_seed(self):
        generator = SplitMix64(0)

        self.assertEqual(int(generator.next_uint64()), 0xE220A8397B1DCDAF)
        self.assertEqual(int(generator.next_uint64()), 0x6E789E6AA1B965F4)

    def test_same_seed_same_stream(self):
        first = SplitMix64(42).uniform(size=5)
        second = SplitMix64(42).uniform(size=5)

        self.assertEqual(first.tolist(), second.tolist())

    def test_uniform_range(self):
        values = SplitMix64(7).uniform(-2.0, 3.0, size=200)

        self.assertTrue(((values >= -2.0) & (values < 3.0)).all())
