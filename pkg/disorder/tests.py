import numpy as np
from django.test import SimpleTestCase
from scipy import stats

from .sampling import DisorderSpec, inverse_cdf, sample_couplings, sample_ensemble


class InverseCdfTests(SimpleTestCase):

    def test_upper_endpoint(self):
        self.assertAlmostEqual(inverse_cdf(1.0, DisorderSpec(0.8, 1.0)), 1.0)

    def test_alpha_zero_is_uniform(self):
        self.assertAlmostEqual(inverse_cdf(0.25, DisorderSpec(0.0, 1.0)), 0.25)

    def test_power_law_quantile(self):
        self.assertAlmostEqual(inverse_cdf(0.5, DisorderSpec(0.8, 1.0)), 0.03125)

    def test_support_scales_couplings(self):
        self.assertAlmostEqual(inverse_cdf(0.5, DisorderSpec(0.8, 2.0)), 0.0625)


class DisorderSpecTests(SimpleTestCase):

    def test_rejects_non_normalizable_exponent(self):
        with self.assertRaises(ValueError):
            DisorderSpec(exponent_alpha=1.0)

    def test_rejects_nonpositive_support(self):
        with self.assertRaises(ValueError):
            DisorderSpec(support_max=0.0)

    def test_rejects_negative_seed(self):
        with self.assertRaises(ValueError):
            DisorderSpec(master_seed=-1)


class SampleCouplingsTests(SimpleTestCase):

    def setUp(self):
        self.spec = DisorderSpec(0.8, 1.0, master_seed=12345)

    def test_same_index_same_couplings(self):
        first = sample_couplings(self.spec, 100, 7)
        second = sample_couplings(self.spec, 100, 7)
        np.testing.assert_array_equal(first, second)

    def test_indices_give_independent_streams(self):
        self.assertFalse(np.array_equal(
            sample_couplings(self.spec, 100, 0),
            sample_couplings(self.spec, 100, 1),
        ))

    def test_master_seed_changes_stream(self):
        other = DisorderSpec(0.8, 1.0, master_seed=54321)
        self.assertFalse(np.array_equal(
            sample_couplings(self.spec, 100, 0),
            sample_couplings(other, 100, 0),
        ))

    def test_couplings_inside_support(self):
        couplings = sample_couplings(self.spec, 10000, 3)
        self.assertEqual(couplings.shape, (10000,))
        self.assertTrue(np.all(couplings > 0.0))
        self.assertTrue(np.all(couplings <= 1.0))

    def test_batches_do_not_change_values(self):
        batch = sample_ensemble(self.spec, 64, [3, 4, 5])
        for offset, couplings in enumerate(batch):
            np.testing.assert_array_equal(couplings, sample_couplings(self.spec, 64, 3 + offset))

    def test_odd_or_short_chains_rejected(self):
        with self.assertRaises(ValueError):
            sample_couplings(self.spec, 101, 0)
        with self.assertRaises(ValueError):
            sample_couplings(self.spec, 2, 0)

    def test_negative_index_rejected(self):
        with self.assertRaises(ValueError):
            sample_couplings(self.spec, 10, -1)

    def test_empirical_cdf_matches_power_law(self):
        alpha = self.spec.exponent_alpha
        samples = np.concatenate(sample_ensemble(self.spec, 20000, range(50)))
        self.assertEqual(samples.size, 10 ** 6)
        result = stats.kstest(samples, lambda j: np.power(np.clip(j, 0.0, 1.0), 1.0 - alpha))
        self.assertLess(result.statistic, 0.005)
