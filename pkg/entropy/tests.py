import math
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
from django.test import SimpleTestCase

from blocks.crossings import CrossingTable
from .table import CSV_COLUMNS, EntropyTable, LadderMismatchError, read_entropy_csv
from .tsallis import (
    EntropyOverflowError,
    pseudo_additive_compose,
    tsallis_entropy_of_counts,
    tsallis_entropy_of_spectrum,
    tsallis_singlet_entropy,
)

Q_GRID = np.round(np.arange(-2.0, 2.0 + 1e-9, 0.1), 10)


def crossings(*counts, sizes=None):
    counts = np.atleast_2d(np.asarray(counts, dtype=np.int64))
    sizes = sizes or tuple(range(1, counts.shape[1] + 1))
    return CrossingTable(sizes=sizes, counts=counts, anchors=(0,))


class SingletEntropyTests(SimpleTestCase):

    def test_pure_block(self):
        for q in (-1.5, 0.0, 1.0, 2.0):
            self.assertEqual(tsallis_singlet_entropy(0, q, 1), 0.0)

    def test_one_singlet_at_q_zero(self):
        self.assertAlmostEqual(tsallis_singlet_entropy(1, 0.0, 1), 1.0)

    def test_von_neumann_limit(self):
        self.assertAlmostEqual(tsallis_singlet_entropy(3, 1.0, 2), 3.0 * math.log(3.0))

    def test_continuous_at_q_one(self):
        for n in (1, 5, 20):
            limit = n * math.log(4.0)
            for q in (1.0 - 1e-6, 1.0 + 1e-6):
                self.assertAlmostEqual(tsallis_singlet_entropy(n, q, 3), limit, delta=1e-4 * limit)

    def test_pseudo_additivity(self):
        for two_s in (1, 2, 3):
            for q in Q_GRID:
                for n_a in range(0, 21):
                    for n_b in range(0, 21 - n_a):
                        composed = pseudo_additive_compose(
                            tsallis_singlet_entropy(n_a, q, two_s),
                            tsallis_singlet_entropy(n_b, q, two_s),
                            q,
                        )
                        direct = tsallis_singlet_entropy(n_a + n_b, q, two_s)
                        self.assertLessEqual(abs(composed - direct), 1e-12 * max(1.0, abs(direct)))

    def test_two_singlets_from_one(self):
        for q in Q_GRID:
            one = tsallis_singlet_entropy(1, q, 1)
            self.assertAlmostEqual(tsallis_singlet_entropy(2, q, 1), 2 * one + (1 - q) * one ** 2)

    def test_nonincreasing_in_q(self):
        for n in (1, 2, 7):
            values = [tsallis_singlet_entropy(n, q, 2) for q in Q_GRID]
            self.assertTrue(all(b <= a + 1e-12 for a, b in zip(values, values[1:])))

    def test_overflow_is_reported(self):
        with self.assertRaises(EntropyOverflowError) as ctx:
            tsallis_singlet_entropy(2000, -2.0, 3)
        self.assertEqual(ctx.exception.n, 2000)
        self.assertIn('n=2000', str(ctx.exception))

    def test_negative_count(self):
        with self.assertRaises(ValueError):
            tsallis_singlet_entropy(-1, 0.5, 1)

    def test_vectorized_matches_scalar(self):
        counts = np.array([0, 1, 4, 9])
        for q in (-1.4, 0.3, 1.0):
            expected = [tsallis_singlet_entropy(int(n), q, 2) for n in counts]
            np.testing.assert_allclose(tsallis_entropy_of_counts(counts, q, 2), expected, rtol=1e-14)


class SpectrumEntropyTests(SimpleTestCase):

    def test_maximally_mixed_qubit(self):
        self.assertAlmostEqual(tsallis_entropy_of_spectrum([0.5, 0.5], 2.0), 0.5)
        self.assertAlmostEqual(tsallis_entropy_of_spectrum([0.5, 0.5], 1.0), math.log(2.0))

    def test_zero_eigenvalues_ignored(self):
        self.assertAlmostEqual(tsallis_entropy_of_spectrum([1.0, 0.0, 1e-18], -1.5), 0.0)


class EntropyTableTests(SimpleTestCase):

    def test_two_sample_mean(self):
        table = EntropyTable([1.0], [2], two_s=1)
        table.accumulate(crossings([0]))
        table.accumulate(crossings([2]))
        self.assertEqual(table.count, 2)
        self.assertAlmostEqual(table.mean[0, 0], math.log(2.0))
        self.assertAlmostEqual(table.stderr[0, 0], math.log(2.0))

    def test_single_sample_has_zero_stderr(self):
        table = EntropyTable([0.5], [2], two_s=1)
        table.accumulate(crossings([3]))
        self.assertEqual(table.stderr[0, 0], 0.0)

    def test_merge_equals_serial_accumulation(self):
        rng = np.random.default_rng(3)
        samples = [crossings(*rng.integers(0, 8, size=4)) for _ in range(30)]
        q_values = [-1.0, 0.0, 1.0]

        serial = EntropyTable(q_values, (1, 2, 3, 4), 2)
        part_a = EntropyTable(q_values, (1, 2, 3, 4), 2)
        part_b = EntropyTable(q_values, (1, 2, 3, 4), 2)
        for index, sample in enumerate(samples):
            serial.accumulate(sample)
            (part_a if index < 12 else part_b).accumulate(sample)

        merged = part_a.merge(part_b)
        self.assertEqual(merged.count, serial.count)
        np.testing.assert_allclose(merged.mean, serial.mean, rtol=1e-12)
        np.testing.assert_allclose(merged.m2, serial.m2, rtol=1e-10)

    def test_merge_with_empty_table(self):
        table = EntropyTable([0.0], [1], 1)
        table.accumulate(crossings([1]))
        merged = EntropyTable([0.0], [1], 1).merge(table)
        self.assertEqual(merged.count, 1)
        self.assertAlmostEqual(merged.mean[0, 0], 1.0)

    def test_anchor_average(self):
        table = EntropyTable([1.0], [4], two_s=1)
        table.accumulate(CrossingTable(sizes=(4,), counts=np.array([[0], [2]]), anchors=(0, 8)))
        self.assertAlmostEqual(table.mean[0, 0], math.log(2.0))

    def test_mismatched_ladder(self):
        table = EntropyTable([1.0], [2, 4], 1)
        with self.assertRaises(LadderMismatchError):
            table.accumulate(crossings([1, 2, 3]))
        with self.assertRaises(LadderMismatchError):
            table.merge(EntropyTable([0.5], [2, 4], 1))

    def test_overflow_names_block_size(self):
        table = EntropyTable([-2.0], [8, 64], two_s=3)
        with self.assertRaises(EntropyOverflowError) as ctx:
            table.accumulate(crossings([1, 2000], sizes=(8, 64)))
        self.assertEqual(ctx.exception.block_size, 64)
        self.assertIn('L=64', str(ctx.exception))

    def test_csv_schema(self):
        table = EntropyTable([-1.0, 1.0], [8, 16], 1)
        table.accumulate(crossings([1, 2], sizes=(8, 16)))
        table.accumulate(crossings([2, 2], sizes=(8, 16)))
        with tempfile.TemporaryDirectory() as tmp:
            path = table.write_csv(Path(tmp) / 'entropy.csv')
            with open(path) as handle:
                self.assertEqual(handle.readline().strip(), ','.join(CSV_COLUMNS))
            frame = read_entropy_csv(path)
        self.assertEqual(len(frame), 4)
        self.assertTrue((frame['M'] == 2).all())
        row = frame[(frame['q'] == 1.0) & (frame['L'] == 8)].iloc[0]
        self.assertAlmostEqual(row['mean'], 1.5 * math.log(2.0), places=10)

    def test_state_resumes_accumulation(self):
        table = EntropyTable([0.5], [1, 2], 1)
        table.accumulate(crossings([1, 0]))
        restored = EntropyTable.from_state(table.state())
        table.accumulate(crossings([1, 2]))
        restored.accumulate(crossings([1, 2]))
        np.testing.assert_array_equal(table.mean, restored.mean)
        np.testing.assert_array_equal(table.m2, restored.m2)

    def test_empty_csv_rejected(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'entropy.csv'
            pd.DataFrame(columns=CSV_COLUMNS).to_csv(path, index=False)
            with self.assertRaises(ValueError):
                read_entropy_csv(path)
