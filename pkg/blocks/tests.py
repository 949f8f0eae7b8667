import numpy as np
from django.test import SimpleTestCase
from scipy import stats

from disorder.sampling import DisorderSpec, sample_couplings
from sdrg.engine import run_configuration
from sdrg.events import Singlet, TrioMerge
from sdrg.model_kind import ModelKind
from .crossings import BlockLadder, CrossingError, count_crossings, crossing_profile


def direct_count(pairs, size, n_sites, anchor):
    inside = (np.asarray(pairs) - anchor) % n_sites < size
    return int(np.count_nonzero(inside[:, 0] != inside[:, 1]))


class BlockLadderTests(SimpleTestCase):

    def test_auto_ladder(self):
        self.assertEqual(BlockLadder.auto(1024).sizes, (8, 16, 32, 64, 128))

    def test_sizes_must_increase(self):
        with self.assertRaises(CrossingError):
            BlockLadder((4, 4, 8), 64)

    def test_sizes_inside_chain(self):
        with self.assertRaises(CrossingError):
            BlockLadder((4, 64), 64)
        with self.assertRaises(CrossingError):
            BlockLadder((0, 4), 64)

    def test_empty_ladder(self):
        with self.assertRaises(CrossingError):
            BlockLadder.auto(32)

    def test_equally_spaced_anchors(self):
        ladder = BlockLadder((2,), 16, anchor=3)
        self.assertEqual(ladder.anchors(4), (3, 7, 11, 15))


class CountCrossingsTests(SimpleTestCase):

    def test_no_crossing(self):
        table = count_crossings([Singlet(0, 1), Singlet(2, 3)], BlockLadder((2,), 4))
        self.assertEqual(table.for_anchor(0).tolist(), [0])

    def test_one_crossing(self):
        table = count_crossings([Singlet(1, 2)], BlockLadder((2,), 4))
        self.assertEqual(table.for_anchor(0).tolist(), [1])

    def test_window_wraps_around(self):
        # block {3, 0}
        table = count_crossings([Singlet(0, 1), Singlet(2, 3)], BlockLadder((2,), 4, anchor=3))
        self.assertEqual(table.for_anchor(0).tolist(), [2])

    def test_trio_merges_never_count(self):
        table = count_crossings([TrioMerge(1, 2, 3, 2), Singlet(0, 2)], BlockLadder((1, 2, 3), 4))
        self.assertEqual(table.for_anchor(0).tolist(), [1, 1, 0])

    def test_positions_outside_chain(self):
        with self.assertRaises(CrossingError):
            count_crossings([Singlet(0, 9)], BlockLadder((2,), 4))

    def test_several_anchors(self):
        events = [Singlet(0, 1), Singlet(2, 3), Singlet(4, 5), Singlet(6, 7)]
        table = count_crossings(events, BlockLadder((1, 2), 8), n_anchors=2)
        self.assertEqual(table.counts.shape, (2, 2))
        self.assertEqual(table.anchors, (0, 4))
        np.testing.assert_array_equal(table.counts, [[1, 0], [1, 0]])

    def test_complement_symmetry(self):
        n_sites = 256
        couplings = sample_couplings(DisorderSpec(0.8, 1.0, 11), n_sites, 0)
        events = run_configuration(ModelKind.heisenberg(1), couplings, n_sites)
        for anchor, size in ((0, 10), (17, 64), (200, 100)):
            inside = count_crossings(events, BlockLadder((size,), n_sites, anchor))
            outside = count_crossings(events, BlockLadder((n_sites - size,), n_sites, (anchor + size) % n_sites))
            self.assertEqual(inside.for_anchor(0)[0], outside.for_anchor(0)[0])

    def test_mean_count_grows_logarithmically(self):
        n_sites = 4096
        spec = DisorderSpec(0.8, 1.0, 5)
        ladder = BlockLadder((8, 16, 32, 64, 128, 256, 512), n_sites)
        total = np.zeros(len(ladder.sizes))
        samples = 20
        for index in range(samples):
            events = run_configuration(ModelKind.heisenberg(1), sample_couplings(spec, n_sites, index), n_sites)
            total += count_crossings(events, ladder, n_anchors=16).counts.mean(axis=0)
        slope = stats.linregress(np.log(ladder.sizes), total / samples).slope
        self.assertGreater(slope, 0.2)
        self.assertLess(slope, 0.5)


class CrossingProfileTests(SimpleTestCase):

    def test_matches_direct_count_at_every_anchor(self):
        rng = np.random.default_rng(8)
        for n_sites in (6, 10, 32):
            for _ in range(5):
                pairs = rng.permutation(n_sites).reshape(-1, 2)
                sizes = (1, 3, n_sites // 2, n_sites - 2)
                profile = crossing_profile(pairs, sizes, n_sites)
                for i, size in enumerate(sizes):
                    expected = [direct_count(pairs, size, n_sites, x) for x in range(n_sites)]
                    self.assertEqual(profile[i].tolist(), expected, msg=f"N={n_sites} L={size}")

    def test_all_translations_on_a_decimated_chain(self):
        n_sites = 512
        couplings = sample_couplings(DisorderSpec(0.8, 1.0, 13), n_sites, 0)
        events = run_configuration(ModelKind.heisenberg(2), couplings, n_sites)
        pairs = np.array([(e.pos_a, e.pos_b) for e in events if isinstance(e, Singlet)])
        table = count_crossings(events, BlockLadder((8, 64), n_sites), n_anchors=n_sites)
        self.assertEqual(table.counts.shape, (n_sites, 2))
        for x in (0, 5, 300, 511):
            self.assertEqual(table.counts[x].tolist(),
                             [direct_count(pairs, 8, n_sites, x), direct_count(pairs, 64, n_sites, x)])

    def test_empty_pairing(self):
        profile = crossing_profile(np.empty((0, 2), dtype=np.int64), (2, 4), 8)
        self.assertFalse(profile.any())

    def test_anchor_count_bounded_by_chain(self):
        with self.assertRaises(CrossingError):
            BlockLadder((2,), 8).anchors(9)
