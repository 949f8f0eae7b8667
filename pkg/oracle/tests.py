import math

import numpy as np
from django.test import SimpleTestCase

from blocks.crossings import BlockLadder, count_crossings
from entropy.tsallis import tsallis_singlet_entropy
from sdrg.engine import run_configuration
from sdrg.model_kind import ModelKind
from .exact_diag import (
    DegenerateGroundStateError,
    exact_ground_block_entropy,
    ground_state,
    heisenberg_hamiltonian,
)
from .singlets import (
    OracleSizeError,
    SingletLayout,
    all_layouts,
    exact_block_entropy,
    perfect_matchings,
    random_layout,
    singlet_matrix,
)

Q_VALUES = (-1.5, -0.5, 0.0, 0.5, 1.0, 2.0)


class SingletLayoutTests(SimpleTestCase):

    def test_crossing_count(self):
        self.assertEqual(SingletLayout(4, ((0, 2), (1, 3)), 2).crossing_count, 2)
        self.assertEqual(SingletLayout(4, ((0, 3), (1, 2)), 2).crossing_count, 0)

    def test_pairing_must_cover_every_site(self):
        with self.assertRaises(ValueError):
            SingletLayout(4, ((0, 1), (1, 2)), 2)

    def test_cut_inside_chain(self):
        with self.assertRaises(ValueError):
            SingletLayout(4, ((0, 1), (2, 3)), 4)

    def test_matching_enumeration(self):
        self.assertEqual(len(list(perfect_matchings([0, 1, 2, 3, 4, 5]))), 15)
        self.assertEqual(len(list(all_layouts(4))), 9)

    def test_singlet_matrix_is_normalized(self):
        for two_s in (1, 2, 3):
            self.assertAlmostEqual(float(np.sum(singlet_matrix(two_s) ** 2)), 1.0)


class ExactBlockEntropyTests(SimpleTestCase):

    def test_one_singlet_at_q_two(self):
        self.assertAlmostEqual(exact_block_entropy(SingletLayout(2, ((0, 1),), 1), 2.0, 1), 0.5)

    def test_block_in_pure_state(self):
        layout = SingletLayout(4, ((0, 3), (1, 2)), 2)
        for q in Q_VALUES:
            self.assertAlmostEqual(exact_block_entropy(layout, q, 1), 0.0, places=12)

    def test_two_crossing_singlets(self):
        layout = SingletLayout(4, ((0, 2), (1, 3)), 2)
        self.assertAlmostEqual(exact_block_entropy(layout, 1.0, 1), 2.0 * math.log(2.0))

    def _assert_closed_form(self, layout, two_s):
        for q in Q_VALUES:
            expected = tsallis_singlet_entropy(layout.crossing_count, q, two_s)
            exact = exact_block_entropy(layout, q, two_s)
            self.assertLessEqual(
                abs(exact - expected), 1e-10 * max(1.0, abs(expected)),
                msg=f"{layout} q={q} two_s={two_s}",
            )

    def test_every_small_layout_matches_closed_form(self):
        for two_s, sizes in ((1, (2, 4, 6, 8)), (2, (2, 4, 6)), (3, (2, 4, 6))):
            for n_sites in sizes:
                for layout in all_layouts(n_sites):
                    self._assert_closed_form(layout, two_s)

    def test_random_layouts_match_closed_form(self):
        rng = np.random.default_rng(42)
        for two_s, n_sites in ((1, 10), (1, 12), (1, 14), (1, 16), (2, 8)):
            for _ in range(4):
                cut = int(rng.integers(1, n_sites))
                self._assert_closed_form(random_layout(n_sites, cut, rng), two_s)

    def test_size_limits(self):
        with self.assertRaises(OracleSizeError):
            exact_block_entropy(SingletLayout(18, tuple((2 * k, 2 * k + 1) for k in range(9)), 9), 1.0, 1)
        with self.assertRaises(OracleSizeError):
            exact_block_entropy(SingletLayout(10, tuple((2 * k, 2 * k + 1) for k in range(5)), 5), 1.0, 2)


class ExactDiagonalizationTests(SimpleTestCase):

    def test_hamiltonian_is_symmetric(self):
        hamiltonian, states = heisenberg_hamiltonian([1.0, 0.7, 0.4, 0.9, 0.3, 0.8])
        self.assertEqual(len(states), 20)
        np.testing.assert_allclose(hamiltonian, hamiltonian.T)

    def test_uniform_ring_energy(self):
        energy, vector = ground_state([1.0] * 4)
        self.assertAlmostEqual(energy, -2.0)
        self.assertAlmostEqual(float(np.linalg.norm(vector)), 1.0)

    def test_two_site_singlet(self):
        self.assertAlmostEqual(exact_ground_block_entropy([1.0, 1.0], 2, 1.0, 1), math.log(2.0))

    def test_strong_disorder_matches_renormalization(self):
        couplings = [1.0, 1e-3, 0.9, 1e-3]
        events = run_configuration(ModelKind.heisenberg(1), couplings, 4)
        n = int(count_crossings(events, BlockLadder((2,), 4, anchor=1)).for_anchor(0)[0])
        self.assertEqual(n, 2)
        exact = exact_ground_block_entropy(couplings, 4, 1.0, 2, anchor=1)
        predicted = tsallis_singlet_entropy(n, 1.0, 1)
        self.assertAlmostEqual(exact, predicted, delta=0.05 * predicted)

    def test_uniform_ring_departs_from_renormalization(self):
        events = run_configuration(ModelKind.heisenberg(1), [1.0] * 4, 4)
        n = int(count_crossings(events, BlockLadder((2,), 4)).for_anchor(0)[0])
        exact = exact_ground_block_entropy([1.0] * 4, 4, 1.0, 2)
        self.assertAlmostEqual(exact, 0.837, places=2)
        self.assertGreater(abs(exact - tsallis_singlet_entropy(n, 1.0, 1)), 0.3)

    def test_degenerate_ground_level(self):
        with self.assertRaises(DegenerateGroundStateError):
            ground_state([1.0, 0.0, 0.0, 0.0])

    def test_only_spin_half_rings(self):
        with self.assertRaises(OracleSizeError):
            exact_ground_block_entropy([1.0] * 4, 4, 1.0, 2, two_s=2)
        with self.assertRaises(OracleSizeError):
            exact_ground_block_entropy([1.0] * 14, 14, 1.0, 2)
