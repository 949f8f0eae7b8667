import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from disorder.sampling import DisorderSpec, sample_couplings
from .chain import ChainState, DecimationError
from .engine import (
    LEFT,
    RIGHT,
    decimate_pair,
    decimate_trio,
    renormalized_coupling,
    run_configuration,
    trio_condition,
)
from .events import (
    Singlet,
    TrioMerge,
    format_event,
    parse_event,
    read_event_log,
    run_statistics,
    write_event_log,
)
from .model_kind import ModelKind

SPIN_HALF = ModelKind.heisenberg(1)
SPIN_ONE = ModelKind.heisenberg(2)
SPIN_THREE_HALVES = ModelKind.heisenberg(3)
BIQUADRATIC = ModelKind.biquadratic()


class ModelKindTests(SimpleTestCase):

    def test_prefactors(self):
        self.assertAlmostEqual(SPIN_HALF.prefactor, 0.5)
        self.assertAlmostEqual(SPIN_ONE.prefactor, 4.0 / 3.0)
        self.assertAlmostEqual(BIQUADRATIC.prefactor, 2.0 / 9.0)

    def test_trio_ratio(self):
        self.assertIsNone(SPIN_HALF.trio_ratio)
        self.assertIsNone(BIQUADRATIC.trio_ratio)
        self.assertAlmostEqual(SPIN_ONE.trio_ratio, 0.75)
        self.assertAlmostEqual(SPIN_THREE_HALVES.trio_ratio, 0.4)

    def test_biquadratic_is_spin_one_only(self):
        with self.assertRaises(ValueError):
            ModelKind.from_name('biquadratic', 1)
        self.assertEqual(ModelKind.from_name('biquadratic').two_s, 2)

    def test_unknown_family(self):
        with self.assertRaises(ValueError):
            ModelKind.from_name('ising', 1)

    def test_labels(self):
        self.assertEqual(SPIN_ONE.label, 'heisenberg-2s2')
        self.assertEqual(BIQUADRATIC.label, 'biquadratic')


class RenormalizedCouplingTests(SimpleTestCase):

    def test_spin_half(self):
        self.assertAlmostEqual(renormalized_coupling(SPIN_HALF, 1.0, 1.0, 1.0), 0.5)

    def test_spin_one(self):
        self.assertAlmostEqual(renormalized_coupling(SPIN_ONE, 0.3, 0.2, 0.6), 0.4 / 3.0)

    def test_biquadratic(self):
        self.assertAlmostEqual(renormalized_coupling(BIQUADRATIC, 0.9, 0.9, 1.0), 0.18)

    def test_nonpositive_input(self):
        with self.assertRaises(ValueError):
            renormalized_coupling(SPIN_HALF, 0.0, 1.0, 1.0)


class TrioConditionTests(SimpleTestCase):

    def test_spin_half_never_merges(self):
        for j in (0.1, 0.5, 0.99, 1.0):
            self.assertFalse(trio_condition(SPIN_HALF, j, 1.0))

    def test_spin_one_threshold(self):
        self.assertTrue(trio_condition(SPIN_ONE, 0.8, 1.0))
        self.assertFalse(trio_condition(SPIN_ONE, 0.7, 1.0))

    def test_biquadratic_never_merges(self):
        self.assertFalse(trio_condition(BIQUADRATIC, 1.0, 1.0))


class DecimatePairTests(SimpleTestCase):

    def test_four_site_step(self):
        chain = ChainState(SPIN_HALF, [0.9, 0.1, 0.2, 0.15])
        bond = chain.strongest_bond()
        self.assertEqual(bond, 0)

        chain, event = decimate_pair(chain, bond)
        self.assertEqual(event, Singlet(0, 1))
        self.assertEqual(chain.n_active, 2)
        self.assertEqual(chain.right[3], 2)
        self.assertEqual(chain.left[2], 3)
        self.assertAlmostEqual(chain.strength(3), 0.5 * 0.15 * 0.1 / 0.9)
        self.assertAlmostEqual(chain.strength(2), 0.2)
        chain.check_integrity()

    def test_two_site_terminal_step(self):
        chain = ChainState(SPIN_HALF, [1.0, 0.5])
        chain, event = decimate_pair(chain, chain.strongest_bond())
        self.assertEqual(event, Singlet(0, 1))
        self.assertEqual(chain.n_active, 0)
        self.assertIsNone(chain.strongest_bond())

    def test_uniform_couplings_pick_leftmost_bond(self):
        chain = ChainState(SPIN_HALF, [1.0] * 8)
        self.assertEqual(chain.strongest_bond(), 0)

    def test_needs_two_active_sites(self):
        chain = ChainState(SPIN_HALF, [1.0, 0.5])
        chain.n_active = 1
        with self.assertRaises(DecimationError):
            decimate_pair(chain, 0)


class DecimateTrioTests(SimpleTestCase):

    COUPLINGS = [0.1, 0.1, 0.1, 0.2, 0.9, 1.0, 0.3, 0.1]

    def _chain(self):
        return ChainState(SPIN_ONE, self.COUPLINGS)

    def test_left_trio(self):
        chain, event = decimate_trio(self._chain(), 5, LEFT)
        self.assertEqual(event, TrioMerge(4, 5, 6, surviving_position=5))
        self.assertEqual(chain.n_active, 6)
        # default kappa passes the outer couplings through
        self.assertAlmostEqual(chain.strength(3), 0.2)
        self.assertAlmostEqual(chain.strength(5), 0.3)
        self.assertEqual(chain.right[3], 5)
        self.assertEqual(chain.right[5], 7)
        chain.check_integrity()

    def test_right_trio(self):
        chain, event = decimate_trio(self._chain(), 4, RIGHT)
        self.assertEqual(event, TrioMerge(4, 5, 6, surviving_position=5))

    def test_kappa_scales_outer_couplings(self):
        chain = ChainState(SPIN_ONE, self.COUPLINGS, kappa_left=0.5, kappa_right=2.0)
        chain, _ = decimate_trio(chain, 5, LEFT)
        self.assertAlmostEqual(chain.strength(3), 0.1)
        self.assertAlmostEqual(chain.strength(5), 0.6)

    def test_engine_chooses_trio(self):
        events = run_configuration(SPIN_ONE, self.COUPLINGS, 8)
        self.assertEqual(events[0], TrioMerge(4, 5, 6, 5))

    def test_undefined_for_spin_half(self):
        with self.assertRaises(DecimationError):
            decimate_trio(ChainState(SPIN_HALF, [1.0] * 4), 0, LEFT)

    def test_invalid_side(self):
        with self.assertRaises(ValueError):
            decimate_trio(self._chain(), 5, 'up')


class RunConfigurationTests(SimpleTestCase):

    def test_hand_traced_four_sites(self):
        events = run_configuration(SPIN_HALF, [0.9, 0.01, 0.5, 0.02], 4)
        self.assertEqual(events, [Singlet(0, 1), Singlet(2, 3)])

    def test_spin_half_forms_half_as_many_singlets(self):
        couplings = sample_couplings(DisorderSpec(0.8, 1.0, 7), 500, 0)
        events = run_configuration(SPIN_HALF, couplings, 500)
        stats = run_statistics(events, 500)
        self.assertEqual(stats.singlets, 250)
        self.assertEqual(stats.trios, 0)

    def test_biquadratic_forms_no_trios(self):
        couplings = sample_couplings(DisorderSpec(0.8, 1.0, 7), 500, 1)
        events = run_configuration(BIQUADRATIC, couplings, 500)
        self.assertFalse(any(isinstance(event, TrioMerge) for event in events))

    def test_rejects_mismatched_lengths(self):
        with self.assertRaises(ValueError):
            run_configuration(SPIN_HALF, [1.0, 1.0, 1.0], 4)

    def test_invariants_with_debug_checks(self):
        spec = DisorderSpec(0.8, 1.0, 2024)
        n_sites = 1000
        for model in (SPIN_HALF, SPIN_ONE, SPIN_THREE_HALVES, BIQUADRATIC):
            for index in range(5):
                events = run_configuration(model, sample_couplings(spec, n_sites, index), n_sites, debug=True)
                stats = run_statistics(events, n_sites)
                self.assertEqual(stats.residual_sites, 0)
                positions = [p for event in events if isinstance(event, Singlet) for p in (event.pos_a, event.pos_b)]
                self.assertEqual(len(positions), len(set(positions)))

    def test_invariants_over_hundred_ten_thousand_site_chains(self):
        spec = DisorderSpec(0.8, 1.0, 777)
        n_sites = 10000
        models = (SPIN_HALF, SPIN_ONE, SPIN_THREE_HALVES, BIQUADRATIC)
        for index in range(100):
            model = models[index % len(models)]
            events = run_configuration(model, sample_couplings(spec, n_sites, index), n_sites, debug=True)
            stats = run_statistics(events, n_sites)
            self.assertEqual(stats.residual_sites, 0, msg=f"configuration {index}")
            if model.trio_ratio is None:
                self.assertEqual(stats.trios, 0, msg=f"configuration {index}")
            positions = [p for event in events if isinstance(event, Singlet) for p in (event.pos_a, event.pos_b)]
            self.assertEqual(len(positions), len(set(positions)))

    def test_couplings_below_double_range(self):
        couplings = [1.0, 1e-200] * 4
        chain = ChainState(SPIN_HALF, couplings)
        chain, _ = decimate_pair(chain, chain.strongest_bond())
        self.assertAlmostEqual(chain.log_coupling[7], math.log(0.5) + 2.0 * math.log(1e-200))
        self.assertEqual(chain.strength(7), 0.0)
        chain.check_integrity()

        events = run_configuration(SPIN_HALF, couplings, 8, debug=True)
        self.assertEqual(events, [Singlet(0, 1), Singlet(2, 3), Singlet(4, 5), Singlet(6, 7)])

    def test_desk_scale_chains_run_to_completion(self):
        spec = DisorderSpec(0.8, 1.0, 777)
        n_sites = 50000
        couplings = sample_couplings(spec, n_sites, 0)
        for model in (SPIN_HALF, SPIN_ONE, SPIN_THREE_HALVES, BIQUADRATIC):
            stats = run_statistics(run_configuration(model, couplings, n_sites), n_sites)
            self.assertEqual(stats.residual_sites, 0, msg=model.label)
            self.assertEqual(2 * (stats.singlets + stats.trios), n_sites, msg=model.label)

    def test_trio_fraction_is_small(self):
        spec = DisorderSpec(0.8, 1.0, 99)
        events = run_configuration(SPIN_ONE, sample_couplings(spec, 10000, 0), 10000)
        self.assertLess(run_statistics(events, 10000).trio_fraction, 0.2)


class ChainStateTests(SimpleTestCase):

    def test_rejects_nonpositive_couplings(self):
        with self.assertRaises(DecimationError):
            ChainState(SPIN_HALF, [1.0, 0.0, 1.0, 1.0])

    def test_integrity_detects_broken_link(self):
        chain = ChainState(SPIN_HALF, [1.0] * 6)
        chain.left[3] = 0
        with self.assertRaises(DecimationError):
            chain.check_integrity()

    def test_positions_in_cycle_order(self):
        chain = ChainState(SPIN_HALF, [0.9, 0.1, 0.2, 0.15, 0.3, 0.25])
        decimate_pair(chain, 0)
        self.assertEqual(sorted(chain.positions()), [2, 3, 4, 5])


class EventLogTests(SimpleTestCase):

    def test_line_format(self):
        self.assertEqual(format_event(Singlet(3, 8)), 'S 3 8')
        self.assertEqual(format_event(TrioMerge(4, 5, 6, 5)), 'T 4 5 6 5')
        self.assertEqual(parse_event('T 4 5 6 5\n'), TrioMerge(4, 5, 6, 5))

    def test_malformed_line(self):
        with self.assertRaises(ValueError):
            parse_event('S 1')

    def test_log_file(self):
        events = run_configuration(SPIN_ONE, sample_couplings(DisorderSpec(0.8, 1.0, 3), 200, 0), 200)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_event_log(events, Path(tmp) / 'events.log')
            self.assertEqual(read_event_log(path), events)
