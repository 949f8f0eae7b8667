import json
import math
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from blocks.crossings import BlockLadder, count_crossings
from disorder.sampling import DisorderSpec, sample_couplings
from entropy.table import read_entropy_csv
from entropy.tsallis import tsallis_singlet_entropy
from scaling.fitting import FitError
from scaling.models import ScalingFitRecord
from sdrg.engine import run_configuration
from sdrg.model_kind import ModelKind
from . import runner
from .config import ConfigurationError, RunConfig
from .models import SimulationRun
from .runner import estimate_runtime, read_meta, simulate
from .sweep import sweep
from .workers import WorkerTask, run_batch, split_range

TABLE_ONE = (
    ('heisenberg', 1, -1.40, 0.03),
    ('heisenberg', 2, -0.49, 0.04),
    ('heisenberg', 3, -0.25, 0.02),
    ('biquadratic', 2, -0.55, 0.06),
)


def small_config(out_dir, **fields):
    values = dict(
        model='heisenberg',
        two_s=1,
        sites=256,
        configurations=6,
        seed=2024,
        workers=1,
        block_sizes=(8, 16, 32),
        q_values=(-1.0, 0.0, 0.5),
        checkpoint_every=2,
        out_dir=str(out_dir),
    )
    values.update(fields)
    return RunConfig(**values)


def write_fit(directory, model, two_s, q_ext, delta):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payload = {
        'model': model,
        'two_s': two_s,
        'gamma_points': [],
        'u': 0.0, 'v': 0.0, 'w': 0.0,
        'q_ext': q_ext,
        'delta_q_ext': delta,
        'c_eff': math.log(two_s + 1),
        'q_ext_linear_pred': 1.0 - 1.67 / math.log(two_s + 1),
        'trio_fraction': 0.0,
    }
    with open(directory / 'fit.json', 'w') as handle:
        json.dump(payload, handle)
    return directory


class RunConfigTests(SimpleTestCase):

    def _write(self, tmp, text):
        path = Path(tmp) / 'run.cfg'
        path.write_text(text)
        return path

    def test_file_and_overrides(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = self._write(tmp, (
                "model = heisenberg\n"
                "two_s = 2\n"
                "sites = 1024\n"
                "configurations = 10\n"
                "blocks.sizes = 8, 16, 32\n"
                "entropy.q_values = -1.0, -0.5, 0.0\n"
                "scaling.dgamma_policy = max\n"
            ))
            config = RunConfig.from_file(path, {'seed': '7', 'sites': '2048'})
        self.assertEqual(config.two_s, 2)
        self.assertEqual(config.sites, 2048)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.block_sizes, (8, 16, 32))
        self.assertEqual(config.dgamma_policy, 'max')
        self.assertEqual(config.resolved_q_values(), (-1.0, -0.5, 0.0, 1.0))

    def test_unknown_key_rejected(self):
        with self.assertRaises(ConfigurationError):
            RunConfig.from_mapping({'sitez': '100'})

    def test_invalid_value_rejected(self):
        with self.assertRaises(ConfigurationError):
            RunConfig.from_mapping({'sites': 'many'})

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            RunConfig.from_file('/nonexistent/run.cfg')

    def test_biquadratic_defaults_to_spin_one(self):
        config = RunConfig.from_mapping({'model': 'biquadratic'})
        self.assertEqual(config.two_s, 2)
        self.assertEqual(config.model_kind().label, 'biquadratic')

    def test_biquadratic_rejects_other_spins(self):
        config = RunConfig.from_mapping({'model': 'biquadratic', 'two_s': '1'})
        with self.assertRaises(ConfigurationError):
            config.validate()

    def test_default_q_grid_centred_on_linear_law(self):
        grid = RunConfig(two_s=1).resolved_q_values()
        self.assertEqual(len(grid), 12)
        self.assertEqual(grid[-1], 1.0)
        self.assertAlmostEqual(grid[5], 1.0 - 1.67 / math.log(2.0), places=8)
        self.assertAlmostEqual(grid[10] - grid[0], 1.0, places=8)

    def test_von_neumann_point_optional(self):
        config = RunConfig(q_values=(-1.0, 0.0), include_von_neumann=False)
        self.assertEqual(config.resolved_q_values(), (-1.0, 0.0))

    def test_default_fit_window(self):
        self.assertEqual(RunConfig(sites=50000).fit_window(), (8.0, 6250.0))

    def test_validation(self):
        with self.assertRaises(ConfigurationError):
            RunConfig(sites=1001).validate()
        with self.assertRaises(ConfigurationError):
            RunConfig(sites=32).validate()
        with self.assertRaises(ConfigurationError):
            RunConfig(workers=0).validate()
        with self.assertRaises(ConfigurationError):
            RunConfig(dgamma_policy='mean').validate()
        with self.assertRaises(ConfigurationError):
            RunConfig(alpha=1.2).validate()
        with self.assertRaises(ConfigurationError):
            RunConfig(l_min=100.0, l_max=10.0).validate()
        with self.assertRaises(ConfigurationError):
            RunConfig(sites=1000, anchors=1001).validate()
        RunConfig(sites=1000, anchors=1000).validate()

    def test_full_scale_accepted(self):
        config = RunConfig(sites=200000, configurations=40000).validate()
        self.assertEqual(config.ladder().sizes[-1], 16384)

    def test_echo_rebuilds_config(self):
        config = RunConfig(two_s=3, block_sizes=(8, 16), q_values=(-0.5, 0.0), l_max=64.0)
        self.assertEqual(RunConfig.from_mapping(config.as_dict()), config)

    def test_fingerprint_ignores_execution_settings(self):
        config = RunConfig()
        self.assertEqual(config.fingerprint(), RunConfig(workers=8, checkpoint_every=3).fingerprint())
        self.assertNotEqual(config.fingerprint(), RunConfig(seed=1).fingerprint())

    def test_process_defaults(self):
        defaults = RunConfig.defaults()
        self.assertEqual(defaults.seed, 12345)
        self.assertEqual(defaults.workers, 1)


class WorkerTests(SimpleTestCase):

    def test_split_range(self):
        self.assertEqual(split_range(0, 10, 3), ((0, 3), (3, 6), (6, 10)))
        self.assertEqual(split_range(4, 6, 8), ((4, 5), (5, 6)))

    def test_batch_matches_single_configurations(self):
        spec = DisorderSpec(0.8, 1.0, 5)
        ladder = BlockLadder((4, 8, 16), 128)
        task = WorkerTask(ModelKind.heisenberg(2), spec, ladder, start=3, stop=6, n_anchors=2)
        result = run_batch(task)
        self.assertEqual(result.counts.shape, (3, 2, 3))
        self.assertEqual(result.stop, 6)
        for offset in range(3):
            events = run_configuration(ModelKind.heisenberg(2), sample_couplings(spec, 128, 3 + offset), 128)
            expected = count_crossings(events, ladder, n_anchors=2).counts
            np.testing.assert_array_equal(result.counts[offset], expected)
        self.assertEqual(int(result.singlets.sum() + result.trios.sum()), 3 * 64)


class SimulateTests(SimpleTestCase):

    def test_four_site_trace(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = small_config(tmp, sites=4, configurations=1, block_sizes=(1, 2), q_values=(0.0, 1.0),
                                  l_min=1.0, l_max=2.0)
            simulate(config, progress=False)
            frame = read_entropy_csv(Path(tmp) / 'entropy.csv')

        spec = DisorderSpec(0.8, 1.0, 2024)
        events = run_configuration(ModelKind.heisenberg(1), sample_couplings(spec, 4, 0), 4)
        counts = count_crossings(events, BlockLadder((1, 2), 4)).for_anchor(0)
        for q in (0.0, 1.0):
            for size, n in zip((1, 2), counts):
                row = frame[(frame['q'] == q) & (frame['L'] == size)].iloc[0]
                self.assertAlmostEqual(row['mean'], tsallis_singlet_entropy(int(n), q, 1), places=10)
                self.assertEqual(row['M'], 1)

    def test_worker_count_does_not_change_csv(self):
        outputs = []
        with tempfile.TemporaryDirectory() as tmp:
            for workers in (1, 4, 8):
                out = Path(tmp) / f'w{workers}'
                config = small_config(out, sites=10000, configurations=50, workers=workers,
                                      block_sizes=None, checkpoint_every=20, two_s=2)
                simulate(config, progress=False)
                outputs.append((out / 'entropy.csv').read_bytes())
        self.assertEqual(outputs[0], outputs[1])
        self.assertEqual(outputs[0], outputs[2])

    def test_resume_reproduces_uninterrupted_run(self):
        with tempfile.TemporaryDirectory() as tmp:
            simulate(small_config(Path(tmp) / 'full'), progress=False)
            expected = (Path(tmp) / 'full' / 'entropy.csv').read_bytes()

            original = runner.run_batch

            def interrupted(task):
                if task.start >= 4:
                    raise RuntimeError('interrupted')
                return original(task)

            config = small_config(Path(tmp) / 'resumed')
            with mock.patch.object(runner, 'run_batch', interrupted):
                with self.assertRaises(RuntimeError):
                    simulate(config, progress=False)
            self.assertTrue((Path(tmp) / 'resumed' / 'checkpoint.npz').exists())

            summary = simulate(config, resume=True, progress=False)
            self.assertEqual(summary.resumed_from, 4)
            self.assertEqual((Path(tmp) / 'resumed' / 'entropy.csv').read_bytes(), expected)

    def test_resume_rejects_changed_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            simulate(small_config(tmp), progress=False)
            with self.assertRaises(ConfigurationError):
                simulate(small_config(tmp, seed=1), resume=True, progress=False)

    def test_meta_and_event_dump(self):
        with tempfile.TemporaryDirectory() as tmp:
            summary = simulate(small_config(tmp, two_s=2), progress=False, dump_events=2)
            meta = read_meta(tmp)
            dumped = sorted(path.name for path in (Path(tmp) / 'events').iterdir())
        self.assertEqual(dumped, ['config_000000.log', 'config_000001.log'])
        self.assertEqual(meta['configurations'], 6)
        self.assertEqual(meta['config']['two_s'], 2)
        self.assertEqual(meta['singlets'] + meta['trios'], 6 * 128)
        self.assertAlmostEqual(meta['trio_fraction'], summary.trio_fraction)
        for key in ('wall_time_seconds', 'code_version', 'q_values', 'block_sizes', 'fingerprint'):
            self.assertIn(key, meta)

    def test_runtime_estimate(self):
        config = small_config('/tmp/unused', sites=200000, configurations=40000, workers=8)
        self.assertGreater(estimate_runtime(config, pilot_sites=512), 0.0)


class SweepTests(SimpleTestCase):

    def test_reference_values_give_linear_law(self):
        with tempfile.TemporaryDirectory() as tmp:
            dirs = [write_fit(Path(tmp) / f'{model}{two_s}', model, two_s, q, d) for model, two_s, q, d in TABLE_ONE]
            out = Path(tmp) / 'qext_vs_ceff.csv'
            result = sweep(dirs, out)
            with open(out) as handle:
                header = handle.readline().strip()
            frame = pd.read_csv(out)
        self.assertEqual(header, 'c_eff,q_ext,delta_q_ext,model')
        self.assertEqual(len(frame), 4)
        self.assertAlmostEqual(result.k, 1.67, delta=0.05)

    def test_spin_one_models_agree(self):
        with tempfile.TemporaryDirectory() as tmp:
            dirs = [write_fit(Path(tmp) / f'{model}{two_s}', model, two_s, q, d) for model, two_s, q, d in TABLE_ONE]
            result = sweep(dirs, Path(tmp) / 'sweep.csv')
        self.assertEqual(len(result.same_spin_pairs), 1)
        _, _, difference, combined = result.same_spin_pairs[0]
        self.assertLessEqual(difference, combined)

    def test_single_model_refused(self):
        with tempfile.TemporaryDirectory() as tmp:
            directory = write_fit(Path(tmp) / 'a', 'heisenberg', 1, -1.40, 0.03)
            with self.assertRaises(FitError):
                sweep([directory], Path(tmp) / 'sweep.csv')


class CommandTests(TestCase):

    def _planted_csv(self, directory):
        rows = []
        for q in np.round(np.linspace(-0.9, 0.0, 10), 10):
            for size in (8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096):
                n = int(round(math.log(size)))
                rows.append({'q': q, 'L': size, 'mean': tsallis_singlet_entropy(n, q, 1), 'stderr': 0.0, 'M': 1})
        path = Path(directory) / 'entropy.csv'
        pd.DataFrame(rows).to_csv(path, index=False)
        return path

    def test_simulate_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            cfg = Path(tmp) / 'run.cfg'
            cfg.write_text("sites = 256\nconfigurations = 3\nblocks.sizes = 8, 16, 32\nentropy.q_values = 0.0\n")
            out = StringIO()
            call_command('simulate', '--config', str(cfg), '--out', str(Path(tmp) / 'run'),
                         '--seed', '9', '--no-progress', '--no-estimate', stdout=out)
            self.assertTrue((Path(tmp) / 'run' / 'entropy.csv').exists())
        self.assertIn('3 configurations written', out.getvalue())
        run = SimulationRun.objects.get()
        self.assertEqual(run.seed, 9)
        self.assertEqual(run.configurations, 3)

    def test_simulate_prints_estimate(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = StringIO()
            call_command('simulate', '--set', 'sites=128', '--set', 'configurations=1', '--set', 'blocks.sizes=4,8',
                         '--out', tmp, '--no-progress', stdout=out)
        self.assertIn('Estimated runtime', out.getvalue())

    def test_simulate_rejects_unknown_key(self):
        with self.assertRaises(CommandError):
            call_command('simulate', '--set', 'colour=blue', '--no-estimate', '--no-progress')

    def test_simulate_rejects_malformed_override(self):
        with self.assertRaises(CommandError):
            call_command('simulate', '--set', 'sites', '--no-estimate', '--no-progress')

    def test_analyze_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            csv_path = self._planted_csv(tmp)
            out = StringIO()
            call_command('analyze', '--in', str(csv_path), '--model', 'heisenberg', '--two-s', '1', stdout=out)
            with open(Path(tmp) / 'fit.json') as handle:
                payload = json.load(handle)
        self.assertTrue(out.getvalue().startswith('q_ext = '))
        self.assertIn('linear-pred = -1.4093', out.getvalue())
        self.assertEqual(payload['two_s'], 1)
        self.assertEqual(ScalingFitRecord.objects.count(), 1)

    def test_analyze_uses_simulation_metadata(self):
        with tempfile.TemporaryDirectory() as tmp:
            csv_path = self._planted_csv(tmp)
            meta = {'config': RunConfig(sites=40000, out_dir=tmp).as_dict(), 'trio_fraction': 0.01}
            (Path(tmp) / 'meta.json').write_text(json.dumps(meta))
            call_command('analyze', '--in', str(csv_path), '--out', str(Path(tmp) / 'out.json'), stdout=StringIO())
            with open(Path(tmp) / 'out.json') as handle:
                payload = json.load(handle)
        self.assertEqual(payload['trio_fraction'], 0.01)
        self.assertEqual(payload['model'], 'heisenberg')

    def test_analyze_rejects_empty_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'entropy.csv'
            path.write_text('q,L,mean,stderr,M\n')
            with self.assertRaises(CommandError):
                call_command('analyze', '--in', str(path), '--model', 'heisenberg', '--two-s', '1')

    def test_analyze_missing_file(self):
        with self.assertRaises(CommandError):
            call_command('analyze', '--in', '/nonexistent/entropy.csv')

    def test_sweep_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            dirs = [str(write_fit(Path(tmp) / f'{m}{s}', m, s, q, d)) for m, s, q, d in TABLE_ONE]
            out = StringIO()
            call_command('sweep', '--in', *dirs, '--out', str(Path(tmp) / 'sweep.csv'), stdout=out)
            self.assertTrue((Path(tmp) / 'sweep.csv').exists())
        self.assertIn('k = ', out.getvalue())
        self.assertIn('biquadratic vs heisenberg-2s2', out.getvalue())

    def test_sweep_command_single_model(self):
        with tempfile.TemporaryDirectory() as tmp:
            directory = write_fit(Path(tmp) / 'a', 'heisenberg', 1, -1.40, 0.03)
            with self.assertRaises(CommandError):
                call_command('sweep', '--in', str(directory), '--out', str(Path(tmp) / 'sweep.csv'))

    def test_selftest_runs_oracle_suite(self):
        with mock.patch('ensemble.management.commands.selftest.call_command') as test_command:
            call_command('selftest')
        self.assertEqual(test_command.call_args.args, ('test', 'oracle', 'entropy'))


class RunApiTests(TestCase):

    def setUp(self):
        self.run = SimulationRun.objects.create(
            model='heisenberg', two_s=2, sites=1000, configurations=10, seed=5,
            output_dir='/tmp/run', trio_fraction=0.01, wall_time_seconds=1.5,
        )
        SimulationRun.objects.create(
            model='biquadratic', two_s=2, sites=1000, configurations=10, seed=6,
            output_dir='/tmp/run2', trio_fraction=0.0, wall_time_seconds=1.0,
        )

    def test_list_runs(self):
        payload = self.client.get('/api/v1/runs/').json()
        self.assertEqual(payload['status'], 'success')
        self.assertEqual(payload['count'], 2)

    def test_filter_runs(self):
        payload = self.client.get('/api/v1/runs/', {'model': 'biquadratic'}).json()
        self.assertEqual(payload['count'], 1)
        self.assertEqual(payload['runs'][0]['seed'], 6)

    def test_limit_runs(self):
        self.assertEqual(self.client.get('/api/v1/runs/', {'limit': '1'}).json()['count'], 1)
        self.assertEqual(self.client.get('/api/v1/runs/', {'limit': 'x'}).status_code, 400)

    def test_bad_spin_filter(self):
        self.assertEqual(self.client.get('/api/v1/runs/', {'two_s': 'one'}).status_code, 400)

    def test_run_detail(self):
        payload = self.client.get(f'/api/v1/runs/{self.run.id}').json()
        self.assertEqual(payload['run']['output_dir'], '/tmp/run')

    def test_missing_run(self):
        response = self.client.get('/api/v1/runs/9999')
        self.assertEqual(response.status_code, 404)
        self.assertEqual(response.json()['status'], 'error')

    def test_read_only(self):
        self.assertEqual(self.client.post('/api/v1/runs/').status_code, 405)
