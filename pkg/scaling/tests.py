import json
import math
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
from django.test import SimpleTestCase, TestCase
from scipy import optimize

from entropy.tsallis import tsallis_singlet_entropy
from .analysis import analyze_table, read_fit_json, record_fit, write_fit_json
from .fitting import (
    FitError,
    c_eff_of_spin,
    delta_gamma,
    fit_gamma_quadratic,
    fit_linear_law,
    fit_log_slope,
    fit_power_law,
    q_ext_linear,
    q_ext_pure,
    solve_q_ext,
)
from .models import ScalingFitRecord

SIZES = np.array([8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096])


def planted_frame(q_values, two_s=1):
    """Exact S_q rows for n(L) = round(ln L)."""
    rows = []
    for q in q_values:
        for size in SIZES:
            n = int(round(math.log(size)))
            rows.append({'q': q, 'L': size, 'mean': tsallis_singlet_entropy(n, q, two_s), 'stderr': 0.0, 'M': 1})
    return pd.DataFrame(rows)


class PowerLawTests(SimpleTestCase):

    def test_exact_power_law(self):
        fit = fit_power_law(SIZES[:5], 2.0 * SIZES[:5])
        self.assertAlmostEqual(fit.gamma, 1.0, places=10)
        self.assertLess(fit.gamma_stderr, 1e-10)
        self.assertAlmostEqual(math.exp(fit.intercept), 2.0, places=8)

    def test_noisy_square_root(self):
        rng = np.random.default_rng(0)
        means = 3.0 * np.sqrt(SIZES) * (1.0 + 0.01 * rng.standard_normal(SIZES.size))
        fit = fit_power_law(SIZES, means)
        self.assertAlmostEqual(fit.gamma, 0.5, delta=0.02)

    def test_window_limits_points(self):
        fit = fit_power_law(SIZES, SIZES ** 0.7, window=(16, 256))
        self.assertEqual(fit.n_points, 5)
        with self.assertRaises(FitError):
            fit_power_law(SIZES, SIZES ** 0.7, window=(16, 64))

    def test_nonpositive_means_excluded(self):
        means = SIZES.astype(float)
        means[:3] = 0.0
        self.assertEqual(fit_power_law(SIZES, means).n_points, 7)

    def test_sizes_must_increase(self):
        with self.assertRaises(FitError):
            fit_power_law([8, 4, 16, 32], [1, 2, 3, 4])

    def test_log_slope(self):
        slope, stderr = fit_log_slope(SIZES, 0.25 * np.log(SIZES) + 1.0)
        self.assertAlmostEqual(slope, 0.25)
        self.assertLess(stderr, 1e-10)


class QuadraticFitTests(SimpleTestCase):

    def setUp(self):
        self.q = np.linspace(-1.5, 0.5, 11)
        self.gamma = 0.1 * self.q ** 2 + 0.5 * self.q + 1.4
        self.stderr = np.full(self.q.size, 0.01)

    def test_exact_quadratic(self):
        fit = fit_gamma_quadratic(self.q, self.gamma, self.stderr)
        self.assertAlmostEqual(fit.u, 0.1)
        self.assertAlmostEqual(fit.v, 0.5)
        self.assertAlmostEqual(fit.w, 1.4)
        self.assertTrue(fit.weighted)
        self.assertLess(fit.chi2_reduced, 1e-12)
        self.assertEqual(fit.covariance.shape, (3, 3))

    def test_common_stderr_scale_leaves_root(self):
        rng = np.random.default_rng(1)
        gamma = self.gamma + 0.005 * rng.standard_normal(self.q.size)
        stderr = 0.005 * (1.0 + rng.random(self.q.size))
        base = fit_gamma_quadratic(self.q, gamma, stderr)
        scaled = fit_gamma_quadratic(self.q, gamma, 3.0 * stderr)
        self.assertAlmostEqual(base.u, scaled.u, places=10)
        self.assertAlmostEqual(base.v, scaled.v, places=10)
        self.assertAlmostEqual(base.w, scaled.w, places=10)

        q_base, dq_base = solve_q_ext(base.u, base.v, base.w, (-1.5, 0.5), delta_gamma(stderr))
        q_scaled, dq_scaled = solve_q_ext(scaled.u, scaled.v, scaled.w, (-1.5, 0.5), delta_gamma(3.0 * stderr))
        self.assertAlmostEqual(q_base, q_scaled, places=10)
        self.assertAlmostEqual(dq_scaled, 3.0 * dq_base)

    def test_linear_data_uses_linear_branch(self):
        fit = fit_gamma_quadratic(self.q, self.q + 0.5, self.stderr)
        self.assertLess(abs(fit.u), 1e-10)
        q_ext, _ = solve_q_ext(fit.u, fit.v, fit.w, (-1.5, 1.0), 0.01)
        self.assertAlmostEqual(q_ext, 0.5, places=8)

    def test_unweighted_fallback(self):
        stderr = self.stderr.copy()
        stderr[3] = 0.0
        self.assertFalse(fit_gamma_quadratic(self.q, self.gamma, stderr).weighted)

    def test_too_few_points(self):
        with self.assertRaises(FitError):
            fit_gamma_quadratic(self.q[:4], self.gamma[:4], self.stderr[:4])

    def test_repeated_q_values(self):
        q = np.array([0.1, 0.1, 0.1, 0.2, 0.2])
        with self.assertRaises(FitError):
            fit_gamma_quadratic(q, q, np.full(5, 0.01))

    def test_delta_gamma_policies(self):
        self.assertAlmostEqual(delta_gamma([0.01, 0.02, 0.05], 'median'), 0.02)
        self.assertAlmostEqual(delta_gamma([0.01, 0.02, 0.05], 'max'), 0.05)
        with self.assertRaises(FitError):
            delta_gamma([0.01], 'mean')


class SolveQextTests(SimpleTestCase):

    def test_identity_line(self):
        q_ext, delta = solve_q_ext(0.0, 1.0, 0.0, (0.0, 2.0), 0.1)
        self.assertAlmostEqual(q_ext, 1.0)
        self.assertAlmostEqual(delta, 0.1)

    def test_hand_solved_quadratic(self):
        q_ext, delta = solve_q_ext(0.1, 0.5, 1.4, (-2.0, 0.0), 0.03)
        self.assertAlmostEqual(q_ext, -1.0)
        self.assertAlmostEqual(delta, 0.03 / 0.3)

    def test_no_real_root(self):
        with self.assertRaises(FitError):
            solve_q_ext(1.0, 0.0, 2.0, (-2.0, 2.0), 0.01)

    def test_root_outside_scan(self):
        with self.assertRaises(FitError):
            solve_q_ext(0.0, 1.0, 0.0, (-2.0, 0.0), 0.01)

    def test_both_roots_inside_scan(self):
        with self.assertRaises(FitError):
            solve_q_ext(0.1, 0.5, 1.4, (-5.0, 0.0), 0.01)

    def test_flat_gamma(self):
        with self.assertRaises(FitError):
            solve_q_ext(0.0, 0.0, 0.5, (-1.0, 1.0), 0.01)


class ClosedFormTests(SimpleTestCase):

    def test_c_eff(self):
        self.assertAlmostEqual(c_eff_of_spin(1), math.log(2.0))
        self.assertAlmostEqual(c_eff_of_spin(3), math.log(4.0))

    def test_pure_chain(self):
        self.assertAlmostEqual(q_ext_pure(1.0), math.sqrt(10.0) - 3.0)

    def test_linear_law(self):
        self.assertAlmostEqual(q_ext_linear(math.log(2.0)), -1.4093, places=4)

    def test_linear_law_fit_on_reference_values(self):
        k, k_stderr = fit_linear_law(
            [math.log(2.0), math.log(3.0), math.log(4.0)],
            [-1.40, -0.49, -0.25],
            [0.03, 0.04, 0.02],
        )
        self.assertAlmostEqual(k, 1.67, delta=0.05)
        self.assertGreater(k_stderr, 0.0)

    def test_linear_law_fit_needs_two_models(self):
        with self.assertRaises(FitError):
            fit_linear_law([math.log(2.0)], [-1.4])


class AnalyzeTableTests(SimpleTestCase):

    def setUp(self):
        self.q_values = list(np.round(np.linspace(-0.9, 0.0, 10), 10)) + [1.0]
        self.frame = planted_frame(self.q_values)

    def _direct_root(self):
        def gamma_minus_one(q):
            means = [tsallis_singlet_entropy(int(round(math.log(size))), q, 1) for size in SIZES]
            return fit_power_law(SIZES, means).gamma - 1.0
        return optimize.brentq(gamma_minus_one, -0.9, 0.0)

    def test_synthetic_closure(self):
        fit = analyze_table(self.frame, 'heisenberg', 1)
        self.assertEqual(len(fit.gamma_points), 10)
        self.assertGreater(fit.delta_q_ext, 0.0)
        self.assertLessEqual(abs(fit.q_ext - self._direct_root()), 2.0 * fit.delta_q_ext + 1e-3)
        self.assertAlmostEqual(fit.q_ext, 1.0 - 1.0 / math.log(2.0), delta=0.2)

    def test_gamma_points_match_direct_fits(self):
        fit = analyze_table(self.frame, 'heisenberg', 1)
        for point in fit.gamma_points:
            rows = self.frame[self.frame['q'] == point.q]
            self.assertAlmostEqual(point.gamma, fit_power_law(rows['L'], rows['mean']).gamma)

    def test_von_neumann_slope(self):
        fit = analyze_table(self.frame, 'heisenberg', 1)
        self.assertAlmostEqual(fit.von_neumann_slope, math.log(2.0), delta=0.1)
        self.assertAlmostEqual(fit.c_eff_measured, 3.0 * fit.von_neumann_slope)

    def test_summary_line(self):
        fit = analyze_table(self.frame, 'heisenberg', 1)
        self.assertRegex(fit.summary(), r'^q_ext = -?\d+\.\d{4} ± \d+\.\d{4} \(c_eff = 0\.6931, linear-pred = -1\.4093\)$')

    def test_too_few_q_values(self):
        frame = planted_frame([-0.8, -0.6, -0.4, 1.0])
        with self.assertRaises(FitError):
            analyze_table(frame, 'heisenberg', 1)

    def test_fit_json(self):
        fit = analyze_table(self.frame, 'heisenberg', 1, trio_fraction=0.0)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_fit_json(fit, Path(tmp) / 'fit.json')
            payload = read_fit_json(path)
        for key in ('model', 'two_s', 'gamma_points', 'u', 'v', 'w', 'q_ext', 'delta_q_ext',
                    'c_eff', 'q_ext_linear_pred', 'trio_fraction'):
            self.assertIn(key, payload)
        self.assertEqual(set(payload['gamma_points'][0]), {'q', 'gamma', 'stderr'})
        json.dumps(payload)


class ScalingFitRecordTests(TestCase):

    def setUp(self):
        self.fit = analyze_table(planted_frame(list(np.linspace(-0.9, 0.0, 10))), 'heisenberg', 1)

    def test_record_fit(self):
        record = record_fit(self.fit, '/tmp/fit.json')
        self.assertIsNotNone(record)
        self.assertEqual(ScalingFitRecord.objects.count(), 1)
        self.assertAlmostEqual(record.q_ext, self.fit.q_ext)

    def test_fits_endpoint(self):
        record_fit(self.fit, '/tmp/fit.json')
        response = self.client.get('/api/v1/fits/')
        self.assertEqual(response.status_code, 200)
        payload = response.json()
        self.assertEqual(payload['status'], 'success')
        self.assertEqual(payload['count'], 1)
        self.assertEqual(payload['fits'][0]['model'], 'heisenberg')

    def test_fits_endpoint_filters_by_model(self):
        record_fit(self.fit, '/tmp/fit.json')
        payload = self.client.get('/api/v1/fits/', {'model': 'biquadratic'}).json()
        self.assertEqual(payload['count'], 0)

    def test_fits_endpoint_is_read_only(self):
        self.assertEqual(self.client.post('/api/v1/fits/').status_code, 405)
