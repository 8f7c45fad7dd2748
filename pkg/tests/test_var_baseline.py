import unittest

import numpy as np
import pandas as pd
from numpy.testing import assert_allclose
from scipy import stats

from grangersets.core.panel import SetPartition, TimeSeriesPanel, lag_align
from grangersets.core.var_baseline import fit_var1, wald_block_test, wald_statistic, within_set_edges
from grangersets.simulation import NETWORKS, SimSpec, generate, simulate_var1
from grangersets.utils.exceptions import RankDeficiencyError
from grangersets.utils.rng import substream

try:
    from statsmodels.tsa.api import VAR

    HAS_STATSMODELS = True
except ImportError:
    HAS_STATSMODELS = False


def noise_panel(seed, T=80, k=4):
    values = substream(seed, 0).standard_normal((T, k))
    return TimeSeriesPanel(tuple(f"s{c}" for c in range(k)), values)


class TestFitVar1(unittest.TestCase):
    def test_noiseless_recurrence(self):
        values = 0.4 ** np.arange(30.0)
        fit = fit_var1(TimeSeriesPanel(("z",), values[:, None]))
        self.assertAlmostEqual(fit.coefficients[0, 0], 0.4, delta=1e-10)

    def test_fitted_plus_residuals(self):
        panel = noise_panel(1)
        design = lag_align(panel)
        fit = fit_var1(design)
        assert_allclose(fit.fitted + fit.residuals, design.present, rtol=0, atol=1e-12)
        assert_allclose(fit.sigma_u, fit.sigma_u.T, rtol=0, atol=0)
        self.assertGreaterEqual(np.linalg.eigvalsh(fit.sigma_u).min(), 0.0)
        self.assertEqual(fit.df_resid, design.n_rows - panel.k - 1)

    def test_too_few_rows(self):
        with self.assertRaises(RankDeficiencyError):
            fit_var1(noise_panel(2, T=4, k=3))

    def test_constant_series_is_rank_deficient(self):
        values = substream(3, 0).standard_normal((30, 2))
        values[:, 1] = 1.5
        with self.assertRaises(RankDeficiencyError):
            fit_var1(TimeSeriesPanel(("a", "b"), values))

    def test_recovers_sim1_coefficient(self):
        estimates = []
        for seed in range(200):
            panel, _, _ = generate(SimSpec("sim1", seed=seed))
            estimates.append(fit_var1(panel).coefficients[1, 0])
        self.assertAlmostEqual(np.mean(estimates), 0.4, delta=0.02)

    def test_error_shrinks_with_length(self):
        A = NETWORKS["sim1"].coefficients(0.4)
        errors = []
        for T in (100, 1000, 10000):
            values = simulate_var1(A, T, 100, substream(4, T))
            names = NETWORKS["sim1"].series_names
            fit = fit_var1(TimeSeriesPanel(names, values))
            errors.append(np.abs(fit.coefficients - A).max())
        self.assertGreater(errors[0], errors[1])
        self.assertGreater(errors[1], errors[2])

    def test_white_noise_coefficients_near_zero(self):
        fit = fit_var1(noise_panel(5, T=400, k=3))
        for r in range(3):
            for c in range(3):
                self.assertLess(abs(fit.coefficients[r, c]), 4 * fit.standard_error(r, c))


class TestWald(unittest.TestCase):
    def test_single_restriction_identity(self):
        fit = fit_var1(noise_panel(6))
        z = fit.coefficients[0, 1] / fit.standard_error(0, 1)
        statistic = wald_statistic(fit, [0], [1])
        self.assertAlmostEqual(statistic, z**2, delta=1e-10)
        partition = SetPartition({"s0": "I", "s1": "J"})
        p = wald_block_test(fit, partition, "I", "J")
        self.assertAlmostEqual(p, 2 * stats.norm.sf(abs(z)), delta=1e-10)

    def test_invariant_to_order_within_sets(self):
        panel = noise_panel(7, k=5)
        partition = SetPartition({"s0": "I", "s1": "I", "s2": "J", "s3": "J", "s4": "J"})
        p = wald_block_test(fit_var1(panel), partition, "I", "J")

        order = [1, 0, 4, 2, 3]
        names = tuple(panel.series_names[c] for c in order)
        shuffled = TimeSeriesPanel(names, panel.values[:, order])
        self.assertAlmostEqual(wald_block_test(fit_var1(shuffled), partition, "I", "J"), p, delta=1e-8)

    def test_detects_coupled_block(self):
        values = substream(8, 0).standard_normal((200, 2))
        for t in range(1, 200):
            values[t, 0] += 0.6 * values[t - 1, 1]
        panel = TimeSeriesPanel(("y", "x"), values)
        partition = SetPartition({"y": "A", "x": "B"})
        self.assertLess(wald_block_test(fit_var1(panel), partition, "A", "B"), 1e-6)

    @unittest.skipUnless(HAS_STATSMODELS, "statsmodels not installed")
    def test_matches_statsmodels(self):
        panel = noise_panel(9, T=120, k=4)
        fit = fit_var1(panel)
        frame = pd.DataFrame(panel.values, columns=list(panel.series_names))
        reference = VAR(frame).fit(1, trend="c")
        assert_allclose(fit.coefficients, reference.coefs[0], atol=1e-10)
        assert_allclose(fit.sigma_u, np.asarray(reference.sigma_u), atol=1e-10)

        partition = SetPartition({"s0": "I", "s1": "I", "s2": "J", "s3": "J"})
        causality = reference.test_causality(caused=["s0", "s1"], causing=["s2", "s3"], kind="wald")
        index = [panel.series_names.index(s) for s in ("s0", "s1")]
        cols = [panel.series_names.index(s) for s in ("s2", "s3")]
        self.assertAlmostEqual(wald_statistic(fit, index, cols), causality.test_statistic, delta=1e-8)
        self.assertAlmostEqual(wald_block_test(fit, partition, "I", "J"), causality.pvalue, delta=1e-8)


class TestWithinSetEdges(unittest.TestCase):
    def test_every_ordered_member_pair(self):
        panel = noise_panel(10, k=5)
        partition = SetPartition({"s0": "I", "s1": "I", "s2": "II", "s3": "II", "s4": "II"})
        edges = within_set_edges(fit_var1(panel), partition, alpha=0.05)
        self.assertEqual(len(edges), 2 * 2 + 3 * 3)
        for edge in edges:
            self.assertEqual(partition.assignments[edge.source], edge.set_label)
            self.assertEqual(partition.assignments[edge.target], edge.set_label)
            self.assertEqual(edge.significant, edge.p_value < 0.05)


if __name__ == "__main__":
    unittest.main()
