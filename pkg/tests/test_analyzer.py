import unittest

import numpy as np

from grangersets.core.analyzer import SetGrangerAnalyzer, ordered_pairs, pair_seed, with_pair
from grangersets.core.bootstrap import BootstrapConfig
from grangersets.core.panel import SetPartition, TimeSeriesPanel, load_panel, load_partition
from grangersets.data import bundled_path
from grangersets.utils.exceptions import SingularityError, ValidationError


class TestPairs(unittest.TestCase):
    def setUp(self):
        self.partition = SetPartition.from_groups({"I": ["a"], "II": ["b"], "III": ["c"]})

    def test_ordered_pairs(self):
        pairs = ordered_pairs(self.partition)
        self.assertEqual(len(pairs), 9)
        self.assertEqual(pairs[:3], [("I", "I"), ("I", "II"), ("I", "III")])
        self.assertEqual(len(ordered_pairs(self.partition, include_self_loops=False)), 6)

    def test_pair_seeds_differ_by_direction(self):
        forward = pair_seed(5, self.partition, "I", "II")
        backward = pair_seed(5, self.partition, "II", "I")
        self.assertNotEqual(forward, backward)
        self.assertEqual(forward, pair_seed(5, self.partition, "I", "II"))

    def test_with_pair_keeps_error_class(self):
        error = with_pair(SingularityError("flat", details={"columns": "x"}), "I", "II")
        self.assertIsInstance(error, SingularityError)
        self.assertEqual(error.details, {"pair": "I->II", "columns": "x"})
        self.assertIn("pair=I->II", str(error))


class TestSetGrangerAnalyzer(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.panel = load_panel(bundled_path("hela_like_panel.csv"))
        cls.partition = load_partition(bundled_path("hela_partition.txt"))
        cls.cfg = BootstrapConfig(replicates=19, seed=11)

    def test_all_ordered_pairs(self):
        analyzer = SetGrangerAnalyzer(self.panel, self.partition, self.cfg, methods=("pcca", "wald"))
        results = analyzer.run()
        self.assertEqual(len(results), 16)
        for result in results:
            self.assertGreaterEqual(result.gc.rho_hat, 0.0)
            self.assertLessEqual(result.gc.rho_hat, 1.0)
            self.assertEqual(result.gc.pair, result.key)
            self.assertGreaterEqual(result.wald_p_value, 0.0)
            self.assertIsNotNone(result.loadings)
        self.assertEqual(analyzer.get_statistics()["pairs"], 16)

    def test_worker_count_does_not_change_results(self):
        analyzer = SetGrangerAnalyzer(self.panel, self.partition, self.cfg)
        serial = analyzer.run(workers=1)
        pooled = analyzer.run(workers=2)
        for a, b in zip(serial, pooled):
            self.assertEqual(a.key, b.key)
            self.assertEqual(a.gc.rho_hat, b.gc.rho_hat)
            np.testing.assert_array_equal(a.gc.null_rhos, b.gc.null_rhos)

    def test_single_pair_matches_run(self):
        analyzer = SetGrangerAnalyzer(self.panel, self.partition, self.cfg)
        by_key = {r.key: r for r in analyzer.run()}
        single = analyzer.test_pair("I", "II")
        self.assertEqual(single.gc.p_value, by_key[("I", "II")].gc.p_value)

    def test_wald_only(self):
        analyzer = SetGrangerAnalyzer(self.panel, self.partition, self.cfg, methods=("wald",))
        results = analyzer.run(workers=2)
        self.assertTrue(all(r.gc is None and r.wald_p_value is not None for r in results))

    def test_within_set(self):
        analyzer = SetGrangerAnalyzer(self.panel, self.partition, self.cfg)
        edges = analyzer.within_set()
        # own-lag coefficients included: 4*4 + 3*3 + 4*4 + 4*4
        self.assertEqual(len(edges), 57)
        self.assertEqual({e.set_label for e in edges}, {"I", "II", "III", "IV"})

    def test_unknown_method(self):
        with self.assertRaises(ValidationError):
            SetGrangerAnalyzer(self.panel, self.partition, methods=("granger",))
        with self.assertRaises(ValidationError):
            SetGrangerAnalyzer(self.panel, self.partition, methods=())

    def test_partition_outside_panel(self):
        partition = SetPartition({"RECK": "I", "MISSING": "II"})
        with self.assertRaises(ValidationError):
            SetGrangerAnalyzer(self.panel, partition)

    def test_failing_pair_is_named(self):
        rng = np.random.default_rng(0)
        values = rng.standard_normal((40, 3))
        values[:, 2] = 1.0
        panel = TimeSeriesPanel(("a", "b", "flat"), values)
        analyzer = SetGrangerAnalyzer(panel, SetPartition({"a": "A", "b": "B"}), self.cfg)
        with self.assertRaises(SingularityError) as ctx:
            analyzer.run()
        self.assertEqual(ctx.exception.details["pair"], "A->A")


if __name__ == "__main__":
    unittest.main()
