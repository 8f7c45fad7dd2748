import json
import tempfile
import unittest
from pathlib import Path

import numpy as np

from grangersets.core.analyzer import EdgeResult
from grangersets.core.bootstrap import GcTestResult
from grangersets.core.graph import NONE, STRONG, WEAK, build_graph, flow_summary, significant_edges, tier_for
from grangersets.core.panel import SetPartition
from grangersets.core.pcca import Loading, LoadingReport
from grangersets.core.var_baseline import SeriesEdge
from grangersets.renderers import DotRenderer, JSONRenderer, MarkdownRenderer, to_dot
from grangersets.simulation import DetectionMatrix, calibration_report, SimSpec, REFERENCE_COUNTS
from grangersets.utils.exceptions import ValidationError


def gc(source, target, rho, p_value):
    return GcTestResult(
        response=target,
        predictor=source,
        rho_hat=rho,
        null_rhos=np.zeros(19),
        p_value=p_value,
        l_used=5,
        B_used=19,
        alpha=0.05,
    )


def report(rho):
    return LoadingReport(
        rho=rho,
        response=(Loading("b1", "response", 0.9, 1), Loading("b2", "response", -0.1, 2)),
        predictor=(Loading("a2", "predictor", -0.8, 1), Loading("a1", "predictor", 0.2, 2)),
        relations=(),
    )


class TestGraph(unittest.TestCase):
    def setUp(self):
        self.partition = SetPartition.from_groups({"I": ["a1", "a2"], "II": ["b1", "b2"]})
        self.results = [
            gc("II", "I", 0.20, 0.50),
            gc("I", "II", 0.61234, 0.03),
            gc("I", "I", 0.45, 0.07),
            gc("II", "II", 0.30, 0.10),
        ]

    def test_tiers_are_half_open(self):
        self.assertEqual(tier_for(0.03), STRONG)
        self.assertEqual(tier_for(0.05), WEAK)
        self.assertEqual(tier_for(0.07), WEAK)
        self.assertEqual(tier_for(0.10), NONE)

    def test_sorted_nodes_and_edges(self):
        graph = build_graph(self.results, self.partition)
        self.assertEqual(graph.labels, ("I", "II"))
        self.assertEqual(
            [(e.source, e.target) for e in graph.edges],
            [("I", "I"), ("I", "II"), ("II", "I"), ("II", "II")],
        )
        self.assertEqual(graph.edge("I", "II").tier, STRONG)
        self.assertEqual(graph.nodes[0].members, ("a1", "a2"))

    def test_duplicate_pair(self):
        with self.assertRaises(ValidationError):
            build_graph(self.results + [gc("I", "II", 0.5, 0.2)], self.partition)

    def test_stray_label(self):
        with self.assertRaises(ValidationError):
            build_graph([gc("I", "III", 0.5, 0.2)], self.partition)

    def test_no_results(self):
        graph = build_graph([], self.partition)
        self.assertEqual(graph.labels, ("I", "II"))
        self.assertEqual(graph.edges, ())

    def test_wald_only_edges(self):
        graph = build_graph([EdgeResult("I", "II", wald_p_value=0.01)], self.partition)
        edge = graph.edge("I", "II")
        self.assertIsNone(edge.rho)
        self.assertEqual(edge.p_value, 0.01)
        self.assertEqual(edge.tier, STRONG)

    def test_flow_roles(self):
        graph = build_graph(self.results, self.partition)
        flows = {flow.label: flow for flow in flow_summary(graph)}
        self.assertEqual(flows["I"].role, "source")
        self.assertEqual(flows["II"].role, "sink")
        self.assertAlmostEqual(flows["I"].out_flow, 0.61234)
        self.assertEqual(flows["I"].self_flow, 0.0)
        weak = {flow.label: flow for flow in flow_summary(graph, WEAK)}
        self.assertAlmostEqual(weak["I"].self_flow, 0.45)
        self.assertEqual(len(significant_edges(graph, WEAK)), 2)


class TestDotRenderer(unittest.TestCase):
    def setUp(self):
        partition = SetPartition.from_groups({"I": ["a1", "a2"], "II": ["b1", "b2"]})
        self.graph = build_graph(
            [
                gc("I", "II", 0.61234, 0.03),
                gc("I", "I", 0.45, 0.07),
                gc("II", "I", 0.20, 0.50),
                gc("II", "II", 0.30, 0.10),
            ],
            partition,
        )

    def test_edges_and_styles(self):
        output = DotRenderer().render(self.graph)
        self.assertIn("I -> II", output)
        self.assertIn('label="ρ=0.612, p=0.030"', output)
        self.assertIn("style=solid", output)
        self.assertIn("I -> I ", output)
        self.assertIn("style=dashed", output)
        self.assertNotIn("II -> I ", output)
        self.assertNotIn("II -> II", output)
        self.assertIn('tooltip="a1, a2"', output)

    def test_byte_identical(self):
        self.assertEqual(to_dot(self.graph), to_dot(self.graph))
        self.assertEqual(to_dot(self.graph), DotRenderer().render(self.graph))

    def test_members_hidden(self):
        renderer = DotRenderer()
        renderer.set_style({"show_members": False})
        self.assertNotIn("tooltip", renderer.render(self.graph))

    def test_series_graph(self):
        edges = [
            SeriesEdge("a1", "a2", "I", 0.41, 0.1, 0.0001, True),
            SeriesEdge("b1", "b2", "II", 0.02, 0.1, 0.8, False),
        ]
        output = DotRenderer().render_series(edges, {"I": ["a1", "a2"], "II": ["b1", "b2"]})
        self.assertIn("subgraph cluster_I", output)
        self.assertIn("a1 -> a2", output)
        self.assertNotIn("b1 -> b2", output)
        self.assertIn("style=dotted", output)

    def test_write(self):
        renderer = DotRenderer()
        with tempfile.TemporaryDirectory() as tmp:
            path = renderer.write(renderer.render(self.graph), Path(tmp) / "set_graph.dot")
            self.assertEqual(path.read_bytes().count(b"\r\n"), 0)


class TestJSONRenderer(unittest.TestCase):
    def setUp(self):
        partition = SetPartition.from_groups({"I": ["a1", "a2"], "II": ["b1", "b2"]})
        self.graph = build_graph(
            [
                EdgeResult("I", "II", gc("I", "II", 0.6123456789012345, 0.03), report(0.61), 0.02),
                EdgeResult("II", "I", gc("II", "I", 0.2, 0.5), None, 0.4),
            ],
            partition,
        )

    def test_structure(self):
        parsed = json.loads(JSONRenderer().render(self.graph, config={"B": 19}))
        self.assertEqual(set(parsed), {"nodes", "edges", "config", "flow"})
        self.assertEqual(parsed["config"], {"B": 19})
        edge = parsed["edges"][0]
        self.assertEqual(edge["from"], "I")
        self.assertEqual(edge["to"], "II")
        self.assertEqual(edge["rho"], 0.6123456789012345)
        self.assertEqual(edge["wald_p_value"], 0.02)
        self.assertEqual(edge["l_used"], 5)
        self.assertEqual(edge["loadings"]["response"][0], {"series": "b1", "weight": 0.9})
        self.assertNotIn("loadings", parsed["edges"][1])

    def test_within_set_section(self):
        within = [SeriesEdge("a1", "a2", "I", 0.41, 0.1, 0.0001, True)]
        parsed = json.loads(JSONRenderer().render(self.graph, within_set=within))
        self.assertEqual(parsed["within_set"][0]["set"], "I")
        self.assertTrue(parsed["within_set"][0]["significant"])

    def test_compact(self):
        renderer = JSONRenderer()
        renderer.set_style({"pretty": False})
        output = renderer.render(self.graph)
        self.assertTrue(output.endswith("}\n"))
        self.assertEqual(output.count("\n"), 1)

    def test_rejects_nan(self):
        graph = build_graph([gc("I", "II", float("nan"), 0.5)])
        with self.assertRaises(ValueError):
            JSONRenderer().render(graph)


class TestMarkdownRenderer(unittest.TestCase):
    def test_summary(self):
        partition = SetPartition.from_groups({"I": ["a1", "a2"], "II": ["b1", "b2"]})
        graph = build_graph(
            [
                EdgeResult("I", "II", gc("I", "II", 0.61, 0.03), report(0.61)),
                EdgeResult("II", "I", gc("II", "I", 0.2, 0.5), report(0.2)),
            ],
            partition,
        )
        output = MarkdownRenderer().render(graph, {"B": 19, "alpha": 0.05})
        self.assertIn("- B: 19", output)
        self.assertIn("| I | II | 0.6100 | 0.0300 | strong |", output)
        self.assertIn("2 directed tests.", output)
        self.assertIn("| I | 0.610 | 0.000 | 0.000 | source |", output)
        self.assertIn("- I->II: a2 (-0.800) -> b1 (+0.900)", output)
        self.assertNotIn("II->I:", output)
        self.assertNotIn("Wald", output)

    def test_detection_tables(self):
        counts = REFERENCE_COUNTS[("sim1", "pcca")]
        matrix = DetectionMatrix(counts, 10_000, "pcca")
        truth = np.array([[1, 1, 0], [0, 1, 1], [0, 1, 0]], dtype=bool)
        rows = calibration_report(matrix, SimSpec("sim1"))
        output = MarkdownRenderer().render_detection({"pcca": matrix}, truth, rows)
        self.assertIn("## pcca (10000 runs)", output)
        self.assertIn("| I | **1.000** | **0.854** | 0.051 |", output)
        self.assertIn("Calibration: PASS (9/9 cells)", output)


if __name__ == "__main__":
    unittest.main()
