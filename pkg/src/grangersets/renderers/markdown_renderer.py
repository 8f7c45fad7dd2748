"""
Plain-text summaries in Markdown table syntax, for analysis runs and for
Monte Carlo runs.
"""

from typing import Mapping, Optional, Sequence

import numpy as np

from .base import BaseRenderer
from ..core.graph import SetGraph, flow_summary
from ..simulation.montecarlo import CalibrationRow, DetectionMatrix


def _fmt(value: Optional[float], digits: int = 4) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


class MarkdownRenderer(BaseRenderer):
    def __init__(self, digits: int = 4, show_loadings: bool = True):
        super().__init__()
        self.digits = digits
        self.show_loadings = show_loadings

    def render(self, data: SetGraph, config: Optional[Mapping[str, object]] = None) -> str:
        md = "# Set-level Granger causality\n\n"
        if config:
            md += "## Settings\n\n"
            md += "".join(f"- {key}: {value}\n" for key, value in config.items())
            md += "\n"

        with_wald = any(edge.wald_p_value is not None for edge in data.edges)
        md += "## Tests\n\n"
        header = "| From | To | rho | p-value | Tier |"
        rule = "|------|----|-----|---------|------|"
        if with_wald:
            header += " Wald p-value |"
            rule += "--------------|"
        md += header + "\n" + rule + "\n"
        for edge in data.edges:
            row = (
                f"| {edge.source} | {edge.target} | {_fmt(edge.rho, self.digits)} "
                f"| {_fmt(edge.p_value, self.digits)} | {edge.tier} |"
            )
            if with_wald:
                row += f" {_fmt(edge.wald_p_value, self.digits)} |"
            md += row + "\n"
        md += f"\n{len(data.edges)} directed tests.\n\n"

        md += "## Flow\n\n"
        md += "| Set | Out | In | Self | Role |\n"
        md += "|-----|-----|----|------|------|\n"
        for flow in flow_summary(data):
            md += (
                f"| {flow.label} | {flow.out_flow:.3f} | {flow.in_flow:.3f} "
                f"| {flow.self_flow:.3f} | {flow.role} |\n"
            )

        if self.show_loadings:
            lines = []
            for edge in data.edges:
                if edge.tier == "none" or edge.loadings is None:
                    continue
                response = edge.loadings.dominant("response")
                predictor = edge.loadings.dominant("predictor")
                lines.append(
                    f"- {edge.source}->{edge.target}: "
                    f"{predictor.series} ({predictor.weight:+.3f}) -> "
                    f"{response.series} ({response.weight:+.3f})\n"
                )
            if lines:
                md += "\n## Dominant series\n\n" + "".join(lines)
        return md

    def render_detection(
        self,
        matrices: Mapping[str, DetectionMatrix],
        truth: np.ndarray,
        calibration: Sequence[CalibrationRow] = (),
        title: str = "Monte Carlo",
    ) -> str:
        md = f"# {title}\n\n"
        for method, matrix in matrices.items():
            md += f"## {method} ({matrix.runs} runs"
            md += f", {matrix.failed_runs} failed)\n\n" if matrix.failed_runs else ")\n\n"
            labels = matrix.labels
            md += "| From \\ To | " + " | ".join(labels) + " |\n"
            md += "|" + "---|" * (len(labels) + 1) + "\n"
            rates = matrix.rates
            for f, source in enumerate(labels):
                cells = []
                for t in range(len(labels)):
                    cell = f"{rates[f, t]:.3f}"
                    cells.append(f"**{cell}**" if truth[f, t] else cell)
                md += f"| {source} | " + " | ".join(cells) + " |\n"
            md += "\n"

        if calibration:
            failed = [row for row in calibration if not row.passed]
            md += "## Calibration\n\n"
            for row in failed:
                md += (
                    f"- {row.method} {row.source}->{row.target}: observed {row.observed:.3f}, "
                    f"reference {row.reference:.3f} +/- {row.tolerance:.3f}\n"
                )
            verdict = "PASS" if not failed else "FAIL"
            md += f"\nCalibration: {verdict} ({len(calibration) - len(failed)}/{len(calibration)} cells)\n"
        return md

    def set_style(self, style):
        self.style = style
        if isinstance(style, dict):
            if "digits" in style:
                self.digits = style["digits"]
            if "loadings" in style:
                self.show_loadings = style["loadings"]
