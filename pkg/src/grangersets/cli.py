"""
Command-line entry point: ``grangersets analyze | simulate | selftest``.

Exit status is 0 on success, 2 when inputs, flags or config files are invalid,
and 3 when a numerical step, the bootstrap or the Monte Carlo harness fails.
"""

from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import argparse
import json
import logging
import sys

import numpy as np
import pandas as pd
import scipy

from .core.analyzer import METHODS, SetGrangerAnalyzer
from .core.bootstrap import AUTO, BootstrapConfig, XStream
from .core.graph import build_graph
from .core.lagcov import ConditioningRule
from .core.panel import load_panel, load_partition
from .extractors import ConfigExtractor
from .renderers import DotRenderer, JSONRenderer, MarkdownRenderer
from .selftest import run_selftest
from .simulation import SimSpec, calibration_frame, calibration_report, generate, run_monte_carlo, truth_frame
from .utils.exceptions import (
    ConfigurationError,
    GrangerSetsError,
    IngestionError,
    MonteCarloError,
    NumericalError,
    ResamplingError,
    ValidationError,
    format_error,
    validate_in_range,
    validate_positive,
)
from .utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

INPUT_ERRORS = (IngestionError, ValidationError, ConfigurationError)
NUMERICAL_ERRORS = (NumericalError, ResamplingError, MonteCarloError)

SUBCOMMANDS = ("analyze", "simulate", "selftest")


def parse_block_length(value: Union[int, str]) -> Union[int, str]:
    if value == AUTO:
        return AUTO
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ValidationError("block length must be an integer or 'auto'", details={"block_length": value})


def parse_methods(value: Union[str, Sequence[str]]) -> Tuple[str, ...]:
    if isinstance(value, str):
        value = value.split(",")
    methods = tuple(dict.fromkeys(m.strip() for m in value if m.strip()))
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise ValidationError(
            "methods must be a comma-separated subset of pcca,wald",
            details={"methods": ",".join(value)},
        )
    return methods


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    panel: Optional[str] = None
    partition: Optional[str] = None
    out: Optional[str] = None
    bootstraps: int = 1000
    block_length: Union[int, str] = AUTO
    alpha: float = 0.05
    seed: int = 0
    runs: int = 100
    which: str = "sim1"
    methods: Tuple[str, ...] = ("pcca",)
    workers: int = 1
    include_unassigned_in_x: bool = True
    skip_self_loops: bool = False
    x_stream: str = XStream.RESPONSE.value
    ridge: Optional[float] = None
    T: int = 100
    coefficient: Optional[float] = None
    burn_in: int = 100
    within_set_var: bool = False
    log_level: str = "INFO"
    log_file: Optional[str] = None

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigurationError("unknown subcommand", details={"subcommand": self.subcommand})
        object.__setattr__(self, "block_length", parse_block_length(self.block_length))
        object.__setattr__(self, "methods", parse_methods(self.methods))
        validate_positive(self.bootstraps, "bootstraps")
        validate_positive(self.runs, "runs")
        validate_positive(self.workers, "workers")
        validate_in_range(self.alpha, "alpha", 0.0, 1.0)
        if self.x_stream not in {s.value for s in XStream}:
            raise ValidationError("unknown x stream", details={"x_stream": self.x_stream})
        if self.subcommand == "analyze" and not (self.panel and self.partition):
            raise ConfigurationError("analyze needs --panel and --partition")
        if self.subcommand in ("analyze", "simulate") and not self.out:
            raise ConfigurationError(f"{self.subcommand} needs --out")
        # build once so every range check runs before any output is written
        self.bootstrap_config()
        if self.subcommand == "simulate":
            self.sim_spec()

    def bootstrap_config(self) -> BootstrapConfig:
        return BootstrapConfig(
            replicates=self.bootstraps,
            block_length=self.block_length,
            alpha=self.alpha,
            seed=self.seed,
            x_stream=XStream(self.x_stream),
            conditioning=ConditioningRule(include_unassigned=self.include_unassigned_in_x),
            ridge=self.ridge,
        )

    def sim_spec(self) -> SimSpec:
        return SimSpec(
            which=self.which,
            T=self.T,
            coefficient=self.coefficient,
            burn_in=self.burn_in,
            seed=self.seed,
        )

    def as_dict(self) -> Dict[str, Any]:
        values = asdict(self)
        values["methods"] = list(self.methods)
        return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="json5 file with defaults for any flag")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--bootstraps", "-B", type=int, help="bootstrap replicates per test (default 1000)")
    common.add_argument("--block-length", help="block length or 'auto' (default auto)")
    common.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    common.add_argument("--methods", help="comma-separated subset of pcca,wald")
    common.add_argument("--workers", type=int, help="worker processes (default 1)")
    common.add_argument(
        "--include-unassigned-in-x",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="condition on series outside the partition (default true)",
    )
    common.add_argument("--x-stream", choices=[s.value for s in XStream], help="block stream of the conditioners")
    common.add_argument("--ridge", type=float, help="ridge added to the conditioning covariance")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--log-file")

    parser = argparse.ArgumentParser(
        prog="grangersets",
        description="Granger causality between sets of time series.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    analyze = sub.add_parser("analyze", parents=[common], help="test every ordered pair of sets")
    analyze.add_argument("--panel", help="CSV panel: header of series names, one row per time point")
    analyze.add_argument("--partition", help="series_name,set_label lines")
    analyze.add_argument("--skip-self-loops", action="store_true", default=None)
    analyze.add_argument("--within-set-var", action="store_true", default=None)

    simulate = sub.add_parser("simulate", parents=[common], help="Monte Carlo over a benchmark network")
    simulate.add_argument("--which", choices=["sim1", "sim2"])
    simulate.add_argument("--runs", type=int, help="Monte Carlo replicates (default 100)")
    simulate.add_argument("--T", type=int, dest="T", help="panel length (default 100)")
    simulate.add_argument("--coefficient", type=float)
    simulate.add_argument("--burn-in", type=int)

    sub.add_parser("selftest", parents=[common], help="run the numerical self-checks")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """CLI flag, then config file, then built-in default."""
    file_values: Dict[str, Any] = {}
    if args.config:
        file_values = ConfigExtractor(args.config).extract()

    values: Dict[str, Any] = {"subcommand": args.subcommand}
    cli_values = vars(args)
    for f in fields(RunConfig):
        if f.name == "subcommand":
            continue
        if cli_values.get(f.name) is not None:
            values[f.name] = cli_values[f.name]
        elif f.name in file_values:
            values[f.name] = file_values[f.name]
    return RunConfig(**values)


def _versions() -> Dict[str, str]:
    from . import __version__

    return {
        "grangersets": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


def write_manifest(cfg: RunConfig, out: Path, files: List[str]) -> Path:
    manifest = {
        "config": cfg.as_dict(),
        "versions": _versions(),
        "files": sorted(files + ["manifest.json"]),
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8", newline="\n")
    return path


def cmd_analyze(cfg: RunConfig) -> int:
    panel = load_panel(cfg.panel)
    partition = load_partition(cfg.partition)
    bootstrap = cfg.bootstrap_config()
    analyzer = SetGrangerAnalyzer(
        panel,
        partition,
        bootstrap,
        methods=cfg.methods,
        include_self_loops=not cfg.skip_self_loops,
    )
    l_used = bootstrap.resolve_block_length(panel.T - 1) if "pcca" in cfg.methods else None
    unassigned = partition.unassigned(panel)
    if unassigned:
        logger.info("Series outside the partition: %s", ", ".join(unassigned))

    results = analyzer.run(cfg.workers)
    graph = build_graph(results, partition)
    within = analyzer.within_set(cfg.alpha) if cfg.within_set_var else None

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    run_config = {
        "B": cfg.bootstraps,
        "l": l_used,
        "alpha": cfg.alpha,
        "seed": cfg.seed,
        "methods": list(cfg.methods),
        "x_stream": cfg.x_stream,
        "include_unassigned_in_x": cfg.include_unassigned_in_x,
    }

    dot = DotRenderer()
    files = []
    dot.write(dot.render(graph), out / "set_graph.dot")
    files.append("set_graph.dot")
    json_renderer = JSONRenderer()
    json_renderer.write(json_renderer.render(graph, run_config, within), out / "results.json")
    files.append("results.json")
    markdown = MarkdownRenderer()
    summary = markdown.render(graph, run_config)
    markdown.write(summary, out / "summary.md")
    files.append("summary.md")
    if within is not None:
        groups = {label: partition.members(label) for label in partition.labels}
        dot.write(dot.render_series(within, groups), out / "series_graph.dot")
        files.append("series_graph.dot")
    write_manifest(cfg, out, files)

    sys.stdout.write(summary)
    logger.info("Wrote %d files to %s", len(files) + 1, out)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    spec = cfg.sim_spec()
    # also checks stability before any output exists
    _, partition, truth = generate(spec)
    matrices = run_monte_carlo(spec, cfg.methods, cfg.runs, cfg.bootstrap_config(), cfg.workers)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    calibration = []
    for method, matrix in matrices.items():
        matrix.write_csv(out / f"counts_{method}.csv", "counts")
        matrix.write_csv(out / f"rates_{method}.csv", "rates")
        matrix.write_csv(out / f"se_{method}.csv", "se")
        files += [f"counts_{method}.csv", f"rates_{method}.csv", f"se_{method}.csv"]
        calibration += calibration_report(matrix, spec)

    truth_frame(truth, partition.labels).to_csv(out / "truth.csv", lineterminator="\n")
    files.append("truth.csv")
    calibration_frame(calibration).to_csv(
        out / "calibration.csv", index=False, float_format="%.6f", lineterminator="\n"
    )
    files.append("calibration.csv")

    renderer = MarkdownRenderer()
    summary = renderer.render_detection(matrices, truth, calibration, title=f"Monte Carlo {spec.which}")
    renderer.write(summary, out / "summary.md")
    files.append("summary.md")
    write_manifest(cfg, out, files)

    sys.stdout.write(summary)
    return EXIT_OK


def cmd_selftest(cfg: RunConfig) -> int:
    results = run_selftest(cfg.seed)
    for result in results:
        status = "ok" if result.passed else "FAILED"
        sys.stdout.write(f"{result.name}: {status} ({result.detail})\n")
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        records = [asdict(result) for result in results]
        (out / "selftest.json").write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")
        write_manifest(cfg, out, ["selftest.json"])
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


COMMANDS = {"analyze": cmd_analyze, "simulate": cmd_simulate, "selftest": cmd_selftest}


def _report(error: GrangerSetsError, status: int) -> int:
    logger.error("%s", error.message)
    sys.stderr.write(format_error(error) + "\n")
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        cfg = resolve_config(args)
    except INPUT_ERRORS as e:
        setup_logging(level=args.log_level or "INFO", log_file=args.log_file)
        return _report(e, EXIT_INPUT)
    setup_logging(level=cfg.log_level, log_file=cfg.log_file, include_process=cfg.workers > 1)

    try:
        return COMMANDS[cfg.subcommand](cfg)
    except INPUT_ERRORS as e:
        return _report(e, EXIT_INPUT)
    except NUMERICAL_ERRORS as e:
        return _report(e, EXIT_NUMERICAL)


if __name__ == "__main__":
    sys.exit(main())
