"""
Time-series panels, set partitions and lag alignment.

Rows of a panel are time points and columns are series. Every downstream
computation works on the lag-aligned pair ``(present, lagged)`` built by
:func:`lag_align`.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union
import io
import logging

import numpy as np
import pandas as pd

from ..utils.exceptions import IngestionError, ValidationError, validate_unique

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MIN_TIME_POINTS = 3


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=np.float64, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class TimeSeriesPanel:
    series_names: Tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        names = tuple(str(name) for name in self.series_names)
        values = _frozen(self.values)
        if values.ndim != 2:
            raise ValidationError(
                "panel values must be a 2-d matrix",
                details={"ndim": values.ndim},
            )
        T, k = values.shape
        if k < 1:
            raise ValidationError("panel needs at least one series")
        if len(names) != k:
            raise ValidationError(
                "series_names length does not match the column count",
                details={"names": len(names), "columns": k},
            )
        validate_unique(names, "series_names")
        if T < MIN_TIME_POINTS:
            raise ValidationError(
                f"panel needs at least {MIN_TIME_POINTS} time points",
                details={"T": T},
            )
        if not np.all(np.isfinite(values)):
            rows, cols = np.nonzero(~np.isfinite(values))
            raise ValidationError(
                "panel contains missing or non-finite values",
                details={"row": int(rows[0]) + 1, "series": names[cols[0]]},
            )
        object.__setattr__(self, "series_names", names)
        object.__setattr__(self, "values", values)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    def column_indices(self, names: Iterable[str]) -> List[int]:
        index = {name: i for i, name in enumerate(self.series_names)}
        missing = [name for name in names if name not in index]
        if missing:
            raise ValidationError(
                "unknown series in panel",
                details={"series": ", ".join(missing)},
            )
        return [index[name] for name in names]

    def __repr__(self) -> str:
        return f"TimeSeriesPanel(T={self.T}, k={self.k})"


@dataclass(frozen=True, eq=False)
class SetPartition:
    """Disjoint assignment of series names to set labels."""

    assignments: Mapping[str, str]
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        assignments = {str(s): str(label) for s, label in self.assignments.items()}
        labels = tuple(self.labels) if self.labels else tuple(
            dict.fromkeys(assignments.values())
        )
        validate_unique(labels, "labels")
        for series, label in assignments.items():
            if not series:
                raise ValidationError(
                    "partition entry without a series name",
                    details={"label": label},
                )
            if not label:
                raise ValidationError(
                    "series assigned to an empty label",
                    details={"series": series},
                )
            if label not in labels:
                raise ValidationError(
                    "series assigned to an undeclared label",
                    details={"series": series, "label": label},
                )
        empty = [label for label in labels if label not in assignments.values()]
        if empty:
            raise ValidationError(
                "every label needs at least one member",
                details={"labels": ", ".join(empty)},
            )
        object.__setattr__(self, "assignments", assignments)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_groups(cls, groups: Mapping[str, Sequence[str]]) -> "SetPartition":
        assignments: Dict[str, str] = {}
        for label, members in groups.items():
            for series in members:
                if series in assignments:
                    raise ValidationError(
                        "series assigned to two labels",
                        details={
                            "series": series,
                            "labels": f"{assignments[series]}, {label}",
                        },
                    )
                assignments[series] = label
        return cls(assignments, tuple(groups.keys()))

    def members(self, label: str) -> Tuple[str, ...]:
        if label not in self.labels:
            raise ValidationError("unknown set label", details={"label": label})
        return tuple(s for s, lab in self.assignments.items() if lab == label)

    def sizes(self) -> Dict[str, int]:
        return {label: len(self.members(label)) for label in self.labels}

    def unassigned(self, panel: TimeSeriesPanel) -> Tuple[str, ...]:
        return tuple(s for s in panel.series_names if s not in self.assignments)

    def validate_against(self, panel: TimeSeriesPanel):
        unknown = [s for s in self.assignments if s not in panel.series_names]
        if unknown:
            raise ValidationError(
                "partition names series that are not in the panel",
                details={"series": ", ".join(unknown)},
            )
        if len(self.assignments) > panel.k:
            raise ValidationError(
                "partition has more members than the panel has series",
                details={"members": len(self.assignments), "k": panel.k},
            )

    def __repr__(self) -> str:
        sizes = ", ".join(f"{label}:{n}" for label, n in self.sizes().items())
        return f"SetPartition({sizes})"


@dataclass(frozen=True, eq=False)
class LaggedDesign:
    """Row r pairs time point r+1 (``present``) with time point r (``lagged``)."""

    series_names: Tuple[str, ...]
    present: np.ndarray
    lagged: np.ndarray

    def __post_init__(self):
        present = _frozen(self.present)
        lagged = _frozen(self.lagged)
        if present.shape != lagged.shape or present.ndim != 2:
            raise ValidationError(
                "present and lagged matrices must share one 2-d shape",
                details={"present": present.shape, "lagged": lagged.shape},
            )
        if present.shape[1] != len(self.series_names):
            raise ValidationError(
                "column count does not match series_names",
                details={"columns": present.shape[1], "names": len(self.series_names)},
            )
        object.__setattr__(self, "series_names", tuple(self.series_names))
        object.__setattr__(self, "present", present)
        object.__setattr__(self, "lagged", lagged)

    @property
    def n_rows(self) -> int:
        return self.present.shape[0]

    def column_indices(self, names: Iterable[str]) -> List[int]:
        index = {name: i for i, name in enumerate(self.series_names)}
        return [index[name] for name in names]


def lag_align(panel: TimeSeriesPanel) -> LaggedDesign:
    if panel.T < MIN_TIME_POINTS:
        raise ValidationError(
            f"lag alignment needs at least {MIN_TIME_POINTS} time points",
            details={"T": panel.T},
        )
    return LaggedDesign(
        series_names=panel.series_names,
        present=panel.values[1:],
        lagged=panel.values[:-1],
    )


def _read_table(path: PathLike, what: str, comment_lines: bool = False, **kwargs) -> pd.DataFrame:
    """``comment_lines`` drops lines whose first non-blank character is ``#``."""
    path = Path(path)
    if not path.exists():
        raise IngestionError(f"{what} file not found", details={"path": str(path)})
    try:
        source: Union[Path, io.StringIO] = path
        if comment_lines:
            lines = path.read_text(encoding="utf-8").splitlines()
            kept = (line for line in lines if not line.lstrip().startswith("#"))
            source = io.StringIO("\n".join(kept))
        return pd.read_csv(
            source,
            header=None,
            dtype=str,
            na_filter=False,
            encoding="utf-8",
            skip_blank_lines=True,
            **kwargs,
        )
    except pd.errors.EmptyDataError as e:
        raise IngestionError(f"{what} file is empty", details={"path": str(path)}, cause=e)
    except pd.errors.ParserError as e:
        raise IngestionError(
            f"{what} file has ragged rows", details={"path": str(path)}, cause=e
        )
    except UnicodeDecodeError as e:
        raise IngestionError(
            f"{what} file is not valid UTF-8", details={"path": str(path)}, cause=e
        )


def load_panel(path: PathLike, delimiter: str = ",") -> TimeSeriesPanel:
    """Read a panel CSV: a header of series names, then one row per time point."""
    table = _read_table(path, "panel", sep=delimiter)
    header = [str(name).strip() for name in table.iloc[0].tolist()]
    if any(not name for name in header):
        raise IngestionError("panel header has an empty series name", details={"path": str(path)})
    try:
        validate_unique(header, "panel header")
    except ValidationError as e:
        raise IngestionError(e.message, details={"path": str(path), **e.details})

    body = table.iloc[1:]
    values = np.empty(body.shape, dtype=np.float64)
    for r, row in enumerate(body.itertuples(index=False), start=1):
        for c, cell in enumerate(row):
            if not isinstance(cell, str):
                raise IngestionError(
                    "panel row is shorter than the header",
                    details={"path": str(path), "row": r, "line": r + 1},
                )
            try:
                values[r - 1, c] = float(cell)
            except ValueError as e:
                raise IngestionError(
                    "non-numeric cell in panel",
                    details={
                        "path": str(path),
                        "row": r,
                        "line": r + 1,
                        "column": header[c],
                        "cell": cell,
                    },
                    cause=e,
                )

    panel = TimeSeriesPanel(tuple(header), values)
    logger.info("Loaded panel %s with T=%d, k=%d", path, panel.T, panel.k)
    return panel


def write_panel(panel: TimeSeriesPanel, path: PathLike, delimiter: str = ","):
    frame = pd.DataFrame(panel.values, columns=list(panel.series_names))
    frame.to_csv(
        path,
        sep=delimiter,
        index=False,
        float_format="%.17g",
        lineterminator="\n",
        encoding="utf-8",
    )


def load_partition(path: PathLike) -> SetPartition:
    """Read ``series_name,set_label`` lines; a line starting with ``#`` is a
    comment, a ``#`` inside a name is kept."""
    table = _read_table(path, "partition", comment_lines=True, sep=",")
    if table.shape[1] != 2:
        raise IngestionError(
            "partition lines must have exactly two fields",
            details={"path": str(path), "fields": table.shape[1]},
        )

    assignments: Dict[str, str] = {}
    for line_no, (series, label) in enumerate(table.itertuples(index=False), start=1):
        series = series.strip() if isinstance(series, str) else ""
        label = label.strip() if isinstance(label, str) else ""
        if not series:
            raise ValidationError(
                "partition entry without a series name",
                details={"path": str(path), "entry": line_no, "label": label},
            )
        if not label:
            raise ValidationError(
                "series assigned to an empty label",
                details={"path": str(path), "entry": line_no, "series": series},
            )
        previous = assignments.get(series)
        if previous is not None and previous != label:
            raise ValidationError(
                "series assigned to two labels",
                details={"series": series, "labels": f"{previous}, {label}"},
            )
        if previous == label:
            logger.warning("Duplicate partition entry %s,%s ignored", series, label)
        assignments[series] = label

    partition = SetPartition(assignments)
    logger.info("Loaded partition %s: %r", path, partition)
    return partition
