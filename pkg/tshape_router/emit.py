"""Writing sweep tables to disk and reading them back.

CSV files start with ``# key = <json>`` header lines carrying the full
metadata, followed by the column header and one row per grid point. Floats
are written with ``repr``, the shortest decimal string that round-trips, so
a table read back with :func:`read_csv` is bit-identical to the one written.
"""

from __future__ import annotations

import csv
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Union

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .errors import IoFailureError
from .sweep import SweepTable

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CHECK_COLUMN = "unitarity_residual"
_AXIS_LABELS = {"E": "E (units of ξ)", "omegaA": "ω_A (units of ξ)"}


class Format(str, Enum):
    CSV = "csv"
    JSON = "json"
    SVG = "svg"


def _floats(values: np.ndarray) -> List[float]:
    return [float(v) for v in values]


def _write_csv(table: SweepTable, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fp:
        for key in sorted(table.metadata):
            fp.write(f"# {key} = {json.dumps(table.metadata[key], sort_keys=True)}\n")
        writer = csv.writer(fp, lineterminator="\n")
        if not table.columns:
            # Nothing was evaluated, so there are no rows to tabulate.
            writer.writerow([table.x_name])
            return
        names = list(table.columns)
        writer.writerow([table.x_name, *names, CHECK_COLUMN])
        columns = [table.x, *(table.columns[name] for name in names), table.unitarity_residual]
        for row in zip(*(_floats(column) for column in columns)):
            writer.writerow([repr(value) for value in row])


def _write_json(table: SweepTable, path: Path) -> None:
    columns: Dict[str, List[float]] = {table.x_name: _floats(table.x)}
    for name, values in table.columns.items():
        columns[name] = _floats(values)
    if table.columns:
        columns[CHECK_COLUMN] = _floats(table.unitarity_residual)
    document = {"metadata": table.metadata, "x": table.x_name, "columns": columns}
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(document, fp, indent=2, sort_keys=True)
        fp.write("\n")


def _write_svg(table: SweepTable, path: Path) -> None:
    # Fixed hash salt and no date stamp keep repeated renders byte-identical.
    with matplotlib.rc_context({"svg.hashsalt": "tshape-router", "svg.fonttype": "path"}):
        fig = Figure(figsize=(6.0, 4.0))
        ax = fig.add_subplot()
        for name, values in table.columns.items():
            ax.plot(table.x, values, label=name, linewidth=1.2)
        ax.set_xlabel(_AXIS_LABELS.get(table.x_name, table.x_name))
        ax.set_ylabel("probability")
        ax.set_ylim(-0.02, 1.02)
        if table.columns:
            ax.legend(loc="best")
        params = table.metadata.get("params", {})
        if params:
            ax.set_title(
                ", ".join(f"{key}={value}" for key, value in params.items() if value is not None),
                fontsize=7,
            )
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})


_WRITERS = {Format.CSV: _write_csv, Format.JSON: _write_json, Format.SVG: _write_svg}


def emit(table: SweepTable, fmt: Union[Format, str], path: PathLike) -> Path:
    """Write ``table`` to ``path`` in the requested format.

    Raises
    ------
    IoFailureError
        If the file cannot be written.
    """
    fmt = Format(fmt)
    target = Path(path)
    try:
        _WRITERS[fmt](table, target)
    except OSError as e:
        raise IoFailureError(f"cannot write {fmt.value} output to {target}: {e}") from e
    logger.info("wrote %d rows to %s", table.n_rows, target)
    return target


def read_csv(path: PathLike) -> SweepTable:
    """Parse a CSV file written by :func:`emit` back into a :class:`SweepTable`.

    Raises
    ------
    IoFailureError
        If the file cannot be read or is not in the expected layout.
    """
    metadata: Dict[str, Any] = {}
    try:
        with open(path, "r", encoding="utf-8", newline="") as fp:
            lines = fp.read().splitlines()
    except OSError as e:
        raise IoFailureError(f"cannot read {path}: {e}") from e

    body = []
    for line in lines:
        if line.startswith("# "):
            key, sep, value = line[2:].partition(" = ")
            if not sep:
                raise IoFailureError(f"malformed header line in {path}: {line!r}")
            try:
                metadata[key] = json.loads(value)
            except json.JSONDecodeError as e:
                raise IoFailureError(f"malformed header value for {key!r} in {path}: {e}") from e
        elif line:
            body.append(line)
    if not body:
        raise IoFailureError(f"{path} has no column header")

    rows = list(csv.reader(body))
    header, data = rows[0], rows[1:]
    try:
        values = np.array([[float(cell) for cell in row] for row in data], dtype=float)
    except ValueError as e:
        raise IoFailureError(f"non-numeric cell in {path}: {e}") from e
    values = values.reshape(len(data), len(header))

    by_name = {name: values[:, i] for i, name in enumerate(header)}
    x_name = header[0]
    residual = by_name.pop(CHECK_COLUMN, np.zeros(len(data)))
    x = by_name.pop(x_name)
    return SweepTable(
        metadata=metadata,
        x_name=x_name,
        x=x,
        columns=by_name,
        unitarity_residual=residual,
    )


def emit_record(record: Mapping[str, Any], path: PathLike) -> Path:
    """Write a JSON record (comparison report, design report, ...) to ``path``."""
    target = Path(path)
    try:
        with open(target, "w", encoding="utf-8") as fp:
            json.dump(record, fp, indent=2, sort_keys=True)
            fp.write("\n")
    except OSError as e:
        raise IoFailureError(f"cannot write record to {target}: {e}") from e
    return target
