"""Machine-readable experiment reports with deterministic serialization.

Reports must come out byte-identical across repeated runs of the same
configuration, so serialization is fully specified here: insertion-ordered
fields, every float printed with 17 significant digits, non-finite floats as
quoted markers, and no wall-clock data in the rendered document (timing stays
on the record object for the caller).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ReportRecord:
    """One experiment run: resolved inputs, per-cell results, and a summary."""

    experiment: str
    config_echo: dict
    cells: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    #: wall-clock seconds; deliberately excluded from the serialized report
    timing_seconds: float | None = None

    def to_object(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config_echo,
            "cells": self.cells,
            "summary": self.summary,
        }


def format_float(x: float) -> str:
    if np.isnan(x):
        return '"NaN"'
    if np.isinf(x):
        return '"INF"' if x > 0 else '"-INF"'
    return "%.17g" % x


def _render_value(value, pieces: list):
    if value is None:
        pieces.append("null")
    elif isinstance(value, (bool, np.bool_)):
        pieces.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        pieces.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        pieces.append(format_float(float(value)))
    elif isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        pieces.append("{\"re\": %s, \"im\": %s}" % (format_float(value.real), format_float(value.imag)))
    elif isinstance(value, str):
        pieces.append('"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(value, dict):
        pieces.append("{")
        for i, (key, item) in enumerate(value.items()):
            if i:
                pieces.append(", ")
            pieces.append('"' + str(key) + '": ')
            _render_value(item, pieces)
        pieces.append("}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        items = value.tolist() if isinstance(value, np.ndarray) else value
        pieces.append("[")
        for i, item in enumerate(items):
            if i:
                pieces.append(", ")
            _render_value(item, pieces)
        pieces.append("]")
    else:
        raise TypeError(f"cannot serialize value of type {type(value)!r}")


def render_object(record: ReportRecord) -> str:
    """Self-contained structured document (JSON-compatible when finite)."""
    pieces: list = []
    _render_value(record.to_object(), pieces)
    return "".join(pieces) + "\n"


def _cell_value_text(value) -> str:
    pieces: list = []
    _render_value(value, pieces)
    text = "".join(pieces)
    return text.strip('"') if isinstance(value, str) else text


def render_table(record: ReportRecord) -> str:
    """Flat tab-separated rows, one per grid cell, with summary comments."""
    lines = [f"# experiment\t{record.experiment}"]
    for key, value in record.config_echo.items():
        lines.append(f"# config.{key}\t{_cell_value_text(value)}")
    if record.cells:
        columns: list = []
        for cell in record.cells:
            for key in cell:
                if key not in columns:
                    columns.append(key)
        lines.append("\t".join(columns))
        for cell in record.cells:
            lines.append("\t".join(_cell_value_text(cell.get(col)) for col in columns))
    for key, value in record.summary.items():
        lines.append(f"# summary.{key}\t{_cell_value_text(value)}")
    return "\n".join(lines) + "\n"


def render(record: ReportRecord, output_format: str) -> str:
    if output_format == "table":
        return render_table(record)
    return render_object(record)


def failing_cells(record: ReportRecord) -> list:
    return [cell for cell in record.cells if not cell.get("ok", True)]


def record_passes(record: ReportRecord) -> bool:
    if failing_cells(record):
        return False
    return all(
        bool(value) for key, value in record.summary.items() if key.endswith("_ok")
    )
