"""Rendering of result tables to markdown, CSV and JSON.

Rendering is deterministic: the same table produces byte-identical output,
always with a ``.`` decimal separator regardless of locale. The JSON form
mirrors the :class:`ReportTable` structure exactly, so render -> parse ->
render round-trips to the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .errors import SchemaError

__all__ = [
    "ReportTable",
    "render",
    "parse_json_table",
    "format_uncertainty",
    "format_sig",
    "FORMATS",
]

FORMATS = ("markdown", "csv", "json")

#: Below this magnitude a value is rendered in the grouped scientific style
#: "(m ± s) × 10⁻⁹" for visual comparability across agents.
SCI_THRESHOLD = 1e-6


@dataclass(frozen=True)
class ReportTable:
    """A titled table of cells with per-column units and footnotes."""

    title: str
    columns: tuple[tuple[str, str], ...]  # (name, unit) pairs
    rows: tuple[tuple, ...]
    footnotes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple((str(n), str(u)) for n, u in self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        object.__setattr__(self, "footnotes", tuple(self.footnotes))
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise SchemaError(f"row {i} has {len(row)} cells, table has "
                                  f"{len(self.columns)} columns")


def render(table: ReportTable, format: str = "markdown") -> bytes:
    """Render a table to UTF-8 bytes in the requested format."""
    if format == "markdown":
        return _render_markdown(table)
    if format == "csv":
        return _render_csv(table)
    if format == "json":
        return _render_json(table)
    raise SchemaError(f"unknown render format {format!r}; supported: {', '.join(FORMATS)}")


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _header(name: str, unit: str) -> str:
    return f"{name} ({unit})" if unit else name


def _render_markdown(table: ReportTable) -> bytes:
    out = []
    if table.title:
        out.append(f"### {table.title}")
        out.append("")
    headers = [_header(n, u) for n, u in table.columns]
    out.append("| " + " | ".join(headers) + " |")
    out.append("|" + "|".join(" --- " for _ in headers) + "|")
    for row in table.rows:
        out.append("| " + " | ".join(_cell(c) for c in row) + " |")
    for note in table.footnotes:
        out.append("")
        out.append(f"_{note}_")
    return ("\n".join(out) + "\n").encode("utf-8")


def _render_csv(table: ReportTable) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")  # RFC-4180 line ends and quoting
    writer.writerow([_header(n, u) for n, u in table.columns])
    for row in table.rows:
        writer.writerow([_cell(c) for c in row])
    return buf.getvalue().encode("utf-8")


def _render_json(table: ReportTable) -> bytes:
    doc = {
        "title": table.title,
        "columns": [{"name": n, "unit": u} for n, u in table.columns],
        "rows": [list(r) for r in table.rows],
        "footnotes": list(table.footnotes),
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def parse_json_table(data: bytes | str) -> ReportTable:
    """Inverse of the JSON renderer."""
    doc = json.loads(data)
    try:
        return ReportTable(
            title=doc["title"],
            columns=tuple((c["name"], c["unit"]) for c in doc["columns"]),
            rows=tuple(tuple(r) for r in doc["rows"]),
            footnotes=tuple(doc["footnotes"]),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"not a rendered table: {exc}") from None


def format_sig(x: float, sig: int) -> str:
    """Format ``x`` to ``sig`` significant figures, plain decimal notation."""
    if sig < 1:
        raise SchemaError(f"significant figures must be >= 1, got {sig}")
    if x == 0:
        return f"{0:.{sig - 1}f}"
    exponent = math.floor(math.log10(abs(x)))
    decimals = sig - 1 - exponent
    if decimals <= 0:
        return f"{round(x, decimals):.0f}"
    return f"{x:.{decimals}f}"


def format_uncertainty(mean: float, std: float, sig: int) -> str:
    """Format "mean ± std" at the requested significance.

    A zero std prints the mean alone. Values below ``SCI_THRESHOLD`` use the
    grouped scientific style "(m ± s) × 10⁻⁹" with both parts at ``sig``
    significant figures; otherwise the std is printed at the same decimal
    precision as the formatted mean.
    """
    if std < 0:
        raise SchemaError(f"std must be >= 0, got {std}")
    if 0 < abs(mean) < SCI_THRESHOLD:
        m, s = mean * 1e9, std * 1e9
        if std == 0:
            return f"{format_sig(m, sig)} × 10⁻⁹"
        return f"({format_sig(m, sig)} ± {format_sig(s, sig)}) × 10⁻⁹"
    mean_str = format_sig(mean, sig)
    if std == 0:
        return mean_str
    decimals = len(mean_str.split(".")[1]) if "." in mean_str else 0
    return f"{mean_str} ± {std:.{decimals}f}"
