"""CSV and summary emission with the package's serialisation conventions.

Reals use `.` decimals and 17 significant digits (round-trip exact for
doubles), fields are comma-separated, line endings are LF, and every file
begins with `# ` comment lines recording the resolved configuration and
the artifact version.  Wall-clock runtimes never enter files: outputs of
identical invocations are byte-identical.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import __version__

__all__ = ["format_value", "header_lines", "write_csv", "write_summary", "write_report"]


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (tuple, list)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def header_lines(config: Mapping) -> list[str]:
    lines = [f"cylstable version={__version__}"]
    for key in sorted(config):
        lines.append(f"{key}={format_value(config[key])}")
    return lines


def write_csv(path: Path, columns: Mapping[str, Iterable], config: Mapping) -> None:
    """Columnar CSV with a comment header; all columns must share a length."""
    cols = {name: np.atleast_1d(np.asarray(vals)) for name, vals in columns.items()}
    lengths = {c.size for c in cols.values()}
    if len(lengths) > 1:
        raise ValueError(f"columns have mismatched lengths: {lengths}")
    with open(path, "w", newline="\n") as fh:
        for line in header_lines(config):
            fh.write(f"# {line}\n")
        fh.write(",".join(cols) + "\n")
        for i in range(next(iter(lengths), 0)):
            fh.write(",".join(format_value(col[i]) for col in cols.values()) + "\n")


def write_summary(path: Path, entries: Mapping, config: Mapping) -> None:
    with open(path, "w", newline="\n") as fh:
        for line in header_lines(config):
            fh.write(f"# {line}\n")
        for key, value in entries.items():
            fh.write(f"{key}={format_value(value)}\n")


def write_report(report, out_dir: Path, config: Mapping) -> list[Path]:
    """Write `<name>.csv` (first table), `<name>.<table>.csv` (others), `<name>.summary`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    table_names = list(report.tables)
    for idx, table_name in enumerate(table_names):
        suffix = f".{table_name}" if idx else ""
        path = out_dir / f"{report.name}{suffix}.csv"
        write_csv(path, report.tables[table_name], config)
        written.append(path)

    entries: dict[str, object] = {}
    for key, value in report.parameters.items():
        entries[f"param.{key}"] = value
    entries["seed"] = report.seed
    for verdict in report.verdicts:
        entries[f"verdict.{verdict.name}"] = "pass" if verdict.passed else "fail"
        entries[f"threshold.{verdict.name}"] = verdict.threshold
        entries[f"observed.{verdict.name}"] = verdict.observed
    entries["inconclusive"] = report.inconclusive
    entries["passed"] = report.passed
    for i, note in enumerate(report.notes):
        entries[f"note.{i}"] = note
    summary_path = out_dir / f"{report.name}.summary"
    write_summary(summary_path, entries, config)
    written.append(summary_path)
    return written
