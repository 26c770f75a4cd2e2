"""CSV files: experiment results (with a config echo line) and artifact exports.

Floats are written with repr-precision so a rerun with the same seed produces
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from sdma.feedback_channel import IndexMapping, TransitionMatrix

CONFIG_PREFIX = "# config: "


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return repr(value)
    if isinstance(value, (np.integer,)):
        return str(int(value))
    if value is None:
        return ""
    return str(value)


def _parse_value(text: str) -> Any:
    if text in ("true", "false"):
        return text == "true"
    if text == "":
        return ""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def write_experiment_csv(
    path: str | Path, config_echo: dict[str, Any], columns: list[str], rows: list[dict[str, Any]]
) -> Path:
    """First line ``# config: <json>``, then the header, then one line per row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(CONFIG_PREFIX + json.dumps(config_echo, sort_keys=True, separators=(",", ":")) + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])
    return path


def read_experiment_csv(path: str | Path) -> tuple[dict[str, Any], list[str], list[dict[str, Any]]]:
    """Inverse of write_experiment_csv: (config echo, columns, rows)."""
    with open(Path(path), newline="", encoding="utf-8") as f:
        first = f.readline()
        config = json.loads(first[len(CONFIG_PREFIX):]) if first.startswith(CONFIG_PREFIX) else {}
        reader = csv.reader(f)
        columns = next(reader, [])
        rows = [{c: _parse_value(v) for c, v in zip(columns, line)} for line in reader]
    return config, columns, rows


def write_matrix_csv(path: str | Path, matrix: TransitionMatrix) -> Path:
    """Row = sent point, column = received point."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["sent"] + [f"rx{j}" for j in range(matrix.size)])
        for i, row in enumerate(matrix.probs):
            writer.writerow([i] + [format_value(p) for p in row])
    return path


def write_mapping_csv(path: str | Path, mapping: IndexMapping) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["codeword", "constellation_point"])
        for i, point in enumerate(mapping.forward):
            writer.writerow([i, int(point)])
    return path


def read_mapping_csv(path: str | Path) -> IndexMapping:
    with open(Path(path), newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        next(reader, None)
        pairs = sorted((int(a), int(b)) for a, b in reader)
    return IndexMapping.from_forward([b for _, b in pairs])
