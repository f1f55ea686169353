"""Delimited output with a one-line provenance header."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return "none"
    return str(x)


def provenance_line(params: Mapping[str, object]) -> str:
    return "# " + " ".join(f"{k}={fmt(v)}" for k, v in params.items())


def write_csv(
    path: str | Path,
    params: Mapping[str, object],
    columns: Sequence[str],
    data: Iterable[Sequence[float]] | np.ndarray,
) -> Path:
    """Write rows of numbers under a ``# key=value ...`` header line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [provenance_line(params), ",".join(columns)]
    for row in data:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path: str | Path) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Inverse of :func:`write_csv`: ``(params, columns, data)``."""
    text = Path(path).read_text().splitlines()
    params = {}
    for item in text[0].lstrip("# ").split():
        k, _, v = item.partition("=")
        params[k] = v
    columns = text[1].split(",")
    rows = [[float(v) for v in line.split(",")] for line in text[2:] if line]
    return params, columns, np.array(rows, dtype=float).reshape(len(rows), len(columns))


def format_block(values: Mapping[str, object]) -> str:
    """Flat ``key=value`` block, one pair per line."""
    return "".join(f"{k}={fmt(v)}\n" for k, v in values.items())


def parse_block(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if "=" in line and not line.startswith("#"):
            k, _, v = line.partition("=")
            out[k.strip()] = v.strip()
    return out
