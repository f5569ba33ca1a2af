"""Deterministic CSV serialization of thermodynamic ledgers.

Floats carry 17 significant digits; the markers serialize as ``inf``,
``-inf`` and ``undef``. Identical ledgers produce byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .thermo import LEDGER_COLUMNS, ThermoLedger

CSV_COLUMNS = LEDGER_COLUMNS


def format_value(x: float) -> str:
    if math.isnan(x):
        return "undef"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def parse_value(s: str) -> float:
    if s == "undef":
        return math.nan
    return float(s)


def write_csv(ledger: ThermoLedger, path: str | Path) -> Path:
    """Write one header line plus one row per sample; returns the path."""
    path = Path(path)
    cols = [ledger.series[k] for k in CSV_COLUMNS]
    lines = [",".join(CSV_COLUMNS)]
    for i in range(len(ledger)):
        lines.append(",".join(format_value(float(c[i])) for c in cols))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Read a ledger CSV back into column arrays (markers become inf/NaN)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    data = {h: np.empty(len(lines) - 1, dtype=float) for h in header}
    for i, line in enumerate(lines[1:]):
        for h, cell in zip(header, line.split(",")):
            data[h][i] = parse_value(cell)
    return data
