"""Matplotlib rendering of ledger panels to PNG files.

Companion to the deterministic SVG writer: same panel definitions, same
marker handling, rasterized through the Agg backend for report viewing.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .svgchart import axis_label, shared_unit_label
from .thermo import ThermoLedger


def write_png(ledger: ThermoLedger, quantities: Sequence[str], path: str | Path,
              x_quantity: str = "t", title: str | None = None,
              dpi: int = 120) -> list[str]:
    """Render the selected ledger series to a PNG; returns report notes."""
    notes: list[str] = []
    if not quantities:
        notes.append("png: empty quantity selection, no file written")
        return notes
    x = ledger.series[x_quantity]
    drawable = []
    for q in quantities:
        y = ledger.series[q]
        if int((np.isfinite(x) & np.isfinite(y)).sum()) < 2:
            notes.append(f"png: series {q!r} has fewer than 2 finite samples, omitted")
            continue
        drawable.append((q, y))
    if not drawable:
        notes.append("png: all selected series omitted, no file written")
        return notes

    fig, ax = plt.subplots(figsize=(8.0, 6.0))
    for q, y in drawable:
        ax.plot(x, np.where(np.isfinite(y), y, np.nan), lw=1.8, label=q)
    ax.set_xlabel(axis_label(x_quantity))
    ylab = shared_unit_label([q for q, _ in drawable])
    if ylab:
        ax.set_ylabel(ylab)
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return notes
