"""Standalone SVG 1.1 line charts, no plotting stack required.

Fixed 800x600 viewBox, 2 px polylines, linear axes with automatic range.
Marker samples (inf/undef) are omitted from the polylines; fully
non-finite series are dropped with a note. Output is deterministic: the
same ledger always yields byte-identical SVG.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .thermo import ThermoLedger

WIDTH, HEIGHT = 800, 600
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 170, 45, 60

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
           "#9467bd", "#8c564b", "#17becf", "#e377c2")

#: Unit strings in the hbar = k_B = 1 convention (energies in eps, time in 1/gamma0).
UNITS_BY_QUANTITY = {
    "E": "ε", "Q1": "ε", "W1": "ε", "Q2": "ε", "W2": "ε",
    "q1_rate": "ε γ₀", "w1_rate": "ε γ₀",
    "q2_rate": "ε γ₀", "w2_rate": "ε γ₀",
    "wprime_rate": "ε γ₀",
    "T1": "ε/k_B", "T2": "ε/k_B",
    "S": "k_B", "Sgen1": "k_B", "C1": "k_B", "C2": "k_B",
    "sgen1_rate": "k_B γ₀", "sgen_ht_rate": "k_B γ₀",
    "theta": "rad",
    "t": "1/γ₀",
}


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))


def axis_label(quantity: str) -> str:
    if quantity == "t":
        return "γ₀ t"
    unit = UNITS_BY_QUANTITY.get(quantity, "")
    return f"{quantity} [{unit}]" if unit else quantity


def shared_unit_label(quantities: Sequence[str]) -> str:
    units = {UNITS_BY_QUANTITY.get(q, "") for q in quantities}
    if len(units) == 1:
        unit = units.pop()
        return f"[{unit}]" if unit else ""
    return "mixed units"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _finite_runs(x: np.ndarray, y: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    ok = np.isfinite(x) & np.isfinite(y)
    runs = []
    start = None
    for i, good in enumerate(ok):
        if good and start is None:
            start = i
        elif not good and start is not None:
            runs.append((x[start:i], y[start:i]))
            start = None
    if start is not None:
        runs.append((x[start:], y[start:]))
    return runs


def write_svg(ledger: ThermoLedger, quantities: Sequence[str], path: str | Path,
              x_quantity: str = "t", title: str | None = None) -> list[str]:
    """Render the selected ledger series as an SVG line chart.

    Returns report notes; when the selection is empty or every series
    lacks two finite samples, no file is written and the notes say so.
    """
    notes: list[str] = []
    if not quantities:
        notes.append("svg: empty quantity selection, no file written")
        return notes

    x = ledger.series[x_quantity]
    drawable: list[tuple[str, np.ndarray]] = []
    for q in quantities:
        y = ledger.series[q]
        if int((np.isfinite(x) & np.isfinite(y)).sum()) < 2:
            notes.append(f"svg: series {q!r} has fewer than 2 finite samples, omitted")
            continue
        drawable.append((q, y))
    if not drawable:
        notes.append("svg: all selected series omitted, no file written")
        return notes

    fx = x[np.isfinite(x)]
    x0, x1 = float(fx.min()), float(fx.max())
    ys = np.concatenate([y[np.isfinite(x) & np.isfinite(y)] for _, y in drawable])
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 - x0 <= 0.0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 <= 0.0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(v: float) -> float:
        return MARGIN_LEFT + (v - x0) / (x1 - x0) * pw

    def py(v: float) -> float:
        return MARGIN_TOP + ph - (v - y0) / (y1 - y0) * ph

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">')
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>')
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="17">{_escape(title)}</text>')

    for tx in _ticks(x0, x1):
        gx = px(tx)
        out.append(f'<line x1="{gx:.2f}" y1="{MARGIN_TOP}" x2="{gx:.2f}" '
                   f'y2="{MARGIN_TOP + ph}" stroke="#dddddd" stroke-width="1"/>')
        out.append(f'<text x="{gx:.2f}" y="{MARGIN_TOP + ph + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{tx:.4g}</text>')
    for ty in _ticks(y0, y1):
        gy = py(ty)
        out.append(f'<line x1="{MARGIN_LEFT}" y1="{gy:.2f}" x2="{MARGIN_LEFT + pw}" '
                   f'y2="{gy:.2f}" stroke="#dddddd" stroke-width="1"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{gy + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="12">{ty:.4g}</text>')

    out.append(f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" '
               f'fill="none" stroke="#444444" stroke-width="1"/>')
    out.append(f'<text x="{MARGIN_LEFT + pw / 2:.1f}" y="{HEIGHT - 16}" '
               f'text-anchor="middle" font-family="sans-serif" font-size="14">'
               f'{_escape(axis_label(x_quantity))}</text>')
    ylab = shared_unit_label([q for q, _ in drawable])
    if ylab:
        out.append(f'<text x="22" y="{MARGIN_TOP + ph / 2:.1f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="14" '
                   f'transform="rotate(-90 22 {MARGIN_TOP + ph / 2:.1f})">'
                   f'{_escape(ylab)}</text>')

    for k, (q, y) in enumerate(drawable):
        color = PALETTE[k % len(PALETTE)]
        for rx, ry in _finite_runs(x, y):
            if len(rx) >= 2:
                pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(rx, ry))
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                           f'stroke-width="2"/>')
            else:
                out.append(f'<circle cx="{px(rx[0]):.2f}" cy="{py(ry[0]):.2f}" '
                           f'r="2.5" fill="{color}"/>')
        ly = MARGIN_TOP + 16 + 22 * k
        lx = MARGIN_LEFT + pw + 14
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 26}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 32}" y="{ly}" font-family="sans-serif" '
                   f'font-size="13">{_escape(q)}</text>')

    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8", newline="\n")
    return notes
