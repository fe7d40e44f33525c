"""Deterministic rendering: SVG drawings of planar frameworks, OBJ-style
line sets for d=3, and matplotlib figures for Gram traces."""

from __future__ import annotations

from itertools import product

import numpy as np

from ..errors import DimensionError, InvalidInput
from ..framework import PeriodicFramework

ORBIT_COLORS = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
)


def _f6(x):
    # normalize negative zero so output is platform-stable
    v = float(x)
    if v == 0.0:
        v = 0.0
    return format(v, ".6f")


def render_svg(f: PeriodicFramework, copies: int = 2) -> str:
    """SVG 1.1 drawing: one group per cell translate with bars as lines and
    vertex disks colored by orbit, plus the unit-cell outline as a
    transformed rect. The y axis is flipped to keep math orientation."""
    if f.dim != 2:
        raise DimensionError("SVG rendering requires d=2")
    if copies < 1:
        raise InvalidInput("copies must be at least 1")
    lam = f.lattice.matrix
    pts = []
    for t in product(range(copies), repeat=2):
        shift = lam @ np.array(t, float)
        for i in range(f.n):
            pts.append(f.positions[i] + shift)
        for e in f.graph.edges:
            pts.append(f.positions[e.u] + shift)
            pts.append(f.positions[e.v] + lam @ np.array(e.gamma, float) + shift)
    pts.append(np.zeros(2))
    pts.append(lam[:, 0])
    pts.append(lam[:, 1])
    pts.append(lam[:, 0] + lam[:, 1])
    pts = np.array(pts)
    scale = max(np.linalg.norm(lam[:, 0]), np.linalg.norm(lam[:, 1]), 1e-9)
    margin = 0.15 * scale
    lo = pts.min(axis=0) - margin
    hi = pts.max(axis=0) + margin
    width, height = hi - lo
    stroke = 0.02 * scale
    radius = 0.05 * scale

    def sx(x):
        return _f6(x - lo[0])

    def sy(y):
        return _f6(hi[1] - y)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        (
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'viewBox="0 0 {_f6(width)} {_f6(height)}" '
            f'width="{_f6(width)}" height="{_f6(height)}">'
        ),
        (
            f'<rect x="0" y="0" width="1" height="1" '
            f'transform="matrix({_f6(lam[0, 0])} {_f6(-lam[1, 0])} {_f6(lam[0, 1])} '
            f'{_f6(-lam[1, 1])} {sx(0.0)} {sy(0.0)})" '
            f'fill="none" stroke="#000000" stroke-width="{_f6(stroke * 0.75)}" '
            'stroke-dasharray="0.050000 0.050000"/>'
        ),
    ]
    for t in product(range(copies), repeat=2):
        shift = lam @ np.array(t, float)
        lines.append(f'<g id="cell-{t[0]}-{t[1]}">')
        for e in f.graph.edges:
            p1 = f.positions[e.u] + shift
            p2 = f.positions[e.v] + lam @ np.array(e.gamma, float) + shift
            lines.append(
                f'<line x1="{sx(p1[0])}" y1="{sy(p1[1])}" x2="{sx(p2[0])}" y2="{sy(p2[1])}" '
                f'stroke="#333333" stroke-width="{_f6(stroke)}"/>'
            )
        for i in range(f.n):
            p = f.positions[i] + shift
            color = ORBIT_COLORS[i % len(ORBIT_COLORS)]
            lines.append(
                f'<circle cx="{sx(p[0])}" cy="{sy(p[1])}" r="{_f6(radius)}" fill="{color}"/>'
            )
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_obj(f: PeriodicFramework, copies: int = 1) -> str:
    """OBJ-style line set for spatial frameworks: per placed bar, two vertex
    records and one line record."""
    if f.dim != 3:
        raise DimensionError("OBJ line-set export requires d=3")
    if copies < 1:
        raise InvalidInput("copies must be at least 1")
    lam = f.lattice.matrix
    lines = ["# periodic framework line set"]
    count = 0
    for t in product(range(copies), repeat=3):
        shift = lam @ np.array(t, float)
        for e in f.graph.edges:
            p1 = f.positions[e.u] + shift
            p2 = f.positions[e.v] + lam @ np.array(e.gamma, float) + shift
            lines.append(f"v {_f6(p1[0])} {_f6(p1[1])} {_f6(p1[2])}")
            lines.append(f"v {_f6(p2[0])} {_f6(p2[1])} {_f6(p2[2])}")
            lines.append(f"l {count + 1} {count + 2}")
            count += 2
    return "\n".join(lines) + "\n"


def gram_trace_figure(taus, grams, rates, out_path):
    """Two-panel matplotlib figure: Gram entries and the minimum eigenvalue
    of the Gram velocity against the path parameter."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from ..symcone import jacobi_eigh

    taus = np.asarray(taus, dtype=float)
    d = grams[0].shape[0]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    for i in range(d):
        for j in range(i, d):
            ax1.plot(taus, [g[i, j] for g in grams], label=f"w{i + 1}{j + 1}")
    ax1.set_ylabel("Gram entries")
    ax1.legend(fontsize=8, ncol=3)
    ax1.grid(True, alpha=0.3)
    mins = [jacobi_eigh(0.5 * (r + r.T))[0][0] for r in rates]
    ax2.plot(taus, mins, color="#d62728")
    ax2.axhline(0.0, color="k", lw=0.8)
    ax2.set_xlabel("tau")
    ax2.set_ylabel("min eig of Gram velocity")
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
