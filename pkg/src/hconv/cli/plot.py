"""SVG 1.1 image-grid plots: images of circles and radial spokes under a map."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from ..harmonic import HarmonicMap, cis, evaluate_harmonic
from ..series import R_CAP, TruncatedSeries, evaluate

MIN_POINTS = 512
CANVAS = 640
PAD = 32


@dataclass(frozen=True)
class PlotSpec:
    rings: int = 8
    spokes: int = 16
    r_max: float = 0.9
    points: int = MIN_POINTS
    gamma: float = math.pi / 2

    def __post_init__(self):
        if self.rings < 4 or self.spokes < 4:
            raise ValueError("need at least 4 rings and 4 spokes")
        if not 0 < self.r_max <= R_CAP:
            raise ValueError(f"r_max must lie in (0, {R_CAP}]")
        if self.points < MIN_POINTS:
            raise ValueError(f"need at least {MIN_POINTS} points per curve")


def _apply(f, z: np.ndarray) -> np.ndarray:
    if isinstance(f, HarmonicMap):
        return np.asarray(evaluate_harmonic(f, z))
    if isinstance(f, TruncatedSeries):
        return np.asarray(evaluate(f, z))
    return np.asarray(f(z), dtype=np.complex128)


def image_curves(f, spec: PlotSpec) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Images of ``rings`` circles (closed) and ``spokes`` radii, ``points`` samples each."""
    t = 2 * np.pi * np.arange(spec.points) / spec.points
    rings = [_apply(f, spec.r_max * k / spec.rings * np.exp(1j * t)) for k in range(1, spec.rings + 1)]
    s = np.linspace(0.0, spec.r_max, spec.points)
    spokes = [_apply(f, s * np.exp(2j * np.pi * j / spec.spokes)) for j in range(spec.spokes)]
    return rings, spokes


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def render_svg(f, spec: PlotSpec, title: str = "") -> str:
    rings, spokes = image_curves(f, spec)
    allpts = np.concatenate(rings + spokes + [np.zeros(1, dtype=np.complex128)])
    lo_x, hi_x = float(allpts.real.min()), float(allpts.real.max())
    lo_y, hi_y = float(allpts.imag.min()), float(allpts.imag.max())
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-12)
    scale = (CANVAS - 2 * PAD) / span
    cx, cy = (lo_x + hi_x) / 2, (lo_y + hi_y) / 2

    def to_screen(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return CANVAS / 2 + (w.real - cx) * scale, CANVAS / 2 - (w.imag - cy) * scale

    def polyline(w: np.ndarray, closed: bool, cls: str) -> str:
        x, y = to_screen(w)
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x, y))
        tag = "polygon" if closed else "polyline"
        return f'  <{tag} class="{cls}" points="{pts}"/>'

    ox, oy = to_screen(np.array([0j]))
    ox, oy = float(ox[0]), float(oy[0])
    arrow_len = 0.25 * (CANVAS - 2 * PAD)
    u = cis(spec.gamma)
    ax, ay = ox + arrow_len * u.real, oy - arrow_len * u.imag

    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f"  <title>{escape(title)}</title>",
        "  <defs>",
        '    <marker id="head" markerWidth="10" markerHeight="8" refX="9" refY="4" orient="auto">',
        '      <path d="M0,0 L10,4 L0,8 z" fill="#c0392b"/>',
        "    </marker>",
        '    <style type="text/css">',
        "      .ring { fill: none; stroke: #1f4e79; stroke-width: 1 }",
        "      .spoke { fill: none; stroke: #5b9bd5; stroke-width: 0.8 }",
        "      .axis { stroke: #888888; stroke-width: 0.6 }",
        "      .direction { stroke: #c0392b; stroke-width: 2 }",
        "    </style>",
        "  </defs>",
        f'  <line class="axis" x1="0" y1="{_fmt(oy)}" x2="{CANVAS}" y2="{_fmt(oy)}"/>',
        f'  <line class="axis" x1="{_fmt(ox)}" y1="0" x2="{_fmt(ox)}" y2="{CANVAS}"/>',
    ]
    lines += [polyline(w, True, "ring") for w in rings]
    lines += [polyline(w, False, "spoke") for w in spokes]
    lines.append(
        f'  <line class="direction" x1="{_fmt(ox)}" y1="{_fmt(oy)}" x2="{_fmt(ax)}" y2="{_fmt(ay)}" '
        'marker-end="url(#head)"/>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(f, spec: PlotSpec, path: Path, title: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(f, spec, title), encoding="utf-8")
    return path
