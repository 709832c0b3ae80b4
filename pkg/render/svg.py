"""
SVG figures for error curves and potential contours.

Output is self-contained SVG 1.1 with every coordinate written to nine
significant digits, so identical inputs give byte-identical documents.

Usage:
    svg = render_error_figure(curve_l2, curve_linf)
    svg = render_potential_figure(field, [Dot(3.865, DotRole.POLE)])
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
import io
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from diagnostics.contours import contour_lines
from diagnostics.error_curve import ErrorCurve, rms_norm, sup_from_curve
from diagnostics.potential import PotentialField
from shared.errors import InputError

logger = logging.getLogger(__name__)

L2_COLOR = "#2ca02c"
LINF_COLOR = "#1f77b4"
CONTOUR_COLOR = "#555555"
CIRCLE_COLOR = "#000000"
MARGIN = 8.0
WIDTH = 480.0
PLANE_HEIGHT = 480.0
MODULUS_HEIGHT = 200.0


class FigureKind(str, Enum):
    ERROR_CURVE = "error_curve"
    POTENTIAL = "potential"


class DotRole(str, Enum):
    POLE = "pole"
    INTERP = "interp"
    HERMITE = "hermite"


DOT_COLORS: Dict[DotRole, str] = {
    DotRole.POLE: "#d62728",
    DotRole.INTERP: "#ffd700",
    DotRole.HERMITE: "#2ca02c",
}


@dataclass(frozen=True)
class Viewport:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        vals = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise InputError("viewport must be finite")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise InputError("viewport must have positive width and height")

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


@dataclass(frozen=True, eq=False)
class Curve:
    label: str
    color: str
    points: np.ndarray  # shape (k, 2)
    panel: str = "plane"
    closed: bool = False
    width: float = 1.5


@dataclass(frozen=True)
class Dot:
    point: complex
    role: DotRole


@dataclass(frozen=True, eq=False)
class FigureSpec:
    kind: FigureKind
    curves: List[Curve]
    dots: List[Dot] = field(default_factory=list)
    viewport: Viewport = Viewport(-1.6, 1.6, -1.6, 1.6)
    modulus_viewport: Optional[Viewport] = None
    annotations: List[Tuple[str, str]] = field(default_factory=list)  # (text, color)
    unit_circle: bool = False

    def __post_init__(self) -> None:
        for c in self.curves:
            if len(c.points) == 0:
                raise InputError(f"curve {c.label!r} is empty")
        if self.kind is FigureKind.ERROR_CURVE and self.modulus_viewport is None:
            raise InputError("error-curve figures need a modulus panel viewport")


def fmt(x: float) -> str:
    """Nine significant digits, no exponent noise for zero."""
    x = float(x)
    if x == 0:
        return "0"
    return format(x, ".9g")


# ------------------------------------------------------------------ #
#  Figure construction
# ------------------------------------------------------------------ #

def error_figure_spec(c2: Optional[ErrorCurve], cinf: Optional[ErrorCurve]) -> FigureSpec:
    """Curve panel (e in the complex plane) above a |e| versus arg(z) panel."""
    curves: List[Curve] = []
    annotations: List[Tuple[str, str]] = []
    scale = 0.0
    for label, color, c in (("L2", L2_COLOR, c2), ("Linf", LINF_COLOR, cinf)):
        if c is None:
            continue
        if len(c.samples) == 0:
            raise InputError(f"{label} error curve is empty")
        e = c.samples
        closed_pts = np.column_stack([np.append(e.real, e.real[0]), np.append(e.imag, e.imag[0])])
        curves.append(Curve(label, color, closed_pts, "plane", closed=True))
        curves.append(Curve(label, color, np.column_stack([c.theta, np.abs(e)]), "modulus"))
        annotations.append(
            (f"{label}: ||e||_2 = {fmt(rms_norm(c))}, ||e||_inf = {fmt(sup_from_curve(c))}", color)
        )
        scale = max(scale, float(np.max(np.abs(e))))
    if not curves:
        raise InputError("error figure needs at least one curve")
    half = 1.1 * scale if scale > 0 else 1.0
    return FigureSpec(
        kind=FigureKind.ERROR_CURVE,
        curves=curves,
        viewport=Viewport(-half, half, -half, half),
        modulus_viewport=Viewport(0.0, 2 * math.pi, 0.0, half),
        annotations=annotations,
    )


def potential_figure_spec(
    potential: PotentialField, dots: Sequence[Dot], levels: Optional[Sequence[float]] = None
) -> FigureSpec:
    curves = []
    for line in contour_lines(potential, levels):
        width = 1.0 if float(line.level).is_integer() else 0.5
        curves.append(Curve(f"level {fmt(line.level)}", CONTOUR_COLOR, line.points, closed=line.closed, width=width))
    return FigureSpec(
        kind=FigureKind.POTENTIAL,
        curves=curves,
        dots=list(dots),
        viewport=Viewport(float(potential.x[0]), float(potential.x[-1]), float(potential.y[0]), float(potential.y[-1])),
        unit_circle=True,
    )


# ------------------------------------------------------------------ #
#  SVG serialization
# ------------------------------------------------------------------ #

class _Panel:
    def __init__(self, view: Viewport, x0: float, y0: float, w: float, h: float) -> None:
        self.view, self.x0, self.y0, self.w, self.h = view, x0, y0, w, h

    def map(self, x: float, y: float) -> Tuple[float, float]:
        v = self.view
        px = self.x0 + (x - v.x_min) / (v.x_max - v.x_min) * self.w
        py = self.y0 + (v.y_max - y) / (v.y_max - v.y_min) * self.h
        return px, py

    def frame(self) -> str:
        return (
            f'<rect x="{fmt(self.x0)}" y="{fmt(self.y0)}" width="{fmt(self.w)}" '
            f'height="{fmt(self.h)}" fill="none" stroke="#999999" stroke-width="0.5"/>'
        )


def _polyline(panel: _Panel, curve: Curve) -> str:
    coords = " ".join(f"{fmt(px)},{fmt(py)}" for px, py in (panel.map(x, y) for x, y in curve.points))
    return (
        f'<polyline points="{coords}" fill="none" stroke="{curve.color}" '
        f'stroke-width="{fmt(curve.width)}"><title>{escape(curve.label)}</title></polyline>'
    )


def _dot(panel: _Panel, dot: Dot) -> str:
    x, y = float(np.real(dot.point)), float(np.imag(dot.point))
    color = DOT_COLORS[DotRole(dot.role)]
    title = f"<title>{escape(DotRole(dot.role).value)} {fmt(x)}{'+' if y >= 0 else '-'}{fmt(abs(y))}i</title>"
    if panel.view.contains(x, y) and math.isfinite(x) and math.isfinite(y):
        px, py = panel.map(x, y)
        return (
            f'<circle cx="{fmt(px)}" cy="{fmt(py)}" r="3.5" fill="{color}" '
            f'stroke="#000000" stroke-width="0.5">{title}</circle>'
        )
    return _offscale_marker(panel, x, y, color, title)


def _offscale_marker(panel: _Panel, x: float, y: float, color: str, title: str) -> str:
    """Triangle on the panel edge pointing towards an off-scale point."""
    v = panel.view
    cx, cy = 0.5 * (v.x_min + v.x_max), 0.5 * (v.y_min + v.y_max)
    dx, dy = (x - cx, y - cy) if math.isfinite(x) and math.isfinite(y) else (1.0, 0.0)
    hx, hy = 0.5 * (v.x_max - v.x_min), 0.5 * (v.y_max - v.y_min)
    t = min(hx / abs(dx) if dx else math.inf, hy / abs(dy) if dy else math.inf)
    px, py = panel.map(cx + t * dx, cy + t * dy)
    ang = math.atan2(-dy / hy, dx / hx)  # screen y points down
    ux, uy = math.cos(ang), math.sin(ang)
    tip = (px - ux * 2.0, py - uy * 2.0)
    base = (px - ux * MARGIN, py - uy * MARGIN)
    left = (base[0] - uy * 4.0, base[1] + ux * 4.0)
    right = (base[0] + uy * 4.0, base[1] - ux * 4.0)
    pts = " ".join(f"{fmt(a)},{fmt(b)}" for a, b in (tip, left, right))
    return f'<polygon class="offscale" points="{pts}" fill="{color}" stroke="#000000" stroke-width="0.5">{title}</polygon>'


def to_svg(spec: FigureSpec) -> str:
    """Serialize a FigureSpec to an SVG 1.1 document."""
    plane = _Panel(spec.viewport, MARGIN, MARGIN + 16.0, WIDTH - 2 * MARGIN, PLANE_HEIGHT - 2 * MARGIN - 16.0)
    height = PLANE_HEIGHT
    panels: Dict[str, _Panel] = {"plane": plane}
    if spec.modulus_viewport is not None:
        panels["modulus"] = _Panel(
            spec.modulus_viewport, MARGIN, PLANE_HEIGHT + MARGIN, WIDTH - 2 * MARGIN, MODULUS_HEIGHT - 2 * MARGIN
        )
        height += MODULUS_HEIGHT

    out: List[str] = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fmt(WIDTH)}" '
        f'height="{fmt(height)}" viewBox="0 0 {fmt(WIDTH)} {fmt(height)}">',
        f'<desc>{escape(spec.kind.value)}</desc>',
        f'<rect x="0" y="0" width="{fmt(WIDTH)}" height="{fmt(height)}" fill="#ffffff"/>',
    ]
    for panel in panels.values():
        out.append(panel.frame())

    if spec.unit_circle:
        cx, cy = plane.map(0.0, 0.0)
        rx = plane.w / (spec.viewport.x_max - spec.viewport.x_min)
        ry = plane.h / (spec.viewport.y_max - spec.viewport.y_min)
        out.append(
            f'<ellipse cx="{fmt(cx)}" cy="{fmt(cy)}" rx="{fmt(rx)}" ry="{fmt(ry)}" '
            f'fill="none" stroke="{CIRCLE_COLOR}" stroke-width="1"/>'
        )
    for curve in spec.curves:
        out.append(_polyline(panels.get(curve.panel, plane), curve))
    for dot in spec.dots:
        out.append(_dot(plane, dot))

    for idx, (text, color) in enumerate(spec.annotations):
        if idx % 2 == 0:
            attrs = f'x="{fmt(MARGIN + 4)}" text-anchor="start"'
        else:
            attrs = f'x="{fmt(WIDTH - MARGIN - 4)}" text-anchor="end"'
        y = MARGIN + 10.0 + 12.0 * (idx // 2)
        out.append(
            f'<text {attrs} y="{fmt(y)}" font-family="monospace" font-size="9" fill="{color}">{escape(text)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_error_figure(c2: Optional[ErrorCurve], cinf: Optional[ErrorCurve]) -> str:
    """Two-panel error figure; green for L2, blue for Linf."""
    return to_svg(error_figure_spec(c2, cinf))


def render_potential_figure(
    potential: PotentialField, dots: Sequence[Dot], levels: Optional[Sequence[float]] = None
) -> str:
    """Contours of log10|phi| at integer and half-integer levels with the unit circle and dots."""
    return to_svg(potential_figure_spec(potential, dots, levels))


def polylines_csv(spec: FigureSpec) -> str:
    """Every polyline of a figure as rows (curve_id, x, y)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["curve_id", "x", "y"])
    for idx, curve in enumerate(spec.curves):
        for x, y in curve.points:
            writer.writerow([idx, fmt(x), fmt(y)])
    return buf.getvalue()
