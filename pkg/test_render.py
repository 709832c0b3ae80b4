from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from diagnostics.error_curve import ErrorCurve
from diagnostics.potential import GridSpec, potential_field
from render.svg import (
    DOT_COLORS,
    L2_COLOR,
    LINF_COLOR,
    Curve,
    Dot,
    DotRole,
    FigureKind,
    FigureSpec,
    Viewport,
    error_figure_spec,
    fmt,
    polylines_csv,
    potential_figure_spec,
    render_error_figure,
    render_potential_figure,
    to_svg,
)
from shared.errors import InputError

SVG_NS = "{http://www.w3.org/2000/svg}"


def sample_curve(scale: float = 1.0, M: int = 64) -> ErrorCurve:
    theta = 2 * np.pi * np.arange(M) / M
    z = np.exp(1j * theta)
    return ErrorCurve(theta, scale * z ** 3 * (1 + 0.05 * z))


@pytest.fixture
def field():
    return potential_field([0j, 0.5, 0.5], [2.0], GridSpec(x_max=1.6, size=41))


class TestFormatting:
    def test_fmt(self):
        assert fmt(0.0) == "0"
        assert fmt(-0.0) == "0"
        assert fmt(1.0) == "1"
        assert fmt(3.8651234567891) == "3.86512346"
        assert fmt(1e-12) == "1e-12"

    def test_viewport_validation(self):
        with pytest.raises(InputError):
            Viewport(1.0, 1.0, 0.0, 1.0)
        with pytest.raises(InputError):
            Viewport(0.0, float("inf"), 0.0, 1.0)
        assert Viewport(-1, 1, -1, 1).contains(0.5, -1.0)
        assert not Viewport(-1, 1, -1, 1).contains(1.5, 0.0)


class TestErrorFigure:
    def test_is_well_formed_and_deterministic(self):
        a = render_error_figure(sample_curve(0.1), sample_curve(0.09))
        b = render_error_figure(sample_curve(0.1), sample_curve(0.09))
        assert a == b
        root = ET.fromstring(a.encode("utf-8"))
        assert root.tag == f"{SVG_NS}svg"
        assert len(root.findall(f"{SVG_NS}polyline")) == 4

    def test_colors_and_annotations(self):
        svg = render_error_figure(sample_curve(0.1), sample_curve(0.09))
        assert L2_COLOR in svg
        assert LINF_COLOR in svg
        assert "||e||_inf" in svg

    def test_single_curve_allowed(self):
        spec = error_figure_spec(None, sample_curve())
        assert [c.label for c in spec.curves] == ["Linf", "Linf"]
        assert spec.kind is FigureKind.ERROR_CURVE
        assert spec.viewport.x_max == pytest.approx(1.1 * 1.05)

    def test_no_curves_rejected(self):
        with pytest.raises(InputError):
            error_figure_spec(None, None)

    def test_empty_curve_rejected(self):
        with pytest.raises(InputError):
            FigureSpec(FigureKind.POTENTIAL, [Curve("empty", "#000000", np.zeros((0, 2)))])

    def test_error_figure_needs_modulus_panel(self):
        curve = Curve("c", "#000000", np.array([[0.0, 0.0], [1.0, 1.0]]))
        with pytest.raises(InputError):
            FigureSpec(FigureKind.ERROR_CURVE, [curve])

    def test_polylines_csv(self):
        spec = error_figure_spec(sample_curve(), None)
        rows = polylines_csv(spec).splitlines()
        assert rows[0] == "curve_id,x,y"
        assert len(rows) == 1 + 65 + 64
        assert rows[1].startswith("0,")


class TestPotentialFigure:
    def test_dots_colored_by_role(self, field):
        dots = [Dot(0j, DotRole.INTERP), Dot(0.5, DotRole.HERMITE), Dot(1.2, DotRole.POLE)]
        svg = render_potential_figure(field, dots)
        root = ET.fromstring(svg.encode("utf-8"))
        fills = [c.get("fill") for c in root.findall(f"{SVG_NS}circle")]
        assert fills == [DOT_COLORS[DotRole.INTERP], DOT_COLORS[DotRole.HERMITE], DOT_COLORS[DotRole.POLE]]
        assert len(root.findall(f"{SVG_NS}ellipse")) == 1

    def test_offscale_pole_gets_edge_marker(self, field):
        svg = render_potential_figure(field, [Dot(3.865, DotRole.POLE)])
        root = ET.fromstring(svg.encode("utf-8"))
        assert root.findall(f"{SVG_NS}circle") == []
        markers = root.findall(f"{SVG_NS}polygon")
        assert len(markers) == 1
        assert markers[0].get("class") == "offscale"
        assert "pole 3.865+0i" in svg

    def test_contour_widths_follow_levels(self, field):
        spec = potential_figure_spec(field, [], [-1.0, -0.5])
        widths = {c.label: c.width for c in spec.curves}
        assert widths.get("level -1") in (None, 1.0)
        assert widths.get("level -0.5") in (None, 0.5)
        assert spec.unit_circle

    def test_deterministic(self, field):
        dots = [Dot(0.5 + 0.1j, DotRole.HERMITE)]
        assert to_svg(potential_figure_spec(field, dots)) == render_potential_figure(field, dots)
