"""
Optimality diagnostics shared by both norms: the norm ordering chain,
near-circularity bounds, effective degree and interpolation points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from diagnostics.error_curve import DEFAULT_SAMPLES, ErrorCurve, error_curve, rms_norm, sup_from_curve, winding_number
from linf_lawson.aaa import CircleGrid, aaa
from rational.barycentric import BarycentricRational
from rational.poles import PoleList
from shared.errors import ApproxError, DegenerateError, InputError

logger = logging.getLogger(__name__)

ORDERING_RTOL = 1e-10


@dataclass(frozen=True)
class OrderingReport:
    l2_of_e2: float
    l2_of_einf: float
    linf_of_einf: float
    linf_of_e2: float
    slack: float
    passed: bool
    violations: List[str] = field(default_factory=list)

    def norms(self) -> Tuple[float, float, float, float]:
        return (self.l2_of_e2, self.l2_of_einf, self.linf_of_einf, self.linf_of_e2)

    def to_dict(self) -> dict:
        return {
            "norms": list(self.norms()),
            "slack": self.slack,
            "passed": self.passed,
            "violations": list(self.violations),
        }


def ordering_check(
    f: Callable,
    r2: Callable,
    rinf: Callable,
    M: int = DEFAULT_SAMPLES,
    rtol: float = ORDERING_RTOL,
) -> OrderingReport:
    """
    Check ||e2||_2 <= ||einf||_2 <= ||einf||_inf <= ||e2||_inf.

    The slack is rtol times max(||e2||_inf, 1e-3 max|f|) so that two
    approximants that are both exact to rounding do not fail on noise.
    """
    c2, cinf = error_curve(f, r2, M), error_curve(f, rinf, M)
    a, b = rms_norm(c2), rms_norm(cinf)
    c, d = sup_from_curve(cinf), sup_from_curve(c2)
    fmax = float(np.max(np.abs(f(c2.points))))
    slack = rtol * max(d, 1e-3 * fmax)
    violations = []
    labels = ("||e2||_2", "||einf||_2", "||einf||_inf", "||e2||_inf")
    chain = (a, b, c, d)
    for k in range(3):
        if chain[k] > chain[k + 1] + slack:
            violations.append(f"{labels[k]}={chain[k]:.12g} > {labels[k + 1]}={chain[k + 1]:.12g}")
    return OrderingReport(a, b, c, d, slack, not violations, violations)


@dataclass(frozen=True)
class BoundsReport:
    lower: float
    upper: float
    winding: int
    required_winding: int
    precondition_ok: bool
    messages: List[str] = field(default_factory=list)

    @property
    def relative_width(self) -> float:
        return (self.upper - self.lower) / self.upper if self.upper > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "winding": self.winding,
            "required_winding": self.required_winding,
            "precondition_ok": self.precondition_ok,
            "messages": list(self.messages),
        }


def near_circular_bounds(c: ErrorCurve, n: int, nu: int) -> BoundsReport:
    """
    Certified bracket min|e| <= E_inf <= max|e| for a near-circular curve.

    Valid when the curve avoids the origin and winds at least nu + n + 1
    times; otherwise the report carries precondition_ok = False.
    """
    mod = np.abs(c.samples)
    lower, upper = float(mod.min()), float(mod.max())
    required = nu + n + 1
    messages: List[str] = []
    winding = 0
    if lower <= 0:
        messages.append("error curve passes through the origin")
    else:
        try:
            winding = winding_number(c)
        except ApproxError as exc:
            messages.append(f"winding number unavailable: {exc}")
        else:
            if winding < required:
                messages.append(f"winding number {winding} < nu + n + 1 = {required}")
    return BoundsReport(lower, upper, winding, required, not messages, messages)


def effective_degree(r: BarycentricRational) -> int:
    """max(#finite poles, #finite zeros); 0 for the zero function."""
    if not np.any(r.weights * r.values != 0):
        return 0
    try:
        n_poles = len(r.poles().finite)
    except DegenerateError:
        n_poles = 0
    return max(n_poles, len(r.zeros()))


@dataclass(frozen=True)
class InterpolationPoints:
    points: List[complex]
    multiplicities: List[int]
    expected: int
    messages: List[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return int(sum(self.multiplicities))

    def expanded(self) -> List[complex]:
        out: List[complex] = []
        for p, k in zip(self.points, self.multiplicities):
            out.extend([p] * k)
        return out


def l2_interpolation_points(r: BarycentricRational, poles: Optional[PoleList] = None) -> InterpolationPoints:
    """Origin (once, plus twice per infinite pole) and doubled reflections 1/conj(pi)."""
    poles = poles if poles is not None else r.poles()
    points: List[complex] = [0j]
    mult = [1 + 2 * poles.count_at_infinity]
    for p in poles.finite:
        points.append(1.0 / np.conj(p))
        mult.append(2)
    return InterpolationPoints(points, mult, 2 * r.degree + 1)


def linf_interpolation_points(
    f: Callable,
    r: Callable,
    n: int,
    M: int = DEFAULT_SAMPLES,
    inclusion_radius: float = 1.0 - 1e-9,
    merge_distance: float = 1e-6,
    doublet_distance: float = 1e-5,
    extra_degree: int = 4,
) -> InterpolationPoints:
    """
    Zeros of e = r - f inside the open disk, from an AAA fit of e of
    degree 2n + extra_degree on a fine circle grid. Near-coincident zeros are merged
    with multiplicity.
    """
    z = CircleGrid.roots_of_unity(M)
    e = np.asarray(r(z), dtype=complex) - np.asarray(f(z), dtype=complex)
    fit = aaa(CircleGrid(z, e), 2 * n + extra_degree)
    messages: List[str] = []
    try:
        zeros = [q for q in fit.rational.zeros() if abs(q) < inclusion_radius]
        poles = fit.rational.poles().as_array()
    except DegenerateError as exc:
        zeros, poles = [], np.zeros(0, dtype=complex)
        messages.append(f"zero extraction failed: {exc}")
    if poles.size:
        # pole-zero doublets of the fit are not zeros of e
        zeros = [q for q in zeros if np.min(np.abs(poles - q)) > doublet_distance]

    points: List[complex] = []
    mult: List[int] = []
    for q in sorted(zeros, key=lambda q: (abs(q), np.angle(q))):
        for k, p in enumerate(points):
            if abs(p - q) < merge_distance:
                mult[k] += 1
                break
        else:
            points.append(complex(q))
            mult.append(1)

    expected = 2 * n + 1
    if sum(mult) != expected:
        msg = f"found {sum(mult)} interpolation points, expected {expected}"
        messages.append(msg)
        logger.warning(msg)
    return InterpolationPoints(points, mult, expected, messages)


def interpolation_points(
    f: Callable, r: BarycentricRational, kind: str, M: int = DEFAULT_SAMPLES
) -> InterpolationPoints:
    """Interpolation points of r for kind "l2" (optimality nodes) or "linf" (zeros of e)."""
    kind = kind.lower()
    if kind == "l2":
        return l2_interpolation_points(r)
    if kind == "linf":
        return linf_interpolation_points(f, r, r.degree, M)
    raise InputError(f"unknown interpolation kind {kind!r}")
