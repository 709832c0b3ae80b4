"""
Error-curve analysis on the unit circle: norms, winding number, circularity.

Usage:
    curve = error_curve(f, r, 2048)
    stats = error_stats(f, r, 2048)
    stats.winding, stats.rms, stats.sup
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Callable, Optional, Union

import numpy as np

from rational.barycentric import BarycentricRational
from rational.poles import PoleList
from shared.errors import DegenerateError, InputError, PoleOnCircleError, UndersampledError

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 2048
MAX_WINDING_SAMPLES = 2 ** 16
# distance of a pole from |z| = 1 that counts as on the circle
POLE_ON_CIRCLE_TOL = 1e-10
# max|e| below this times max(1, max|f|) counts as exact reproduction
ROUNDING_RTOL = 1e-12

Approximant = Union[BarycentricRational, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True, eq=False)
class ErrorCurve:
    theta: np.ndarray
    samples: np.ndarray

    def __post_init__(self) -> None:
        if len(self.samples) < 16:
            raise InputError(f"error curve needs at least 16 samples, got {len(self.samples)}")
        if not np.all(np.isfinite(self.samples)):
            raise InputError("error curve samples must be finite")

    @property
    def M(self) -> int:
        return len(self.samples)

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "ErrorCurve":
        e = np.asarray(samples, dtype=complex).ravel()
        return cls(2 * np.pi * np.arange(len(e)) / len(e), e)


@dataclass(frozen=True)
class ErrorStats:
    rms: float
    sup: float
    winding: Optional[int]  # None when the curve could not be resolved
    circularity: float
    min_modulus: float
    samples: int

    def to_dict(self) -> dict:
        return {
            "rms": self.rms,
            "sup": self.sup,
            "winding": self.winding,
            "circularity": self.circularity,
            "min_modulus": self.min_modulus,
            "samples": self.samples,
        }


def _check_poles_off_circle(r: Approximant) -> None:
    if not isinstance(r, BarycentricRational):
        return
    try:
        poles: PoleList = r.poles()
    except DegenerateError:
        return
    for p in poles.finite:
        if abs(abs(p) - 1.0) <= POLE_ON_CIRCLE_TOL:
            raise PoleOnCircleError(float(np.angle(p) % (2 * np.pi)))


def error_curve(f: Callable, r: Approximant, M: int = DEFAULT_SAMPLES) -> ErrorCurve:
    """e_j = r(z_j) - f(z_j) at the M-th roots of unity."""
    theta = 2 * np.pi * np.arange(M) / M
    z = np.exp(1j * theta)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        rz = np.asarray(r(z), dtype=complex)
    bad = ~np.isfinite(rz)
    if np.any(bad):
        raise PoleOnCircleError(float(theta[np.argmax(bad)]))
    _check_poles_off_circle(r)
    e = rz - np.asarray(f(z), dtype=complex)
    return ErrorCurve(theta, e)


def rms_norm(c: ErrorCurve) -> float:
    """Root-mean-square norm (trapezoid mean on the circle)."""
    return float(np.sqrt(np.mean(np.abs(c.samples) ** 2)))


def _parabolic_peak(c: ErrorCurve) -> float:
    mod = np.abs(c.samples)
    j = int(np.argmax(mod))
    y0, y1, y2 = mod[j - 1], mod[j], mod[(j + 1) % c.M]
    curvature = y0 - 2 * y1 + y2
    if curvature >= 0:
        return float(y1)
    offset = 0.5 * (y0 - y2) / curvature
    refined = y1 - 0.25 * (y0 - y2) * offset
    return float(max(refined, y1))


def sup_norm(f: Callable, r: Approximant, M: int = DEFAULT_SAMPLES) -> float:
    """max |r - f| on the circle, refined by a three-point parabola in theta."""
    return _parabolic_peak(error_curve(f, r, M))


def sup_from_curve(c: ErrorCurve) -> float:
    return _parabolic_peak(c)


def winding_number(c: ErrorCurve) -> int:
    """
    Winding number of the curve about the origin.

    Raises UndersampledError if any wrapped phase increment exceeds pi/2.
    """
    if np.min(np.abs(c.samples)) == 0:
        raise DegenerateError("error curve passes through the origin")
    phase = np.angle(c.samples)
    steps = np.diff(np.append(phase, phase[0]))
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    if np.max(np.abs(steps)) > np.pi / 2:
        raise UndersampledError(
            f"phase increment {np.max(np.abs(steps)):.3f} exceeds pi/2 at M={c.M}"
        )
    return int(np.rint(np.sum(steps) / (2 * np.pi)))


def winding_number_adaptive(
    f: Callable, r: Approximant, M: int = DEFAULT_SAMPLES, max_samples: int = MAX_WINDING_SAMPLES
) -> int:
    """winding_number with M doubled on undersampling, up to max_samples."""
    while True:
        try:
            return winding_number(error_curve(f, r, M))
        except UndersampledError:
            if M * 2 > max_samples:
                raise
            logger.debug("winding undersampled at M=%d, doubling", M)
            M *= 2


def circularity(c: ErrorCurve) -> float:
    """(max|e| - min|e|) / (max|e| + min|e|); 0 for a circle, 0 for e = 0."""
    mod = np.abs(c.samples)
    hi, lo = float(mod.max()), float(mod.min())
    if hi + lo == 0:
        return 0.0
    return (hi - lo) / (hi + lo)


def error_stats(
    f: Callable,
    r: Approximant,
    M: int = DEFAULT_SAMPLES,
    max_samples: int = MAX_WINDING_SAMPLES,
    with_winding: bool = True,
) -> ErrorStats:
    """
    All curve statistics on one grid.

    The winding number is left at 0 when e vanishes somewhere or is at
    rounding level relative to f (r reproduces f), and is None when
    with_winding is False.
    """
    curve = error_curve(f, r, M)
    mod = np.abs(curve.samples)
    fmax = float(np.max(np.abs(f(curve.points))))
    winding: Optional[int] = None
    if with_winding:
        resolved = mod.min() > 0 and mod.max() > ROUNDING_RTOL * max(1.0, fmax)
        winding = winding_number_adaptive(f, r, M, max_samples) if resolved else 0
    return ErrorStats(
        rms=rms_norm(curve),
        sup=sup_from_curve(curve),
        winding=winding,
        circularity=circularity(curve),
        min_modulus=float(mod.min()),
        samples=M,
    )
