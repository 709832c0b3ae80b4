"""
Potential function phi(z) = prod(z - zeta_k) / prod(z - pi_k)^2 of an
interpolation configuration, its field of log10|phi| on a lattice, and
the contour-integral identity check for the interpolation error.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from rational.poles import INFINITY_THRESHOLD

logger = logging.getLogger(__name__)

# lattice nodes this close to a point or pole get the -inf / +inf sentinel
COINCIDENCE_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    x_max: float = 1.6
    size: int = 161

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.x_max, self.x_max, self.size)


@dataclass(frozen=True, eq=False)
class PotentialField:
    points: np.ndarray
    poles: np.ndarray
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray  # values[i, j] = log10|phi(x[j] + i y[i])|

    @property
    def degree(self) -> int:
        return (len(self.points) - 1) // 2


def _finite_poles(poles: Sequence[complex]) -> np.ndarray:
    p = np.asarray(list(poles), dtype=complex)
    return p[np.isfinite(p) & (np.abs(p) <= INFINITY_THRESHOLD)]


def log10_abs_phi(z: np.ndarray, points: np.ndarray, poles: np.ndarray) -> np.ndarray:
    """log10|phi(z)| with sentinels at coincident points (-inf) and poles (+inf)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=float)
    with np.errstate(divide="ignore"):
        for zeta in points:
            out += np.log10(np.abs(z - zeta))
        for p in poles:
            out -= 2.0 * np.log10(np.abs(z - p))
    for zeta in points:
        out[np.abs(z - zeta) <= COINCIDENCE_TOL] = -np.inf
    for p in poles:
        out[np.abs(z - p) <= COINCIDENCE_TOL] = np.inf
    return out


def potential_field(
    points: Sequence[complex],
    poles: Sequence[complex],
    grid: Optional[GridSpec] = None,
    workers: int = 1,
) -> PotentialField:
    """
    log10|phi| on a square lattice over [-x_max, x_max]^2.

    Infinite poles are dropped. With workers > 1 the rows are split into
    blocks evaluated concurrently; the result does not depend on the split.
    """
    grid = grid or GridSpec()
    zeta = np.asarray(list(points), dtype=complex)
    pi = _finite_poles(poles)
    axis = grid.axis
    X, Y = np.meshgrid(axis, axis)
    Z = X + 1j * Y

    if workers > 1:
        blocks = np.array_split(np.arange(grid.size), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda rows: log10_abs_phi(Z[rows], zeta, pi), blocks))
        values = np.vstack(parts)
    else:
        values = log10_abs_phi(Z, zeta, pi)
    return PotentialField(zeta, pi, axis, axis.copy(), values)


def circle_spread(points: Sequence[complex], poles: Sequence[complex], M: int = 1024) -> float:
    """max - min of log10|phi| on |z| = 1; zero for a Blaschke configuration."""
    z = np.exp(2j * np.pi * np.arange(M) / M)
    vals = log10_abs_phi(z, np.asarray(list(points), dtype=complex), _finite_poles(poles))
    return float(vals.max() - vals.min())


# ---------------------------------------------------------------------------
# Contour-integral identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HermiteCheck:
    residual: float
    radius: float
    samples: int
    precondition_ok: bool
    messages: List[str] = field(default_factory=list)


def default_quadrature_radius(poles: Sequence[complex], f_radius: Optional[float] = None) -> float:
    """Geometric mean of 1 and the nearest pole modulus, kept inside f's disk of analyticity."""
    pi = _finite_poles(poles)
    radius = math.sqrt(float(np.min(np.abs(pi)))) if pi.size else 2.0
    if f_radius is not None and math.isfinite(f_radius):
        radius = min(radius, 0.5 * (1.0 + f_radius))
    return radius


def _log_phi(w: np.ndarray, points: np.ndarray, poles: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    out = np.zeros(w.shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for zeta in points:
            out += np.log(w - zeta)
        for p in poles:
            out -= 2.0 * np.log(w - p)
    return out


def hermite_identity_check(
    f: Callable,
    r: Callable,
    points: Sequence[complex],
    poles: Sequence[complex],
    z: complex,
    R: float,
    Mq: int = 512,
    f_radius: Optional[float] = None,
) -> HermiteCheck:
    """
    Residual of f(z) - r(z) = (1/2 pi i) oint_{|t|=R} phi(z)/phi(t) f(t)/(t - z) dt
    by the Mq-point trapezoid rule, relative to max(1, |f(z) - r(z)|).
    """
    zeta = np.asarray(list(points), dtype=complex)
    pi = _finite_poles(poles)
    messages: List[str] = []
    if abs(z) >= R:
        messages.append(f"evaluation point |z|={abs(z):.6g} not inside radius {R:.6g}")
    for p in pi:
        if abs(p) <= R:
            messages.append(f"pole {p:.6g} lies inside the quadrature radius {R:.6g}")
    radius_f = f_radius if f_radius is not None else getattr(f, "radius", None)
    if radius_f is not None and R >= radius_f:
        messages.append(f"radius {R:.6g} reaches the singularity of f at {radius_f:.6g}")
    if messages:
        return HermiteCheck(float("nan"), R, Mq, False, messages)

    t = R * np.exp(2j * np.pi * np.arange(Mq) / Mq)
    ratio = np.exp(_log_phi(np.array([z]), zeta, pi)[0] - _log_phi(t, zeta, pi))
    integral = np.mean(ratio * np.asarray(f(t), dtype=complex) * t / (t - z))
    lhs = complex(f(z)) - complex(r(z))
    residual = abs(lhs - integral) / max(1.0, abs(lhs))
    return HermiteCheck(float(residual), R, Mq, True, messages)
