"""
Hermite Loewner data and the two interpolant constructors used by IRKA.

A HermiteSampleSet holds f and f' at the reflected nodes sigma_i plus the
Taylor data of f at the origin. Both constructors return a degree-n
rational r with

    r(sigma_i) = f(sigma_i),  r'(sigma_i) = f'(sigma_i),  r(0) = f(0)

and, when k poles sit at infinity, r^(j)(0) = f^(j)(0) for j = 1..2k in
place of the k missing node pairs: the origin is then a node of
multiplicity 2k + 1.

Usage:
    s = HermiteSampleSet.from_function(f, [0.5, 0.25j])
    r = bary_hermite_interpolant(s)
    h = ss_interpolant(s)
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np

from rational.barycentric import BarycentricRational
from rational.poles import INFINITY_THRESHOLD, PoleList
from rational.state_space import StateSpaceRational, lu_solve_checked, realize_bary
from shared.errors import CoincidentPointsError, DegenerateError, InputError

logger = logging.getLogger(__name__)

COLLISION_RTOL = 1e-8
# relative singular value below which the Loewner null space counts as >1-dimensional
RANK_RTOL = 1e-13
# auxiliary support points for infinite poles sit on this circle ...
AUX_RADIUS = 0.5
# ... or on this one if the first choice comes close to a node
AUX_FALLBACK_RADIUS = 0.35
AUX_MIN_GAP = 1e-2
TAYLOR_RADIUS = 0.5
TAYLOR_SAMPLES = 64
# Loewner pencils above this condition number are realized from the barycentric form
SS_COND_MAX = 1e4
# ... or when they miss the sampled values by more than this
SS_DATA_RTOL = 1e-11


def taylor_coefficients(
    f: Callable, count: int, radius: float = TAYLOR_RADIUS, samples: int = TAYLOR_SAMPLES
) -> np.ndarray:
    """First `count` Taylor coefficients of f at 0 by the trapezoid rule on |z| = radius."""
    if count <= 0:
        return np.zeros(0, dtype=complex)
    theta = 2 * np.pi * np.arange(samples) / samples
    values = np.asarray(f(radius * np.exp(1j * theta)), dtype=complex)
    coeffs = np.fft.fft(values) / samples
    return coeffs[:count] / radius ** np.arange(count)


@dataclass(frozen=True, eq=False)
class HermiteSampleSet:
    points: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    origin_value: complex
    origin_derivative: complex = 0j
    infinite_count: int = 0
    # Taylor coefficients F_0, F_1, ... of f at 0, at least 2 * infinite_count + 1 of them
    origin_taylor: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self) -> None:
        sigma = np.asarray(self.points, dtype=complex).ravel()
        values = np.asarray(self.values, dtype=complex).ravel()
        derivs = np.asarray(self.derivatives, dtype=complex).ravel()
        if not (len(sigma) == len(values) == len(derivs)):
            raise InputError("points, values and derivatives must have equal length")
        if self.infinite_count < 0:
            raise InputError("infinite_count must be nonnegative")
        if np.any(sigma == 0):
            raise InputError("Hermite nodes must not include the origin")
        _check_collisions(sigma)
        taylor = np.asarray(self.origin_taylor, dtype=complex).ravel()
        if len(taylor) < 2 * self.infinite_count + 1:
            if self.infinite_count:
                raise InputError(
                    f"{self.infinite_count} infinite poles need Taylor coefficients up to order "
                    f"{2 * self.infinite_count}"
                )
            taylor = np.array([self.origin_value, self.origin_derivative], dtype=complex)
        object.__setattr__(self, "points", sigma)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "derivatives", derivs)
        object.__setattr__(self, "origin_value", complex(self.origin_value))
        object.__setattr__(self, "origin_derivative", complex(self.origin_derivative))
        object.__setattr__(self, "origin_taylor", taylor)

    @property
    def n(self) -> int:
        """Degree of the interpolant the set determines."""
        return len(self.points) + self.infinite_count

    @classmethod
    def from_function(
        cls,
        f: Callable,
        points: Sequence[complex],
        infinite_count: int = 0,
        taylor_radius: float = TAYLOR_RADIUS,
        taylor_samples: int = TAYLOR_SAMPLES,
    ) -> "HermiteSampleSet":
        """Sample f (which must expose .derivative) at the nodes and at the origin."""
        derivative = getattr(f, "derivative", None)
        if derivative is None:
            raise InputError("Hermite sampling needs a function with a .derivative method")
        sigma = np.asarray(list(points), dtype=complex)
        taylor = np.zeros(2 * infinite_count + 1 if infinite_count else 2, dtype=complex)
        taylor[0] = complex(f(0j))
        taylor[1] = complex(derivative(0j))
        if infinite_count:
            taylor[2:] = taylor_coefficients(f, len(taylor), taylor_radius, taylor_samples)[2:]
        return cls(
            points=sigma,
            values=np.asarray(f(sigma), dtype=complex) if sigma.size else np.zeros(0, dtype=complex),
            derivatives=np.asarray(derivative(sigma), dtype=complex) if sigma.size else np.zeros(0, dtype=complex),
            origin_value=taylor[0],
            origin_derivative=taylor[1],
            infinite_count=infinite_count,
            origin_taylor=taylor,
        )


def _check_collisions(sigma: np.ndarray) -> None:
    if len(sigma) < 2:
        return
    gaps = np.abs(sigma[:, None] - sigma[None, :]) + np.diag(np.full(len(sigma), np.inf))
    limit = COLLISION_RTOL * (1.0 + np.abs(sigma))[:, None]
    if np.any(gaps < limit):
        i, j = np.argwhere(gaps < limit)[0]
        raise CoincidentPointsError(f"Hermite nodes {sigma[i]} and {sigma[j]} coincide")


def build_hermite_loewner(s: HermiteSampleSet) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hermite Loewner matrix L, shifted Loewner matrix M and data vector Y."""
    sigma, f, df = s.points, s.values, s.derivatives
    _check_collisions(sigma)
    n = len(sigma)
    diff = sigma[:, None] - sigma[None, :]
    off = ~np.eye(n, dtype=bool)
    L = np.empty((n, n), dtype=complex)
    M = np.empty((n, n), dtype=complex)
    L[off] = ((f[:, None] - f[None, :])[off]) / diff[off]
    M[off] = (((sigma * f)[:, None] - (sigma * f)[None, :])[off]) / diff[off]
    L[~off] = df
    M[~off] = f + sigma * df
    return L, M, f.copy()


def ss_interpolant(s: HermiteSampleSet) -> StateSpaceRational:
    """
    State-space interpolant with a feedthrough term fixing r(0) = f(0).

    E = -L, A = -M, B = C = Y; the scalar D is then added to every entry
    of A and subtracted from every entry of B and C. When the Loewner
    pencil is ill-conditioned, the feedthrough degenerates, the result
    misses its own data, or k poles sit at infinity, the barycentric
    interpolant of the same data is realized in state-space form instead.
    """
    if s.infinite_count:
        return realize_bary(bary_hermite_interpolant(s))
    nodes = np.append(s.points, 0j)
    data = np.append(s.values, s.origin_value)
    try:
        h = _loewner_ss(s)
        miss = float(np.max(np.abs(np.asarray(h(nodes)) - data)))
    except DegenerateError as exc:
        logger.info("Loewner realization failed (%s); realizing the barycentric interpolant", exc)
        return realize_bary(bary_hermite_interpolant(s))
    if not miss <= SS_DATA_RTOL * max(1.0, float(np.max(np.abs(data)))):
        logger.info("Loewner realization misses its data by %.2e; realizing the barycentric interpolant", miss)
        return realize_bary(bary_hermite_interpolant(s))
    cond = max(np.linalg.cond(h.E), np.linalg.cond(h.A))
    if not cond <= SS_COND_MAX:
        logger.info("Loewner pencil condition %.2e; realizing the barycentric interpolant", cond)
        return realize_bary(bary_hermite_interpolant(s))
    return h


def _loewner_ss(s: HermiteSampleSet) -> StateSpaceRational:
    L, M, Y = build_hermite_loewner(s)
    n = len(Y)
    E, A, B, C = -L, -M, Y.copy(), Y.copy()
    ones = np.ones(n, dtype=complex)
    Ainv_B = lu_solve_checked(A, B, what="shifted Loewner matrix")
    Ainv_1 = lu_solve_checked(A, ones, what="shifted Loewner matrix")
    d0 = s.origin_value + C @ Ainv_B
    d1 = -ones @ Ainv_B - 1.0
    d2 = -C @ Ainv_1 - 1.0
    d3 = -ones @ Ainv_1
    denom = d1 * d2 + d3 * d0
    if d0 == 0:
        D = 0j
    elif abs(denom) <= 1e-14 * max(abs(d1 * d2), abs(d3 * d0)):
        raise DegenerateError("feedthrough denominator d1*d2 + d3*d0 vanishes")
    else:
        D = d0 / denom
    return StateSpaceRational(E, A + D, B - D, C - D, D)


def _null_vector(matrix: np.ndarray) -> Tuple[np.ndarray, int]:
    """Unit right singular vector of the smallest singular value, and the null-space dimension."""
    _, sv, Vh = np.linalg.svd(matrix, full_matrices=True)
    cols = matrix.shape[1]
    top = sv[0] if sv.size else 0.0
    small = int(np.count_nonzero(sv <= RANK_RTOL * top)) if top > 0 else len(sv)
    corank = cols - len(sv) + small
    return Vh[-1, :].conj(), corank


def bary_hermite_interpolant(s: HermiteSampleSet) -> BarycentricRational:
    """
    Barycentric Hermite interpolant on support (sigma_1..sigma_n, 0).

    The weights span the null space of the Hermite Loewner matrix with its
    origin row removed. With k infinite poles the construction switches to
    _bary_with_infinite_poles.
    """
    if s.infinite_count:
        return _bary_with_infinite_poles(s)
    t = np.append(s.points, 0j)
    values = np.append(s.values, s.origin_value)
    n = len(s.points)
    if n == 0:
        return BarycentricRational(t, values, [1.0])
    diff = t[:n, None] - t[None, :]
    diff[np.arange(n), np.arange(n)] = 1.0
    L_hat = (values[:n, None] - values[None, :]) / diff
    L_hat[np.arange(n), np.arange(n)] = s.derivatives
    w, corank = _null_vector(L_hat)
    if corank > 1:
        logger.warning("Hermite interpolant not unique (null space dimension %d)", corank)
    return BarycentricRational(t, values, w)


def auxiliary_points(sigma: np.ndarray, k: int) -> np.ndarray:
    """k points on a small circle, rotated half a step, away from the nodes."""
    angles = 2 * np.pi * (np.arange(k) + 0.5) / k
    for radius in (AUX_RADIUS, AUX_FALLBACK_RADIUS):
        tau = radius * np.exp(1j * angles)
        if sigma.size == 0 or np.min(np.abs(tau[:, None] - sigma[None, :])) > AUX_MIN_GAP:
            return tau
    return tau


def _series_coeff(t: complex, m: int) -> complex:
    """Coefficient of z^m in z / (z - t) (or in z * (1/z) = 1 when t = 0)."""
    if t == 0:
        return 1.0 + 0j if m == 0 else 0j
    if m == 0:
        return 0j
    return -(t ** (-m))


def _bary_with_infinite_poles(s: HermiteSampleSet) -> BarycentricRational:
    """
    Interpolant for a node set where k = s.infinite_count reflected nodes
    sit at the origin.

    Unknowns are the n+1 weights and k free numerator coefficients a_j at
    auxiliary points tau_j. Rows: Schneider-Werner derivative conditions at
    the finite nodes and Taylor conditions r^(j)(0) = f^(j)(0) for j = 1..2k,
    n + k rows in all. The denominator is left free: its poles reach
    infinity only at a fixed point of the iteration.
    """
    k = s.infinite_count
    sigma, f, df = s.points, s.values, s.derivatives
    p = len(sigma)
    tau = auxiliary_points(sigma, k)
    F = s.origin_taylor
    origin = p
    t = np.concatenate([sigma, [0j], tau])
    m = len(t)  # n + 1
    rows: List[np.ndarray] = []

    for kk in range(p):
        row = np.zeros(m + k, dtype=complex)
        for i in range(p + 1):
            if i == kk:
                row[i] = df[kk]
            else:
                fi = f[i] if i < p else F[0]
                row[i] = (f[kk] - fi) / (sigma[kk] - t[i])
        for j in range(k):
            gap = sigma[kk] - tau[j]
            row[origin + 1 + j] = f[kk] / gap
            row[m + j] = -1.0 / gap
        rows.append(row)

    for order in range(1, 2 * k + 1):
        row = np.zeros(m + k, dtype=complex)
        for i in range(p):
            row[i] = f[i] * _series_coeff(sigma[i], order) - sum(
                F[l] * _series_coeff(sigma[i], order - l) for l in range(order)
            )
        row[origin] = -F[order]
        for j in range(k):
            row[origin + 1 + j] = -sum(F[l] * _series_coeff(tau[j], order - l) for l in range(order))
            row[m + j] = _series_coeff(tau[j], order)
        rows.append(row)

    system = np.array(rows)
    norms = np.linalg.norm(system, axis=1)
    system = system / np.where(norms > 0, norms, 1.0)[:, None]
    x, corank = _null_vector(system)
    if corank > 1:
        logger.warning("interpolant with %d infinite poles not unique (null space dimension %d)", k, corank)
    w, a = x[:m], x[m:]
    w_tau = w[origin + 1:]
    if np.any(np.abs(w_tau) <= 1e-14 * np.linalg.norm(w)):
        raise DegenerateError("auxiliary support point received a zero weight")
    values = np.concatenate([f, [F[0]], a / w_tau])
    return BarycentricRational(t, values, w)


@dataclass(frozen=True)
class ReflectedPoints:
    points: Tuple[complex, ...]
    infinite_count: int

    @property
    def n(self) -> int:
        return len(self.points) + self.infinite_count


def reflect_poles(p: PoleList) -> ReflectedPoints:
    """1/conj(pi) for every finite pole; poles at infinity map to the origin and are counted."""
    points = []
    for pole in p.finite:
        if pole == 0:
            raise DegenerateError("pole at the origin has its reflection at infinity")
        points.append(complex(1.0 / np.conj(pole)))
    return ReflectedPoints(tuple(points), p.count_at_infinity)


def unreflect(points: Sequence[complex], infinite_count: int, threshold: float = INFINITY_THRESHOLD) -> PoleList:
    """Poles whose reflections are the given nodes."""
    poles = [complex(1.0 / np.conj(s)) for s in points if abs(s) * threshold > 1.0]
    extra = sum(1 for s in points if abs(s) * threshold <= 1.0)
    return PoleList(tuple(sorted(poles, key=lambda q: (abs(q), math.atan2(q.imag, q.real)))), infinite_count + extra)
