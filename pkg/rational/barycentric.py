"""
Rational functions in barycentric form

    r(z) = sum_i w_i f_i / (z - t_i)  /  sum_i w_i / (z - t_i)

with evaluation, Schneider-Werner differentiation and pole/zero
extraction through the arrowhead pencil.

Usage:
    r = BarycentricRational([1, -1], [1, 0], [1, 1])   # (z + 1) / (2z)
    r(2.0)            -> 0.75
    deriv_bary(r, 1)  -> -0.5
    poles_bary(r)     -> PoleList(finite=(0j,), count_at_infinity=0)
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import List, Sequence, Union

import numpy as np
import scipy.linalg

from rational.poles import INFINITY_THRESHOLD, PoleList, finite_eigenvalues
from shared.errors import DegenerateError, InputError

logger = logging.getLogger(__name__)

# relative distance below which z snaps to a support point
SNAP_RTOL = 1e-13

ArrayLike = Union[complex, Sequence[complex], np.ndarray]


@dataclass(frozen=True, eq=False)
class BarycentricRational:
    support: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.support, dtype=complex).ravel()
        f = np.array(self.values, dtype=complex).ravel()
        w = np.array(self.weights, dtype=complex).ravel()
        if not (len(t) == len(f) == len(w)) or len(t) == 0:
            raise InputError(
                f"support/values/weights must have equal nonzero length, "
                f"got {len(t)}/{len(f)}/{len(w)}"
            )
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(f)) and np.all(np.isfinite(w))):
            raise InputError("barycentric data must be finite")
        if not np.any(w != 0):
            raise DegenerateError("all barycentric weights are zero")
        if len(t) > 1:
            gaps = np.abs(t[:, None] - t[None, :]) + np.diag(np.full(len(t), np.inf))
            if gaps.min() <= 0.0:
                raise InputError("support points must be pairwise distinct")
        for arr in (t, f, w):
            arr.setflags(write=False)
        object.__setattr__(self, "support", t)
        object.__setattr__(self, "values", f)
        object.__setattr__(self, "weights", w)

    @property
    def degree(self) -> int:
        return len(self.support) - 1

    def __call__(self, z: ArrayLike) -> Union[complex, np.ndarray]:
        return eval_bary(self, z)

    def deriv(self, z: ArrayLike) -> Union[complex, np.ndarray]:
        return deriv_bary(self, z)

    def poles(self) -> PoleList:
        return poles_bary(self)

    def zeros(self) -> List[complex]:
        return zeros_bary(self)

    def numerator(self, z: ArrayLike) -> np.ndarray:
        """N(z) = sum w_i f_i / (z - t_i), no snapping."""
        return _cauchy(z, self.support) @ (self.weights * self.values)

    def denominator(self, z: ArrayLike) -> np.ndarray:
        """Dn(z) = sum w_i / (z - t_i), no snapping."""
        return _cauchy(z, self.support) @ self.weights


def _cauchy(z: ArrayLike, t: np.ndarray) -> np.ndarray:
    zf = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        return 1.0 / (zf[:, None] - t[None, :])


def _snap_mask(zf: np.ndarray, r: BarycentricRational) -> np.ndarray:
    t = r.support
    near = np.abs(zf[:, None] - t[None, :]) <= SNAP_RTOL * (1.0 + np.abs(t))[None, :]
    return near & (r.weights != 0)[None, :]


def _restore_shape(z: ArrayLike, out: np.ndarray) -> Union[complex, np.ndarray]:
    z_arr = np.asarray(z)
    if z_arr.ndim == 0:
        return complex(out[0])
    return out.reshape(z_arr.shape)


# ------------------------------------------------------------------ #
#  Evaluation
# ------------------------------------------------------------------ #

def eval_bary(r: BarycentricRational, z: ArrayLike) -> Union[complex, np.ndarray]:
    """Evaluate r at z; queries within SNAP_RTOL of a support point return f_i."""
    zf = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    t, f, w = r.support, r.values, r.weights
    diff = zf[:, None] - t[None, :]
    snap = _snap_mask(zf, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        cauchy = 1.0 / np.where(snap | (diff == 0), 1.0, diff)
        cauchy[:, w == 0] = 0.0
        out = (cauchy @ (w * f)) / (cauchy @ w)
    rows, cols = np.nonzero(snap)
    # first snapped support point wins
    out[rows[::-1]] = f[cols[::-1]]
    return _restore_shape(z, out)


def deriv_bary(r: BarycentricRational, z: ArrayLike) -> Union[complex, np.ndarray]:
    """
    First derivative of r.

    At a support point t_k the Schneider-Werner value
    -(1/w_k) sum_{i != k} w_i (f_k - f_i) / (t_k - t_i) is returned.
    Elsewhere r is written about the nearest support point t_k as
    r = f_k + d q, d = z - t_k, with

        q = S / (w_k + d T),   S = sum_{i != k} w_i (f_i - f_k) / (z - t_i),
                               T = sum_{i != k} w_i / (z - t_i),

    and r' = q + d q'. No term of q cancels as d -> 0, unlike
    (N' Dn - N Dn') / Dn^2 next to a support point.
    """
    zf = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    t, f, w = r.support, r.values, r.weights
    if len(t) == 1:
        return _restore_shape(z, np.zeros(len(zf), dtype=complex))

    at_support = np.abs(zf[:, None] - t[None, :]) <= SNAP_RTOL * (1.0 + np.abs(t))[None, :]
    out = np.empty(len(zf), dtype=complex)
    generic = ~at_support.any(axis=1)

    if np.any(generic):
        diff = zf[generic][:, None] - t[None, :]
        k = np.argmin(np.abs(diff), axis=1)
        rows = np.arange(len(k))
        anchor = np.zeros(diff.shape, dtype=bool)
        anchor[rows, k] = True
        d = diff[rows, k]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            cauchy = np.where(anchor, 0.0, 1.0 / np.where(anchor, 1.0, diff))
            wdf = w[None, :] * (f[None, :] - f[k][:, None])
            S = np.sum(cauchy * wdf, axis=1)
            T = cauchy @ w
            dS = -np.sum(cauchy ** 2 * wdf, axis=1)
            dT = -(cauchy ** 2) @ w
            den = w[k] + d * T
            dq = (dS * den - S * (T + d * dT)) / den ** 2
            out[generic] = S / den + d * dq

    for row in np.nonzero(~generic)[0]:
        k = int(np.nonzero(at_support[row])[0][0])
        out[row] = _schneider_werner(t, f, w, k)
    return _restore_shape(z, out)


def _schneider_werner(t: np.ndarray, f: np.ndarray, w: np.ndarray, k: int) -> complex:
    if w[k] == 0:
        raise DegenerateError(f"derivative undefined at support point {t[k]}: zero weight")
    others = np.arange(len(t)) != k
    total = np.sum(w[others] * (f[k] - f[others]) / (t[k] - t[others]))
    return complex(-total / w[k])


def residues_bary(r: BarycentricRational, poles: Sequence[complex]) -> np.ndarray:
    """Residues N(pi) / Dn'(pi) at the given finite poles."""
    p = np.asarray(poles, dtype=complex)
    if p.size == 0:
        return np.zeros(0, dtype=complex)
    cauchy = _cauchy(p, r.support)
    num = cauchy @ (r.weights * r.values)
    dden = -(cauchy ** 2) @ r.weights
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / dden


# ------------------------------------------------------------------ #
#  Poles and zeros via the arrowhead pencil
# ------------------------------------------------------------------ #

def _arrowhead_eigenvalues(t: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    m = len(t)
    scale = np.linalg.norm(coeffs)
    E = np.zeros((m + 1, m + 1), dtype=complex)
    E[0, 1:] = coeffs / scale
    E[1:, 0] = 1.0
    E[1:, 1:] = np.diag(t)
    B = np.eye(m + 1, dtype=complex)
    B[0, 0] = 0.0
    try:
        evals = scipy.linalg.eigvals(E, B)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise DegenerateError(f"eigenvalue solver failed on arrowhead pencil: {exc}") from exc
    return finite_eigenvalues(evals, spurious=2)


def poles_bary(r: BarycentricRational, threshold: float = INFINITY_THRESHOLD) -> PoleList:
    """Poles of r; eigenvalues beyond threshold are counted at infinity."""
    if len(r.support) == 1:
        return PoleList()
    zero = np.nonzero(r.weights == 0)[0]
    if zero.size:
        raise DegenerateError(
            f"zero weight at support point {r.support[zero[0]]}: degree drop"
        )
    return PoleList.from_values(_arrowhead_eigenvalues(r.support, r.weights), threshold)


def zeros_bary(r: BarycentricRational, threshold: float = INFINITY_THRESHOLD) -> List[complex]:
    """Finite zeros of r (numerator pencil with w_i f_i), sorted by modulus."""
    coeffs = r.weights * r.values
    if not np.any(coeffs != 0):
        raise DegenerateError("identically zero numerator: zeros undefined")
    if len(r.support) == 1:
        return []
    return list(PoleList.from_values(_arrowhead_eigenvalues(r.support, coeffs), threshold).finite)
