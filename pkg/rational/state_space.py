"""
Rational functions in state-space form H(z) = C^T (zE - A)^{-1} B + D
(single input, single output).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np
import scipy.linalg

from rational.poles import INFINITY_THRESHOLD, PoleList
from shared.errors import DegenerateError, InputError, SingularSolveError

if TYPE_CHECKING:
    from rational.barycentric import BarycentricRational

# pivot ratio below which an LU factorization is treated as singular
SINGULAR_RTOL = 1e-14
# condition number above which E is treated as singular
E_COND_MAX = 1e14
# |sum w_i| below this (relative) makes a barycentric rational improper
IMPROPER_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class StateSpaceRational:
    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: complex = 0.0

    def __post_init__(self) -> None:
        E = np.atleast_2d(np.array(self.E, dtype=complex))
        A = np.atleast_2d(np.array(self.A, dtype=complex))
        B = np.array(self.B, dtype=complex).ravel()
        C = np.array(self.C, dtype=complex).ravel()
        m = E.shape[0]
        if E.shape != (m, m) or A.shape != (m, m) or B.shape != (m,) or C.shape != (m,):
            raise InputError(
                f"inconsistent state-space shapes E{E.shape} A{A.shape} B{B.shape} C{C.shape}"
            )
        for arr in (E, A, B, C):
            arr.setflags(write=False)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", complex(self.D))

    @property
    def order(self) -> int:
        return self.E.shape[0]

    def __call__(self, z: Union[complex, Sequence[complex], np.ndarray]):
        return eval_ss(self, z)

    def poles(self) -> PoleList:
        return poles_ss(self)


def lu_solve_checked(matrix: np.ndarray, rhs: np.ndarray, what: str = "matrix") -> np.ndarray:
    """LU solve that raises SingularSolveError instead of returning garbage."""
    lu, piv = scipy.linalg.lu_factor(matrix, check_finite=True)
    diag = np.abs(np.diag(lu))
    if diag.size == 0 or diag.min() <= SINGULAR_RTOL * max(diag.max(), np.finfo(float).tiny):
        raise SingularSolveError(f"{what} is numerically singular")
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


def eval_ss(r: StateSpaceRational, z) -> Union[complex, np.ndarray]:
    """C^T (zE - A)^{-1} B + D, one linear solve per point."""
    z_arr = np.asarray(z, dtype=complex)
    out = np.empty(z_arr.size, dtype=complex)
    for idx, zk in enumerate(z_arr.ravel()):
        if not np.any(r.B) or not np.any(r.C):
            out[idx] = r.D
            continue
        x = lu_solve_checked(zk * r.E - r.A, r.B, what=f"zE - A at z={zk}")
        out[idx] = r.C @ x + r.D
    if z_arr.ndim == 0:
        return complex(out[0])
    return out.reshape(z_arr.shape)


def poles_ss(r: StateSpaceRational, threshold: float = INFINITY_THRESHOLD) -> PoleList:
    """Generalized eigenvalues of the pencil (A, E)."""
    if not np.isfinite(np.linalg.cond(r.E)) or np.linalg.cond(r.E) > E_COND_MAX:
        raise DegenerateError("E is singular: pencil (A, E) violates the regularity requirement")
    evals = scipy.linalg.eigvals(r.A, r.E)
    return PoleList.from_values(evals, threshold)


def realize_bary(r: "BarycentricRational") -> StateSpaceRational:
    """
    State-space realization of a barycentric rational.

    With p the support index of largest |w_p| and y_i = x_i for i != p, the
    arrowhead system (z - t_i) x_i = x_0, sum w_i x_i = 1 reduces to n
    states with E = I + 1 v^T, v = w_i / w_p. E is singular exactly when
    sum w_i = 0 (r improper); the (n + 2)-state arrowhead descriptor is
    returned then, which evaluates but has no regular poles_ss.
    """
    t, f, w = r.support, r.values, r.weights
    m = len(t)
    if m == 1:
        return StateSpaceRational(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros(0), np.zeros(0), f[0])
    p = int(np.argmax(np.abs(w)))
    q = np.arange(m) != p
    v = w[q] / w[p]
    s = 1.0 + np.sum(v)
    if abs(s) > IMPROPER_RTOL * (1.0 + np.sum(np.abs(v))):
        ones = np.ones(m - 1, dtype=complex)
        E = np.eye(m - 1, dtype=complex) + np.outer(ones, v)
        A = np.diag(t[q]) + t[p] * np.outer(ones, v)
        B = (t[q] - t[p]) / (s * w[p])
        C = w[q] * (f[q] - f[p])
        return StateSpaceRational(E, A, B, C, f[p] + np.sum(C) / (s * w[p]))
    E = np.eye(m + 1, dtype=complex)
    E[0, 0] = 0.0
    A = np.zeros((m + 1, m + 1), dtype=complex)
    A[0, 1:] = -w
    A[1:, 0] = 1.0
    A[1:, 1:] = np.diag(t)
    B = np.zeros(m + 1, dtype=complex)
    B[0] = 1.0
    return StateSpaceRational(E, A, B, np.concatenate([[0.0], w * f]), 0.0)
