"""
AAA: greedy barycentric fitting on a grid of roots of unity.

Usage:
    grid = CircleGrid.sample(f, 200)
    fit = aaa(grid, 3)
    fit.rational(0.5)
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Callable, List

import numpy as np

from rational.barycentric import BarycentricRational
from shared.errors import InputError

logger = logging.getLogger(__name__)

# residual (relative to max|F|) at which f counts as reproduced
EXACT_RTOL = 1e-13


@dataclass(frozen=True, eq=False)
class CircleGrid:
    points: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        z = np.asarray(self.points, dtype=complex).ravel()
        F = np.asarray(self.values, dtype=complex).ravel()
        if z.shape != F.shape:
            raise InputError("grid points and values must have the same length")
        if not np.all(np.isfinite(F)):
            raise InputError("function values on the grid must be finite")
        object.__setattr__(self, "points", z)
        object.__setattr__(self, "values", F)

    @property
    def size(self) -> int:
        return len(self.points)

    @staticmethod
    def roots_of_unity(M: int) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(M) / M)

    @classmethod
    def sample(cls, f: Callable[[np.ndarray], np.ndarray], M: int = 200) -> "CircleGrid":
        z = cls.roots_of_unity(M)
        return cls(z, np.asarray(f(z), dtype=complex))

    def scaled(self, c: complex) -> "CircleGrid":
        return CircleGrid(self.points, c * self.values)


@dataclass(frozen=True, eq=False)
class AaaResult:
    rational: BarycentricRational
    support_indices: List[int] = field(default_factory=list)
    exact: bool = False
    max_errors: List[float] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return self.rational.degree


def loewner_rows(grid: CircleGrid, support_idx: List[int]) -> np.ndarray:
    """Loewner matrix (F_j - f_i) / (z_j - t_i) over non-support rows j."""
    mask = np.ones(grid.size, dtype=bool)
    mask[support_idx] = False
    z, F = grid.points[mask], grid.values[mask]
    t, f = grid.points[support_idx], grid.values[support_idx]
    return (F[:, None] - f[None, :]) / (z[:, None] - t[None, :])


def aaa(grid: CircleGrid, n: int, exact_rtol: float = EXACT_RTOL) -> AaaResult:
    """
    Run up to n+1 greedy AAA steps and return the degree-n fit.

    Stops early, flagging `exact`, once the residual vanishes (f rational of
    lower degree); ties in the greedy choice go to the lowest sample index.
    """
    if n < 0:
        raise InputError(f"degree must be nonnegative, got {n}")
    if grid.size <= n + 1:
        raise InputError(f"grid of {grid.size} points too small for degree {n}")

    z, F = grid.points, grid.values
    scale = float(np.max(np.abs(F))) if grid.size else 0.0
    R = np.full(grid.size, np.mean(F), dtype=complex)
    support: List[int] = []
    errors: List[float] = []
    w = np.ones(1, dtype=complex)
    exact = False

    for m in range(1, n + 2):
        residual = np.abs(F - R)
        residual[support] = -1.0
        j = int(np.argmax(residual))
        support.append(j)

        A = loewner_rows(grid, support)
        if m == 1:
            w = np.ones(1, dtype=complex)
        else:
            _, _, Vh = np.linalg.svd(A, full_matrices=False)
            w = Vh[-1, :].conj()

        r = BarycentricRational(z[support], F[support], w)
        R = r(z)
        err = float(np.max(np.abs(F - R)))
        errors.append(err)
        logger.debug("AAA step %d: support index %d, max error %.3e", m, j, err)

        if err <= exact_rtol * scale and m < n + 1:
            exact = True
            logger.info("AAA reproduced f at degree %d < %d", m - 1, n)
            break
    else:
        exact = errors[-1] <= exact_rtol * scale

    return AaaResult(
        rational=BarycentricRational(z[support], F[support], w),
        support_indices=list(support),
        exact=exact,
        max_errors=errors,
    )
