"""
Brute-force degree-1 L2 oracle with a real pole: a scan over p followed
by a bounded scalar refinement. For each p the best a + b/(z - p) comes
from linear least squares on the circle samples.
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    pole: float
    error: float  # rms of the residual on the circle
    coefficients: Tuple[complex, complex]  # (a, b)

    def __call__(self, z):
        a, b = self.coefficients
        return a + b / (np.asarray(z, dtype=complex) - self.pole)


def _fit(F: np.ndarray, z: np.ndarray, p: float) -> Tuple[float, complex, complex]:
    basis = np.column_stack([np.ones_like(z), 1.0 / (z - p)])
    coef, *_ = np.linalg.lstsq(basis, F, rcond=None)
    rms = float(np.sqrt(np.mean(np.abs(basis @ coef - F) ** 2)))
    return rms, complex(coef[0]), complex(coef[1])


def _scan(F: np.ndarray, z: np.ndarray, poles: np.ndarray) -> np.ndarray:
    # projection onto span{1, v} with v centred against the constant column
    V = 1.0 / (z[None, :] - poles[:, None])
    Vc = V - V.mean(axis=1, keepdims=True)
    Fc = F - F.mean()
    num = np.abs(Vc.conj() @ Fc) ** 2
    den = np.sum(np.abs(Vc) ** 2, axis=1)
    sq = np.mean(np.abs(Fc) ** 2) - num / (den * len(z))
    return np.sqrt(np.maximum(sq, 0.0))


def brute_force_degree1(
    f: Callable,
    lower: float = 1.1,
    upper: float = 10.0,
    step: float = 1e-3,
    samples: int = 512,
) -> OracleResult:
    """Best real-pole degree-1 L2 approximant with its pole searched in (lower, upper]."""
    z = np.exp(2j * np.pi * np.arange(samples) / samples)
    F = np.asarray(f(z), dtype=complex)
    grid = np.arange(lower + step, upper + 0.5 * step, step)
    errors = _scan(F, z, grid)
    best = int(np.argmin(errors))
    logger.debug("oracle scan: best grid pole %.4f, rms %.6e", grid[best], errors[best])
    lo, hi = max(grid[best] - step, lower + 1e-12), min(grid[best] + step, upper)
    refined = minimize_scalar(
        lambda p: _fit(F, z, p)[0], bounds=(lo, hi), method="bounded", options={"xatol": 1e-10}
    )
    pole = float(refined.x)
    rms, a, b = _fit(F, z, pole)
    return OracleResult(pole, rms, (a, b))
