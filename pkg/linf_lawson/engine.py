"""
Best Linf approximation on the unit circle: AAA followed by Lawson
iteratively reweighted least squares.

Usage:
    result = linf_best(resolve("exp4"), 3, LawsonConfig(degree=3))
    result.stats.sup, result.stats.winding

Support points are frozen after AAA. Each Lawson step solves the
linearized weighted problem min sum_j g_j |F_j D(z_j) - N(z_j)|^2 over a
numerator/denominator coefficient pair (alpha, beta) in the basis
1/(z - t_i), with |(alpha, beta)| = 1. A support sample t_k enters as the
row beta_k F_k - alpha_k, the limit of (z - t_k)(F D - N), so the iterate
is not forced to interpolate at its support points and every sample is
reweighted by its own error. The result is alpha_i / beta_i as values with
weights beta_i, which is the same rational function.

Iterates with a pole in the closed unit disk are never reported. When the
best constant (the Chebyshev centre of the samples) is as good as the
Lawson iterate the constant wins: that is the defective case, e.g. z^2 at
degree 1, whose best approximant is 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from diagnostics.error_curve import DEFAULT_SAMPLES
from diagnostics.result import ApproxResult, summarize
from linf_lawson.aaa import EXACT_RTOL, AaaResult, CircleGrid, aaa
from rational.barycentric import BarycentricRational
from rational.poles import PoleList
from shared.base_solver import BaseSolver
from shared.errors import DegenerateError, InputError
from shared.profile_loader import default_profile_path, get_threshold, load_profile, merge_profiles

logger = logging.getLogger(__name__)

STOP_EXACT = "exact"
STOP_STAGNATION = "stagnation"
STOP_CAP = "iteration_cap"
STOP_DEGENERATE = "degenerate"

# the best constant wins unless Lawson beats it by this relative margin
DEFICIENT_RTOL = 1e-9


@dataclass(frozen=True)
class LawsonConfig:
    degree: int
    max_lawson_iterations: int = 100
    stagnation_tol: float = 1e-3
    stagnation_window: int = 10
    weight_floor: float = 1e-30
    samples: int = 200
    exact_rtol: float = EXACT_RTOL

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise InputError(f"degree must be nonnegative, got {self.degree}")
        if self.max_lawson_iterations < 0 or self.stagnation_window < 1:
            raise InputError("Lawson iteration cap and stagnation window must be positive")
        if self.stagnation_tol < 0 or self.weight_floor <= 0:
            raise InputError("stagnation tolerance and weight floor must be positive")
        if self.samples < 2 * self.degree + 2:
            raise InputError(
                f"solver grid of {self.samples} points too small for degree {self.degree} "
                f"(need at least {2 * self.degree + 2})"
            )

    @classmethod
    def from_profile(cls, profile: Dict[str, Any], degree: int, **overrides: Any) -> "LawsonConfig":
        """Build a config from a linf_lawson profile; non-None overrides win."""
        values = {
            "max_lawson_iterations": int(get_threshold(profile, "lawson", "max_iterations", default=100)),
            "stagnation_tol": float(get_threshold(profile, "lawson", "stagnation_tol", default=1e-3)),
            "stagnation_window": int(get_threshold(profile, "lawson", "stagnation_window", default=10)),
            "weight_floor": float(get_threshold(profile, "lawson", "weight_floor", default=1e-30)),
            "samples": int(get_threshold(profile, "grid", "samples", default=200)),
            "exact_rtol": float(get_threshold(profile, "aaa", "exact_rtol", default=EXACT_RTOL)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(degree=degree, **values)


@dataclass(eq=False)
class LawsonResult:
    rational: BarycentricRational
    max_errors: List[float]  # best-so-far max sample error, index 0 is the AAA fit
    iterations: int
    stop_reason: str
    weights: np.ndarray
    warnings: List[str] = field(default_factory=list)
    admissible: bool = True  # reported iterate has no pole in the closed disk

    @property
    def converged(self) -> bool:
        return self.stop_reason != STOP_DEGENERATE


def _cauchy_rows(grid: CircleGrid, support_idx: List[int]) -> np.ndarray:
    """1/(z_j - t_i) on every sample; a support sample's row is the unit vector e_k."""
    t = grid.points[support_idx]
    C = np.zeros((grid.size, len(support_idx)), dtype=complex)
    mask = np.ones(grid.size, dtype=bool)
    mask[support_idx] = False
    C[mask] = 1.0 / (grid.points[mask][:, None] - t[None, :])
    C[support_idx, np.arange(len(support_idx))] = 1.0
    return C


def _admissible(r: BarycentricRational) -> bool:
    """No pole in the closed unit disk."""
    try:
        return not r.poles().inside_closed_disk()
    except DegenerateError:
        return False


def _stagnated(history: List[float], window: int, tol: float) -> bool:
    if len(history) <= window:
        return False
    old, new = history[-window - 1], history[-1]
    if new == 0:
        return True
    return (old - new) / new < tol


def lawson_refine(
    grid: CircleGrid,
    r0: Union[AaaResult, BarycentricRational],
    config: LawsonConfig,
    support_idx: Optional[List[int]] = None,
) -> LawsonResult:
    """
    Lawson reweighting from the AAA fit r0 with its support points frozen.

    Returns the iterate of smallest max sample error among those with no
    pole in the closed disk. max_errors is non-increasing once such an
    iterate is held; r0 is kept only while nothing admissible turns up.
    """
    if isinstance(r0, AaaResult):
        support_idx = list(r0.support_indices)
        r0 = r0.rational
    if support_idx is None:
        support_idx = [int(np.argmin(np.abs(grid.points - t))) for t in r0.support]
    if not np.allclose(grid.points[support_idx], r0.support, rtol=0, atol=1e-12):
        raise InputError("support points of r0 are not grid points")

    z, F = grid.points, grid.values
    m = len(support_idx)
    scale = float(np.max(np.abs(F)))
    t = z[support_idx]

    best = r0
    best_err = float(np.max(np.abs(F - r0(z))))
    best_ok = _admissible(r0)
    history = [best_err]
    warnings: List[str] = []
    gamma = np.full(grid.size, 1.0 / grid.size)

    if scale == 0.0 or best_err <= config.exact_rtol * scale:
        return LawsonResult(best, history, 0, STOP_EXACT, gamma, warnings)

    C = _cauchy_rows(grid, support_idx)
    FC = (F / scale)[:, None] * C
    stop_reason = STOP_CAP
    iterations = 0

    for it in range(1, config.max_lawson_iterations + 1):
        iterations = it
        root = np.sqrt(gamma)[:, None]
        A = np.hstack([root * FC, -root * C])
        _, _, Vh = np.linalg.svd(A, full_matrices=False)
        x = Vh[-1, :].conj()
        beta, alpha = x[:m], x[m:] * scale
        if np.any(beta == 0):
            msg = f"Lawson step {it}: zero denominator coefficient, keeping best iterate"
            logger.warning(msg)
            warnings.append(msg)
            stop_reason = STOP_DEGENERATE
            break

        r = BarycentricRational(t, alpha / beta, beta)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            err = np.abs(F - r(z))
        if not np.all(np.isfinite(err)):
            msg = f"Lawson step {it}: iterate has a pole on a sample point, keeping best iterate"
            logger.warning(msg)
            warnings.append(msg)
            stop_reason = STOP_DEGENERATE
            break
        max_err = float(np.max(err))
        if max_err < best_err or not best_ok:
            ok = _admissible(r)
            if ok and (max_err < best_err or not best_ok):
                best, best_err, best_ok = r, max_err, True
            elif not best_ok and max_err < best_err:
                best, best_err = r, max_err
        history.append(best_err)
        if it % 10 == 0:
            logger.debug("Lawson step %d: max error %.6e, best %.6e", it, max_err, best_err)

        gamma = gamma * err
        if np.all(gamma < config.weight_floor):
            msg = f"Lawson step {it}: all weights below floor {config.weight_floor:g}"
            logger.warning(msg)
            warnings.append(msg)
            stop_reason = STOP_DEGENERATE
            gamma = np.full_like(gamma, 1.0 / gamma.size)
            break
        gamma = np.maximum(gamma, config.weight_floor)
        gamma = gamma / gamma.sum()

        if config.stagnation_tol > 0 and _stagnated(history, config.stagnation_window, config.stagnation_tol):
            stop_reason = STOP_STAGNATION
            logger.info("Lawson stagnated after %d steps at max error %.6e", it, best_err)
            break

    if not best_ok:
        msg = "no Lawson iterate is free of poles in the closed disk"
        logger.warning(msg)
        warnings.append(msg)
    return LawsonResult(best, history, iterations, stop_reason, gamma, warnings, admissible=best_ok)


def chebyshev_centre(values: np.ndarray, config: LawsonConfig) -> Tuple[complex, float]:
    """
    Best constant approximation to the samples in the max norm.

    Linear Lawson: c = sum g F / sum g, g <- g |F - c|. Returns the best
    centre seen and its max deviation.
    """
    F = np.asarray(values, dtype=complex)
    gamma = np.full(len(F), 1.0 / len(F))
    best_c = complex(np.sum(gamma * F))
    best_err = float(np.max(np.abs(F - best_c)))
    history = [best_err]
    for _ in range(config.max_lawson_iterations):
        c = complex(np.sum(gamma * F) / np.sum(gamma))
        err = np.abs(F - c)
        if float(err.max()) < best_err:
            best_c, best_err = c, float(err.max())
        history.append(best_err)
        if best_err == 0.0:
            break
        gamma = np.maximum(gamma * err, config.weight_floor)
        gamma = gamma / gamma.sum()
        if config.stagnation_tol > 0 and _stagnated(history, config.stagnation_window, config.stagnation_tol):
            break
    return best_c, best_err


def _check_error(f: Callable, r: Callable, M: int) -> float:
    z = CircleGrid.roots_of_unity(M)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        err = np.abs(np.asarray(r(z), dtype=complex) - np.asarray(f(z), dtype=complex))
    return float(np.max(err)) if np.all(np.isfinite(err)) else float("inf")


def linf_best(
    f: Callable,
    n: int,
    config: Optional[LawsonConfig] = None,
    diagnostic_samples: int = DEFAULT_SAMPLES,
) -> ApproxResult:
    """
    Sample f, fit by AAA, refine by Lawson and measure on the diagnostic grid.

    The Lawson iterate is compared on the diagnostic grid with the best
    constant; the constant is returned when the iterate is not better by a
    relative DEFICIENT_RTOL or has a pole in the closed disk.
    """
    config = config or LawsonConfig(degree=n)
    if config.degree != n:
        config = replace(config, degree=n)
    grid = CircleGrid.sample(f, config.samples)
    fit = aaa(grid, n, config.exact_rtol)
    if fit.exact:
        logger.info("AAA reproduced f exactly; Lawson skipped")
        refined = LawsonResult(
            fit.rational, [fit.max_errors[-1]], 0, STOP_EXACT, np.zeros(0), []
        )
        return _summarize(f, refined, n, diagnostic_samples)

    refined = lawson_refine(grid, fit, config)
    centre, _ = chebyshev_centre(grid.values, config)
    constant = BarycentricRational([grid.points[0]], [centre], [1.0])
    err_lawson = _check_error(f, refined.rational, diagnostic_samples)
    err_constant = _check_error(f, constant, diagnostic_samples)
    if not refined.admissible or err_constant <= err_lawson * (1.0 + DEFICIENT_RTOL):
        logger.info(
            "best constant %.6g%+.6gj (max error %.6e) beats degree-%d Lawson (%.6e)",
            centre.real, centre.imag, err_constant, n, err_lawson,
        )
        refined = replace(refined, rational=constant)
        return _summarize(f, refined, n, diagnostic_samples, poles=PoleList((), n))
    return _summarize(f, refined, n, diagnostic_samples)


def _summarize(
    f: Callable, refined: LawsonResult, n: int, M: int, poles: Optional[PoleList] = None
) -> ApproxResult:
    return summarize(
        f,
        refined.rational,
        "linf",
        n,
        M=M,
        poles=poles,
        iterations=refined.iterations,
        converged=refined.converged,
        warnings=list(refined.warnings),
        history=list(refined.max_errors),
    )


class LawsonSolver(BaseSolver):
    """
    Linf solver driven by profiles/default.yaml; keyword overrides replace
    individual LawsonConfig fields.
    """

    def __init__(
        self,
        profile_path: Optional[str] = None,
        profile_overrides: Optional[Dict[str, Any]] = None,
        **overrides: Any,
    ) -> None:
        path = Path(profile_path) if profile_path else default_profile_path(__file__)
        self.profile = merge_profiles(load_profile(path), profile_overrides or {})
        self.overrides = overrides
        self.diagnostic_samples = int(
            get_threshold(self.profile, "diagnostics", "samples", default=DEFAULT_SAMPLES)
        )
        super().__init__(
            solver_name="linf_lawson",
            profile_name=self.profile.get("name", "linf_lawson_default"),
        )

    def config_for(self, degree: int) -> LawsonConfig:
        return LawsonConfig.from_profile(self.profile, degree, **self.overrides)

    def solve(self, f: Any, degree: int) -> ApproxResult:
        return linf_best(f, degree, self.config_for(degree), self.diagnostic_samples)
