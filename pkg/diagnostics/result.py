"""ApproxResult: one best approximant with its measured diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Any, Callable, List, Optional

from diagnostics.error_curve import DEFAULT_SAMPLES, MAX_WINDING_SAMPLES, ErrorStats, error_curve, error_stats
from diagnostics.optimality import BoundsReport, effective_degree, near_circular_bounds
from rational.barycentric import BarycentricRational
from rational.poles import PoleList
from rational.state_space import StateSpaceRational
from shared.errors import DegenerateError, UndersampledError

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class ApproxResult:
    norm: str  # "l2" or "linf"
    degree: int
    approximant: BarycentricRational
    stats: ErrorStats
    poles: PoleList
    zeros: List[complex]
    effective_degree: int
    iterations: int = 0
    converged: bool = True
    warnings: List[str] = field(default_factory=list)
    state_space: Optional[StateSpaceRational] = None
    optimality: Optional[Any] = None  # l2_irka.optimality.OptimalityReport
    bounds: Optional[BoundsReport] = None
    history: List[Any] = field(default_factory=list)

    def __call__(self, z):
        return self.approximant(z)


def summarize(
    f: Callable,
    r: BarycentricRational,
    norm: str,
    degree: int,
    M: int = DEFAULT_SAMPLES,
    max_samples: int = MAX_WINDING_SAMPLES,
    poles: Optional[PoleList] = None,
    **extra: Any,
) -> ApproxResult:
    """
    Measure r against f on the diagnostic grid and bundle the result.

    `poles` overrides the eigenvalue extraction when the solver knows
    better (poles forced to infinity by construction).
    """
    try:
        stats = error_stats(f, r, M, max_samples)
    except UndersampledError as exc:
        msg = f"winding number unavailable: {exc}"
        logger.warning(msg)
        extra["warnings"] = list(extra.get("warnings") or []) + [msg]
        stats = error_stats(f, r, M, max_samples, with_winding=False)
    if poles is None:
        try:
            poles = r.poles()
        except DegenerateError as exc:
            logger.warning("pole extraction failed: %s", exc)
            poles = PoleList((), 0)
    try:
        zeros = r.zeros()
    except DegenerateError:
        zeros = []
    nu = effective_degree(r)
    result = ApproxResult(
        norm=norm,
        degree=degree,
        approximant=r,
        stats=stats,
        poles=poles,
        zeros=zeros,
        effective_degree=nu,
        **extra,
    )
    if norm == "linf" and result.bounds is None:
        result.bounds = near_circular_bounds(error_curve(f, r, M), degree, nu)
    return result
