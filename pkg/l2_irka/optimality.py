"""
First-order L2 optimality check: r interpolates f at the origin and
doubly at the reflections 1/conj(pi) of its finite poles; each pole at
infinity adds two Taylor conditions at the origin.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from l2_irka.loewner import taylor_coefficients
from rational.barycentric import BarycentricRational
from rational.poles import PoleList
from shared.errors import DegenerateError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class OptimalityReport:
    residuals: List[Tuple[str, float]]
    tol: float
    precondition_ok: bool
    messages: List[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max((v for _, v in self.residuals), default=0.0)

    @property
    def passed(self) -> bool:
        return self.precondition_ok and all(v <= self.tol for _, v in self.residuals)

    def failures(self) -> List[str]:
        return [name for name, v in self.residuals if not v <= self.tol]

    def to_dict(self) -> dict:
        return {
            "residuals": [{"condition": name, "value": value} for name, value in self.residuals],
            "tol": self.tol,
            "precondition_ok": self.precondition_ok,
            "passed": self.passed,
            "messages": list(self.messages),
        }


def _relative(a: complex, b: complex) -> float:
    return float(abs(a - b) / max(1.0, abs(b)))


def verify_optimality(
    f: Callable,
    r: BarycentricRational,
    tol: float = DEFAULT_TOL,
    poles: Optional[PoleList] = None,
) -> OptimalityReport:
    """
    Residuals of the 2n+1 interpolation conditions, each relative to
    max(1, |f|) (or max(1, |f'|)) at its point.

    A pole inside the closed unit disk is reported as a failed
    precondition rather than raised.
    """
    messages: List[str] = []
    if poles is None:
        try:
            poles = r.poles()
        except DegenerateError as exc:
            return OptimalityReport([], tol, False, [f"pole extraction failed: {exc}"])

    inside = poles.inside_closed_disk()
    if inside:
        messages.extend(f"pole {p:.6g} lies in the closed unit disk" for p in inside)
        return OptimalityReport([], tol, False, messages)

    derivative = getattr(f, "derivative", None)
    residuals: List[Tuple[str, float]] = [("r(0) = f(0)", _relative(complex(r(0j)), complex(f(0j))))]
    for idx, p in enumerate(poles.finite):
        zeta = complex(1.0 / np.conj(p))
        residuals.append((f"r(node {idx})", _relative(complex(r(zeta)), complex(f(zeta)))))
        if derivative is not None:
            residuals.append(
                (f"r'(node {idx})", _relative(complex(r.deriv(zeta)), complex(derivative(zeta))))
            )

    k = poles.count_at_infinity
    if k:
        if derivative is not None:
            residuals.append(("r'(0) = f'(0)", _relative(complex(r.deriv(0j)), complex(derivative(0j)))))
        cr = taylor_coefficients(r, 2 * k + 1)
        cf = taylor_coefficients(f, 2 * k + 1)
        for order in range(2, 2 * k + 1):
            residuals.append((f"taylor order {order} at 0", _relative(cr[order], cf[order])))

    if derivative is None:
        messages.append("f has no derivative; derivative conditions skipped")
    report = OptimalityReport(residuals, tol, True, messages)
    if not report.passed:
        logger.info("optimality check failed: %s", ", ".join(report.failures()))
    return report
