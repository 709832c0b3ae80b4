from __future__ import annotations

from abc import ABC, abstractmethod
import logging
import time
from typing import Any, Dict, List, Optional

from shared.errors import DomainError, InputError

logger = logging.getLogger(__name__)


class BaseSolver(ABC):
    """Base contract for the best-approximation solvers (L2 and Linf)."""

    def __init__(self, solver_name: str, profile_name: str) -> None:
        self.solver_name = solver_name
        self.profile_name = profile_name

    def execute(self, f: Any, degree: int) -> Dict[str, Any]:
        """
        Run solve() and wrap the outcome in a run envelope that never raises.

        status is "success" for a converged result, "partial" when a result
        exists but did not converge, "error" when solve() raised; meta.error_kind
        then says whether the input ("input") or the numerics ("numerical") failed.
        """
        start = time.perf_counter()
        status = "success"
        data = None
        errors: List[str] = []
        warnings: List[str] = []
        error_kind: Optional[str] = None

        try:
            data = self.solve(f, degree)
            warnings = list(getattr(data, "warnings", []))
            if not self.is_converged(data):
                status = "partial"
                errors.append(f"{self.solver_name}: not converged")
        except Exception as exc:
            status = "error"
            error_kind = "input" if isinstance(exc, (InputError, DomainError)) else "numerical"
            errors.append(f"{type(exc).__name__}: {exc}")
            logger.warning("%s failed on degree %d: %s", self.solver_name, degree, exc)

        duration_ms = int((time.perf_counter() - start) * 1000)
        return {
            "solver": self.solver_name,
            "profile": self.profile_name,
            "status": status,
            "data": data,
            "meta": {
                "duration_ms": duration_ms,
                "errors": errors,
                "warnings": warnings,
                "error_kind": error_kind,
            },
        }

    @abstractmethod
    def solve(self, f: Any, degree: int) -> Any:
        """Compute the best approximation of f of the given degree."""

    @staticmethod
    def is_converged(data: Any) -> bool:
        return bool(getattr(data, "converged", True))
