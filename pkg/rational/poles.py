"""
Pole lists with an explicit count of poles at infinity.

Multiplicity is represented by repetition; a degree-n approximant always
carries len(finite) + count_at_infinity == n.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

# |pi| above this counts as a pole at infinity
INFINITY_THRESHOLD = 1e8


@dataclass(frozen=True)
class PoleList:
    finite: Tuple[complex, ...] = field(default_factory=tuple)
    count_at_infinity: int = 0

    def __post_init__(self) -> None:
        finite = tuple(complex(p) for p in self.finite)
        object.__setattr__(self, "finite", finite)
        if self.count_at_infinity < 0:
            raise ValueError("count_at_infinity must be nonnegative")
        for p in finite:
            if not np.isfinite(p) or abs(p) > INFINITY_THRESHOLD:
                raise ValueError(f"finite pole {p} exceeds the infinity threshold")

    @property
    def degree(self) -> int:
        return len(self.finite) + self.count_at_infinity

    def as_array(self) -> np.ndarray:
        return np.array(self.finite, dtype=complex)

    def moduli(self) -> List[float]:
        """Sorted moduli, infinite poles reported as inf."""
        mods = sorted(abs(p) for p in self.finite)
        return mods + [float("inf")] * self.count_at_infinity

    def inside_closed_disk(self) -> List[complex]:
        return [p for p in self.finite if abs(p) <= 1.0]

    @classmethod
    def from_values(
        cls, values: Sequence[complex], threshold: float = INFINITY_THRESHOLD
    ) -> "PoleList":
        """Split raw eigenvalues into finite poles and a count at infinity."""
        vals = np.asarray(values, dtype=complex)
        keep = np.isfinite(vals) & (np.abs(vals) <= threshold)
        finite = sorted(vals[keep].tolist(), key=lambda p: (abs(p), np.angle(p)))
        return cls(tuple(finite), int(np.count_nonzero(~keep)))


def finite_eigenvalues(evals: np.ndarray, spurious: int) -> np.ndarray:
    """
    Drop the `spurious` largest-modulus eigenvalues (non-finite ones first).

    The arrowhead pencil of a barycentric quotient always carries two
    eigenvalues at infinity that are not poles or zeros.
    """
    evals = np.asarray(evals, dtype=complex)
    mods = np.where(np.isfinite(evals), np.abs(evals), np.inf)
    order = np.argsort(mods, kind="stable")
    keep = order[: max(len(evals) - spurious, 0)]
    return evals[np.sort(keep)]


def pair_poles(a: PoleList, b: PoleList) -> List[Tuple[complex, complex]]:
    """
    Greedy nearest-neighbour pairing of two pole lists.

    Poles are visited by increasing modulus; infinite entries are
    represented by complex('inf') and pair with each other first.
    """
    left = sorted(a.finite, key=abs) + [complex("inf")] * a.count_at_infinity
    right = sorted(b.finite, key=abs) + [complex("inf")] * b.count_at_infinity
    pairs: List[Tuple[complex, complex]] = []
    available = list(range(len(right)))
    for p in left:
        if not available:
            break
        best = min(available, key=lambda j: _pair_distance(p, right[j]))
        pairs.append((p, right[best]))
        available.remove(best)
    return pairs


def _pair_distance(p: complex, q: complex) -> float:
    p_inf, q_inf = not np.isfinite(p), not np.isfinite(q)
    if p_inf and q_inf:
        return 0.0
    if p_inf or q_inf:
        finite = q if p_inf else p
        # distance on the reflected side: 1/|pi| of the finite partner
        return 1.0 / max(abs(finite), 1e-300)
    return abs(p - q) / (1.0 + abs(q))


def pole_displacement(a: PoleList, b: PoleList) -> float:
    """max over matched pairs of |dpi| / (1 + |pi|); 0 for two empty lists."""
    if a.degree != b.degree:
        return float("inf")
    pairs = pair_poles(a, b)
    if not pairs:
        return 0.0
    return max(_pair_distance(p, q) for p, q in pairs)
