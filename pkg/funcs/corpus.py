"""
Test-function corpus and the AnalyticFunction wrapper used by the solvers.

Built-ins:
    exp4    exp(4z)        entire
    sqrt11  sqrt(1.1 - z)  branch point at 1.1
    tanz3   tan(z^3)       poles at |z| = (pi/2)^(1/3)
    zsq     z^2            entire
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Dict, Optional, Union

import numpy as np

from funcs.dual import DualValue, eval_dual
from funcs.parser import Expression, parse
from shared.errors import InputError

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]


class AnalyticFunction:
    """
    A function analytic on the closed unit disk together with its derivative.

    Calls are vectorized: scalars in, complex out; arrays in, arrays out.
    `radius` is the radius of the largest disk of analyticity when known.
    """

    def __init__(
        self,
        name: str,
        source: str,
        value_fn: ArrayFn,
        derivative_fn: ArrayFn,
        radius: Optional[float] = None,
    ) -> None:
        self.name = name
        self.source = source
        self._value_fn = value_fn
        self._derivative_fn = derivative_fn
        self.radius = radius

    def __repr__(self) -> str:
        return f"AnalyticFunction(name={self.name!r}, source={self.source!r})"

    def __call__(self, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        return _apply(self._value_fn, z)

    def derivative(self, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        return _apply(self._derivative_fn, z)

    def dual(self, z: Union[complex, np.ndarray]) -> DualValue:
        return DualValue(self(z), self.derivative(z))

    @classmethod
    def from_expression(cls, source: str, name: Optional[str] = None) -> "AnalyticFunction":
        expr: Expression = parse(source)
        return cls(
            name=name or source,
            source=source,
            value_fn=lambda z: eval_dual(expr, z).value,
            derivative_fn=lambda z: eval_dual(expr, z).derivative,
            radius=None,
        )


def _apply(fn: ArrayFn, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
    z_arr = np.asarray(z, dtype=complex)
    out = np.asarray(fn(z_arr), dtype=complex)
    if z_arr.ndim == 0:
        return complex(out)
    return np.broadcast_to(out, z_arr.shape).copy()


def _tan_z3_derivative(z: np.ndarray) -> np.ndarray:
    t = np.tan(z ** 3)
    return 3.0 * z ** 2 * (1.0 + t * t)


_BUILTINS: Dict[str, Dict[str, object]] = {
    "exp4": {
        "source": "exp(4*z)",
        "value": lambda z: np.exp(4.0 * z),
        "derivative": lambda z: 4.0 * np.exp(4.0 * z),
        "radius": math.inf,
    },
    "sqrt11": {
        "source": "sqrt(1.1 - z)",
        "value": lambda z: np.sqrt(1.1 - z),
        "derivative": lambda z: -0.5 / np.sqrt(1.1 - z),
        "radius": 1.1,
    },
    "tanz3": {
        "source": "tan(z^3)",
        "value": lambda z: np.tan(z ** 3),
        "derivative": _tan_z3_derivative,
        "radius": (math.pi / 2.0) ** (1.0 / 3.0),
    },
    "zsq": {
        "source": "z^2",
        "value": lambda z: z ** 2,
        "derivative": lambda z: 2.0 * z,
        "radius": math.inf,
    },
}


def corpus() -> Dict[str, AnalyticFunction]:
    """Named built-in functions with exact derivatives and analyticity radii."""
    return {
        name: AnalyticFunction(
            name=name,
            source=str(spec["source"]),
            value_fn=spec["value"],  # type: ignore[arg-type]
            derivative_fn=spec["derivative"],  # type: ignore[arg-type]
            radius=float(spec["radius"]),  # type: ignore[arg-type]
        )
        for name, spec in _BUILTINS.items()
    }


def resolve(name_or_source: str) -> AnalyticFunction:
    """Corpus lookup by name, else parse as an expression in z."""
    text = name_or_source.strip()
    if not text:
        raise InputError("empty function specification")
    table = corpus()
    if text in table:
        return table[text]
    logger.debug("parsing function source %r", text)
    return AnalyticFunction.from_expression(text)
