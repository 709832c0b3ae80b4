"""
Forward-mode automatic differentiation over complex values.

A DualValue carries (f(z), f'(z)); value and derivative may be scalars or
numpy arrays of matching shape, so one pass evaluates a whole grid.
Branch cuts follow the principal branch; landing on a cut or on a pole of
a primitive raises DomainError.
"""
from __future__ import annotations

from typing import Any, Union

import numpy as np

from funcs.parser import Binary, Call, Constant, Expression, Number, Unary, Variable, unparse
from shared.errors import DomainError

Scalar = Union[complex, np.ndarray]


class DualValue:
    __slots__ = ("value", "derivative")

    def __init__(self, value: Scalar, derivative: Scalar = 0.0) -> None:
        self.value = np.asarray(value, dtype=complex)
        self.derivative = np.asarray(derivative, dtype=complex) + np.zeros_like(self.value)

    def __repr__(self) -> str:
        return f"DualValue(value={self.value!r}, derivative={self.derivative!r})"

    @staticmethod
    def lift(other: Any) -> "DualValue":
        return other if isinstance(other, DualValue) else DualValue(other, 0.0)

    def __add__(self, other: Any) -> "DualValue":
        o = DualValue.lift(other)
        return DualValue(self.value + o.value, self.derivative + o.derivative)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "DualValue":
        o = DualValue.lift(other)
        return DualValue(self.value - o.value, self.derivative - o.derivative)

    def __rsub__(self, other: Any) -> "DualValue":
        return DualValue.lift(other) - self

    def __mul__(self, other: Any) -> "DualValue":
        o = DualValue.lift(other)
        return DualValue(self.value * o.value, self.value * o.derivative + self.derivative * o.value)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "DualValue":
        o = DualValue.lift(other)
        if np.any(o.value == 0):
            raise DomainError("division by zero")
        q = self.value / o.value
        return DualValue(q, (self.derivative - q * o.derivative) / o.value)

    def __rtruediv__(self, other: Any) -> "DualValue":
        return DualValue.lift(other) / self

    def __neg__(self) -> "DualValue":
        return DualValue(-self.value, -self.derivative)

    def __pow__(self, exponent: complex) -> "DualValue":
        return power(self, exponent)


def _on_branch_cut(v: np.ndarray) -> bool:
    return bool(np.any((v.imag == 0) & (v.real < 0)))


def exp(d: DualValue) -> DualValue:
    ev = np.exp(d.value)
    return DualValue(ev, ev * d.derivative)


def log(d: DualValue) -> DualValue:
    if np.any(d.value == 0):
        raise DomainError("log of zero")
    if _on_branch_cut(d.value):
        raise DomainError("log evaluated on its branch cut")
    return DualValue(np.log(d.value), d.derivative / d.value)


def sqrt(d: DualValue) -> DualValue:
    if np.any(d.value == 0):
        raise DomainError("sqrt is not differentiable at zero")
    if _on_branch_cut(d.value):
        raise DomainError("sqrt evaluated on its branch cut")
    s = np.sqrt(d.value)
    return DualValue(s, d.derivative / (2.0 * s))


def sin(d: DualValue) -> DualValue:
    return DualValue(np.sin(d.value), np.cos(d.value) * d.derivative)


def cos(d: DualValue) -> DualValue:
    return DualValue(np.cos(d.value), -np.sin(d.value) * d.derivative)


def tan(d: DualValue) -> DualValue:
    if np.any(np.abs(np.cos(d.value)) < 1e-300):
        raise DomainError("tan evaluated at a pole")
    t = np.tan(d.value)
    return DualValue(t, (1.0 + t * t) * d.derivative)


def power(d: DualValue, exponent: complex) -> DualValue:
    """d ** p for a constant exponent p (integer powers stay single-valued)."""
    p = complex(exponent)
    if p.imag == 0 and float(p.real).is_integer():
        k = int(p.real)
        if k == 0:
            return DualValue(np.ones_like(d.value), np.zeros_like(d.value))
        if k < 0 and np.any(d.value == 0):
            raise DomainError("negative power of zero")
        return DualValue(d.value ** k, k * d.value ** (k - 1) * d.derivative)
    if np.any(d.value == 0):
        raise DomainError("non-integer power of zero")
    if _on_branch_cut(d.value):
        raise DomainError("non-integer power evaluated on its branch cut")
    pv = d.value ** p
    return DualValue(pv, p * pv / d.value * d.derivative)


PRIMITIVES = {"exp": exp, "log": log, "sqrt": sqrt, "sin": sin, "cos": cos, "tan": tan}


def eval_dual(expr: Expression, z: Scalar) -> DualValue:
    """(f(z), f'(z)) by forward propagation with seed derivative 1 at z."""
    seed = DualValue(z, 1.0)
    return _eval(expr, seed)


def _eval(expr: Expression, seed: DualValue) -> DualValue:
    if isinstance(expr, Number):
        return DualValue(np.full_like(seed.value, expr.value), 0.0)
    if isinstance(expr, Constant):
        return DualValue(np.full_like(seed.value, expr.value), 0.0)
    if isinstance(expr, Variable):
        return seed
    try:
        if isinstance(expr, Unary):
            return -_eval(expr.operand, seed)
        if isinstance(expr, Call):
            return PRIMITIVES[expr.func](_eval(expr.arg, seed))
        if isinstance(expr, Binary):
            left = _eval(expr.left, seed)
            if expr.op == "^":
                exponent = _eval(expr.right, DualValue(0.0, 0.0))
                return power(left, complex(exponent.value))
            right = _eval(expr.right, seed)
            if expr.op == "+":
                return left + right
            if expr.op == "-":
                return left - right
            if expr.op == "*":
                return left * right
            return left / right
    except DomainError as exc:
        if exc.subexpression:
            raise
        raise DomainError(str(exc), unparse(expr)) from exc
    raise TypeError(f"unknown expression node {expr!r}")
