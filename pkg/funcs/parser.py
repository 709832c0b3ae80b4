"""
Expression language for functions of one complex variable z.

Grammar (highest precedence first):

    primary  := number | number 'i' | 'z' | 'pi' | 'e' | 'i'
              | name '(' expr ')' | '(' expr ')'
    power    := primary [ '^' exponent ]        (right-assoc, exponent z-free)
    unary    := ('-' | '+') unary | power
    term     := unary { ('*' | '/') unary }
    expr     := term { ('+' | '-') term }

Usage:
    expr = parse("exp(4*z)")
    unparse(expr)   -> "exp(4.0 * z)"
"""
from __future__ import annotations

from dataclasses import dataclass
import re
from typing import FrozenSet, List, Optional, Union

from shared.errors import ParseError

FUNCTIONS = frozenset({"exp", "log", "sqrt", "sin", "cos", "tan"})
CONSTANTS = {"pi": 3.141592653589793, "e": 2.718281828459045, "i": 1j}
VARIABLE = "z"


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Number:
    value: complex


@dataclass(frozen=True)
class Variable:
    name: str = VARIABLE


@dataclass(frozen=True)
class Constant:
    name: str

    @property
    def value(self) -> complex:
        return complex(CONSTANTS[self.name])


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expression"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expression"


Expression = Union[Number, Variable, Constant, Unary, Binary, Call]


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # number, imag, ident, op, lparen, rparen, eof
    text: str
    line: int
    column: int


_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_SINGLE = {"+": "op", "-": "op", "*": "op", "/": "op", "^": "op", "(": "lparen", ")": "rparen"}


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        ch = source[pos]
        column = pos - line_start + 1
        if ch == "\n":
            pos += 1
            line += 1
            line_start = pos
            continue
        if ch.isspace():
            pos += 1
            continue
        number = _NUMBER.match(source, pos)
        if number:
            end = number.end()
            imaginary = (
                end < len(source)
                and source[end] == "i"
                and not (end + 1 < len(source) and (source[end + 1].isalnum() or source[end + 1] == "_"))
            )
            if imaginary:
                tokens.append(Token("imag", number.group(0), line, column))
                pos = end + 1
            else:
                tokens.append(Token("number", number.group(0), line, column))
                pos = end
            continue
        ident = _IDENT.match(source, pos)
        if ident:
            tokens.append(Token("ident", ident.group(0), line, column))
            pos = ident.end()
            continue
        if ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch, line, column))
            pos += 1
            continue
        raise ParseError(f"unexpected character '{ch}'", line, column)
    tokens.append(Token("eof", "", line, len(source) - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_OPERAND_START = frozenset({"number", "identifier", "(", "-", "+"})


class _Parser:
    def __init__(self, source: str) -> None:
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def _fail(self, message: str, expected: Optional[FrozenSet[str]] = None) -> ParseError:
        token = self.current
        if token.kind == "eof":
            message = f"{message}: unexpected end of input"
        else:
            message = f"{message}: unexpected '{token.text}'"
        return ParseError(message, token.line, token.column, expected)

    def parse(self) -> Expression:
        expr = self._expr()
        if self.current.kind != "eof":
            raise self._fail("syntax error", frozenset({"+", "-", "*", "/", "^", "end of input"}))
        return expr

    def _expr(self) -> Expression:
        node = self._term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self._advance().text
            node = Binary(op, node, self._term())
        return node

    def _term(self) -> Expression:
        node = self._unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self._advance().text
            node = Binary(op, node, self._unary())
        return node

    def _unary(self) -> Expression:
        if self.current.kind == "op" and self.current.text in "+-":
            op = self._advance().text
            operand = self._unary()
            return operand if op == "+" else Unary("-", operand)
        return self._power()

    def _power(self) -> Expression:
        base = self._primary()
        if self.current.kind == "op" and self.current.text == "^":
            self._advance()
            start = self.current
            exponent = self._exponent()
            if contains_variable(exponent):
                raise ParseError("exponent must be a constant", start.line, start.column)
            return Binary("^", base, exponent)
        return base

    def _exponent(self) -> Expression:
        if self.current.kind == "op" and self.current.text in "+-":
            op = self._advance().text
            operand = self._exponent()
            return operand if op == "+" else Unary("-", operand)
        return self._power()

    def _primary(self) -> Expression:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Number(complex(float(token.text)))
        if token.kind == "imag":
            self._advance()
            return Number(complex(0.0, float(token.text)))
        if token.kind == "lparen":
            self._advance()
            inner = self._expr()
            self._expect_rparen()
            return inner
        if token.kind == "ident":
            name = token.text
            if name in FUNCTIONS:
                self._advance()
                if self.current.kind != "lparen":
                    raise self._fail(f"'{name}' must be called", frozenset({"("}))
                self._advance()
                arg = self._expr()
                self._expect_rparen()
                return Call(name, arg)
            if name == VARIABLE:
                self._advance()
                return Variable()
            if name in CONSTANTS:
                self._advance()
                return Constant(name)
            raise ParseError(
                f"unknown identifier '{name}'",
                token.line,
                token.column,
                sorted(FUNCTIONS | set(CONSTANTS) | {VARIABLE}),
            )
        raise self._fail("syntax error", _OPERAND_START)

    def _expect_rparen(self) -> None:
        if self.current.kind != "rparen":
            raise self._fail("syntax error", frozenset({")"}))
        self._advance()


def parse(source: str) -> Expression:
    """Parse source text into an Expression; raises ParseError with position."""
    return _Parser(source).parse()


def contains_variable(expr: Expression) -> bool:
    if isinstance(expr, Variable):
        return True
    if isinstance(expr, Unary):
        return contains_variable(expr.operand)
    if isinstance(expr, Binary):
        return contains_variable(expr.left) or contains_variable(expr.right)
    if isinstance(expr, Call):
        return contains_variable(expr.arg)
    return False


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "unary": 3, "^": 4}
_ATOM = 5


def _precedence(expr: Expression) -> int:
    if isinstance(expr, Binary):
        return _PRECEDENCE[expr.op]
    if isinstance(expr, Unary):
        return _PRECEDENCE["unary"]
    return _ATOM


def _format_number(value: complex) -> str:
    if value.imag == 0:
        return repr(value.real)
    if value.real == 0:
        return f"{value.imag!r}i"
    return f"({value.real!r} + {value.imag!r}i)"


def unparse(expr: Expression) -> str:
    """Print an Expression back to source text that parses to the same tree."""
    if isinstance(expr, Number):
        return _format_number(expr.value)
    if isinstance(expr, Variable):
        return expr.name
    if isinstance(expr, Constant):
        return expr.name
    if isinstance(expr, Call):
        return f"{expr.func}({unparse(expr.arg)})"
    if isinstance(expr, Unary):
        inner = unparse(expr.operand)
        if _precedence(expr.operand) < _PRECEDENCE["unary"]:
            inner = f"({inner})"
        return f"-{inner}"
    prec = _PRECEDENCE[expr.op]
    left, right = unparse(expr.left), unparse(expr.right)
    if expr.op == "^":
        if _precedence(expr.left) <= prec:
            left = f"({left})"
        if _precedence(expr.right) < prec:
            right = f"({right})"
        return f"{left}^{right}"
    if _precedence(expr.left) < prec:
        left = f"({left})"
    if _precedence(expr.right) <= prec:
        right = f"({right})"
    return f"{left} {expr.op} {right}"
