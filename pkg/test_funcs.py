from __future__ import annotations

import numpy as np
import pytest

from funcs.corpus import AnalyticFunction, corpus, resolve
from funcs.dual import DualValue, eval_dual
from funcs.parser import Binary, Call, Number, Variable, parse, tokenize, unparse
from shared.errors import DomainError, InputError, ParseError


class TestParser:
    def test_precedence_and_right_associative_power(self):
        expr = parse("2*z^3^2")
        assert expr == Binary("*", Number(2 + 0j), Binary("^", Variable(), Binary("^", Number(3 + 0j), Number(2 + 0j))))

    def test_imaginary_literal(self):
        assert parse("2.5i") == Number(2.5j)
        assert [t.kind for t in tokenize("3i*z")] == ["imag", "op", "ident", "eof"]

    def test_function_call(self):
        assert parse("exp(4*z)") == Call("exp", Binary("*", Number(4 + 0j), Variable()))

    @pytest.mark.parametrize(
        "source",
        ["exp(4*z)", "sqrt(1.1 - z)", "tan(z^3)", "-z^2 + 3*z/(1 - z)", "z^2^3", "2.5i*z - pi", "-(z + 1)*e", "z - (1 - z)"],
    )
    def test_print_parse_is_idempotent(self, source):
        tree = parse(source)
        assert parse(unparse(tree)) == tree

    def test_unterminated_call_reports_position(self):
        with pytest.raises(ParseError) as info:
            parse("exp(4*")
        assert info.value.line == 1
        assert info.value.column == 7
        assert "end of input" in str(info.value)

    def test_unknown_identifier_lists_alternatives(self):
        with pytest.raises(ParseError) as info:
            parse("foo(z)")
        assert info.value.column == 1
        assert "exp" in info.value.expected

    def test_variable_exponent_rejected(self):
        with pytest.raises(ParseError, match="exponent must be a constant"):
            parse("z^z")

    def test_bad_character(self):
        with pytest.raises(ParseError) as info:
            parse("z $ 2")
        assert info.value.column == 3

    def test_multiline_position(self):
        with pytest.raises(ParseError) as info:
            parse("z +\n  * 2")
        assert (info.value.line, info.value.column) == (2, 3)


class TestDual:
    def test_arithmetic_rules(self):
        z = DualValue(2.0, 1.0)
        q = (z * z + 1) / z
        assert complex(q.value) == pytest.approx(2.5)
        # d/dz (z + 1/z) = 1 - 1/z^2
        assert complex(q.derivative) == pytest.approx(0.75)

    def test_vectorized_evaluation(self, circle):
        d = eval_dual(parse("exp(4*z)"), circle)
        np.testing.assert_allclose(d.value, np.exp(4 * circle), rtol=1e-14)
        np.testing.assert_allclose(d.derivative, 4 * np.exp(4 * circle), rtol=1e-14)

    @pytest.mark.parametrize("name", ["exp4", "sqrt11", "tanz3", "zsq"])
    def test_parsed_source_matches_builtin(self, functions, circle, name):
        builtin = functions[name]
        parsed = AnalyticFunction.from_expression(builtin.source)
        z = 0.9 * circle
        np.testing.assert_allclose(parsed(z), builtin(z), rtol=1e-13)
        np.testing.assert_allclose(parsed.derivative(z), builtin.derivative(z), rtol=1e-12)

    def test_derivative_agrees_with_finite_differences(self):
        f = AnalyticFunction.from_expression("sin(z)*log(2 + z)/(3 - z^2)")
        z0 = 0.3 - 0.2j
        errors = []
        for h in (1e-2, 1e-3):
            fd = (f(z0 + h) - f(z0 - h)) / (2 * h)
            errors.append(abs(fd - f.derivative(z0)))
        assert errors[1] < errors[0] / 50

    def test_branch_cut_names_subexpression(self):
        f = AnalyticFunction.from_expression("1 + log(z)")
        with pytest.raises(DomainError) as info:
            f(-1.0)
        assert info.value.subexpression == "log(z)"

    def test_division_by_zero(self):
        f = AnalyticFunction.from_expression("1/(z - 0.5)")
        with pytest.raises(DomainError):
            f(0.5)

    def test_integer_power_of_negative_base(self):
        f = AnalyticFunction.from_expression("z^3")
        assert f(-2.0) == pytest.approx(-8.0)
        assert f.derivative(-2.0) == pytest.approx(12.0)


class TestCorpus:
    def test_names(self):
        assert sorted(corpus()) == ["exp4", "sqrt11", "tanz3", "zsq"]

    def test_radius_of_analyticity(self, functions):
        assert functions["sqrt11"].radius == pytest.approx(1.1)
        assert functions["tanz3"].radius == pytest.approx((np.pi / 2) ** (1 / 3))
        assert functions["exp4"].radius == float("inf")

    def test_scalar_and_array_calls(self, functions):
        f = functions["zsq"]
        assert f(2j) == pytest.approx(-4.0)
        assert f(np.array([1.0, 2.0])).shape == (2,)

    def test_resolve(self, functions):
        assert resolve(" exp4 ").name == "exp4"
        g = resolve("z^2 + 1")
        assert g(1j) == pytest.approx(0.0)
        with pytest.raises(InputError):
            resolve("   ")
        with pytest.raises(ParseError):
            resolve("exp(4*")
