"""Tests for the expression parser/evaluator."""

import numpy as np
import pytest

from randersiso.exprparse import (
    ExprEvalError,
    ExprSyntaxError,
    evaluate,
    parse,
    to_source,
)


def ev(source, **bindings):
    return evaluate(parse(source, variables=tuple(bindings)), bindings)


class TestParseEval:
    def test_polynomial_and_trig(self):
        assert ev("sin(x1)+x2^2", x1=0.0, x2=2.0) == pytest.approx(4.0)

    def test_atan2_plus_pi(self):
        assert ev("atan2(x2,x1)+pi/2", x1=0.0, x2=1.0) == pytest.approx(np.pi)

    def test_product(self):
        assert ev("x1*x2", x1=3.0, x2=4.0) == pytest.approx(12.0)

    def test_power_right_associative(self):
        assert ev("2^3^2") == pytest.approx(512.0)

    def test_unary_minus_binds_before_power(self):
        # factor := unary ('^' factor)?, so -2^2 is (-2)^2
        assert ev("-2^2") == pytest.approx(4.0)

    def test_precedence(self):
        assert ev("1+2*3") == pytest.approx(7.0)
        assert ev("(1+2)*3") == pytest.approx(9.0)
        assert ev("8/2/2") == pytest.approx(2.0)

    def test_pi_constant(self):
        assert ev("cos(pi)") == pytest.approx(-1.0)

    def test_scientific_literal(self):
        assert ev("1e-3+2.5E2") == pytest.approx(250.001)

    def test_numpy_arrays_flow_through(self):
        x = np.linspace(0.0, 1.0, 7)
        node = parse("sqrt(x1)+1", variables=("x1",))
        np.testing.assert_allclose(evaluate(node, {"x1": x}), np.sqrt(x) + 1)


class TestErrors:
    def test_syntax_error_offset(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("1+*2")
        assert err.value.offset == 2

    def test_unknown_identifier(self):
        with pytest.raises(ExprSyntaxError, match="unknown identifier"):
            parse("x1+y", variables=("x1",))

    def test_unknown_function(self):
        with pytest.raises(ExprSyntaxError, match="unknown function"):
            parse("sinh(x1)", variables=("x1",))

    def test_wrong_arity(self):
        with pytest.raises(ExprSyntaxError, match="argument"):
            parse("atan2(x1)", variables=("x1",))

    def test_trailing_garbage(self):
        with pytest.raises(ExprSyntaxError):
            parse("1+2)3")

    def test_division_by_zero(self):
        with pytest.raises(ExprEvalError, match="division"):
            ev("1/x1", x1=0.0)

    def test_sqrt_negative(self):
        with pytest.raises(ExprEvalError, match="sqrt"):
            ev("sqrt(x1)", x1=-1.0)

    def test_log_nonpositive(self):
        with pytest.raises(ExprEvalError, match="log"):
            ev("log(x1)", x1=0.0)

    def test_atan2_origin(self):
        with pytest.raises(ExprEvalError, match="atan2"):
            ev("atan2(x1,x2)", x1=0.0, x2=0.0)

    def test_fractional_power_of_negative(self):
        with pytest.raises(ExprEvalError, match="power"):
            ev("x1^0.5", x1=-2.0)


class TestCanonicalForm:
    @pytest.mark.parametrize("source", [
        "sin(x1)+x2^2",
        "atan2(x2,x1)+pi/2",
        "-x1*(x2-3)/7",
        "2^3^2",
        "1+x1*x2^2-sqrt(abs(x2))",
    ])
    def test_parse_print_parse_idempotent(self, source):
        tree = parse(source)
        reparsed = parse(to_source(tree))
        assert reparsed == tree
        assert to_source(reparsed) == to_source(tree)
