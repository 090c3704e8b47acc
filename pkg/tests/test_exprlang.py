"""
Unit tests for the expression language.

These tests verify that:
1. Parsing respects precedence and associativity
2. Malformed input reports the byte offset of the problem
3. Printing reparses to the same tree
4. Symbolic derivatives agree with jet evaluation
5. Jets compose when variables are bound to arbitrary jets
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metallic.domain import DomainError, ExpressionSyntaxError, UnknownVariable
from metallic.exprlang import (
    BinOp,
    Call,
    Const,
    Neg,
    Var,
    add,
    differentiate,
    eval_jet2,
    evaluate,
    mul,
    neg,
    parse,
    shift_variables,
    substitute,
    to_text,
    variable_indices,
)
from metallic.jets import seed_jets

COORDS = ["x", "y", "z"]
OPERATORS = ["+", "-", "*", "/", "^"]


class TestParsing:
    """Test the recursive descent parser."""

    def test_precedence(self):
        """Test that * binds tighter than + and ^ tighter than unary minus."""
        tree = parse("1 + 2*x^2", COORDS)
        assert tree == BinOp(
            "+", Const(1.0), BinOp("*", Const(2.0), BinOp("^", Var("x", 0), Const(2.0)))
        )
        assert parse("-x^2", COORDS) == Neg(BinOp("^", Var("x", 0), Const(2.0)))

    def test_power_is_right_associative(self):
        """Test that x^y^z parses as x^(y^z) and ** is accepted."""
        tree = parse("x**y^z", COORDS)
        assert tree == BinOp(
            "^", Var("x", 0), BinOp("^", Var("y", 1), Var("z", 2))
        )

    def test_left_associative_subtraction(self):
        """Test that x - y - z parses as (x - y) - z."""
        tree = parse("x - y - z", COORDS)
        assert tree == BinOp("-", BinOp("-", Var("x", 0), Var("y", 1)), Var("z", 2))

    def test_functions_and_numbers(self):
        """Test calls, decimals and exponents in numbers."""
        tree = parse("sqrt(2.5e-1) * cos(.5)", COORDS)
        assert tree == BinOp(
            "*", Call("sqrt", Const(0.25)), Call("cos", Const(0.5))
        )

    def test_evaluation_of_golden_ratio(self):
        """Test that the golden ratio expression evaluates to σ."""
        sigma = eval_jet2(parse("(1+sqrt(5))/2", COORDS), [0.0, 0.0, 0.0])
        assert sigma.value == pytest.approx((1 + math.sqrt(5)) / 2)
        assert not sigma.gradient.any()

    @pytest.mark.parametrize(
        "text, offset",
        [
            ("x +", 3),
            ("x $ y", 2),
            ("(x + y", 6),
            ("x y", 2),
            ("sin x", 4),
            ("", 0),
        ],
    )
    def test_syntax_error_offsets(self, text, offset):
        """Test that syntax errors carry the byte offset."""
        with pytest.raises(ExpressionSyntaxError) as info:
            parse(text, COORDS)
        assert info.value.offset == offset
        assert f"offset {offset}" in str(info.value)

    def test_offsets_count_bytes(self):
        """Test that offsets after non-ASCII text are in bytes."""
        with pytest.raises(ExpressionSyntaxError) as info:
            parse("σ + 1", COORDS)
        assert info.value.offset == 0
        with pytest.raises(ExpressionSyntaxError) as info:
            parse("x + σ", COORDS)
        assert info.value.offset == 4

    def test_unknown_function(self):
        """Test that calls to unsupported functions are rejected."""
        with pytest.raises(ExpressionSyntaxError):
            parse("erf(x)", COORDS)

    def test_unknown_variable(self):
        """Test that names outside the chart are rejected."""
        with pytest.raises(UnknownVariable) as info:
            parse("x + w", COORDS)
        assert "'w'" in str(info.value)


class TestPrinting:
    """Test minimal-parenthesis printing."""

    @pytest.mark.parametrize(
        "text, printed",
        [
            ("(x + y) * z", "(x + y) * z"),
            ("x - (y - z)", "x - (y - z)"),
            ("(x ^ y) ^ z", "(x^y)^z"),
            ("-(x * y)", "-(x * y)"),
            ("x * -y", "x * -y"),
            ("2.5 * sin(x)", "2.5 * sin(x)"),
        ],
    )
    def test_printed_form(self, text, printed):
        """Test that printing keeps only the needed parentheses."""
        assert to_text(parse(text, COORDS)) == printed

    def test_str_uses_printer(self):
        """Test that str() of a node is its printed form."""
        assert str(parse("x+1", COORDS)) == "x + 1"


def expressions():
    """Random expression trees as the parser would build them."""
    leaves = st.one_of(
        st.sampled_from([Var(name, i) for i, name in enumerate(COORDS)]),
        st.integers(min_value=0, max_value=50).map(lambda v: Const(float(v))),
        st.floats(min_value=0.01, max_value=100.0).map(Const),
    )

    def extend(children):
        return st.one_of(
            st.builds(Neg, children),
            st.builds(Call, st.sampled_from(["sin", "cos", "exp"]), children),
            st.builds(BinOp, st.sampled_from(OPERATORS), children, children),
        )

    return st.recursive(leaves, extend, max_leaves=12)


class TestRoundTrip:
    """Property tests over random expression trees."""

    @settings(max_examples=200, deadline=None)
    @given(expressions())
    def test_print_then_parse_is_identity(self, tree):
        """Test that parse(to_text(e)) rebuilds e exactly."""
        assert parse(to_text(tree), COORDS) == tree


class TestCalculus:
    """Test symbolic differentiation and substitution."""

    @pytest.mark.parametrize(
        "text",
        [
            "x^3*y - sin(x*z)",
            "exp(x)/(1 + y^2)",
            "sqrt(1 + x^2 + y^2)",
            "log(2 + cos(x))*tanh(z)",
            "cosh(x)*sinh(y) + x^y",
            "(1 + x^2)^(-1)",
        ],
    )
    def test_derivative_matches_jets(self, text):
        """Test that differentiate agrees with the jet gradient and Hessian."""
        point = [0.7, 1.3, -0.4]
        tree = parse(text, COORDS)
        jet = eval_jet2(tree, point)
        for i in range(3):
            first = differentiate(tree, i)
            derived = eval_jet2(first, point)
            assert derived.value == pytest.approx(jet.gradient[i], rel=1e-12, abs=1e-12)
            np.testing.assert_allclose(
                derived.gradient, jet.hessian[i], rtol=1e-10, atol=1e-12
            )

    def test_constant_exponent_with_negative_base(self):
        """Test x^(-2) at negative x, where a log-based rule would fail."""
        tree = parse("x^-2", COORDS)
        derivative = differentiate(tree, 0)
        value = eval_jet2(derivative, [-2.0, 0.0, 0.0]).value
        assert value == pytest.approx(-2 * (-2.0) ** -3)

    def test_derivative_of_constant_folds(self):
        """Test that derivatives of unrelated terms fold away."""
        tree = parse("y*z + 3", COORDS)
        assert differentiate(tree, 0) == Const(0.0)

    def test_folding_constructors(self):
        """Test the algebraic shortcuts of the constructors."""
        x = Var("x", 0)
        assert add(Const(0.0), x) is x
        assert mul(Const(1.0), x) is x
        assert mul(Const(0.0), x) == Const(0.0)
        assert neg(neg(x)) is x
        assert add(Const(2.0), Const(3.0)) == Const(5.0)

    def test_substitute(self):
        """Test replacing variables by expressions."""
        tree = parse("x*y", COORDS)
        replaced = substitute(tree, [parse("z+1", COORDS), Const(2.0), Var("z", 2)])
        assert eval_jet2(replaced, [0.0, 0.0, 4.0]).value == pytest.approx(10.0)

    def test_shift_variables(self):
        """Test re-indexing into a chart with a leading coordinate."""
        tree = parse("a*b", ["a", "b"])
        shifted = shift_variables(tree, ["t", "a", "b"], 1)
        assert variable_indices(shifted) == {1, 2}
        assert eval_jet2(shifted, [9.0, 2.0, 3.0]).value == pytest.approx(6.0)


class TestEvaluation:
    """Test jet evaluation and composition."""

    def test_chain_rule_through_bound_jets(self):
        """Test that binding variables to jets composes derivatives."""
        tree = parse("x^2 + y", ["x", "y"])
        (s,) = seed_jets([0.5])
        env = (s.sin(), s * s)
        composed = evaluate(tree, env)
        expected_first = 2 * math.sin(0.5) * math.cos(0.5) + 2 * 0.5
        assert composed.value == pytest.approx(math.sin(0.5) ** 2 + 0.25)
        assert composed.gradient[0] == pytest.approx(expected_first)
        assert composed.hessian[0, 0] == pytest.approx(2 * math.cos(1.0) + 2)

    def test_domain_error_propagates(self):
        """Test that evaluating outside the domain raises DomainError."""
        with pytest.raises(DomainError):
            eval_jet2(parse("log(x)", COORDS), [-1.0, 0.0, 0.0])

    def test_point_too_short(self):
        """Test that a point with too few coordinates is rejected."""
        with pytest.raises(ValueError):
            eval_jet2(parse("z", COORDS), [1.0])
