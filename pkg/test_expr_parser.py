"""
Tests for the frame expression language
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geometry.errors import (ExprSyntaxError, NonConstantExponentError, SingularEvaluationError,
                             UnknownIdentifierError, UnknownVariableError)
from utils.expr_parser import (Binary, Call, Negate, Number, Power, Variable, eval_jet, evaluate, parse,
                               scaled_by_exp, to_text)
from verify.fd_oracle import fd_expression
from verify.spaces import random_expression


class TestParsing:
    def test_precedence(self):
        assert evaluate(parse("1 + 2 * 3", 1), [0.0]) == 7.0
        assert evaluate(parse("(1 + 2) * 3", 1), [0.0]) == 9.0

    def test_power_is_right_associative(self):
        assert evaluate(parse("2^3^2", 1), [0.0]) == 512.0

    def test_unary_minus_binds_looser_than_power(self):
        assert evaluate(parse("-x1^2", 1), [3.0]) == -9.0

    def test_variables_are_one_based(self):
        expr = parse("x2", 2)
        assert expr == Variable(1)
        assert evaluate(expr, [5.0, 7.0]) == 7.0

    def test_constants(self):
        assert evaluate(parse("pi", 1), [0.0]) == pytest.approx(math.pi)
        assert evaluate(parse("e", 1), [0.0]) == pytest.approx(math.e)

    def test_functions(self):
        expr = parse("exp(x1) * cos(x2) + sqrt(4) - log(1)", 2)
        assert evaluate(expr, [0.0, 0.0]) == pytest.approx(3.0)

    def test_constant_exponent_folds(self):
        expr = parse("x1^(1/2)", 1)
        assert isinstance(expr, Power)
        assert expr.exponent == 0.5

    def test_scientific_notation(self):
        assert evaluate(parse("1.5e-3 * 2", 1), [0.0]) == pytest.approx(3e-3)

    def test_tree_shape(self):
        assert parse("x1 - 2", 1) == Binary("-", Variable(0), Number(2.0))
        assert parse("-x1", 1) == Negate(Variable(0))
        assert parse("sin(x1)", 1) == Call("sin", Variable(0))


class TestErrors:
    def test_unknown_variable(self):
        with pytest.raises(UnknownVariableError) as info:
            parse("x1 + x3", 2)
        assert info.value.offset == 5

    def test_x0_is_unknown(self):
        with pytest.raises(UnknownVariableError):
            parse("x0", 2)

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError) as info:
            parse("tan(x1)", 1)
        assert info.value.offset == 0

    def test_non_constant_exponent(self):
        with pytest.raises(NonConstantExponentError) as info:
            parse("2^x1", 1)
        assert info.value.offset == 2

    def test_unbalanced_parenthesis(self):
        with pytest.raises(ExprSyntaxError) as info:
            parse("(x1 + 1", 1)
        assert info.value.offset == 7

    def test_bad_character(self):
        with pytest.raises(ExprSyntaxError) as info:
            parse("x1 $ 2", 1)
        assert info.value.offset == 3
        assert "at offset 3" in str(info.value)

    def test_offsets_count_bytes(self):
        with pytest.raises(ExprSyntaxError) as info:
            parse("x1 + ρ", 1)
        assert info.value.offset == 5

    def test_unterminated_call(self):
        with pytest.raises(ExprSyntaxError) as info:
            parse("sin(", 2)
        assert info.value.offset == 4

    def test_empty_input(self):
        with pytest.raises(ExprSyntaxError):
            parse("", 1)

    def test_trailing_operator(self):
        with pytest.raises(ExprSyntaxError):
            parse("x1 *", 1)

    def test_function_needs_parenthesis(self):
        with pytest.raises(ExprSyntaxError):
            parse("sin x1", 1)

    def test_division_by_zero_value(self):
        with pytest.raises(SingularEvaluationError):
            evaluate(parse("1 / x1", 1), [0.0])

    def test_log_domain(self):
        with pytest.raises(SingularEvaluationError):
            eval_jet(parse("log(x1)", 1), [-1.0])


class TestCanonicalText:
    def test_text_is_fully_parenthesized(self):
        assert to_text(parse("1 + x1 * x2", 2)) == "(1.0 + (x1 * x2))"

    def test_negative_exponent_text(self):
        assert to_text(parse("x1^-2", 1)) == "(x1^(-2.0))"

    def test_scaled_by_exp(self):
        expr = scaled_by_exp(parse("x1", 1), parse("cos(x1)", 1))
        assert to_text(expr) == "(exp((-x1)) * cos(x1))"
        assert evaluate(expr, [0.5]) == pytest.approx(math.exp(-0.5) * math.cos(0.5))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_round_trip(self, seed):
        parsed = parse(to_text(random_expression(np.random.default_rng(seed), 3, depth=4)), 3)
        assert parse(to_text(parsed), 3) == parsed
        assert to_text(parse(to_text(parsed), 3)) == to_text(parsed)


class TestJetAgainstDifferences:
    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_random_expressions_match_central_differences(self, seed):
        rng = np.random.default_rng(seed)
        expr = random_expression(rng, 2, depth=3)
        point = rng.uniform(-1.0, 1.0, size=2)
        jet = eval_jet(expr, point)
        estimate = fd_expression(expr, point, h=1e-4)
        scale_grad = np.maximum(np.abs(jet.grad), 1.0)
        scale_hess = np.maximum(np.abs(jet.hess), 1.0)
        assert np.all(np.abs(estimate.grad - jet.grad) / scale_grad < 1e-4)
        assert np.all(np.abs(estimate.hess - jet.hess) / scale_hess < 1e-4)

    def test_exp_derivative_at_zero(self):
        estimate = fd_expression(parse("exp(x1)", 1), [0.0], h=1e-4)
        assert estimate.grad[0] == pytest.approx(1.0, abs=1e-8)


class TestEvalJet:
    def test_polynomial(self):
        jet = eval_jet(parse("x1^2 + 3*x1", 2), [2.0, 0.0])
        assert jet.value == pytest.approx(10.0)
        assert jet.grad[0] == pytest.approx(7.0)
        assert jet.hess[0, 0] == pytest.approx(2.0)

    def test_sine(self):
        jet = eval_jet(parse("sin(x2)", 2), [0.0, math.pi / 2])
        assert jet.value == pytest.approx(1.0)
        np.testing.assert_allclose(jet.grad, [0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(jet.hess, [[0.0, 0.0], [0.0, -1.0]], atol=1e-15)

    def test_exp_cos(self):
        jet = eval_jet(parse("exp(x1)*cos(x2)", 2), [0.0, 0.0])
        assert jet.value == 1.0
        np.testing.assert_allclose(jet.grad, [1.0, 0.0])
        assert jet.hess[0, 1] == 0.0
        assert jet.hess[1, 1] == -1.0

    def test_point_too_short(self):
        with pytest.raises(ValueError):
            eval_jet(parse("x2", 2), [0.0])

    def test_fractional_power_at_origin(self):
        jet = eval_jet(parse("x1^2.5 + x2", 2), [0.0, 0.0])
        assert jet.value == 0.0
        np.testing.assert_array_equal(jet.grad, [0.0, 1.0])
        assert not jet.hess.any()
        assert evaluate(parse("x1^2.5", 2), [0.0, 0.0]) == 0.0
