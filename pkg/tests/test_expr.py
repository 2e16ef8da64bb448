import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcalc import expr
from gcalc.errors import DomainError, ParseError, UnknownIdentifier
from gcalc.expr import (Add, Call, Coord, Div, Mul, Neg, Num, Pow, Sub,
                        eval_jet2, eval_value, parse, to_text)


class TestParse:
    def test_power_of_call(self):
        t = parse("sin(theta)^2", ["theta", "phi"])
        assert t == Pow(Call("sin", Coord(0)), Num(2.0))

    def test_product_plus_one(self):
        t = parse("x*y + 1", ["x", "y"])
        assert t == Add(Mul(Coord(0), Coord(1)), Num(1.0))

    def test_precedence_unary_vs_power(self):
        # ^ binds tighter than unary minus
        assert parse("-x^2", ["x"]) == Neg(Pow(Coord(0), Num(2.0)))

    def test_power_right_associative(self):
        assert parse("2^3^2", []) == Pow(Num(2.0), Pow(Num(3.0), Num(2.0)))
        assert eval_value(parse("2^3^2", []), ()) == 512.0

    def test_left_associative_sub_and_div(self):
        assert eval_value(parse("8 - 3 - 2", []), ()) == 3.0
        assert eval_value(parse("8/2/2", []), ()) == 2.0

    def test_unclosed_call_reports_position(self):
        with pytest.raises(ParseError) as err:
            parse("sin(", ["x"])
        assert err.value.position == 4

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifier):
            parse("x + q", ["x", "y"])
        with pytest.raises(UnknownIdentifier):
            parse("foo(x)", ["x"])

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse("x + ", ["x"])
        with pytest.raises(ParseError):
            parse("x 2", ["x"])
        with pytest.raises(ParseError):
            parse("x @ 2", ["x"])

    def test_scientific_notation(self):
        assert eval_value(parse("1.5e2 + .25", []), ()) == 150.25


COORDS = ["x", "y", "z"]


def _random_tree(rng, depth):
    r = rng.random()
    if depth <= 0 or r < 0.25:
        if rng.random() < 0.5:
            return Num(float(rng.integers(0, 5)))
        return Coord(int(rng.integers(0, len(COORDS))))
    pick = rng.integers(0, 7)
    if pick == 0:
        return Add(_random_tree(rng, depth - 1), _random_tree(rng, depth - 1))
    if pick == 1:
        return Sub(_random_tree(rng, depth - 1), _random_tree(rng, depth - 1))
    if pick == 2:
        return Mul(_random_tree(rng, depth - 1), _random_tree(rng, depth - 1))
    if pick == 3:
        return Div(_random_tree(rng, depth - 1), _random_tree(rng, depth - 1))
    if pick == 4:
        return Neg(_random_tree(rng, depth - 1))
    if pick == 5:
        return Pow(_random_tree(rng, depth - 1), Num(float(rng.integers(0, 4))))
    name = ["sin", "cos", "exp", "tanh", "sqrt", "log", "abs"][rng.integers(0, 7)]
    return Call(name, _random_tree(rng, depth - 1))


class TestPrintRoundTrip:
    def test_random_trees_reparse_identically(self):
        rng = np.random.default_rng(7)
        for _ in range(400):
            tree = _random_tree(rng, 4)
            text = to_text(tree, COORDS)
            assert parse(text, COORDS) == tree

    @given(st.text(alphabet="xy1+-*/^(). ", min_size=1, max_size=40))
    @settings(max_examples=300, deadline=None)
    def test_parse_is_total_and_stable(self, text):
        # every input either parses or raises ParseError; on success the
        # canonical form is a fixed point of parse . print
        try:
            tree = parse(text, ["x", "y"])
        except ParseError:
            return
        assert parse(to_text(tree, ["x", "y"]), ["x", "y"]) == tree


class TestJets:
    def test_product_jet(self):
        j = eval_jet2(parse("x*y", ["x", "y"]), (2.0, 3.0))
        assert j.value == 6.0
        assert np.allclose(j.grad, [3.0, 2.0])
        assert np.allclose(j.hess, [[0.0, 1.0], [1.0, 0.0]])

    def test_sin_squared(self):
        j = eval_jet2(parse("sin(theta)^2", ["theta"]), (math.pi / 4,))
        assert abs(j.value - 0.5) < 1e-15
        assert abs(j.grad[0] - 1.0) < 1e-15
        assert abs(j.hess[0, 0]) < 1e-15

    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            eval_jet2(parse("1/x", ["x"]), (0.0,))

    def test_log_domain(self):
        with pytest.raises(DomainError):
            eval_value(parse("log(x)", ["x"]), (-1.0,))

    def test_sqrt_domain(self):
        with pytest.raises(DomainError):
            eval_value(parse("sqrt(x)", ["x"]), (-4.0,))

    def test_integer_power_with_negative_base(self):
        j = eval_jet2(parse("x^3", ["x"]), (-2.0,))
        assert j.value == -8.0
        assert j.grad[0] == 12.0
        assert j.hess[0, 0] == -12.0

    def test_negative_integer_exponent(self):
        j = eval_jet2(parse("x^-2", ["x"]), (2.0,))
        assert abs(j.value - 0.25) < 1e-15
        assert abs(j.grad[0] + 0.25) < 1e-15

    def test_fractional_power_needs_positive_base(self):
        with pytest.raises(DomainError):
            eval_value(parse("(-2)^0.5", []), ())
        assert abs(eval_value(parse("4^0.5", []), ()) - 2.0) < 1e-14

    def test_variable_exponent(self):
        j = eval_jet2(parse("x^y", ["x", "y"]), (2.0, 3.0))
        assert abs(j.value - 8.0) < 1e-12
        assert abs(j.grad[0] - 12.0) < 1e-11          # y x^(y-1)
        assert abs(j.grad[1] - 8.0 * math.log(2.0)) < 1e-11

    def test_constant_expression_promoted(self):
        j = eval_jet2(parse("2 + 3", []), ())
        assert j.value == 5.0
        assert j.grad.shape == (0,)


SMOOTH_TEMPLATES = [
    "sin(x)*cos(y) + x^2*y",
    "exp(x/2)*tanh(y) - y^3",
    "sqrt(1 + x^2 + y^2)",
    "log(2 + sin(x) + y^2)",
    "x^4 - 3*x*y + y^2/(2 + cos(x))",
    "sinh(x/3) + cosh(y/3)",
    "tan(x/2)*y + x",
    "1/(1 + x^2) + exp(-y^2)",
]


def _fd_grad(f, x, h):
    n = len(x)
    g = np.zeros(n)
    for k in range(n):
        xp = list(x); xp[k] += h
        xm = list(x); xm[k] -= h
        g[k] = (f(xp) - f(xm)) / (2 * h)
    return g


def _fd_hess(f, x, h):
    n = len(x)
    H = np.zeros((n, n))
    f0 = f(x)
    for k in range(n):
        xp = list(x); xp[k] += h
        xm = list(x); xm[k] -= h
        H[k, k] = (f(xp) - 2 * f0 + f(xm)) / h ** 2
        for l in range(k + 1, n):
            xpp = list(x); xpp[k] += h; xpp[l] += h
            xpm = list(x); xpm[k] += h; xpm[l] -= h
            xmp = list(x); xmp[k] -= h; xmp[l] += h
            xmm = list(x); xmm[k] -= h; xmm[l] -= h
            H[k, l] = H[l, k] = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4 * h ** 2)
    return H


class TestJetsAgainstFiniteDifferences:
    def test_random_expressions(self):
        # first derivatives checked with the 1e-5 step; second derivatives
        # use a wider 5e-4 step because the float64 noise floor of a
        # second-order central difference at h=1e-5 sits near 1e-5 relative,
        # which would drown the comparison
        rng = np.random.default_rng(12345)
        worst = 0.0
        for _ in range(256):
            text = SMOOTH_TEMPLATES[rng.integers(0, len(SMOOTH_TEMPLATES))]
            tree = parse(text, ["x", "y"])
            point = tuple(rng.uniform(-1.2, 1.2, size=2))
            f = lambda p: eval_value(tree, p)
            jet = eval_jet2(tree, point)
            fg = _fd_grad(f, point, 1e-5)
            fh = _fd_hess(f, point, 5e-4)
            scale_g = max(1.0, float(np.max(np.abs(jet.grad))), float(np.max(np.abs(fg))))
            scale_h = max(1.0, float(np.max(np.abs(jet.hess))), float(np.max(np.abs(fh))))
            worst = max(worst,
                        float(np.max(np.abs(jet.grad - fg))) / scale_g,
                        float(np.max(np.abs(jet.hess - fh))) / scale_h)
        assert worst < 1e-6

    def test_hessian_is_symmetric(self):
        rng = np.random.default_rng(99)
        for _ in range(50):
            text = SMOOTH_TEMPLATES[rng.integers(0, len(SMOOTH_TEMPLATES))]
            tree = parse(text, ["x", "y"])
            j = eval_jet2(tree, tuple(rng.uniform(-1, 1, size=2)))
            assert np.allclose(j.hess, j.hess.T, atol=1e-14)


class TestExprComposition:
    def test_operator_overloads_build_trees(self):
        x = Coord(0)
        t = (x * x + 1.0) / (2.0 - x)
        assert eval_value(t, (3.0,)) == -10.0

    def test_dim_check_helper(self):
        from gcalc.errors import DimMismatch
        with pytest.raises(DimMismatch):
            expr.check_point((1.0,), 2)
