import math
import random

import pytest
from hypothesis import given, settings, assume
from hypothesis import strategies as st

from linform import symexpr as sx
from linform.symexpr import (Const, ExprSyntaxError, DomainError,
                             UnboundVariableError, diff, evaluate, expr_equal,
                             parse, simplify, to_string)

VARS = ("x1", "x2", "x3")


def central_difference(e, v, point, h=1e-6):
    up = dict(point)
    down = dict(point)
    up[v] = point[v] + h
    down[v] = point[v] - h
    return (evaluate(e, up) - evaluate(e, down)) / (2 * h)


# --- parsing --------------------------------------------------------------

def test_parse_product_sum():
    e = parse("x1*x2 + 3")
    assert isinstance(e, sx.Add)
    assert evaluate(e, {"x1": 2.0, "x2": 5.0}) == 13.0


def test_parse_function_power():
    e = parse("sin(x1)^2")
    assert isinstance(e, sx.Pow)
    assert isinstance(e.base, sx.Call)
    assert math.isclose(evaluate(e, {"x1": 0.3}), math.sin(0.3) ** 2)


def test_parse_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse("x1*(")
    assert err.value.offset == 4


def test_parse_unknown_function():
    with pytest.raises(ExprSyntaxError) as err:
        parse("sinh(x1)")
    assert "sinh" in str(err.value)


def test_parse_trailing_garbage():
    with pytest.raises(ExprSyntaxError):
        parse("x1 + x2 )")


def test_decimal_literals_are_exact():
    e = parse("0.1 + 0.2")
    assert isinstance(e, Const)
    assert e.value == sx.Fraction(3, 10)


@pytest.mark.parametrize("src", [
    "x1*x2 + 3", "sin(x1)^2", "x1 - x2 - x3", "x1/x2", "-(x1 + 2)^3",
    "2/3*x1 + x2^2", "exp(x1)*cos(x2) - 1", "x1^(-2)",
])
def test_print_parse_print_fixed_point(src):
    once = to_string(parse(src))
    assert to_string(parse(once)) == once


# --- differentiation ------------------------------------------------------

def test_diff_product():
    assert to_string(simplify(diff(parse("x1*x2"), "x1"))) == "x2"


def test_diff_constant():
    assert diff(parse("7/2"), "x1") == sx.ZERO


def test_diff_matches_central_difference():
    e = parse("x1^3")
    d = diff(e, "x1")
    val = evaluate(d, {"x1": 2.0})
    assert val == 12.0
    fd = central_difference(e, "x1", {"x1": 2.0})
    assert abs(val - fd) <= 1e-6 * max(1.0, abs(val))


@pytest.mark.parametrize("src,var", [
    ("sin(x1*x2)", "x1"), ("exp(x1^2)", "x1"), ("x1^2*x2 + cos(x2)", "x2"),
    ("log(x1 + 3)", "x1"), ("x1/x2", "x2"),
])
def test_diff_finite_difference_oracle(src, var):
    e = parse(src)
    d = diff(e, var)
    rng = random.Random(11)
    for _ in range(5):
        point = {v: rng.uniform(0.5, 1.5) for v in sx.free_vars(e)}
        exact = evaluate(d, point)
        fd = central_difference(e, var, point)
        assert abs(exact - fd) <= 1e-6 * (1.0 + abs(exact))


# --- simplification -------------------------------------------------------

def test_simplify_additive_identity():
    assert to_string(simplify(parse("x1 + 0"))) == "x1"


def test_simplify_commutativity():
    assert simplify(parse("x1*x2 - x2*x1")) == sx.ZERO


def test_simplify_expansion():
    e = parse("(x1+x2)^2 - x1^2 - 2*x1*x2")
    s = simplify(e)
    assert to_string(s) == "x2^2"
    # expansion oracle: value preserved at 100 random points
    rng = random.Random(3)
    for _ in range(100):
        pt = {v: rng.uniform(-2, 2) for v in VARS}
        a, b = evaluate(e, pt), evaluate(s, pt)
        assert abs(a - b) <= 1e-9 * (1 + abs(a) + abs(b))


def test_simplify_collects_function_atoms():
    assert simplify(parse("x1*sin(x2) - sin(x2)*x1")) == sx.ZERO


# --- evaluation -----------------------------------------------------------

def test_unbound_variable():
    with pytest.raises(UnboundVariableError):
        evaluate(parse("x1 + x2"), {"x1": 1.0})


def test_domain_error_division_by_zero():
    with pytest.raises(DomainError):
        evaluate(parse("1/x1"), {"x1": 0.0})


def test_domain_error_log():
    with pytest.raises(DomainError):
        evaluate(parse("log(x1)"), {"x1": -1.0})


# --- equality -------------------------------------------------------------

def test_equal_binomial_symbolic():
    res = expr_equal(parse("(x1+1)^2"), parse("x1^2+2*x1+1"))
    assert res.equal and res.mode == "symbolic"


def test_unequal_numeric_with_witness():
    res = expr_equal(parse("x1*x2"), parse("x2"), "numeric", points=50)
    assert not res.equal
    assert res.witness is not None
    a = res.witness["x1"] * res.witness["x2"]
    assert abs(a - res.witness["x2"]) > 1e-9


def test_pythagorean_identity_numeric():
    res = expr_equal(parse("sin(x1)^2 + cos(x1)^2"), parse("1"),
                     "numeric", points=50)
    assert res.equal


def test_symbolic_falls_back_for_transcendental_inequality():
    res = expr_equal(parse("sin(x1)"), parse("cos(x1)"))
    assert not res.equal
    assert res.mode == "numeric"
    assert res.witness is not None


def test_numeric_inconclusive_on_domain_error():
    res = expr_equal(parse("log(x1)"), parse("log(x1)"), "numeric", points=50)
    assert res.inconclusive


def test_polynomial_inequality_witness():
    res = expr_equal(parse("x1^2"), parse("x1^2 + x2"))
    assert not res.equal and res.mode == "symbolic"
    assert res.witness is not None


# --- property tests -------------------------------------------------------

_leaf = st.one_of(
    st.integers(-4, 4).map(sx.const),
    st.fractions(min_value=-3, max_value=3, max_denominator=6).map(sx.const),
    st.sampled_from(VARS).map(sx.var),
)


def _combine(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: sx.add(*t)),
        st.tuples(children, children).map(lambda t: sx.mul(*t)),
        st.tuples(children, st.integers(0, 3)).map(
            lambda t: sx.pow_(t[0], sx.const(t[1]))),
        children.map(sx.neg),
    )


polys = st.recursive(_leaf, _combine, max_leaves=10)


@given(a=polys, b=polys, v=st.sampled_from(VARS))
@settings(max_examples=60, deadline=None)
def test_diff_is_linear(a, b, v):
    lhs = diff(sx.add(a, b), v)
    rhs = sx.add(diff(a, v), diff(b, v))
    assert expr_equal(lhs, rhs).equal


@given(e=polys, v=st.sampled_from(VARS), w=st.sampled_from(VARS))
@settings(max_examples=60, deadline=None)
def test_clairaut_symmetry(e, v, w):
    assert expr_equal(diff(diff(e, v), w), diff(diff(e, w), v)).equal


@given(e=polys)
@settings(max_examples=80, deadline=None)
def test_simplify_idempotent(e):
    s = simplify(e)
    assert simplify(s) == s


@given(e=polys)
@settings(max_examples=60, deadline=None)
def test_simplify_preserves_values(e):
    s = simplify(e)
    rng = random.Random(5)
    pt = {v: rng.uniform(-2, 2) for v in VARS}
    a, b = evaluate(e, pt), evaluate(s, pt)
    assume(math.isfinite(a))
    assert abs(a - b) <= 1e-9 * (1 + abs(a) + abs(b))


@given(a=polys, b=polys, seed=st.integers(0, 2**16))
@settings(max_examples=40, deadline=None)
def test_symbolic_equality_implies_numeric(a, b, seed):
    if expr_equal(a, b).equal:
        assert expr_equal(a, b, "numeric", points=20, seed=seed).equal


@given(e=polys)
@settings(max_examples=60, deadline=None)
def test_roundtrip_through_printer(e):
    s = to_string(e)
    assert expr_equal(parse(s), e).equal
