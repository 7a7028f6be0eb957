import random

import pytest

from linform import cartan as ct
from linform import symexpr as sx
from linform.cartan import (Chart, ChartMap, KForm, VField, chart, compose,
                            coordinate_field, d, dx, field_bracket,
                            form_from_records, form_to_records,
                            form_to_string, forms_equal, function_form,
                            i_x, identity_map, lie_derivative, pair,
                            parse_form, pullback, wedge, zero_form)
from linform.identities import random_chart_map, random_field, random_form

C3 = chart("x1", "x2", "x3")
RNG_SEED = 20240817


def rng():
    return random.Random(RNG_SEED)


def test_chart_rejects_duplicates():
    with pytest.raises(ValueError):
        chart("x1", "x1")


def test_wedge_basis():
    w = wedge(dx(C3, 0), dx(C3, 1))
    assert w.coeffs == {(0, 1): sx.ONE}


def test_wedge_alternation():
    assert wedge(dx(C3, 0), dx(C3, 0)).is_zero()


def test_wedge_graded_sign():
    r = rng()
    for _ in range(10):
        a = random_form(r, C3, 1)
        b = random_form(r, C3, 1)
        assert forms_equal(wedge(a, b), -wedge(b, a)).equal
        two = random_form(r, C3, 2)
        assert forms_equal(wedge(two, a), wedge(a, two)).equal


def test_wedge_overflow_is_zero():
    a = random_form(rng(), C3, 2)
    b = random_form(rng(), C3, 2)
    assert wedge(a, b).is_zero()


def test_d_basis():
    a = KForm(C3, 1, {(1,): sx.parse("x1")})
    assert forms_equal(d(a), wedge(dx(C3, 0), dx(C3, 1))).equal


def test_d_squared_zero_on_function():
    f = function_form(C3, sx.parse("x1^2*x2 - x3*x1 + 4"))
    assert d(d(f)).is_zero()


def test_d_sign_example():
    # the twisting form of the twisted graph example, with its sign
    b = KForm(C3, 2, {(0, 2): sx.parse("x2")})
    expected = KForm(C3, 3, {(0, 1, 2): sx.const(-1)})
    assert forms_equal(d(b), expected).equal


def test_interior_product_basis():
    w = wedge(dx(C3, 0), dx(C3, 1))
    assert forms_equal(i_x(coordinate_field(C3, 0), w), dx(C3, 1)).equal


def test_interior_product_squares_to_zero():
    r = rng()
    for _ in range(10):
        x = random_field(r, C3)
        a = random_form(r, C3, 2)
        assert i_x(x, i_x(x, a)).is_zero()


def test_interior_product_weighted():
    vol = KForm(C3, 3, {(0, 1, 2): sx.ONE})
    x = VField(C3, (sx.parse("x2"), sx.ZERO, sx.ZERO))
    expected = KForm(C3, 2, {(1, 2): sx.parse("x2")})
    assert forms_equal(i_x(x, vol), expected).equal


def test_interior_product_rejects_functions():
    with pytest.raises(ValueError):
        i_x(coordinate_field(C3, 0), function_form(C3, sx.ONE))


def test_lie_derivative_coordinate_flow():
    a = KForm(C3, 1, {(1,): sx.parse("x1")})
    assert forms_equal(lie_derivative(coordinate_field(C3, 0), a),
                       dx(C3, 1)).equal


def test_lie_derivative_on_functions_is_directional():
    r = rng()
    for _ in range(10):
        x = random_field(r, C3)
        f = function_form(C3, sx.parse("x1*x3^2 - x2"))
        lhs = lie_derivative(x, f)
        rhs = function_form(C3, pair(d(f), x))
        assert forms_equal(lhs, rhs).equal


def test_lie_derivative_of_bracket():
    r = rng()
    for _ in range(5):
        x = random_field(r, C3)
        y = random_field(r, C3)
        a = random_form(r, C3, 1, coeff_degree=1)
        lhs = lie_derivative(field_bracket(x, y), a)
        rhs = lie_derivative(x, lie_derivative(y, a)) \
            - lie_derivative(y, lie_derivative(x, a))
        assert forms_equal(lhs, rhs).equal


def test_lie_derivative_leibniz_over_wedge():
    r = rng()
    for _ in range(5):
        x = random_field(r, C3)
        a = random_form(r, C3, 1, coeff_degree=1)
        b = random_form(r, C3, 1, coeff_degree=1)
        lhs = lie_derivative(x, wedge(a, b))
        rhs = wedge(lie_derivative(x, a), b) + wedge(a, lie_derivative(x, b))
        assert forms_equal(lhs, rhs).equal


def test_pullback_identity():
    a = random_form(rng(), C3, 2)
    assert forms_equal(pullback(identity_map(C3), a), a).equal


def test_pullback_is_ring_morphism_on_functions():
    r = rng()
    f = random_chart_map(r, chart("y1", "y2"), C3)
    g1 = sx.parse("x1*x2")
    g2 = sx.parse("x3 - x1^2")
    lhs = f.apply_scalar(sx.mul(g1, g2))
    rhs = sx.mul(f.apply_scalar(g1), f.apply_scalar(g2))
    assert sx.expr_equal(lhs, rhs).equal


def test_pullback_functorial():
    r = rng()
    a_chart = chart("a1", "a2")
    b_chart = chart("b1", "b2", "b3")
    f = random_chart_map(r, a_chart, b_chart)
    g = random_chart_map(r, b_chart, C3)
    form = random_form(r, C3, 2, coeff_degree=1)
    assert forms_equal(pullback(compose(g, f), form),
                       pullback(f, pullback(g, form))).equal


def test_pullback_commutes_with_wedge():
    r = rng()
    f = random_chart_map(r, chart("y1", "y2", "y3"), C3)
    a = random_form(r, C3, 1, coeff_degree=1)
    b = random_form(r, C3, 1, coeff_degree=1)
    assert forms_equal(pullback(f, wedge(a, b)),
                       wedge(pullback(f, a), pullback(f, b))).equal


def test_pullback_of_canonical_form_along_bundle_map():
    # the classic coordinate formula for the pullback of dx^dp along
    # (x, u) -> (x, u^d s_jd)
    tstar = chart("x1", "x2", "p1", "p2")
    omega = KForm(tstar, 2, {(0, 2): sx.ONE, (1, 3): sx.ONE})
    a_chart = chart("x1", "x2", "u1")
    f = ChartMap(a_chart, tstar,
                 (sx.parse("x1"), sx.parse("x2"),
                  sx.parse("u1*x2"), sx.parse("u1*x1^2")))
    result = pullback(f, omega).simplified()
    expected = KForm(a_chart, 2, {
        (0, 1): sx.parse("u1 - 2*u1*x1"),     # u(ds_1/dx2 - ds_2/dx1) on dx1^dx2
        (0, 2): sx.parse("x2"),
        (1, 2): sx.parse("x1^2"),
    })
    assert forms_equal(result, expected).equal


def test_field_bracket_coordinates_commute():
    assert field_bracket(coordinate_field(C3, 0),
                         coordinate_field(C3, 1)).components == \
        (sx.ZERO,) * 3


def test_field_bracket_basic():
    x = coordinate_field(C3, 0)
    y = VField(C3, (sx.ZERO, sx.parse("x1"), sx.ZERO))
    assert field_bracket(x, y).components == (sx.ZERO, sx.ONE, sx.ZERO)


def test_field_bracket_rotations():
    # rotation generators: [L1, L2] = L3 pattern with a sign flip
    l1 = VField(C3, (sx.ZERO, sx.parse("x3"), sx.parse("-x2")))
    l2 = VField(C3, (sx.parse("-x3"), sx.ZERO, sx.parse("x1")))
    out = field_bracket(l1, l2)
    expected = (sx.parse("x2"), sx.parse("-x1"), sx.ZERO)
    for got, want in zip(out.components, expected):
        assert sx.expr_equal(got, want).equal


def test_jacobi_for_field_bracket_numeric():
    r = rng()
    for _ in range(3):
        x, y, z = (random_field(r, C3) for _ in range(3))
        total = field_bracket(field_bracket(x, y), z) \
            + field_bracket(field_bracket(y, z), x) \
            + field_bracket(field_bracket(z, x), y)
        point = {v: r.uniform(-2, 2) for v in C3.variables}
        for comp in total.components:
            assert abs(sx.evaluate(comp, point)) < 1e-9


# --- serialization --------------------------------------------------------

def test_surface_syntax_roundtrip():
    r = rng()
    for degree in (0, 1, 2, 3):
        a = random_form(r, C3, degree)
        s = form_to_string(a)
        assert forms_equal(parse_form(s, C3), a).equal


def test_surface_syntax_on_tangent_style_chart():
    tc = chart("x1", "x2", "dx1", "dx2")
    a = KForm(tc, 2, {(0, 2): sx.parse("dx2"), (1, 3): sx.parse("x1")})
    s = form_to_string(a)
    assert forms_equal(parse_form(s, tc), a).equal


def test_record_roundtrip():
    r = rng()
    a = random_form(r, C3, 2)
    assert forms_equal(form_from_records(C3, 2, form_to_records(a)), a).equal


def test_records_accept_unsorted_indices():
    a = form_from_records(C3, 2, [{"indices": [3, 1], "coefficient": "x2"}])
    expected = KForm(C3, 2, {(0, 2): sx.parse("-x2")})
    assert forms_equal(a, expected).equal


def test_mixed_degree_form_rejected():
    with pytest.raises(sx.ExprSyntaxError):
        parse_form("dx1 + dx1^dx2", C3)
