import random

import pytest

from linform import cartan as ct
from linform import symexpr as sx
from linform import tanlift as tl
from linform.cartan import KForm, chart, d, dx, forms_equal, function_form, wedge
from linform.identities import random_form, random_polynomial

C2 = chart("x1", "x2")
C3 = chart("x1", "x2", "x3")


def rng():
    return random.Random(424242)


def test_tangent_chart_names():
    tc = tl.tangent_chart(C2)
    assert tc.total.variables == ("x1", "x2", "dx1", "dx2")


def test_fibre_name_collision_gets_suffix():
    tc = tl.tangent_chart(chart("x", "dx"))
    assert tc.total.variables == ("x", "dx", "dx_", "ddx")


def test_vertical_lift_of_covector():
    tc = tl.tangent_chart(C2)
    v = tl.vertical_lift(tc, dx(C2, 0))
    assert v.coeffs == {(0,): sx.ONE}


def test_vertical_lift_of_function_ignores_fibres():
    tc = tl.tangent_chart(C2)
    f = tl.vertical_lift(tc, function_form(C2, sx.parse("x1*x2")))
    assert sx.free_vars(f.coeffs[()]) == {"x1", "x2"}


def test_vertical_lift_functorial_on_wedge():
    tc = tl.tangent_chart(C2)
    w = wedge(dx(C2, 0), dx(C2, 1))
    assert forms_equal(tl.vertical_lift(tc, w),
                       wedge(tl.vertical_lift(tc, dx(C2, 0)),
                             tl.vertical_lift(tc, dx(C2, 1)))).equal


def test_tau_of_covector_is_fibre_coordinate():
    tc = tl.tangent_chart(C2)
    res = tl.tau(tc, dx(C2, 0))
    assert res.degree == 0
    assert sx.expr_equal(res.coeffs[()], sx.Var("dx1")).equal


def test_tau_of_basis_2form():
    tc = tl.tangent_chart(C2)
    res = tl.tau(tc, wedge(dx(C2, 0), dx(C2, 1)))
    expected = KForm(tc.total, 1, {(0,): sx.parse("-dx2"),
                                   (1,): sx.parse("dx1")})
    assert forms_equal(res, expected).equal


def test_tau_rejects_functions():
    tc = tl.tangent_chart(C2)
    with pytest.raises(ValueError):
        tl.tau(tc, function_form(C2, sx.ONE))


def test_tau_equals_euler_contraction():
    r = rng()
    tc = tl.tangent_chart(C3)
    for k in (1, 2, 3):
        a = random_form(r, C3, k)
        direct = tl.tau(tc, a)
        via_euler = ct.i_x(tl.euler_field(tc), tl.vertical_lift(tc, a))
        assert forms_equal(direct, via_euler).equal


def test_lift_of_coordinate_function():
    tc = tl.tangent_chart(C2)
    res = tl.tangent_lift(tc, function_form(C2, sx.parse("x1")))
    assert sx.expr_equal(res.coeffs[()], sx.Var("dx1")).equal


def test_lift_of_covector():
    tc = tl.tangent_chart(C2)
    res = tl.tangent_lift(tc, dx(C2, 0))
    assert forms_equal(res, dx(tc.total, 2)).equal  # the dx1-fibre slot


def test_lift_of_basis_2form():
    tc = tl.tangent_chart(C2)
    res = tl.tangent_lift(tc, wedge(dx(C2, 0), dx(C2, 1)))
    expected = wedge(dx(tc.total, 2), dx(tc.total, 1)) \
        + wedge(dx(tc.total, 0), dx(tc.total, 3))
    assert forms_equal(res, expected).equal


def test_projection_recovers_base_point():
    tc = tl.tangent_chart(C2)
    p = tl.projection(tc)
    out = p({"x1": 1.5, "x2": -2.0, "dx1": 9.0, "dx2": 4.0})
    assert out == {"x1": 1.5, "x2": -2.0}


def test_euler_field_projects_to_the_point():
    # pushing the Euler field through the projection returns the fibre
    # coordinates themselves
    tc = tl.tangent_chart(C2)
    comps = ct.pushforward(tl.projection(tc), tl.euler_field(tc))
    assert [sx.to_string(c) for c in comps] == ["dx1", "dx2"]


# --- the coordinate transforms ---------------------------------------------

def test_canonical_involution_coordinates():
    j = tl.canonical_involution(chart("x"))
    out = j({"x": 1.0, "dx": 2.0, "dx_": 3.0, "ddx": 4.0})
    assert out == {"x": 1.0, "dx": 3.0, "dx_": 2.0, "ddx": 4.0}


def test_canonical_involution_is_involutive():
    j = tl.canonical_involution(C2)
    assert ct.compose(j, j).components == ct.identity_map(j.source).components


def test_cotangent_flip_coordinates():
    th = tl.cotangent_flip(chart("x"))
    out = th({"x": 1.0, "p_x": 2.0, "dx": 3.0, "dp_x": 4.0})
    assert out == {"x": 1.0, "dx": 3.0, "p_x": 4.0, "p_dx": 2.0}


def test_core_flip_coordinates():
    dual = chart("x", "xi1")
    flip = tl.core_flip(dual, rank=1)
    out = flip({"x": 1.0, "xi1": 2.0, "dx": 3.0, "dxi1": 4.0})
    assert out == {"x": 1.0, "xi1": 4.0, "dx": 3.0, "dxi1": 2.0}


def test_tangent_map_chain_rule():
    r = rng()
    f = ct.ChartMap(C2, C3, tuple(random_polynomial(r, C2.variables)
                                  for _ in range(3)))
    g_form = random_form(r, C3, 1, coeff_degree=1)
    tf = tl.tangent_map(f)
    # naturality: lifting then pulling back along the tangent map agrees
    # with pulling back then lifting
    tc2, tc3 = tl.tangent_chart(C2), tl.tangent_chart(C3)
    lhs = ct.pullback(tf, tl.tangent_lift(tc3, g_form))
    rhs = tl.tangent_lift(tc2, ct.pullback(f, g_form))
    assert forms_equal(lhs, rhs).equal


# --- the lift identities ----------------------------------------------------

def test_lift_commutes_with_d_randomized():
    r = rng()
    tc = tl.tangent_chart(C3)
    for k in (0, 1, 2):
        a = random_form(r, C3, k)
        assert forms_equal(d(tl.tangent_lift(tc, a)),
                           tl.tangent_lift(tc, d(a))).equal


def test_lift_product_rule_randomized():
    r = rng()
    tc = tl.tangent_chart(C3)
    for k in (1, 2):
        f = random_polynomial(r, C3.variables)
        a = random_form(r, C3, k)
        fa = a.map_coeffs(lambda e: sx.mul(f, e))
        f_form = function_form(C3, f)
        f_t = tl.tangent_lift(tc, f_form).coeffs.get((), sx.ZERO)
        f_v = tl.vertical_lift(tc, f_form).coeffs.get((), sx.ZERO)
        rhs = f_t * tl.vertical_lift(tc, a) + f_v * tl.tangent_lift(tc, a)
        assert forms_equal(tl.tangent_lift(tc, fa), rhs).equal


def test_homotopy_formula_randomized():
    r = rng()
    tc = tl.tangent_chart(C3)
    for k in (1, 2, 3):
        a = random_form(r, C3, k)
        rhs = d(tl.tau(tc, a)) + tl.tau(tc, d(a))
        assert forms_equal(tl.tangent_lift(tc, a), rhs).equal


def test_tau_is_sharp_pullback_of_tautological_form():
    r = rng()
    tc = tl.tangent_chart(C3)
    cc = tl.cotangent_chart(C3)
    for _ in range(5):
        w = random_form(r, C3, 2)
        assert forms_equal(tl.tau(tc, w),
                           ct.pullback(tl.form_sharp(w),
                                       tl.theta_can(cc))).equal


def test_lift_of_2form_via_canonical_symplectic_form():
    r = rng()
    tc = tl.tangent_chart(C3)
    cc = tl.cotangent_chart(C3)
    for _ in range(5):
        w = random_form(r, C3, 2)
        rhs = -ct.pullback(tl.form_sharp(w), tl.omega_can(cc)) \
            + tl.tau(tc, d(w))
        assert forms_equal(tl.tangent_lift(tc, w), rhs).equal


def test_sharp_route_agrees_with_lie_derivative_route():
    r = rng()
    for base in (C2, C3):
        tc = tl.tangent_chart(base)
        for _ in range(3):
            w = random_form(r, base, 2)
            assert forms_equal(tl.tangent_lift_via_sharp(tc, w),
                               tl.tangent_lift(tc, w)).equal


def test_canonical_one_form_differential():
    cc = tl.cotangent_chart(C2)
    assert forms_equal(tl.omega_can(cc), -d(tl.theta_can(cc))).equal
