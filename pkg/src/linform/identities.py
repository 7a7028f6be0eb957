"""Randomized identity suites: exterior-calculus laws and the lift
identities, run over seeded random polynomial forms on small charts.

These are the executable versions of the structural facts the rest of
the package depends on; the CLI exposes them as a batch check and the
acceptance tests pin their sample counts.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from . import cartan as ct
from . import symexpr as sx
from . import tanlift as tl
from .cartan import Chart, ChartMap, KForm, VField
from .symexpr import Expr, ZERO


def random_polynomial(rng: random.Random, variables: tuple[str, ...],
                      degree: int = 2, terms: int = 3) -> Expr:
    out = [sx.const(rng.randint(-3, 3))]
    for _ in range(terms):
        factors = [sx.const(rng.randint(-3, 3))]
        for _ in range(rng.randint(1, degree)):
            if variables:
                factors.append(sx.Var(rng.choice(variables)))
        out.append(sx.mul(*factors))
    return sx.add(*out)


def random_form(rng: random.Random, c: Chart, degree: int,
                coeff_degree: int = 2) -> KForm:
    coeffs = {}
    for idx in itertools.combinations(range(c.dim), degree):
        if rng.random() < 0.75:
            coeffs[idx] = random_polynomial(rng, c.variables, coeff_degree)
    return KForm(c, degree, coeffs)


def random_field(rng: random.Random, c: Chart) -> VField:
    return VField(c, tuple(random_polynomial(rng, c.variables, 2, 2)
                           for _ in range(c.dim)))


def random_chart_map(rng: random.Random, source: Chart,
                     target: Chart) -> ChartMap:
    comps = tuple(random_polynomial(rng, source.variables, 2, 2)
                  for _ in range(target.dim))
    return ChartMap(source, target, comps)


def _charts(dims):
    return [Chart(tuple(f"x{i+1}" for i in range(n))) for n in dims]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    samples: int
    detail: str = ""


def _zero(form: KForm) -> bool:
    return ct.forms_equal(form, ct.zero_form(form.chart, form.degree)).equal


def exterior_suite(count: int = 200, dims=(2, 3, 4),
                   seed: int = sx.DEFAULT_SEED) -> list[SuiteResult]:
    """Square-zero differential, homotopy formula for the Lie derivative,
    and naturality of the differential under pullback, each on ``count``
    random polynomial forms."""
    rng = random.Random(seed)
    charts = _charts(dims)
    results = []

    ok, n_run = True, 0
    detail = ""
    for _ in range(count):
        c = rng.choice(charts)
        k = rng.randint(0, c.dim - 1)
        a = random_form(rng, c, k)
        n_run += 1
        if not _zero(ct.d(ct.d(a))):
            ok, detail = False, f"degree {k} on {c.variables}"
            break
    results.append(SuiteResult("d_squared_zero", ok, n_run, detail))

    ok, n_run, detail = True, 0, ""
    for _ in range(count):
        c = rng.choice(charts)
        k = rng.randint(1, c.dim - 1)
        a = random_form(rng, c, k, coeff_degree=2)
        x = random_field(rng, c)
        lhs = ct.lie_derivative(x, a)
        rhs = ct.i_x(x, ct.d(a)) + ct.d(ct.i_x(x, a))
        n_run += 1
        if not ct.forms_equal(lhs, rhs).equal:
            ok, detail = False, f"degree {k} on {c.variables}"
            break
    results.append(SuiteResult("cartan_homotopy", ok, n_run, detail))

    ok, n_run, detail = True, 0, ""
    for _ in range(count):
        tgt = rng.choice(charts)
        src = rng.choice(charts)
        f = random_chart_map(rng, src, tgt)
        k = rng.randint(0, tgt.dim - 1)
        a = random_form(rng, tgt, k, coeff_degree=1)
        n_run += 1
        if not ct.forms_equal(ct.pullback(f, ct.d(a)),
                              ct.d(ct.pullback(f, a))).equal:
            ok, detail = False, f"degree {k} {tgt.variables} <- {src.variables}"
            break
    results.append(SuiteResult("pullback_commutes_with_d", ok, n_run, detail))

    return results


def lift_suite(count: int = 50, dims=(2, 3),
               seed: int = sx.DEFAULT_SEED) -> list[SuiteResult]:
    """The lift identities: differential/lift exchange for functions, the
    product rule for the lift, the basis-form expansion, the homotopy
    expression for the lift, naturality under the differential, and the
    two canonical-form identities for 2-forms."""
    rng = random.Random(seed)
    charts = _charts(dims)
    results = []

    def tangent(c):
        return tl.tangent_chart(c)

    # d(f_T) = (df)_T
    ok, n_run, detail = True, 0, ""
    for _ in range(count):
        c = rng.choice(charts)
        tc = tangent(c)
        f = ct.function_form(c, random_polynomial(rng, c.variables))
        lhs = ct.d(tl.tangent_lift(tc, f))
        rhs = tl.tangent_lift(tc, ct.d(f))
        n_run += 1
        if not ct.forms_equal(lhs, rhs).equal:
            ok, detail = False, str(c.variables)
            break
    results.append(SuiteResult("lift_of_function_differential", ok, n_run, detail))

    # (f a)_T = f_T a^v + f^v a_T
    ok, n_run, detail = True, 0, ""
    for _ in range(count):
        c = rng.choice(charts)
        tc = tangent(c)
        f = random_polynomial(rng, c.variables)
        k = rng.randint(1, c.dim)
        a = random_form(rng, c, k)
        fa = a.map_coeffs(lambda e: sx.mul(f, e))
        lhs = tl.tangent_lift(tc, fa)
        f_form = ct.function_form(c, f)
        f_t = tl.tangent_lift(tc, f_form).coeffs.get((), ZERO)
        f_v = tl.vertical_lift(tc, f_form).coeffs.get((), ZERO)
        rhs = f_t * tl.vertical_lift(tc, a) + f_v * tl.tangent_lift(tc, a)
        n_run += 1
        if not ct.forms_equal(lhs, rhs).equal:
            ok, detail = False, f"degree {k} on {c.variables}"
            break
    results.append(SuiteResult("lift_product_rule", ok, n_run, detail))

    # basis-form expansion of the lift, degrees 2 and 3 (all basis tuples
    # of the listed charts; higher dimensions only add more instances)
    ok, n_run, detail = True, 0, ""
    for c in _charts((2, 3, 4, 5, 6)):
        tc = tangent(c)
        for k in (2, 3):
            if k > c.dim:
                continue
            for idx in itertools.combinations(range(c.dim), k):
                basis = ct.basis_form(c, idx)
                lhs = tl.tangent_lift(tc, basis)
                rhs = ct.zero_form(tc.total, k)
                for m in range(k):
                    term = ct.function_form(tc.total, sx.ONE)
                    for pos, i in enumerate(idx):
                        factor_src = ct.dx(c, i)
                        if pos == m:
                            factor = tl.tangent_lift(tc, factor_src)
                        else:
                            factor = tl.vertical_lift(tc, factor_src)
                        term = ct.wedge(term, factor)
                    rhs = rhs + term
                n_run += 1
                if not ct.forms_equal(lhs, rhs).equal:
                    ok, detail = False, f"{idx} on {c.variables}"
                    break
    results.append(SuiteResult("lift_basis_expansion", ok, n_run, detail))

    # a_T = d tau(a) + tau(d a)
    ok, n_run, detail = True, 0, ""
    for _ in range(count):
        c = rng.choice(charts)
        tc = tangent(c)
        k = rng.randint(1, c.dim)
        a = random_form(rng, c, k)
        lhs = tl.tangent_lift(tc, a)
        rhs = ct.d(tl.tau(tc, a)) + tl.tau(tc, ct.d(a))
        n_run += 1
        if not ct.forms_equal(lhs, rhs).equal:
            ok, detail = False, f"degree {k} on {c.variables}"
            break
    results.append(SuiteResult("lift_homotopy_formula", ok, n_run, detail))

    # d(a_T) = (da)_T
    ok, n_run, detail = True, 0, ""
    for _ in range(count):
        c = rng.choice(charts)
        tc = tangent(c)
        k = rng.randint(0, c.dim - 1)
        a = random_form(rng, c, k)
        n_run += 1
        if not ct.forms_equal(ct.d(tl.tangent_lift(tc, a)),
                              tl.tangent_lift(tc, ct.d(a))).equal:
            ok, detail = False, f"degree {k} on {c.variables}"
            break
    results.append(SuiteResult("lift_commutes_with_d", ok, n_run, detail))

    # tau of a 2-form is the sharp pullback of the tautological 1-form
    ok, n_run, detail = True, 0, ""
    for _ in range(count):
        c = rng.choice(charts)
        tc = tangent(c)
        w = random_form(rng, c, 2)
        cc = tl.cotangent_chart(c)
        lhs = tl.tau(tc, w)
        rhs = ct.pullback(tl.form_sharp(w), tl.theta_can(cc))
        n_run += 1
        if not ct.forms_equal(lhs, rhs).equal:
            ok, detail = False, str(c.variables)
            break
    results.append(SuiteResult("tau_via_tautological_form", ok, n_run, detail))

    # w_T = -(sharp pullback of the canonical symplectic form) + tau(dw)
    ok, n_run, detail = True, 0, ""
    for _ in range(count):
        c = rng.choice(charts)
        tc = tangent(c)
        w = random_form(rng, c, 2)
        cc = tl.cotangent_chart(c)
        lhs = tl.tangent_lift(tc, w)
        rhs = -ct.pullback(tl.form_sharp(w), tl.omega_can(cc)) \
            + tl.tau(tc, ct.d(w))
        n_run += 1
        if not ct.forms_equal(lhs, rhs).equal:
            ok, detail = False, str(c.variables)
            break
    results.append(SuiteResult("lift_of_2form_canonical", ok, n_run, detail))

    # sharp-map route to the lift of a 2-form
    ok, n_run, detail = True, 0, ""
    for _ in range(count):
        c = rng.choice(charts)
        tc = tangent(c)
        w = random_form(rng, c, 2, coeff_degree=1)
        n_run += 1
        if not ct.forms_equal(tl.tangent_lift_via_sharp(tc, w),
                              tl.tangent_lift(tc, w)).equal:
            ok, detail = False, str(c.variables)
            break
    results.append(SuiteResult("lift_via_sharp_map", ok, n_run, detail))

    return results
