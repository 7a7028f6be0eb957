"""Built-in worked examples, their targeted mutations, and the desk-scale
groupoid-side checks: twisted Dirac frames and the pair groupoid.

Every positive entry passes the axiom, IM and morphism checks; every
mutation is built to break a known subset of the conditions, recorded in
the entry so the test suite can assert the exact failure signature.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import algebroid as alg
from . import cartan as ct
from . import imform as imf
from . import symexpr as sx
from . import tanlift as tl
from .algebroid import CaseResult, LieAlgebroid, tangent_algebroid_of_chart
from .cartan import Chart, ChartMap, KForm, VField, chart
from .imform import IM2FormData
from .symexpr import Expr, ONE, ZERO


def epsilon(i: int, j: int, k: int) -> int:
    """Levi-Civita symbol on three 0-based indices."""
    if len({i, j, k}) < 3:
        return 0
    sign = 1
    lst = [i, j, k]
    for a in range(3):
        for b in range(2):
            if lst[b] > lst[b + 1]:
                lst[b], lst[b + 1] = lst[b + 1], lst[b]
                sign = -sign
    return sign


# --- building blocks ------------------------------------------------------

def so3_structure() -> tuple:
    return tuple(tuple(tuple(sx.const(epsilon(a, b, c)) for c in range(3))
                       for b in range(3)) for a in range(3))


def so3_point_algebra() -> LieAlgebroid:
    """so(3) as a Lie algebra: zero-dimensional base, rank three."""
    return LieAlgebroid(chart(), 3, ((), (), ()), so3_structure())


def so3_koszul_algebroid() -> LieAlgebroid:
    """Cotangent algebroid of the linear so(3)-Poisson structure,
    in the coordinate-differential frame."""
    base = chart("x1", "x2", "x3")
    x = base.vars()
    rho = tuple(tuple(sx.add(*(sx.mul(sx.const(epsilon(a, j, k)), x[k])
                               for k in range(3))) for j in range(3))
                for a in range(3))
    return LieAlgebroid(base, 3, rho, so3_structure())


def graph_sigma(beta: KForm) -> tuple:
    """Rows of the bundle map obtained by contracting a 2-form with the
    coordinate fields."""
    n = beta.chart.dim
    return tuple(tuple(beta.coefficient((d, j)) for j in range(n))
                 for d in range(n))


def _shift_by_anchor_contraction(A: LieAlgebroid, sigma, b_form: KForm):
    """sigma + the contraction of a 2-form with the anchor images; this
    perturbation never disturbs the pairing antisymmetry."""
    rows = []
    for a in range(A.rank):
        extra = ct.i_x(A.anchor_field(a), b_form)
        rows.append(tuple(sx.add(sigma[a][j], extra.coeffs.get((j,), ZERO))
                          for j in range(A.dim)))
    return tuple(rows)


# --- the example corpus ---------------------------------------------------

@dataclass(frozen=True)
class IMEntry:
    """A named IM-check problem with its expected outcome.

    ``expect_ll_pass`` records whether the linear-linear bracket case
    holds; it can survive a broken second IM condition when the defect
    1-forms are closed."""

    name: str
    description: str
    data: IM2FormData
    expect_im1: bool
    expect_im2: bool
    expect_ll_pass: bool

    @property
    def positive(self) -> bool:
        return self.expect_im1 and self.expect_im2


def _tm_beta_r3() -> tuple[LieAlgebroid, KForm, tuple, KForm]:
    base = chart("x1", "x2", "x3")
    A = tangent_algebroid_of_chart(base)
    beta = KForm(base, 2, {(0, 2): sx.parse("x2")})
    phi = (-ct.d(beta)).simplified()
    return A, beta, graph_sigma(beta), phi


def _tm_beta_r2() -> tuple[LieAlgebroid, KForm, tuple, KForm]:
    base = chart("x1", "x2")
    A = tangent_algebroid_of_chart(base)
    beta = KForm(base, 2, {(0, 1): sx.parse("x1")})
    return A, beta, graph_sigma(beta), ct.zero_form(base, 3)


def builtin_examples() -> tuple[IMEntry, ...]:
    """Positive IM problems and the mutation corpus."""
    A3, beta3, sigma3, phi3 = _tm_beta_r3()
    A2, beta2, sigma2, phi2 = _tm_beta_r2()
    koszul = so3_koszul_algebroid()
    identity3 = tuple(tuple(ONE if i == j else ZERO for j in range(3))
                      for i in range(3))
    zero3 = ct.zero_form(koszul.base, 3)
    point = so3_point_algebra()

    entries = [
        IMEntry("tm_beta_r3",
                "tangent algebroid of R^3 with the contraction map of "
                "x2 dx1^dx3, twisted by minus its differential",
                IM2FormData(A3, sigma3, phi3), True, True, True),
        IMEntry("tm_beta_r2",
                "tangent algebroid of R^2 with the contraction map of "
                "x1 dx1^dx2 (closed, untwisted)",
                IM2FormData(A2, sigma2, phi2), True, True, True),
        IMEntry("so3_koszul",
                "cotangent algebroid of the so(3) Poisson structure with "
                "the identity bundle map",
                IM2FormData(koszul, identity3, zero3), True, True, True),
        IMEntry("so3_point",
                "so(3) over a point: zero anchor and zero bundle map",
                IM2FormData(point, ((), (), ()),
                            ct.zero_form(point.base, 3)), True, True, True),
    ]

    # mutations; each breaks a recorded subset of the conditions
    sig = [list(r) for r in sigma3]
    sig[0][0] = sx.add(sig[0][0], ONE)
    entries.append(IMEntry(
        "tm_beta_r3_im1",
        "symmetric constant added to one diagonal entry: breaks the "
        "pairing antisymmetry, keeps the bracket condition",
        IM2FormData(A3, tuple(tuple(r) for r in sig), phi3),
        False, True, True))

    sig = [list(r) for r in sigma2]
    sig[1][1] = sx.add(sig[1][1], ONE)
    entries.append(IMEntry(
        "tm_beta_r2_im1",
        "same diagonal perturbation on the surface example",
        IM2FormData(A2, tuple(tuple(r) for r in sig), phi2),
        False, True, True))

    entries.append(IMEntry(
        "tm_beta_r3_im2",
        "twisting form dropped: the bracket condition loses its "
        "constant-coefficient correction term",
        IM2FormData(A3, sigma3, ct.zero_form(A3.base, 3)),
        True, False, True))

    b_const = KForm(A3.base, 2, {(1, 2): sx.parse("x1")})  # non-closed shift
    entries.append(IMEntry(
        "tm_beta_r3_im2_shift",
        "anchor-contraction shift by x1 dx2^dx3: keeps the pairing "
        "antisymmetric, breaks the bracket condition by a constant form",
        IM2FormData(A3, _shift_by_anchor_contraction(A3, sigma3, b_const),
                    phi3), True, False, True))

    sig = [list(r) for r in identity3]
    sig[0] = [sx.mul(sx.const(2), c) for c in sig[0]]
    entries.append(IMEntry(
        "so3_koszul_im1",
        "one frame image scaled: breaks both conditions, with closed "
        "defect forms",
        IM2FormData(koszul, tuple(tuple(r) for r in sig), zero3),
        False, False, True))

    b_lin = KForm(koszul.base, 2, {(1, 2): sx.parse("x1")})
    entries.append(IMEntry(
        "so3_koszul_im2",
        "anchor-contraction shift by x1 dx2^dx3: pairing intact, bracket "
        "condition broken with non-closed defects, so the linear-linear "
        "case fails as well",
        IM2FormData(koszul, _shift_by_anchor_contraction(koszul, identity3,
                                                         b_lin), zero3),
        True, False, False))

    return tuple(entries)


@dataclass(frozen=True)
class AlgebroidEntry:
    name: str
    description: str
    algebroid: LieAlgebroid
    expect_axioms: bool


def builtin_algebroids() -> tuple[AlgebroidEntry, ...]:
    C_flip = [[[sx.const(epsilon(a, b, c)) for c in range(3)]
               for b in range(3)] for a in range(3)]
    C_flip[0][1][2] = sx.const(-1)
    flipped = LieAlgebroid(chart(), 3, ((), (), ()),
                           tuple(tuple(tuple(r) for r in p) for p in C_flip))
    C_jac = [[[sx.const(epsilon(a, b, c)) for c in range(3)]
              for b in range(3)] for a in range(3)]
    C_jac[0][1][0] = ONE
    C_jac[1][0][0] = sx.const(-1)
    jac_broken = LieAlgebroid(chart(), 3, ((), (), ()),
                              tuple(tuple(tuple(r) for r in p) for p in C_jac))
    return (
        AlgebroidEntry("tm_r2", "tangent algebroid of the plane",
                       tangent_algebroid_of_chart(chart("x1", "x2")), True),
        AlgebroidEntry("tm_r3", "tangent algebroid of R^3",
                       tangent_algebroid_of_chart(chart("x1", "x2", "x3")),
                       True),
        AlgebroidEntry("so3_point", "so(3) over a point",
                       so3_point_algebra(), True),
        AlgebroidEntry("so3_koszul", "Koszul algebroid of the so(3) "
                       "Poisson structure", so3_koszul_algebroid(), True),
        AlgebroidEntry("so3_point_flip", "one structure entry flipped "
                       "without its partner", flipped, False),
        AlgebroidEntry("so3_point_jacobi", "off-axis structure entry "
                       "added: antisymmetry survives, the Jacobi "
                       "identity does not", jac_broken, False),
    )


def find_entry(name: str):
    for entry in (builtin_examples() + builtin_algebroids()
                  + builtin_dirac_frames() + builtin_pair_groupoids()):
        if entry.name == name:
            return entry
    raise KeyError(f"no catalog entry named {name!r}")


def catalog_names() -> list[str]:
    return [e.name for e in (builtin_examples() + builtin_algebroids()
                             + builtin_dirac_frames()
                             + builtin_pair_groupoids())]


# --- twisted Dirac frames -------------------------------------------------

@dataclass(frozen=True)
class DiracFrame:
    """A frame of sections of the generalized tangent bundle: paired
    vector fields and 1-forms, with a closed twisting 3-form."""

    base: Chart
    fields: tuple[VField, ...]
    forms: tuple[KForm, ...]
    phi: KForm

    def __post_init__(self):
        n = self.base.dim
        if len(self.fields) != n or len(self.forms) != n:
            raise ValueError("a frame needs one section per base dimension")
        for x in self.fields:
            if x.chart != self.base:
                raise ValueError("frame field on the wrong chart")
        for a in self.forms:
            if a.chart != self.base or a.degree != 1:
                raise ValueError("frame forms must be 1-forms on the base")
        if self.phi.chart != self.base or self.phi.degree != 3:
            raise ValueError("the twisting form must be a 3-form on the base")
        if not ct.d(self.phi).is_zero():
            raise ValueError("the twisting 3-form must be closed")


def graph_frame(b_form: KForm, phi: Optional[KForm] = None) -> DiracFrame:
    """The frame of the graph of a 2-form over the coordinate fields."""
    base = b_form.chart
    fields = tuple(ct.coordinate_field(base, i) for i in range(base.dim))
    forms = tuple(ct.i_x(f, b_form) for f in fields)
    return DiracFrame(base, fields, forms,
                      phi if phi is not None else ct.zero_form(base, 3))


def courant_bracket(frame: DiracFrame, i: int, j: int) -> tuple[VField, KForm]:
    """Twisted bracket of two frame sections: the field bracket paired
    with the usual derivative terms plus the double contraction of the
    twisting form (ordering fixed so graphs twisted by minus the
    differential of their 2-form are involutive)."""
    x, a = frame.fields[i], frame.forms[i]
    y, b = frame.fields[j], frame.forms[j]
    form_part = ct.lie_derivative(x, b) - ct.i_x(y, ct.d(a)) \
        + ct.i_x(y, ct.i_x(x, frame.phi))
    return ct.field_bracket(x, y), form_part


def change_frame(frame: DiracFrame, matrix: Sequence[Sequence]) -> DiracFrame:
    """Recombine the sections by a constant invertible matrix."""
    n = frame.base.dim
    fields = []
    forms = []
    for i in range(n):
        f = VField(frame.base, (ZERO,) * n)
        a = ct.zero_form(frame.base, 1)
        for j in range(n):
            f = f + sx.const(matrix[i][j]) * frame.fields[j]
            a = a + sx.const(matrix[i][j]) * frame.forms[j]
        fields.append(f)
        forms.append(a)
    return DiracFrame(frame.base, tuple(fields), tuple(forms), frame.phi)


@dataclass(frozen=True)
class DiracReport:
    cases: tuple[CaseResult, ...]
    max_involutivity_residual: float
    max_im2_residual: float

    @property
    def accepted(self) -> bool:
        return all(c.passed for c in self.cases
                   if c.name in ("isotropy", "pointwise_rank", "involutivity"))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def case(self, name: str) -> CaseResult:
        for c in self.cases:
            if c.name == name:
                return c
        raise KeyError(name)


def dirac_to_im(frame: DiracFrame, samples: int = 100, tol: float = 1e-8,
                seed: int = sx.DEFAULT_SEED,
                box: tuple[float, float] = sx.DEFAULT_BOX) -> DiracReport:
    """Check the frame numerically: isotropy, pointwise rank, twisted
    involutivity (bracket stays in the span), and the induced
    IM-conditions for the projection to the form part."""
    n = frame.base.dim
    rng = random.Random(seed)

    # symbolic isotropy first: it is also the first IM condition
    iso_w = None
    for i in range(n):
        for j in range(i, n):
            defect = sx.add(ct.pair(frame.forms[i], frame.fields[j]),
                            ct.pair(frame.forms[j], frame.fields[i]))
            eq = sx.expr_equal(defect, ZERO)
            if not eq.equal:
                iso_w = {"pair": (i + 1, j + 1), "point": eq.witness,
                         "residual": eq.residual}
                break
        if iso_w:
            break
    isotropy = CaseResult("isotropy", iso_w is None, iso_w)

    points = [sx.sample_point(frame.base.variables, rng, box)
              for _ in range(samples)]

    def section_matrix(pt):
        cols = []
        for i in range(n):
            col = [sx.evaluate(c, pt) for c in frame.fields[i].components]
            col += [sx.evaluate(frame.forms[i].coeffs.get((j,), ZERO), pt)
                    for j in range(n)]
            cols.append(col)
        return np.array(cols, dtype=float).T  # 2n x n

    rank_w = None
    for pt in points:
        m = section_matrix(pt)
        if np.linalg.matrix_rank(m) < n:
            rank_w = {"point": pt}
            break
    rank_case = CaseResult("pointwise_rank", rank_w is None, rank_w)

    brackets = {(i, j): courant_bracket(frame, i, j)
                for i in range(n) for j in range(i + 1, n)}
    inv_w = None
    im2_w = None
    worst = 0.0
    worst_im2 = 0.0
    for pt in points:
        m = section_matrix(pt)
        for (i, j), (y, b) in brackets.items():
            vec = [sx.evaluate(c, pt) for c in y.components]
            vec += [sx.evaluate(b.coeffs.get((k,), ZERO), pt)
                    for k in range(n)]
            vec = np.array(vec, dtype=float)
            coeffs, *_ = np.linalg.lstsq(m, vec, rcond=None)
            resid = float(np.linalg.norm(m @ coeffs - vec))
            worst = max(worst, resid)
            if resid > tol and inv_w is None:
                inv_w = {"pair": (i + 1, j + 1), "point": pt,
                         "residual": resid}
            # the form part of the bracket against the span of the frame
            # forms with the same coefficients: the induced second IM
            # condition
            form_resid = float(np.linalg.norm(
                (m @ coeffs - vec)[n:]))
            worst_im2 = max(worst_im2, form_resid)
            if form_resid > tol and im2_w is None:
                im2_w = {"pair": (i + 1, j + 1), "point": pt,
                         "residual": form_resid}
    involutivity = CaseResult("involutivity", inv_w is None, inv_w)
    im1_case = CaseResult("induced_im1", isotropy.passed, iso_w)
    im2_case = CaseResult("induced_im2", im2_w is None, im2_w)

    return DiracReport((isotropy, rank_case, involutivity, im1_case,
                        im2_case), worst, worst_im2)


@dataclass(frozen=True)
class DiracEntry:
    name: str
    description: str
    frame: DiracFrame
    expect_accepted: bool


def builtin_dirac_frames() -> tuple[DiracEntry, ...]:
    base = chart("x1", "x2", "x3")
    closed_b = KForm(base, 2, {(0, 1): sx.parse("x1")})
    twisted_b = KForm(base, 2, {(0, 2): sx.parse("x2")})
    phi = (-ct.d(twisted_b)).simplified()

    bad = graph_frame(closed_b)
    bad_forms = list(bad.forms)
    bad_forms[0] = bad_forms[0] + ct.dx(base, 0)  # alpha_1(X_1) becomes 1
    not_isotropic = DiracFrame(base, bad.fields, tuple(bad_forms), bad.phi)

    non_involutive = graph_frame(twisted_b)  # missing its twisting form

    return (
        DiracEntry("dirac_graph_closed",
                   "graph of a closed 2-form, untwisted", graph_frame(closed_b),
                   True),
        DiracEntry("dirac_graph_twisted",
                   "graph of x2 dx1^dx3 twisted by minus its differential",
                   graph_frame(twisted_b, phi), True),
        DiracEntry("dirac_not_isotropic",
                   "first pairing broken: rejected by isotropy",
                   not_isotropic, False),
        DiracEntry("dirac_not_involutive",
                   "graph of a non-closed 2-form without its twisting form",
                   non_involutive, False),
    )


# --- the pair groupoid ----------------------------------------------------

@dataclass(frozen=True)
class PairGroupoidModel:
    """The pair groupoid of a chart: two copies of the base (left copy
    keeps the base names), a 2-form on the product, and the structure
    maps source (right), target (left), multiplication (outer copies)."""

    base: Chart
    right: tuple[str, ...]
    total: Chart
    omega: KForm

    def __post_init__(self):
        if self.omega.chart != self.total or self.omega.degree != 2:
            raise ValueError("omega must be a 2-form on the product chart")


def pair_groupoid(base: Chart, omega_builder) -> PairGroupoidModel:
    """Build the model; ``omega_builder`` receives the product chart and
    the two copy projections and returns the 2-form."""
    right = tl._fresh_names(base.variables, "y_")
    total = Chart(base.variables + right)
    pr1 = ChartMap(total, base, base.vars())
    pr2 = ChartMap(total, base, tuple(sx.Var(v) for v in right))
    omega = omega_builder(total, pr1, pr2)
    return PairGroupoidModel(base, right, total, omega)


def telescope_groupoid(beta: KForm, sign: int = -1) -> PairGroupoidModel:
    """The multiplicative form of a base 2-form: pullback along the first
    projection plus ``sign`` times the pullback along the second."""
    def build(total, pr1, pr2):
        return ct.pullback(pr1, beta) + sx.const(sign) * ct.pullback(pr2, beta)
    return pair_groupoid(beta.chart, build)


@dataclass(frozen=True)
class PairGroupoidReport:
    multiplicative: CaseResult
    relatively_closed: CaseResult
    relation: CaseResult
    sigma: tuple[tuple[Expr, ...], ...]
    phi: KForm
    lf_form: KForm

    @property
    def cases(self) -> tuple[CaseResult, ...]:
        return (self.multiplicative, self.relatively_closed, self.relation)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)


def _contract(form: KForm, vectors) -> Expr:
    out = form
    for comps in vectors:
        out = ct.i_x(VField(form.chart, tuple(comps)), out)
    return out.coeffs.get((), ZERO)


def pair_groupoid_check(model: PairGroupoidModel, mode: str = "symbolic",
                        **kw) -> PairGroupoidReport:
    """Run the groupoid-side verification chain: multiplicativity of the
    2-form, extraction of the bundle map along the units, recovery of the
    twisting form from the relative-closedness equation, and the identity
    tying the induced linear 2-form to those pieces."""
    base = model.base
    n = base.dim
    total = model.total

    # composable pairs carry three copies of the base
    mid = tl._fresh_names(base.variables + model.right, "z_")[:n]
    comp_chart = Chart(base.variables + model.right + mid)
    x_vars = base.vars()
    y_vars = tuple(sx.Var(v) for v in model.right)
    z_vars = tuple(sx.Var(v) for v in mid)
    mult = ChartMap(comp_chart, total, x_vars + z_vars)
    p1 = ChartMap(comp_chart, total, x_vars + y_vars)
    p2 = ChartMap(comp_chart, total, y_vars + z_vars)

    lhs = ct.pullback(mult, model.omega)
    rhs = ct.pullback(p1, model.omega) + ct.pullback(p2, model.omega)
    mult_res = ct.forms_equal(lhs, rhs, mode, **kw)
    mult_case = CaseResult("multiplicative", mult_res.equal,
                           mult_res.witness, mult_res.inconclusive)

    # bundle map along the units: pair a kernel vector of the source with
    # a diagonal vector
    diag_sub = dict(zip(model.right, x_vars))

    def unit_value(vectors) -> Expr:
        return sx.substitute(_contract(model.omega, vectors), diag_sub)

    def left_vec(i):
        return tuple(ONE if k == i else ZERO for k in range(2 * n))

    def diag_vec(i):
        return tuple(ONE if k in (i, n + i) else ZERO for k in range(2 * n))

    def right_vec(i):
        return tuple(ONE if k == n + i else ZERO for k in range(2 * n))

    sigma = tuple(tuple(sx.simplify(unit_value([left_vec(d), diag_vec(j)]))
                        for j in range(n)) for d in range(n))

    # twisting form from the source-kernel directions at units
    domega = ct.d(model.omega)
    phi_coeffs = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                val = sx.substitute(
                    _contract(domega, [right_vec(i), right_vec(j),
                                       right_vec(k)]), diag_sub)
                phi_coeffs[(i, j, k)] = sx.simplify(val)
    phi = KForm(base, 3, phi_coeffs)

    source = ChartMap(total, base, y_vars)
    target = ChartMap(total, base, x_vars)
    closed_res = ct.forms_equal(
        domega, ct.pullback(source, phi) - ct.pullback(target, phi),
        mode, **kw)
    closed_case = CaseResult("relatively_phi_closed", closed_res.equal,
                             closed_res.witness, closed_res.inconclusive)

    # induced 2-form on the algebroid side: pull the lift back along the
    # inclusion of the source-kernel at units
    tg = tl.tangent_chart(total)
    tm = tl.tangent_chart(base)
    omega_lift = tl.tangent_lift(tg, model.omega)
    iota = ChartMap(tm.total, tg.total,
                    x_vars + x_vars + tuple(sx.Var(f) for f in tm.fibres)
                    + (ZERO,) * n)
    lf_form = ct.pullback(iota, omega_lift).simplified()

    # compare with the linear 2-form built from the extracted pieces,
    # transported to the tangent chart
    A = tangent_algebroid_of_chart(base)
    lam = imf.lambda_form(A, sigma, phi)
    bc = alg.bundle_chart(base, "u", n)
    rename = ChartMap(tm.total, bc.total,
                      x_vars + tuple(sx.Var(f) for f in tm.fibres))
    relation_res = ct.forms_equal(lf_form, ct.pullback(rename, lam),
                                  mode, **kw)
    relation_case = CaseResult("lift_matches_linear_form", relation_res.equal,
                               relation_res.witness,
                               relation_res.inconclusive)

    return PairGroupoidReport(mult_case, closed_case, relation_case,
                              sigma, phi, lf_form)


@dataclass(frozen=True)
class PairGroupoidEntry:
    name: str
    description: str
    model: PairGroupoidModel
    expect_multiplicative: bool


def builtin_pair_groupoids() -> tuple[PairGroupoidEntry, ...]:
    base2 = chart("x1", "x2")
    beta2 = KForm(base2, 2, {(0, 1): sx.parse("x1")})
    base3 = chart("x1", "x2", "x3")
    beta3 = KForm(base3, 2, {(0, 2): sx.parse("x2")})
    return (
        PairGroupoidEntry("pair_r2", "difference form of x1 dx1^dx2 on the "
                          "plane pair groupoid",
                          telescope_groupoid(beta2), True),
        PairGroupoidEntry("pair_r3", "difference form of x2 dx1^dx3, "
                          "twisted case", telescope_groupoid(beta3), True),
        PairGroupoidEntry("pair_r2_mutated", "sum instead of difference: "
                          "not multiplicative",
                          telescope_groupoid(beta2, sign=1), False),
    )
