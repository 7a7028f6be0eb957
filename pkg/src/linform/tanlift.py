"""Tangent-bundle charts, lifts of differential forms, and the canonical
coordinate transforms between iterated (co)tangent bundles.

The complete lift is implemented once, as the Lie derivative of the
pullback along the bundle projection with respect to the Euler-type
field whose flow is fibre translation; the homotopy-formula and
sharp-map constructions are exposed separately so they can serve as
independent cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cartan as ct
from . import symexpr as sx
from .cartan import Chart, ChartMap, KForm, VField
from .symexpr import Expr, ZERO, ONE


def _fresh_names(base: tuple[str, ...], prefix: str) -> tuple[str, ...]:
    # prefix the base name; append underscores until the name is unused
    used = set(base)
    out = []
    for v in base:
        cand = prefix + v
        while cand in used:
            cand += "_"
        used.add(cand)
        out.append(cand)
    return tuple(out)


@dataclass(frozen=True)
class TangentChart:
    """Chart on TM induced by a chart on M: base names then fibre names."""

    base: Chart
    fibres: tuple[str, ...]
    total: Chart

    @property
    def dim(self) -> int:
        return self.total.dim

    def fibre_var(self, i: int) -> Expr:
        return sx.Var(self.fibres[i])


def tangent_chart(base: Chart) -> TangentChart:
    fibres = _fresh_names(base.variables, "d")
    return TangentChart(base, fibres, Chart(base.variables + fibres))


@dataclass(frozen=True)
class CotangentChart:
    """Chart on T*M: base names then momentum names."""

    base: Chart
    momenta: tuple[str, ...]
    total: Chart


def cotangent_chart(base: Chart) -> CotangentChart:
    momenta = _fresh_names(base.variables, "p_")
    return CotangentChart(base, momenta, Chart(base.variables + momenta))


def projection(tc: TangentChart) -> ChartMap:
    """The bundle projection TM -> M."""
    return ChartMap(tc.total, tc.base, tc.base.vars())


def euler_field(tc: TangentChart) -> VField:
    """The field with fibre coordinates as base components (its flow moves
    a point of M along the tangent vector the fibre encodes)."""
    n = tc.base.dim
    comps = [sx.Var(f) for f in tc.fibres] + [ZERO] * n
    return VField(tc.total, tuple(comps))


def vertical_lift(tc: TangentChart, a: KForm) -> KForm:
    """Pull a form on the base up to TM along the projection."""
    return ct.pullback(projection(tc), a)


def tau(tc: TangentChart, a: KForm) -> KForm:
    """Degree-lowering lift: at a tangent vector X, the projection
    pullback of the contraction of the form with X."""
    if a.degree < 1:
        raise ValueError("tau needs a form of degree >= 1")
    return ct.i_x(euler_field(tc), vertical_lift(tc, a))


def tangent_lift(tc: TangentChart, a: KForm) -> KForm:
    """Complete (tangent) lift of a form; degree is preserved."""
    return ct.lie_derivative(euler_field(tc), vertical_lift(tc, a))


def theta_can(cc: CotangentChart) -> KForm:
    """Tautological 1-form p_j dx^j on T*M."""
    n = cc.base.dim
    return KForm(cc.total, 1,
                 {(j,): sx.Var(cc.momenta[j]) for j in range(n)})


def omega_can(cc: CotangentChart) -> KForm:
    """Canonical symplectic form dx^j ^ dp_j on T*M."""
    n = cc.base.dim
    return KForm(cc.total, 2, {(j, n + j): ONE for j in range(n)})


# --- canonical coordinate transforms -------------------------------------

def canonical_involution(base: Chart) -> ChartMap:
    """The involution of T(TM) swapping the two middle coordinate blocks:
    (x, v, dx, dv) -> (x, dx, v, dv)."""
    tm = tangent_chart(base)
    ttm = tangent_chart(tm.total)
    n = base.dim
    v = ttm.total.vars()
    x, xdot, dx_, dxdot = v[:n], v[n:2 * n], v[2 * n:3 * n], v[3 * n:]
    return ChartMap(ttm.total, ttm.total, x + dx_ + xdot + dxdot)


def cotangent_flip(base: Chart) -> ChartMap:
    """The isomorphism T(T*M) -> T*(TM):
    (x, p, dx, dp) -> (x, dx, dp, p) in the induced coordinates."""
    cot = cotangent_chart(base)
    src = tangent_chart(cot.total)          # (x, p, dx, dp)
    tgt = cotangent_chart(tangent_chart(base).total)  # (x, dx, p_x, p_dx)
    n = base.dim
    v = src.total.vars()
    x, p, dx_, dp = v[:n], v[n:2 * n], v[2 * n:3 * n], v[3 * n:]
    return ChartMap(src.total, tgt.total, x + dx_ + dp + p)


def core_flip(total_dual_chart: Chart, rank: int) -> ChartMap:
    """Coordinate form of the pairing isomorphism on the tangent bundle of
    a dual bundle chart (x, xi): (x, xi, dx, dxi) -> (x, dxi, dx, xi)."""
    src = tangent_chart(total_dual_chart)
    n = total_dual_chart.dim - rank
    v = src.total.vars()
    x, xi = v[:n], v[n:n + rank]
    dx_, dxi = v[n + rank:2 * n + rank], v[2 * n + rank:]
    return ChartMap(src.total, src.total, x + dxi + dx_ + xi)


def tangent_map(f: ChartMap) -> ChartMap:
    """Tangent prolongation of a map between chart domains."""
    src_tc = tangent_chart(f.source)
    tgt_tc = tangent_chart(f.target)
    base_comps = list(f.components)
    fibre_comps = []
    for comp in f.components:
        fibre_comps.append(sx.add(*(
            sx.mul(sx.diff(comp, v), sx.Var(src_tc.fibres[j]))
            for j, v in enumerate(f.source.variables))))
    return ChartMap(src_tc.total, tgt_tc.total, tuple(base_comps + fibre_comps))


# --- sharp-map construction of the lift (2-forms) -------------------------

def form_sharp(a: KForm) -> ChartMap:
    """For a 2-form on M, the bundle map TM -> T*M contracting in the
    first slot: (x, v) -> (x, p) with p_j the dx^j-coefficient of the
    contraction."""
    if a.degree != 2:
        raise ValueError("form_sharp expects a 2-form")
    base = a.chart
    tc = tangent_chart(base)
    cc = cotangent_chart(base)
    n = base.dim
    momenta = []
    for j in range(n):
        momenta.append(sx.add(*(
            sx.mul(sx.Var(tc.fibres[i]), a.coefficient((i, j)))
            for i in range(n))))
    return ChartMap(tc.total, cc.total, base.vars() + tuple(momenta))


def tangent_lift_via_sharp(tc: TangentChart, a: KForm) -> KForm:
    """The lift of a 2-form reconstructed through the composite of the
    canonical involution, the tangent of the sharp map, and the
    tangent-to-cotangent flip.  Slow but independent of the Lie
    derivative implementation."""
    if a.degree != 2:
        raise ValueError("sharp-map construction is implemented for 2-forms")
    base = tc.base
    n = base.dim
    j_m = canonical_involution(base)
    t_sharp = tangent_map(form_sharp(a))
    theta = cotangent_flip(base)
    composite = ct.compose(theta, ct.compose(t_sharp, j_m))
    # composite: T(TM) -> T*(TM); momenta components are linear in the
    # outer fibre coordinates (dx_, dv); evaluate on coordinate directions
    ttm = tangent_chart(tc.total)
    outer = ttm.fibres                      # 2n names: delta-x then delta-v
    momenta = composite.components[2 * n:]  # p-components on T*(TM)
    dim = 2 * n

    def sharp_at(direction: int) -> list[Expr]:
        one_hot = {name: (ONE if k == direction else ZERO)
                   for k, name in enumerate(outer)}
        return [sx.substitute(p, one_hot) for p in momenta]

    coeffs = {}
    columns = [sharp_at(a_idx) for a_idx in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            coeffs[(i, j)] = columns[i][j]
    return KForm(tc.total, 2, coeffs)
