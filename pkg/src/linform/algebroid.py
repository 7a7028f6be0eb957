"""Lie algebroids given by structure functions, their axioms, and the
induced algebroid structures on the tangent and cotangent prolongations.

Conventions: the anchor sends the a-th frame section to the field with
components ``anchor[a][j]``; ``structure[a][b][c]`` is the coefficient of
the c-th frame section in the bracket of the a-th with the b-th.  The
prolongation brackets are defined on two families of generators and
extended to arbitrary sections by the Leibniz rule, which is forced by
the axioms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from . import cartan as ct
from . import symexpr as sx
from . import tanlift as tl
from .cartan import Chart, KForm, VField
from .symexpr import Expr, ZERO, ONE, as_expr


def _indexed_names(prefix: str, count: int, used: set[str]) -> tuple[str, ...]:
    out = []
    for i in range(count):
        cand = f"{prefix}{i + 1}"
        while cand in used:
            cand += "_"
        used.add(cand)
        out.append(cand)
    return tuple(out)


@dataclass(frozen=True)
class BundleChart:
    """Chart on the total space of a vector bundle: base then fibre names."""

    base: Chart
    fibres: tuple[str, ...]
    total: Chart


def bundle_chart(base: Chart, prefix: str, rank: int) -> BundleChart:
    fibres = _indexed_names(prefix, rank, set(base.variables))
    return BundleChart(base, fibres, Chart(base.variables + fibres))


@dataclass(frozen=True)
class LieAlgebroid:
    """A Lie algebroid in a frame: anchor components and structure functions."""

    base: Chart
    rank: int
    anchor: tuple[tuple[Expr, ...], ...]
    structure: tuple[tuple[tuple[Expr, ...], ...], ...]

    def __post_init__(self):
        n, r = self.base.dim, self.rank
        anchor = tuple(tuple(as_expr(c) for c in row) for row in self.anchor)
        structure = tuple(tuple(tuple(as_expr(c) for c in row)
                                for row in plane) for plane in self.structure)
        if len(anchor) != r or any(len(row) != n for row in anchor):
            raise ValueError(f"anchor must be {r} x {n}")
        if (len(structure) != r or any(len(p) != r for p in structure)
                or any(len(row) != r for p in structure for row in p)):
            raise ValueError(f"structure functions must be {r} x {r} x {r}")
        allowed = set(self.base.variables)
        for e in [c for row in anchor for c in row] + \
                 [c for p in structure for row in p for c in row]:
            bad = sx.free_vars(e) - allowed
            if bad:
                raise ValueError(f"non-base variables {sorted(bad)} in algebroid data")
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "structure", structure)

    @property
    def dim(self) -> int:
        return self.base.dim

    def anchor_field(self, a: int) -> VField:
        return VField(self.base, self.anchor[a])

    def section(self, components: Sequence) -> "Section":
        return Section(self, tuple(components))

    def basis_section(self, a: int) -> "Section":
        return Section(self, tuple(ONE if i == a else ZERO
                                   for i in range(self.rank)))


def tangent_algebroid_of_chart(base: Chart) -> LieAlgebroid:
    """TM as a Lie algebroid in the coordinate frame: identity anchor,
    vanishing structure functions."""
    n = base.dim
    anchor = tuple(tuple(ONE if i == j else ZERO for j in range(n))
                   for i in range(n))
    structure = tuple(tuple(tuple(ZERO for _ in range(n))
                            for _ in range(n)) for _ in range(n))
    return LieAlgebroid(base, n, anchor, structure)


@dataclass(frozen=True)
class Section:
    algebroid: LieAlgebroid
    components: tuple[Expr, ...]

    def __post_init__(self):
        comps = tuple(as_expr(c) for c in self.components)
        if len(comps) != self.algebroid.rank:
            raise ValueError("component count must equal the rank")
        object.__setattr__(self, "components", comps)

    def anchor_image(self) -> VField:
        A = self.algebroid
        comps = [sx.add(*(sx.mul(self.components[a], A.anchor[a][j])
                          for a in range(A.rank))) for j in range(A.dim)]
        return VField(A.base, tuple(comps))

    def __rmul__(self, scalar) -> "Section":
        s = as_expr(scalar)
        return Section(self.algebroid,
                       tuple(sx.mul(s, c) for c in self.components))

    def __add__(self, other: "Section") -> "Section":
        return Section(self.algebroid,
                       tuple(sx.add(a, b) for a, b in
                             zip(self.components, other.components)))


def bracket(u: Section, v: Section) -> Section:
    """Frame bracket extended to arbitrary sections by the Leibniz rule."""
    if u.algebroid is not v.algebroid and u.algebroid != v.algebroid:
        raise ValueError("sections of different algebroids")
    A = u.algebroid
    r, n = A.rank, A.dim
    xs = A.base.variables
    comps = []
    for c in range(r):
        terms = []
        for a in range(r):
            for b in range(r):
                terms.append(sx.mul(u.components[a], v.components[b],
                                    A.structure[a][b][c]))
        for a in range(r):
            for k in range(n):
                terms.append(sx.mul(A.anchor[a][k], u.components[a],
                                    sx.diff(v.components[c], xs[k])))
                terms.append(sx.neg(sx.mul(A.anchor[a][k], v.components[a],
                                           sx.diff(u.components[c], xs[k]))))
        comps.append(sx.add(*terms))
    return Section(A, tuple(comps))


# --- axiom checking -------------------------------------------------------

@dataclass(frozen=True)
class CaseResult:
    name: str
    passed: bool
    witness: Optional[dict] = None
    inconclusive: bool = False


@dataclass(frozen=True)
class AxiomReport:
    cases: tuple[CaseResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def inconclusive(self) -> bool:
        return any(c.inconclusive for c in self.cases)

    def case(self, name: str) -> CaseResult:
        for c in self.cases:
            if c.name == name:
                return c
        raise KeyError(name)


def _first_failure(checks, mode, **kw):
    """Run (label, lhs, rhs) triples; return (witness, inconclusive) of the
    first failing one, or (None, False)."""
    for label, lhs, rhs in checks:
        eq = sx.expr_equal(lhs, rhs, mode, **kw)
        if not eq.equal:
            return {"case": label, "point": eq.witness,
                    "residual": eq.residual}, eq.inconclusive
    return None, False


def check_axioms(A: LieAlgebroid, mode: str = "symbolic", **kw) -> AxiomReport:
    """Verify antisymmetry, anchor compatibility and the Jacobi identity
    of the structure data; failures carry an index witness."""
    r, n = A.rank, A.dim
    xs = A.base.variables
    C, rho = A.structure, A.anchor

    antisym = []
    for a in range(r):
        for b in range(a, r):
            for c in range(r):
                antisym.append((f"C[{a+1},{b+1}]^{c+1} + C[{b+1},{a+1}]^{c+1}",
                                sx.add(C[a][b][c], C[b][a][c]), ZERO))

    compat = []
    for a in range(r):
        for b in range(a + 1, r):
            for j in range(n):
                lhs = sx.add(*(sx.mul(rho[c][j], C[a][b][c]) for c in range(r)))
                rhs = sx.add(*(sx.sub(sx.mul(rho[a][k], sx.diff(rho[b][j], xs[k])),
                                      sx.mul(rho[b][k], sx.diff(rho[a][j], xs[k])))
                               for k in range(n)))
                compat.append((f"anchor[a={a+1},b={b+1},j={j+1}]", lhs, rhs))

    # brute force over all r^3 index triples: with antisymmetry broken the
    # repeated-index triples are the ones that expose Jacobi failures
    jacobi = []
    for a in range(r):
        for b in range(r):
            for c in range(r):
                for e in range(r):
                    terms = []
                    for (p, q, s) in ((a, b, c), (b, c, a), (c, a, b)):
                        for d_ in range(r):
                            terms.append(sx.mul(C[p][d_][e], C[q][s][d_]))
                        for k in range(n):
                            terms.append(sx.mul(rho[p][k],
                                                sx.diff(C[q][s][e], xs[k])))
                    jacobi.append((f"jacobi[a={a+1},b={b+1},c={c+1},e={e+1}]",
                                   sx.add(*terms), ZERO))

    cases = []
    for name, checks in (("antisymmetry", antisym),
                         ("anchor_compatibility", compat),
                         ("jacobi", jacobi)):
        witness, inconclusive = _first_failure(checks, mode, **kw)
        cases.append(CaseResult(name, witness is None, witness, inconclusive))
    return AxiomReport(tuple(cases))


# --- prolongation algebroids ----------------------------------------------
# Sections of the prolongations are coefficient combinations of two
# generator families; coefficients are functions on the host base chart.

@dataclass(frozen=True)
class ProlongSection:
    host: "Prolongation"
    linear: tuple[Expr, ...]
    core: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "linear",
                           tuple(as_expr(c) for c in self.linear))
        object.__setattr__(self, "core",
                           tuple(as_expr(c) for c in self.core))
        if len(self.linear) != self.host.linear_count:
            raise ValueError("wrong number of linear-generator coefficients")
        if len(self.core) != self.host.core_count:
            raise ValueError("wrong number of core-generator coefficients")

    def validate(self) -> "ProlongSection":
        """Check the coefficient variables against the host chart (used at
        construction boundaries; arithmetic cannot introduce new names)."""
        allowed = set(self.host.chart.variables)
        for c in self.linear + self.core:
            bad = sx.free_vars(c) - allowed
            if bad:
                raise ValueError(f"coefficients use non-host variables {sorted(bad)}")
        return self

    def __add__(self, other: "ProlongSection") -> "ProlongSection":
        return ProlongSection(self.host,
                              tuple(sx.add(a, b) for a, b in
                                    zip(self.linear, other.linear)),
                              tuple(sx.add(a, b) for a, b in
                                    zip(self.core, other.core)))

    def __sub__(self, other: "ProlongSection") -> "ProlongSection":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "ProlongSection":
        s = as_expr(scalar)
        return ProlongSection(self.host,
                              tuple(sx.mul(s, c) for c in self.linear),
                              tuple(sx.mul(s, c) for c in self.core))

    def terms(self):
        for i, c in enumerate(self.linear):
            if not (isinstance(c, sx.Const) and c.value == 0):
                yield ("linear", i, c)
        for i, c in enumerate(self.core):
            if not (isinstance(c, sx.Const) and c.value == 0):
                yield ("core", i, c)

    def map_coeffs(self, f) -> "ProlongSection":
        return ProlongSection(self.host, tuple(f(c) for c in self.linear),
                              tuple(f(c) for c in self.core))


class Prolongation:
    """Shared bracket/anchor extension machinery for the two prolongations.

    Subclasses provide ``chart``, ``linear_count``, ``core_count``, the
    generator anchor/bracket tables and generator names.
    """

    def zero_section(self) -> ProlongSection:
        return ProlongSection(self, (ZERO,) * self.linear_count,
                              (ZERO,) * self.core_count)

    def generator(self, kind: str, i: int) -> ProlongSection:
        lin = [ZERO] * self.linear_count
        core = [ZERO] * self.core_count
        if kind == "linear":
            lin[i] = ONE
        elif kind == "core":
            core[i] = ONE
        else:
            raise ValueError(f"unknown generator kind {kind!r}")
        return ProlongSection(self, tuple(lin), tuple(core))

    def generator_name(self, kind: str, i: int) -> str:
        raise NotImplementedError

    def gen_anchor(self, kind: str, i: int) -> VField:
        raise NotImplementedError

    def gen_bracket(self, k1: str, i1: int, k2: str, i2: int) -> ProlongSection:
        raise NotImplementedError

    def _cached(self, table: str, key, build):
        caches = self.__dict__.setdefault("_tables", {})
        store = caches.setdefault(table, {})
        if key not in store:
            store[key] = build()
        return store[key]

    def anchor_of(self, kind: str, i: int) -> VField:
        return self._cached("anchor", (kind, i),
                            lambda: self.gen_anchor(kind, i))

    def bracket_of(self, k1: str, i1: int, k2: str, i2: int) -> ProlongSection:
        return self._cached("bracket", (k1, i1, k2, i2),
                            lambda: self.gen_bracket(k1, i1, k2, i2))

    def anchor(self, u: ProlongSection) -> VField:
        out = VField(self.chart, (ZERO,) * self.chart.dim)
        for kind, i, coeff in u.terms():
            out = out + coeff * self.anchor_of(kind, i)
        return out

    def bracket(self, u: ProlongSection, v: ProlongSection) -> ProlongSection:
        out = self.zero_section()
        for k1, i1, f in u.terms():
            rho_x = self.anchor_of(k1, i1)
            for k2, i2, g in v.terms():
                out = out + sx.mul(f, g) * self.bracket_of(k1, i1, k2, i2)
                out = out + sx.mul(f, rho_x.apply(g)) * self.generator(k2, i2)
                out = out - sx.mul(g, self.anchor_of(k2, i2).apply(f)) \
                    * self.generator(k1, i1)
        # collect coefficients so nested brackets stay small
        return out.map_coeffs(sx.simplify)


@dataclass(frozen=True)
class TangentProlongation(Prolongation):
    """The induced algebroid on TA over TM.

    Linear generators are the tangent prolongations of the frame
    sections; core generators translate along the fibre directions."""

    algebroid: LieAlgebroid
    tm: tl.TangentChart

    @property
    def chart(self) -> Chart:
        return self.tm.total

    @property
    def linear_count(self) -> int:
        return self.algebroid.rank

    @property
    def core_count(self) -> int:
        return self.algebroid.rank

    def generator_name(self, kind: str, i: int) -> str:
        return f"T(e_{i+1})" if kind == "linear" else f"hat(e_{i+1})"

    def _ddot(self, f: Expr) -> Expr:
        # derivative of a base function paired with the fibre coordinates
        xs = self.algebroid.base.variables
        return sx.add(*(sx.mul(sx.diff(f, v), self.tm.fibre_var(k))
                        for k, v in enumerate(xs)))

    def gen_anchor(self, kind: str, i: int) -> VField:
        A = self.algebroid
        n = A.dim
        if kind == "core":
            comps = [ZERO] * n + list(A.anchor[i])
        else:
            comps = list(A.anchor[i]) + [self._ddot(c) for c in A.anchor[i]]
        return VField(self.chart, tuple(comps))

    def gen_bracket(self, k1, i1, k2, i2) -> ProlongSection:
        A = self.algebroid
        r = A.rank
        if k1 == "core" and k2 == "core":
            return self.zero_section()
        if k1 == "linear" and k2 == "core":
            core = tuple(A.structure[i1][i2][c] for c in range(r))
            return ProlongSection(self, (ZERO,) * r, core)
        if k1 == "core" and k2 == "linear":
            return (-1) * self.gen_bracket("linear", i2, "core", i1)
        lin = tuple(A.structure[i1][i2][c] for c in range(r))
        core = tuple(self._ddot(A.structure[i1][i2][c]) for c in range(r))
        return ProlongSection(self, lin, core)


@dataclass(frozen=True)
class CotangentProlongation(Prolongation):
    """The induced algebroid on T*A over the dual bundle.

    Linear generators come from frame sections; core generators from the
    base coordinate differentials."""

    algebroid: LieAlgebroid
    dual: BundleChart

    @property
    def chart(self) -> Chart:
        return self.dual.total

    @property
    def linear_count(self) -> int:
        return self.algebroid.rank

    @property
    def core_count(self) -> int:
        return self.algebroid.dim

    def generator_name(self, kind: str, i: int) -> str:
        return f"L(e_{i+1})" if kind == "linear" else f"hat(dx_{i+1})"

    def gen_anchor(self, kind: str, i: int) -> VField:
        A = self.algebroid
        n, r = A.dim, A.rank
        if kind == "core":
            comps = [ZERO] * n + [A.anchor[a][i] for a in range(r)]
        else:
            xi = [sx.Var(v) for v in self.dual.fibres]
            comps = list(A.anchor[i]) + [
                sx.add(*(sx.mul(A.structure[i][b][c], xi[c]) for c in range(r)))
                for b in range(r)]
        return VField(self.chart, tuple(comps))

    def gen_bracket(self, k1, i1, k2, i2) -> ProlongSection:
        A = self.algebroid
        n, r = A.dim, A.rank
        xs = A.base.variables
        if k1 == "core" and k2 == "core":
            return self.zero_section()
        if k1 == "linear" and k2 == "core":
            core = tuple(sx.diff(A.anchor[i1][i2], xs[k]) for k in range(n))
            return ProlongSection(self, (ZERO,) * r, core)
        if k1 == "core" and k2 == "linear":
            return (-1) * self.gen_bracket("linear", i2, "core", i1)
        xi = [sx.Var(v) for v in self.dual.fibres]
        lin = tuple(A.structure[i1][i2][c] for c in range(r))
        core = tuple(sx.neg(sx.add(*(sx.mul(sx.diff(A.structure[i1][i2][c], xs[k]),
                                            xi[c]) for c in range(r))))
                     for k in range(n))
        return ProlongSection(self, lin, core)


def tangent_prolongation(A: LieAlgebroid) -> TangentProlongation:
    return TangentProlongation(A, tl.tangent_chart(A.base))


def cotangent_prolongation(A: LieAlgebroid) -> CotangentProlongation:
    return CotangentProlongation(A, bundle_chart(A.base, "xi", A.rank))


def sections_equal(u: ProlongSection, v: ProlongSection,
                   mode: str = "symbolic", **kw):
    checks = []
    for kind, comps_u, comps_v in (("linear", u.linear, v.linear),
                                   ("core", u.core, v.core)):
        for i, (a, b) in enumerate(zip(comps_u, comps_v)):
            checks.append((u.host.generator_name(kind, i), a, b))
    return _first_failure(checks, mode, **kw)


def check_prolongation_axioms(prol: Prolongation, mode: str = "symbolic",
                              **kw) -> AxiomReport:
    """Antisymmetry, anchor compatibility and Jacobi for the generator
    relations, via the Leibniz-extended bracket."""
    gens = [("linear", i) for i in range(prol.linear_count)] + \
           [("core", i) for i in range(prol.core_count)]
    zero = prol.zero_section()

    antisym_w, antisym_inc = None, False
    compat_w, compat_inc = None, False
    for gi in gens:
        for gj in gens:
            x = prol.generator(*gi)
            y = prol.generator(*gj)
            br = prol.bracket(x, y)
            w, inc = sections_equal(br + prol.bracket(y, x), zero, mode, **kw)
            if w and not antisym_w:
                w["pair"] = (prol.generator_name(*gi), prol.generator_name(*gj))
                antisym_w, antisym_inc = w, inc
            lhs = prol.anchor(br)
            rhs = ct.field_bracket(prol.anchor(x), prol.anchor(y))
            res = ct.fields_equal(lhs, rhs, mode, **kw)
            if not res.equal and not compat_w:
                compat_w = {"pair": (prol.generator_name(*gi),
                                     prol.generator_name(*gj)),
                            "witness": res.witness}
                compat_inc = res.inconclusive

    jacobi_w, jacobi_inc = None, False
    for ii in range(len(gens)):
        for jj in range(ii + 1, len(gens)):
            for kk in range(jj + 1, len(gens)):
                x, y, z = (prol.generator(*gens[ii]), prol.generator(*gens[jj]),
                           prol.generator(*gens[kk]))
                total = prol.bracket(prol.bracket(x, y), z) \
                    + prol.bracket(prol.bracket(y, z), x) \
                    + prol.bracket(prol.bracket(z, x), y)
                w, inc = sections_equal(total, zero, mode, **kw)
                if w:
                    w["triple"] = tuple(prol.generator_name(*gens[t])
                                        for t in (ii, jj, kk))
                    jacobi_w, jacobi_inc = w, inc
                    break
            if jacobi_w:
                break
        if jacobi_w:
            break

    return AxiomReport((
        CaseResult("antisymmetry", antisym_w is None, antisym_w, antisym_inc),
        CaseResult("anchor_compatibility", compat_w is None, compat_w, compat_inc),
        CaseResult("jacobi", jacobi_w is None, jacobi_w, jacobi_inc),
    ))


def random_prolong_section(prol: Prolongation, rng: random.Random,
                           terms: int = 2) -> ProlongSection:
    """Sparse random section: a few generators with affine coefficients.
    Non-constant coefficients keep the Leibniz terms of the extended
    bracket in play."""
    def rand_coeff():
        v = rng.choice(prol.chart.variables)
        return sx.add(sx.const(rng.randint(-2, 2)),
                      sx.mul(sx.const(rng.randint(-2, 2)), sx.Var(v)))

    lin = [ZERO] * prol.linear_count
    core = [ZERO] * prol.core_count
    slots = [("linear", i) for i in range(prol.linear_count)] + \
            [("core", i) for i in range(prol.core_count)]
    for kind, i in rng.sample(slots, min(terms, len(slots))):
        if kind == "linear":
            lin[i] = rand_coeff()
        else:
            core[i] = rand_coeff()
    return ProlongSection(prol, tuple(lin), tuple(core))


def jacobi_residual_at(prol: Prolongation, u: ProlongSection,
                       v: ProlongSection, w: ProlongSection,
                       point: dict[str, float]) -> float:
    """Largest component of the Jacobiator of three sections at a point."""
    total = prol.bracket(prol.bracket(u, v), w) \
        + prol.bracket(prol.bracket(v, w), u) \
        + prol.bracket(prol.bracket(w, u), v)
    return max(abs(sx.evaluate(c, point))
               for c in total.linear + total.core)
