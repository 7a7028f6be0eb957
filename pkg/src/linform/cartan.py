"""Coordinate exterior calculus on a chart.

Differential k-forms are stored on strictly increasing index tuples, so
every coefficient appears exactly once and comparisons are exact.  All
values are immutable; operations return new objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from . import symexpr as sx
from .symexpr import Expr, ZERO, ONE, as_expr


@dataclass(frozen=True)
class Chart:
    """An ordered tuple of coordinate names on one chart domain."""

    variables: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"chart variables must be distinct: {self.variables}")

    @property
    def dim(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def vars(self) -> tuple[sx.Var, ...]:
        return tuple(sx.Var(v) for v in self.variables)


def chart(*names: str) -> Chart:
    return Chart(tuple(names))


@dataclass(frozen=True)
class KForm:
    """A differential k-form; ``coeffs`` maps increasing index tuples to
    coefficient expressions.  A 0-form is the single entry at ``()``."""

    chart: Chart
    degree: int
    coeffs: Mapping[tuple[int, ...], Expr] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.degree:
            raise ValueError("degree must be >= 0")
        clean = {}
        for idx, c in self.coeffs.items():
            idx = tuple(idx)
            if len(idx) != self.degree:
                raise ValueError(f"index tuple {idx} has wrong length for degree {self.degree}")
            if any(i < 0 or i >= self.chart.dim for i in idx):
                raise ValueError(f"index out of range in {idx}")
            if any(idx[i] >= idx[i + 1] for i in range(len(idx) - 1)):
                raise ValueError(f"indices must be strictly increasing: {idx}")
            c = as_expr(c)
            if not _is_zero_const(c):
                clean[idx] = c
        object.__setattr__(self, "coeffs", clean)

    def coefficient(self, indices: Sequence[int]) -> Expr:
        """Antisymmetric coefficient for an arbitrary index tuple."""
        idx = tuple(indices)
        if len(set(idx)) != len(idx):
            return ZERO
        sign, sorted_idx = _sort_sign(idx)
        c = self.coeffs.get(sorted_idx, ZERO)
        return c if sign == 1 else sx.neg(c)

    def is_zero(self) -> bool:
        return all(sx.is_zero(c) for c in self.coeffs.values())

    def simplified(self) -> "KForm":
        return KForm(self.chart, self.degree,
                     {i: sx.simplify(c) for i, c in self.coeffs.items()})

    def map_coeffs(self, f) -> "KForm":
        return KForm(self.chart, self.degree,
                     {i: f(c) for i, c in self.coeffs.items()})

    def __add__(self, other: "KForm") -> "KForm":
        _check_same(self, other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = sx.add(out.get(i, ZERO), c)
        return KForm(self.chart, self.degree, out)

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __neg__(self) -> "KForm":
        return self.map_coeffs(sx.neg)

    def __rmul__(self, scalar) -> "KForm":
        s = as_expr(scalar)
        return self.map_coeffs(lambda c: sx.mul(s, c))

    def __str__(self) -> str:
        return form_to_string(self)


def _is_zero_const(e: Expr) -> bool:
    return isinstance(e, sx.Const) and e.value == 0


def _check_same(a: KForm, b: KForm):
    if a.chart != b.chart:
        raise ValueError("forms live on different charts")
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} != {b.degree}")


def _sort_sign(idx: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    # insertion sort, counting swaps
    lst = list(idx)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(lst)


def zero_form(c: Chart, degree: int) -> KForm:
    return KForm(c, degree, {})


def function_form(c: Chart, f) -> KForm:
    return KForm(c, 0, {(): as_expr(f)})


def dx(c: Chart, i: int) -> KForm:
    """The basis covector of the i-th coordinate (0-based)."""
    return KForm(c, 1, {(i,): ONE})


def basis_form(c: Chart, indices: Sequence[int], coefficient=ONE) -> KForm:
    sign, idx = _sort_sign(tuple(indices))
    if len(set(idx)) != len(idx):
        return zero_form(c, len(idx))
    coeff = as_expr(coefficient)
    return KForm(c, len(idx), {idx: coeff if sign == 1 else sx.neg(coeff)})


@dataclass(frozen=True)
class VField:
    """A vector field with one component expression per chart variable."""

    chart: Chart
    components: tuple[Expr, ...]

    def __post_init__(self):
        comps = tuple(as_expr(c) for c in self.components)
        if len(comps) != self.chart.dim:
            raise ValueError("component count must equal chart dimension")
        object.__setattr__(self, "components", comps)

    def apply(self, f: Expr) -> Expr:
        """Directional derivative of a scalar function."""
        return sx.add(*(sx.mul(c, sx.diff(f, v))
                        for c, v in zip(self.components, self.chart.variables)))

    def __add__(self, other: "VField") -> "VField":
        if self.chart != other.chart:
            raise ValueError("fields live on different charts")
        return VField(self.chart, tuple(sx.add(a, b) for a, b in
                                        zip(self.components, other.components)))

    def __neg__(self) -> "VField":
        return VField(self.chart, tuple(sx.neg(c) for c in self.components))

    def __rmul__(self, scalar) -> "VField":
        s = as_expr(scalar)
        return VField(self.chart, tuple(sx.mul(s, c) for c in self.components))


def coordinate_field(c: Chart, i: int) -> VField:
    return VField(c, tuple(ONE if j == i else ZERO for j in range(c.dim)))


@dataclass(frozen=True)
class ChartMap:
    """A smooth map between chart domains: one source-variable expression
    per target variable."""

    source: Chart
    target: Chart
    components: tuple[Expr, ...]

    def __post_init__(self):
        comps = tuple(as_expr(c) for c in self.components)
        if len(comps) != self.target.dim:
            raise ValueError("need one component per target variable")
        allowed = set(self.source.variables)
        for c in comps:
            bad = sx.free_vars(c) - allowed
            if bad:
                raise ValueError(f"component uses non-source variables {sorted(bad)}")
        object.__setattr__(self, "components", comps)

    def substitution(self) -> dict[str, Expr]:
        return dict(zip(self.target.variables, self.components))

    def apply_scalar(self, f: Expr) -> Expr:
        """Pull a function on the target back to the source."""
        return sx.substitute(f, self.substitution())

    def __call__(self, point: Mapping[str, float]) -> dict[str, float]:
        return {v: sx.evaluate(c, point)
                for v, c in zip(self.target.variables, self.components)}


def identity_map(c: Chart) -> ChartMap:
    return ChartMap(c, c, c.vars())


def compose(g: ChartMap, f: ChartMap) -> ChartMap:
    """The composite g after f (so ``compose(g, f)`` maps x to g(f(x)))."""
    if f.target != g.source:
        raise ValueError("charts do not compose")
    sub = f.substitution()
    return ChartMap(f.source, g.target,
                    tuple(sx.substitute(c, sub) for c in g.components))


# --- calculus operations -------------------------------------------------

def wedge(a: KForm, b: KForm) -> KForm:
    """Graded-commutative exterior product."""
    if a.chart != b.chart:
        raise ValueError("forms live on different charts")
    degree = a.degree + b.degree
    if degree > a.chart.dim:
        # degree overflow: identically zero (kept at the overflowing degree)
        return zero_form(a.chart, degree)
    out: dict[tuple[int, ...], Expr] = {}
    for ia, ca in a.coeffs.items():
        sa = set(ia)
        for ib, cb in b.coeffs.items():
            if sa & set(ib):
                continue
            sign, idx = _sort_sign(ia + ib)
            term = sx.mul(ca, cb) if sign == 1 else sx.neg(sx.mul(ca, cb))
            out[idx] = sx.add(out.get(idx, ZERO), term)
    return KForm(a.chart, degree, out)


def d(a: KForm) -> KForm:
    """Exterior derivative."""
    c = a.chart
    out: dict[tuple[int, ...], Expr] = {}
    for idx, coeff in a.coeffs.items():
        present = set(idx)
        for j, v in enumerate(c.variables):
            if j in present:
                continue
            dc = sx.diff(coeff, v)
            if _is_zero_const(dc):
                continue
            pos = sum(1 for i in idx if i < j)
            new_idx = tuple(sorted(idx + (j,)))
            term = dc if pos % 2 == 0 else sx.neg(dc)
            out[new_idx] = sx.add(out.get(new_idx, ZERO), term)
    return KForm(c, a.degree + 1, out)


def i_x(x: VField, a: KForm) -> KForm:
    """Interior product (contraction in the first slot)."""
    if x.chart != a.chart:
        raise ValueError("field and form live on different charts")
    if a.degree == 0:
        raise ValueError("cannot contract a 0-form")
    out: dict[tuple[int, ...], Expr] = {}
    for idx, coeff in a.coeffs.items():
        for m, i in enumerate(idx):
            comp = x.components[i]
            if _is_zero_const(comp):
                continue
            rest = idx[:m] + idx[m + 1:]
            term = sx.mul(comp, coeff)
            if m % 2 == 1:
                term = sx.neg(term)
            out[rest] = sx.add(out.get(rest, ZERO), term)
    return KForm(a.chart, a.degree - 1, out)


def lie_derivative(x: VField, a: KForm) -> KForm:
    """Lie derivative along a field, via the Cartan homotopy formula."""
    if a.degree == 0:
        return i_x(x, d(a))
    return i_x(x, d(a)) + d(i_x(x, a))


def pullback(f: ChartMap, a: KForm) -> KForm:
    """Pull a form on the target chart back along the map."""
    if a.chart != f.target:
        raise ValueError("form does not live on the map's target chart")
    src = f.source
    if a.degree == 0:
        return function_form(src, f.apply_scalar(a.coeffs.get((), ZERO)))
    # differentials of the components, as 1-forms on the source
    dcomp = [d(function_form(src, comp)) for comp in f.components]
    out = zero_form(src, a.degree)
    for idx, coeff in a.coeffs.items():
        term = function_form(src, f.apply_scalar(coeff))
        for i in idx:
            term = wedge(term, dcomp[i])
        out = out + term
    return out


def field_bracket(x: VField, y: VField) -> VField:
    """Jacobi-Lie bracket of vector fields."""
    if x.chart != y.chart:
        raise ValueError("fields live on different charts")
    comps = tuple(sx.sub(x.apply(yc), y.apply(xc))
                  for xc, yc in zip(x.components, y.components))
    return VField(x.chart, comps)


def pushforward(f: ChartMap, v: VField) -> tuple[Expr, ...]:
    """Differential of the map applied to a field: one expression per
    target variable, written in source coordinates (a field along f)."""
    if v.chart != f.source:
        raise ValueError("field does not live on the map's source chart")
    return tuple(sx.add(*(sx.mul(sx.diff(comp, sv), v.components[j])
                          for j, sv in enumerate(f.source.variables)))
                 for comp in f.components)


def pair(a: KForm, x: VField) -> Expr:
    """Pairing of a 1-form with a vector field."""
    if a.degree != 1:
        raise ValueError("pairing needs a 1-form")
    return sx.add(*(sx.mul(a.coeffs.get((i,), ZERO), x.components[i])
                    for i in range(a.chart.dim)))


# --- equality -----------------------------------------------------------

@dataclass(frozen=True)
class FormEquality:
    equal: bool
    failures: tuple[tuple[tuple[int, ...], sx.Equality], ...] = ()
    inconclusive: bool = False

    def __bool__(self) -> bool:
        return self.equal

    @property
    def witness(self) -> Optional[dict]:
        for idx, eq in self.failures:
            if eq.witness is not None:
                return {"indices": [i + 1 for i in idx], "point": eq.witness}
        return None


def forms_equal(a: KForm, b: KForm, mode: str = "symbolic", **kw) -> FormEquality:
    """Compare two forms coefficientwise."""
    if a.chart != b.chart:
        raise ValueError("forms live on different charts")
    if a.degree != b.degree:
        if a.is_zero() and b.is_zero():
            return FormEquality(True)
        raise ValueError(f"degree mismatch: {a.degree} != {b.degree}")
    failures = []
    inconclusive = False
    for idx in sorted(set(a.coeffs) | set(b.coeffs)):
        eq = sx.expr_equal(a.coeffs.get(idx, ZERO), b.coeffs.get(idx, ZERO),
                           mode, **kw)
        if not eq.equal:
            failures.append((idx, eq))
            inconclusive = inconclusive or eq.inconclusive
    return FormEquality(not failures, tuple(failures), inconclusive)


def fields_equal(x: VField, y: VField, mode: str = "symbolic", **kw) -> FormEquality:
    if x.chart != y.chart:
        raise ValueError("fields live on different charts")
    failures = []
    inconclusive = False
    for i, (a, b) in enumerate(zip(x.components, y.components)):
        eq = sx.expr_equal(a, b, mode, **kw)
        if not eq.equal:
            failures.append(((i,), eq))
            inconclusive = inconclusive or eq.inconclusive
    return FormEquality(not failures, tuple(failures), inconclusive)


# --- surface syntax -----------------------------------------------------
# A form is written as a sum of terms ``coeff * dv1^dv2^...``; the token
# for the basis covector of variable v is "d" + v, or "d(v)" when the
# bare token would collide with an actual chart variable.

def _covector_token(c: Chart, i: int) -> str:
    name = "d" + c.variables[i]
    if name in c.variables:
        return f"d({c.variables[i]})"
    return name


def form_to_string(a: KForm) -> str:
    if a.degree == 0:
        return sx.to_string(a.coeffs.get((), ZERO))
    if not a.coeffs:
        return "0"
    parts = []
    for idx in sorted(a.coeffs):
        coeff = a.coeffs[idx]
        basis = "^".join(_covector_token(a.chart, i) for i in idx)
        if isinstance(coeff, sx.Const) and coeff.value == 1:
            term = basis
        elif isinstance(coeff, sx.Const) and coeff.value == -1:
            term = "-" + basis
        else:
            cs = sx.to_string(coeff)
            if isinstance(coeff, sx.Add) or (cs.startswith("-") and
                                             not isinstance(coeff, (sx.Const, sx.Mul))):
                cs = f"({cs})"
            elif cs.startswith("-"):
                # keep the sign out front so sums print as "a - b"
                term = "-" + cs[1:] + "*" + basis
                parts.append(term)
                continue
            term = cs + "*" + basis
        parts.append(term)
    out = parts[0]
    for p in parts[1:]:
        out += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
    return out


class _FormParser(sx._Parser):
    """Parser for the form surface syntax, sharing the scalar grammar.

    Within a term, '^' after a covector token is a wedge, while '^'
    after a scalar factor is a power; '*' separates factors of either
    kind.
    """

    def __init__(self, src: str, chart: Chart):
        super().__init__(src)
        self.form_chart = chart

    def parse_form(self) -> tuple[Expr, dict]:
        terms = [self.form_term()]
        while True:
            if self.accept("+"):
                terms.append(self.form_term())
            elif self.accept("-"):
                coeff, idx = self.form_term()
                terms.append((sx.neg(coeff), idx))
            else:
                break
        self.skip_ws()
        if self.pos != len(self.src):
            self.error("unexpected trailing input")
        degrees = {len(idx) for _, idx in terms}
        if len(degrees) > 1:
            nonzero = {len(idx) for c, idx in terms if not _is_zero_const(c)}
            if len(nonzero) > 1:
                self.error("terms of mixed degree in one form", 0)
            degrees = nonzero or {min(degrees)}
        degree = degrees.pop()
        acc: dict[tuple[int, ...], Expr] = {}
        for coeff, idx in terms:
            if len(idx) != degree or len(idx) != len(set(idx)):
                continue  # vanishing term (zero coefficient or repeated index)
            sign, sidx = _sort_sign(idx)
            term = coeff if sign == 1 else sx.neg(coeff)
            acc[sidx] = sx.add(acc.get(sidx, ZERO), term)
        return degree, acc

    def form_term(self) -> tuple[Expr, tuple[int, ...]]:
        self.skip_ws()
        negate = False
        while self.accept("-"):
            negate = not negate
        coeff: Expr = ONE
        indices: list[int] = []
        first = True
        while True:
            cov = self.try_covector()
            if cov is not None:
                indices.append(cov)
                while self.accept("^"):
                    nxt = self.try_covector()
                    if nxt is None:
                        self.error("expected a covector after '^'")
                    indices.append(nxt)
            else:
                factor = self.power()
                coeff = sx.mul(coeff, factor)
                if self.accept("/"):
                    coeff = sx.div(coeff, self.unary())
            first = False
            if not self.accept("*"):
                break
        if first:
            self.error("empty term")
        return (sx.neg(coeff) if negate else coeff), tuple(indices)

    def try_covector(self) -> Optional[int]:
        self.skip_ws()
        start = self.pos
        chart_vars = self.form_chart.variables
        if self.peek() not in sx._IDENT_START:
            return None
        pos = self.pos
        while pos < len(self.src) and self.src[pos] in sx._IDENT_CONT:
            pos += 1
        name = self.src[start:pos]
        if name == "d" and pos < len(self.src) and self.src[pos] == "(":
            # explicit d(var) covector
            close = self.src.find(")", pos)
            inner = self.src[pos + 1:close].strip() if close != -1 else None
            if inner in chart_vars:
                self.pos = close + 1
                return chart_vars.index(inner)
            self.error(f"'d(...)' needs a chart variable", start)
        if name in chart_vars:
            return None  # a plain coordinate function
        if name.startswith("d") and name[1:] in chart_vars:
            self.pos = pos
            return chart_vars.index(name[1:])
        return None


def parse_form(src: str, c: Chart) -> KForm:
    """Parse the surface syntax of a form on the given chart."""
    degree, coeffs = _FormParser(src, c).parse_form()
    return KForm(c, degree, coeffs)


# --- record serialization (for input files) ------------------------------

def form_to_records(a: KForm) -> list[dict]:
    """Serialize as ``{indices, coefficient}`` records with 1-based indices."""
    return [{"indices": [i + 1 for i in idx], "coefficient": sx.to_string(coeff)}
            for idx, coeff in sorted(a.coeffs.items())]


def form_from_records(c: Chart, degree: int, records: Iterable[Mapping]) -> KForm:
    coeffs: dict[tuple[int, ...], Expr] = {}
    for rec in records:
        raw = tuple(int(i) - 1 for i in rec["indices"])
        coeff = sx.parse(str(rec["coefficient"]))
        if len(raw) != degree:
            raise ValueError(f"record {rec} does not have degree {degree}")
        if len(set(raw)) != len(raw):
            raise ValueError(f"repeated index in record {rec}")
        sign, idx = _sort_sign(raw)
        coeffs[idx] = sx.add(coeffs.get(idx, ZERO),
                             coeff if sign == 1 else sx.neg(coeff))
    return KForm(c, degree, coeffs)
