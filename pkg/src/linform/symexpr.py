"""Minimal symbolic scalar expressions over named coordinate variables.

Expressions are immutable trees built from rational constants, variables,
sums, products, powers and a few elementary functions.  Equality testing
is sound for polynomials over the rationals (canonical expanded form) and
falls back to seeded numeric sampling otherwise.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

Number = Union[int, Fraction, float]

#: default sampling box per variable for numeric comparisons
DEFAULT_BOX = (-2.0, 2.0)
DEFAULT_SAMPLES = 100
DEFAULT_TOL = 1e-9
DEFAULT_SEED = 42

#: functions the engine knows how to evaluate and differentiate
KNOWN_FUNCTIONS = ("sin", "cos", "exp", "log")

# exponents up to this size are expanded when building canonical forms;
# larger powers are kept opaque (still sound, just not collected)
_POLY_POW_MAX = 32


class ExprError(Exception):
    """Base class for expression-engine errors."""


class ExprSyntaxError(ExprError):
    """Raised by :func:`parse`; carries the byte offset of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class EvalError(ExprError):
    """Base class for evaluation failures."""


class UnboundVariableError(EvalError):
    pass


class DomainError(EvalError):
    """Division by zero, log of a non-positive number, overflow, ..."""


def _binary_op(f):
    def op(self, other):
        try:
            other = as_expr(other)
        except TypeError:
            return NotImplemented
        return f(self, other)
    return op


class Expr:
    """Base class for expression nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    __add__ = _binary_op(lambda a, b: add(a, b))
    __radd__ = _binary_op(lambda a, b: add(b, a))
    __sub__ = _binary_op(lambda a, b: add(a, neg(b)))
    __rsub__ = _binary_op(lambda a, b: add(b, neg(a)))
    __mul__ = _binary_op(lambda a, b: mul(a, b))
    __rmul__ = _binary_op(lambda a, b: mul(b, a))
    __truediv__ = _binary_op(lambda a, b: div(a, b))
    __rtruediv__ = _binary_op(lambda a, b: div(b, a))
    __pow__ = _binary_op(lambda a, b: pow_(a, b))

    def __neg__(self):
        return neg(self)

    def __str__(self) -> str:
        return to_string(self)

    def __repr__(self) -> str:
        return f"Expr({to_string(self)!r})"


@dataclass(frozen=True, repr=False)
class Const(Expr):
    value: Union[Fraction, float]

    def __post_init__(self):
        if isinstance(self.value, int):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True, repr=False)
class Var(Expr):
    name: str


@dataclass(frozen=True, repr=False)
class Add(Expr):
    terms: tuple[Expr, ...]


@dataclass(frozen=True, repr=False)
class Mul(Expr):
    factors: tuple[Expr, ...]


@dataclass(frozen=True, repr=False)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True, repr=False)
class Call(Expr):
    func: str
    arg: Expr


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    if isinstance(x, float):
        return Const(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def const(c: Number) -> Expr:
    return as_expr(c)


def var(name: str) -> Var:
    return Var(name)


def _is_const(e: Expr, value=None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


# --- smart constructors -------------------------------------------------
# These perform only local, obviously value-preserving normalisation:
# flattening, constant folding, and dropping additive/multiplicative units.

def add(*terms) -> Expr:
    flat: list[Expr] = []
    acc_rat = Fraction(0)
    acc_float = 0.0
    has_float = False
    for t in map(as_expr, terms):
        parts = t.terms if isinstance(t, Add) else (t,)
        for p in parts:
            if isinstance(p, Const):
                if isinstance(p.value, float):
                    acc_float += p.value
                    has_float = True
                else:
                    acc_rat += p.value
            else:
                flat.append(p)
    if has_float:
        flat.append(Const(acc_float + float(acc_rat)))
    elif acc_rat != 0 or not flat:
        flat.append(Const(acc_rat))
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors) -> Expr:
    flat: list[Expr] = []
    acc_rat = Fraction(1)
    acc_float = 1.0
    has_float = False
    for f in map(as_expr, factors):
        parts = f.factors if isinstance(f, Mul) else (f,)
        for p in parts:
            if isinstance(p, Const):
                if isinstance(p.value, float):
                    acc_float *= p.value
                    has_float = True
                else:
                    acc_rat *= p.value
            else:
                flat.append(p)
    if not has_float and acc_rat == 0:
        return ZERO
    if has_float:
        c = acc_float * float(acc_rat)
        if c == 0.0:
            return Const(0.0)
        flat.insert(0, Const(c))
    elif acc_rat != 1 or not flat:
        flat.insert(0, Const(acc_rat))
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def neg(e) -> Expr:
    return mul(Const(Fraction(-1)), as_expr(e))


def sub(a, b) -> Expr:
    return add(a, neg(b))


def pow_(base, exponent) -> Expr:
    base = as_expr(base)
    exponent = as_expr(exponent)
    if _is_const(exponent, 1):
        return base
    if _is_const(exponent, 0):
        return ONE
    if isinstance(base, Const) and isinstance(exponent, Const):
        b, e = base.value, exponent.value
        if isinstance(b, Fraction) and isinstance(e, Fraction) and e.denominator == 1:
            n = int(e)
            if n >= 0 or b != 0:
                return Const(b ** n)
    return Pow(base, exponent)


def div(a, b) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if isinstance(a, Const) and isinstance(b, Const):
        bv = b.value
        if bv != 0 and isinstance(a.value, Fraction) and isinstance(bv, Fraction):
            return Const(a.value / bv)
    return mul(a, pow_(b, Const(Fraction(-1))))


# --- parsing ------------------------------------------------------------

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")


class _Parser:
    """Recursive-descent parser for the scalar grammar.

    grammar::

        expr   := term (('+' | '-') term)*
        term   := unary (('*' | '/') unary)*
        unary  := '-' unary | power
        power  := atom ('^' unary)?
        atom   := NUMBER | IDENT ['(' expr ')'] | '(' expr ')'

    Numbers are decimal literals, parsed exactly as rationals.
    """

    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def error(self, message: str, offset: Optional[int] = None):
        raise ExprSyntaxError(message, self.pos if offset is None else offset)

    def skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def accept(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str):
        if not self.accept(ch):
            self.error(f"expected '{ch}'")

    def parse(self) -> Expr:
        e = self.expr()
        self.skip_ws()
        if self.pos != len(self.src):
            self.error("unexpected trailing input")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = add(e, self.term())
            elif self.accept("-"):
                e = sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            if self.accept("*"):
                e = mul(e, self.unary())
            elif self.accept("/"):
                e = div(e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        e = self.atom()
        if self.accept("^"):
            return pow_(e, self.unary())
        return e

    def atom(self) -> Expr:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if ch.isdigit() or ch == ".":
            return self.number()
        if ch in _IDENT_START:
            return self.ident()
        self.error("expected a number, variable, or '('")

    def number(self) -> Expr:
        start = self.pos
        while self.pos < len(self.src) and self.src[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(self.src) and self.src[self.pos] == ".":
            self.pos += 1
            frac_start = self.pos
            while self.pos < len(self.src) and self.src[self.pos].isdigit():
                self.pos += 1
            if self.pos == frac_start:
                self.error("malformed number", start)
        text = self.src[start:self.pos]
        if text == ".":
            self.error("malformed number", start)
        return Const(Fraction(text))

    def ident(self) -> Expr:
        start = self.pos
        while self.pos < len(self.src) and self.src[self.pos] in _IDENT_CONT:
            self.pos += 1
        name = self.src[start:self.pos]
        if self.peek() == "(":
            if name not in KNOWN_FUNCTIONS:
                self.error(f"unknown function '{name}'", start)
            self.pos += 1
            arg = self.expr()
            self.expect(")")
            return Call(name, arg)
        return Var(name)


def parse(src: str) -> Expr:
    """Parse ``src`` into an expression.

    Raises :class:`ExprSyntaxError` (with a byte offset) on malformed
    input or an unknown function name.
    """
    return _Parser(src).parse()


# --- printing -----------------------------------------------------------

def _print_const(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _needs_parens_in_product(e: Expr) -> bool:
    if isinstance(e, Add):
        return True
    if isinstance(e, Const):
        return (isinstance(e.value, float) and e.value < 0) or (
            isinstance(e.value, Fraction) and e.value < 0
        )
    return False


def to_string(e: Expr) -> str:
    """Render an expression in the surface syntax accepted by :func:`parse`."""
    if isinstance(e, Const):
        return _print_const(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    if isinstance(e, Pow):
        base = to_string(e.base)
        if isinstance(e.base, (Add, Mul, Pow)) or _needs_parens_in_product(e.base):
            base = f"({base})"
        exp = to_string(e.exponent)
        if not (isinstance(e.exponent, (Var, Call)) or
                (isinstance(e.exponent, Const) and
                 not _needs_parens_in_product(e.exponent))):
            exp = f"({exp})"
        return f"{base}^{exp}"
    if isinstance(e, Mul):
        sign = ""
        factors = list(e.factors)
        if isinstance(factors[0], Const):
            c = factors[0].value
            if c == -1:
                sign = "-"
                factors = factors[1:]
            elif (isinstance(c, Fraction) and c < 0) or (
                    isinstance(c, float) and c < 0):
                sign = "-"
                factors[0] = Const(-c)
        parts = []
        for f in factors:
            s = to_string(f)
            if _needs_parens_in_product(f):
                s = f"({s})"
            parts.append(s)
        return sign + "*".join(parts) if parts else sign + "1"
    if isinstance(e, Add):
        out = to_string(e.terms[0])
        for t in e.terms[1:]:
            s = to_string(t)
            if s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out
    raise TypeError(f"not an Expr: {e!r}")


# --- evaluation ---------------------------------------------------------

_FUNC_IMPL = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "log": math.log,
}


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Add):
        return frozenset().union(*(free_vars(t) for t in e.terms))
    if isinstance(e, Mul):
        return frozenset().union(*(free_vars(f) for f in e.factors))
    if isinstance(e, Pow):
        return free_vars(e.base) | free_vars(e.exponent)
    if isinstance(e, Call):
        return free_vars(e.arg)
    raise TypeError(f"not an Expr: {e!r}")


def evaluate(e: Expr, point: Mapping[str, Number]) -> float:
    """Evaluate at a point binding every free variable to a real value."""
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Var):
        try:
            return float(point[e.name])
        except KeyError:
            raise UnboundVariableError(f"variable '{e.name}' is not bound") from None
    if isinstance(e, Add):
        return math.fsum(evaluate(t, point) for t in e.terms)
    if isinstance(e, Mul):
        out = 1.0
        for f in e.factors:
            out *= evaluate(f, point)
        return out
    if isinstance(e, Pow):
        b = evaluate(e.base, point)
        x = evaluate(e.exponent, point)
        try:
            r = b ** x
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            raise DomainError(f"{b!r} ** {x!r}: {exc}") from None
        if isinstance(r, complex):
            raise DomainError(f"{b!r} ** {x!r} is not real")
        return r
    if isinstance(e, Call):
        x = evaluate(e.arg, point)
        try:
            return _FUNC_IMPL[e.func](x)
        except (ValueError, OverflowError) as exc:
            raise DomainError(f"{e.func}({x!r}): {exc}") from None
    raise TypeError(f"not an Expr: {e!r}")


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Simultaneously substitute expressions for variables."""
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, Add):
        return add(*(substitute(t, mapping) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(substitute(f, mapping) for f in e.factors))
    if isinstance(e, Pow):
        return pow_(substitute(e.base, mapping), substitute(e.exponent, mapping))
    if isinstance(e, Call):
        return Call(e.func, substitute(e.arg, mapping))
    raise TypeError(f"not an Expr: {e!r}")


# --- differentiation ----------------------------------------------------

def diff(e: Expr, v: str) -> Expr:
    """Partial derivative with respect to the variable named ``v``."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == v else ZERO
    if isinstance(e, Add):
        return add(*(diff(t, v) for t in e.terms))
    if isinstance(e, Mul):
        terms = []
        for i, f in enumerate(e.factors):
            df = diff(f, v)
            if _is_const(df, 0):
                continue
            rest = e.factors[:i] + e.factors[i + 1:]
            terms.append(mul(df, *rest))
        return add(*terms) if terms else ZERO
    if isinstance(e, Pow):
        db = diff(e.base, v)
        if v not in free_vars(e.exponent):
            # d(b^c) = c * b^(c-1) * db
            return mul(e.exponent, pow_(e.base, sub(e.exponent, ONE)), db)
        # general rule via b^x = exp(x log b)
        de = diff(e.exponent, v)
        return mul(e, add(mul(de, Call("log", e.base)),
                          mul(e.exponent, db, pow_(e.base, Const(Fraction(-1))))))
    if isinstance(e, Call):
        inner = diff(e.arg, v)
        if e.func == "sin":
            outer = Call("cos", e.arg)
        elif e.func == "cos":
            outer = neg(Call("sin", e.arg))
        elif e.func == "exp":
            outer = e
        elif e.func == "log":
            outer = pow_(e.arg, Const(Fraction(-1)))
        else:  # pragma: no cover - parser rejects unknown functions
            raise ExprError(f"cannot differentiate '{e.func}'")
        return mul(outer, inner)
    raise TypeError(f"not an Expr: {e!r}")


# --- canonical polynomial form -----------------------------------------
# A polynomial is a dict {monomial: Fraction} where a monomial is a sorted
# tuple of (key, exponent) pairs.  Keys are variable names, or printed
# canonical forms of non-polynomial subtrees ("atoms"); atoms are treated
# as independent variables, which keeps zero-detection sound.

Monomial = tuple[tuple[str, int], ...]
Poly = dict[Monomial, Fraction]


def _poly_const(c: Fraction) -> Poly:
    return {(): c} if c != 0 else {}


def _poly_key(key: str) -> Poly:
    return {((key, 1),): Fraction(1)}


def _poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, Fraction(0)) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    exps: dict[str, int] = dict(m1)
    for k, e in m2:
        exps[k] = exps.get(k, 0) + e
    return tuple(sorted(exps.items()))


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            s = out.get(m, Fraction(0)) + c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def _poly_pow(p: Poly, n: int) -> Poly:
    out = _poly_const(Fraction(1))
    base = p
    while n:
        if n & 1:
            out = _poly_mul(out, base)
        base = _poly_mul(base, base) if n > 1 else base
        n >>= 1
    return out


class _Canonicalizer:
    """Converts expressions to canonical polynomials over vars and atoms."""

    def __init__(self):
        self.atoms: dict[str, Expr] = {}

    def run(self, e: Expr) -> Optional[Poly]:
        if isinstance(e, Const):
            if isinstance(e.value, float):
                return None
            return _poly_const(e.value)
        if isinstance(e, Var):
            return _poly_key(e.name)
        if isinstance(e, Add):
            out: Poly = {}
            for t in e.terms:
                p = self.run(t)
                if p is None:
                    return None
                out = _poly_add(out, p)
            return out
        if isinstance(e, Mul):
            out = _poly_const(Fraction(1))
            for f in e.factors:
                p = self.run(f)
                if p is None:
                    return None
                out = _poly_mul(out, p)
            return out
        if isinstance(e, Pow):
            exp = e.exponent
            if (isinstance(exp, Const) and isinstance(exp.value, Fraction)
                    and exp.value.denominator == 1
                    and 0 <= exp.value <= _POLY_POW_MAX):
                p = self.run(e.base)
                if p is None:
                    return None
                return _poly_pow(p, int(exp.value))
            return self.atom(e)
        if isinstance(e, Call):
            return self.atom(e)
        raise TypeError(f"not an Expr: {e!r}")

    def atom(self, e: Expr) -> Optional[Poly]:
        canon = self.canonical_subexpr(e)
        if canon is None:
            return None
        key = "\x00" + to_string(canon)
        self.atoms.setdefault(key, canon)
        return _poly_key(key)

    def canonical_subexpr(self, e: Expr) -> Optional[Expr]:
        if isinstance(e, Call):
            p = self.run(e.arg)
            if p is None:
                return None
            return Call(e.func, self.to_expr(p))
        if isinstance(e, Pow):
            pb = self.run(e.base)
            pe = self.run(e.exponent)
            if pb is None or pe is None:
                return None
            return Pow(self.to_expr(pb), self.to_expr(pe))
        return e

    def to_expr(self, p: Poly) -> Expr:
        def mono_sort_key(item):
            m, _ = item
            return (-sum(e for _, e in m), m)

        terms = []
        for m, c in sorted(p.items(), key=mono_sort_key):
            factors: list[Expr] = []
            for key, exp in m:
                base = self.atoms[key] if key.startswith("\x00") else Var(key)
                factors.append(pow_(base, Const(Fraction(exp))))
            terms.append(mul(Const(c), *factors))
        return add(*terms) if terms else ZERO


def canonical_polynomial(e: Expr) -> Optional[Poly]:
    """Canonical polynomial of ``e`` over its variables, or None if the
    expression contains float constants (exact arithmetic impossible)."""
    return _Canonicalizer().run(e)


def is_polynomial(e: Expr) -> bool:
    """True when ``e`` is a genuine polynomial over the rationals."""
    canon = _Canonicalizer()
    p = canon.run(e)
    return p is not None and not canon.atoms


def simplify(e: Expr) -> Expr:
    """Value-preserving normalisation.

    Polynomial expressions (over rationals, with opaque function/power
    subtrees treated as atoms) are expanded and collected into a canonical
    ordered form; expressions containing float constants are only cleaned
    up locally by the smart constructors.
    """
    canon = _Canonicalizer()
    p = canon.run(e)
    if p is not None:
        return canon.to_expr(p)
    return _cleanup(e)


def _cleanup(e: Expr) -> Expr:
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Add):
        return add(*(_cleanup(t) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(_cleanup(f) for f in e.factors))
    if isinstance(e, Pow):
        return pow_(_cleanup(e.base), _cleanup(e.exponent))
    if isinstance(e, Call):
        return Call(e.func, _cleanup(e.arg))
    raise TypeError(f"not an Expr: {e!r}")


def is_zero(e: Expr) -> bool:
    """Sound symbolic zero test (may return False for exotic zeros that
    only numeric sampling would catch)."""
    p = canonical_polynomial(e)
    return p is not None and not p


# --- equality -----------------------------------------------------------

@dataclass(frozen=True)
class Equality:
    """Outcome of an equality check.

    ``witness`` is a point where the two sides differ (present on
    definite failures).  ``inconclusive`` is set when numeric sampling
    hit a domain error before reaching a verdict.
    """

    equal: bool
    mode: str
    witness: Optional[dict[str, float]] = None
    inconclusive: bool = False
    residual: float = 0.0

    def __bool__(self) -> bool:
        return self.equal


def sample_point(variables: Iterable[str], rng: random.Random,
                 box: tuple[float, float] = DEFAULT_BOX) -> dict[str, float]:
    return {v: rng.uniform(box[0], box[1]) for v in sorted(variables)}


def _numeric_equal(a: Expr, b: Expr, points: int, tol: float, seed: int,
                   box: tuple[float, float]) -> Equality:
    rng = random.Random(seed)
    names = free_vars(a) | free_vars(b)
    worst = 0.0
    for _ in range(points):
        pt = sample_point(names, rng, box)
        try:
            va = evaluate(a, pt)
            vb = evaluate(b, pt)
        except DomainError:
            return Equality(False, "numeric", witness=pt, inconclusive=True)
        delta = abs(va - vb)
        scale = tol * (1.0 + abs(va) + abs(vb))
        worst = max(worst, delta)
        if delta > scale:
            return Equality(False, "numeric", witness=pt, residual=delta)
    return Equality(True, "numeric", residual=worst)


def expr_equal(a: Expr, b: Expr, mode: str = "symbolic", *,
               points: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOL,
               seed: int = DEFAULT_SEED,
               box: tuple[float, float] = DEFAULT_BOX) -> Equality:
    """Decide whether two expressions agree as functions.

    In symbolic mode the difference is brought to canonical polynomial
    form; an identically-zero form is a proof of equality, and a nonzero
    pure polynomial is a proof of inequality (a witness point is
    searched for).  Anything else falls back to numeric sampling.
    """
    if mode not in ("symbolic", "numeric"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "numeric":
        return _numeric_equal(a, b, points, tol, seed, box)

    canon = _Canonicalizer()
    p = canon.run(sub(a, b))
    if p is not None and not p:
        return Equality(True, "symbolic")
    if p is not None and not canon.atoms:
        # nonzero polynomial over the rationals: definitely unequal;
        # hunt for a witness point (vanishing set has measure zero)
        rng = random.Random(seed)
        names = free_vars(a) | free_vars(b)
        diff_expr = canon.to_expr(p)
        for _ in range(200):
            pt = sample_point(names, rng, box)
            val = evaluate(diff_expr, pt)
            if abs(val) > tol * (1.0 + abs(evaluate(a, pt)) + abs(evaluate(b, pt))):
                return Equality(False, "symbolic", witness=pt, residual=abs(val))
        return Equality(False, "symbolic", residual=0.0)
    return _numeric_equal(a, b, points, tol, seed, box)
