"""Immutable symbolic expression trees over (t, x, xdot, xddot).

Expressions are built from constants, the four dynamical variables, named
time-dependent coefficient functions, and the node kinds sum, product,
quotient, power with rational exponent, ln(abs(.)), negation, exp, sin and
cos.  Construction goes through the module-level constructors (`add`,
`mul`, `div`, ...) which perform light canonicalisation: nested sums and
products are flattened, numeric constants are folded, zero and unit
elements are dropped.  Structural equality is plain dataclass equality on
the canonical form, which makes print -> parse round trips exact.

Coefficient functions carry their own definition (an expression in t
only); differentiating a coefficient reference with respect to t yields a
reference of one order higher, so derivative values can either be read
from a numeric binding or resolved through the definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import SingularPointError, UnboundSymbolError

VARIABLES = ("t", "x", "xdot", "xddot")
VAR_INDEX = {name: i for i, name in enumerate(VARIABLES)}

NumberLike = Union[int, float, Fraction]


class Expr:
    """Base class; concrete nodes are frozen dataclasses below."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return add(self, neg(other))

    def __rsub__(self, other):
        return add(other, neg(self))

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __pow__(self, exponent):
        return pow_(self, exponent)

    def __neg__(self):
        return neg(self)

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"constants must be finite, got {self.value!r}")


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class CoefficientFunction:
    """A named scalar function of t with an attached definition."""

    name: str
    definition: Expr

    def __post_init__(self):
        extra = free_variables(self.definition) - {"t"}
        if extra:
            raise ValueError(
                f"coefficient {self.name!r} definition depends on {sorted(extra)}; "
                "only t is allowed"
            )


@dataclass(frozen=True)
class Coeff(Expr):
    """Reference to a coefficient function, or one of its t-derivatives."""

    fn: CoefficientFunction
    order: int = 0


@dataclass(frozen=True)
class Add(Expr):
    terms: tuple


@dataclass(frozen=True)
class Mul(Expr):
    factors: tuple


@dataclass(frozen=True)
class Div(Expr):
    num: Expr
    den: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class LnAbs(Expr):
    arg: Expr


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sin(Expr):
    arg: Expr


@dataclass(frozen=True)
class Cos(Expr):
    arg: Expr


T = Var("t")
X = Var("x")
XDOT = Var("xdot")
XDDOT = Var("xddot")

ZERO = Const(0.0)
ONE = Const(1.0)


# ---------------------------------------------------------------------------
# constructors


def const(value) -> Const:
    return Const(float(value))


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, Fraction)):
        return Const(float(value))
    raise TypeError(f"cannot interpret {value!r} as an expression")


def add(*terms) -> Expr:
    flat = []
    csum = 0.0

    def walk(item):
        nonlocal csum
        if isinstance(item, Add):
            for term in item.terms:
                walk(term)
        elif isinstance(item, Const):
            csum += item.value
        else:
            flat.append(item)

    for term in terms:
        walk(as_expr(term))
    if csum != 0.0:
        flat.append(Const(csum))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors) -> Expr:
    flat = []
    cprod = 1.0

    def walk(item):
        nonlocal cprod
        if isinstance(item, Mul):
            for factor in item.factors:
                walk(factor)
        elif isinstance(item, Const):
            cprod *= item.value
        else:
            flat.append(item)

    for factor in factors:
        walk(as_expr(factor))
    if cprod == 0.0:
        return ZERO
    if cprod != 1.0:
        flat.insert(0, Const(cprod))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def sub(a, b) -> Expr:
    return add(a, neg(b))


def neg(e) -> Expr:
    e = as_expr(e)
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Neg):
        return e.arg
    return Neg(e)


def div(num, den) -> Expr:
    num = as_expr(num)
    den = as_expr(den)
    if isinstance(den, Const):
        if den.value == 0.0:
            raise ValueError("constant zero denominator")
        return mul(Const(1.0 / den.value), num)
    if isinstance(num, Const) and num.value == 0.0:
        return ZERO
    return Div(num, den)


def pow_(base, exponent) -> Expr:
    base = as_expr(base)
    q = Fraction(exponent)
    if q == 0:
        return ONE
    if q == 1:
        return base
    if isinstance(base, Const):
        folded = _pow_value(base.value, q)
        if folded is None:
            raise ValueError(
                f"power {base.value!r}^{q} is undefined (zero base with "
                "negative exponent, or negative base with even root)"
            )
        if not math.isfinite(folded):
            raise ValueError(f"constant power {base.value!r}^{q} overflows")
        return Const(folded)
    return Pow(base, q)


def lnabs(arg) -> Expr:
    arg = as_expr(arg)
    if isinstance(arg, Const):
        if arg.value == 0.0:
            raise ValueError("ln(abs(0)) is undefined")
        return Const(math.log(abs(arg.value)))
    return LnAbs(arg)


def exp_(arg) -> Expr:
    arg = as_expr(arg)
    if isinstance(arg, Const):
        if arg.value > 709.0:
            raise ValueError(f"constant exp({arg.value!r}) overflows")
        return Const(math.exp(arg.value))
    return Exp(arg)


def sin_(arg) -> Expr:
    arg = as_expr(arg)
    if isinstance(arg, Const):
        return Const(math.sin(arg.value))
    return Sin(arg)


def cos_(arg) -> Expr:
    arg = as_expr(arg)
    if isinstance(arg, Const):
        return Const(math.cos(arg.value))
    return Cos(arg)


def coeff(fn: CoefficientFunction, order: int = 0) -> Coeff:
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    return Coeff(fn, order)


def constant_coefficient(name: str, value: float) -> CoefficientFunction:
    """Named constant (time-independent coefficient function)."""
    return CoefficientFunction(name, Const(float(value)))


def _pow_value(base: float, q: Fraction):
    """Evaluate base**q with odd-root sign semantics; None when undefined."""
    try:
        if q.denominator == 1:
            n = q.numerator
            if base == 0.0 and n < 0:
                return None
            return float(base) ** n
        if base > 0.0:
            return base ** float(q)
        if base == 0.0:
            return 0.0 if q > 0 else None
        if q.denominator % 2 == 1:
            magnitude = (-base) ** float(q)
            return -magnitude if q.numerator % 2 == 1 else magnitude
        return None
    except OverflowError:
        return math.inf


# ---------------------------------------------------------------------------
# structure queries


def children(e: Expr) -> tuple:
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Div):
        return (e.num, e.den)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, (Neg, LnAbs, Exp, Sin, Cos)):
        return (e.arg,)
    return ()


def free_variables(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, (Const, Coeff)):
        return frozenset()
    out = frozenset()
    for child in children(e):
        out |= free_variables(child)
    return out


def coefficient_references(e: Expr) -> frozenset:
    """All (function, order) pairs referenced anywhere in the tree."""
    if isinstance(e, Coeff):
        nested = coefficient_references(e.fn.definition)
        return nested | frozenset(((e.fn, e.order),))
    out = frozenset()
    for child in children(e):
        out |= coefficient_references(child)
    return out


def contains_variable(e: Expr, name: str) -> bool:
    return name in free_variables(e)


def is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0.0


# ---------------------------------------------------------------------------
# differentiation

_DERIVATIVE_CACHE: dict = {}


def coefficient_derivative(fn: CoefficientFunction, order: int) -> Expr:
    """The order-th t-derivative of the coefficient's definition."""
    if order == 0:
        return fn.definition
    key = (fn, order)
    cached = _DERIVATIVE_CACHE.get(key)
    if cached is None:
        cached = partial(coefficient_derivative(fn, order - 1), "t")
        _DERIVATIVE_CACHE[key] = cached
    return cached


def partial(e: Expr, v: str) -> Expr:
    """Partial derivative; the four variables are treated as independent.

    Differentiating with respect to t advances coefficient references by
    one order (collapsing to 0 when the definition's derivative vanishes).
    """
    if v not in VARIABLES:
        raise ValueError(f"unknown variable {v!r}")
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == v else ZERO
    if isinstance(e, Coeff):
        if v != "t":
            return ZERO
        derivative = coefficient_derivative(e.fn, e.order + 1)
        if is_zero(derivative):
            return ZERO
        return Coeff(e.fn, e.order + 1)
    if isinstance(e, Add):
        return add(*(partial(term, v) for term in e.terms))
    if isinstance(e, Mul):
        pieces = []
        for i, factor in enumerate(e.factors):
            d = partial(factor, v)
            if is_zero(d):
                continue
            pieces.append(mul(*e.factors[:i], d, *e.factors[i + 1 :]))
        return add(*pieces)
    if isinstance(e, Div):
        du = partial(e.num, v)
        dv = partial(e.den, v)
        return div(sub(mul(du, e.den), mul(e.num, dv)), pow_(e.den, 2))
    if isinstance(e, Pow):
        d = partial(e.base, v)
        return mul(Const(float(e.exponent)), pow_(e.base, e.exponent - 1), d)
    if isinstance(e, Neg):
        return neg(partial(e.arg, v))
    if isinstance(e, LnAbs):
        # d/dv ln|u| = u'/u away from u = 0
        return div(partial(e.arg, v), e.arg)
    if isinstance(e, Exp):
        return mul(e, partial(e.arg, v))
    if isinstance(e, Sin):
        return mul(cos_(e.arg), partial(e.arg, v))
    if isinstance(e, Cos):
        return neg(mul(sin_(e.arg), partial(e.arg, v)))
    raise TypeError(f"cannot differentiate {e!r}")


def total_time_derivative(e: Expr) -> Expr:
    """d/dt = d/dt + xdot d/dx + xddot d/dxdot applied to e.

    Rejects inputs that already contain xddot (the result would need a
    jerk variable).
    """
    if contains_variable(e, "xddot"):
        raise ValueError("total time derivative of an expression containing xddot")
    return add(
        partial(e, "t"),
        mul(XDOT, partial(e, "x")),
        mul(XDDOT, partial(e, "xdot")),
    )


# ---------------------------------------------------------------------------
# substitution and inlining


def substitute_variables(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions, rebuilding canonically."""
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, (Const, Coeff)):
        return e
    if isinstance(e, Add):
        return add(*(substitute_variables(term, mapping) for term in e.terms))
    if isinstance(e, Mul):
        return mul(*(substitute_variables(f, mapping) for f in e.factors))
    if isinstance(e, Div):
        return div(
            substitute_variables(e.num, mapping), substitute_variables(e.den, mapping)
        )
    if isinstance(e, Pow):
        return pow_(substitute_variables(e.base, mapping), e.exponent)
    if isinstance(e, Neg):
        return neg(substitute_variables(e.arg, mapping))
    if isinstance(e, LnAbs):
        return lnabs(substitute_variables(e.arg, mapping))
    if isinstance(e, Exp):
        return exp_(substitute_variables(e.arg, mapping))
    if isinstance(e, Sin):
        return sin_(substitute_variables(e.arg, mapping))
    if isinstance(e, Cos):
        return cos_(substitute_variables(e.arg, mapping))
    raise TypeError(f"cannot substitute into {e!r}")


def inline_coefficients(e: Expr) -> Expr:
    """Expand every coefficient reference through its definition.

    The result is an expression in the four variables only.  Definitions
    may reference further coefficients; the expansion recurses (the
    definition graph must be acyclic).
    """
    if isinstance(e, Coeff):
        return inline_coefficients(coefficient_derivative(e.fn, e.order))
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Add):
        return add(*(inline_coefficients(t_) for t_ in e.terms))
    if isinstance(e, Mul):
        return mul(*(inline_coefficients(f) for f in e.factors))
    if isinstance(e, Div):
        return div(inline_coefficients(e.num), inline_coefficients(e.den))
    if isinstance(e, Pow):
        return pow_(inline_coefficients(e.base), e.exponent)
    if isinstance(e, Neg):
        return neg(inline_coefficients(e.arg))
    if isinstance(e, LnAbs):
        return lnabs(inline_coefficients(e.arg))
    if isinstance(e, Exp):
        return exp_(inline_coefficients(e.arg))
    if isinstance(e, Sin):
        return sin_(inline_coefficients(e.arg))
    if isinstance(e, Cos):
        return cos_(inline_coefficients(e.arg))
    raise TypeError(f"cannot inline {e!r}")


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Binding:
    """Point at which an expression is evaluated.

    `coefficients` optionally pins (value, first, second derivative)
    triples per coefficient name; names not listed are resolved through
    their symbolic definitions, which requires t to be bound.
    """

    variables: Mapping[str, float]
    coefficients: Mapping[str, tuple] = None

    def coefficient_values(self, name):
        if self.coefficients is None:
            return None
        return self.coefficients.get(name)


def binding(t=None, x=None, xdot=None, xddot=None, coefficients=None) -> Binding:
    values = {}
    for name, value in (("t", t), ("x", x), ("xdot", xdot), ("xddot", xddot)):
        if value is not None:
            values[name] = float(value)
    return Binding(values, coefficients)


def evaluate(e: Expr, b: Binding) -> float:
    """Evaluate at a full binding.  Pure; raises on singular points."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return b.variables[e.name]
        except KeyError:
            raise UnboundSymbolError(f"variable {e.name!r} is not bound") from None
    if isinstance(e, Coeff):
        pinned = b.coefficient_values(e.fn.name)
        if pinned is not None:
            if e.order >= len(pinned):
                raise UnboundSymbolError(
                    f"coefficient {e.fn.name!r} bound numerically up to order "
                    f"{len(pinned) - 1}, order {e.order} requested"
                )
            return float(pinned[e.order])
        return evaluate(coefficient_derivative(e.fn, e.order), b)
    if isinstance(e, Add):
        total = 0.0
        for term in e.terms:
            total += evaluate(term, b)
        return total
    if isinstance(e, Mul):
        product = 1.0
        for factor in e.factors:
            product *= evaluate(factor, b)
        return product
    if isinstance(e, Div):
        den = evaluate(e.den, b)
        if den == 0.0:
            raise SingularPointError(to_string(e.den), "division by zero")
        return evaluate(e.num, b) / den
    if isinstance(e, Pow):
        base = evaluate(e.base, b)
        value = _pow_value(base, e.exponent)
        if value is None:
            raise SingularPointError(
                to_string(e), f"power undefined at base {base!r}"
            )
        return value
    if isinstance(e, Neg):
        return -evaluate(e.arg, b)
    if isinstance(e, LnAbs):
        arg = evaluate(e.arg, b)
        if arg == 0.0:
            raise SingularPointError(to_string(e.arg), "log of zero")
        return math.log(abs(arg))
    if isinstance(e, Exp):
        arg = evaluate(e.arg, b)
        if arg > 709.0:
            return math.inf
        return math.exp(arg)
    if isinstance(e, Sin):
        return math.sin(evaluate(e.arg, b))
    if isinstance(e, Cos):
        return math.cos(evaluate(e.arg, b))
    raise TypeError(f"cannot evaluate {e!r}")


# ---------------------------------------------------------------------------
# printing

_PREC_ADD = 10
_PREC_NEG = 15
_PREC_MUL = 20
_PREC_POW = 30
_PREC_ATOM = 100


def _format_const(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _format_exponent(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator) if q.numerator >= 0 else f"({q.numerator})"
    return f"({q.numerator}/{q.denominator})"


def _raw(e: Expr):
    """Return (text, precedence) for e."""
    if isinstance(e, Const):
        prec = _PREC_ATOM if e.value >= 0 else _PREC_NEG
        return _format_const(e.value), prec
    if isinstance(e, Var):
        return e.name, _PREC_ATOM
    if isinstance(e, Coeff):
        return e.fn.name + "'" * e.order, _PREC_ATOM
    if isinstance(e, Add):
        parts = [_render(e.terms[0], _PREC_ADD)]
        for term in e.terms[1:]:
            if isinstance(term, Neg):
                parts.append(" - " + _render(term.arg, _PREC_NEG))
            elif isinstance(term, Const) and term.value < 0:
                parts.append(" - " + _format_const(-term.value))
            else:
                parts.append(" + " + _render(term, _PREC_ADD + 1))
        return "".join(parts), _PREC_ADD
    if isinstance(e, Mul):
        return "*".join(_render(f, _PREC_MUL + 1) for f in e.factors), _PREC_MUL
    if isinstance(e, Div):
        num = _render(e.num, _PREC_MUL)
        den = _render(e.den, _PREC_MUL + 1)
        return f"{num}/{den}", _PREC_MUL
    if isinstance(e, Pow):
        base = _render(e.base, _PREC_POW + 1)
        return f"{base}^{_format_exponent(e.exponent)}", _PREC_POW
    if isinstance(e, Neg):
        return "-" + _render(e.arg, _PREC_NEG), _PREC_NEG
    if isinstance(e, LnAbs):
        return f"ln(abs({to_string(e.arg)}))", _PREC_ATOM
    if isinstance(e, Exp):
        return f"exp({to_string(e.arg)})", _PREC_ATOM
    if isinstance(e, Sin):
        return f"sin({to_string(e.arg)})", _PREC_ATOM
    if isinstance(e, Cos):
        return f"cos({to_string(e.arg)})", _PREC_ATOM
    raise TypeError(f"cannot print {e!r}")


def _render(e: Expr, min_prec: int) -> str:
    text, prec = _raw(e)
    if prec < min_prec:
        return f"({text})"
    return text


def to_string(e: Expr) -> str:
    """Deterministic pretty-printer; output re-parses to an equal tree."""
    return _raw(e)[0]
