"""Best-effort algebraic simplification.

The simplifier constant-folds, flattens, extracts signs, distributes
integer powers over products, merges quotient chains into a single
quotient with canonically ordered factors, cancels structurally
identical factors between numerator and denominator, and collects
identical sum terms.  It makes no completeness claim: expression
equivalence is decided by the numeric fuzz oracle, not by normal forms.
Cancellations assume the cancelled factor is nonzero; callers can
collect these domain caveats through the optional `caveats` list.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Tuple

from . import expr as ex


def simplify(e: ex.Expr, caveats: Optional[List[str]] = None) -> ex.Expr:
    """Return a numerically equivalent, usually smaller expression."""
    previous = None
    current = e
    for _ in range(6):
        if current == previous:
            break
        previous = current
        try:
            current = _pass(current, caveats)
        except (ValueError, OverflowError):
            # a rewrite (constant folding, power distribution) overflowed;
            # keep the last valid form
            return previous
    return current


def _pass(e: ex.Expr, caveats) -> ex.Expr:
    if isinstance(e, (ex.Const, ex.Var, ex.Coeff)):
        return e
    if isinstance(e, ex.Add):
        return _simplify_add([_pass(t, caveats) for t in e.terms])
    if isinstance(e, ex.Mul):
        return _simplify_quotient([_pass(f, caveats) for f in e.factors], [], caveats)
    if isinstance(e, ex.Div):
        return _simplify_quotient(
            [_pass(e.num, caveats)], [_pass(e.den, caveats)], caveats
        )
    if isinstance(e, ex.Pow):
        return _simplify_pow(_pass(e.base, caveats), e.exponent)
    if isinstance(e, ex.Neg):
        return ex.neg(_pass(e.arg, caveats))
    if isinstance(e, ex.LnAbs):
        return ex.lnabs(_pass(e.arg, caveats))
    if isinstance(e, ex.Exp):
        return ex.exp_(_pass(e.arg, caveats))
    if isinstance(e, ex.Sin):
        return ex.sin_(_pass(e.arg, caveats))
    if isinstance(e, ex.Cos):
        return ex.cos_(_pass(e.arg, caveats))
    return e


def _simplify_pow(base: ex.Expr, q: Fraction) -> ex.Expr:
    integer = q.denominator == 1
    if isinstance(base, ex.Pow) and integer:
        # (u^a)^n with integer n is safe for any sign of u
        return _simplify_pow(base.base, base.exponent * q)
    if integer:
        n = int(q)
        if isinstance(base, ex.Mul):
            return ex.mul(*(_simplify_pow(f, q) for f in base.factors))
        if isinstance(base, ex.Div):
            return ex.div(_simplify_pow(base.num, q), _simplify_pow(base.den, q))
        if isinstance(base, ex.Neg):
            inner = _simplify_pow(base.arg, q)
            return inner if n % 2 == 0 else ex.neg(inner)
    return ex.pow_(base, q)


# ---------------------------------------------------------------------------
# sums: collect identical terms with numeric multiplicities


def _split_const(e: ex.Expr) -> Tuple[float, ex.Expr]:
    """Split off a numeric prefactor: e == coefficient * core."""
    coefficient = 1.0
    while isinstance(e, ex.Neg):
        coefficient = -coefficient
        e = e.arg
    if isinstance(e, ex.Const):
        return coefficient * e.value, ex.ONE
    if isinstance(e, ex.Mul) and isinstance(e.factors[0], ex.Const):
        rest = e.factors[1:]
        core = rest[0] if len(rest) == 1 else ex.Mul(rest)
        return coefficient * e.factors[0].value, core
    return coefficient, e


def _term_key(term: ex.Expr) -> Tuple[float, ex.Expr]:
    """Split a term into (numeric coefficient, structural core)."""
    coefficient, core = _split_const(term)
    if isinstance(core, ex.Div):
        c_num, num_core = _split_const(core.num)
        if c_num != 1.0:
            coefficient *= c_num
            core = ex.div(num_core, core.den)
    return coefficient, core


def _simplify_add(terms) -> ex.Expr:
    collected: dict = {}
    order: list = []
    constant = 0.0
    for term in terms:
        for piece in term.terms if isinstance(term, ex.Add) else (term,):
            coefficient, core = _term_key(piece)
            if core == ex.ONE:
                constant += coefficient
                continue
            if core not in collected:
                collected[core] = 0.0
                order.append(core)
            collected[core] += coefficient
    rebuilt = []
    for core in order:
        coefficient = collected[core]
        if coefficient == 0.0:
            continue
        if coefficient == 1.0:
            rebuilt.append(core)
        elif coefficient == -1.0:
            rebuilt.append(ex.neg(core))
        else:
            rebuilt.append(ex.mul(coefficient, core))
    rebuilt.append(ex.const(constant))
    return ex.add(*rebuilt)


# ---------------------------------------------------------------------------
# products and quotients: merge chains, cancel common factors


def _explode(factor: ex.Expr, num, den, flip):
    """Accumulate a factor into the numerator/denominator lists.

    Returns the extracted sign.  `flip` is True while descending into
    denominator context.
    """
    sign = 1.0
    while isinstance(factor, ex.Neg):
        sign = -sign
        factor = factor.arg
    if isinstance(factor, ex.Mul):
        for f in factor.factors:
            sign *= _explode(f, num, den, flip)
        return sign
    if isinstance(factor, ex.Div):
        sign *= _explode(factor.num, num, den, flip)
        sign *= _explode(factor.den, num, den, not flip)
        return sign
    (den if flip else num).append(factor)
    return sign


def _as_base_exponent(factor: ex.Expr) -> Tuple[ex.Expr, Fraction]:
    if isinstance(factor, ex.Pow):
        return factor.base, factor.exponent
    return factor, Fraction(1)


def _simplify_quotient(numerator_factors, denominator_factors, caveats) -> ex.Expr:
    num: list = []
    den: list = []
    sign = 1.0
    for factor in numerator_factors:
        sign *= _explode(factor, num, den, False)
    for factor in denominator_factors:
        sign *= _explode(factor, num, den, True)

    # merge shared bases by exponent
    bases: list = []
    powers: dict = {}
    passthrough_num = []
    passthrough_den = []

    def account(factor, direction, passthrough):
        base, exponent = _as_base_exponent(factor)
        if isinstance(base, ex.Const):
            passthrough.append(factor)  # constants fold in the constructors
            return
        if base not in powers:
            powers[base] = Fraction(0)
            bases.append(base)
        powers[base] += direction * exponent

    for factor in num:
        account(factor, +1, passthrough_num)
    for factor in den:
        account(factor, -1, passthrough_den)

    new_num = list(passthrough_num)
    new_den = list(passthrough_den)
    for base in bases:
        exponent = powers[base]
        seen_num = any(_as_base_exponent(f)[0] == base for f in num)
        seen_den = any(_as_base_exponent(f)[0] == base for f in den)
        if seen_num and seen_den and caveats is not None:
            caveats.append(
                f"cancelled common factor {ex.to_string(base)} (assumed nonzero)"
            )
        if exponent == 0:
            continue
        if exponent > 0:
            new_num.append(ex.pow_(base, exponent))
        else:
            new_den.append(ex.pow_(base, -exponent))

    # canonical factor order so that symmetric terms collapse in sums
    new_num.sort(key=ex.to_string)
    new_den.sort(key=ex.to_string)
    numerator = ex.mul(sign, *new_num) if new_num else ex.const(sign)
    if not new_den:
        return numerator
    denominator = ex.mul(*new_den)
    if isinstance(denominator, ex.Const):
        return ex.mul(numerator, 1.0 / denominator.value)
    return ex.div(numerator, denominator)
