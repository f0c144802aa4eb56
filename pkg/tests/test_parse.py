from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nullgauge import expr as ex
from nullgauge.errors import ParseError, UnknownIdentifierError
from nullgauge.parse import parse

from helpers import expr_environment

G1 = ex.CoefficientFunction("g1", ex.add(2, ex.T))
G2 = ex.CoefficientFunction("g2", ex.const(1.0))
G3 = ex.CoefficientFunction("g3", ex.const(3.0))
H2 = ex.CoefficientFunction("h2", ex.add(3, ex.T))
H4 = ex.CoefficientFunction("h4", ex.const(2.0))
ENV = {fn.name: fn for fn in (G1, G2, G3, H2, H4)}


class TestGrammar:
    def test_kinetic_term_shape(self):
        assert parse("xdot^2/2") == ex.mul(0.5, ex.pow_(ex.XDOT, 2))

    def test_reciprocal_linear_form_shape(self):
        e = parse("1/(g1*xdot + g2*x + g3)", ENV)
        expected = ex.div(
            1,
            ex.add(
                ex.mul(ex.Coeff(G1, 0), ex.XDOT),
                ex.mul(ex.Coeff(G2, 0), ex.X),
                ex.Coeff(G3, 0),
            ),
        )
        assert e == expected

    def test_log_abs_shape(self):
        e = parse("ln(abs(h2*x + h4))", ENV)
        expected = ex.lnabs(ex.add(ex.mul(ex.Coeff(H2, 0), ex.X), ex.Coeff(H4, 0)))
        assert e == expected

    def test_precedence(self):
        e = parse("2 + 3*4^2")
        assert ex.evaluate(e, ex.Binding({})) == 50.0

    def test_unary_minus_binds_below_multiplication(self):
        assert parse("-x*t") == ex.neg(ex.mul(ex.X, ex.T))
        assert parse("-x + t") == ex.add(ex.neg(ex.X), ex.T)
        assert parse("-x^2") == ex.neg(ex.pow_(ex.X, 2))

    def test_subtraction(self):
        assert parse("x - t") == ex.add(ex.X, ex.neg(ex.T))

    def test_whitespace_insensitive(self):
        assert parse(" x +\t2*t ") == parse("x+2*t")

    def test_functions(self):
        assert parse("exp(t)") == ex.exp_(ex.T)
        assert parse("sin(2*t)") == ex.sin_(ex.mul(2, ex.T))
        assert parse("cos(t)") == ex.cos_(ex.T)

    def test_primes_reference_derivatives(self):
        assert parse("g1'", ENV) == ex.Coeff(G1, 1)
        assert parse("g1''", ENV) == ex.Coeff(G1, 2)

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("x^2", Fraction(2)),
            ("x^-2", Fraction(-2)),
            ("x^(-3)", Fraction(-3)),
            ("x^(1/2)", Fraction(1, 2)),
            ("x^(-1/2)", Fraction(-1, 2)),
        ],
    )
    def test_rational_exponents(self, text, expected):
        e = parse(text)
        assert isinstance(e, ex.Pow)
        assert e.exponent == expected

    def test_scientific_numbers(self):
        assert parse("1e-3") == ex.const(1e-3)
        assert parse("2.5e2") == ex.const(250.0)


class TestErrors:
    def test_syntax_error_has_position(self):
        with pytest.raises(ParseError) as err:
            parse("x + ")
        assert err.value.position == 4

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError):
            parse("q + 1")

    def test_prime_on_variable(self):
        with pytest.raises(ParseError):
            parse("x'")

    def test_ln_requires_abs(self):
        with pytest.raises(ParseError):
            parse("ln(x)")

    def test_bare_abs_rejected(self):
        with pytest.raises(ParseError):
            parse("abs(x)")

    def test_non_rational_exponent(self):
        with pytest.raises(ParseError):
            parse("x^t")

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse("x 1")

    def test_unexpected_character(self):
        with pytest.raises(ParseError):
            parse("x @ 1")


# ---------------------------------------------------------------------------
# round-trip property

_G = ex.CoefficientFunction("g", ex.add(1, ex.pow_(ex.T, 2)))


def _safe(builder, fallback):
    """Constructors validate aggressively (finite constants, defined
    powers); fall back to a harmless leaf when random pieces collide."""

    def build(args):
        try:
            return builder(*args) if isinstance(args, tuple) else builder(args)
        except (ValueError, OverflowError):
            return fallback

    return build


def _exprs(depth):
    leaves = st.one_of(
        st.sampled_from([ex.T, ex.X, ex.XDOT, ex.Coeff(_G, 0), ex.Coeff(_G, 1)]),
        st.integers(-4, 4).map(ex.const),
        st.floats(
            min_value=-4, max_value=4, allow_nan=False, allow_infinity=False
        ).map(ex.const),
    )
    if depth == 0:
        return leaves
    sub = _exprs(depth - 1)
    return st.one_of(
        leaves,
        st.tuples(sub, sub).map(_safe(ex.add, ex.X)),
        st.tuples(sub, sub).map(_safe(ex.mul, ex.X)),
        st.tuples(sub, sub).map(_safe(ex.sub, ex.X)),
        sub.map(_safe(ex.neg, ex.X)),
        st.tuples(sub, st.integers(-3, 3)).map(_safe(ex.pow_, ex.X)),
        sub.map(_safe(lambda e: ex.lnabs(ex.add(e, 5)), ex.X)),
        sub.map(_safe(ex.sin_, ex.X)),
        sub.map(_safe(ex.exp_, ex.X)),
        st.tuples(sub, sub).map(_safe(ex.div, ex.X)),
    )


@settings(max_examples=120, deadline=None)
@given(_exprs(3))
def test_print_parse_round_trip(e):
    text = ex.to_string(e)
    assert parse(text, expr_environment(e)) == e


def test_catalog_expressions_round_trip():
    from nullgauge import catalog

    bodies = [L.body for L in catalog.catalog_lagrangians().values()]
    bodies += [catalog.printed_form(i).printed for i in catalog.PRINTED_FORM_IDS]
    bodies += [catalog.printed_form(i).canonical for i in catalog.PRINTED_FORM_IDS]
    for e in bodies:
        assert parse(ex.to_string(e), expr_environment(e)) == e
