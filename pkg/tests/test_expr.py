import pytest

from nullgauge import expr as ex
from nullgauge.errors import SingularPointError, UnboundSymbolError

from helpers import (
    assert_partial_matches_fd,
    assert_total_derivative_matches_path,
    binding_from_row,
    guarded_points,
)


def _coeff(name, definition):
    return ex.Coeff(ex.CoefficientFunction(name, definition), 0)


class TestConstruction:
    def test_flattening_preserves_order(self):
        a, b, c = ex.T, ex.X, ex.XDOT
        assert ex.add(ex.add(a, b), c) == ex.add(a, b, c)
        assert ex.mul(ex.mul(a, b), c) == ex.mul(a, b, c)

    def test_zero_and_unit_folding(self):
        assert ex.add(ex.mul(0, ex.XDOT), ex.X) == ex.X
        assert ex.mul(1, ex.X) == ex.X
        assert ex.mul(0, ex.div(1, ex.X)) == ex.ZERO
        assert ex.pow_(ex.X, 1) == ex.X
        assert ex.pow_(ex.X, 0) == ex.ONE

    def test_division_by_constant_becomes_product(self):
        e = ex.div(ex.pow_(ex.XDOT, 2), 2)
        assert e == ex.mul(0.5, ex.pow_(ex.XDOT, 2))

    def test_constant_zero_denominator_rejected(self):
        with pytest.raises(ValueError):
            ex.div(ex.X, 0)

    def test_neg_folding(self):
        assert ex.neg(ex.neg(ex.X)) == ex.X
        assert ex.neg(ex.const(2)) == ex.const(-2)

    def test_structural_equality_and_hash(self):
        e1 = ex.add(ex.X, ex.mul(2, ex.T))
        e2 = ex.add(ex.X, ex.mul(2, ex.T))
        assert e1 == e2
        assert hash(e1) == hash(e2)
        assert e1 != ex.add(ex.X, ex.mul(3, ex.T))
        assert len({e1, e2}) == 1

    def test_operator_overloading(self):
        e = ex.XDOT**2 / 2 + ex.X * 3 - 1
        b = ex.Binding({"x": 1.0, "xdot": 2.0})
        assert ex.evaluate(e, b) == 4.0

    def test_coefficient_definition_must_be_time_only(self):
        with pytest.raises(ValueError):
            ex.CoefficientFunction("bad", ex.X)


class TestEvaluate:
    def test_kinetic_term(self):
        e = ex.div(ex.pow_(ex.XDOT, 2), 2)
        assert ex.evaluate(e, ex.Binding({"xdot": 2.0})) == 2.0

    def test_reciprocal_velocity(self):
        c3 = _coeff("C3", ex.const(1.0))
        e = ex.div(1, ex.mul(c3, ex.XDOT))
        assert ex.evaluate(e, ex.Binding({"xdot": 2.0})) == 0.5

    def test_log_of_zero_is_singular(self):
        h2 = _coeff("h2", ex.const(1.0))
        h4 = _coeff("h4", ex.const(0.0))
        e = ex.lnabs(ex.add(ex.mul(h2, ex.X), h4))
        with pytest.raises(SingularPointError):
            ex.evaluate(e, ex.Binding({"x": 0.0}))

    def test_division_by_zero_reports_denominator(self):
        e = ex.div(1, ex.X)
        with pytest.raises(SingularPointError) as err:
            ex.evaluate(e, ex.Binding({"x": 0.0}))
        assert "x" in str(err.value)

    def test_unbound_symbol(self):
        with pytest.raises(UnboundSymbolError):
            ex.evaluate(ex.X, ex.Binding({}))

    def test_coefficient_numeric_binding(self):
        g = ex.CoefficientFunction("g", ex.pow_(ex.T, 3))
        b = ex.Binding({"t": 10.0}, {"g": (2.0, 5.0, 7.0)})
        assert ex.evaluate(ex.Coeff(g, 0), b) == 2.0
        assert ex.evaluate(ex.Coeff(g, 1), b) == 5.0
        assert ex.evaluate(ex.Coeff(g, 2), b) == 7.0
        with pytest.raises(UnboundSymbolError):
            ex.evaluate(ex.Coeff(g, 3), b)

    def test_coefficient_deferred_to_definition(self):
        g = ex.CoefficientFunction("g", ex.pow_(ex.T, 3))
        b = ex.Binding({"t": 2.0})
        assert ex.evaluate(ex.Coeff(g, 0), b) == 8.0
        assert ex.evaluate(ex.Coeff(g, 1), b) == 12.0
        assert ex.evaluate(ex.Coeff(g, 2), b) == 12.0

    def test_odd_root_of_negative(self):
        e = ex.Pow(ex.X, __import__("fractions").Fraction(1, 3))
        assert ex.evaluate(e, ex.Binding({"x": -8.0})) == -2.0


class TestPartial:
    def test_power_rule(self):
        e = ex.div(ex.pow_(ex.XDOT, 2), 2)
        assert ex.partial(e, "xdot") == ex.XDOT

    def test_variables_are_independent(self):
        assert ex.partial(ex.X, "t") == ex.ZERO
        assert ex.partial(ex.X, "x") == ex.ONE

    def test_log_derivative_closed_form(self):
        a2 = _coeff("a2", ex.const(1.0))
        a4 = _coeff("a4", ex.const(0.5))
        core = ex.add(ex.mul(a2, ex.X), a4)
        assert ex.partial(ex.lnabs(core), "x") == ex.div(a2, core)

    def test_reciprocal_linear_form_derivative(self):
        g1 = _coeff("g1", ex.add(2, ex.T))
        g2 = _coeff("g2", ex.const(1.0))
        g3 = _coeff("g3", ex.const(3.0))
        den = ex.add(ex.mul(g1, ex.XDOT), ex.mul(g2, ex.X), g3)
        e = ex.div(1, den)
        expected = ex.div(ex.neg(g1), ex.pow_(den, 2))
        assert ex.partial(e, "xdot") == expected
        assert_partial_matches_fd(e, "xdot")

    @pytest.mark.parametrize("var", ["t", "x", "xdot"])
    def test_finite_difference_oracle(self, var):
        h1 = _coeff("h1", ex.add(2, ex.div(ex.T, 2)))
        h2 = _coeff("h2", ex.add(3, ex.div(ex.pow_(ex.T, 2), 4)))
        h4 = _coeff("h4", ex.add(2, ex.div(ex.T, 3)))
        e = ex.mul(
            ex.div(h1, h2), ex.lnabs(ex.add(ex.mul(h2, ex.X), h4))
        ) + ex.div(ex.pow_(ex.XDOT, 2), 2) + ex.exp_(ex.mul(0.3, ex.T)) * ex.sin_(ex.X)
        assert_partial_matches_fd(e, var)

    def test_linearity_structural_after_fold(self):
        e1 = ex.pow_(ex.X, 3)
        e2 = ex.sin_(ex.X)
        combined = ex.partial(ex.add(ex.mul(2, e1), ex.mul(3, e2)), "x")
        separate = ex.add(
            ex.mul(2, ex.partial(e1, "x")), ex.mul(3, ex.partial(e2, "x"))
        )
        assert combined == separate

    def test_mixed_partials_commute_numerically(self):
        h1 = _coeff("h1", ex.add(2, ex.div(ex.T, 2)))
        h2 = _coeff("h2", ex.add(3, ex.div(ex.pow_(ex.T, 2), 4)))
        h4 = _coeff("h4", ex.add(2, ex.div(ex.T, 3)))
        phi = ex.mul(ex.div(h1, h2), ex.lnabs(ex.add(ex.mul(h2, ex.X), h4)))
        xt = ex.partial(ex.partial(phi, "x"), "t")
        tx = ex.partial(ex.partial(phi, "t"), "x")
        rows = guarded_points([xt, tx], count=60, seed=3)
        for row in rows:
            b = binding_from_row(row)
            lhs = ex.evaluate(xt, b)
            rhs = ex.evaluate(tx, b)
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


class TestTotalTimeDerivative:
    def test_position(self):
        assert ex.total_time_derivative(ex.X) == ex.XDOT

    def test_rejects_xddot(self):
        with pytest.raises(ValueError):
            ex.total_time_derivative(ex.XDDOT)

    def test_constant_gauge_gives_null_body(self):
        a1 = _coeff("a1", ex.const(1.0))
        a2 = _coeff("a2", ex.const(1.0))
        a4 = _coeff("a4", ex.const(0.5))
        phi = ex.mul(ex.div(a1, a2), ex.lnabs(ex.add(ex.mul(a2, ex.X), a4)))
        from nullgauge.fuzz import equivalent

        lifted = ex.total_time_derivative(phi)
        target = ex.div(
            ex.mul(a1, ex.XDOT), ex.add(ex.mul(a2, ex.X), a4)
        )
        assert equivalent(lifted, target).equivalent

    @pytest.mark.parametrize(
        "e",
        [
            ex.pow_(ex.X, 2),
            ex.mul(ex.T, ex.X),
            ex.add(ex.sin_(ex.X), ex.exp_(ex.mul(0.2, ex.T))),
            ex.div(ex.XDOT, ex.add(ex.X, 3)),
        ],
    )
    def test_path_oracle(self, e):
        assert_total_derivative_matches_path(e)

    def test_coefficient_chain_rule(self):
        g = ex.CoefficientFunction("g", ex.pow_(ex.T, 2))
        e = ex.mul(ex.Coeff(g, 0), ex.X)
        d = ex.total_time_derivative(e)
        value = ex.evaluate(d, ex.Binding({"t": 3.0, "x": 2.0, "xdot": 5.0,
                                           "xddot": 0.0}))
        # d/dt (g x) = g' x + g xdot = 6*2 + 9*5
        assert value == pytest.approx(57.0)


class TestSubstitutionAndInlining:
    def test_substitute_rebuilds(self):
        e = ex.add(ex.X, ex.mul(2, ex.XDOT))
        swapped = ex.substitute_variables(e, {"x": ex.ZERO})
        assert swapped == ex.mul(2, ex.XDOT)

    def test_inline_nested_coefficients(self):
        inner = ex.CoefficientFunction("f", ex.add(ex.T, 1))
        outer = ex.CoefficientFunction(
            "g", ex.mul(2, ex.pow_(ex.Coeff(inner, 0), 2))
        )
        inlined = ex.inline_coefficients(ex.Coeff(outer, 0))
        assert ex.free_variables(inlined) == frozenset({"t"})
        value = ex.evaluate(inlined, ex.Binding({"t": 2.0}))
        assert value == 18.0

    def test_derivative_of_constant_coefficient_collapses(self):
        c = ex.constant_coefficient("C1", 4.0)
        assert ex.partial(ex.Coeff(c, 0), "t") == ex.ZERO
