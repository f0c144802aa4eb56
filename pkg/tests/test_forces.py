import pytest

from nullgauge import catalog, expr as ex, forces
from nullgauge.fuzz import FuzzConfig, equivalent
from nullgauge.variational import (
    GaugeFunction,
    euler_lagrange,
    solve_for_acceleration,
)

CFG = FuzzConfig(samples=400, seed=19)


def _core():
    h2 = ex.Coeff(catalog.CHECK_H2, 0)
    h4 = ex.Coeff(catalog.CHECK_H4, 0)
    return ex.add(ex.mul(h2, ex.X), h4)


class TestRoutes:
    def test_product_gauge_gives_constant_force(self):
        phi = GaugeFunction(ex.mul(ex.X, ex.T))
        force = forces.force_from_gauge(phi, "A")
        assert force.body == ex.const(-1.0)
        assert force.provenance == "route-A"

    def test_constant_triple_route_a_is_exactly_zero(self):
        phi, _ = catalog.null_basic(2.0, 1.0, 3.0)
        force = forces.force_from_gauge(phi, "A")
        assert force.body == ex.ZERO
        classification = forces.classify(force, CFG)
        assert classification.zero
        assert not classification.dissipative
        assert classification.flags() == ("zero",)

    def test_route_a_is_velocity_free_structurally(self):
        force = forces.force_from_gauge(catalog.check_gauge(), "A")
        assert "xdot" not in ex.free_variables(force.body)

    def test_route_b_requires_triple(self):
        with pytest.raises(ValueError):
            forces.force_from_gauge(GaugeFunction(ex.mul(ex.X, ex.T)), "B")

    def test_unknown_route(self):
        with pytest.raises(ValueError):
            forces.force_from_gauge(catalog.check_gauge(), "C")

    def test_route_difference_is_velocity_term(self):
        phi = catalog.check_gauge()
        fa = forces.force_from_gauge(phi, "A")
        fb = forces.force_from_gauge(phi, "B")
        h1 = ex.Coeff(catalog.CHECK_H1, 0)
        h2 = ex.Coeff(catalog.CHECK_H2, 0)
        expected = ex.div(ex.mul(h1, h2, ex.XDOT), ex.pow_(_core(), 2))
        result = equivalent(ex.sub(fb.body, fa.body), expected, CFG)
        assert result.equivalent

    def test_expanded_printed_force_equals_verbatim(self):
        triple = (catalog.CHECK_H1, catalog.CHECK_H2, catalog.CHECK_H4)
        result = equivalent(
            catalog.printed_force_general(triple),
            catalog.expanded_force_general(triple),
            CFG,
        )
        assert result.equivalent

    def test_printed_limit_with_zero_h2_is_time_only(self):
        force = forces.force_printed_limit(ex.add(1, ex.T), 0, ex.add(2, ex.T))
        classification = forces.classify(force, CFG)
        assert classification.flags() == ("time-only",)


class TestSpecialCases:
    def test_h4_zero_case(self):
        force = forces.special_case_force("h4-zero", c1=1.0)
        assert force.body == ex.neg(ex.div(ex.XDOT, ex.X))
        classification = forces.classify(force, CFG)
        assert classification.velocity_dependent
        assert classification.position_dependent
        assert classification.dissipative

    def test_h4_const_case(self):
        force = forces.special_case_force("h4-const", c1=1.0, c2=1.0, c4=1.0)
        expected = ex.neg(ex.div(ex.XDOT, ex.add(ex.X, 1)))
        assert equivalent(force.body, expected, CFG).equivalent

    def test_unknown_case(self):
        with pytest.raises(ValueError):
            forces.special_case_force("h4-cubed")


class TestTotalLagrangian:
    def test_time_independent_gauge_changes_nothing(self):
        phi, _ = catalog.null_basic(2.0, 1.0, 3.0)
        base = catalog.nsl_inertia_first()
        total = forces.total_lagrangian(base, phi)
        assert total.body == base.body
        assert total.kind == "total"

    def test_requires_non_standard_base(self):
        with pytest.raises(ValueError):
            forces.total_lagrangian(catalog.standard_inertia(), catalog.check_gauge())

    def test_el_additivity(self):
        phi = catalog.check_gauge()
        base = catalog.nsl_inertia_first()
        total = forces.total_lagrangian(base, phi)
        gauge_term = ex.partial(ex.partial(phi.body, "t"), "x")
        result = equivalent(
            euler_lagrange(total).expr,
            ex.add(euler_lagrange(base).expr, gauge_term),
            CFG.with_(rel_tol=1e-9),
        )
        assert result.equivalent

    def test_gauge_force_enters_with_route_a_sign(self):
        phi = catalog.check_gauge()
        base = catalog.nsl_inertia_first()
        total = forces.total_lagrangian(base, phi)
        force = forces.force_from_gauge(phi, "A")
        rearranged = ex.add(euler_lagrange(total).expr, force.body)
        result = equivalent(
            rearranged, euler_lagrange(base).expr, CFG.with_(rel_tol=1e-9)
        )
        assert result.equivalent


class TestEffectiveForces:
    def test_zero_force_stays_zero(self):
        zero = forces.ForceLaw(ex.ZERO, "route-A")
        f1 = forces.effective_force(zero, 1, catalog.inertia_set1())
        f2 = forces.effective_force(zero, 2, catalog.inertia_set2())
        assert f1.body == ex.ZERO
        assert f2.body == ex.ZERO

    def test_unit_force_substitution(self):
        minus_one = forces.ForceLaw(ex.const(-1.0), "route-A")
        f1 = forces.effective_force(
            minus_one, 1, catalog.inertia_set1(C1=1.0, C2=0.0, a_o=1.0, v_o=1.0)
        )
        expected = ex.neg(
            ex.pow_(
                ex.add(ex.mul(ex.add(ex.T, 1), ex.XDOT), ex.neg(ex.X)), 3
            )
        )
        assert equivalent(f1.body, expected, CFG).equivalent
        assert f1.provenance == "effective-F1"

    def test_mismatched_set_rejected(self):
        force = forces.ForceLaw(ex.ZERO, "route-A")
        with pytest.raises(ValueError):
            forces.effective_force(force, 1, catalog.inertia_set2())
        with pytest.raises(ValueError):
            forces.effective_force(force, 3, catalog.inertia_set1())

    def test_first_set_published_force_is_twice_the_derived_acceleration(self):
        phi = catalog.check_gauge()
        base = catalog.nsl_inertia_first()
        total = forces.total_lagrangian(base, phi)
        accel = solve_for_acceleration(total, CFG)
        force_a = forces.force_from_gauge(phi, "A")
        f1 = forces.effective_force(force_a, 1, catalog.inertia_set1())
        result = equivalent(f1.body, ex.mul(2, accel), CFG.with_(rel_tol=1e-7))
        assert result.equivalent

    def test_second_set_acceleration_equals_published_force_times_velocity(self):
        phi = catalog.check_gauge()
        base = catalog.nsl_inertia_second()
        total = forces.total_lagrangian(base, phi)
        accel = solve_for_acceleration(total, CFG)
        force_a = forces.force_from_gauge(phi, "A")
        f2 = forces.effective_force(force_a, 2, catalog.inertia_set2())
        result = equivalent(
            accel, ex.mul(f2.body, ex.XDOT), CFG.with_(rel_tol=1e-7)
        )
        assert result.equivalent


class TestClassification:
    def test_printed_route_generic_force_is_dissipative(self):
        classification = forces.classify(
            forces.force_printed(catalog.check_gauge()), CFG
        )
        assert classification.dissipative
        assert classification.dependence_fractions["xdot"] >= 0.99

    def test_route_a_never_velocity_dependent(self):
        classification = forces.classify(
            forces.force_from_gauge(catalog.check_gauge(), "A"), CFG
        )
        assert not classification.velocity_dependent
        assert classification.dependence_fractions["xdot"] == 0.0

    def test_effective_forces_from_printed_route_are_dissipative(self):
        phi = catalog.check_gauge()
        printed = forces.force_printed(phi)
        f1 = forces.effective_force(printed, 1, catalog.inertia_set1())
        f2 = forces.effective_force(printed, 2, catalog.inertia_set2())
        for force in (f1, f2):
            assert forces.classify(force, CFG).dissipative

    def test_force_law_serialization(self):
        force = forces.classified(forces.special_case_force("h4-zero"), CFG)
        payload = force.to_json_dict()
        assert payload["provenance"] == "special-case"
        assert "xdot" in payload["expression"]
        assert "velocity-dependent" in payload["classification"]

    def test_invalid_provenance_rejected(self):
        with pytest.raises(ValueError):
            forces.ForceLaw(ex.ZERO, "route-Z")

    def test_force_with_xddot_rejected(self):
        with pytest.raises(ValueError):
            forces.ForceLaw(ex.XDDOT, "route-A")
