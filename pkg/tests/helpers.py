"""Shared numeric oracles, independent of the symbolic code paths they
check: central finite differences for partial derivatives, numeric path
derivatives for the total time derivative, and guarded point sampling."""

import math

import numpy as np

from nullgauge import expr as ex
from nullgauge.fuzz import FuzzConfig, guarded_samples
from nullgauge.program import compile_expr


def guarded_points(exprs, count=100, seed=11, delta=0.1):
    """Random points where every expression's denominators are safe."""
    cfg = FuzzConfig(samples=count, guard_delta=delta, seed=seed)
    programs = [compile_expr(e) for e in exprs]
    cols, _ = guarded_samples(cfg, programs)
    return cols


def binding_from_row(row):
    return ex.Binding({name: float(row[j]) for j, name in enumerate(ex.VARIABLES)})


def central_difference(e, var, row, h=1e-5):
    """Symmetric difference quotient of evaluate(e, .) along one variable."""
    j = ex.VAR_INDEX[var]
    hi = row.copy()
    lo = row.copy()
    step = h * max(1.0, abs(row[j]))
    hi[j] += step
    lo[j] -= step
    return (
        ex.evaluate(e, binding_from_row(hi)) - ex.evaluate(e, binding_from_row(lo))
    ) / (2.0 * step)


def assert_partial_matches_fd(e, var, count=100, seed=11, tol=1e-6):
    """The finite-difference oracle for partial()."""
    derivative = ex.partial(e, var)
    rows = guarded_points([e, derivative], count=count, seed=seed)
    for row in rows:
        symbolic = ex.evaluate(derivative, binding_from_row(row))
        numeric = central_difference(e, var, row)
        assert abs(symbolic - numeric) / max(1.0, abs(symbolic)) < tol, (
            f"d/d{var} mismatch at {row}: {symbolic} vs {numeric}"
        )


def path_state(t):
    """Smooth test path x(t) = sin t with its derivatives."""
    return math.sin(t), math.cos(t), -math.sin(t)


def assert_total_derivative_matches_path(e, tol=1e-5, n=60):
    """Numeric oracle for total_time_derivative along x(t) = sin t."""
    dt_expr = ex.total_time_derivative(e)
    h = 1e-6
    for t in np.linspace(0.3, 1.2, n):
        x, v, a = path_state(t)
        symbolic = ex.evaluate(
            dt_expr, ex.Binding({"t": t, "x": x, "xdot": v, "xddot": a})
        )

        def value_at(s):
            xs, vs, _ = path_state(s)
            return ex.evaluate(e, ex.Binding({"t": s, "x": xs, "xdot": vs}))

        numeric = (value_at(t + h) - value_at(t - h)) / (2.0 * h)
        assert abs(symbolic - numeric) < tol * max(1.0, abs(symbolic))


def expr_environment(e):
    """Coefficient environment for re-parsing printed expressions."""
    return {fn.name: fn for fn, _ in ex.coefficient_references(e)}
