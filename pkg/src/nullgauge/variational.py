"""Variational calculus: Euler-Lagrange operator, energy function, null
tests, gauge lifting and acceleration extraction.

For a first-order Lagrangian L(xdot, x, t) the Euler-Lagrange residual
EL[L] = d/dt(dL/dxdot) - dL/dx is exactly affine in the acceleration:

    EL[L] = A(x, xdot, t) * xddot + B(x, xdot, t)

with A = d2L/dxdot2 and B = xdot * d2L/dxdot dx + d2L/dxdot dt - dL/dx.
The null test and the acceleration solver both work on this (A, B)
decomposition, which removes the spurious xddot degree of freedom.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Tuple

from . import expr as ex
from .errors import DegenerateLagrangianError
from .fuzz import DEFAULT_FUZZ, FuzzConfig, equivalent

KINDS = ("standard", "non-standard", "null", "total")


@dataclass(frozen=True)
class Lagrangian:
    body: ex.Expr
    kind: str
    parameters: Mapping[str, float] = field(default_factory=dict)
    template: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown Lagrangian kind {self.kind!r}")
        if ex.contains_variable(self.body, "xddot"):
            raise ValueError("Lagrangian body must not contain xddot")


@dataclass(frozen=True)
class GaugeFunction:
    """Scalar Phi(x, t); its total time derivative is a null Lagrangian."""

    body: ex.Expr
    triple: Optional[Tuple[ex.CoefficientFunction, ...]] = None

    def __post_init__(self):
        bad = ex.free_variables(self.body) & {"xdot", "xddot"}
        if bad:
            raise ValueError(f"gauge function depends on {sorted(bad)}")


@dataclass(frozen=True)
class EulerLagrange:
    """EL residual with its affine decomposition in the acceleration."""

    expr: ex.Expr
    accel_coeff: ex.Expr  # A: multiplies xddot
    rest: ex.Expr  # B: everything else


def euler_lagrange(L: Lagrangian) -> EulerLagrange:
    p_v = ex.partial(L.body, "xdot")
    a = ex.partial(p_v, "xdot")
    b = ex.add(
        ex.mul(ex.XDOT, ex.partial(p_v, "x")),
        ex.partial(p_v, "t"),
        ex.neg(ex.partial(L.body, "x")),
    )
    return EulerLagrange(ex.add(ex.mul(a, ex.XDDOT), b), a, b)


def energy_function(L: Lagrangian) -> ex.Expr:
    """E = xdot * dL/dxdot - L (free of xddot)."""
    return ex.add(ex.mul(ex.XDOT, ex.partial(L.body, "xdot")), ex.neg(L.body))


def energy_rate_residual(L: Lagrangian) -> ex.Expr:
    """dE/dt + dL/dt - xdot * EL[L]; identically zero for any Lagrangian.

    This off-shell identity exercises the entire differentiation stack;
    on solutions (EL = 0) it reduces to energy balance dE/dt = -dL/dt.
    """
    energy = energy_function(L)
    residual = euler_lagrange(L).expr
    return ex.add(
        ex.total_time_derivative(energy),
        ex.partial(L.body, "t"),
        ex.neg(ex.mul(ex.XDOT, residual)),
    )


@dataclass(frozen=True)
class NullVerdict:
    null: bool
    witness_component: Optional[str] = None  # "accel_coeff" or "rest"
    witness: Optional[dict] = None
    max_residual: float = 0.0

    def __bool__(self):
        return self.null


def is_null(L: Lagrangian, cfg: FuzzConfig = DEFAULT_FUZZ) -> NullVerdict:
    """Null iff both affine EL components vanish on the guarded box."""
    el = euler_lagrange(L)
    check_a = equivalent(el.accel_coeff, ex.ZERO, cfg)
    if not check_a:
        return NullVerdict(False, "accel_coeff", check_a.witness, check_a.max_residual)
    check_b = equivalent(el.rest, ex.ZERO, cfg)
    if not check_b:
        return NullVerdict(False, "rest", check_b.witness, check_b.max_residual)
    return NullVerdict(True, max_residual=max(check_a.max_residual, check_b.max_residual))


def lift_gauge(phi: GaugeFunction) -> Lagrangian:
    """Total time derivative of the gauge, packaged as a null Lagrangian."""
    body = ex.add(
        ex.mul(ex.partial(phi.body, "x"), ex.XDOT),
        ex.partial(phi.body, "t"),
    )
    return Lagrangian(body, "null")


def gauge_energy(phi: GaugeFunction) -> ex.Expr:
    """Energy of the lifted gauge: -dPhi/dt, an expression in (x, t)."""
    return ex.neg(ex.partial(phi.body, "t"))


def solve_for_acceleration(
    L: Lagrangian, cfg: FuzzConfig = DEFAULT_FUZZ
) -> ex.Expr:
    """Invert the affine EL decomposition: xddot = -B/A.

    Raises DegenerateLagrangianError when A vanishes identically,
    distinguishing the null case (B also vanishes: no dynamics at all)
    from the constraint case (B survives).
    """
    el = euler_lagrange(L)
    a_zero = equivalent(el.accel_coeff, ex.ZERO, cfg)
    if a_zero:
        b_zero = equivalent(el.rest, ex.ZERO, cfg)
        if b_zero:
            raise DegenerateLagrangianError(
                "null Lagrangian: the Euler-Lagrange residual vanishes "
                "identically, there is no equation of motion"
            )
        raise DegenerateLagrangianError(
            "degenerate Lagrangian: the acceleration coefficient vanishes "
            "but the remainder does not (constraint, not dynamics)"
        )
    return ex.div(ex.neg(el.rest), el.accel_coeff)
