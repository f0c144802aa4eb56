"""Forcing functions synthesised from gauge functions.

Two derivation routes are first class because they disagree for generic
coefficients:

* route A is the definitional chain F = -d/dx(dPhi/dt); its output never
  depends on the velocity.
* route B differentiates the published energy form (which carries an
  xdot term) with respect to x, so its output is velocity dependent.

The published two-term force expression is exposed as a third builder
("printed-eq9" provenance) in its expanded limit form, which stays
finite for constant coefficients and for h2 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import expr as ex
from .catalog import (
    CoefficientSet,
    expanded_force_general,
    printed_energy_general,
)
from .fuzz import DEFAULT_FUZZ, FuzzConfig, guarded_samples
from .program import compile_expr
from .variational import GaugeFunction, Lagrangian

PROVENANCES = (
    "route-A",
    "route-B",
    "printed-eq9",
    "effective-F1",
    "effective-F2",
    "special-case",
)


@dataclass(frozen=True)
class Classification:
    zero: bool
    time_only: bool
    position_dependent: bool
    velocity_dependent: bool
    dissipative: bool
    dependence_fractions: Mapping[str, float] = field(default_factory=dict)

    def flags(self) -> tuple:
        names = ("zero", "time-only", "position-dependent", "velocity-dependent")
        values = (self.zero, self.time_only, self.position_dependent,
                  self.velocity_dependent)
        return tuple(name for name, value in zip(names, values) if value)


@dataclass(frozen=True)
class ForceLaw:
    body: ex.Expr
    provenance: str
    source: str = ""
    classification: Optional[Classification] = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if ex.contains_variable(self.body, "xddot"):
            raise ValueError("a force law must not contain xddot")

    def to_json_dict(self) -> dict:
        flags = self.classification.flags() if self.classification else None
        return {
            "provenance": self.provenance,
            "expression": ex.to_string(self.body),
            "classification": list(flags) if flags is not None else None,
        }


def _gauge_source(phi: GaugeFunction) -> str:
    if phi.triple:
        return ", ".join(
            f"{fn.name}={ex.to_string(fn.definition)}" for fn in phi.triple
        )
    return f"Phi={ex.to_string(phi.body)}"


def force_from_gauge(phi: GaugeFunction, route: str = "A") -> ForceLaw:
    """Forcing function of a gauge along route A or B."""
    if route == "A":
        body = ex.neg(ex.partial(ex.partial(phi.body, "t"), "x"))
        return ForceLaw(body, "route-A", _gauge_source(phi))
    if route == "B":
        if not phi.triple:
            raise ValueError(
                "route B requires a gauge with an (h1, h2, h4) coefficient triple"
            )
        body = ex.partial(printed_energy_general(phi.triple), "x")
        return ForceLaw(body, "route-B", _gauge_source(phi))
    raise ValueError(f"unknown route {route!r} (expected 'A' or 'B')")


def force_printed(phi: GaugeFunction) -> ForceLaw:
    """The published two-term force in its expanded limit form."""
    if not phi.triple:
        raise ValueError(
            "the printed force requires a gauge with an (h1, h2, h4) triple"
        )
    return ForceLaw(
        expanded_force_general(phi.triple), "printed-eq9", _gauge_source(phi)
    )


def force_printed_limit(h1, h2, h4) -> ForceLaw:
    """Expanded printed force built directly from coefficient definitions.

    Unlike the gauge constructor this accepts h2 identically zero, where
    the limit is finite and the force depends on t alone.
    """
    fns = tuple(
        arg
        if isinstance(arg, ex.CoefficientFunction)
        else ex.CoefficientFunction(name, ex.as_expr(arg))
        for name, arg in (("h1", h1), ("h2", h2), ("h4", h4))
    )
    source = ", ".join(f"{fn.name}={ex.to_string(fn.definition)}" for fn in fns)
    return ForceLaw(expanded_force_general(fns), "printed-eq9", source)


def special_case_force(case: str, c1=1.0, c2=1.0, c4=1.0) -> ForceLaw:
    """The two published constant-coefficient special cases."""
    if case == "h4-zero":
        body = ex.neg(ex.div(ex.mul(c1, ex.XDOT), ex.X))
    elif case == "h4-const":
        body = ex.neg(
            ex.div(ex.mul(c1, c2, ex.XDOT), ex.add(ex.mul(c2, ex.X), c4))
        )
    else:
        raise ValueError(f"unknown special case {case!r}")
    return ForceLaw(body, "special-case", f"c1={c1}, c2={c2}, c4={c4}")


def total_lagrangian(lns: Lagrangian, phi: GaugeFunction) -> Lagrangian:
    """L_total = L_nonstandard - dPhi/dt.

    The added term never changes which accelerations multiply what: the
    Euler-Lagrange residual picks up exactly the route-A force with
    opposite sign.
    """
    if lns.kind != "non-standard":
        raise ValueError("the base Lagrangian must have kind 'non-standard'")
    body = ex.add(lns.body, ex.neg(ex.partial(phi.body, "t")))
    return Lagrangian(body, "total", dict(lns.parameters))


def effective_force(
    force: ForceLaw, set_id: int, coeffs: CoefficientSet
) -> ForceLaw:
    """Right-hand side of the driven equation of motion, as published.

    Set 1 multiplies by C1 [f xdot - a_o x + C2]^3; set 2 by C3 xdot^2/2.
    """
    if set_id == 1:
        if coeffs.set_id != "inertia-set-1":
            raise ValueError("set 1 requires inertia-set-1 coefficients")
        c1 = ex.Coeff(
            ex.constant_coefficient("C1", coeffs.constants["C1"]), 0
        )
        c2 = ex.Coeff(
            ex.constant_coefficient("C2", coeffs.constants["C2"]), 0
        )
        ao = ex.Coeff(
            ex.constant_coefficient("a_o", coeffs.constants["a_o"]), 0
        )
        vo = ex.Coeff(
            ex.constant_coefficient("v_o", coeffs.constants["v_o"]), 0
        )
        f = ex.Coeff(
            ex.CoefficientFunction("f", ex.add(ex.mul(ao, ex.T), vo)), 0
        )
        core = ex.add(ex.mul(f, ex.XDOT), ex.neg(ex.mul(ao, ex.X)), c2)
        body = ex.mul(force.body, c1, ex.pow_(core, 3))
        return ForceLaw(body, "effective-F1", force.source)
    if set_id == 2:
        if coeffs.set_id != "inertia-set-2":
            raise ValueError("set 2 requires inertia-set-2 coefficients")
        c3 = ex.Coeff(
            ex.constant_coefficient("C3", coeffs.constants["C3"]), 0
        )
        body = ex.mul(force.body, c3, ex.div(ex.pow_(ex.XDOT, 2), 2))
        return ForceLaw(body, "effective-F2", force.source)
    raise ValueError(f"unknown set {set_id!r} (expected 1 or 2)")


# ---------------------------------------------------------------------------
# classification

_DEPENDENCE_TOL = 1e-7
_FLAG_FRACTION = 0.05


def classify(force: ForceLaw, cfg: FuzzConfig = DEFAULT_FUZZ) -> Classification:
    """Numeric dependence flags for a force law.

    Per guarded sample, a variable counts as active when the symbolic
    partial derivative of the force with respect to it exceeds a small
    relative threshold; a flag is set when the active fraction of samples
    is itself non-negligible.  Dissipative follows the operational rule:
    explicitly velocity dependent.
    """
    body = force.body
    partials = {
        "t": ex.partial(body, "t"),
        "x": ex.partial(body, "x"),
        "xdot": ex.partial(body, "xdot"),
    }
    programs = [compile_expr(body)] + [compile_expr(p) for p in partials.values()]
    _, values = guarded_samples(cfg, programs)
    f_vals = values[0]
    scale = np.maximum(1.0, np.abs(f_vals))
    fractions = {}
    for name, vals in zip(partials.keys(), values[1:]):
        fractions[name] = float(np.mean(np.abs(vals) > _DEPENDENCE_TOL * scale))
    zero = bool(np.all(np.abs(f_vals) <= cfg.rel_tol * np.maximum(1.0, np.abs(f_vals))))
    velocity = fractions["xdot"] > _FLAG_FRACTION
    position = fractions["x"] > _FLAG_FRACTION
    if zero:
        velocity = position = False
    time_only = (not zero) and not velocity and not position
    return Classification(
        zero=zero,
        time_only=time_only,
        position_dependent=position,
        velocity_dependent=velocity,
        dissipative=velocity,
        dependence_fractions=fractions,
    )


def classified(force: ForceLaw, cfg: FuzzConfig = DEFAULT_FUZZ) -> ForceLaw:
    """Copy of the force law with its classification attached."""
    return ForceLaw(
        force.body, force.provenance, force.source, classify(force, cfg)
    )
