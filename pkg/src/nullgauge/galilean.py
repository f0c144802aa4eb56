"""Galilean boosts, form invariance of the inertia Lagrangian, and
invariance of equations of motion.

The boost between frames with relative velocity V0 substitutes
x -> x + V0 t, xdot -> xdot + V0 (direction "to-primed") or the inverse
x -> x - V0 t, xdot -> xdot - V0 ("to-unprimed"); time and acceleration
are unchanged.  The two directions are mutual inverses.

Form invariance is checked contravariantly: the question is for which
re-labelled parameters the boosted template reproduces the original
Lagrangian.  For the first-set inertia template the constant-term slot
solves in closed form, the extracted shift is C2' = C2 - v_o V0 for the
default direction, and the boosted template then matches exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import expr as ex
from .fuzz import DEFAULT_FUZZ, FuzzConfig, equivalent, guarded_samples
from .program import compile_expr
from .variational import Lagrangian


@dataclass(frozen=True)
class BoostParams:
    v0: float
    direction: str = "to-primed"  # or "to-unprimed"

    def __post_init__(self):
        if self.direction not in ("to-primed", "to-unprimed"):
            raise ValueError(f"unknown boost direction {self.direction!r}")

    @property
    def signed_v0(self) -> float:
        return self.v0 if self.direction == "to-primed" else -self.v0

    def inverse(self) -> "BoostParams":
        other = "to-unprimed" if self.direction == "to-primed" else "to-primed"
        return BoostParams(self.v0, other)


def boost(e: ex.Expr, p: BoostParams) -> ex.Expr:
    """Rewrite an expression in the boosted frame's variables."""
    v0 = p.signed_v0
    if v0 == 0.0:
        return e
    return ex.substitute_variables(
        e,
        {
            "x": ex.add(ex.X, ex.mul(v0, ex.T)),
            "xdot": ex.add(ex.XDOT, ex.const(v0)),
        },
    )


def translate(e: ex.Expr, offset: float) -> ex.Expr:
    """Spatial translation x -> x + offset (regression utility)."""
    if offset == 0.0:
        return e
    return ex.substitute_variables(e, {"x": ex.add(ex.X, ex.const(offset))})


@dataclass(frozen=True)
class ConditionCheck:
    id: str
    description: str
    holds: bool
    witness: Optional[dict] = None


@dataclass(frozen=True)
class InvarianceReport:
    v0: float
    direction: str
    verdict: str  # "holds" | "fails"
    conditions: Tuple[ConditionCheck, ...]
    parameter_map: Optional[dict]
    note: str = ""
    max_residual: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "conditions": [
                {
                    "id": c.id,
                    "description": c.description,
                    "holds": c.holds,
                    "witness": c.witness,
                }
                for c in self.conditions
            ],
            "verdict": self.verdict,
            "parameter_map": self.parameter_map,
            "V0": self.v0,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


def _fail_report(p, conditions, note) -> InvarianceReport:
    return InvarianceReport(p.v0, p.direction, "fails", tuple(conditions), None, note)


def check_form_invariance(
    L: Lagrangian, p: BoostParams, cfg: FuzzConfig = DEFAULT_FUZZ
) -> InvarianceReport:
    """Template-based form-invariance check under the boost.

    Supported templates: the first-set inertia Lagrangian (free
    parameters C1, C2, a_o, v_o) and the free standard Lagrangian (no
    free parameters).  Non-matchable structure is reported, not raised.
    """
    if L.template == "inertia-nsl":
        return _check_inertia_template(L, p, cfg)
    if L.template == "free-standard":
        return _check_fixed_template(L, p, cfg)
    return _fail_report(
        p,
        [
            ConditionCheck(
                "match",
                "expression matches a declared template with free parameters",
                False,
            )
        ],
        "no declared template with matchable parameters",
    )


def _check_fixed_template(L, p, cfg) -> InvarianceReport:
    result = equivalent(boost(L.body, p), L.body, cfg)
    condition = ConditionCheck(
        "match",
        "boosted expression reproduces the template (no free parameters)",
        bool(result),
        None if result else result.witness,
    )
    verdict = "holds" if result else "fails"
    note = "" if result else "no parameter absorbs the velocity cross-term"
    return InvarianceReport(
        p.v0, p.direction, verdict, (condition,),
        dict(L.parameters) if result else None, note, result.max_residual,
    )


def _inertia_template_body(C1, C2, a_o, v_o) -> ex.Expr:
    from .catalog import nsl_inertia_first

    return nsl_inertia_first(C1, C2, a_o, v_o).body


def _check_inertia_template(L, p, cfg) -> InvarianceReport:
    params = dict(L.parameters)
    missing = {"C1", "C2", "a_o", "v_o"} - set(params)
    if missing:
        return _fail_report(
            p,
            [ConditionCheck("match", "template parameters available", False)],
            f"missing template parameters {sorted(missing)}",
        )
    C1, C2, a_o, v_o = (params[k] for k in ("C1", "C2", "a_o", "v_o"))
    v0 = p.signed_v0

    # Solve the constant slot sample-wise: the boosted template equals
    # 1/(C1 f^2 [f xdot - a_o x + C2' + v_o V0]), so
    # C2' = 1/(C1 f^2 L) - (f xdot - a_o x) - v_o V0 must be constant.
    program = compile_expr(L.body)
    cols, (values,) = guarded_samples(cfg, [program])
    t = cols[:, 0]
    x = cols[:, 1]
    xdot = cols[:, 2]
    f = a_o * t + v_o
    with np.errstate(all="ignore"):
        slots = 1.0 / (C1 * f**2 * values) - (f * xdot - a_o * x) - v_o * v0
    finite = np.isfinite(slots)
    if not np.all(finite):
        return _fail_report(
            p,
            [ConditionCheck("match", "slot extraction is finite", False)],
            "constant-slot extraction failed (non-finite values)",
        )
    spread = float(slots.max() - slots.min())
    center = float(np.median(slots))
    if spread > 1e-6 * max(1.0, abs(center)):
        return _fail_report(
            p,
            [
                ConditionCheck(
                    "match",
                    "constant-term slot is constant across samples",
                    False,
                    {"spread": spread},
                )
            ],
            "expression does not fit the template shape",
        )
    c2_prime = center

    boosted_template = boost(_inertia_template_body(C1, c2_prime, a_o, v_o), p)
    match = equivalent(boosted_template, L.body, cfg)
    shift_residual = abs(c2_prime + v_o * v0 - C2)
    cond_iii_holds = shift_residual <= 1e-8 * max(1.0, abs(C2))
    conditions = (
        ConditionCheck(
            "i",
            "f' = f: a_o and v_o unchanged (verified through the template match)",
            bool(match),
            None if match else match.witness,
        ),
        ConditionCheck(
            "ii",
            "C1' = C1 (verified through the template match)",
            bool(match),
            None if match else match.witness,
        ),
        ConditionCheck(
            "iii",
            "C2' + v_o*V0 = C2 (constant shifted by the boost)",
            cond_iii_holds,
            None
            if cond_iii_holds
            else {"C2_prime": c2_prime, "expected": C2 - v_o * v0},
        ),
    )
    overall = bool(match) and cond_iii_holds
    parameter_map = {"C1": C1, "C2": c2_prime, "a_o": a_o, "v_o": v_o}
    return InvarianceReport(
        p.v0,
        p.direction,
        "holds" if overall else "fails",
        conditions,
        parameter_map if overall else None,
        "" if overall else "boosted template does not reproduce the original",
        match.max_residual,
    )


@dataclass(frozen=True)
class EomInvariance:
    invariant: bool
    max_residual: float
    witness: Optional[dict] = None

    def __bool__(self):
        return self.invariant


def check_eom_invariance(
    accel: ex.Expr, p: BoostParams, cfg: FuzzConfig = DEFAULT_FUZZ
) -> EomInvariance:
    """The law xddot = accel is invariant iff the boosted right-hand side
    is the same function of the new variables."""
    result = equivalent(boost(accel, p), accel, cfg)
    return EomInvariance(bool(result), result.max_residual, result.witness)
