"""Command-line surface: verify, derive, simulate, boost.

Exit codes: 0 success, 1 invariant failure, 2 configuration error,
3 runtime singularity.  All reports are written atomically (temp file +
rename) and are byte-identical across runs for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np

from . import catalog, expr as ex, forces, galilean
from .dynamics import (
    IntegratorConfig,
    diagnostics,
    diagnostics_csv,
    integrate,
    trajectory_csv,
)
from .errors import (
    DegenerateLagrangianError,
    ImmediateSingularityError,
    NullgaugeError,
)
from .fuzz import FuzzConfig, equivalent, guarded_samples
from .parse import parse
from .program import compile_expr
from .simplify import simplify
from .variational import (
    GaugeFunction,
    Lagrangian,
    energy_function,
    energy_rate_residual,
    euler_lagrange,
    gauge_energy,
    is_null,
    lift_gauge,
    solve_for_acceleration,
)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_SINGULARITY = 3

DEFAULT_SCENARIO = {
    "lagrangian": {"form": "nsl-set1"},
    "gauge": {"h1": "2 + t/2", "h2": "3 + t^2/4", "h4": "2 + t/3"},
    "route": "eq9",
    "set": 1,
    "dynamics": "lagrangian",
    "ics": [1.0, 1.0],
    "integrator": {"method": "rk4", "step": 1e-3, "t_span": [0.0, 2.0]},
    "boost": {"v0": [-2.0, -1.0, 0.5, 1.0, 2.0], "direction": "to-primed"},
    "seed": 42,
}


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# scenario handling


class ScenarioError(NullgaugeError):
    pass


def load_scenario(path: Optional[str]) -> dict:
    scenario = json.loads(json.dumps(DEFAULT_SCENARIO))  # deep copy
    if path is None:
        return scenario
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as err:
        raise ScenarioError(f"cannot read scenario file: {err}") from err
    except json.JSONDecodeError as err:
        raise ScenarioError(f"scenario file is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must hold a JSON object")
    unknown = set(data) - {
        "lagrangian",
        "gauge",
        "accel",
        "route",
        "set",
        "dynamics",
        "ics",
        "integrator",
        "boost",
        "seed",
        "samples",
        "constants",
        "coefficients",
    }
    if unknown:
        raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
    scenario.update(data)
    return scenario


def _coefficient_env(scenario) -> dict:
    env = {}
    for name, value in (scenario.get("constants") or {}).items():
        env[name] = ex.constant_coefficient(name, float(value))
    for name, text in (scenario.get("coefficients") or {}).items():
        definition = parse(text, env)
        env[name] = ex.CoefficientFunction(name, definition)
    return env


def scenario_gauge(scenario) -> GaugeFunction:
    spec = scenario.get("gauge") or DEFAULT_SCENARIO["gauge"]
    env = _coefficient_env(scenario)
    try:
        h1 = parse(spec["h1"], env)
        h2 = parse(spec["h2"], env)
        h4 = parse(spec["h4"], env)
    except KeyError as err:
        raise ScenarioError(f"gauge scenario missing {err}") from err
    return catalog.gauge_general(h1, h2, h4)


def scenario_lagrangian(scenario) -> Lagrangian:
    spec = scenario.get("lagrangian") or DEFAULT_SCENARIO["lagrangian"]
    form = spec.get("form", "nsl-set1")
    constants = spec.get("constants", {})
    if form == "standard":
        return catalog.standard_inertia()
    if form == "nsl-set1":
        return catalog.nsl_inertia_first(
            constants.get("C1", 1.0),
            constants.get("C2", 1.0),
            constants.get("a_o", 1.0),
            constants.get("v_o", 1.0),
        )
    if form == "nsl-set2":
        return catalog.nsl_inertia_second(constants.get("C3", 1.0))
    if form == "nsl-general":
        env = _coefficient_env(scenario)
        try:
            set_ = catalog.custom_set(
                parse(spec["g1"], env), parse(spec["g2"], env), parse(spec["g3"], env)
            )
        except KeyError as err:
            raise ScenarioError(f"nsl-general scenario missing {err}") from err
        return catalog.nsl_general(set_)
    if form == "custom":
        env = _coefficient_env(scenario)
        if "body" not in spec:
            raise ScenarioError("custom Lagrangian scenario requires 'body'")
        return Lagrangian(parse(spec["body"], env), "non-standard")
    raise ScenarioError(f"unknown Lagrangian form {form!r}")


def scenario_force(scenario) -> forces.ForceLaw:
    route = scenario.get("route", "eq9")
    phi = scenario_gauge(scenario)
    if route == "A":
        return forces.force_from_gauge(phi, "A")
    if route == "B":
        return forces.force_from_gauge(phi, "B")
    if route == "eq9":
        return forces.force_printed(phi)
    raise ScenarioError(f"unknown route {route!r} (expected A, B or eq9)")


def _coefficient_set(scenario) -> catalog.CoefficientSet:
    set_id = int(scenario.get("set", 1))
    spec = scenario.get("lagrangian") or {}
    constants = spec.get("constants", {})
    if set_id == 1:
        return catalog.inertia_set1(
            constants.get("C1", 1.0),
            constants.get("C2", 1.0),
            constants.get("a_o", 1.0),
            constants.get("v_o", 1.0),
        )
    if set_id == 2:
        return catalog.inertia_set2(constants.get("C3", 1.0))
    raise ScenarioError(f"unknown coefficient set {set_id!r}")


def scenario_acceleration(scenario):
    """Resolve the acceleration expression and, when available, the
    Lagrangian used for diagnostics.  Returns (accel, lagrangian)."""
    env = _coefficient_env(scenario)
    if "accel" in scenario:
        return parse(scenario["accel"], env), None
    dynamics_mode = scenario.get("dynamics", "lagrangian")
    if "gauge" in scenario or "lagrangian" in scenario:
        base = scenario_lagrangian(scenario)
        if base.kind != "non-standard":
            accel = solve_for_acceleration(base)
            return accel, base
        phi = scenario_gauge(scenario)
        total = forces.total_lagrangian(base, phi)
        if dynamics_mode == "effective":
            force = scenario_force(scenario)
            effective = forces.effective_force(
                force, int(scenario.get("set", 1)), _coefficient_set(scenario)
            )
            return effective.body, total
        accel = solve_for_acceleration(total)
        return accel, total
    raise ScenarioError("scenario provides neither accel, gauge nor lagrangian")


def _integrator_config(scenario) -> IntegratorConfig:
    spec = scenario.get("integrator") or {}
    t_span = spec.get("t_span", [0.0, 2.0])
    return IntegratorConfig(
        method=spec.get("method", "rk4"),
        step=float(spec.get("step", 1e-3)),
        tolerance=float(spec.get("tolerance", 1e-8)),
        t_span=(float(t_span[0]), float(t_span[1])),
        guard_delta=float(spec.get("guard", 1e-6)),
        max_steps=int(spec.get("max_steps", 2_000_000)),
    )


def _fuzz_config(scenario, seed_override=None) -> FuzzConfig:
    seed = seed_override if seed_override is not None else scenario.get("seed", 42)
    samples = int(scenario.get("samples", 1000))
    return FuzzConfig(samples=samples, seed=int(seed))


# ---------------------------------------------------------------------------
# verify


def _invariant_suite(cfg: FuzzConfig):
    """Definitional identities of the calculus; all must pass."""
    quick = cfg.with_(samples=min(cfg.samples, 400))
    tight = quick.with_(rel_tol=1e-10)
    rate = quick.with_(rel_tol=1e-9)
    results = []

    def record(name, passed, detail=""):
        results.append({"name": name, "passed": bool(passed), "detail": detail})

    phi = catalog.check_gauge()
    phi_const, null_const = catalog.null_basic(2.0, 1.0, 3.0)
    gauges = [
        phi,
        phi_const,
        catalog.gauge_general(ex.T, ex.add(1, ex.pow_(ex.T, 2)), ex.sin_(ex.T)),
    ]

    ok = True
    worst = 0.0
    for g in gauges:
        verdict = is_null(lift_gauge(g), quick)
        ok &= verdict.null
        worst = max(worst, verdict.max_residual)
    record("null-lift-closure", ok, f"max residual {worst!r}")

    ok = True
    worst = 0.0
    for g in gauges:
        res = equivalent(energy_function(lift_gauge(g)), gauge_energy(g), tight)
        ok &= res.equivalent
        worst = max(worst, res.max_residual)
    record("gauge-energy-identity", ok, f"max residual {worst!r}")

    record(
        "time-independent-gauge-energy-zero",
        ex.is_zero(gauge_energy(phi_const)),
        "energy of a t-free gauge is the literal constant 0",
    )

    ok = True
    worst = 0.0
    for name, lagrangian in catalog.catalog_lagrangians().items():
        res = equivalent(energy_rate_residual(lagrangian), ex.ZERO, rate)
        ok &= res.equivalent
        worst = max(worst, res.max_residual)
    record("energy-rate-identity", ok, f"max residual {worst!r}")

    ok = True
    worst = 0.0
    for lagrangian in (catalog.nsl_inertia_first(), catalog.nsl_inertia_second()):
        accel = solve_for_acceleration(lagrangian, quick)
        prog = compile_expr(accel)
        _, (vals,) = guarded_samples(quick, [prog])
        peak = float(np.max(np.abs(vals)))
        ok &= peak < 1e-9
        worst = max(worst, peak)
    record("inertia-recovery", ok, f"max |xddot| {worst!r}")

    classification = forces.classify(forces.force_from_gauge(phi, "A"), quick)
    record(
        "route-a-velocity-free",
        not classification.velocity_dependent
        and classification.dependence_fractions["xdot"] == 0.0,
        f"xdot dependence fraction {classification.dependence_fractions['xdot']!r}",
    )

    classification = forces.classify(forces.force_printed(phi), quick)
    record(
        "printed-force-dissipative",
        classification.dissipative,
        f"xdot dependence fraction {classification.dependence_fractions['xdot']!r}",
    )

    lns = catalog.nsl_inertia_first()
    total = forces.total_lagrangian(lns, phi)
    gauge_term = ex.partial(ex.partial(phi.body, "t"), "x")
    res = equivalent(
        euler_lagrange(total).expr,
        ex.add(euler_lagrange(lns).expr, gauge_term),
        rate,
    )
    record("el-additivity", res.equivalent, f"max residual {res.max_residual!r}")

    ok = True
    worst = 0.0
    involution_cfg = quick.with_(rel_tol=1e-10)
    corpus = [lns.body, phi.body, catalog.standard_inertia().body]
    for e in corpus:
        p = galilean.BoostParams(1.5)
        res = equivalent(galilean.boost(galilean.boost(e, p), p.inverse()), e,
                         involution_cfg)
        ok &= res.equivalent
        worst = max(worst, res.max_residual)
    record("boost-involution", ok, f"max residual {worst!r}")

    report = galilean.check_form_invariance(lns, galilean.BoostParams(1.0), quick)
    expected = lns.parameters["C2"] - lns.parameters["v_o"] * 1.0
    record(
        "inertia-form-invariance",
        report.verdict == "holds"
        and report.parameter_map is not None
        and abs(report.parameter_map["C2"] - expected) < 1e-8,
        f"verdict {report.verdict}, C2' {report.parameter_map}",
    )

    record(
        "zero-accel-boost-invariant",
        galilean.check_eom_invariance(ex.ZERO, galilean.BoostParams(1.0), quick).invariant,
    )

    f1 = forces.effective_force(forces.force_printed(phi), 1, catalog.inertia_set1())
    record(
        "driven-eom-not-invariant",
        not galilean.check_eom_invariance(
            f1.body, galilean.BoostParams(1.0), quick
        ).invariant,
    )

    return results


def cmd_verify(args, scenario) -> int:
    out = Path(args.out)
    cfg = _fuzz_config(scenario, args.seed)
    reports = catalog.cross_check_all(cfg)
    for form_id in catalog.PRINTED_FORM_IDS:
        report = reports[form_id]
        atomic_write(out / f"check_{form_id}.json", report.to_json())
        print(f"printed-form {form_id}: {report.verdict} "
              f"(max residual {report.max_residual!r})")
    invariants = _invariant_suite(cfg)
    for item in invariants:
        status = "pass" if item["passed"] else "FAIL"
        print(f"invariant {item['name']}: {status}")
    all_passed = all(item["passed"] for item in invariants)
    summary = {
        "seed": cfg.seed,
        "samples": cfg.samples,
        "strict": bool(args.strict),
        "all_invariants_passed": all_passed,
        "invariants": invariants,
        "printed_forms": [
            {
                "id": form_id,
                "verdict": reports[form_id].verdict,
                "max_residual": reports[form_id].max_residual,
            }
            for form_id in catalog.PRINTED_FORM_IDS
        ],
    }
    atomic_write(out / "verify_summary.json", _json_text(summary))
    if not all_passed:
        return EXIT_INVARIANT
    if args.strict and any(r.verdict != "match" for r in reports.values()):
        return EXIT_INVARIANT
    return EXIT_OK


# ---------------------------------------------------------------------------
# derive


def cmd_derive(args, scenario) -> int:
    if args.route:
        scenario["route"] = args.route
    lines = []
    lagrangian = scenario_lagrangian(scenario)
    lines.append(f"L = {ex.to_string(lagrangian.body)}")
    el = euler_lagrange(lagrangian)
    lines.append(f"EL = {ex.to_string(simplify(el.expr))}")
    lines.append(f"EL_accel_coeff = {ex.to_string(simplify(el.accel_coeff))}")
    lines.append(f"EL_rest = {ex.to_string(simplify(el.rest))}")
    lines.append(f"E = {ex.to_string(simplify(energy_function(lagrangian)))}")
    try:
        accel = solve_for_acceleration(lagrangian)
        lines.append(f"accel = {ex.to_string(simplify(accel))}")
    except DegenerateLagrangianError as err:
        lines.append(f"accel = (degenerate: {err})")
    if "gauge" in scenario:
        phi = scenario_gauge(scenario)
        lines.append(f"Phi = {ex.to_string(phi.body)}")
        lifted = lift_gauge(phi)
        lines.append(f"L_lift = {ex.to_string(simplify(lifted.body))}")
        lines.append(f"E_gauge = {ex.to_string(simplify(gauge_energy(phi)))}")
        force = forces.classified(scenario_force(scenario), _fuzz_config(scenario, args.seed))
        lines.append(f"F[{force.provenance}] = {ex.to_string(simplify(force.body))}")
        lines.append(f"F_flags = {', '.join(force.classification.flags()) or '(none)'}")
    text = "\n".join(lines)
    print(text)
    if args.out:
        atomic_write(Path(args.out) / "derive.txt", text + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args, scenario) -> int:
    if args.route:
        scenario["route"] = args.route
    accel, lagrangian = scenario_acceleration(scenario)
    cfg = _integrator_config(scenario)
    ics = scenario.get("ics", [1.0, 1.0])
    out = Path(args.out)
    try:
        traj = integrate(accel, (float(ics[0]), float(ics[1])), cfg)
    except ImmediateSingularityError as err:
        atomic_write(
            out / "trajectory.csv",
            "t,x,xdot\n" + err.event.as_comment() + "\n",
        )
        print(f"immediate singularity: {err}", file=sys.stderr)
        return EXIT_SINGULARITY
    atomic_write(out / "trajectory.csv", trajectory_csv(traj))
    if lagrangian is not None:
        series = diagnostics(traj, lagrangian)
        atomic_write(out / "diagnostics.csv", diagnostics_csv(series))
    print(
        f"integrated {len(traj)} samples over "
        f"[{traj.t[0]:.17g}, {traj.t[-1]:.17g}], termination: {traj.termination}"
    )
    for event in traj.events:
        print(event.as_comment())
    if traj.termination != "completed":
        return EXIT_SINGULARITY
    return EXIT_OK


# ---------------------------------------------------------------------------
# boost


def cmd_boost(args, scenario) -> int:
    if args.route:
        scenario["route"] = args.route
    out = Path(args.out)
    cfg = _fuzz_config(scenario, args.seed)
    boost_spec = scenario.get("boost") or DEFAULT_SCENARIO["boost"]
    v0_list = boost_spec.get("v0", [1.0])
    direction = boost_spec.get("direction", "to-primed")
    lagrangian = scenario_lagrangian(scenario)
    accel, _ = scenario_acceleration(scenario)
    for index, v0 in enumerate(v0_list):
        params = galilean.BoostParams(float(v0), direction)
        form_report = galilean.check_form_invariance(lagrangian, params, cfg)
        atomic_write(
            out / f"boost_form_{index:03d}.json", form_report.to_json()
        )
        eom = galilean.check_eom_invariance(accel, params, cfg)
        eom_payload = {
            "V0": float(v0),
            "invariant": eom.invariant,
            "max_residual": eom.max_residual,
            "witness": eom.witness,
        }
        atomic_write(out / f"boost_eom_{index:03d}.json", _json_text(eom_payload))
        print(
            f"V0={v0}: form {form_report.verdict}, "
            f"eom {'invariant' if eom.invariant else 'not-invariant'}"
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="path to a scenario JSON file")
    common.add_argument("--out", default="nullgauge-out", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override the seed")
    common.add_argument(
        "--strict",
        action="store_true",
        help="treat printed-form mismatches as failures (verify)",
    )
    common.add_argument(
        "--route",
        choices=["A", "B", "eq9"],
        default=None,
        help="force derivation route",
    )
    parser = argparse.ArgumentParser(
        prog="nullgauge",
        description=(
            "Workbench for non-standard null Lagrangians: verification "
            "sweeps, force derivation, simulation and boost checks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common],
                   help="cross-check printed forms and run the invariant suite")
    sub.add_parser("derive", parents=[common],
                   help="print the derived expressions for a scenario")
    sub.add_parser("simulate", parents=[common],
                   help="integrate the scenario's equation of motion")
    sub.add_parser("boost", parents=[common],
                   help="run Galilean invariance checks for a list of V0")
    return parser


_COMMANDS = {
    "verify": cmd_verify,
    "derive": cmd_derive,
    "simulate": cmd_simulate,
    "boost": cmd_boost,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        if args.seed is not None:
            scenario["seed"] = args.seed
        return _COMMANDS[args.command](args, scenario)
    except (ScenarioError, ValueError, KeyError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except NullgaugeError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
