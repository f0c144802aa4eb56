"""Trajectory integration for the driven equations of motion.

The default integrator is fixed-step classical RK4 on the first-order
system (x' = v, v' = accel(v, x, t)); an adaptive embedded 5(4) pair is
available.  Every registered denominator of the acceleration expression
is guarded: when a stage evaluation drops below the guard the integrator
bisects the step down to the event, records a singularity event and
stops.  No sample is ever emitted past a guard violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import expr as ex
from . import kernel
from .errors import ImmediateSingularityError
from .program import Program, compile_expr
from .variational import Lagrangian, energy_function, euler_lagrange


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"  # "rk4" | "adaptive"
    step: float = 1e-3
    tolerance: float = 1e-8  # adaptive local error target
    t_span: Tuple[float, float] = (0.0, 10.0)
    guard_delta: float = 1e-6
    max_steps: int = 2_000_000

    def __post_init__(self):
        if self.method not in ("rk4", "adaptive"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.step <= 0 or self.tolerance <= 0:
            raise ValueError("step and tolerance must be positive")
        if self.guard_delta < 0:
            raise ValueError("guard delta must be non-negative")
        if self.t_span[1] <= self.t_span[0]:
            raise ValueError("t span must be increasing")


@dataclass(frozen=True)
class SingularityEvent:
    time: float
    denominator: str
    value: float

    def as_comment(self) -> str:
        return (
            f"#event,singularity,{self.time:.17g},{self.denominator},"
            f"{self.value:.17g}"
        )


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    method: str
    step_policy: str
    termination: str  # "completed" | "singularity" | "step-underflow"
    events: List[SingularityEvent]
    accel: ex.Expr
    config: IntegratorConfig

    def __len__(self):
        return len(self.t)


def _guard_state(program: Program, t, x, v):
    """Evaluate and name the tightest guard at a state."""
    value, gmin, garg = kernel.eval_scalar(program, t, x, v, 0.0)
    if garg >= 0 and garg < len(program.guard_labels):
        label = program.guard_labels[garg]
    else:
        label = "(none)"
    return value, gmin, label


def integrate(
    accel: ex.Expr, ics: Tuple[float, float], cfg: IntegratorConfig = IntegratorConfig()
) -> Trajectory:
    """Integrate xddot = accel(xdot, x, t) from (x0, v0) over cfg.t_span."""
    bad = ex.free_variables(accel) - {"t", "x", "xdot"}
    if bad:
        raise ValueError(f"acceleration depends on {sorted(bad)}")
    program = compile_expr(accel)
    x0, v0 = float(ics[0]), float(ics[1])
    t0, t1 = cfg.t_span
    value, gmin, label = _guard_state(program, t0, x0, v0)
    if gmin < cfg.guard_delta or not math.isfinite(value):
        raise ImmediateSingularityError(SingularityEvent(t0, label, gmin))
    if cfg.method == "rk4":
        return _integrate_fixed(accel, program, x0, v0, cfg)
    return _integrate_adaptive(accel, program, x0, v0, cfg)


def _bisect_to_event(program, t, x, v, dt, cfg):
    """Advance with halved steps toward the guard violation.

    Returns (extra samples, event).  Extra samples are valid points taken
    while closing in on the event; the event references the last reachable
    state."""
    samples = []
    local_dt = dt / 2.0
    floor = dt * 2.0**-40
    while local_dt > floor:
        ok, x1, v1, _, _, _ = kernel.rk4_try_step(
            program, t, x, v, local_dt, cfg.guard_delta
        )
        if ok:
            advanced = t + local_dt
            if advanced <= t:  # below time resolution
                break
            t = advanced
            x, v = x1, v1
            samples.append((t, x, v))
        else:
            local_dt /= 2.0
    _, gmin, label = _guard_state(program, t, x, v)
    return samples, SingularityEvent(t, label, gmin)


def _integrate_fixed(accel, program, x0, v0, cfg) -> Trajectory:
    t0, t1 = cfg.t_span
    n_steps = int(round((t1 - t0) / cfg.step))
    n_steps = max(1, min(n_steps, cfg.max_steps))
    xs = np.empty(n_steps + 1)
    vs = np.empty(n_steps + 1)
    xs[0] = x0
    vs[0] = v0
    done, status = kernel.rk4_run(
        program, t0, x0, v0, cfg.step, n_steps, cfg.guard_delta, xs, vs
    )
    ts = t0 + cfg.step * np.arange(done + 1)
    step_policy = f"fixed dt={cfg.step!r}"
    if status == 0:
        return Trajectory(
            ts, xs[: done + 1], vs[: done + 1], "rk4", step_policy,
            "completed", [], accel, cfg,
        )
    extra, event = _bisect_to_event(
        program, ts[done], xs[done], vs[done], cfg.step, cfg
    )
    t_list = list(ts)
    x_list = list(xs[: done + 1])
    v_list = list(vs[: done + 1])
    for te, xe, ve in extra:
        t_list.append(te)
        x_list.append(xe)
        v_list.append(ve)
    return Trajectory(
        np.asarray(t_list), np.asarray(x_list), np.asarray(v_list),
        "rk4", step_policy, "singularity", [event], accel, cfg,
    )


# Dormand-Prince 5(4) coefficients
_DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_DP_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_DP_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
          11.0 / 84.0, 0.0)
_DP_B4 = (5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
          -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0)


def _integrate_adaptive(accel, program, x0, v0, cfg) -> Trajectory:
    t0, t1 = cfg.t_span
    ts = [t0]
    xs = [x0]
    vs = [v0]
    t, x, v = t0, x0, v0
    h = min(cfg.step, t1 - t0)
    h_min = (t1 - t0) * 2.0**-40
    events: List[SingularityEvent] = []
    termination = "completed"
    steps = 0
    while t < t1:
        if steps >= cfg.max_steps:
            termination = "step-underflow"
            break
        steps += 1
        h = min(h, t1 - t)
        result = _dopri_step(program, t, x, v, h, cfg.guard_delta)
        if result is None:  # guard violation inside the step
            h /= 2.0
            if h < h_min:
                _, gmin, label = _guard_state(program, t, x, v)
                events.append(SingularityEvent(t, label, gmin))
                termination = "singularity"
                break
            continue
        x5, v5, err = result
        scale = cfg.tolerance * (1.0 + max(abs(x), abs(v)))
        if err <= scale:
            advanced = t + h
            if advanced <= t:  # below time resolution
                termination = "step-underflow"
                break
            t = advanced
            x, v = x5, v5
            ts.append(t)
            xs.append(x)
            vs.append(v)
            growth = 5.0 if err == 0.0 else 0.9 * (scale / err) ** 0.2
            h *= min(5.0, max(0.2, growth))
        else:
            h *= max(0.2, 0.9 * (scale / err) ** 0.2)
            if h < h_min:
                termination = "step-underflow"
                break
    return Trajectory(
        np.asarray(ts), np.asarray(xs), np.asarray(vs),
        "adaptive", f"dopri54 tol={cfg.tolerance!r}", termination,
        events, accel, cfg,
    )


def _dopri_step(program, t, x, v, h, delta):
    kx = []
    kv = []
    for i in range(7):
        xi = x + h * sum(a * k for a, k in zip(_DP_A[i], kx))
        vi = v + h * sum(a * k for a, k in zip(_DP_A[i], kv))
        ai, gmin, _ = kernel.eval_scalar(program, t + _DP_C[i] * h, xi, vi, 0.0)
        if gmin < delta or not math.isfinite(ai):
            return None
        kx.append(vi)
        kv.append(ai)
    x5 = x + h * sum(b * k for b, k in zip(_DP_B5, kx))
    v5 = v + h * sum(b * k for b, k in zip(_DP_B5, kv))
    x4 = x + h * sum(b * k for b, k in zip(_DP_B4, kx))
    v4 = v + h * sum(b * k for b, k in zip(_DP_B4, kv))
    err = max(abs(x5 - x4), abs(v5 - v4))
    return x5, v5, err


# ---------------------------------------------------------------------------
# diagnostics and export


@dataclass
class DiagnosticSeries:
    t: np.ndarray
    energy: np.ndarray
    dL_dt: np.ndarray
    el_residual: np.ndarray


def diagnostics(
    traj: Trajectory, L: Lagrangian, energy: Optional[ex.Expr] = None
) -> DiagnosticSeries:
    """Per-sample energy, explicit time derivative of L, and EL residual.

    The acceleration entering the EL residual is reconstructed from the
    trajectory's force expression, not by differencing the samples.
    """
    n = len(traj)
    cols = np.zeros((n, 4))
    cols[:, 0] = traj.t
    cols[:, 1] = traj.x
    cols[:, 2] = traj.xdot
    accel_vals, _ = kernel.eval_batch(compile_expr(traj.accel), cols)
    cols[:, 3] = accel_vals
    e_expr = energy if energy is not None else energy_function(L)
    e_vals, _ = kernel.eval_batch(compile_expr(e_expr), cols)
    dl_vals, _ = kernel.eval_batch(compile_expr(ex.partial(L.body, "t")), cols)
    el_vals, _ = kernel.eval_batch(compile_expr(euler_lagrange(L).expr), cols)
    return DiagnosticSeries(traj.t.copy(), e_vals, dl_vals, el_vals)


def trajectory_csv(traj: Trajectory) -> str:
    lines = ["t,x,xdot"]
    for t, x, v in zip(traj.t, traj.x, traj.xdot):
        lines.append(f"{t:.17g},{x:.17g},{v:.17g}")
    for event in traj.events:
        lines.append(event.as_comment())
    return "\n".join(lines) + "\n"


def diagnostics_csv(series: DiagnosticSeries) -> str:
    lines = ["t,energy,dL_dt,el_residual"]
    for row in zip(series.t, series.energy, series.dL_dt, series.el_residual):
        lines.append(",".join(f"{value:.17g}" for value in row))
    return "\n".join(lines) + "\n"
