"""Pure-Python kernel backend.

Batch evaluation is vectorised with numpy (one array operation per
instruction); scalar evaluation and RK4 stepping run on plain floats.
Semantics mirror the compiled backend: no exceptions on singular points,
instead values go non-finite and the guard minimum drops, and callers
decide validity.
"""

from __future__ import annotations

import math

import numpy as np

from .program import (
    OP_ADD,
    OP_CONST,
    OP_COS,
    OP_DIV,
    OP_EXP,
    OP_LNABS,
    OP_MUL,
    OP_NEG,
    OP_POW_INT,
    OP_POW_RAT,
    OP_SIN,
    OP_VAR,
)

BACKEND_NAME = "python"

_EXP_MAX = 709.0


def eval_batch(ops, args, consts, rat_p, rat_q, guarded, cols):
    """Evaluate the program at every row of cols (n, 4).

    Returns (values, guard_min) arrays of length n.
    """
    n = cols.shape[0]
    gmin = np.full(n, np.inf)
    stack = []
    with np.errstate(all="ignore"):
        for i in range(len(ops)):
            op = ops[i]
            a = args[i]
            if op == OP_CONST:
                stack.append(np.full(n, consts[a]))
            elif op == OP_VAR:
                stack.append(cols[:, a].copy())
            elif op == OP_ADD:
                rhs = stack.pop()
                stack[-1] = stack[-1] + rhs
            elif op == OP_MUL:
                rhs = stack.pop()
                stack[-1] = stack[-1] * rhs
            elif op == OP_DIV:
                den = stack.pop()
                np.minimum(gmin, np.abs(den), out=gmin)
                stack[-1] = stack[-1] / den
            elif op == OP_NEG:
                stack[-1] = -stack[-1]
            elif op == OP_POW_INT:
                base = stack[-1]
                if a < 0:
                    np.minimum(gmin, np.abs(base), out=gmin)
                stack[-1] = np.power(base, float(a))
            elif op == OP_POW_RAT:
                base = stack[-1]
                np.minimum(gmin, np.abs(base), out=gmin)
                stack[-1] = _pow_rat_array(base, rat_p[a], rat_q[a])
            elif op == OP_LNABS:
                arg = stack[-1]
                np.minimum(gmin, np.abs(arg), out=gmin)
                stack[-1] = np.log(np.abs(arg))
            elif op == OP_EXP:
                stack[-1] = np.exp(np.minimum(stack[-1], _EXP_MAX))
            elif op == OP_SIN:
                stack[-1] = np.sin(stack[-1])
            elif op == OP_COS:
                stack[-1] = np.cos(stack[-1])
            else:
                raise ValueError(f"unknown opcode {op}")
    return stack.pop(), gmin


def _pow_rat_array(base, p, q):
    r = p / q
    if q % 2 == 1:
        magnitude = np.power(np.abs(base), r)
        if p % 2 == 1:
            return np.where(base < 0, -magnitude, magnitude)
        return magnitude
    return np.power(base, r)  # negative bases go NaN


def _pow_int_scalar(base, n):
    try:
        return base ** n
    except OverflowError:
        sign = -1.0 if (base < 0.0 and n % 2 != 0) else 1.0
        return sign * math.inf


def eval_scalar(ops, args, consts, rat_p, rat_q, guarded, t, x, xdot, xddot):
    """Evaluate at one point; returns (value, guard_min, guard_argmin)."""
    variables = (t, x, xdot, xddot)
    stack = [0.0] * 260
    sp = 0
    gmin = math.inf
    garg = -1
    guard_ordinal = -1
    for i in range(len(ops)):
        op = ops[i]
        a = args[i]
        if guarded[i]:
            guard_ordinal += 1
        if op == OP_CONST:
            stack[sp] = consts[a]
            sp += 1
        elif op == OP_VAR:
            stack[sp] = variables[a]
            sp += 1
        elif op == OP_ADD:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] + stack[sp]
        elif op == OP_MUL:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] * stack[sp]
        elif op == OP_DIV:
            sp -= 1
            den = stack[sp]
            mag = abs(den)
            if mag < gmin:
                gmin = mag
                garg = guard_ordinal
            if den == 0.0:
                stack[sp - 1] = math.nan
            else:
                stack[sp - 1] = stack[sp - 1] / den
        elif op == OP_NEG:
            stack[sp - 1] = -stack[sp - 1]
        elif op == OP_POW_INT:
            base = stack[sp - 1]
            if a < 0:
                mag = abs(base)
                if mag < gmin:
                    gmin = mag
                    garg = guard_ordinal
                if base == 0.0:
                    stack[sp - 1] = math.nan
                    continue
            stack[sp - 1] = _pow_int_scalar(base, a)
        elif op == OP_POW_RAT:
            base = stack[sp - 1]
            mag = abs(base)
            if mag < gmin:
                gmin = mag
                garg = guard_ordinal
            stack[sp - 1] = _pow_rat_scalar(base, rat_p[a], rat_q[a])
        elif op == OP_LNABS:
            arg = stack[sp - 1]
            mag = abs(arg)
            if mag < gmin:
                gmin = mag
                garg = guard_ordinal
            stack[sp - 1] = math.log(mag) if arg != 0.0 else math.nan
        elif op == OP_EXP:
            arg = stack[sp - 1]
            stack[sp - 1] = math.exp(arg) if arg < _EXP_MAX else math.inf
        elif op == OP_SIN:
            stack[sp - 1] = math.sin(stack[sp - 1])
        elif op == OP_COS:
            stack[sp - 1] = math.cos(stack[sp - 1])
        else:
            raise ValueError(f"unknown opcode {op}")
    return stack[sp - 1], gmin, garg


def _pow_rat_scalar(base, p, q):
    r = p / q
    try:
        if base > 0.0:
            return base ** r
        if base == 0.0:
            return 0.0 if r > 0 else math.nan
        if q % 2 == 1:
            magnitude = (-base) ** r
            return -magnitude if p % 2 == 1 else magnitude
        return math.nan
    except OverflowError:
        return math.inf


def rk4_try_step(ops, args, consts, rat_p, rat_q, guarded, t, x, v, dt, delta):
    """Attempt one classical RK4 step on (x' = v, v' = accel).

    Returns (ok, x1, v1, fail_t, fail_x, fail_v); on failure the fail_*
    entries locate the stage where a guard or non-finite value appeared.
    """

    def accel(ts, xs, vs):
        val, gmin, _ = eval_scalar(
            ops, args, consts, rat_p, rat_q, guarded, ts, xs, vs, 0.0
        )
        ok = gmin >= delta and math.isfinite(val)
        return ok, val

    half = 0.5 * dt
    ok, k1v = accel(t, x, v)
    if not ok:
        return 0, 0.0, 0.0, t, x, v
    k1x = v
    x2 = x + half * k1x
    v2 = v + half * k1v
    ok, k2v = accel(t + half, x2, v2)
    if not ok:
        return 0, 0.0, 0.0, t + half, x2, v2
    k2x = v2
    x3 = x + half * k2x
    v3 = v + half * k2v
    ok, k3v = accel(t + half, x3, v3)
    if not ok:
        return 0, 0.0, 0.0, t + half, x3, v3
    k3x = v3
    x4 = x + dt * k3x
    v4 = v + dt * k3v
    ok, k4v = accel(t + dt, x4, v4)
    if not ok:
        return 0, 0.0, 0.0, t + dt, x4, v4
    k4x = v4
    x1 = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    v1 = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return 1, x1, v1, 0.0, 0.0, 0.0


def rk4_run(ops, args, consts, rat_p, rat_q, guarded, t0, x0, v0, dt, n_steps,
            delta, xs, vs):
    """Run fixed-step RK4, filling xs/vs from index 1.

    Returns (n_done, status) where status 0 means completed and 1 means a
    guard failed while attempting step n_done -> n_done + 1.
    """
    x = x0
    v = v0
    for k in range(n_steps):
        t = t0 + k * dt
        ok, x1, v1, _, _, _ = rk4_try_step(
            ops, args, consts, rat_p, rat_q, guarded, t, x, v, dt, delta
        )
        if not ok:
            return k, 1
        x = x1
        v = v1
        xs[k + 1] = x
        vs[k + 1] = v
    return n_steps, 0
