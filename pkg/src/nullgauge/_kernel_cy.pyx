# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend: tape evaluation and RK4 stepping in C loops.

Mirrors nullgauge._kernel_py: same opcode set, same guard semantics (no
exceptions; singular points produce non-finite values and drop the guard
minimum).
"""

import numpy as np

from libc.math cimport cos, exp, fabs, isfinite, log, pow, sin
from libc.math cimport INFINITY, NAN

BACKEND_NAME = "compiled"

DEF STACK_SIZE = 260
DEF EXP_MAX = 709.0

cdef int OP_CONST = 0
cdef int OP_VAR = 1
cdef int OP_ADD = 2
cdef int OP_MUL = 3
cdef int OP_DIV = 4
cdef int OP_NEG = 5
cdef int OP_POW_INT = 6
cdef int OP_POW_RAT = 7
cdef int OP_LNABS = 8
cdef int OP_EXP = 9
cdef int OP_SIN = 10
cdef int OP_COS = 11


cdef double _pow_int(double base, int n) nogil:
    if n < 0 and base == 0.0:
        return NAN
    return pow(base, <double> n)


cdef double _pow_rat(double base, int p, int q) nogil:
    cdef double r = (<double> p) / (<double> q)
    cdef double magnitude
    if base > 0.0:
        return pow(base, r)
    if base == 0.0:
        if r > 0.0:
            return 0.0
        return NAN
    if q % 2 == 1:
        magnitude = pow(-base, r)
        if p % 2 == 1:
            return -magnitude
        return magnitude
    return NAN


cdef int _run(const int[:] ops, const int[:] args, const double[:] consts,
              const int[:] rat_p, const int[:] rat_q,
              const unsigned char[:] guarded,
              double t, double x, double xdot, double xddot,
              double* value, double* gmin, int* garg) nogil:
    cdef double stack[STACK_SIZE]
    cdef double variables[4]
    cdef int sp = 0
    cdef int i, op, a, ordinal = -1
    cdef double den, base, arg, mag
    variables[0] = t
    variables[1] = x
    variables[2] = xdot
    variables[3] = xddot
    gmin[0] = INFINITY
    garg[0] = -1
    for i in range(ops.shape[0]):
        op = ops[i]
        a = args[i]
        if guarded[i]:
            ordinal += 1
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
            mag = fabs(den)
            if mag < gmin[0]:
                gmin[0] = mag
                garg[0] = ordinal
            if den == 0.0:
                stack[sp - 1] = NAN
            else:
                stack[sp - 1] = stack[sp - 1] / den
        elif op == OP_NEG:
            stack[sp - 1] = -stack[sp - 1]
        elif op == OP_POW_INT:
            base = stack[sp - 1]
            if a < 0:
                mag = fabs(base)
                if mag < gmin[0]:
                    gmin[0] = mag
                    garg[0] = ordinal
            stack[sp - 1] = _pow_int(base, a)
        elif op == OP_POW_RAT:
            base = stack[sp - 1]
            mag = fabs(base)
            if mag < gmin[0]:
                gmin[0] = mag
                garg[0] = ordinal
            stack[sp - 1] = _pow_rat(base, rat_p[a], rat_q[a])
        elif op == OP_LNABS:
            arg = stack[sp - 1]
            mag = fabs(arg)
            if mag < gmin[0]:
                gmin[0] = mag
                garg[0] = ordinal
            if arg == 0.0:
                stack[sp - 1] = NAN
            else:
                stack[sp - 1] = log(mag)
        elif op == OP_EXP:
            arg = stack[sp - 1]
            if arg < EXP_MAX:
                stack[sp - 1] = exp(arg)
            else:
                stack[sp - 1] = INFINITY
        elif op == OP_SIN:
            stack[sp - 1] = sin(stack[sp - 1])
        elif op == OP_COS:
            stack[sp - 1] = cos(stack[sp - 1])
        else:
            return -1
    value[0] = stack[sp - 1]
    return 0


def eval_batch(ops, args, consts, rat_p, rat_q, guarded, cols):
    """Evaluate the program at every row of cols (n, 4).

    Instruction-outer loops over contiguous sample blocks: the opcode
    dispatch is amortised across the whole batch and the per-element
    arithmetic vectorises.
    """
    cdef const int[:] ops_v = ops
    cdef const int[:] args_v = args
    cdef const double[:] consts_v = consts
    cdef const int[:] ratp_v = rat_p
    cdef const int[:] ratq_v = rat_q
    cdef const unsigned char[:] guarded_v = guarded
    cdef const double[:, :] cols_v = np.ascontiguousarray(cols, dtype=np.float64)
    cdef Py_ssize_t n = cols_v.shape[0]
    cdef int depth = _stack_need(ops_v)
    values = np.empty(n, dtype=np.float64)
    gmins = np.full(n, np.inf, dtype=np.float64)
    stack_arr = np.empty((depth, n), dtype=np.float64)
    cdef double[:] values_v = values
    cdef double[:] gmins_v = gmins
    cdef double[:, :] stack = stack_arr
    cdef Py_ssize_t i, j
    cdef int op, a, sp = 0, p, q
    cdef double c, den, base, arg, mag, r, magnitude
    with nogil:
        for i in range(ops_v.shape[0]):
            op = ops_v[i]
            a = args_v[i]
            if op == OP_CONST:
                c = consts_v[a]
                for j in range(n):
                    stack[sp, j] = c
                sp += 1
            elif op == OP_VAR:
                for j in range(n):
                    stack[sp, j] = cols_v[j, a]
                sp += 1
            elif op == OP_ADD:
                sp -= 1
                for j in range(n):
                    stack[sp - 1, j] = stack[sp - 1, j] + stack[sp, j]
            elif op == OP_MUL:
                sp -= 1
                for j in range(n):
                    stack[sp - 1, j] = stack[sp - 1, j] * stack[sp, j]
            elif op == OP_DIV:
                sp -= 1
                for j in range(n):
                    den = stack[sp, j]
                    mag = fabs(den)
                    if mag < gmins_v[j]:
                        gmins_v[j] = mag
                    if den == 0.0:
                        stack[sp - 1, j] = NAN
                    else:
                        stack[sp - 1, j] = stack[sp - 1, j] / den
            elif op == OP_NEG:
                for j in range(n):
                    stack[sp - 1, j] = -stack[sp - 1, j]
            elif op == OP_POW_INT:
                if a < 0:
                    for j in range(n):
                        mag = fabs(stack[sp - 1, j])
                        if mag < gmins_v[j]:
                            gmins_v[j] = mag
                if a == 2:
                    for j in range(n):
                        base = stack[sp - 1, j]
                        stack[sp - 1, j] = base * base
                elif a == 3:
                    for j in range(n):
                        base = stack[sp - 1, j]
                        stack[sp - 1, j] = base * base * base
                else:
                    for j in range(n):
                        stack[sp - 1, j] = _pow_int(stack[sp - 1, j], a)
            elif op == OP_POW_RAT:
                p = ratp_v[a]
                q = ratq_v[a]
                for j in range(n):
                    base = stack[sp - 1, j]
                    mag = fabs(base)
                    if mag < gmins_v[j]:
                        gmins_v[j] = mag
                    stack[sp - 1, j] = _pow_rat(base, p, q)
            elif op == OP_LNABS:
                for j in range(n):
                    arg = stack[sp - 1, j]
                    mag = fabs(arg)
                    if mag < gmins_v[j]:
                        gmins_v[j] = mag
                    if arg == 0.0:
                        stack[sp - 1, j] = NAN
                    else:
                        stack[sp - 1, j] = log(mag)
            elif op == OP_EXP:
                for j in range(n):
                    arg = stack[sp - 1, j]
                    if arg < EXP_MAX:
                        stack[sp - 1, j] = exp(arg)
                    else:
                        stack[sp - 1, j] = INFINITY
            elif op == OP_SIN:
                for j in range(n):
                    stack[sp - 1, j] = sin(stack[sp - 1, j])
            elif op == OP_COS:
                for j in range(n):
                    stack[sp - 1, j] = cos(stack[sp - 1, j])
            else:
                with gil:
                    raise ValueError("unknown opcode")
        for j in range(n):
            values_v[j] = stack[sp - 1, j]
    return values, gmins


cdef int _stack_need(const int[:] ops) nogil:
    cdef int depth = 0, peak = 1
    cdef Py_ssize_t i
    cdef int op
    for i in range(ops.shape[0]):
        op = ops[i]
        if op == OP_CONST or op == OP_VAR:
            depth += 1
            if depth > peak:
                peak = depth
        elif op == OP_ADD or op == OP_MUL or op == OP_DIV:
            depth -= 1
    return peak


def eval_scalar(ops, args, consts, rat_p, rat_q, guarded,
                double t, double x, double xdot, double xddot):
    """Evaluate at one point; returns (value, guard_min, guard_argmin)."""
    cdef const int[:] ops_v = ops
    cdef const int[:] args_v = args
    cdef const double[:] consts_v = consts
    cdef const int[:] ratp_v = rat_p
    cdef const int[:] ratq_v = rat_q
    cdef const unsigned char[:] guarded_v = guarded
    cdef double value, gmin
    cdef int garg
    if _run(ops_v, args_v, consts_v, ratp_v, ratq_v, guarded_v,
            t, x, xdot, xddot, &value, &gmin, &garg) != 0:
        raise ValueError("unknown opcode")
    return value, gmin, garg


cdef int _try_step(const int[:] ops, const int[:] args, const double[:] consts,
                   const int[:] rat_p, const int[:] rat_q,
                   const unsigned char[:] guarded,
                   double t, double x, double v, double dt, double delta,
                   double* x1, double* v1,
                   double* fail_t, double* fail_x, double* fail_v) nogil:
    cdef double half = 0.5 * dt
    cdef double k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v
    cdef double xs, vs, value, gmin
    cdef int garg

    _run(ops, args, consts, rat_p, rat_q, guarded, t, x, v, 0.0,
         &value, &gmin, &garg)
    if gmin < delta or not isfinite(value):
        fail_t[0] = t; fail_x[0] = x; fail_v[0] = v
        return 0
    k1x = v; k1v = value

    xs = x + half * k1x; vs = v + half * k1v
    _run(ops, args, consts, rat_p, rat_q, guarded, t + half, xs, vs, 0.0,
         &value, &gmin, &garg)
    if gmin < delta or not isfinite(value):
        fail_t[0] = t + half; fail_x[0] = xs; fail_v[0] = vs
        return 0
    k2x = vs; k2v = value

    xs = x + half * k2x; vs = v + half * k2v
    _run(ops, args, consts, rat_p, rat_q, guarded, t + half, xs, vs, 0.0,
         &value, &gmin, &garg)
    if gmin < delta or not isfinite(value):
        fail_t[0] = t + half; fail_x[0] = xs; fail_v[0] = vs
        return 0
    k3x = vs; k3v = value

    xs = x + dt * k3x; vs = v + dt * k3v
    _run(ops, args, consts, rat_p, rat_q, guarded, t + dt, xs, vs, 0.0,
         &value, &gmin, &garg)
    if gmin < delta or not isfinite(value):
        fail_t[0] = t + dt; fail_x[0] = xs; fail_v[0] = vs
        return 0
    k4x = vs; k4v = value

    x1[0] = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    v1[0] = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return 1


def rk4_try_step(ops, args, consts, rat_p, rat_q, guarded,
                 double t, double x, double v, double dt, double delta):
    """One classical RK4 step; see the python backend for the contract."""
    cdef const int[:] ops_v = ops
    cdef const int[:] args_v = args
    cdef const double[:] consts_v = consts
    cdef const int[:] ratp_v = rat_p
    cdef const int[:] ratq_v = rat_q
    cdef const unsigned char[:] guarded_v = guarded
    cdef double x1 = 0.0, v1 = 0.0, ft = 0.0, fx = 0.0, fv = 0.0
    cdef int ok
    ok = _try_step(ops_v, args_v, consts_v, ratp_v, ratq_v, guarded_v,
                   t, x, v, dt, delta, &x1, &v1, &ft, &fx, &fv)
    if ok:
        return 1, x1, v1, 0.0, 0.0, 0.0
    return 0, 0.0, 0.0, ft, fx, fv


def rk4_run(ops, args, consts, rat_p, rat_q, guarded,
            double t0, double x0, double v0, double dt, int n_steps,
            double delta, xs, vs):
    """Fixed-step RK4 loop filling xs/vs from index 1; see python backend."""
    cdef const int[:] ops_v = ops
    cdef const int[:] args_v = args
    cdef const double[:] consts_v = consts
    cdef const int[:] ratp_v = rat_p
    cdef const int[:] ratq_v = rat_q
    cdef const unsigned char[:] guarded_v = guarded
    cdef double[:] xs_v = xs
    cdef double[:] vs_v = vs
    cdef double x = x0, v = v0
    cdef double x1 = 0.0, v1 = 0.0, ft = 0.0, fx = 0.0, fv = 0.0
    cdef int k, ok
    cdef int done = n_steps
    cdef int status = 0
    with nogil:
        for k in range(n_steps):
            ok = _try_step(ops_v, args_v, consts_v, ratp_v, ratq_v, guarded_v,
                           t0 + k * dt, x, v, dt, delta,
                           &x1, &v1, &ft, &fx, &fv)
            if not ok:
                done = k
                status = 1
                break
            x = x1
            v = v1
            xs_v[k + 1] = x
            vs_v[k + 1] = v
    return done, status
