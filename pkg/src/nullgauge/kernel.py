"""Kernel backend selection and Program-level wrappers.

The compiled extension is preferred; the pure-Python backend is the
fallback.  Set NULLGAUGE_PURE=1 to force the fallback (used by the
benchmark and by tests that exercise both paths).
"""

from __future__ import annotations

import os

import numpy as np

from .program import Program

if os.environ.get("NULLGAUGE_PURE"):
    from . import _kernel_py as _impl
else:
    try:
        from . import _kernel_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as _impl

BACKEND = _impl.BACKEND_NAME


def eval_batch(program: Program, cols: np.ndarray):
    """Evaluate at each row of cols (n, 4); returns (values, guard_min)."""
    cols = np.ascontiguousarray(cols, dtype=np.float64)
    return _impl.eval_batch(*program.arrays, cols)


def eval_scalar(program: Program, t, x=0.0, xdot=0.0, xddot=0.0):
    """Evaluate at one point; returns (value, guard_min, guard_argmin)."""
    return _impl.eval_scalar(
        *program.arrays, float(t), float(x), float(xdot), float(xddot)
    )


def rk4_try_step(program: Program, t, x, v, dt, delta):
    return _impl.rk4_try_step(
        *program.arrays, float(t), float(x), float(v), float(dt), float(delta)
    )


def rk4_run(program: Program, t0, x0, v0, dt, n_steps, delta, xs, vs):
    return _impl.rk4_run(
        *program.arrays,
        float(t0),
        float(x0),
        float(v0),
        float(dt),
        int(n_steps),
        float(delta),
        xs,
        vs,
    )
