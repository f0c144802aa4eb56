"""Compilation of expressions to flat stack programs.

The numeric hot paths (fuzz sampling, trajectory integration) never walk
the tree: an expression is compiled once into a postfix instruction tape
and then evaluated by one of the kernel backends.  Coefficient references
are inlined through their definitions at compile time, so a program only
reads the four variable columns (t, x, xdot, xddot).

Guard tracking: every quotient denominator, ln(abs(.)) argument and
negative/fractional power base is a registered guard.  Kernels report the
minimum guard magnitude seen per evaluation so samplers and integrators
can reject points too close to a singularity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from . import expr as ex

OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_MUL = 3
OP_DIV = 4
OP_NEG = 5
OP_POW_INT = 6
OP_POW_RAT = 7
OP_LNABS = 8
OP_EXP = 9
OP_SIN = 10
OP_COS = 11

MAX_STACK = 256


@dataclass
class Program:
    ops: np.ndarray
    args: np.ndarray
    consts: np.ndarray
    rat_p: np.ndarray
    rat_q: np.ndarray
    guarded: np.ndarray
    guard_labels: Tuple[str, ...]
    stack_need: int
    source: str

    def __len__(self):
        return len(self.ops)

    @property
    def arrays(self):
        return (self.ops, self.args, self.consts, self.rat_p, self.rat_q, self.guarded)


class _Emitter:
    def __init__(self):
        self.ops: List[int] = []
        self.args: List[int] = []
        self.guarded: List[int] = []
        self.consts: List[float] = []
        self.rat: List[Tuple[int, int]] = []
        self.guard_labels: List[str] = []
        self.depth = 0
        self.max_depth = 0

    def emit(self, op, arg=0, guard_label=None):
        self.ops.append(op)
        self.args.append(arg)
        self.guarded.append(1 if guard_label is not None else 0)
        if guard_label is not None:
            self.guard_labels.append(guard_label)

    def push(self, n=1):
        self.depth += n
        self.max_depth = max(self.max_depth, self.depth)

    def pop(self, n=1):
        self.depth -= n

    def const_index(self, value):
        self.consts.append(float(value))
        return len(self.consts) - 1

    def rat_index(self, p, q):
        self.rat.append((p, q))
        return len(self.rat) - 1


def compile_expr(e: ex.Expr) -> Program:
    """Compile an expression (coefficients are inlined first)."""
    inlined = ex.inline_coefficients(e)
    emitter = _Emitter()
    _emit(inlined, emitter)
    if emitter.max_depth > MAX_STACK:
        raise ValueError(
            f"expression too deep for the kernel stack ({emitter.max_depth})"
        )
    rat_p = [p for p, _ in emitter.rat]
    rat_q = [q for _, q in emitter.rat]
    return Program(
        ops=np.asarray(emitter.ops, dtype=np.int32),
        args=np.asarray(emitter.args, dtype=np.int32),
        consts=np.asarray(emitter.consts, dtype=np.float64),
        rat_p=np.asarray(rat_p, dtype=np.int32),
        rat_q=np.asarray(rat_q, dtype=np.int32),
        guarded=np.asarray(emitter.guarded, dtype=np.uint8),
        guard_labels=tuple(emitter.guard_labels),
        stack_need=emitter.max_depth,
        source=ex.to_string(e),
    )


def _emit(e: ex.Expr, out: _Emitter):
    if isinstance(e, ex.Const):
        out.emit(OP_CONST, out.const_index(e.value))
        out.push()
        return
    if isinstance(e, ex.Var):
        out.emit(OP_VAR, ex.VAR_INDEX[e.name])
        out.push()
        return
    if isinstance(e, ex.Add):
        _emit(e.terms[0], out)
        for term in e.terms[1:]:
            _emit(term, out)
            out.emit(OP_ADD)
            out.pop()
        return
    if isinstance(e, ex.Mul):
        _emit(e.factors[0], out)
        for factor in e.factors[1:]:
            _emit(factor, out)
            out.emit(OP_MUL)
            out.pop()
        return
    if isinstance(e, ex.Div):
        _emit(e.num, out)
        _emit(e.den, out)
        out.emit(OP_DIV, guard_label=ex.to_string(e.den))
        out.pop()
        return
    if isinstance(e, ex.Pow):
        _emit(e.base, out)
        q = e.exponent
        if q.denominator == 1:
            label = ex.to_string(e.base) if q.numerator < 0 else None
            out.emit(OP_POW_INT, int(q.numerator), guard_label=label)
        else:
            out.emit(
                OP_POW_RAT,
                out.rat_index(int(q.numerator), int(q.denominator)),
                guard_label=ex.to_string(e.base),
            )
        return
    if isinstance(e, ex.Neg):
        _emit(e.arg, out)
        out.emit(OP_NEG)
        return
    if isinstance(e, ex.LnAbs):
        _emit(e.arg, out)
        out.emit(OP_LNABS, guard_label=ex.to_string(e.arg))
        return
    if isinstance(e, ex.Exp):
        _emit(e.arg, out)
        out.emit(OP_EXP)
        return
    if isinstance(e, ex.Sin):
        _emit(e.arg, out)
        out.emit(OP_SIN)
        return
    if isinstance(e, ex.Cos):
        _emit(e.arg, out)
        out.emit(OP_COS)
        return
    raise TypeError(f"cannot compile {e!r} (coefficient left uninlined?)")
