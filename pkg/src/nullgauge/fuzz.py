"""Guarded random sampling and the numeric equivalence oracle.

Every cross-check in the workbench reduces to `equivalent`: draw samples
from a per-variable box, redraw any sample where a registered denominator
magnitude falls below the guard, and compare relative residuals against
the tolerance.  A fixed seed reproduces the identical sample sequence, so
verdicts and witnesses are deterministic.

Sampling runs sequentially here.  Callers fanning checks out to workers
should derive one substream per check (e.g. cfg.with_(seed=base + index),
as the cross-checker does per form id) so results stay order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from . import expr as ex
from .errors import IndeterminateSamplingError
from .kernel import eval_batch
from .program import Program, compile_expr

# Sign-symmetric box avoiding the near-zero band where the catalog
# formulas pole up.
DEFAULT_INTERVALS = ((-2.0, -0.1), (0.1, 2.0))


def default_box() -> dict:
    return {name: DEFAULT_INTERVALS for name in ex.VARIABLES}


@dataclass(frozen=True)
class FuzzConfig:
    samples: int = 1000
    box: Mapping[str, Tuple[Tuple[float, float], ...]] = field(
        default_factory=default_box
    )
    guard_delta: float = 0.05
    rel_tol: float = 1e-8
    seed: int = 42
    max_rounds: int = 200

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("sample count must be >= 1")
        if self.guard_delta <= 0:
            raise ValueError("guard delta must be positive")
        if self.rel_tol <= 0:
            raise ValueError("relative tolerance must be positive")

    def with_(self, **overrides) -> "FuzzConfig":
        data = {
            "samples": self.samples,
            "box": self.box,
            "guard_delta": self.guard_delta,
            "rel_tol": self.rel_tol,
            "seed": self.seed,
            "max_rounds": self.max_rounds,
        }
        data.update(overrides)
        return FuzzConfig(**data)


DEFAULT_FUZZ = FuzzConfig()


def _draw(cfg: FuzzConfig, rng: np.random.Generator, n: int) -> np.ndarray:
    cols = np.empty((n, len(ex.VARIABLES)))
    for j, name in enumerate(ex.VARIABLES):
        intervals = tuple(cfg.box.get(name, DEFAULT_INTERVALS))
        lengths = np.array([hi - lo for lo, hi in intervals])
        position = rng.random(n) * lengths.sum()
        edges = np.concatenate(([0.0], np.cumsum(lengths)))
        index = np.clip(
            np.searchsorted(edges, position, side="right") - 1,
            0,
            len(intervals) - 1,
        )
        offset = position - edges[index]
        los = np.array([lo for lo, _ in intervals])
        cols[:, j] = los[index] + offset
    return cols


def guarded_samples(
    cfg: FuzzConfig, programs: Sequence[Program]
) -> Tuple[np.ndarray, list]:
    """Draw cfg.samples points valid for every program.

    A point is valid when all values are finite and every guard magnitude
    is at least cfg.guard_delta.  Returns (cols, values-per-program).
    Raises IndeterminateSamplingError when the box is exhausted.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    needed = cfg.samples
    kept_cols = []
    kept_vals = [[] for _ in programs]
    for _ in range(cfg.max_rounds):
        batch = _draw(cfg, rng, needed)
        valid = np.ones(needed, dtype=bool)
        values = []
        for program in programs:
            vals, gmin = eval_batch(program, batch)
            valid &= np.isfinite(vals) & (gmin >= cfg.guard_delta)
            values.append(vals)
        count = int(valid.sum())
        if count:
            kept_cols.append(batch[valid])
            for store, vals in zip(kept_vals, values):
                store.append(vals[valid])
            needed -= count
        if needed == 0:
            cols = np.concatenate(kept_cols)
            return cols, [np.concatenate(parts) for parts in kept_vals]
    raise IndeterminateSamplingError(
        f"could not draw {cfg.samples} guarded samples in {cfg.max_rounds} rounds "
        f"(guard delta {cfg.guard_delta})"
    )


def relative_residual(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return np.abs(a - b) / scale


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    max_residual: float
    samples: int
    witness: Optional[dict] = None

    def __bool__(self):
        return self.equivalent


def _witness(cols_row, lhs, rhs, residual) -> dict:
    point = {name: float(cols_row[j]) for j, name in enumerate(ex.VARIABLES)}
    point["lhs"] = float(lhs)
    point["rhs"] = float(rhs)
    point["residual"] = float(residual)
    return point


def equivalent(
    e1: ex.Expr, e2: ex.Expr, cfg: FuzzConfig = DEFAULT_FUZZ
) -> EquivalenceResult:
    """Numeric equivalence verdict on the guarded sampling box.

    Equivalent iff the relative residual stays below cfg.rel_tol at every
    drawn sample; otherwise the worst sample is reported as a witness.
    """
    p1 = compile_expr(ex.as_expr(e1))
    p2 = compile_expr(ex.as_expr(e2))
    cols, (v1, v2) = guarded_samples(cfg, [p1, p2])
    residuals = relative_residual(v1, v2)
    worst = int(np.argmax(residuals))
    max_residual = float(residuals[worst])
    if max_residual < cfg.rel_tol:
        return EquivalenceResult(True, max_residual, len(residuals))
    return EquivalenceResult(
        False,
        max_residual,
        len(residuals),
        _witness(cols[worst], v1[worst], v2[worst], residuals[worst]),
    )


def is_numerically_zero(
    e: ex.Expr, cfg: FuzzConfig = DEFAULT_FUZZ
) -> EquivalenceResult:
    return equivalent(e, ex.ZERO, cfg)
