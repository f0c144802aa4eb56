"""Benchmark the compiled kernel against the pure-Python fallback.

Two workloads dominate the workbench's runtime:

* batch evaluation of compiled expression tapes over fuzz samples
  (every equivalence check and cross-check), and
* sequential RK4 stepping (every trajectory).

Usage: python benchmarks/bench_kernel.py [--steps N] [--samples N]
"""

import argparse
import time

import numpy as np

from nullgauge import catalog, forces
from nullgauge import _kernel_py
from nullgauge.fuzz import DEFAULT_FUZZ, guarded_samples
from nullgauge.program import compile_expr
from nullgauge.variational import euler_lagrange, solve_for_acceleration

try:
    from nullgauge import _kernel_cy
except ImportError:
    _kernel_cy = None

BACKENDS = [("python", _kernel_py)]
if _kernel_cy is not None:
    BACKENDS.append(("compiled", _kernel_cy))


def _timeit(fn, min_time=0.2):
    fn()  # warm up
    reps = 1
    while True:
        start = time.perf_counter()
        for _ in range(reps):
            fn()
        elapsed = time.perf_counter() - start
        if elapsed >= min_time:
            return elapsed / reps
        reps = max(reps * 2, int(reps * min_time / max(elapsed, 1e-9)))


def bench_eval_batch(samples):
    total = forces.total_lagrangian(
        catalog.nsl_inertia_first(), catalog.check_gauge()
    )
    program = compile_expr(euler_lagrange(total).expr)
    cols, _ = guarded_samples(DEFAULT_FUZZ.with_(samples=samples), [program])
    print(
        f"eval_batch: {len(program)} instructions x {samples} samples "
        f"({len(program.guard_labels)} guards)"
    )
    results = {}
    for name, backend in BACKENDS:
        seconds = _timeit(lambda b=backend: b.eval_batch(*program.arrays, cols))
        rate = len(program) * samples / seconds / 1e6
        results[name] = seconds
        print(f"  {name:>9}: {seconds * 1e3:8.3f} ms/call  ({rate:8.1f} M instr/s)")
    _speedup(results)
    return results


def bench_rk4(steps):
    total = forces.total_lagrangian(
        catalog.nsl_inertia_first(), catalog.check_gauge()
    )
    program = compile_expr(solve_for_acceleration(total))
    print(f"rk4_run: {len(program)} instructions x {steps} steps (4 stages each)")
    dt = 0.3 / steps
    results = {}
    for name, backend in BACKENDS:
        xs = np.empty(steps + 1)
        vs = np.empty(steps + 1)
        xs[0] = 1.0
        vs[0] = 1.0

        def run(b=backend, xs=xs, vs=vs):
            done, status = b.rk4_run(
                *program.arrays, 0.0, 1.0, 1.0, dt, steps, 1e-6, xs, vs
            )
            assert (done, status) == (steps, 0)

        seconds = _timeit(run)
        results[name] = seconds
        rate = steps / seconds / 1e3
        print(f"  {name:>9}: {seconds * 1e3:8.3f} ms/run   ({rate:8.1f} k steps/s)")
    _speedup(results)
    return results


def _speedup(results):
    if "compiled" in results and "python" in results:
        print(f"  speedup: {results['python'] / results['compiled']:.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=1000)
    parser.add_argument("--steps", type=int, default=2000)
    args = parser.parse_args()
    if _kernel_cy is None:
        print("note: compiled kernel not built; timing the fallback only")
    bench_eval_batch(args.samples)
    print()
    bench_rk4(args.steps)


if __name__ == "__main__":
    main()
