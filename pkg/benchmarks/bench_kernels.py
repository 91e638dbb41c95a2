"""Benchmark the two kernel backends against each other.

Both implementations are importable regardless of the KVBELL_DISABLE_NUMBA
flag, so this script times them side by side in one process: the jitted
path is warmed once before timing so compilation never pollutes a row.
Outputs are also compared, and the script exits nonzero on any mismatch.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats 7] [--json]
"""

import argparse
import json
import sys
import time

import numpy as np

from kvbell.kernels import (
    HAS_NUMBA,
    direct_coefficient_table_jit,
    direct_coefficient_table_numpy,
    enumerate_assignments_max_jit,
    enumerate_assignments_max_numpy,
)
from kvbell.kvgame import build_hadamard_subgroup, kv_functional, noise_string_probs


def best_of(fn, args, repeats):
    times = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def workloads():
    table8 = build_hadamard_subgroup(3)
    probs8 = noise_string_probs(8, 0.25)
    yield (
        "coefficient table, group size 8",
        direct_coefficient_table_numpy,
        direct_coefficient_table_jit,
        (table8.elems, table8.coset_of, probs8),
        lambda a, b: np.array_equal(a, b),
    )

    game4 = kv_functional(build_hadamard_subgroup(2), 0.25)
    reward4 = np.ascontiguousarray(game4.dense().transpose(0, 2, 1, 3))
    yield (
        "assignment scan, real game (4 inputs, 4 outputs)",
        enumerate_assignments_max_numpy,
        enumerate_assignments_max_jit,
        (reward4,),
        lambda a, b: float(a) == float(b),
    )

    rng = np.random.Generator(np.random.PCG64(7))
    reward_big = rng.normal(size=(8, 4, 8, 4))
    yield (
        "assignment scan, synthetic (8 inputs, 4 outputs)",
        enumerate_assignments_max_numpy,
        enumerate_assignments_max_jit,
        (np.ascontiguousarray(reward_big),),
        lambda a, b: float(a) == float(b),
    )

    reward_wide = rng.normal(size=(6, 6, 6, 6))
    yield (
        "assignment scan, synthetic (6 inputs, 6 outputs)",
        enumerate_assignments_max_numpy,
        enumerate_assignments_max_jit,
        (np.ascontiguousarray(reward_wide),),
        lambda a, b: float(a) == float(b),
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=7, help="timing repeats per row (best is kept)")
    ap.add_argument("--json", action="store_true", help="emit machine-readable JSON")
    args = ap.parse_args(argv)
    if args.repeats < 1:
        ap.error("--repeats must be at least 1")

    rows = []
    mismatched = False
    for name, numpy_fn, jit_fn, fn_args, same in workloads():
        t_np, out_np = best_of(numpy_fn, fn_args, args.repeats)
        row = {"workload": name, "numpy_s": t_np}
        if HAS_NUMBA:
            jit_fn(*fn_args)  # warm: compile outside the timed region
            t_jit, out_jit = best_of(jit_fn, fn_args, args.repeats)
            row["numba_s"] = t_jit
            row["speedup"] = t_np / t_jit if t_jit > 0 else float("inf")
            row["outputs_match"] = bool(same(out_np, out_jit))
            mismatched = mismatched or not row["outputs_match"]
        rows.append(row)

    if args.json:
        print(json.dumps({"has_numba": HAS_NUMBA, "repeats": args.repeats, "rows": rows}, indent=2))
    else:
        print(f"kernel backends, best of {args.repeats} runs")
        if not HAS_NUMBA:
            print("numba unavailable: timing the numpy fallback only")
        for row in rows:
            line = f"  {row['workload']:<48} numpy {row['numpy_s'] * 1e3:9.3f} ms"
            if HAS_NUMBA:
                line += (
                    f"   numba {row['numba_s'] * 1e3:9.3f} ms"
                    f"   x{row['speedup']:.1f}"
                    f"   match={row['outputs_match']}"
                )
            print(line)
    return 1 if mismatched else 0


if __name__ == "__main__":
    sys.exit(main())
