"""Median per-call timings of the state-vector kernels, both backends.

Imports the pure-NumPy module and the compiled extension directly (bypassing
the import-time backend selection) so one process can time both. The
``step`` row composes the same operations as one symmetric Trotter substep
with cached diagonal phases: two phase multiplies plus the x-rotation sweep.

Usage: python benchmarks/bench_kernels.py [--sizes 12,14,16] [--repeats 9]
       [--threads 1]
"""

import argparse
import statistics
import time

import numpy as np

from confine_sim.kernels import pure

try:
    from confine_sim.kernels import _core as compiled
except ImportError:
    compiled = None


def median_time(fn, repeats, warmup=2):
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def make_inputs(L, rng):
    dim = 1 << L
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    amps /= np.linalg.norm(amps)
    weights = rng.standard_normal(L)
    pair_i, pair_j = np.triu_indices(L, k=1)
    pair_w = rng.standard_normal(pair_i.size)
    angles = 0.01 * rng.standard_normal(L)
    e_half = np.exp(-0.5j * 1e-3 * rng.standard_normal(dim))
    return {
        "amps": np.ascontiguousarray(amps),
        "weights": np.ascontiguousarray(weights),
        "pair_i": np.ascontiguousarray(pair_i.astype(np.int64)),
        "pair_j": np.ascontiguousarray(pair_j.astype(np.int64)),
        "pair_w": np.ascontiguousarray(pair_w),
        "angles": np.ascontiguousarray(angles),
        "e_half": e_half,
        "out": np.empty(dim),
    }


def op_timers(impl, L, data, threads):
    def diag():
        impl.weighted_sz_sum(L, data["weights"], data["out"], threads)

    def pairs():
        impl.pair_zz_sum(
            L, data["pair_i"], data["pair_j"], data["pair_w"], data["out"], threads
        )

    def xrot():
        impl.apply_x_rotations(data["amps"], L, data["angles"], threads)

    def step():
        data["amps"] *= data["e_half"]
        impl.apply_x_rotations(data["amps"], L, data["angles"], threads)
        data["amps"] *= data["e_half"]

    return {"weighted_sz_sum": diag, "pair_zz_sum": pairs,
            "apply_x_rotations": xrot, "step": step}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="12,14,16",
                        help="comma-separated chain lengths")
    parser.add_argument("--repeats", type=int, default=9)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = [("pure", pure)]
    if compiled is not None:
        backends.append(("compiled", compiled))
    else:
        print("compiled extension not importable; timing the fallback only")

    rng = np.random.default_rng(0)
    header = f"{'L':>3} {'operation':<20}" + "".join(
        f"{name + ' (ms)':>16}" for name, _ in backends
    )
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for L in sizes:
        data = make_inputs(L, rng)
        rows = {}
        for name, impl in backends:
            timers = op_timers(impl, L, data, args.threads)
            rows[name] = {
                op: 1e3 * median_time(fn, args.repeats) for op, fn in timers.items()
            }
        for op in ("weighted_sz_sum", "pair_zz_sum", "apply_x_rotations", "step"):
            line = f"{L:>3} {op:<20}"
            for name, _ in backends:
                line += f"{rows[name][op]:>16.3f}"
            if len(backends) == 2 and rows["compiled"][op] > 0:
                line += f"{rows['pure'][op] / rows['compiled'][op]:>9.2f}x"
            print(line)
    print(f"\nthreads={args.threads} repeats={args.repeats} "
          f"(median of repeats after 2 warmup calls)")


if __name__ == "__main__":
    main()
