#!/usr/bin/env python3
"""Benchmark the numba kernel path against the pure-numpy fallback.

The kernel backend is frozen at import time by the CRPNN_NUMBA env flag, so
each backend is timed in its own subprocess and the parent prints a
comparison table.  Timed sections: one batched forward pass per variant and
one full-batch training epoch per variant, averaged over `--reps` after an
untimed warm-up (which also absorbs JIT compilation).

Usage:
    python3 benchmarks/compare_backends.py [--n 5] [--order 14]
        [--samples 5000] [--reps 50] [--runs 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time

VARIANTS = ("crpnn1", "crpnn2")


def measure(args):
    import numpy as np

    from crpnn import kernels
    from crpnn.datagen import sample_sine_trajectory
    from crpnn.network import NetworkSpec, init_weights, predict_batch
    from crpnn.training import backward, sgd_step

    if args.n == 5:
        inputs = np.ascontiguousarray(sample_sine_trajectory(args.samples))
    else:
        inputs = np.random.default_rng(0).uniform(-1, 1, size=(args.n, args.samples))
    targets = np.random.default_rng(1).uniform(-1, 1, size=(1, args.samples))

    out = {"backend": kernels.backend_name(), "results": {}}
    for variant in VARIANTS:
        spec = NetworkSpec.create(variant, args.n, 1, args.order)
        forward_best, epoch_best = [], []
        for run in range(args.runs):
            model = init_weights(spec, seed=run)
            predict_batch(model, inputs)  # warm-up / JIT
            t0 = time.perf_counter()
            for _ in range(args.reps):
                predict_batch(model, inputs)
            forward_best.append((time.perf_counter() - t0) / args.reps)

            trainee = model.copy()
            sgd_step(trainee, backward(trainee, inputs, targets), 0.01)  # warm-up
            t0 = time.perf_counter()
            for _ in range(args.reps):
                sgd_step(trainee, backward(trainee, inputs, targets), 0.01)
            epoch_best.append((time.perf_counter() - t0) / args.reps)
        out["results"][variant] = {
            "forward_s": min(forward_best),
            "epoch_s": min(epoch_best),
        }
    return out


def fmt_ms(seconds):
    return f"{seconds * 1e3:8.3f} ms"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=5)
    parser.add_argument("--order", type=int, default=14)
    parser.add_argument("--samples", type=int, default=5000)
    parser.add_argument("--reps", type=int, default=50)
    parser.add_argument("--runs", type=int, default=3)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        print(json.dumps(measure(args)))
        return

    reports = {}
    for flag in ("1", "0"):
        env = dict(os.environ, CRPNN_NUMBA=flag)
        cmd = [sys.executable, os.path.abspath(__file__), "--worker",
               "--n", str(args.n), "--order", str(args.order),
               "--samples", str(args.samples), "--reps", str(args.reps),
               "--runs", str(args.runs)]
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
        report = json.loads(proc.stdout.strip().splitlines()[-1])
        reports[report["backend"]] = report["results"]

    print(f"kernel backends, n={args.n} order={args.order} samples={args.samples} "
          f"(best of {args.runs} x {args.reps} reps)")
    header = f"{'':10s} {'section':10s}" + "".join(f"{b:>14s}" for b in reports)
    print(header)
    for variant in VARIANTS:
        for section in ("forward_s", "epoch_s"):
            cells = "".join(f"{fmt_ms(reports[b][variant][section]):>14s}" for b in reports)
            print(f"{variant:10s} {section[:-2]:10s}{cells}")
    if {"numba", "numpy"} <= reports.keys():
        for variant in VARIANTS:
            speedup = (reports["numpy"][variant]["forward_s"]
                       / reports["numba"][variant]["forward_s"])
            print(f"{variant}: numba forward speedup {speedup:.2f}x over numpy")


if __name__ == "__main__":
    main()
