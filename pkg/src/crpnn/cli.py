"""Command-line surface: gen / train / eval / spectrum / bench / compare.

Every subcommand is deterministic given its seed (wall-time fields aside)
and works from plain CSV/JSON files, so pipelines are reproducible and
diff-able.  `CRPNN_SEED` supplies a default seed when --seed is omitted.

Exit codes: 0 success, 1 runtime/data error, 2 usage error.
"""

import argparse
import csv
import io
import os
import sys
import time

import numpy as np

from . import bench as bench_mod
from .datagen import (
    CapacityError,
    Dataset,
    DatasetFormatError,
    gen_random_polynomial,
    make_dataset,
    read_dataset_csv,
    sample_sine_trajectory,
    write_dataset_csv,
    SINE_INPUT_DIM,
)
from .linalg import ShapeError
from .network import (
    CRPNN1,
    CRPNN2,
    VARIANTS,
    ModelFormatError,
    NetworkSpec,
    init_weights,
    load_model,
    predict_batch,
    save_model,
)
from .spectrum import (
    SpectrumFormatError,
    SpectrumSizeError,
    expand_to_spectrum,
    export_spectrum,
)
from .topology import TopologyError
from .training import TrainConfig, TrainingDivergedError, loss_mse, train

_RUNTIME_ERRORS = (
    CapacityError,
    DatasetFormatError,
    ModelFormatError,
    ShapeError,
    SpectrumFormatError,
    SpectrumSizeError,
    TopologyError,
    TrainingDivergedError,
    FloatingPointError,
    OSError,
    ValueError,
)


def _default_seed():
    raw = os.environ.get("CRPNN_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"CRPNN_SEED must be an integer, got {raw!r}") from exc


def _resolve_seed(value):
    return _default_seed() if value is None else value


def _parse_orders(tokens):
    """Expand order tokens: plain ints plus inclusive `lo-hi` ranges."""
    orders = []
    for token in tokens:
        lo, sep, hi = token.partition("-")
        try:
            if sep and lo and hi:
                lo_i, hi_i = int(lo), int(hi)
                if hi_i < lo_i:
                    raise ValueError
                orders.extend(range(lo_i, hi_i + 1))
            else:
                orders.append(int(token))
        except ValueError:
            raise ValueError(f"bad order token {token!r}") from None
    return orders


def build_parser():
    parser = argparse.ArgumentParser(
        prog="crpnn",
        description="Polynomial networks with controllable order and readable "
        "relation spectra: data generation, training, expansion and benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random polynomial target and a dataset")
    p.add_argument("--n", type=int, required=True, help="input dimension")
    p.add_argument("--degree", type=int, required=True, help="max total degree of the target")
    p.add_argument("--items", type=int, required=True, help="number of monomials")
    p.add_argument("--coeff-low", type=float, default=-1.0, help="coefficient range low end (default -1)")
    p.add_argument("--coeff-high", type=float, default=1.0, help="coefficient range high end (default 1)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: CRPNN_SEED or 0)")
    p.add_argument("--out", required=True, help="target polynomial CSV path")
    p.add_argument("--data-out", default=None, help="also evaluate the target on sampled inputs and write a dataset CSV")
    p.add_argument("--samples", type=int, default=1000, help="dataset sample count (default 1000)")
    p.add_argument("--t-start", type=float, default=0.0, help="trajectory start time (default 0)")
    p.add_argument("--t-end", type=float, default=7.0, help="trajectory end time (default 7)")

    p = sub.add_parser("train", help="train a network on a dataset CSV")
    p.add_argument("--variant", choices=VARIANTS, required=True, help="network structure")
    p.add_argument("--order", type=int, required=True, help="network order (max total degree)")
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--epochs", type=int, default=2000, help="training epochs (default 2000)")
    p.add_argument("--lr", type=float, default=0.01, help="learning rate (default 0.01)")
    p.add_argument("--lr-decay", type=float, default=None, help="per-epoch multiplicative decay (default none)")
    p.add_argument("--batch-size", type=int, default=None, help="minibatch size (default: full batch)")
    p.add_argument("--init-scale", type=float, default=None, help="uniform init half-width (default 1/sqrt(n+1))")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: CRPNN_SEED or 0)")
    p.add_argument("--model-out", required=True, help="trained model JSON path")
    p.add_argument("--metrics-out", default=None, help="per-epoch `epoch,mse` CSV path")

    p = sub.add_parser("eval", help="score a trained model on a dataset CSV")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--out", default=None, help="per-sample actual-vs-predicted CSV path")

    p = sub.add_parser("spectrum", help="expand a trained model into its relation spectrum")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--out", required=True, help="spectrum CSV path")

    p = sub.add_parser("bench", help="time forward passes and training epochs for both variants")
    p.add_argument("--variant", choices=VARIANTS + ("both",), default="both", help="which structures to time (default both)")
    p.add_argument("--n", type=int, default=5, help="input dimension (default 5)")
    p.add_argument("--m", type=int, default=1, help="output dimension (default 1)")
    p.add_argument("--order", type=int, default=14, help="network order (default 14)")
    p.add_argument("--samples", type=int, default=5000, help="batch columns per pass (default 5000)")
    p.add_argument("--forward-reps", type=int, default=1000, help="timed forward passes (default 1000)")
    p.add_argument("--epochs", type=int, default=1000, help="timed training epochs (default 1000)")
    p.add_argument("--runs", type=int, default=10, help="independent runs (default 10)")
    p.add_argument("--lr", type=float, default=0.01, help="learning rate for timed epochs (default 0.01)")
    p.add_argument("--seed", type=int, default=None, help="base RNG seed (default: CRPNN_SEED or 0)")
    p.add_argument("--out", default=None, help="report JSON path (default: stdout)")

    p = sub.add_parser("compare", help="train both variants over orders and seeds, emit an MSE table")
    p.add_argument("--variant", choices=VARIANTS + ("both",), default="both", help="which structures to train (default both)")
    p.add_argument("--orders", nargs="+", required=True, help="orders, e.g. `7 9 14` or `7-14`")
    p.add_argument("--seeds", type=int, default=10, help="seeds per (variant, order) cell (default 10)")
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--epochs", type=int, default=2000, help="training epochs per cell (default 2000)")
    p.add_argument("--lr", type=float, default=0.01, help="learning rate (default 0.01)")
    p.add_argument("--batch-size", type=int, default=None, help="minibatch size (default: full batch)")
    p.add_argument("--init-scale", type=float, default=None, help="uniform init half-width (default 1/sqrt(n+1))")
    p.add_argument("--seed", type=int, default=None, help="base RNG seed (default: CRPNN_SEED or 0)")
    p.add_argument("--out", default=None, help="table CSV path (default: stdout)")

    return parser


def parse_cli(argv):
    """Parse arguments into a command namespace; exits with code 2 on usage errors."""
    return build_parser().parse_args(argv)


def _write_or_print(payload, path):
    if path is None:
        sys.stdout.write(payload if isinstance(payload, str) else payload.decode("utf-8"))
    else:
        mode = "wb" if isinstance(payload, (bytes, bytearray)) else "w"
        with open(path, mode) as fh:
            fh.write(payload)


def _gen_inputs(n, samples, t_start, t_end, seed):
    if n == SINE_INPUT_DIM:
        return sample_sine_trajectory(samples, t_start, t_end)
    # the five-sine trajectory is 5-dimensional; other dims use seeded uniforms
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=(n, samples))


def cmd_gen(args):
    seed = _resolve_seed(args.seed)
    target = gen_random_polynomial(
        args.n, args.degree, args.items, args.coeff_low, args.coeff_high, seed
    )
    _write_or_print(export_spectrum(target.spectrum), args.out)
    if args.data_out:
        inputs = _gen_inputs(args.n, args.samples, args.t_start, args.t_end, seed)
        dataset = make_dataset(target, inputs)
        _write_or_print(write_dataset_csv(dataset), args.data_out)
    return 0


def cmd_train(args):
    seed = _resolve_seed(args.seed)
    with open(args.data, "rb") as fh:
        dataset = read_dataset_csv(fh.read())
    spec = NetworkSpec.create(args.variant, dataset.n, dataset.m, args.order)
    model = init_weights(spec, seed=seed, scale=args.init_scale)
    config = TrainConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=seed,
        lr_decay=args.lr_decay,
    )
    model, record = train(model, dataset, config, metrics_path=args.metrics_out)
    with open(args.model_out, "wb") as fh:
        fh.write(save_model(model))
    print(f"final_mse={record.final_mse!r}")
    return 0


def cmd_eval(args):
    with open(args.model, "rb") as fh:
        model = load_model(fh.read())
    with open(args.data, "rb") as fh:
        dataset = read_dataset_csv(fh.read())
    predictions = predict_batch(model, dataset.inputs)
    mse = loss_mse(predictions, dataset.targets)
    if args.out is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        m = dataset.m
        if m == 1:
            writer.writerow(["t_index", "actual", "predicted"])
            for k in range(dataset.size):
                writer.writerow(
                    [k, repr(float(dataset.targets[0, k])), repr(float(predictions[0, k]))]
                )
        else:
            writer.writerow(
                ["t_index"]
                + [f"actual_{j + 1}" for j in range(m)]
                + [f"predicted_{j + 1}" for j in range(m)]
            )
            for k in range(dataset.size):
                writer.writerow(
                    [k]
                    + [repr(float(v)) for v in dataset.targets[:, k]]
                    + [repr(float(v)) for v in predictions[:, k]]
                )
        _write_or_print(buf.getvalue(), args.out)
    print(f"final_mse={mse!r}")
    return 0


def cmd_spectrum(args):
    with open(args.model, "rb") as fh:
        model = load_model(fh.read())
    _write_or_print(export_spectrum(expand_to_spectrum(model)), args.out)
    return 0


def _variant_list(choice):
    return list(VARIANTS) if choice == "both" else [choice]


def cmd_bench(args):
    protocol = bench_mod.BenchProtocol(
        variants=tuple(_variant_list(args.variant)),
        n=args.n,
        m=args.m,
        order=args.order,
        samples=args.samples,
        forward_reps=args.forward_reps,
        epochs=args.epochs,
        runs=args.runs,
        seed=_resolve_seed(args.seed),
        learning_rate=args.lr,
    )
    report = bench_mod.run_bench(protocol)
    _write_or_print(report.to_json(), args.out)
    return 0


def cmd_compare(args):
    base_seed = _resolve_seed(args.seed)
    orders = _parse_orders(args.orders)
    with open(args.data, "rb") as fh:
        dataset = read_dataset_csv(fh.read())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["variant", "order", "seed", "final_mse", "seconds"])
    for variant in _variant_list(args.variant):
        for order in orders:
            for offset in range(args.seeds):
                seed = base_seed + offset
                spec = NetworkSpec.create(variant, dataset.n, dataset.m, order)
                model = init_weights(spec, seed=seed, scale=args.init_scale)
                config = TrainConfig(
                    learning_rate=args.lr,
                    epochs=args.epochs,
                    batch_size=args.batch_size,
                    seed=seed,
                )
                start = time.perf_counter()
                _, record = train(model, dataset, config)
                writer.writerow(
                    [variant, order, seed, repr(record.final_mse),
                     repr(time.perf_counter() - start)]
                )
    _write_or_print(buf.getvalue(), args.out)
    return 0


_COMMANDS = {
    "gen": cmd_gen,
    "train": cmd_train,
    "eval": cmd_eval,
    "spectrum": cmd_spectrum,
    "bench": cmd_bench,
    "compare": cmd_compare,
}


def execute(args):
    """Run a parsed command; returns the process exit code."""
    try:
        return _COMMANDS[args.command](args)
    except _RUNTIME_ERRORS as exc:
        print(f"crpnn {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    return execute(parse_cli(argv))


if __name__ == "__main__":
    sys.exit(main())
