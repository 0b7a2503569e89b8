"""Wall-clock timing harness for the two variants, with multiply-count audit.

Per run: a fresh seeded model and a fresh input batch; one untimed forward
pass (which doubles as the instrumented count audit) and one untimed epoch
warm the caches and the JIT, then ``forward_reps`` batched forward passes
and ``epochs`` full-batch training steps are timed separately on a monotonic
clock.  Statistics are aggregated across runs with the (runs-1)-divisor
standard deviation.

Multiply counts cover multiplications only; additions are never counted.
A timed epoch is one full-batch backward plus weight update (no metric
evaluation).  Training targets are seeded uniform noise: timing does not
depend on what the labels mean.
"""

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .datagen import SINE_INPUT_DIM, sample_sine_trajectory
from .linalg import MultiplyCounter
from .network import CRPNN1, CRPNN2, NetworkSpec, init_weights, predict_batch
from .topology import mult_count_crpnn1, mult_count_crpnn2
from .training import backward, sgd_step

COUNT_NOTE = "multiply counts cover multiplications only; additions are not counted"


@dataclass(frozen=True)
class BenchProtocol:
    variants: tuple = (CRPNN1, CRPNN2)
    n: int = 5
    m: int = 1
    order: int = 14
    samples: int = 5000
    forward_reps: int = 1000
    epochs: int = 1000
    runs: int = 10
    seed: int = 0
    learning_rate: float = 0.01

    def __post_init__(self):
        for name in ("n", "m", "order", "samples", "forward_reps", "epochs", "runs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass
class VariantResult:
    variant: str
    forward_seconds_mean: float
    forward_seconds_sd: float
    epoch_seconds_mean: float
    epoch_seconds_sd: float
    mults_per_sample: int
    mults_per_forward: int
    measured_mults_per_forward: int


@dataclass
class BenchReport:
    protocol: BenchProtocol
    results: list = field(default_factory=list)
    kernel_backend: str = ""
    note: str = COUNT_NOTE

    def result_for(self, variant):
        for r in self.results:
            if r.variant == variant:
                return r
        raise KeyError(variant)

    def to_json(self):
        doc = {
            "protocol": asdict(self.protocol),
            "results": [asdict(r) for r in self.results],
            "kernel_backend": self.kernel_backend,
            "note": self.note,
        }
        doc["protocol"]["variants"] = list(self.protocol.variants)
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _bench_inputs(n, samples, rng):
    if n == SINE_INPUT_DIM:
        return sample_sine_trajectory(samples)
    return rng.uniform(-1.0, 1.0, size=(n, samples))


def _stats(values):
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, sd


def run_bench(protocol):
    """Execute the timing protocol and return a BenchReport."""
    report = BenchReport(protocol=protocol, kernel_backend=kernels.backend_name())
    for variant in protocol.variants:
        spec = NetworkSpec.create(variant, protocol.n, protocol.m, protocol.order)
        if variant == CRPNN1:
            per_sample = mult_count_crpnn1(protocol.n, protocol.m, protocol.order)
        else:
            per_sample = mult_count_crpnn2(protocol.n, protocol.m, protocol.order)
        per_forward = per_sample * protocol.samples

        forward_times = []
        epoch_times = []
        measured = None
        for run in range(protocol.runs):
            run_seed = protocol.seed + run
            rng = np.random.default_rng(run_seed)
            model = init_weights(spec, seed=run_seed)
            inputs = np.ascontiguousarray(_bench_inputs(protocol.n, protocol.samples, rng))
            targets = rng.uniform(-1.0, 1.0, size=(protocol.m, protocol.samples))

            # untimed warm-up forward doubles as the instrumented count audit
            counter = MultiplyCounter()
            predict_batch(model, inputs, counter)
            measured = counter.count
            if measured != per_forward:
                raise RuntimeError(
                    f"instrumented count {measured} != analytic count "
                    f"{per_forward} for {variant} (n={protocol.n}, "
                    f"m={protocol.m}, order={protocol.order})"
                )

            start = time.perf_counter()
            for _ in range(protocol.forward_reps):
                predict_batch(model, inputs)
            forward_times.append(time.perf_counter() - start)

            trainee = model.copy()
            warm = model.copy()  # untimed warm-up epoch
            sgd_step(warm, backward(warm, inputs, targets), protocol.learning_rate)
            start = time.perf_counter()
            for _ in range(protocol.epochs):
                sgd_step(
                    trainee,
                    backward(trainee, inputs, targets),
                    protocol.learning_rate,
                )
            epoch_times.append(time.perf_counter() - start)

        fwd_mean, fwd_sd = _stats(forward_times)
        ep_mean, ep_sd = _stats(epoch_times)
        report.results.append(
            VariantResult(
                variant=variant,
                forward_seconds_mean=fwd_mean,
                forward_seconds_sd=fwd_sd,
                epoch_seconds_mean=ep_mean,
                epoch_seconds_sd=ep_sd,
                mults_per_sample=per_sample,
                mults_per_forward=per_forward,
                measured_mults_per_forward=measured,
            )
        )
    return report
