"""Synthetic experiment inputs: random polynomial targets and sine trajectories.

Targets are sparse random polynomials (a seeded sample of distinct monomials
with uniform coefficients), standing in for externally-published benchmark
functions of the same item counts.  The standard excitation signal is the
five-sine trajectory

    x1 = sin(2t), x2 = sin(3t), x3 = sin(5t), x4 = sin(7t + 20), x5 = sin(11t)

sampled on a uniform grid over [t_start, t_end] (radians throughout).
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .linalg import ShapeError, as_array, check_finite
from .spectrum import RelationSpectrum, evaluate_spectrum_cols

SINE_INPUT_DIM = 5
MAX_MONOMIAL_UNIVERSE = 2 * 10 ** 6


class CapacityError(ValueError):
    """More monomials requested than the degree bound makes available."""


class DatasetFormatError(ValueError):
    """Dataset CSV is malformed; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class TargetPolynomial:
    """A single-output random polynomial plus the arguments that produced it."""

    spectrum: RelationSpectrum
    seed: int
    n_items: int
    max_degree: int

    @property
    def n(self):
        return self.spectrum.n


@dataclass(frozen=True)
class Dataset:
    """Column-sample input matrix (n x K) paired with targets (m x K)."""

    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "inputs", as_array(self.inputs, 2, "inputs"))
        object.__setattr__(self, "targets", as_array(self.targets, 2, "targets"))
        if self.inputs.shape[1] != self.targets.shape[1]:
            raise ShapeError(
                f"inputs have {self.inputs.shape[1]} columns, "
                f"targets {self.targets.shape[1]}"
            )
        check_finite(self.inputs, "dataset inputs")
        check_finite(self.targets, "dataset targets")

    @property
    def n(self):
        return self.inputs.shape[0]

    @property
    def m(self):
        return self.targets.shape[0]

    @property
    def size(self):
        return self.inputs.shape[1]


def _monomials_up_to(n, degree):
    """All exponent tuples of n variables with total degree <= degree."""
    if n == 1:
        return [(d,) for d in range(degree + 1)]
    out = []
    for d in range(degree + 1):
        out.extend(e + (d,) for e in _monomials_up_to(n - 1, degree - d))
    return out


def gen_random_polynomial(n, max_degree, n_items, coeff_low=-1.0, coeff_high=1.0, seed=0):
    """Sample n_items distinct monomials of total degree <= max_degree.

    Monomials are drawn uniformly without replacement from the full universe,
    coefficients uniformly from [coeff_low, coeff_high]; the whole draw is
    redone (advancing the seeded generator) until some sampled item has the
    full requested degree and every coefficient is nonzero, so the advertised
    item count and max degree always hold.  Deterministic per seed.
    """
    if n < 1 or max_degree < 0 or n_items < 1:
        raise ValueError(
            f"invalid request: n={n}, max_degree={max_degree}, n_items={n_items}"
        )
    if coeff_low > coeff_high or (coeff_low == 0.0 and coeff_high == 0.0):
        raise ValueError(f"bad coefficient range [{coeff_low}, {coeff_high}]")
    universe_size = math.comb(n + max_degree, n)
    if n_items > universe_size:
        raise CapacityError(
            f"requested {n_items} items but only {universe_size} monomials of "
            f"degree <= {max_degree} exist in {n} variables"
        )
    if universe_size > MAX_MONOMIAL_UNIVERSE:
        raise CapacityError(
            f"monomial universe {universe_size} exceeds the generator bound "
            f"{MAX_MONOMIAL_UNIVERSE}"
        )
    universe = _monomials_up_to(n, max_degree)
    rng = np.random.default_rng(seed)
    while True:
        picks = rng.choice(universe_size, size=n_items, replace=False)
        monomials = [universe[i] for i in picks]
        if max_degree and not any(sum(e) == max_degree for e in monomials):
            continue
        coeffs = rng.uniform(coeff_low, coeff_high, size=n_items)
        if np.any(coeffs == 0.0):
            continue
        break
    terms = {e: float(c) for e, c in zip(monomials, coeffs)}
    return TargetPolynomial(
        spectrum=RelationSpectrum(n=n, m=1, terms=(terms,)),
        seed=seed,
        n_items=n_items,
        max_degree=max_degree,
    )


def sample_sine_trajectory(n_samples, t_start=0.0, t_end=7.0):
    """Five-sine excitation on a uniform time grid, endpoints included (5 x K)."""
    if n_samples < 2:
        raise ValueError(f"need at least 2 samples, got {n_samples}")
    if not t_end > t_start:
        raise ValueError(f"need t_end > t_start, got [{t_start}, {t_end}]")
    t = np.linspace(t_start, t_end, n_samples)
    return np.stack(
        [
            np.sin(2.0 * t),
            np.sin(3.0 * t),
            np.sin(5.0 * t),
            np.sin(7.0 * t + 20.0),
            np.sin(11.0 * t),
        ]
    )


def make_dataset(target, inputs):
    """Evaluate a target polynomial on column samples; returns a Dataset."""
    inputs = as_array(inputs, 2, "inputs")
    if inputs.shape[0] != target.n:
        raise ShapeError(
            f"target has {target.n} variables, inputs have {inputs.shape[0]} rows"
        )
    return Dataset(inputs=inputs, targets=evaluate_spectrum_cols(target.spectrum, inputs))


def write_dataset_csv(dataset):
    """CSV bytes with header x1..xn,y1..ym and one sample per row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [f"x{i + 1}" for i in range(dataset.n)] + [f"y{j + 1}" for j in range(dataset.m)]
    )
    for k in range(dataset.size):
        writer.writerow(
            [repr(float(v)) for v in dataset.inputs[:, k]]
            + [repr(float(v)) for v in dataset.targets[:, k]]
        )
    return buf.getvalue().encode("utf-8")


def read_dataset_csv(data):
    """Parse CSV bytes produced by :func:`write_dataset_csv`."""
    try:
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    except UnicodeDecodeError as exc:
        raise DatasetFormatError(f"not valid UTF-8: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetFormatError("missing header", line=1) from None

    n = 0
    while n < len(header) and header[n] == f"x{n + 1}":
        n += 1
    m = 0
    while n + m < len(header) and header[n + m] == f"y{m + 1}":
        m += 1
    if n < 1 or m < 1 or n + m != len(header):
        raise DatasetFormatError(
            f"header must read x1..xn,y1..ym, got {','.join(header)}", line=1
        )

    x_rows, y_rows = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != n + m:
            raise DatasetFormatError(
                f"expected {n + m} cells, got {len(row)}", line=lineno
            )
        try:
            values = [float(cell) for cell in row]
        except ValueError as exc:
            raise DatasetFormatError(f"non-numeric cell: {exc}", line=lineno) from exc
        if not all(math.isfinite(v) for v in values):
            raise DatasetFormatError("non-finite value", line=lineno)
        x_rows.append(values[:n])
        y_rows.append(values[n:])
    if not x_rows:
        raise DatasetFormatError("dataset has a header but no samples", line=2)
    return Dataset(
        inputs=np.asarray(x_rows).T,
        targets=np.asarray(y_rows).T,
    )
