"""Exact expansion of a trained model into its relation spectrum.

A relation spectrum is the explicit multivariate polynomial a network
computes, one sparse coefficient map per output: keys are exponent tuples of
length n (one non-negative integer per input variable), values are real
coefficients.  It is obtained by propagating a vector of sparse polynomials
through the layers, not by sampling and refitting, so forward evaluation and
spectrum evaluation agree to floating-point accuracy.

Propagation rules per layer, with the bias coordinate in the last position:

* a linear map acts on the coefficient maps directly;
* Hadamard with the augmented input multiplies coordinate j's polynomial by
  x_j (bias coordinate untouched);
* the expanded layer multiplies coordinate j by x_j^c instead.

Canonical form: no stored coefficient is exactly zero, and coefficients
below 1e-14 of the output's largest magnitude (float dust from cancellation)
are dropped.  Structural zeros of the architecture therefore show up as
absent keys.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .linalg import ShapeError, as_array
from .network import CRPNN2

MAX_DENSE_MONOMIALS = 10 ** 6
CANONICAL_REL_EPS = 1e-14
SUPPORT_THRESHOLD = 1e-9

CSV_OUTPUT_COL = "output"
CSV_COEFF_COL = "coefficient"


class SpectrumSizeError(ValueError):
    """Dense monomial bound exceeds the expansion guard."""


class SpectrumFormatError(ValueError):
    """Spectrum CSV is malformed; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class RelationSpectrum:
    """Per-output sparse map from exponent tuple to coefficient."""

    n: int
    m: int
    terms: tuple

    def item_count(self):
        return sum(len(t) for t in self.terms)

    def max_total_degree(self):
        degrees = [sum(e) for t in self.terms for e in t]
        return max(degrees) if degrees else 0

    def coefficient(self, output, exponents):
        return self.terms[output].get(tuple(exponents), 0.0)


def _canonical(poly):
    if not poly:
        return {}
    top = max(abs(c) for c in poly.values())
    if top == 0.0:
        return {}
    floor = CANONICAL_REL_EPS * top
    return {e: c for e, c in poly.items() if abs(c) >= floor and c != 0.0}


def _linear(weight, polys):
    """Apply a weight matrix to a vector of sparse polynomials."""
    out = []
    for i in range(weight.shape[0]):
        acc = {}
        for j in range(weight.shape[1]):
            wij = weight[i, j]
            if wij == 0.0:
                continue
            for exps, coef in polys[j].items():
                v = acc.get(exps, 0.0) + wij * coef
                if v == 0.0:
                    acc.pop(exps, None)
                else:
                    acc[exps] = v
        out.append(acc)
    return out


def _shift(poly, var, amount, n):
    """Multiply a coordinate polynomial by x_var^amount (bias coordinate: identity)."""
    if var == n or amount == 0:
        return poly
    out = {}
    for exps, coef in poly.items():
        e = list(exps)
        e[var] += amount
        out[tuple(e)] = coef
    return out


def expand_to_spectrum(model):
    """Expand a model into the exact polynomial it computes per output."""
    spec = model.spec
    n = spec.n
    bound = math.comb(n + spec.order, n)
    if bound > MAX_DENSE_MONOMIALS:
        raise SpectrumSizeError(
            f"dense monomial bound C(n+L, n) = {bound} exceeds the expansion "
            f"guard of {MAX_DENSE_MONOMIALS}"
        )
    zero = (0,) * n
    polys = []
    for j in range(n):
        unit = list(zero)
        unit[j] = 1
        polys.append({tuple(unit): 1.0})
    polys.append({zero: 1.0})  # bias coordinate

    if spec.variant == CRPNN2:
        c = spec.plan.power
        polys = _linear(model.weights[0], polys)
        polys = [_shift(p, j, c, n) for j, p in enumerate(polys)]
        hidden = model.weights[1:-1]
    else:
        hidden = model.weights[:-1]
    for w in hidden:
        polys = _linear(w, polys)
        polys = [_shift(p, j, 1, n) for j, p in enumerate(polys)]
    outputs = _linear(model.weights[-1], polys)
    return RelationSpectrum(n=n, m=spec.m, terms=tuple(_canonical(p) for p in outputs))


def _power_tables(x, max_exps):
    """Per-variable power ladders built by repeated multiplication."""
    tables = []
    for i, top in enumerate(max_exps):
        ladder = [None] * (top + 1)
        ladder[0] = np.ones_like(x[i]) if isinstance(x[i], np.ndarray) else 1.0
        if top >= 1:
            ladder[1] = x[i]
            for d in range(2, top + 1):
                ladder[d] = ladder[d - 1] * x[i]
        tables.append(ladder)
    return tables


def _max_exponents(spectrum):
    tops = [0] * spectrum.n
    for terms in spectrum.terms:
        for exps in terms:
            for i, e in enumerate(exps):
                if e > tops[i]:
                    tops[i] = e
    return tops


def evaluate_spectrum(spectrum, x):
    """Evaluate the polynomial at a single point; returns the m-vector."""
    x = as_array(x, 1, "input vector")
    if x.shape[0] != spectrum.n:
        raise ShapeError(f"spectrum expects dim {spectrum.n}, got {x.shape[0]}")
    tables = _power_tables(x, _max_exponents(spectrum))
    y = np.zeros(spectrum.m)
    for out_idx, terms in enumerate(spectrum.terms):
        acc = 0.0
        for exps, coef in terms.items():
            v = coef
            for i, e in enumerate(exps):
                if e:
                    v *= tables[i][e]
            acc += v
        y[out_idx] = acc
    return y


def evaluate_spectrum_cols(spectrum, xs):
    """Evaluate at every column of an n x K matrix; returns m x K."""
    xs = as_array(xs, 2, "input matrix")
    if xs.shape[0] != spectrum.n:
        raise ShapeError(f"spectrum expects {spectrum.n} input rows, got {xs.shape[0]}")
    tables = _power_tables(xs, _max_exponents(spectrum))
    ys = np.zeros((spectrum.m, xs.shape[1]))
    for out_idx, terms in enumerate(spectrum.terms):
        acc = ys[out_idx]
        for exps, coef in terms.items():
            v = None
            for i, e in enumerate(exps):
                if e:
                    v = tables[i][e] if v is None else v * tables[i][e]
            acc += coef if v is None else coef * v
    return ys


def compare_spectra(a, b):
    """Worst coefficient gap and support mismatch between two spectra.

    Absent coefficients count as zero.  The second value is the number of
    monomials present in exactly one spectrum with magnitude above 1e-9.
    """
    if a.n != b.n or a.m != b.m:
        raise ShapeError(
            f"spectra differ in dimensions: ({a.n}, {a.m}) vs ({b.n}, {b.m})"
        )
    max_diff = 0.0
    support_mismatch = 0
    for ta, tb in zip(a.terms, b.terms):
        for key in ta.keys() | tb.keys():
            ca = ta.get(key)
            cb = tb.get(key)
            diff = abs((ca or 0.0) - (cb or 0.0))
            if diff > max_diff:
                max_diff = diff
            if (ca is None) != (cb is None):
                present = ca if cb is None else cb
                if abs(present) > SUPPORT_THRESHOLD:
                    support_mismatch += 1
    return max_diff, support_mismatch


def _sorted_rows(spectrum):
    rows = [
        (out_idx, exps, coef)
        for out_idx, terms in enumerate(spectrum.terms)
        for exps, coef in terms.items()
    ]
    rows.sort(key=lambda r: (r[0], sum(r[1]), r[1]))
    return rows


def export_spectrum(spectrum):
    """Write the spectrum as CSV bytes: e_1..e_n, output, coefficient.

    Rows are sorted by (output, total degree, exponents) so exports are
    diff-stable; coefficients use round-trip decimal precision.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"e_{i + 1}" for i in range(spectrum.n)] + [CSV_OUTPUT_COL, CSV_COEFF_COL])
    for out_idx, exps, coef in _sorted_rows(spectrum):
        writer.writerow([*exps, out_idx, repr(float(coef))])
    return buf.getvalue().encode("utf-8")


def import_spectrum(data):
    """Parse CSV bytes produced by :func:`export_spectrum`.

    The schema carries no output count, so m is inferred as the largest
    output index + 1 (1 for a term-less file).  Exact-zero coefficients are
    dropped to keep the canonical form.
    """
    try:
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    except UnicodeDecodeError as exc:
        raise SpectrumFormatError(f"not valid UTF-8: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SpectrumFormatError("missing header", line=1) from None
    if len(header) < 3 or header[-2:] != [CSV_OUTPUT_COL, CSV_COEFF_COL]:
        raise SpectrumFormatError(
            f"header must end with '{CSV_OUTPUT_COL},{CSV_COEFF_COL}'", line=1
        )
    n = len(header) - 2
    expected = [f"e_{i + 1}" for i in range(n)]
    if header[:n] != expected:
        raise SpectrumFormatError(
            f"exponent columns must be {','.join(expected)}", line=1
        )

    per_output = {}
    seen = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != n + 2:
            raise SpectrumFormatError(
                f"expected {n + 2} cells, got {len(row)}", line=lineno
            )
        try:
            exps = tuple(int(cell) for cell in row[:n])
            out_idx = int(row[n])
            coef = float(row[n + 1])
        except ValueError as exc:
            raise SpectrumFormatError(f"non-numeric cell: {exc}", line=lineno) from exc
        if any(e < 0 for e in exps):
            raise SpectrumFormatError(f"negative exponent in {exps}", line=lineno)
        if out_idx < 0:
            raise SpectrumFormatError(f"negative output index {out_idx}", line=lineno)
        if not math.isfinite(coef):
            raise SpectrumFormatError(f"non-finite coefficient {row[n + 1]}", line=lineno)
        if (out_idx, exps) in seen:
            raise SpectrumFormatError(
                f"duplicate monomial {exps} for output {out_idx}", line=lineno
            )
        seen.add((out_idx, exps))
        if coef != 0.0:
            per_output.setdefault(out_idx, {})[exps] = coef

    m = max((idx for idx, _ in seen), default=0) + 1
    return RelationSpectrum(
        n=n, m=m, terms=tuple(per_output.get(i, {}) for i in range(m))
    )
