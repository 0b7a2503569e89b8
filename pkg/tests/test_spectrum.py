import numpy as np
import pytest

from crpnn.linalg import ShapeError
from crpnn.network import CRPNN1, CRPNN2, CrpnnModel, NetworkSpec, forward, init_weights
from crpnn.spectrum import (
    RelationSpectrum,
    SpectrumFormatError,
    SpectrumSizeError,
    compare_spectra,
    evaluate_spectrum,
    evaluate_spectrum_cols,
    expand_to_spectrum,
    export_spectrum,
    import_spectrum,
)


def identity_crpnn2_toy():
    spec = NetworkSpec.crpnn2(1, 1, 5)
    return CrpnnModel(spec, [np.eye(2), np.eye(2), np.array([[1.0, 1.0]])])


def test_toy_expansion_is_x5_plus_1():
    spectrum = expand_to_spectrum(identity_crpnn2_toy())
    assert spectrum.terms == ({(5,): 1.0, (0,): 1.0},)


def test_zero_weights_expand_to_empty_spectrum():
    spec = NetworkSpec.crpnn1(2, 1, 3)
    model = CrpnnModel(spec, [np.zeros(s) for s in spec.weight_shapes()])
    spectrum = expand_to_spectrum(model)
    assert spectrum.terms == ({},)
    assert spectrum.item_count() == 0


@pytest.mark.parametrize("variant", [CRPNN1, CRPNN2])
def test_forward_agreement_at_random_points(variant):
    rng = np.random.default_rng(31)
    n, order = (3, 5) if variant == CRPNN1 else (3, 6)
    model = init_weights(NetworkSpec.create(variant, n, 2, order), seed=8)
    spectrum = expand_to_spectrum(model)
    for _ in range(100):
        x = rng.uniform(-1, 1, size=n)
        y_net = forward(model, x)
        y_poly = evaluate_spectrum(spectrum, x)
        assert np.max(np.abs(y_net - y_poly) / (1 + np.abs(y_net))) < 1e-9


@pytest.mark.parametrize("variant", [CRPNN1, CRPNN2])
def test_degree_bound(variant):
    rng = np.random.default_rng(17)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        low = n + 2 if variant == CRPNN2 else 1
        order = int(rng.integers(low, 10))
        model = init_weights(
            NetworkSpec.create(variant, n, 1, order), seed=int(rng.integers(10_000))
        )
        assert expand_to_spectrum(model).max_total_degree() <= order


def test_crpnn2_structural_zero_and_degree_coverage():
    # order 6 with two inputs: power 3 forces every coefficient of a monomial
    # of degree >= 4 to carry some x_j^3, so x1^2 x2^2 is structurally absent,
    # while total degrees 0..6 all stay reachable.
    for seed in range(100):
        model = init_weights(NetworkSpec.crpnn2(2, 1, 6), seed=seed)
        spectrum = expand_to_spectrum(model)
        assert abs(spectrum.coefficient(0, (2, 2))) < 1e-12
        degrees = {sum(e) for e, c in spectrum.terms[0].items() if abs(c) > 1e-12}
        assert degrees == set(range(7))


def test_crpnn2_degree_coverage_across_plans():
    # c <= l+2 keeps the low and high degree branches contiguous, so every
    # total degree up to the order stays reachable for random weights
    rng = np.random.default_rng(23)
    for n in (1, 2, 3):
        for order in range(n + 2, 10):
            model = init_weights(
                NetworkSpec.crpnn2(n, 1, order), seed=int(rng.integers(10_000))
            )
            terms = expand_to_spectrum(model).terms[0]
            degrees = {sum(e) for e, c in terms.items() if abs(c) > 1e-12}
            assert degrees == set(range(order + 1)), (n, order)


def test_crpnn1_monomial_completeness():
    model = init_weights(NetworkSpec.crpnn1(2, 1, 3), seed=5)
    terms = expand_to_spectrum(model).terms[0]
    expected = {(i, j) for i in range(4) for j in range(4) if i + j <= 3}
    present = {e for e, c in terms.items() if abs(c) > 1e-12}
    assert present == expected


def test_expansion_guard():
    model = init_weights(NetworkSpec.crpnn1(10, 1, 40), seed=0)
    with pytest.raises(SpectrumSizeError, match="guard"):
        expand_to_spectrum(model)


def test_evaluate_empty_spectrum():
    empty = RelationSpectrum(n=2, m=3, terms=({}, {}, {}))
    np.testing.assert_array_equal(evaluate_spectrum(empty, [0.5, 0.5]), np.zeros(3))


def test_evaluate_by_hand():
    s = RelationSpectrum(n=2, m=1, terms=({(1, 1): -2.0, (0, 0): 0.5},))
    np.testing.assert_allclose(evaluate_spectrum(s, [3.0, 4.0]), [-23.5])


def test_evaluate_at_zero_gives_constants():
    s = RelationSpectrum(n=2, m=2, terms=({(0, 0): 1.25, (2, 1): 9.0}, {(1, 0): 4.0},))
    np.testing.assert_array_equal(evaluate_spectrum(s, [0.0, 0.0]), [1.25, 0.0])


def test_evaluate_cols_matches_single_point():
    rng = np.random.default_rng(3)
    model = init_weights(NetworkSpec.crpnn2(3, 2, 6), seed=1)
    s = expand_to_spectrum(model)
    xs = rng.uniform(-1, 1, size=(3, 40))
    batch = evaluate_spectrum_cols(s, xs)
    for k in range(40):
        np.testing.assert_allclose(batch[:, k], evaluate_spectrum(s, xs[:, k]), rtol=1e-12)


def test_evaluate_dimension_mismatch():
    s = RelationSpectrum(n=2, m=1, terms=({},))
    with pytest.raises(ShapeError):
        evaluate_spectrum(s, [1.0, 2.0, 3.0])


def test_compare_spectra():
    a = RelationSpectrum(n=1, m=1, terms=({(1,): 1.0},))
    assert compare_spectra(a, a) == (0.0, 0)
    b = RelationSpectrum(n=1, m=1, terms=({(1,): 1.25},))
    assert compare_spectra(a, b) == (0.25, 0)
    c = RelationSpectrum(n=1, m=1, terms=({(2,): 1.0},))
    assert compare_spectra(a, c) == (1.0, 2)


def test_compare_spectra_dimension_mismatch():
    a = RelationSpectrum(n=1, m=1, terms=({},))
    b = RelationSpectrum(n=2, m=1, terms=({},))
    with pytest.raises(ShapeError):
        compare_spectra(a, b)


def test_export_schema_instance():
    s = RelationSpectrum(n=2, m=1, terms=({(2, 0): 3.0},))
    data = export_spectrum(s).decode()
    lines = data.strip().split("\n")
    assert lines[0] == "e_1,e_2,output,coefficient"
    assert lines[1] == "2,0,0,3.0"


def test_export_import_roundtrip_identical_bytes():
    model = init_weights(NetworkSpec.crpnn2(2, 2, 7), seed=13)
    s = expand_to_spectrum(model)
    blob = export_spectrum(s)
    again = export_spectrum(import_spectrum(blob))
    assert blob == again


def test_export_rows_sorted():
    model = init_weights(NetworkSpec.crpnn1(2, 2, 4), seed=2)
    rows = export_spectrum(expand_to_spectrum(model)).decode().strip().split("\n")[1:]
    parsed = [tuple(r.split(",")) for r in rows]
    keys = [(int(out), int(e1) + int(e2), (int(e1), int(e2))) for e1, e2, out, _ in parsed]
    assert keys == sorted(keys)


def test_import_errors_carry_line_numbers():
    with pytest.raises(SpectrumFormatError, match="line 1"):
        import_spectrum(b"e_1,e_2,coefficient\n")
    with pytest.raises(SpectrumFormatError, match="line 2"):
        import_spectrum(b"e_1,output,coefficient\n1,0\n")
    with pytest.raises(SpectrumFormatError, match="line 3"):
        import_spectrum(b"e_1,output,coefficient\n1,0,2.0\n-1,0,1.0\n")
    with pytest.raises(SpectrumFormatError, match="line 2"):
        import_spectrum(b"e_1,output,coefficient\nx,0,2.0\n")


def test_import_wrong_exponent_column_count():
    s = RelationSpectrum(n=2, m=1, terms=({(1, 0): 2.0},))
    text = export_spectrum(s).decode()
    # present the same rows under a 1-variable header
    broken = text.replace("e_1,e_2,output", "e_1,output", 1)
    with pytest.raises(SpectrumFormatError):
        import_spectrum(broken.encode())


def test_linearity_of_expansion():
    model = init_weights(NetworkSpec.crpnn2(2, 1, 6), seed=3)
    doubled = model.copy()
    doubled.weights[-1] *= 2.0
    a = expand_to_spectrum(model)
    b = expand_to_spectrum(doubled)
    assert a.terms[0].keys() == b.terms[0].keys()
    for key, coef in a.terms[0].items():
        assert b.terms[0][key] == 2.0 * coef
