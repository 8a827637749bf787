"""Operator algebra and reference-state construction."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from drivencat import hilbert
from drivencat.errors import (
    DegenerateCatError,
    DimensionMismatchError,
    InvalidDimensionError,
    TruncationError,
)


def test_annihilation_matrix_elements():
    a = hilbert.annihilation(5)
    for n in range(1, 5):
        assert a[n - 1, n] == pytest.approx(math.sqrt(n))
    # everything off the first superdiagonal vanishes
    assert np.count_nonzero(a) == 4


def test_creation_is_adjoint():
    a = hilbert.annihilation(6)
    npt.assert_array_equal(hilbert.creation(6), a.conj().T)


def test_number_operator_diagonal():
    n = hilbert.number_op(7)
    npt.assert_allclose(np.diag(n).real, np.arange(7))
    npt.assert_array_equal(n, np.diag(np.diag(n)))


def test_number_equals_adag_a():
    a = hilbert.annihilation(9)
    npt.assert_allclose(a.conj().T @ a, hilbert.number_op(9), atol=1e-14)


def test_commutator_below_truncation():
    dim = 8
    a = hilbert.annihilation(dim)
    comm = a @ a.conj().T - a.conj().T @ a
    # identity holds exactly on levels below the truncation boundary
    npt.assert_allclose(np.diag(comm)[: dim - 1].real, np.ones(dim - 1), atol=1e-14)


def test_quadratures_commutator_and_hermiticity():
    dim = 10
    x, p = hilbert.quadratures(dim)
    npt.assert_allclose(x, x.conj().T, atol=1e-14)
    npt.assert_allclose(p, p.conj().T, atol=1e-14)
    comm = x @ p - p @ x
    npt.assert_allclose(np.diag(comm)[: dim - 1], 1j * np.ones(dim - 1), atol=1e-14)


def test_parity_diagonal_signs():
    pi_op = hilbert.parity(6)
    npt.assert_allclose(np.diag(pi_op).real, [1, -1, 1, -1, 1, -1])


def test_fock_state_one_hot():
    psi = hilbert.fock_state(3, 6)
    assert psi[3] == 1.0
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    assert np.count_nonzero(psi) == 1


def test_fock_state_rejects_out_of_range():
    with pytest.raises(TruncationError):
        hilbert.fock_state(6, 6)
    with pytest.raises(ValueError):
        hilbert.fock_state(-1, 6)


def test_coherent_state_amplitudes_match_closed_form():
    alpha = 0.7 + 0.2j
    dim = 30
    psi = hilbert.coherent_state(alpha, dim)
    n = np.arange(dim)
    # factorial(29) overflows int64; keep the denominator in float
    fact = np.array([math.factorial(int(k)) for k in n], dtype=float)
    ref = np.exp(-0.5 * abs(alpha) ** 2) * alpha**n / np.sqrt(fact)
    ref = ref / np.linalg.norm(ref)
    npt.assert_allclose(psi, ref, atol=1e-12)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


def test_coherent_state_zero_is_vacuum():
    npt.assert_array_equal(hilbert.coherent_state(0.0, 8), hilbert.fock_state(0, 8))


def test_coherent_state_mean_photon_number():
    alpha = 1.2 - 0.3j
    psi = hilbert.coherent_state(alpha, 40)
    n_mean = hilbert.expect(hilbert.number_op(40), psi).real
    assert n_mean == pytest.approx(abs(alpha) ** 2, rel=1e-10)


def test_coherent_state_truncation_guard():
    # |alpha|^2 > dim/4 is rejected before building garbage amplitudes
    with pytest.raises(TruncationError):
        hilbert.coherent_state(3.0, 30)


def test_cat_state_parity_structure():
    dim = 40
    even = hilbert.cat_state(2.0, +1, dim)
    odd = hilbert.cat_state(2.0, -1, dim)
    assert np.all(even[1::2] == 0)
    assert np.all(odd[0::2] == 0)
    pi_op = hilbert.parity(dim)
    assert hilbert.expect(pi_op, even).real == pytest.approx(1.0, abs=1e-14)
    assert hilbert.expect(pi_op, odd).real == pytest.approx(-1.0, abs=1e-14)


def test_cat_state_overlap_with_coherent_branches():
    # <alpha|cat_even> = (1 + e^{-2|a|^2}) / sqrt(2 (1 + e^{-2|a|^2}))
    alpha = 1.5
    dim = 40
    even = hilbert.cat_state(alpha, +1, dim)
    coh = hilbert.coherent_state(alpha, dim)
    overlap = abs(np.vdot(coh, even))
    expected = (1 + math.exp(-2 * alpha**2)) / math.sqrt(
        2 * (1 + math.exp(-2 * alpha**2))
    )
    assert overlap == pytest.approx(expected, rel=1e-10)


def test_cat_state_degenerate_odd_at_zero():
    with pytest.raises(DegenerateCatError):
        hilbert.cat_state(0.0, -1, 10)


def test_cat_state_rejects_bad_sign():
    with pytest.raises(ValueError):
        hilbert.cat_state(1.0, 2, 10)


def test_expect_vector_and_matrix_agree():
    psi = hilbert.coherent_state(0.8j, 20)
    rho = np.outer(psi, psi.conj())
    op = hilbert.number_op(20)
    assert hilbert.expect(op, psi) == pytest.approx(hilbert.expect(op, rho))


def test_expect_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        hilbert.expect(hilbert.number_op(5), hilbert.fock_state(0, 6))


def test_check_dim_rejects_bad_inputs():
    for bad in (1, 0, -3, 2.5, "8", True):
        with pytest.raises(InvalidDimensionError):
            hilbert.check_dim(bad)
    assert hilbert.check_dim(np.int64(12)) == 12
