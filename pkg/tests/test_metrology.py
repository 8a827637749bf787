"""Fisher-information and squeezing computations against analytic oracles."""

import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy.linalg import expm

import drivencat as dc
from drivencat import dynamics, hilbert, metrology
from drivencat.errors import (
    DimensionMismatchError,
    NegativeEigenvalueError,
    NonHermitianOperatorError,
)
from drivencat.metrology import (
    displacement_generator,
    qfi,
    qfi_max,
    qfi_theta_scan,
    quadrature_covariance,
    spectral_decomposition,
    squeeze_level,
    variance,
    variance_theta_scan,
)


def density(psi):
    return np.outer(psi, psi.conj())


def random_density(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def squeezed_vacuum(r, dim):
    """Squeezed vacuum via the matrix exponential of the drive Hamiltonian.

    Independent oracle route: expm(-i H t) on the vacuum with H the pure
    two-photon drive, r = 2 eps t.
    """
    h = dynamics.build_hamiltonian(dc.ModelParams(1.0, 0.0), dim)
    u = expm(-1j * h * (r / 2.0))
    return u[:, 0].copy()


# ------------------------------------------------------------------- spectral


def test_spectral_decomposition_orders_and_reconstructs():
    rng = np.random.default_rng(5)
    rho = random_density(rng, 10)
    dec = spectral_decomposition(rho)
    assert np.all(np.diff(dec.eigenvalues) <= 0)
    recon = (dec.eigenvectors * dec.eigenvalues) @ dec.eigenvectors.conj().T
    assert np.abs(recon - rho).max() <= 1e-10


def test_spectral_decomposition_clamps_roundoff_negatives():
    rho = np.diag([1.0 + 5e-11, -5e-11]).astype(complex)
    dec = spectral_decomposition(rho)
    assert dec.eigenvalues[-1] == 0.0
    assert np.all(dec.eigenvalues >= 0)


def test_spectral_decomposition_rejects_real_negativity():
    rho = np.diag([1.0 + 1e-9, -1e-9]).astype(complex)
    with pytest.raises(NegativeEigenvalueError):
        spectral_decomposition(rho)


# ------------------------------------------------------------------ qfi value


def test_coherent_state_qfi_is_two():
    rho = density(hilbert.coherent_state(0.7, 30))
    for theta in (0.0, 0.4, math.pi / 2, 2.1):
        val = qfi(rho, displacement_generator(theta, 30))
        assert val == pytest.approx(2.0, abs=1e-6)


def test_vacuum_qfi_with_x_generator():
    x, _ = hilbert.quadratures(12)
    assert qfi(density(hilbert.fock_state(0, 12)), x) == pytest.approx(2.0, abs=1e-9)


def test_pure_state_identity_even_cat():
    dim = 40
    cat = hilbert.cat_state(2.0, +1, dim)
    _, p = hilbert.quadratures(dim)
    direct = 4.0 * (
        hilbert.expect(p @ p, cat).real - hilbert.expect(p, cat).real ** 2
    )
    assert qfi(density(cat), p) == pytest.approx(direct, rel=1e-6)


def test_pure_state_identity_random_states():
    rng = np.random.default_rng(17)
    dim = 14
    a = displacement_generator(0.7, dim)
    for _ in range(5):
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        var = hilbert.expect(a @ a, psi).real - hilbert.expect(a, psi).real ** 2
        assert qfi(density(psi), a) == pytest.approx(4.0 * var, rel=1e-6)


def test_qfi_convexity_over_mixtures():
    rng = np.random.default_rng(23)
    dim = 12
    a = displacement_generator(1.1, dim)
    for _ in range(8):
        rho1 = random_density(rng, dim)
        rho2 = random_density(rng, dim)
        p = rng.uniform(0.1, 0.9)
        mixed = qfi(p * rho1 + (1 - p) * rho2, a)
        assert mixed <= p * qfi(rho1, a) + (1 - p) * qfi(rho2, a) + 1e-9


def test_qfi_rejects_bad_generator():
    rho = density(hilbert.fock_state(0, 6))
    bad = np.zeros((6, 6), dtype=complex)
    bad[0, 1] = 1.0  # not Hermitian
    with pytest.raises(NonHermitianOperatorError):
        qfi(rho, bad)
    with pytest.raises(DimensionMismatchError):
        qfi(rho, displacement_generator(0.3, 7))


# ------------------------------------------------------------------ generator


def test_displacement_generator_axis_cases():
    dim = 9
    x, p = hilbert.quadratures(dim)
    npt.assert_allclose(displacement_generator(math.pi / 2, dim), x, atol=1e-12)
    npt.assert_allclose(displacement_generator(0.0, dim), p, atol=1e-12)
    npt.assert_allclose(
        displacement_generator(math.pi / 4, dim), (x + p) / math.sqrt(2), atol=1e-12
    )


def test_displacement_generator_periodicity():
    dim = 7
    theta = 0.9
    npt.assert_allclose(
        displacement_generator(theta + math.pi, dim),
        -displacement_generator(theta, dim),
        atol=1e-12,
    )
    npt.assert_allclose(
        displacement_generator(theta + 2 * math.pi, dim),
        displacement_generator(theta, dim),
        atol=1e-12,
    )
    with pytest.raises(ValueError):
        displacement_generator(float("inf"), dim)


# ------------------------------------------------------------------- qfi_max


def test_qfi_max_invariants(evolved_mixed_state):
    res = qfi_max(evolved_mixed_state)
    evals = np.linalg.eigvalsh(res.m_matrix)
    assert res.f_max == pytest.approx(evals[-1], abs=1e-9)
    assert res.gq_db == pytest.approx(10 * math.log10(res.f_max / 2.0))
    assert 0.0 <= res.theta_opt < math.pi
    # f_max is the true maximum: no scanned direction beats it
    assert qfi(evolved_mixed_state, displacement_generator(res.theta_opt, 24)) \
        == pytest.approx(res.f_max, rel=1e-9)


def test_qfi_max_coherent_gain_is_zero():
    for alpha in (0.0, 0.5, 1 + 1j):
        res = qfi_max(density(hilbert.coherent_state(alpha, 40)))
        assert abs(res.gq_db) <= 1e-6


def test_qfi_max_rotation_covariance(evolved_mixed_state):
    rho = evolved_mixed_state
    base = qfi_max(rho)
    phi = 0.8
    u = np.diag(np.exp(1j * phi * np.arange(rho.shape[0])))
    rotated = qfi_max(u @ rho @ u.conj().T)
    assert rotated.f_max == pytest.approx(base.f_max, abs=1e-9)
    diff = (rotated.theta_opt - (base.theta_opt - phi)) % math.pi
    assert min(diff, math.pi - diff) < 1e-9


def test_qfi_max_floor_insensitivity(evolved_mixed_state):
    values = [
        qfi_max(evolved_mixed_state, eigensum_floor=floor).f_max
        for floor in (1e-14, 1e-13, 1e-12, 1e-11, 1e-10)
    ]
    assert (max(values) - min(values)) <= 1e-9 * max(values)


def test_qfi_scan_matches_closed_form(evolved_mixed_state):
    res = qfi_max(evolved_mixed_state, scan_check=True)  # must not raise
    f_scan, theta_scan = qfi_theta_scan(evolved_mixed_state)
    assert abs(res.f_max - f_scan) <= 1e-6 * res.f_max
    diff = (res.theta_opt - theta_scan) % math.pi
    assert min(diff, math.pi - diff) < 1e-3


# ------------------------------------------------------------------- variance


def test_variance_vacuum_and_coherent_flat():
    vac = density(hilbert.fock_state(0, 20))
    coh = density(hilbert.coherent_state(2.0, 30))
    for theta in (0.0, 0.7, math.pi / 3):
        assert variance(vac, theta) == pytest.approx(0.5, abs=1e-12)
        assert variance(coh, theta) == pytest.approx(0.5, abs=1e-9)


def test_quadrature_covariance_vacuum():
    cov = quadrature_covariance(density(hilbert.fock_state(0, 12)))
    npt.assert_allclose(cov, 0.5 * np.eye(2), atol=1e-12)


def test_squeezed_vacuum_against_expm_oracle():
    r = 0.5
    dim = 40
    psi = squeezed_vacuum(r, dim)
    rho = density(psi)
    res = squeeze_level(rho)
    assert res.v_min == pytest.approx(math.exp(-2 * r) / 2.0, rel=1e-6)
    assert res.s_db == pytest.approx((20.0 / math.log(10.0)) * r, rel=1e-6)
    # antisqueezed direction sits a quarter turn away
    anti = variance(rho, res.theta_min + math.pi / 2)
    assert anti == pytest.approx(math.exp(2 * r) / 2.0, rel=1e-6)
    # spec value for the squeezed-axis variance at r = 0.5
    assert variance(rho, res.theta_min) == pytest.approx(0.18394, abs=1e-5)


def test_evolve_matches_expm_for_pure_drive():
    # the integrator and the matrix exponential agree on the propagated state
    dim = 30
    t = 0.25
    params = dc.ModelParams(1.0, 0.0, 0.0, 0.0)
    rho0 = density(hilbert.fock_state(0, dim))
    traj = dynamics.evolve(rho0, params, dc.IntegratorConfig(t_max=t, n_outputs=2))
    oracle = density(squeezed_vacuum(2 * t, dim))
    npt.assert_allclose(traj.states[-1], oracle, atol=1e-9)


def test_squeezed_vacuum_qfi_equals_squeeze_gain():
    # for squeezed vacuum both figures of merit reduce to (20/ln10) r
    rho = density(squeezed_vacuum(0.6, 40))
    gq = qfi_max(rho).gq_db
    s = squeeze_level(rho).s_db
    assert gq == pytest.approx(s, abs=1e-6)


def test_squeeze_level_invariants(evolved_mixed_state):
    res = squeeze_level(evolved_mixed_state)
    evals = np.linalg.eigvalsh(res.covariance)
    assert res.v_min > 0
    assert res.v_min == pytest.approx(evals[0], abs=1e-9)
    assert res.s_db == pytest.approx(-10 * math.log10(res.v_min / 0.5))
    assert 0.0 <= res.theta_min < math.pi
    assert variance(evolved_mixed_state, res.theta_min) == pytest.approx(
        res.v_min, abs=1e-9
    )


def test_variance_scan_matches_closed_form(evolved_mixed_state):
    res = squeeze_level(evolved_mixed_state, scan_check=True)  # must not raise
    v_scan, theta_scan = variance_theta_scan(evolved_mixed_state)
    assert abs(res.v_min - v_scan) <= 1e-9
    diff = (res.theta_min - theta_scan) % math.pi
    assert min(diff, math.pi - diff) < 1e-3
