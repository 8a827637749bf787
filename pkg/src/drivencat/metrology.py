"""Quantum Fisher information and quadrature squeezing of a single mode.

Two angle conventions coexist on the public surface, both kept exactly
as defined by the quantities they implement:

* QFI displacement generator:  A(theta) = X sin(theta) + P cos(theta)
* variance direction:          Q(theta) = X cos(theta) + P sin(theta)

so Q(theta) = A(pi/2 - theta).  Internally everything reduces to one
canonical form c_x X + c_p P; only the (sin, cos) assignment differs at
the API boundary.  ``QfiResult.theta_opt`` and ``SqueezeResult.theta_min``
each document which convention they carry.

The QFI of a state with spectral decomposition {lambda_k, |k>} is

    F_Q = 2 sum_{k,l} (lambda_k - lambda_l)^2 / (lambda_k + lambda_l)
              * |<k|A|l>|^2

restricted to pairs with lambda_k + lambda_l above a configurable floor.
Both F_Q(theta) and V(theta) are exact sinusoids in 2*theta, so the
closed-form extremum (eigenvalue of a 2x2 form) can be cross-checked by
a brute-force theta grid scan; the scan refines its best grid point with
an exact three-point sinusoid vertex fit, making the two routes agree to
near machine precision when both are correct.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import hilbert
from .errors import (
    DimensionMismatchError,
    NegativeEigenvalueError,
    NonHermitianOperatorError,
    NumericalError,
)

__all__ = [
    "SpectralDecomposition",
    "QfiResult",
    "SqueezeResult",
    "spectral_decomposition",
    "qfi",
    "displacement_generator",
    "qfi_max",
    "qfi_theta_scan",
    "variance",
    "quadrature_covariance",
    "squeeze_level",
    "variance_theta_scan",
]

# Coherent-state QFI, the dB reference for the gain.  A fixed constant by
# design: it is never recomputed from a state.
COHERENT_QFI = 2.0

# Pairs with lambda_k + lambda_l at or below this default are dropped
# from the QFI sum; round-off-zero eigenvalue pairs would otherwise
# amplify noise through the division.
EIGENSUM_FLOOR = 1e-12

# Eigenvalues of rho in (-CLAMP_FLOOR_ABS, 0) are treated as round-off
# and clamped to zero; anything lower is an upstream failure.
CLAMP_FLOOR_ABS = 1e-10

HERMITICITY_TOL = 1e-10

_SCAN_POINTS = 720


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a density matrix, eigenvalues descending.

    ``eigenvalues[k]`` pairs with the orthonormal column
    ``eigenvectors[:, k]``.  Small negative eigenvalues from round-off
    arrive already clamped to zero.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class QfiResult:
    """Optimized QFI over displacement directions.

    theta_opt uses the generator convention A(theta) = X sin + P cos and
    lies in [0, pi).  m_matrix is the real symmetric 2x2 form over
    (sin theta, cos theta) whose largest eigenvalue is f_max.  gq_db is
    the gain 10*log10(f_max / 2) over the coherent-state reference.
    """

    f_max: float
    theta_opt: float
    gq_db: float
    m_matrix: np.ndarray


@dataclass(frozen=True)
class SqueezeResult:
    """Minimum quadrature variance and squeezing level.

    theta_min uses the variance convention Q(theta) = X cos + P sin and
    lies in [0, pi).  covariance is the centered 2x2 second-moment matrix
    of (X, P); v_min is its smaller eigenvalue and
    s_db = -10*log10(v_min / 0.5), positive when squeezed below vacuum.
    """

    v_min: float
    theta_min: float
    s_db: float
    covariance: np.ndarray


def spectral_decomposition(
    rho: np.ndarray, clamp_floor: float = CLAMP_FLOOR_ABS
) -> SpectralDecomposition:
    """Eigendecompose rho, clamping round-off-negative eigenvalues to 0."""
    rho = np.asarray(rho, dtype=complex)
    try:
        w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    w_min = float(w.min())
    if w_min < -clamp_floor:
        raise NegativeEigenvalueError(
            f"eigenvalue {w_min:.3e} below -{clamp_floor:.1e}; "
            "the state is not numerically positive"
        )
    w = np.clip(w, 0.0, None)
    order = np.argsort(w)[::-1]
    return SpectralDecomposition(w[order], v[:, order])


def _check_hermitian(op: np.ndarray, what: str) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if np.abs(op - op.conj().T).max() > HERMITICITY_TOL:
        raise NonHermitianOperatorError(f"{what} must be Hermitian")
    return op


def _qfi_weights(eigenvalues: np.ndarray, eigensum_floor: float) -> np.ndarray:
    """Weight matrix W_kl = 2 (l_k - l_l)^2 / (l_k + l_l), floored pairs zeroed."""
    lk = eigenvalues[:, None]
    ll = eigenvalues[None, :]
    sums = lk + ll
    mask = sums > eigensum_floor
    w = np.zeros_like(sums)
    np.divide(2.0 * (lk - ll) ** 2, sums, out=w, where=mask)
    return w


def qfi(
    rho: np.ndarray,
    generator: np.ndarray,
    eigensum_floor: float = EIGENSUM_FLOOR,
) -> float:
    """QFI of rho for the Hermitian generator, via the spectral sum.

    Reduces to 4*Var(generator) for pure states.
    """
    rho = np.asarray(rho, dtype=complex)
    generator = _check_hermitian(generator, "QFI generator")
    if generator.shape != rho.shape:
        raise DimensionMismatchError(
            f"generator shape {generator.shape} != rho shape {rho.shape}"
        )
    dec = spectral_decomposition(rho)
    w = _qfi_weights(dec.eigenvalues, eigensum_floor)
    a_eig = dec.eigenvectors.conj().T @ generator @ dec.eigenvectors
    return float(np.sum(w * np.abs(a_eig) ** 2))


def displacement_generator(theta: float, dim: int) -> np.ndarray:
    """Generator A(theta) = X sin(theta) + P cos(theta)."""
    if not np.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    x, p = hilbert.quadratures(dim)
    return np.sin(theta) * x + np.cos(theta) * p


def qfi_max(
    rho: np.ndarray,
    eigensum_floor: float = EIGENSUM_FLOOR,
    scan_check: bool = False,
) -> QfiResult:
    """Maximize the QFI over displacement directions analytically.

    F_Q(theta) = (sin, cos) . M . (sin, cos)^T for a real symmetric 2x2
    M built from the X and P matrix elements in the eigenbasis of rho;
    f_max is the largest eigenvalue of M and theta_opt comes from the
    matching eigenvector.  With ``scan_check`` the result is verified
    against the brute-force grid scan (debug mode).
    """
    rho = np.asarray(rho, dtype=complex)
    dec = spectral_decomposition(rho)
    w = _qfi_weights(dec.eigenvalues, eigensum_floor)
    x, p = hilbert.quadratures(rho.shape[0])
    v = dec.eigenvectors
    x_eig = v.conj().T @ x @ v
    p_eig = v.conj().T @ p @ v
    m_xx = float(np.sum(w * np.abs(x_eig) ** 2))
    m_pp = float(np.sum(w * np.abs(p_eig) ** 2))
    m_xp = float(np.sum(w * (x_eig * p_eig.conj()).real))
    m = np.array([[m_xx, m_xp], [m_xp, m_pp]])
    evals, evecs = np.linalg.eigh(m)
    f_max = float(evals[-1])
    u_sin, u_cos = evecs[:, -1]
    theta_opt = float(np.arctan2(u_sin, u_cos) % np.pi)
    gq_db = 10.0 * np.log10(f_max / COHERENT_QFI)
    result = QfiResult(f_max, theta_opt, float(gq_db), m)
    if scan_check:
        f_scan, _ = qfi_theta_scan(rho, eigensum_floor=eigensum_floor)
        if abs(f_max - f_scan) > 1e-6 * max(f_max, f_scan):
            raise NumericalError(
                f"QFI maximization mismatch: closed form {f_max!r} vs "
                f"grid scan {f_scan!r}"
            )
    return result


def _sinusoid_vertex(theta0: float, h: float, y_m: float, y_0: float, y_p: float) -> float:
    """Peak location of y(theta) = a + R cos(2(theta - t*)) from 3 samples.

    The samples sit at theta0 - h, theta0, theta0 + h.  Returns t*, the
    location of the maximum (exact for any sinusoid of period pi).
    """
    c = np.cos(2.0 * h)
    s = np.sin(2.0 * h)
    u = (2.0 * y_0 - (y_p + y_m)) / (2.0 * (1.0 - c))
    v = -(y_p - y_m) / (2.0 * s)
    if u == 0.0 and v == 0.0:
        return theta0
    return theta0 - 0.5 * np.arctan2(v, u)


def qfi_theta_scan(
    rho: np.ndarray,
    n_theta: int = _SCAN_POINTS,
    eigensum_floor: float = EIGENSUM_FLOOR,
    refine: bool = True,
) -> tuple[float, float]:
    """Brute-force maximization of F_Q(theta) on a grid over [0, pi).

    Each grid point evaluates the spectral QFI sum for the explicit
    generator direction, independently of the 2x2-form shortcut.  With
    ``refine`` the best grid point is polished by the exact sinusoid
    vertex through its neighbors and re-evaluated.  Returns
    (f_max, theta_opt) in the QFI angle convention.
    """
    rho = np.asarray(rho, dtype=complex)
    dec = spectral_decomposition(rho)
    w = _qfi_weights(dec.eigenvalues, eigensum_floor)
    x, p = hilbert.quadratures(rho.shape[0])
    v = dec.eigenvectors
    x_eig = v.conj().T @ x @ v
    p_eig = v.conj().T @ p @ v

    def f_of(theta: np.ndarray) -> np.ndarray:
        sin = np.sin(theta)[:, None, None]
        cos = np.cos(theta)[:, None, None]
        a = sin * x_eig[None, :, :] + cos * p_eig[None, :, :]
        return np.einsum("tkl,kl->t", np.abs(a) ** 2, w)

    thetas = np.linspace(0.0, np.pi, n_theta, endpoint=False)
    values = f_of(thetas)
    best = int(np.argmax(values))
    f_best = float(values[best])
    theta_best = float(thetas[best])
    if refine:
        h = np.pi / n_theta
        vertex = _sinusoid_vertex(
            theta_best,
            h,
            float(values[(best - 1) % n_theta]),
            f_best,
            float(values[(best + 1) % n_theta]),
        )
        f_ref = float(f_of(np.array([vertex]))[0])
        if f_ref > f_best:
            f_best, theta_best = f_ref, float(vertex)
    return f_best, float(theta_best % np.pi)


def variance(rho: np.ndarray, theta: float) -> float:
    """Variance of the quadrature X cos(theta) + P sin(theta) in rho."""
    rho = np.asarray(rho, dtype=complex)
    x, p = hilbert.quadratures(rho.shape[0])
    q = np.cos(theta) * x + np.sin(theta) * p
    mean = hilbert.expect(q, rho).real
    mean_sq = hilbert.expect(q @ q, rho).real
    return float(mean_sq - mean**2)


def quadrature_covariance(rho: np.ndarray) -> np.ndarray:
    """Centered covariance of (X, P) with symmetrized cross moment."""
    rho = np.asarray(rho, dtype=complex)
    x, p = hilbert.quadratures(rho.shape[0])
    mx = hilbert.expect(x, rho).real
    mp = hilbert.expect(p, rho).real
    vxx = hilbert.expect(x @ x, rho).real - mx**2
    vpp = hilbert.expect(p @ p, rho).real - mp**2
    cross = 0.5 * hilbert.expect(x @ p + p @ x, rho).real - mx * mp
    return np.array([[vxx, cross], [cross, vpp]])


def squeeze_level(rho: np.ndarray, scan_check: bool = False) -> SqueezeResult:
    """Minimum quadrature variance over all directions.

    v_min is the smaller eigenvalue of the centered (X, P) covariance;
    theta_min is the direction (variance convention) achieving it;
    s_db = -10*log10(v_min / 0.5) is positive below vacuum noise.
    """
    cov = quadrature_covariance(rho)
    evals, evecs = np.linalg.eigh(cov)
    v_min = float(evals[0])
    u_cos, u_sin = evecs[:, 0]
    theta_min = float(np.arctan2(u_sin, u_cos) % np.pi)
    s_db = -10.0 * np.log10(v_min / 0.5)
    result = SqueezeResult(v_min, theta_min, float(s_db), cov)
    if scan_check:
        v_scan, _ = variance_theta_scan(rho)
        if abs(v_min - v_scan) > 1e-9:
            raise NumericalError(
                f"variance minimization mismatch: closed form {v_min!r} vs "
                f"grid scan {v_scan!r}"
            )
    return result


@lru_cache(maxsize=4)
def _rotated_quadrature_batch(
    dim: int, n_theta: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stacked Q(theta) and Q(theta)^2 over the scan grid, cached per dim."""
    thetas = np.linspace(0.0, np.pi, n_theta, endpoint=False)
    x, p = hilbert.quadratures(dim)
    q = np.cos(thetas)[:, None, None] * x + np.sin(thetas)[:, None, None] * p
    return thetas, q, q @ q


def variance_theta_scan(
    rho: np.ndarray, n_theta: int = _SCAN_POINTS, refine: bool = True
) -> tuple[float, float]:
    """Brute-force minimization of V(theta) on a grid over [0, pi).

    Each point takes the expectation of the explicitly built rotated
    quadrature operator for its own direction (the operator stack is
    cached per dimension); the best point is then polished by the exact
    sinusoid vertex.  Returns (v_min, theta_min) in the variance angle
    convention.
    """
    rho = np.asarray(rho, dtype=complex)
    thetas, q, q_sq = _rotated_quadrature_batch(rho.shape[0], n_theta)
    means = np.einsum("tij,ji->t", q, rho).real
    values = np.einsum("tij,ji->t", q_sq, rho).real - means**2
    best = int(np.argmin(values))
    v_best = float(values[best])
    theta_best = float(thetas[best])
    if refine:
        h = np.pi / n_theta
        vertex = _sinusoid_vertex(
            theta_best,
            h,
            -float(values[(best - 1) % n_theta]),
            -v_best,
            -float(values[(best + 1) % n_theta]),
        )
        v_ref = variance(rho, float(vertex))
        if v_ref < v_best:
            v_best, theta_best = v_ref, float(vertex)
    return v_best, float(theta_best % np.pi)
