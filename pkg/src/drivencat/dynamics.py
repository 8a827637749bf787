"""Lindblad dynamics of the two-photon-driven Kerr resonator.

The model is a single bosonic mode with Hamiltonian (hbar = 1)

    H = epsilon * (a_dag^2 + a^2) - kerr * a_dag^2 a^2

evolving under the master equation

    drho/dt = -i[H, rho] + kappa * D[a] rho + kappa2 * D[a^2] rho,

where D[O] rho = O rho O_dag - (O_dag O rho + rho O_dag O) / 2 covers
single-photon loss (rate kappa) and engineered two-photon loss (rate
kappa2).  Time is dimensionless; epsilon = 1 is the reference scale.

Trajectories are integrated with an embedded adaptive Dormand-Prince
Runge-Kutta 5(4) pair acting on the row-major-vectorized density matrix
through a sparse superoperator.  A fixed-step classic RK4 mode is kept
as a cross-check.  The integrator runs free between output samples:
re-Hermitization and trace renormalization happen only on the sampled
copies, so trace drift stays measurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import hilbert
from .errors import (
    DimensionMismatchError,
    IntegrationDivergedError,
    ModelMismatchError,
    RegimeError,
    SteadyStateAmbiguityError,
    StiffnessError,
    UndefinedAmplitudeError,
)

__all__ = [
    "ModelParams",
    "IntegratorConfig",
    "Trajectory",
    "SteadyAmplitude",
    "build_hamiltonian",
    "lindblad_rhs",
    "liouvillian_matrix",
    "evolve",
    "steady_amplitude_tpd_kerr_spl",
    "steady_amplitude_tpd_etpl",
    "classical_mixture",
    "numeric_steady_state",
    "validate_density_matrix",
    "fidelity",
]

# Sample-time health limits.  Drift/positivity beyond these means the
# truncation or the step control failed and the run is not trustworthy.
TRACE_DRIFT_LIMIT = 1e-6
SAMPLE_EIG_FLOOR = -1e-6

# DensityMatrix validation tolerances.
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
EIG_FLOOR = -1e-8


@dataclass(frozen=True)
class ModelParams:
    """Model rates in units of the two-photon drive scale.

    epsilon may be zero (undriven decay checks); the loss rates must be
    non-negative.  kerr is the Kerr coefficient K.
    """

    epsilon: float = 1.0
    kerr: float = 0.0
    kappa: float = 0.0
    kappa2: float = 0.0

    def __post_init__(self):
        for name in ("epsilon", "kerr", "kappa", "kappa2"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")


@dataclass(frozen=True)
class IntegratorConfig:
    """Output grid and local error control for ``evolve``.

    ``n_outputs`` sample times are spread uniformly over [0, t_max].
    ``max_step`` bounds the adaptive step; in the fixed-step "rk4"
    cross-check mode it *is* the step, so it must then be finite.
    Default tolerances keep sampled-state eigenvalues above the
    spectral clamp floor used by the estimation-bound routines.
    """

    t_max: float
    n_outputs: int = 201
    rel_tol: float = 1e-11
    abs_tol: float = 1e-13
    max_step: float = math.inf
    method: str = "rk45"

    def __post_init__(self):
        if not np.isfinite(self.t_max) or self.t_max <= 0:
            raise ValueError(f"t_max must be positive, got {self.t_max!r}")
        if self.n_outputs < 2:
            raise ValueError(f"n_outputs must be >= 2, got {self.n_outputs!r}")
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not (0 < v <= 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2], got {v!r}")
        if self.max_step <= 0:
            raise ValueError(f"max_step must be positive, got {self.max_step!r}")
        if self.method not in ("rk45", "rk4"):
            raise ValueError(f"method must be 'rk45' or 'rk4', got {self.method!r}")
        if self.method == "rk4" and not np.isfinite(self.max_step):
            raise ValueError("rk4 mode needs a finite max_step (the fixed step)")

    def sample_times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_outputs)


@dataclass(frozen=True)
class Trajectory:
    """Sampled trajectory: times, sampled states, and diagnostics.

    ``states[i]`` is the re-Hermitized, trace-renormalized density matrix
    at ``times[i]`` (None if state retention was disabled);
    ``trace_drift[i]`` is |tr(rho) - 1| before renormalization.
    """

    times: np.ndarray
    states: list | None
    trace_drift: np.ndarray
    n_steps: int
    n_rejected: int


@dataclass(frozen=True)
class SteadyAmplitude:
    """Closed-form steady-state lobe amplitude alpha = r0 * exp(i*theta0)."""

    alpha: complex
    r0: float
    theta0: float
    validity_ok: bool


def build_hamiltonian(params: ModelParams, dim: int) -> np.ndarray:
    """H = epsilon (a_dag^2 + a^2) - kerr a_dag^2 a^2 on dim Fock levels."""
    dim = hilbert.check_dim(dim)
    a = hilbert.annihilation(dim)
    a2 = a @ a
    n = np.arange(dim, dtype=float)
    h = params.epsilon * (a2.conj().T + a2)
    h -= params.kerr * np.diag(n * (n - 1.0))
    return h


def _jump_ops(params: ModelParams, dim: int) -> list[tuple[float, np.ndarray]]:
    ops = []
    if params.kappa > 0:
        ops.append((params.kappa, hilbert.annihilation(dim)))
    if params.kappa2 > 0:
        a = hilbert.annihilation(dim)
        ops.append((params.kappa2, a @ a))
    return ops


def lindblad_rhs(
    rho: np.ndarray, params: ModelParams, hamiltonian: np.ndarray | None = None
) -> np.ndarray:
    """Right-hand side drho/dt of the master equation (dense form).

    ``hamiltonian`` defaults to ``build_hamiltonian(params, dim)``; passing
    it explicitly lets callers reuse a prebuilt operator.  The result is
    Hermitian and traceless up to round-off for any Hermitian input.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    if rho.shape != (dim, dim):
        raise DimensionMismatchError(f"rho must be square, got shape {rho.shape}")
    if hamiltonian is None:
        hamiltonian = build_hamiltonian(params, dim)
    elif hamiltonian.shape != rho.shape:
        raise DimensionMismatchError(
            f"H shape {hamiltonian.shape} != rho shape {rho.shape}"
        )
    out = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    for rate, c in _jump_ops(params, dim):
        cdc = c.conj().T @ c
        out += rate * (
            c @ rho @ c.conj().T - 0.5 * (cdc @ rho + rho @ cdc)
        )
    return out


def liouvillian_matrix(params: ModelParams, dim: int) -> sp.csr_matrix:
    """Sparse superoperator L with vec(drho/dt) = L @ vec(rho).

    Row-major (C-order) vectorization: vec(A rho B) = kron(A, B^T) vec(rho).
    """
    dim = hilbert.check_dim(dim)
    h = sp.csr_matrix(build_hamiltonian(params, dim))
    eye = sp.identity(dim, format="csr", dtype=complex)
    liouv = -1j * (sp.kron(h, eye) - sp.kron(eye, h.T))
    for rate, c_dense in _jump_ops(params, dim):
        c = sp.csr_matrix(c_dense)
        cdc = (c.conj().T @ c).tocsr()
        liouv = liouv + rate * (
            sp.kron(c, c.conj())
            - 0.5 * sp.kron(cdc, eye)
            - 0.5 * sp.kron(eye, cdc.T)
        )
    return liouv.tocsr()


def validate_density_matrix(
    rho: np.ndarray,
    herm_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    eig_floor: float = EIG_FLOOR,
) -> np.ndarray:
    """Check Hermiticity, unit trace, and numerical positivity of rho."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatchError(f"density matrix must be square, got {rho.shape}")
    herm_err = np.abs(rho - rho.conj().T).max()
    if herm_err > herm_tol:
        raise IntegrationDivergedError(
            f"density matrix Hermiticity violated: max |rho - rho_dag| = {herm_err:.3e}"
        )
    tr_err = abs(np.trace(rho) - 1.0)
    if tr_err > trace_tol:
        raise IntegrationDivergedError(
            f"density matrix trace deviates from 1 by {tr_err:.3e}"
        )
    w_min = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    if w_min < eig_floor:
        raise IntegrationDivergedError(
            f"density matrix smallest eigenvalue {w_min:.3e} below floor {eig_floor:.1e}"
        )
    return rho


# Dormand-Prince 5(4) coefficients.  b5 is the 5th-order propagating
# weight vector; _DP_ERR = b5 - b4 gives the embedded error estimate.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_DP_ERR = _DP_B5 - _DP_B4

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _error_norm(err: np.ndarray, scale: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(
    rhs: Callable[[np.ndarray], np.ndarray],
    y0: np.ndarray,
    f0: np.ndarray,
    t_span: float,
    rel_tol: float,
    abs_tol: float,
    max_step: float,
) -> float:
    """Hairer-style starting step size from two derivative probes."""
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = _error_norm(y0, scale)
    d1 = _error_norm(f0, scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, t_span)
    f1 = rhs(y0 + h0 * f0)
    d2 = _error_norm(f1 - f0, scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, t_span, max_step)


def _step_dp45(rhs, y, f0, h):
    """One Dormand-Prince 5(4) step: (y_new, f_new, error_vector)."""
    k = np.empty((7, y.size), dtype=complex)
    k[0] = f0
    for i in range(1, 6):
        k[i] = rhs(y + h * (_DP_A[i] @ k[:i]))
    y_new = y + h * (_DP_A[6] @ k[:6])
    k[6] = rhs(y_new)  # FSAL: also the first stage of the next step
    return y_new, k[6], h * (_DP_ERR @ k)


def evolve(
    rho0: np.ndarray,
    params: ModelParams,
    cfg: IntegratorConfig,
    observers: Sequence[Callable[[float, np.ndarray], None]] = (),
    keep_states: bool = True,
) -> Trajectory:
    """Integrate the master equation, sampling at cfg.sample_times().

    At each sample time the raw integrator state is copied, re-Hermitized
    ((rho + rho_dag)/2) and trace-renormalized; the copy goes to the
    observers and into the returned trajectory.  The integrator itself
    continues from the raw state, so the recorded per-sample trace drift
    measures real accumulated error.  Drift beyond 1e-6 or a sampled
    eigenvalue below -1e-6 aborts the run.
    """
    rho0 = validate_density_matrix(rho0)
    dim = rho0.shape[0]
    liouv = liouvillian_matrix(params, dim)

    def rhs(y: np.ndarray) -> np.ndarray:
        return liouv @ y

    times = cfg.sample_times()
    y = rho0.reshape(-1).astype(complex)
    states: list | None = [] if keep_states else None
    drifts = np.zeros(times.size)
    n_steps = 0
    n_rejected = 0

    def emit(idx: int, t: float, y_raw: np.ndarray) -> None:
        rho = y_raw.reshape(dim, dim)
        rho = 0.5 * (rho + rho.conj().T)
        tr = float(np.trace(rho).real)
        drift = abs(tr - 1.0)
        drifts[idx] = drift
        if drift > TRACE_DRIFT_LIMIT:
            raise IntegrationDivergedError(
                f"trace drift {drift:.3e} at t = {t:.6g} exceeds {TRACE_DRIFT_LIMIT:.1e}"
            )
        rho = rho / tr
        w_min = float(np.linalg.eigvalsh(rho).min())
        if w_min < SAMPLE_EIG_FLOOR:
            raise IntegrationDivergedError(
                f"eigenvalue {w_min:.3e} at t = {t:.6g} below {SAMPLE_EIG_FLOOR:.1e}; "
                "increase fock_dim or tighten tolerances"
            )
        if states is not None:
            states.append(rho)
        for obs in observers:
            obs(t, rho)

    emit(0, 0.0, y)

    if cfg.method == "rk4":
        t = 0.0
        for idx in range(1, times.size):
            target = times[idx]
            n_sub = max(1, math.ceil((target - t) / cfg.max_step))
            h = (target - t) / n_sub
            for _ in range(n_sub):
                k1 = rhs(y)
                k2 = rhs(y + 0.5 * h * k1)
                k3 = rhs(y + 0.5 * h * k2)
                k4 = rhs(y + h * k3)
                y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                t += h
                n_steps += 1
            t = target
            emit(idx, t, y)
        return Trajectory(times, states, drifts, n_steps, n_rejected)

    f = rhs(y)
    t = 0.0
    h_opt = _initial_step(rhs, y, f, cfg.t_max, cfg.rel_tol, cfg.abs_tol, cfg.max_step)
    tiny = 16.0 * np.finfo(float).eps
    for idx in range(1, times.size):
        target = times[idx]
        while t < target - tiny * max(1.0, abs(target)):
            h = min(h_opt, cfg.max_step, target - t)
            if h < tiny * max(1.0, abs(t)):
                raise StiffnessError(
                    f"step size underflow at t = {t:.6g} (h = {h:.3e}); "
                    "the master equation is too stiff for this tolerance"
                )
            y_new, f_new, err_vec = _step_dp45(rhs, y, f, h)
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err = _error_norm(err_vec, scale)
            if err <= 1.0:
                t = target if (target - t - h) < tiny * max(1.0, abs(target)) else t + h
                y, f = y_new, f_new
                n_steps += 1
                factor = _MAX_FACTOR if err == 0.0 else _SAFETY * err ** -0.2
                h_opt = h * min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            else:
                n_rejected += 1
                h_opt = h * max(_MIN_FACTOR, _SAFETY * err ** -0.2)
        emit(idx, target, y)
    return Trajectory(times, states, drifts, n_steps, n_rejected)


def steady_amplitude_tpd_kerr_spl(params: ModelParams) -> SteadyAmplitude:
    """Closed-form lobe amplitude for the Kerr model with single-photon loss.

    r0 = ((4 eps^2 - kappa^2/4) / (4 K^2))^(1/4) and
    tan(2 theta0) = kappa / sqrt(16 eps^2 - kappa^2), principal branch
    theta0 in [0, pi/4).  Valid deep in the weak-loss regime; validity_ok
    flags kappa < 0.1 * 8 K r0^2.
    """
    eps, kerr, kappa = params.epsilon, params.kerr, params.kappa
    if kerr == 0:
        raise ModelMismatchError(
            "closed form needs kerr > 0; use steady_amplitude_tpd_etpl for K = 0"
        )
    disc = 16.0 * eps**2 - kappa**2
    if disc <= 0:
        raise RegimeError(
            f"no steady lobe: 16 eps^2 = {16 * eps**2:.6g} <= kappa^2 = {kappa**2:.6g}"
        )
    r0 = ((4.0 * eps**2 - kappa**2 / 4.0) / (4.0 * kerr**2)) ** 0.25
    theta0 = 0.5 * math.atan(kappa / math.sqrt(disc))
    validity_ok = kappa < 0.1 * 8.0 * kerr * r0**2
    return SteadyAmplitude(r0 * np.exp(1j * theta0), r0, theta0, validity_ok)


def steady_amplitude_tpd_etpl(params: ModelParams) -> SteadyAmplitude:
    """Lobe amplitude alpha = sqrt(eps / (K + i kappa2 / 2)), principal root."""
    if params.kerr == 0 and params.kappa2 == 0:
        raise UndefinedAmplitudeError(
            "alpha undefined: kerr and kappa2 are both zero (no restoring term)"
        )
    z = params.epsilon / (params.kerr + 0.5j * params.kappa2)
    alpha = complex(np.sqrt(complex(z)))
    return SteadyAmplitude(alpha, abs(alpha), float(np.angle(alpha)), True)


def classical_mixture(alpha: complex, dim: int) -> np.ndarray:
    """Equal-weight incoherent mixture of |alpha> and |-alpha>."""
    plus = hilbert.coherent_state(alpha, dim)
    minus = hilbert.coherent_state(-alpha, dim)
    return 0.5 * (np.outer(plus, plus.conj()) + np.outer(minus, minus.conj()))


# Above this dimension the augmented dense least-squares solve gets slow
# (cubic in dim^2); fall back to a sparse direct solve with the trace
# constraint substituted for one redundant row of L.
_LSTSQ_DIM_LIMIT = 48


def numeric_steady_state(params: ModelParams, dim: int) -> np.ndarray:
    """Steady state from L(rho) = 0 with tr(rho) = 1.

    Solves the vectorized Liouvillian with an appended trace row by dense
    least squares (small dims) or, for larger dims, a sparse direct solve
    in which the trace row replaces the first row of L (the rows of L are
    linearly dependent, so one may be dropped).  The residual
    ||L vec(rho)|| <= 1e-8 ||L||_F ||vec(rho)|| is verified either way.

    Single-photon loss must be nonzero: with kappa = 0 parity is conserved
    and the steady-state manifold is degenerate.
    """
    dim = hilbert.check_dim(dim)
    if params.kappa == 0 and params.kappa2 == 0:
        raise ValueError("no dissipator: both loss rates are zero")
    if params.kappa == 0:
        raise SteadyStateAmbiguityError(
            "kappa = 0 conserves parity, so the steady state is not unique; "
            "fix a parity sector (e.g. evolve from a state of definite parity) "
            "or add a small kappa regularizer"
        )
    liouv = liouvillian_matrix(params, dim)
    n2 = dim * dim
    trace_row = np.zeros(n2, dtype=complex)
    trace_row[:: dim + 1] = 1.0

    if dim <= _LSTSQ_DIM_LIMIT:
        a_mat = np.vstack([liouv.toarray(), trace_row[None, :]])
        b = np.zeros(n2 + 1, dtype=complex)
        b[-1] = 1.0
        x = np.linalg.lstsq(a_mat, b, rcond=None)[0]
    else:
        coo = liouv.tocoo()
        keep = coo.row != 0
        rows = np.concatenate([coo.row[keep], np.zeros(dim, dtype=coo.row.dtype)])
        cols = np.concatenate([coo.col[keep], np.arange(dim) * (dim + 1)])
        data = np.concatenate([coo.data[keep], np.ones(dim, dtype=complex)])
        mod = sp.csc_matrix((data, (rows, cols)), shape=(n2, n2))
        rhs_vec = np.zeros(n2, dtype=complex)
        rhs_vec[0] = 1.0
        x = spla.spsolve(mod, rhs_vec)

    norm_l = float(np.sqrt((np.abs(liouv.data) ** 2).sum()))
    residual = float(np.linalg.norm(liouv @ x))
    if residual > 1e-8 * norm_l * float(np.linalg.norm(x)):
        raise SteadyStateAmbiguityError(
            f"steady-state solve did not converge: residual {residual:.3e} "
            f"(null space may be degenerate)"
        )
    rho = x.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return validate_density_matrix(rho)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity F(rho, sigma) = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DimensionMismatchError(
            f"state shapes differ: {rho.shape} vs {sigma.shape}"
        )
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    inner = sqrt_rho @ sigma @ sqrt_rho
    mu = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sqrt(np.clip(mu, 0.0, None)).sum() ** 2)
