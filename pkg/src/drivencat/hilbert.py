"""Truncated Fock-space operators and reference states.

All operators are dense complex ``numpy`` arrays of shape ``(dim, dim)``
acting on the number basis ``|0>, ..., |dim-1>``.  Quadratures follow the
symmetric convention

    X = (a_dag + a) / sqrt(2),    P = 1j * (a_dag - a) / sqrt(2),

so the vacuum has Var[X] = Var[P] = 1/2 and [X, P] = i on every level
below the truncation boundary.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DegenerateCatError,
    DimensionMismatchError,
    InvalidDimensionError,
    TruncationError,
)

__all__ = [
    "annihilation",
    "creation",
    "number_op",
    "quadratures",
    "parity",
    "fock_state",
    "coherent_state",
    "cat_state",
    "expect",
    "check_dim",
]


def check_dim(dim: int) -> int:
    """Validate a Fock-space dimension, returning it as a plain int."""
    if not isinstance(dim, (int, np.integer)) or isinstance(dim, bool):
        raise InvalidDimensionError(f"dim must be an integer, got {dim!r}")
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    return int(dim)


def annihilation(dim: int) -> np.ndarray:
    """Annihilation operator a with <n-1|a|n> = sqrt(n)."""
    dim = check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def creation(dim: int) -> np.ndarray:
    """Creation operator a_dag, the conjugate transpose of ``annihilation``."""
    return annihilation(dim).conj().T.copy()


def number_op(dim: int) -> np.ndarray:
    """Number operator n = a_dag a, exact diagonal (no roundoff from sqrt)."""
    dim = check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def quadratures(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature pair (X, P) in the symmetric convention."""
    a = annihilation(dim)
    ad = a.conj().T
    x = (ad + a) / np.sqrt(2.0)
    p = 1j * (ad - a) / np.sqrt(2.0)
    return x, p


def parity(dim: int) -> np.ndarray:
    """Photon-number parity exp(i pi n) = diag(+1, -1, +1, ...)."""
    dim = check_dim(dim)
    return np.diag((-1.0) ** np.arange(dim)).astype(complex)


def fock_state(n: int, dim: int) -> np.ndarray:
    """Number state |n> as a complex vector of length dim."""
    dim = check_dim(dim)
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"Fock index must be a non-negative integer, got {n!r}")
    if n >= dim:
        raise TruncationError(float(np.sqrt(n)), dim)
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return psi


def _check_amplitude(alpha: complex, dim: int) -> complex:
    alpha = complex(alpha)
    if abs(alpha) ** 2 > dim / 4.0:
        raise TruncationError(abs(alpha), dim)
    return alpha


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """Coherent state |alpha> truncated to dim levels and renormalized.

    Amplitudes are built by the stable recurrence
    c_n = c_{n-1} * alpha / sqrt(n) starting from c_0 = exp(-|alpha|^2/2),
    then renormalized so the returned vector has unit norm.  Requires
    |alpha|^2 <= dim/4 so the truncated tail is negligible (the
    pre-renormalization norm then exceeds 0.999).
    """
    dim = check_dim(dim)
    alpha = _check_amplitude(alpha, dim)
    c = np.empty(dim, dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / np.sqrt(n)
    return c / np.linalg.norm(c)


def cat_state(alpha: complex, sign: int, dim: int) -> np.ndarray:
    """Normalized cat state (|alpha> +/- |-alpha>) / sqrt(N).

    ``sign`` is +1 for the even cat, -1 for the odd cat.  Parity purity is
    enforced by construction: the opposite-parity Fock amplitudes are
    zeroed exactly, so the result is an exact eigenstate of ``parity``.
    The odd cat degenerates to the zero vector as alpha -> 0.
    """
    dim = check_dim(dim)
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    alpha = _check_amplitude(alpha, dim)
    c = coherent_state(alpha, dim) if alpha != 0 else fock_state(0, dim)
    psi = c.copy()
    # |-alpha> flips the sign of odd Fock amplitudes, so the superposition
    # keeps even or odd components only.
    if sign == +1:
        psi[1::2] = 0.0
    else:
        psi[0::2] = 0.0
    norm = np.linalg.norm(psi)
    if norm < 1e-12:
        raise DegenerateCatError(
            f"cat state with sign {sign:+d} has zero norm at alpha = {alpha}"
        )
    return psi / norm


def expect(op: np.ndarray, state: np.ndarray) -> complex:
    """Expectation value of ``op`` in a state vector or density matrix."""
    op = np.asarray(op)
    state = np.asarray(state)
    if op.shape[0] != state.shape[0]:
        raise DimensionMismatchError(
            f"operator dim {op.shape[0]} != state dim {state.shape[0]}"
        )
    if state.ndim == 1:
        return complex(np.vdot(state, op @ state))
    if state.ndim == 2:
        # tr(op @ rho) without forming the product matrix
        return complex(np.einsum("ij,ji->", op, state))
    raise ValueError(f"state must be a vector or matrix, got ndim={state.ndim}")
