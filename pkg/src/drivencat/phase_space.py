"""Wigner functions and photon-number statistics.

Phase-space convention: alpha = (x + i p) / sqrt(2) and the Wigner
function integrates to 1 over the (x, p) plane,

    W(x, p) = (1/pi) tr[rho D(alpha) Pi D_dag(alpha)],

with D the displacement operator and Pi the photon-number parity.  The
displaced-parity identity D(a) Pi D_dag(a) = D(2a) Pi reduces every grid
point to displacement matrix elements, which are generalized Laguerre
polynomials; these are evaluated with the stable upward recurrence in
the polynomial degree, one Fock-space diagonal at a time.  Exact per
point: no FFT periodization, no interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarseError, NumericalError

__all__ = [
    "WignerGrid",
    "wigner",
    "wigner_point",
    "photon_distribution",
    "odd_population",
]

# Identity check tolerance: W(0,0) must reproduce tr(Pi rho)/pi.
_ORIGIN_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class WignerGrid:
    """W sampled on a rectangular grid; values[i, j] = W(x_axis[i], p_axis[j])."""

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        """Riemann sum of W dx dp over the grid."""
        dx = self.x_axis[1] - self.x_axis[0]
        dp = self.p_axis[1] - self.p_axis[0]
        return float(self.values.sum() * dx * dp)


def default_axes(extent: float = 5.0, points: int = 121) -> np.ndarray:
    """Symmetric uniform grid used by the CLI defaults."""
    return np.linspace(-extent, extent, points)


def _check_axis(axis: np.ndarray, name: str, dim: int) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d grid")
    if axis.size > 1:
        steps = np.diff(axis)
        if steps.min() <= 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            raise ValueError(f"{name} must be uniformly increasing")
        limit = np.pi / (2.0 * np.sqrt(2.0 * dim))
        if steps[0] > limit:
            raise GridTooCoarseError(
                f"{name} spacing {steps[0]:.4g} aliases a dim-{dim} basis "
                f"(limit {limit:.4g}); refine the grid or lower fock_dim"
            )
    return axis


def _wigner_values(rho: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """pi * W at displacement points, given gamma = 2 alpha = sqrt(2)(x + i p).

    Computes sum_{m,n} rho_{mn} (-1)^m <n|D(gamma)|m> diagonal by diagonal:
    the offset-k diagonal pairs with <m+k|D(gamma)|m> =
    sqrt(m!/(m+k)!) gamma^k exp(-|gamma|^2/2) L_m^{(k)}(|gamma|^2),
    and Hermiticity folds the lower triangle into twice the real part.
    """
    dim = rho.shape[0]
    u = np.abs(gamma) ** 2
    total = np.zeros(gamma.shape, dtype=float)
    gamma_k = np.ones(gamma.shape, dtype=complex)  # gamma^k, accumulated
    for k in range(dim):
        # c_m = (-1)^m sqrt(m!/(m+k)!), accumulated along the diagonal
        c = 1.0 / math.sqrt(float(math.factorial(k)))
        weight = 2.0 if k > 0 else 1.0
        lag_prev = np.zeros_like(u)
        lag = np.ones_like(u)  # L_0^{(k)}(u) = 1
        inner = np.zeros(gamma.shape, dtype=complex)
        for m in range(dim - k):
            inner += (c * rho[m, m + k]) * lag
            # upward Laguerre step to L_{m+1}^{(k)}
            lag, lag_prev = (
                ((2 * m + 1 + k - u) * lag - (m + k) * lag_prev) / (m + 1),
                lag,
            )
            c *= -np.sqrt((m + 1.0) / (m + 1.0 + k))
        total += weight * (gamma_k * inner).real
        gamma_k = gamma_k * gamma
    return total * np.exp(-0.5 * u)


def wigner_point(rho: np.ndarray, x: float, p: float) -> float:
    """W evaluated at a single phase-space point."""
    rho = np.asarray(rho, dtype=complex)
    gamma = np.array([[np.sqrt(2.0) * (x + 1j * p)]])
    return float(_wigner_values(rho, gamma)[0, 0] / np.pi)


def wigner(rho: np.ndarray, x_axis: np.ndarray, p_axis: np.ndarray) -> WignerGrid:
    """Wigner function of rho on the tensor grid x_axis x p_axis.

    Aborts if either grid spacing exceeds pi / (2 sqrt(2 dim)): beyond
    that the highest Fock components oscillate faster than the grid can
    sample.  Every call self-checks the displaced-parity identity
    W(0,0) = tr(Pi rho)/pi as an internal consistency test.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    x_axis = _check_axis(x_axis, "x_axis", dim)
    p_axis = _check_axis(p_axis, "p_axis", dim)
    gamma = np.sqrt(2.0) * (x_axis[:, None] + 1j * p_axis[None, :])
    values = _wigner_values(rho, gamma) / np.pi

    parity_expect = float(
        (np.diag(rho).real * (-1.0) ** np.arange(dim)).sum()
    )
    origin = wigner_point(rho, 0.0, 0.0)
    if abs(origin - parity_expect / np.pi) > _ORIGIN_CHECK_TOL:
        raise NumericalError(
            f"Wigner origin self-check failed: W(0,0) = {origin!r} vs "
            f"parity/pi = {parity_expect / np.pi!r}"
        )
    return WignerGrid(x_axis, p_axis, values)


def photon_distribution(rho: np.ndarray) -> np.ndarray:
    """Fock populations P_n = Re(rho_nn), clamped below at -1e-10."""
    rho = np.asarray(rho, dtype=complex)
    return np.maximum(np.diag(rho).real, -1e-10)


def odd_population(rho: np.ndarray) -> float:
    """Total population of odd Fock levels, equal to (1 - <Pi>)/2."""
    return float(photon_distribution(rho)[1::2].sum())
