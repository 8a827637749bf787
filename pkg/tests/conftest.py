"""Shared fixtures: the expensive trajectory runs are integrated once per
session and reused by both the unit tests and the acceptance suite.

Grid convention for the long runs: 0.1 time-unit sample spacing, so
n_outputs = 10 * t_max + 1 and every multiple of 0.1 lies on the grid.
"""

import numpy as np
import pytest

import drivencat as dc
from drivencat import analysis, dynamics


def dt_grid(t_max: float) -> dc.IntegratorConfig:
    return dc.IntegratorConfig(t_max=t_max, n_outputs=int(round(10 * t_max)) + 1)


@pytest.fixture(scope="session")
def kerr_run():
    """TPD_KERR baseline (K=0.25, kappa=0.01) to t=100, extrema-verified."""
    return analysis.run_scenario(
        dc.scenario_tpd_kerr(), dt_grid(100.0), fock_dim=60, verify_extrema=True
    )


@pytest.fixture(scope="session")
def hybrid01_run():
    """HYBRID kappa2=0.1 to t=100, extrema-verified."""
    return analysis.run_scenario(
        dc.scenario_hybrid(kappa2=0.1), dt_grid(100.0), fock_dim=60,
        verify_extrema=True,
    )


@pytest.fixture(scope="session")
def hybrid05_run():
    """HYBRID kappa2=0.5 to t=100 with phase-space snapshots, verified."""
    return analysis.run_scenario(
        dc.scenario_hybrid(kappa2=0.5), dt_grid(100.0), fock_dim=60,
        verify_extrema=True, snapshot_times=(1.2, 90.0),
    )


@pytest.fixture(scope="session")
def hybrid1_run():
    """HYBRID kappa2=1 to t=40, extrema-verified."""
    return analysis.run_scenario(
        dc.scenario_hybrid(kappa2=1.0), dt_grid(40.0), fock_dim=60,
        verify_extrema=True,
    )


@pytest.fixture(scope="session")
def etpl05_run():
    """TPD_ETPL kappa2=0.5 to t=30, extrema-verified."""
    return analysis.run_scenario(
        dc.scenario_tpd_etpl(kappa2=0.5), dt_grid(30.0), fock_dim=60,
        verify_extrema=True,
    )


@pytest.fixture(scope="session")
def hybrid3_run():
    """HYBRID kappa2=3 to t=20, extrema-verified."""
    return analysis.run_scenario(
        dc.scenario_hybrid(kappa2=3.0), dt_grid(20.0), fock_dim=60,
        verify_extrema=True,
    )


@pytest.fixture(scope="session")
def etpl1_run():
    """TPD_ETPL kappa2=1 to t=40 (model-convergence counterpart)."""
    return analysis.run_scenario(
        dc.scenario_tpd_etpl(kappa2=1.0), dt_grid(40.0), fock_dim=60
    )


@pytest.fixture(scope="session")
def eps_only_run():
    """Pure two-photon drive (no Kerr, no loss) over the short-time window."""
    scenario = dc.Scenario("TPD_KERR", dc.ModelParams(1.0, 0.0, 0.0, 0.0))
    return analysis.run_scenario(
        scenario, dc.IntegratorConfig(t_max=0.25, n_outputs=51), fock_dim=60
    )


@pytest.fixture(scope="session")
def kerr_dim68_run():
    """TPD_KERR peak region at fock_dim 68 on the same 0.1 grid."""
    return analysis.run_scenario(dc.scenario_tpd_kerr(), dt_grid(3.0), fock_dim=68)


@pytest.fixture(scope="session")
def lossless_etpl_states():
    """Parity-sector convergence data for kappa=0, kappa2=0.5, K=0.

    Returns (params, steady amplitude, state evolved from vacuum at t=40,
    state evolved from |1> at t=40), all at fock_dim 60.
    """
    params = dc.ModelParams(1.0, 0.0, 0.0, 0.5)
    cfg = dc.IntegratorConfig(t_max=40.0, n_outputs=11)
    dim = 60
    rho_even = np.zeros((dim, dim), dtype=complex)
    rho_even[0, 0] = 1.0
    rho_odd = np.zeros((dim, dim), dtype=complex)
    rho_odd[1, 1] = 1.0
    final_even = dynamics.evolve(rho_even, params, cfg).states[-1]
    final_odd = dynamics.evolve(rho_odd, params, cfg).states[-1]
    amp = dynamics.steady_amplitude_tpd_etpl(params)
    return params, amp, final_even, final_odd


@pytest.fixture(scope="session")
def kerr_steady_pair():
    """Numeric steady state and its closed-form mixture at desk scale."""
    params = dc.ModelParams(1.0, 0.25, 0.01, 0.0)
    rho_ss = dynamics.numeric_steady_state(params, 60)
    amp = dynamics.steady_amplitude_tpd_kerr_spl(params)
    mixture = dynamics.classical_mixture(amp.alpha, 60)
    return params, amp, rho_ss, mixture


@pytest.fixture(scope="session")
def evolved_mixed_state():
    """A generic full-rank-ish mixed state for metrology unit tests."""
    params = dc.ModelParams(1.0, 0.25, 0.2, 0.1)
    dim = 24
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[0, 0] = 1.0
    traj = dynamics.evolve(rho0, params, dc.IntegratorConfig(t_max=2.0, n_outputs=3))
    return traj.states[-1]
