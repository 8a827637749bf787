"""Metrological dynamics of a two-photon-driven Kerr resonator.

A single bosonic mode driven by a two-photon (parametric) drive with an
optional Kerr nonlinearity, subject to single-photon loss and engineered
two-photon loss, integrated as a Lindblad master equation in a truncated
Fock basis.  The package computes the quantum Fisher information gain
over displacement directions, quadrature squeezing levels, Wigner
functions, photon statistics, and analytic/numeric steady states, and
ships a CLI that persists all of it as CSV plus rendered figures.
"""

from .analysis import (
    EtplHardware,
    Scenario,
    SweepEntry,
    TimeSeries,
    WindowReport,
    effective_kappa2,
    initial_state,
    peak_estimate,
    run_scenario,
    scenario_hybrid,
    scenario_tpd_etpl,
    scenario_tpd_kerr,
    sweep,
    threshold_window,
)
from .dynamics import (
    IntegratorConfig,
    ModelParams,
    SteadyAmplitude,
    Trajectory,
    build_hamiltonian,
    classical_mixture,
    evolve,
    fidelity,
    lindblad_rhs,
    liouvillian_matrix,
    numeric_steady_state,
    steady_amplitude_tpd_etpl,
    steady_amplitude_tpd_kerr_spl,
    validate_density_matrix,
)
from .hilbert import (
    annihilation,
    cat_state,
    coherent_state,
    creation,
    expect,
    fock_state,
    number_op,
    parity,
    quadratures,
)
from .metrology import (
    QfiResult,
    SqueezeResult,
    displacement_generator,
    qfi,
    qfi_max,
    qfi_theta_scan,
    quadrature_covariance,
    squeeze_level,
    variance,
    variance_theta_scan,
)
from .phase_space import (
    WignerGrid,
    odd_population,
    photon_distribution,
    wigner,
    wigner_point,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # hilbert
    "annihilation", "creation", "number_op", "quadratures", "parity",
    "fock_state", "coherent_state", "cat_state", "expect",
    # dynamics
    "ModelParams", "IntegratorConfig", "Trajectory", "SteadyAmplitude",
    "build_hamiltonian", "lindblad_rhs", "liouvillian_matrix", "evolve",
    "steady_amplitude_tpd_kerr_spl", "steady_amplitude_tpd_etpl",
    "classical_mixture", "numeric_steady_state", "validate_density_matrix",
    "fidelity",
    # metrology
    "QfiResult", "SqueezeResult", "qfi", "displacement_generator",
    "qfi_max", "qfi_theta_scan", "variance", "quadrature_covariance",
    "squeeze_level", "variance_theta_scan",
    # phase space
    "WignerGrid", "wigner", "wigner_point", "photon_distribution",
    "odd_population",
    # analysis
    "Scenario", "TimeSeries", "WindowReport", "SweepEntry", "EtplHardware",
    "initial_state", "scenario_tpd_kerr", "scenario_tpd_etpl",
    "scenario_hybrid", "run_scenario", "threshold_window", "peak_estimate",
    "sweep", "effective_kappa2",
]
