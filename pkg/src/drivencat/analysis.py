"""Scenario presets, observable time series, window/oscillation detection,
parameter sweeps, and the engineered-two-photon-loss rate calculator.

Three model variants share one parameter record: the Kerr model with
single-photon loss only (TPD_KERR), the pure engineered-two-photon-loss
model without Kerr (TPD_ETPL), and the hybrid carrying both
nonlinearities.  Presets pin epsilon = 1 so times read as epsilon*t.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from . import hilbert, metrology
from .dynamics import IntegratorConfig, ModelParams, evolve

__all__ = [
    "SCENARIO_KINDS",
    "Scenario",
    "TimeSeries",
    "WindowReport",
    "SweepEntry",
    "EtplHardware",
    "initial_state",
    "scenario_tpd_kerr",
    "scenario_tpd_etpl",
    "scenario_hybrid",
    "run_scenario",
    "threshold_window",
    "peak_estimate",
    "sweep",
    "effective_kappa2",
]

SCENARIO_KINDS = ("TPD_KERR", "TPD_ETPL", "HYBRID")

DEFAULT_FOCK_DIM = 60

# Interior maxima shallower than this (dB) are integrator ripple, not
# physical oscillation.
DEFAULT_PROMINENCE_DB = 0.25

# Time-series fields that windows can be computed over.
WINDOW_FIELDS = ("gq_db", "s_db")

TIMESERIES_FIELDS = (
    "gq_db",
    "s_db",
    "theta_opt_qfi",
    "theta_min_sq",
    "mean_n",
    "parity",
    "purity",
    "trace_drift",
)


@dataclass(frozen=True)
class Scenario:
    """A model variant plus its parameters and initial state spec.

    ``initial`` is a compact state spec string: ``vacuum``, ``fock:<n>``,
    ``coherent:<amplitude>`` or ``cat:<amplitude>:<even|odd>`` (complex
    amplitudes in Python literal form, e.g. ``1+0.5j``).
    """

    kind: str
    params: ModelParams
    initial: str = "vacuum"

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"kind must be one of {SCENARIO_KINDS}, got {self.kind!r}")
        if self.kind == "TPD_KERR" and self.params.kappa2 != 0:
            raise ValueError("TPD_KERR forbids kappa2 != 0; use HYBRID")
        if self.kind == "TPD_ETPL" and self.params.kerr != 0:
            raise ValueError("TPD_ETPL forbids kerr != 0; use HYBRID")


@dataclass(frozen=True)
class TimeSeries:
    """Observable stack sampled along one trajectory.

    Angles carry the conventions of their result types: theta_opt_qfi is
    the QFI generator angle, theta_min_sq the variance-direction angle.
    ``scan_qfi_rel_err`` / ``scan_vmin_abs_err`` hold the worst deviation
    between closed-form and grid-scan extrema over all samples when the
    run was made with ``verify_extrema`` (None otherwise).  ``snapshots``
    maps each requested snapshot time to (actual sample time, state).
    """

    times: np.ndarray
    gq_db: np.ndarray
    s_db: np.ndarray
    theta_opt_qfi: np.ndarray
    theta_min_sq: np.ndarray
    mean_n: np.ndarray
    parity: np.ndarray
    purity: np.ndarray
    trace_drift: np.ndarray
    max_tail_population: float = 0.0
    scan_qfi_rel_err: float | None = None
    scan_vmin_abs_err: float | None = None
    snapshots: dict | None = None

    def field_values(self, field: str) -> np.ndarray:
        if field not in TIMESERIES_FIELDS:
            raise ValueError(f"unknown time-series field {field!r}")
        return getattr(self, field)


@dataclass(frozen=True)
class WindowReport:
    """First maximal run of samples at or above a threshold.

    Endpoints are linearly interpolated between the bracketing samples,
    so they need not coincide with grid times.  ``contiguous`` is True
    when no other sample outside [t_start, t_end] meets the threshold.
    ``n_oscillations`` counts interior local maxima of the full series
    after its global peak, prominence-filtered.  An all-below-threshold
    series yields t_start == t_end == first sample time and empty=True.
    """

    threshold_db: float
    t_start: float
    t_end: float
    contiguous: bool
    n_oscillations: int
    empty: bool


@dataclass(frozen=True)
class SweepEntry:
    """One sweep point: the swept value, its results, or its failure."""

    value: float
    series: TimeSeries | None
    window: WindowReport | None
    error: str | None


@dataclass(frozen=True)
class EtplHardware:
    """Buffer-mediated two-photon dissipation hardware parameters.

    g2 is the two-photon exchange coupling, kappa_b the buffer loss rate
    (both angular frequencies in the same unit), alpha_mag the target
    lobe amplitude magnitude.
    """

    g2: float
    kappa_b: float
    alpha_mag: float

    def __post_init__(self):
        for name in ("g2", "kappa_b", "alpha_mag"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def initial_state(spec: str, dim: int) -> np.ndarray:
    """Resolve a state spec string to a density matrix of dimension dim."""
    parts = spec.strip().split(":")
    name = parts[0].lower()
    try:
        if name == "vacuum" and len(parts) == 1:
            psi = hilbert.fock_state(0, dim)
        elif name == "fock" and len(parts) == 2:
            psi = hilbert.fock_state(int(parts[1]), dim)
        elif name == "coherent" and len(parts) == 2:
            psi = hilbert.coherent_state(complex(parts[1]), dim)
        elif name == "cat" and len(parts) == 3:
            sign_word = parts[2].strip().lower()
            signs = {"even": +1, "+": +1, "odd": -1, "-": -1}
            if sign_word not in signs:
                raise ValueError(f"cat parity must be even/odd, got {parts[2]!r}")
            psi = hilbert.cat_state(complex(parts[1]), signs[sign_word], dim)
        else:
            raise ValueError(f"unrecognized state spec {spec!r}")
    except ValueError as exc:
        raise ValueError(f"bad initial state spec {spec!r}: {exc}") from exc
    return np.outer(psi, psi.conj())


def scenario_tpd_kerr(
    kerr: float = 0.25, kappa: float = 0.01, epsilon: float = 1.0,
    initial: str = "vacuum",
) -> Scenario:
    """Kerr model with single-photon loss only."""
    return Scenario(
        "TPD_KERR", ModelParams(epsilon, kerr, kappa, 0.0), initial
    )


def scenario_tpd_etpl(
    kappa2: float = 0.5, kappa: float = 0.01, epsilon: float = 1.0,
    initial: str = "vacuum",
) -> Scenario:
    """Pure engineered-two-photon-loss model (no Kerr)."""
    return Scenario(
        "TPD_ETPL", ModelParams(epsilon, 0.0, kappa, kappa2), initial
    )


def scenario_hybrid(
    kerr: float = 0.25, kappa2: float = 0.5, kappa: float = 0.01,
    epsilon: float = 1.0, initial: str = "vacuum",
) -> Scenario:
    """Hybrid model carrying both the Kerr term and the engineered loss."""
    return Scenario(
        "HYBRID", ModelParams(epsilon, kerr, kappa, kappa2), initial
    )


def run_scenario(
    scenario: Scenario,
    cfg: IntegratorConfig,
    fock_dim: int = DEFAULT_FOCK_DIM,
    verify_extrema: bool = False,
    snapshot_times: tuple = (),
) -> TimeSeries:
    """Evolve a scenario and evaluate the observable stack per sample.

    With ``verify_extrema`` every sample additionally runs the
    brute-force theta grid scans and the worst closed-form/scan
    deviations are recorded on the returned series (slow; meant for
    validation runs).  ``snapshot_times`` requests state copies at the
    nearest sample times.
    """
    dim = hilbert.check_dim(fock_dim)
    rho0 = initial_state(scenario.initial, dim)
    n_levels = np.arange(dim, dtype=float)
    parity_signs = (-1.0) ** np.arange(dim)

    times = cfg.sample_times()
    snap_index = {}
    for tau in snapshot_times:
        if not 0.0 <= tau <= cfg.t_max:
            raise ValueError(f"snapshot time {tau!r} outside [0, {cfg.t_max}]")
        snap_index.setdefault(int(np.argmin(np.abs(times - tau))), []).append(tau)

    columns = {name: [] for name in TIMESERIES_FIELDS if name != "trace_drift"}
    snapshots: dict = {}
    worst_qfi_rel = 0.0
    worst_vmin_abs = 0.0
    max_tail = 0.0
    tail_levels = min(4, dim)
    sample_counter = [0]

    def observer(t: float, rho: np.ndarray) -> None:
        nonlocal worst_qfi_rel, worst_vmin_abs, max_tail
        qfi_res = metrology.qfi_max(rho)
        sq_res = metrology.squeeze_level(rho)
        diag = np.diag(rho).real
        columns["gq_db"].append(qfi_res.gq_db)
        columns["s_db"].append(sq_res.s_db)
        columns["theta_opt_qfi"].append(qfi_res.theta_opt)
        columns["theta_min_sq"].append(sq_res.theta_min)
        columns["mean_n"].append(float(diag @ n_levels))
        columns["parity"].append(float(diag @ parity_signs))
        columns["purity"].append(float(np.sum(np.abs(rho) ** 2)))
        max_tail = max(max_tail, float(np.clip(diag[-tail_levels:], 0, None).sum()))
        if verify_extrema:
            f_scan, _ = metrology.qfi_theta_scan(rho)
            v_scan, _ = metrology.variance_theta_scan(rho)
            worst_qfi_rel = max(
                worst_qfi_rel,
                abs(qfi_res.f_max - f_scan) / max(qfi_res.f_max, f_scan),
            )
            worst_vmin_abs = max(worst_vmin_abs, abs(sq_res.v_min - v_scan))
        idx = sample_counter[0]
        if idx in snap_index:
            for tau in snap_index[idx]:
                snapshots[tau] = (t, rho.copy())
        sample_counter[0] += 1

    traj = evolve(rho0, scenario.params, cfg, observers=[observer], keep_states=False)
    return TimeSeries(
        times=traj.times,
        gq_db=np.array(columns["gq_db"]),
        s_db=np.array(columns["s_db"]),
        theta_opt_qfi=np.array(columns["theta_opt_qfi"]),
        theta_min_sq=np.array(columns["theta_min_sq"]),
        mean_n=np.array(columns["mean_n"]),
        parity=np.array(columns["parity"]),
        purity=np.array(columns["purity"]),
        trace_drift=traj.trace_drift.copy(),
        max_tail_population=max_tail,
        scan_qfi_rel_err=worst_qfi_rel if verify_extrema else None,
        scan_vmin_abs_err=worst_vmin_abs if verify_extrema else None,
        snapshots=snapshots if snapshot_times else None,
    )


def _interp_crossing(t0, v0, t1, v1, threshold):
    if v1 == v0:
        return t0
    return t0 + (threshold - v0) * (t1 - t0) / (v1 - v0)


def threshold_window(
    series: TimeSeries,
    field: str = "gq_db",
    threshold_db: float = 5.0,
    prominence_db: float = DEFAULT_PROMINENCE_DB,
) -> WindowReport:
    """Locate the first maximal run of samples with field >= threshold.

    Endpoint times are linearly interpolated between the last sample
    below and first sample at-or-above the threshold (and vice versa at
    the trailing edge); a window touching the series boundary keeps the
    boundary time.  Oscillations are counted on the full series: interior
    local maxima after the global peak with at least ``prominence_db``
    of prominence.
    """
    if field not in WINDOW_FIELDS:
        raise ValueError(f"window field must be one of {WINDOW_FIELDS}, got {field!r}")
    values = series.field_values(field)
    times = series.times
    if values.size == 0:
        raise ValueError("empty series")

    peak_idx = int(np.argmax(values))
    peaks, _ = find_peaks(values[peak_idx:], prominence=prominence_db)
    n_osc = int(len(peaks))

    above = values >= threshold_db
    if not above.any():
        return WindowReport(threshold_db, times[0], times[0], False, n_osc, True)

    start = int(np.argmax(above))
    end = start
    while end + 1 < above.size and above[end + 1]:
        end += 1
    contiguous = not above[:start].any() and not above[end + 1 :].any()

    if start == 0:
        t_start = float(times[0])
    else:
        t_start = float(
            _interp_crossing(
                times[start - 1], values[start - 1], times[start], values[start],
                threshold_db,
            )
        )
    if end == above.size - 1:
        t_end = float(times[-1])
    else:
        t_end = float(
            _interp_crossing(
                times[end], values[end], times[end + 1], values[end + 1],
                threshold_db,
            )
        )
    return WindowReport(threshold_db, t_start, t_end, contiguous, n_osc, False)


def peak_estimate(times: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Global peak location and value, parabola-refined between samples.

    A quadratic through the best sample and its neighbors removes most of
    the sampling-grid bias; at a boundary the raw sample is returned.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    idx = int(np.argmax(values))
    if idx == 0 or idx == values.size - 1:
        return float(times[idx]), float(values[idx])
    tm, t0, tp = times[idx - 1 : idx + 2]
    ym, y0, yp = values[idx - 1 : idx + 2]
    denom = ym - 2.0 * y0 + yp
    if denom >= 0:  # flat or non-concave: keep the raw sample
        return float(t0), float(y0)
    shift = 0.5 * (ym - yp) / denom
    t_peak = t0 + shift * (tp - t0)
    y_peak = y0 - 0.25 * (ym - yp) * shift
    return float(t_peak), float(y_peak)


def sweep(
    base: Scenario,
    axis: str,
    values,
    cfg: IntegratorConfig,
    fock_dim: int = DEFAULT_FOCK_DIM,
    field: str = "gq_db",
    threshold_db: float = 5.0,
    prominence_db: float = DEFAULT_PROMINENCE_DB,
    max_workers: int | None = None,
    verify_extrema: bool = False,
) -> list[SweepEntry]:
    """Run independent scenarios along one parameter axis.

    Entries are returned in input order regardless of completion order;
    a failing value is captured in its entry instead of aborting the
    sweep.  Runs execute concurrently (the integrator releases the GIL
    inside the numerical kernels).
    """
    if axis not in ("kerr", "kappa", "kappa2"):
        raise ValueError(f"axis must be kerr, kappa or kappa2, got {axis!r}")
    values = [float(v) for v in values]
    if any(not np.isfinite(v) or v < 0 for v in values):
        raise ValueError("sweep values must be finite and non-negative")

    def one(value: float) -> SweepEntry:
        try:
            params = dataclasses.replace(base.params, **{axis: value})
            scenario = Scenario(base.kind, params, base.initial)
            series = run_scenario(
                scenario, cfg, fock_dim=fock_dim, verify_extrema=verify_extrema
            )
            window = threshold_window(series, field, threshold_db, prominence_db)
            return SweepEntry(value, series, window, None)
        except Exception as exc:  # capture per entry, keep the sweep alive
            return SweepEntry(value, None, None, f"{type(exc).__name__}: {exc}")

    if not values:
        return []
    with ThreadPoolExecutor(max_workers=max_workers or min(4, len(values))) as pool:
        return list(pool.map(one, values))


def effective_kappa2(hw: EtplHardware, margin: float = 10.0) -> tuple[float, bool]:
    """Two-photon loss rate from adiabatic elimination of a lossy buffer.

    kappa2 = 4 g2^2 / kappa_b.  The separation-of-scales condition
    kappa_b >> 8 g2 |alpha| is encoded as a factor-``margin`` inequality
    and reported as the validity flag, never silently enforced.
    """
    kappa2 = 4.0 * hw.g2**2 / hw.kappa_b
    validity_ok = bool(hw.kappa_b > margin * 8.0 * hw.g2 * hw.alpha_mag)
    return kappa2, validity_ok
