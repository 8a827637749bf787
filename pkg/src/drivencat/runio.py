"""Run configuration files and on-disk output formats.

Config format: flat ``key = value`` text, ``#`` starts a comment, dotted
prefixes group related keys (scenario.*, integrator.*, wigner.*,
sweep.*, analysis.*).  Unknown or duplicate keys are hard errors with
line diagnostics; the two required keys are ``scenario.kind`` and
``integrator.t_max``.  Lists are comma-separated.

All numeric output uses 17 significant digits (%.17g), which round-trips
IEEE doubles exactly, so identical configs produce bitwise-identical
CSV files.  Files are written atomically (temp file + rename).
"""

from __future__ import annotations

import dataclasses
import math
import os
import tempfile
from dataclasses import dataclass, fields as dataclass_fields

import numpy as np

from .analysis import (
    DEFAULT_PROMINENCE_DB,
    Scenario,
    TimeSeries,
    WINDOW_FIELDS,
    initial_state,
)
from .dynamics import IntegratorConfig, ModelParams
from .errors import ConfigError
from .phase_space import WignerGrid

__all__ = [
    "RunConfig",
    "parse_config",
    "load_config",
    "format_config",
    "write_manifest",
    "parse_manifest",
    "write_timeseries",
    "write_wigner_grid",
    "write_photon_numbers",
    "write_windows",
    "write_steady",
    "atomic_write_text",
    "format_time_token",
]

TIMESERIES_HEADER = "t,gq_db,s_db,theta_opt_qfi,theta_min_sq,mean_n,parity,purity,trace_drift"
WINDOWS_HEADER = "value,threshold_db,t_start,t_end,n_oscillations,status"
MANIFEST_NAME = "manifest.txt"


def _fmt(value: float) -> str:
    return "%.17g" % value


def format_time_token(tau: float) -> str:
    """Compact time tag used in snapshot file names (e.g. 1.2, 90)."""
    return "%g" % tau


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration (defaults filled in)."""

    kind: str
    t_max: float
    epsilon: float = 1.0
    kerr: float = 0.0
    kappa: float = 0.0
    kappa2: float = 0.0
    initial_state: str = "vacuum"
    n_outputs: int = 201
    rel_tol: float = 1e-11
    abs_tol: float = 1e-13
    max_step: float = math.inf
    method: str = "rk45"
    fock_dim: int = 60
    output_dir: str = "."
    wigner_times: tuple = ()
    x_min: float = -5.0
    x_max: float = 5.0
    x_points: int = 121
    p_min: float = -5.0
    p_max: float = 5.0
    p_points: int = 121
    sweep_axis: str = ""
    sweep_values: tuple = ()
    sweep_workers: int = 4
    window_field: str = "gq_db"
    thresholds_db: tuple = (3.0, 5.0, 7.0)
    prominence_db: float = DEFAULT_PROMINENCE_DB

    def scenario(self) -> Scenario:
        params = ModelParams(self.epsilon, self.kerr, self.kappa, self.kappa2)
        return Scenario(self.kind, params, self.initial_state)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(
            t_max=self.t_max,
            n_outputs=self.n_outputs,
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_step=self.max_step,
            method=self.method,
        )

    def x_axis(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.x_points)

    def p_axis(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.p_points)


def _parse_float(text: str) -> float:
    return float(text)

def _parse_int(text: str) -> int:
    return int(text)

def _parse_str(text: str) -> str:
    return text

def _parse_float_list(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(tok) for tok in text.split(","))


# dotted config key -> (RunConfig field, parser)
_KEY_MAP = {
    "scenario.kind": ("kind", _parse_str),
    "scenario.epsilon": ("epsilon", _parse_float),
    "scenario.kerr": ("kerr", _parse_float),
    "scenario.kappa": ("kappa", _parse_float),
    "scenario.kappa2": ("kappa2", _parse_float),
    "scenario.initial_state": ("initial_state", _parse_str),
    "integrator.t_max": ("t_max", _parse_float),
    "integrator.n_outputs": ("n_outputs", _parse_int),
    "integrator.rel_tol": ("rel_tol", _parse_float),
    "integrator.abs_tol": ("abs_tol", _parse_float),
    "integrator.max_step": ("max_step", _parse_float),
    "integrator.method": ("method", _parse_str),
    "fock_dim": ("fock_dim", _parse_int),
    "output.dir": ("output_dir", _parse_str),
    "wigner.times": ("wigner_times", _parse_float_list),
    "wigner.x_min": ("x_min", _parse_float),
    "wigner.x_max": ("x_max", _parse_float),
    "wigner.x_points": ("x_points", _parse_int),
    "wigner.p_min": ("p_min", _parse_float),
    "wigner.p_max": ("p_max", _parse_float),
    "wigner.p_points": ("p_points", _parse_int),
    "sweep.axis": ("sweep_axis", _parse_str),
    "sweep.values": ("sweep_values", _parse_float_list),
    "sweep.workers": ("sweep_workers", _parse_int),
    "analysis.window_field": ("window_field", _parse_str),
    "analysis.thresholds_db": ("thresholds_db", _parse_float_list),
    "analysis.prominence_db": ("prominence_db", _parse_float),
}

_FIELD_TO_KEY = {field: key for key, (field, _) in _KEY_MAP.items()}

_REQUIRED_KEYS = ("scenario.kind", "integrator.t_max")


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate config text into a resolved RunConfig."""
    values: dict = {}
    seen: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _KEY_MAP:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(
                f"{source}:{lineno}: duplicate key {key!r} (first on line {seen[key]})"
            )
        seen[key] = lineno
        field, parser = _KEY_MAP[key]
        try:
            values[field] = parser(val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from exc
    for key in _REQUIRED_KEYS:
        if _KEY_MAP[key][0] not in values:
            raise ConfigError(f"{source}: missing required key {key!r}")
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    _validate(cfg, source)
    return cfg


def _validate(cfg: RunConfig, source: str) -> None:
    # Constructing the domain objects runs their own invariant checks;
    # any violation is a config problem at this boundary.
    try:
        scenario = cfg.scenario()
        cfg.integrator()
        initial_state(scenario.initial, cfg.fock_dim)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    if cfg.fock_dim < 2:
        raise ConfigError(f"{source}: fock_dim must be >= 2, got {cfg.fock_dim}")
    for tau in cfg.wigner_times:
        if not 0.0 <= tau <= cfg.t_max:
            raise ConfigError(
                f"{source}: wigner time {tau:g} outside [0, {cfg.t_max:g}]"
            )
    for name in ("x", "p"):
        lo = getattr(cfg, f"{name}_min")
        hi = getattr(cfg, f"{name}_max")
        pts = getattr(cfg, f"{name}_points")
        if not (lo < hi and pts >= 2):
            raise ConfigError(
                f"{source}: wigner {name} grid needs {name}_min < {name}_max "
                f"and >= 2 points"
            )
    if cfg.sweep_axis and cfg.sweep_axis not in ("kerr", "kappa", "kappa2"):
        raise ConfigError(
            f"{source}: sweep.axis must be kerr, kappa or kappa2, got {cfg.sweep_axis!r}"
        )
    if any(not np.isfinite(v) or v < 0 for v in cfg.sweep_values):
        raise ConfigError(f"{source}: sweep.values must be finite and non-negative")
    if cfg.window_field not in WINDOW_FIELDS:
        raise ConfigError(
            f"{source}: analysis.window_field must be one of {WINDOW_FIELDS}"
        )
    if not cfg.thresholds_db:
        raise ConfigError(f"{source}: analysis.thresholds_db must not be empty")
    if cfg.prominence_db < 0:
        raise ConfigError(f"{source}: analysis.prominence_db must be >= 0")


def load_config(
    path: str,
    out_override: str | None = None,
    fock_dim_override: int | None = None,
) -> RunConfig:
    """Read a config file, applying CLI overrides before validation."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    cfg = parse_config(text, source=path)
    if out_override is not None or fock_dim_override is not None:
        updates = {}
        if out_override is not None:
            updates["output_dir"] = out_override
        if fock_dim_override is not None:
            updates["fock_dim"] = fock_dim_override
        cfg = dataclasses.replace(cfg, **updates)
        _validate(cfg, "<overrides>")
    return cfg


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return "%d" % value
    if isinstance(value, float):
        return _fmt(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def format_config(cfg: RunConfig) -> str:
    """Serialize a RunConfig to canonical config text (reparses equal)."""
    lines = []
    for f in dataclass_fields(RunConfig):
        key = _FIELD_TO_KEY[f.name]
        lines.append(f"{key} = {_format_value(getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


def atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a temp file in the same directory + rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_manifest(directory: str, cfg: RunConfig, results: dict) -> str:
    """Write the run manifest: config echo plus result.* metadata."""
    lines = ["# run manifest", "# -- resolved configuration --"]
    lines.append(format_config(cfg).rstrip("\n"))
    lines.append("# -- results --")
    for key, value in results.items():
        lines.append(f"result.{key} = {_format_value(value)}")
    path = os.path.join(directory, MANIFEST_NAME)
    atomic_write_text(path, "\n".join(lines) + "\n")
    return path


def parse_manifest(path: str) -> tuple[RunConfig, dict]:
    """Read a manifest back: (reparsed RunConfig, raw result.* strings)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    config_lines = []
    results = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key = line.partition("=")[0].strip()
        if key.startswith("result."):
            results[key[len("result."):]] = line.partition("=")[2].strip()
        else:
            config_lines.append(raw)
    cfg = parse_config("\n".join(config_lines), source=path)
    return cfg, results


def write_timeseries(path: str, series: TimeSeries) -> None:
    rows = [TIMESERIES_HEADER]
    for i, t in enumerate(series.times):
        rows.append(
            ",".join(
                _fmt(v)
                for v in (
                    t,
                    series.gq_db[i],
                    series.s_db[i],
                    series.theta_opt_qfi[i],
                    series.theta_min_sq[i],
                    series.mean_n[i],
                    series.parity[i],
                    series.purity[i],
                    series.trace_drift[i],
                )
            )
        )
    atomic_write_text(path, "\n".join(rows) + "\n")


def write_wigner_grid(path: str, grid: WignerGrid) -> None:
    rows = ["x,p,w"]
    for i, x in enumerate(grid.x_axis):
        for j, p in enumerate(grid.p_axis):
            rows.append(f"{_fmt(x)},{_fmt(p)},{_fmt(grid.values[i, j])}")
    atomic_write_text(path, "\n".join(rows) + "\n")


def write_photon_numbers(path: str, probabilities: np.ndarray) -> None:
    rows = ["n,p_n"]
    for n, p in enumerate(probabilities):
        rows.append(f"{n},{_fmt(p)}")
    atomic_write_text(path, "\n".join(rows) + "\n")


def write_windows(path: str, rows: list) -> None:
    """rows: (value, threshold_db, WindowReport | None, status) tuples."""
    out = [WINDOWS_HEADER]
    for value, threshold_db, report, status in rows:
        if report is None:
            out.append(
                f"{_fmt(value)},{_fmt(threshold_db)},nan,nan,nan,{status}"
            )
        else:
            out.append(
                ",".join(
                    (
                        _fmt(value),
                        _fmt(threshold_db),
                        _fmt(report.t_start),
                        _fmt(report.t_end),
                        "%d" % report.n_oscillations,
                        status,
                    )
                )
            )
    atomic_write_text(path, "\n".join(out) + "\n")


def write_steady(path: str, columns: dict) -> None:
    header = ",".join(columns.keys())
    row = ",".join(_format_value(v) if not isinstance(v, str) else v
                   for v in columns.values())
    atomic_write_text(path, header + "\n" + row + "\n")
