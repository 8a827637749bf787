"""Command-line front end.

    drivencat evolve --config run.cfg [--out DIR] [--fock-dim N] [--seedless]
    drivencat wigner --config run.cfg ...
    drivencat sweep  --config run.cfg ...
    drivencat steady --config run.cfg ...
    drivencat report --run DIR [--dpi N]

Every command reads one flat key=value config file and writes CSV output
plus a manifest into the output directory.  All runs are deterministic;
--seedless is accepted for interface parity but changes nothing (there
is no random number generator anywhere in the pipeline).

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 IO error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time

import numpy as np

from . import __version__, analysis, dynamics, hilbert, phase_space, runio
from .errors import ConfigError, SimulationError

__all__ = ["main"]

# Manifest flag: worst per-sample population of the top Fock levels must
# stay below this for the truncation to be considered converged.
TAIL_OK_LIMIT = 1e-8


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drivencat",
        description="Metrology of a two-photon-driven Kerr resonator "
        "under single- and two-photon loss",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "evolve": "integrate one trajectory and write the observable time series",
        "wigner": "write Wigner grids and photon distributions at snapshot times",
        "sweep": "run a parameter sweep and summarize threshold windows",
        "steady": "compare analytic and numeric steady states",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="run config file")
        p.add_argument("--out", default=None, help="override output.dir")
        p.add_argument("--fock-dim", type=int, default=None, help="override fock_dim")
        p.add_argument(
            "--seedless",
            action="store_true",
            help="no-op: runs are deterministic and use no RNG",
        )
    p = sub.add_parser("report", help="render figures from a finished run directory")
    p.add_argument("--run", required=True, help="run directory with CSV outputs")
    p.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "report":
            return _cmd_report(args.run, args.dpi)
        cfg = runio.load_config(args.config, args.out, args.fock_dim)
        handler = {
            "evolve": cmd_evolve,
            "wigner": cmd_wigner,
            "sweep": cmd_sweep,
            "steady": cmd_steady,
        }[args.command]
        return handler(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SimulationError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4


def _base_results(command: str, wall: float, series=None) -> dict:
    results = {
        "command": command,
        "tool_version": __version__,
        "wall_seconds": float(wall),
    }
    if series is not None:
        results["max_trace_drift"] = float(series.trace_drift.max())
        results["max_tail_population"] = float(series.max_tail_population)
        results["truncation_tail_ok"] = series.max_tail_population < TAIL_OK_LIMIT
    return results


def cmd_evolve(cfg: runio.RunConfig) -> int:
    start = time.perf_counter()
    series = analysis.run_scenario(cfg.scenario(), cfg.integrator(), cfg.fock_dim)
    os.makedirs(cfg.output_dir, exist_ok=True)
    runio.write_timeseries(os.path.join(cfg.output_dir, "timeseries.csv"), series)
    runio.write_manifest(
        cfg.output_dir,
        cfg,
        _base_results("evolve", time.perf_counter() - start, series),
    )
    return 0


def cmd_wigner(cfg: runio.RunConfig) -> int:
    if not cfg.wigner_times:
        raise ConfigError("wigner.times must list at least one snapshot time")
    start = time.perf_counter()
    series = analysis.run_scenario(
        cfg.scenario(),
        cfg.integrator(),
        cfg.fock_dim,
        snapshot_times=cfg.wigner_times,
    )
    os.makedirs(cfg.output_dir, exist_ok=True)
    results = _base_results("wigner", 0.0, series)
    for tau in cfg.wigner_times:
        actual_t, rho = series.snapshots[tau]
        token = runio.format_time_token(tau)
        grid = phase_space.wigner(rho, cfg.x_axis(), cfg.p_axis())
        runio.write_wigner_grid(
            os.path.join(cfg.output_dir, f"wigner_t{token}.csv"), grid
        )
        runio.write_photon_numbers(
            os.path.join(cfg.output_dir, f"pn_t{token}.csv"),
            phase_space.photon_distribution(rho),
        )
        results[f"snapshot_time_{token}"] = float(actual_t)
    results["wall_seconds"] = time.perf_counter() - start
    runio.write_manifest(cfg.output_dir, cfg, results)
    return 0


def _sweep_dir_name(axis: str, value: float, index: int, values) -> str:
    token = "%g" % value
    if sum(1 for v in values if ("%g" % v) == token) > 1:
        token = f"{token}_{index}"
    return f"{axis}_{token}"


def cmd_sweep(cfg: runio.RunConfig) -> int:
    if not cfg.sweep_axis:
        raise ConfigError("sweep.axis must be set for the sweep command")
    if not cfg.sweep_values:
        raise ConfigError("sweep.values must list at least one value")
    start = time.perf_counter()
    entries = analysis.sweep(
        cfg.scenario(),
        cfg.sweep_axis,
        list(cfg.sweep_values),
        cfg.integrator(),
        fock_dim=cfg.fock_dim,
        field=cfg.window_field,
        threshold_db=cfg.thresholds_db[0],
        prominence_db=cfg.prominence_db,
        max_workers=cfg.sweep_workers,
    )
    os.makedirs(cfg.output_dir, exist_ok=True)
    window_rows = []
    n_ok = 0
    for idx, entry in enumerate(entries):
        if entry.error is not None:
            status = "error: " + entry.error.replace(",", ";")
            for threshold in cfg.thresholds_db:
                window_rows.append((entry.value, threshold, None, status))
            continue
        n_ok += 1
        sub = os.path.join(
            cfg.output_dir,
            _sweep_dir_name(cfg.sweep_axis, entry.value, idx, cfg.sweep_values),
        )
        os.makedirs(sub, exist_ok=True)
        runio.write_timeseries(os.path.join(sub, "timeseries.csv"), entry.series)
        sub_cfg = dataclasses.replace(
            cfg, **{cfg.sweep_axis: entry.value, "output_dir": sub}
        )
        runio.write_manifest(
            sub, sub_cfg, _base_results("evolve", 0.0, entry.series)
        )
        for threshold in cfg.thresholds_db:
            report = analysis.threshold_window(
                entry.series, cfg.window_field, threshold, cfg.prominence_db
            )
            status = "empty" if report.empty else "ok"
            window_rows.append((entry.value, threshold, report, status))
    runio.write_windows(os.path.join(cfg.output_dir, "windows.csv"), window_rows)
    results = _base_results("sweep", time.perf_counter() - start)
    results["values_ok"] = n_ok
    results["values_failed"] = len(entries) - n_ok
    runio.write_manifest(cfg.output_dir, cfg, results)
    return 0 if n_ok >= 1 else 3


def cmd_steady(cfg: runio.RunConfig) -> int:
    params = cfg.scenario().params
    if params.kerr == 0 and params.kappa2 == 0:
        raise ConfigError(
            "steady state undefined: kerr and kappa2 are both zero"
        )
    start = time.perf_counter()
    dim = cfg.fock_dim
    nan = float("nan")
    columns: dict = {
        "kind": cfg.kind,
        "epsilon": params.epsilon,
        "kerr": params.kerr,
        "kappa": params.kappa,
        "kappa2": params.kappa2,
        "fock_dim": dim,
    }

    kerr_amp = None
    if params.kerr > 0:
        try:
            kerr_amp = dynamics.steady_amplitude_tpd_kerr_spl(params)
        except SimulationError:
            kerr_amp = None
    columns["kerr_alpha_re"] = kerr_amp.alpha.real if kerr_amp else nan
    columns["kerr_alpha_im"] = kerr_amp.alpha.imag if kerr_amp else nan
    columns["kerr_validity"] = (
        (1 if kerr_amp.validity_ok else 0) if kerr_amp else nan
    )

    etpl_amp = dynamics.steady_amplitude_tpd_etpl(params)
    columns["etpl_alpha_re"] = etpl_amp.alpha.real
    columns["etpl_alpha_im"] = etpl_amp.alpha.imag

    # The ETPL formula is exact for kappa2 > 0 (any K); the Kerr-SPL one
    # applies otherwise.  Reference amplitude for the fidelity columns:
    ref_amp = etpl_amp if params.kappa2 > 0 else kerr_amp

    if params.kappa > 0:
        rho_ss = dynamics.numeric_steady_state(params, dim)
        a = hilbert.annihilation(dim)
        a2_val = hilbert.expect(a @ a, rho_ss)
        columns["numeric_a2_re"] = a2_val.real
        columns["numeric_a2_im"] = a2_val.imag
        if ref_amp is not None:
            mixture = dynamics.classical_mixture(ref_amp.alpha, dim)
            columns["fidelity_mixture"] = dynamics.fidelity(rho_ss, mixture)
            cat = hilbert.cat_state(ref_amp.alpha, +1, dim)
            columns["fidelity_even_cat"] = dynamics.fidelity(
                rho_ss, np.outer(cat, cat.conj())
            )
        else:
            columns["fidelity_mixture"] = nan
            columns["fidelity_even_cat"] = nan
        columns["numeric_parity"] = float(
            (np.diag(rho_ss).real * (-1.0) ** np.arange(dim)).sum()
        )
    else:
        for name in (
            "numeric_a2_re",
            "numeric_a2_im",
            "fidelity_mixture",
            "fidelity_even_cat",
            "numeric_parity",
        ):
            columns[name] = nan

    os.makedirs(cfg.output_dir, exist_ok=True)
    runio.write_steady(os.path.join(cfg.output_dir, "steady.csv"), columns)
    runio.write_manifest(
        cfg.output_dir, cfg, _base_results("steady", time.perf_counter() - start)
    )
    return 0


def _cmd_report(run_dir: str, dpi: int) -> int:
    if not os.path.isdir(run_dir):
        raise OSError(f"run directory not found: {run_dir}")
    from . import report  # matplotlib import deferred until needed

    written = report.render_run(run_dir, dpi=dpi)
    if not written:
        print(f"no renderable CSV outputs in {run_dir}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
