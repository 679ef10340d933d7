"""Command-line entry point: ``sgdicke <command> CONFIG [options]``.

Exit codes: 0 ok, 2 configuration error, 3 truncation overflow,
4 singular Rabi mapping, 5 validation failure.
"""
from __future__ import annotations

import argparse
import json
import os
import platform
import sys

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_amplitudes, load_config
from .model import build_sector
from .observables import (
    _ENTROPY_CUTOFF,
    husimi_q,
    observable_series,
    snapshot_times,
)
from .oracle import dense_evolve, dense_hamiltonian, factorization_report, to_dense_vector
from .propagator import SectorEvolution, evolve, sector_eigensystem
from .rabi import SingularMappingError, effective_params
from .transform import AmplitudeTable, TruncationError, coherent_state

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRUNCATION = 3
EXIT_SINGULAR = 4
EXIT_VALIDATION = 5

VALIDATION_TOL = 1e-8


def _versions() -> dict:
    import numba
    import scipy

    return {
        "sgdicke": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }


def _workers(cfg: RunConfig) -> int:
    return cfg.workers if cfg.workers is not None else (os.cpu_count() or 1)


def _path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.directory, exist_ok=True)
    return os.path.join(cfg.directory, f"{cfg.prefix}_{name}")


def write_csv(path: str, header: list[str], columns) -> None:
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(header), comments="")


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _metadata(cfg: RunConfig, command: str, **extra) -> dict:
    meta = {
        "command": command,
        "config": cfg.to_dict(),
        "config_hash": cfg.digest(),
        "versions": _versions(),
        "tolerances": {"eigensolver": cfg.tol, "entropy_cutoff": _ENTROPY_CUTOFF},
    }
    meta.update(extra)
    return meta


def initial_state(cfg: RunConfig) -> tuple[AmplitudeTable, float]:
    """Configured initial state and the probability mass it leaves out."""
    N = cfg.model.n_qubits
    if cfg.state.amplitudes is None:
        return coherent_state(cfg.state.alpha, N, cfg.state.dicke_index, cfg.state.cutoff)
    state = load_amplitudes(cfg.state.amplitudes, N)
    need = state.required_p_max()
    p_max = need if cfg.state.cutoff is None else cfg.state.cutoff
    if need > p_max:
        raise TruncationError(f"state occupies sector {need} beyond cutoff {p_max}")
    return state.padded(p_max), max(0.0, 1.0 - state.norm() ** 2)


# -- commands ---------------------------------------------------------------

def cmd_simulate(cfg: RunConfig) -> int:
    state0, tail = initial_state(cfg)
    times = cfg.time.values()
    evo = SectorEvolution(state0, cfg.model, _workers(cfg), cfg.tol)
    series = observable_series(state0, times, cfg.model, evolution=evo)
    cols = series.columns()
    csv_path = _path(cfg, "observables.csv")
    write_csv(csv_path, list(cols), cols.values())
    write_json(
        _path(cfg, "observables.json"),
        _metadata(
            cfg,
            "simulate",
            p_max=state0.p_max,
            tail_mass=tail,
            columns=list(cols),
            max_norm_drift=float(np.max(np.abs(series.norm - series.norm[0]))),
            max_inversion_mismatch=float(np.max(np.abs(series.jz - series.jz_direct))),
        ),
    )
    print(f"wrote {csv_path} ({times.size} rows, p_max={state0.p_max})")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    rows = []
    for s in range(cfg.spectrum.s_min, cfg.spectrum.s_max + 1):
        eig = sector_eigensystem(s, cfg.model, cfg.tol)
        residual = float(np.sum(eig.values) - np.sum(build_sector(s, cfg.model).diag))
        for k, nu in enumerate(eig.values):
            rows.append((s, k, nu, residual))
    data = np.array(rows, dtype=float)
    csv_path = _path(cfg, "spectrum.csv")
    write_csv(csv_path, ["s", "index", "nu", "trace_residual"], data.T)
    write_json(_path(cfg, "spectrum.json"), _metadata(cfg, "spectrum", rows=len(rows)))
    print(f"wrote {csv_path} ({len(rows)} eigenvalues)")
    return EXIT_OK


def cmd_qfunc(cfg: RunConfig) -> int:
    state0, tail = initial_state(cfg)
    evo = SectorEvolution(state0, cfg.model, _workers(cfg), cfg.tol)
    q = cfg.qfunc
    if q.auto or q.times is None:
        series = observable_series(state0, cfg.time.values(), cfg.model, evolution=evo)
        times = list(snapshot_times(series))
        mode = "auto"
    else:
        times = list(q.times)
        mode = "explicit"
    center = q.center if q.center is not None else 0.0
    half_width = q.half_width
    if half_width is None:
        half_width = max(abs(center), abs(cfg.state.alpha)) + 4.0
    files = []
    grid = None
    for k, t in enumerate(times):
        grid = husimi_q(evo.state(t), center, half_width, q.resolution)
        path = _path(cfg, f"q_{k}.csv")
        header = [f"{x:.17g}" for x in grid.re]
        np.savetxt(path, grid.values, fmt="%.17g", delimiter=",", header=",".join(header), comments="")
        files.append(os.path.basename(path))
    write_json(
        _path(cfg, "q.json"),
        _metadata(
            cfg,
            "qfunc",
            mode=mode,
            times=times,
            files=files,
            re=grid.re.tolist(),
            im=grid.im.tolist(),
            layout="row i is im[i], column k is re[k]; header row lists re",
            p_max=state0.p_max,
            tail_mass=tail,
        ),
    )
    print(f"wrote {len(files)} Q grids at t = {', '.join(f'{t:.6g}' for t in times)}")
    return EXIT_OK


def validation_report(cfg: RunConfig, corrupt: bool = False) -> dict:
    """Fast path and two-factor construction against the dense oracle."""
    v = cfg.validate
    params = cfg.model
    N = params.n_qubits
    fast_params = params.replace(coupling=-params.coupling) if corrupt else params
    rng = np.random.default_rng(v.seed)
    H = dense_hamiltonian(params, v.p_cut)
    states = []
    for _ in range(v.n_states):
        amps = np.zeros((v.p_cut + 1, N + 1), dtype=np.complex128)
        k = v.support + 1
        amps[:k] = rng.normal(size=(k, N + 1)) + 1j * rng.normal(size=(k, N + 1))
        amps /= np.linalg.norm(amps)
        states.append(AmplitudeTable(N, amps))
    fast = {}
    factor = {}
    support = min(v.support, v.p_cut - 2 * N)
    for t in v.times:
        dev = 0.0
        for st in states:
            ref = dense_evolve(H, to_dense_vector(st, v.p_cut), t)
            got = to_dense_vector(evolve(st, t, fast_params, _workers(cfg), cfg.tol), v.p_cut)
            dev = max(dev, float(np.linalg.norm(got - ref)))
        fast[repr(float(t))] = dev
        if support >= 0:
            rep = factorization_report(params, t, v.p_cut, support, v.n_states, v.seed)
            factor[repr(float(t))] = rep["deviation"]
    worst = max(fast.values()) if fast else 0.0
    return {
        "fast_vs_oracle": fast,
        "fast_vs_oracle_max": worst,
        "factorized_vs_oracle": factor,
        "tolerance": VALIDATION_TOL,
        "corrupted": corrupt,
        "passed": worst < VALIDATION_TOL,
    }


def cmd_validate(cfg: RunConfig, corrupt: bool = False) -> int:
    if cfg.model.n_qubits > cfg.validate.max_qubits:
        raise ConfigError(
            f"validate.max_qubits: n_qubits={cfg.model.n_qubits} exceeds {cfg.validate.max_qubits}"
        )
    corrupt = corrupt or cfg.validate.corrupt
    report = validation_report(cfg, corrupt)
    write_json(_path(cfg, "validate.json"), _metadata(cfg, "validate", report=report))
    for t, dev in report["fast_vs_oracle"].items():
        print(f"t={t}: fast vs oracle {dev:.3e}")
        for key, d in report["factorized_vs_oracle"].get(t, {}).items():
            print(f"t={t}: factorized {key} vs oracle {d:.3e}")
    status = "PASS" if report["passed"] else "FAIL"
    print(f"{status}: max fast-path deviation {report['fast_vs_oracle_max']:.3e} (tol {VALIDATION_TOL:g})")
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def cmd_map_rabi(cfg: RunConfig) -> int:
    if cfg.rabi is None:
        raise ConfigError("rabi: section required for map-rabi")
    report = effective_params(cfg.rabi, cfg.rabi_threshold).to_dict()
    write_json(_path(cfg, "rabi.json"), _metadata(cfg, "map-rabi", report=report))
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgdicke", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("simulate", "observable time series (CSV + JSON)"),
        ("spectrum", "sector eigenvalues (CSV + JSON)"),
        ("qfunc", "field Husimi Q grids (CSV per snapshot + JSON axes)"),
        ("validate", "fast path and two-factor construction against the dense oracle"),
        ("map-rabi", "effective parameters of a weakly coupled Rabi model (JSON)"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="configuration file")
        p.add_argument(
            "--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
            help="override one configuration key (repeatable)",
        )
        p.add_argument("--workers", type=int, help="worker threads (default: config or all cores)")
        p.add_argument("--output", help="output directory (overrides output.directory)")
        if name == "validate":
            p.add_argument("--corrupt", action="store_true", help="debug: flip the coupling sign in the fast path")
    return parser


_COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "qfunc": cmd_qfunc,
    "map-rabi": cmd_map_rabi,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.workers is not None:
        overrides.append(f"run.workers={args.workers}")
    if args.output is not None:
        overrides.append(f"output.directory={args.output}")
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "validate":
            return cmd_validate(cfg, args.corrupt)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationError as exc:
        print(f"truncation overflow: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except SingularMappingError as exc:
        print(f"singular mapping: {exc}", file=sys.stderr)
        return EXIT_SINGULAR


if __name__ == "__main__":
    sys.exit(main())
