"""Run configuration: sectioned ``key = value`` files parsed with configparser.

Grammar (every key optional unless noted; frequencies in units of the
coupling, times in its inverse)::

    [model]     n_qubits (required), detuning, kerr, qubit_qubit, coupling
    [state]     alpha (complex, e.g. 5 or 3+4j), dicke_index, cutoff,
                amplitudes (path to a p,m,re,im CSV; replaces alpha)
    [time]      t_start, t_end, steps   or   times (comma list)
    [run]       workers (default: all cores), tol
    [output]    directory, prefix
    [qfunc]     times (comma list) or auto, center, half_width, resolution
    [spectrum]  s_min, s_max
    [validate]  p_cut, times, n_states, support, seed, max_qubits, corrupt
    [rabi]      omega_f, omega_q, g, n_qubits, kerr, chi, xi, threshold

Overrides use ``section.key=value`` and are applied before validation.
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import math
import os
from dataclasses import dataclass, field, fields

import numpy as np

from .model import ModelParams
from .rabi import RabiParams

__all__ = [
    "ConfigError",
    "StateSpec",
    "TimeGrid",
    "QfuncSpec",
    "SpectrumSpec",
    "ValidateSpec",
    "RunConfig",
    "load_config",
    "parse_config",
    "load_amplitudes",
]


class ConfigError(ValueError):
    """Unparseable or invalid configuration."""


@dataclass(frozen=True)
class StateSpec:
    alpha: complex = 5.0
    dicke_index: int = 0
    cutoff: int | None = None
    amplitudes: str | None = None


@dataclass(frozen=True)
class TimeGrid:
    t_start: float = 0.0
    t_end: float = 10.0
    steps: int = 101
    times: tuple[float, ...] | None = None

    def values(self) -> np.ndarray:
        if self.times is not None:
            return np.array(self.times, dtype=float)
        if self.steps == 1:
            return np.array([self.t_start])
        return np.linspace(self.t_start, self.t_end, self.steps)


@dataclass(frozen=True)
class QfuncSpec:
    times: tuple[float, ...] | None = None
    auto: bool = False
    center: complex | None = None
    half_width: float | None = None
    resolution: int = 101


@dataclass(frozen=True)
class SpectrumSpec:
    s_min: int = 0
    s_max: int = 10


@dataclass(frozen=True)
class ValidateSpec:
    p_cut: int = 60
    times: tuple[float, ...] = (0.1, 1.0, 10.0)
    n_states: int = 4
    support: int = 20
    seed: int = 0
    max_qubits: int = 6
    corrupt: bool = False


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    state: StateSpec = field(default_factory=StateSpec)
    time: TimeGrid = field(default_factory=TimeGrid)
    workers: int | None = None
    tol: float = 1e-12
    directory: str = "."
    prefix: str = "run"
    qfunc: QfuncSpec = field(default_factory=QfuncSpec)
    spectrum: SpectrumSpec = field(default_factory=SpectrumSpec)
    validate: ValidateSpec = field(default_factory=ValidateSpec)
    rabi: RabiParams | None = None
    rabi_threshold: float = 0.1

    def to_dict(self) -> dict:
        def plain(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            if isinstance(v, tuple):
                return [plain(x) for x in v]
            return v

        out = {}
        for name in ("model", "state", "time", "qfunc", "spectrum", "validate", "rabi"):
            obj = getattr(self, name)
            out[name] = None if obj is None else {k: plain(v) for k, v in dataclasses.asdict(obj).items()}
        for name in ("workers", "tol", "directory", "prefix", "rabi_threshold"):
            out[name] = getattr(self, name)
        return out

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form, excluding the worker count."""
        d = self.to_dict()
        d.pop("workers")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_ini(self) -> str:
        """Serialise back to the sectioned text format."""
        def fmt(v):
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, complex):
                return repr(v).strip("()")
            if isinstance(v, float):
                return repr(v)
            if isinstance(v, tuple):
                return ", ".join(repr(float(x)) for x in v)
            return str(v)

        cp = configparser.ConfigParser(interpolation=None)
        sections = {
            "model": self.model,
            "state": self.state,
            "time": self.time,
            "qfunc": self.qfunc,
            "spectrum": self.spectrum,
            "validate": self.validate,
        }
        for name, obj in sections.items():
            cp[name] = {
                f.name: fmt(getattr(obj, f.name))
                for f in fields(obj)
                if getattr(obj, f.name) is not None
            }
        cp["run"] = {"tol": repr(self.tol)}
        if self.workers is not None:
            cp["run"]["workers"] = str(self.workers)
        cp["output"] = {"directory": self.directory, "prefix": self.prefix}
        if self.rabi is not None:
            cp["rabi"] = {f.name: fmt(getattr(self.rabi, f.name)) for f in fields(self.rabi)}
            cp["rabi"]["threshold"] = repr(self.rabi_threshold)
        from io import StringIO

        buf = StringIO()
        cp.write(buf)
        return buf.getvalue()


# -- parsing ----------------------------------------------------------------

_KNOWN = {
    "model": {"n_qubits", "detuning", "kerr", "qubit_qubit", "coupling"},
    "state": {"alpha", "dicke_index", "cutoff", "amplitudes"},
    "time": {"t_start", "t_end", "steps", "times"},
    "run": {"workers", "tol"},
    "output": {"directory", "prefix"},
    "qfunc": {"times", "auto", "center", "half_width", "resolution"},
    "spectrum": {"s_min", "s_max"},
    "validate": {"p_cut", "times", "n_states", "support", "seed", "max_qubits", "corrupt"},
    "rabi": {"omega_f", "omega_q", "g", "n_qubits", "kerr", "chi", "xi", "threshold"},
}


class _Section:
    """Typed accessors that report ``section.key`` on failure."""

    def __init__(self, cp: configparser.ConfigParser, name: str):
        self.name = name
        self.data = cp[name] if cp.has_section(name) else {}

    def _get(self, key, conv, default):
        if key not in self.data:
            return default
        raw = self.data[key].strip()
        if raw == "" or raw.lower() == "none":
            return default
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{self.name}.{key}: cannot parse {raw!r} ({exc})") from None

    def float(self, key, default=None):
        def conv(raw):
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError("not finite")
            return v

        return self._get(key, conv, default)

    def int(self, key, default=None):
        return self._get(key, int, default)

    def complex(self, key, default=None):
        def conv(raw):
            v = complex(raw.replace(" ", "").replace("i", "j"))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError("not finite")
            return v

        return self._get(key, conv, default)

    def bool(self, key, default=False):
        def conv(raw):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError("expected a boolean")

        return self._get(key, conv, default)

    def floats(self, key, default=None):
        def conv(raw):
            vals = tuple(float(x) for x in raw.split(",") if x.strip())
            if not vals:
                raise ValueError("empty list")
            return vals

        return self._get(key, conv, default)

    def str(self, key, default=None):
        return self._get(key, str, default)


def _apply_overrides(cp: configparser.ConfigParser, overrides) -> None:
    for item in overrides or ():
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override {item!r}: expected section.key=value")
        lhs, value = item.split("=", 1)
        section, key = lhs.strip().split(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp[section][key] = value.strip()


def parse_config(text: str, overrides=None, base_dir: str = ".") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"syntax error: {exc}") from None
    _apply_overrides(cp, overrides)
    for name in cp.sections():
        if name not in _KNOWN:
            raise ConfigError(f"unknown section [{name}]")
        unknown = set(cp[name]) - _KNOWN[name]
        if unknown:
            raise ConfigError(f"{name}.{sorted(unknown)[0]}: unknown key")

    m = _Section(cp, "model")
    n_qubits = m.int("n_qubits")
    if n_qubits is None:
        raise ConfigError("model.n_qubits: required")
    values = dict(
        n_qubits=n_qubits,
        detuning=m.float("detuning", 0.0),
        kerr=m.float("kerr", 0.0),
        qubit_qubit=m.float("qubit_qubit", 0.0),
        coupling=m.float("coupling", 1.0),
    )
    try:
        model = ModelParams(**values)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from None

    s = _Section(cp, "state")
    amplitudes = s.str("amplitudes")
    if amplitudes is not None and not os.path.isabs(amplitudes):
        amplitudes = os.path.normpath(os.path.join(base_dir, amplitudes))
    state = StateSpec(
        alpha=s.complex("alpha", 5.0 + 0j),
        dicke_index=s.int("dicke_index", 0),
        cutoff=s.int("cutoff"),
        amplitudes=amplitudes,
    )
    if not 0 <= state.dicke_index <= n_qubits:
        raise ConfigError(f"state.dicke_index: must lie in 0..{n_qubits}")
    if state.cutoff is not None and state.cutoff < 0:
        raise ConfigError("state.cutoff: must be non-negative")

    t = _Section(cp, "time")
    grid = TimeGrid(
        t_start=t.float("t_start", 0.0),
        t_end=t.float("t_end", 10.0),
        steps=t.int("steps", 101),
        times=t.floats("times"),
    )
    if grid.steps < 1:
        raise ConfigError("time.steps: must be >= 1")
    if grid.steps > 1 and grid.t_end <= grid.t_start:
        raise ConfigError("time.t_end: must exceed t_start")
    if grid.times is not None and np.any(np.diff(grid.times) <= 0):
        raise ConfigError("time.times: must be strictly increasing")

    r = _Section(cp, "run")
    workers = r.int("workers")
    if workers is not None and workers < 1:
        raise ConfigError("run.workers: must be >= 1")
    tol = r.float("tol", 1e-12)
    if tol <= 0:
        raise ConfigError("run.tol: must be positive")

    o = _Section(cp, "output")
    q = _Section(cp, "qfunc")
    qfunc = QfuncSpec(
        times=q.floats("times"),
        auto=q.bool("auto", False),
        center=q.complex("center"),
        half_width=q.float("half_width"),
        resolution=q.int("resolution", 101),
    )
    if qfunc.resolution < 2:
        raise ConfigError("qfunc.resolution: must be >= 2")
    if qfunc.half_width is not None and qfunc.half_width <= 0:
        raise ConfigError("qfunc.half_width: must be positive")

    sp = _Section(cp, "spectrum")
    spectrum = SpectrumSpec(s_min=sp.int("s_min", 0), s_max=sp.int("s_max", 10))
    if not 0 <= spectrum.s_min <= spectrum.s_max:
        raise ConfigError("spectrum.s_max: need 0 <= s_min <= s_max")

    v = _Section(cp, "validate")
    validate = ValidateSpec(
        p_cut=v.int("p_cut", 60),
        times=v.floats("times", (0.1, 1.0, 10.0)),
        n_states=v.int("n_states", 4),
        support=v.int("support", 20),
        seed=v.int("seed", 0),
        max_qubits=v.int("max_qubits", 6),
        corrupt=v.bool("corrupt", False),
    )
    if validate.support > validate.p_cut - n_qubits:
        raise ConfigError("validate.support: must not exceed p_cut - n_qubits")

    rabi = None
    threshold = 0.1
    if cp.has_section("rabi"):
        rb = _Section(cp, "rabi")
        values = dict(
            omega_f=rb.float("omega_f", 1.0),
            omega_q=rb.float("omega_q", 1.0),
            g=rb.float("g", 0.0),
            n_qubits=rb.int("n_qubits", n_qubits),
            kerr=rb.float("kerr", 0.0),
            chi=rb.float("chi", 0.0),
            xi=rb.float("xi", 0.0),
        )
        try:
            rabi = RabiParams(**values)
        except ValueError as exc:
            raise ConfigError(f"rabi: {exc}") from None
        threshold = rb.float("threshold", 0.1)

    return RunConfig(
        model=model,
        state=state,
        time=grid,
        workers=workers,
        tol=tol,
        directory=o.str("directory", "."),
        prefix=o.str("prefix", "run"),
        qfunc=qfunc,
        spectrum=spectrum,
        validate=validate,
        rabi=rabi,
        rabi_threshold=threshold,
    )


def load_config(path: str, overrides=None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, overrides, base_dir=os.path.dirname(os.path.abspath(path)))


def load_amplitudes(path: str, n_qubits: int):
    """Amplitude table from a ``p,m,re,im`` CSV with a header row."""
    from .transform import AmplitudeTable

    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"state.amplitudes: cannot load {path} ({exc})") from None
    if data.shape[1] != 4:
        raise ConfigError("state.amplitudes: expected columns p,m,re,im")
    p = data[:, 0].astype(int)
    m = data[:, 1].astype(int)
    if np.any(p < 0) or np.any(m < 0) or np.any(m > n_qubits):
        raise ConfigError("state.amplitudes: index out of range")
    amps = np.zeros((int(p.max()) + 1, n_qubits + 1), dtype=np.complex128)
    np.add.at(amps, (p, m), data[:, 2] + 1j * data[:, 3])
    return AmplitudeTable(n_qubits, amps)
