"""Run configuration: ``[section]`` / ``key = value`` text files.

Arrays are comma separated.  A Fourier mode entry reads
``field, k, amplitude, component[, cos|sin]`` where ``field`` is ``mu`` or
``gamma``.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .algebra import CATALOG, build_algebra
from .dynamics import SYSTEMS, StrandState, constant_state
from .zcr import DEFAULT_LAMBDAS

INITIAL_TYPES = ("equilibrium", "fourier_modes", "random_modes", "file")


class ConfigError(ValueError):
    """Invalid configuration; ``where`` names the field and, when known, the line."""

    def __init__(self, message: str, section: str | None = None, key: str | None = None,
                 line: int | None = None):
        where = ""
        if section:
            where = f"[{section}]" + (f" {key}" if key else "")
            if line is not None:
                where += f" (line {line})"
            where += ": "
        super().__init__(where + message)
        self.section, self.key, self.line = section, key, line


@dataclass(frozen=True)
class FourierMode:
    field: str
    k: int
    amplitude: float
    component: int
    phase: str = "cos"


@dataclass(frozen=True)
class RunConfig:
    algebra: str = "so3"
    system: str = "compact"
    r: float = 0.0
    a_coeffs: tuple[float, ...] = (1.0,)
    c_coeffs: tuple[float, ...] = (1.0,)
    axis: tuple[float, ...] | None = None
    N: int = 128
    Ls: float = 2.0 * math.pi
    T_end: float = 1.0
    cfl: float = 0.4
    dt: float | None = None
    initial_type: str = "equilibrium"
    m: float = 0.0
    n: float = 0.0
    mu0: tuple[float, ...] | None = None
    gamma0: tuple[float, ...] | None = None
    modes: tuple[FourierMode, ...] = ()
    random_kmax: int = 3
    random_amplitude: float = 0.1
    initial_file: str | None = None
    directory: str = "out"
    cadence: int = 1
    lambda_samples: tuple[float, ...] = DEFAULT_LAMBDAS
    seed: int = 0
    parallel: int = 1

    @property
    def dim(self) -> int:
        return build_algebra(self.algebra).dim


# ---------------------------------------------------------------------------
# parsing


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _line_of(text: str, section: str, key: str | None) -> int | None:
    current = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[(.+)\]$", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return no
            continue
        if current == section and key is not None:
            if re.match(rf"{re.escape(key)}\s*[=:]", line, re.IGNORECASE):
                return no
    return None


_SECTIONS = {
    "model": {"algebra", "system", "r", "a", "c", "axis"},
    "grid": {"n", "ls"},
    "time": {"t_end", "cfl", "dt"},
    "initial": {"type", "m", "n", "mu0", "gamma0", "kmax", "amplitude", "path"},
    "output": {"directory", "cadence", "lambda_samples"},
    "run": {"seed", "parallel"},
}


def parse_config(text: str) -> RunConfig:
    """Parse configuration text; raises ConfigError naming the offending field."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    def fail(msg, section, key=None):
        raise ConfigError(msg, section, key, _line_of(text, section, key))

    for section in cp.sections():
        if section not in _SECTIONS:
            fail("unknown section", section)
        for key in cp[section]:
            if section == "initial" and re.fullmatch(r"mode\d+", key):
                continue
            if key not in _SECTIONS[section]:
                fail("unknown key", section, key)

    def get(section, key, conv, default):
        if not cp.has_option(section, key):
            return default
        raw = cp.get(section, key).strip()
        try:
            value = conv(raw)
        except (ValueError, TypeError) as exc:
            fail(f"cannot parse {raw!r}: {exc}", section, key)
        for v in value if isinstance(value, tuple) else (value,):
            if isinstance(v, float) and not math.isfinite(v):
                fail("value must be finite", section, key)
        return value

    d = RunConfig()
    algebra = get("model", "algebra", str, d.algebra)
    if algebra not in CATALOG:
        fail(f"unknown algebra {algebra!r}; expected one of {', '.join(CATALOG)}", "model", "algebra")
    system = get("model", "system", str, d.system)
    if system not in SYSTEMS:
        fail(f"unknown system {system!r}", "model", "system")
    dim = build_algebra(algebra).dim
    rank = len(build_algebra(algebra).cartan_indices)
    a = get("model", "a", _floats, d.a_coeffs)
    c = get("model", "c", _floats, d.c_coeffs)
    axis = get("model", "axis", _floats, None)
    if system != "chiral":
        if rank == 0:
            fail(f"{algebra} has no root data; use system = chiral", "model", "system")
        for key, v in (("a", a), ("c", c)):
            if len(v) != rank:
                fail(f"expected {rank} Cartan coordinates, got {len(v)}", "model", key)
    if axis is not None:
        if algebra != "so3":
            fail("axis applies to so3 only", "model", "axis")
        if len(axis) != 3 or not any(axis):
            fail("axis must be a nonzero 3-vector", "model", "axis")

    N = get("grid", "n", int, d.N)
    if N < 32 or N & (N - 1):
        fail(f"N must be a power of two >= 32, got {N}", "grid", "N")
    Ls = get("grid", "ls", float, d.Ls)
    if Ls <= 0:
        fail("Ls must be positive", "grid", "Ls")

    T_end = get("time", "t_end", float, d.T_end)
    if T_end <= 0:
        fail("T_end must be positive", "time", "T_end")
    cfl = get("time", "cfl", float, d.cfl)
    if cfl <= 0:
        fail("cfl must be positive", "time", "cfl")
    dt = get("time", "dt", float, None)
    if dt is not None and dt <= 0:
        fail("dt must be positive", "time", "dt")

    itype = get("initial", "type", str, d.initial_type)
    if itype not in INITIAL_TYPES:
        fail(f"unknown initial type {itype!r}", "initial", "type")
    mu0 = get("initial", "mu0", _floats, None)
    gamma0 = get("initial", "gamma0", _floats, None)
    for key, v in (("mu0", mu0), ("gamma0", gamma0)):
        if v is not None and len(v) != dim:
            fail(f"expected {dim} coefficients, got {len(v)}", "initial", key)
    modes = []
    if cp.has_section("initial"):
        keys = sorted((k for k in cp["initial"] if re.fullmatch(r"mode\d+", k)), key=lambda k: int(k[4:]))
        for key in keys:
            parts = [p.strip() for p in cp.get("initial", key).split(",")]
            try:
                if len(parts) not in (4, 5) or parts[0] not in ("mu", "gamma"):
                    raise ValueError("expected 'mu|gamma, k, amplitude, component[, cos|sin]'")
                mode = FourierMode(parts[0], int(parts[1]), float(parts[2]), int(parts[3]),
                                   parts[4] if len(parts) == 5 else "cos")
                if mode.phase not in ("cos", "sin"):
                    raise ValueError("phase must be cos or sin")
                if not 0 <= mode.k <= N // 2 or not 0 <= mode.component < dim:
                    raise ValueError("mode or component out of range")
                if not math.isfinite(mode.amplitude):
                    raise ValueError("amplitude must be finite")
            except ValueError as exc:
                fail(str(exc), "initial", key)
            modes.append(mode)
    path = get("initial", "path", str, None)
    if itype == "file" and path is None:
        fail("type = file requires path", "initial", "path")

    cadence = get("output", "cadence", int, d.cadence)
    if cadence < 1:
        fail("cadence must be >= 1", "output", "cadence")
    lambdas = get("output", "lambda_samples", _floats, d.lambda_samples)
    if not lambdas:
        fail("need at least one lambda sample", "output", "lambda_samples")

    parallel = get("run", "parallel", int, d.parallel)
    if parallel < 1:
        fail("parallel must be >= 1", "run", "parallel")

    return RunConfig(
        algebra=algebra, system=system, r=get("model", "r", float, d.r), a_coeffs=a, c_coeffs=c,
        axis=axis, N=N, Ls=Ls, T_end=T_end, cfl=cfl, dt=dt, initial_type=itype,
        m=get("initial", "m", float, d.m), n=get("initial", "n", float, d.n), mu0=mu0, gamma0=gamma0,
        modes=tuple(modes), random_kmax=get("initial", "kmax", int, d.random_kmax),
        random_amplitude=get("initial", "amplitude", float, d.random_amplitude), initial_file=path,
        directory=get("output", "directory", str, d.directory), cadence=cadence,
        lambda_samples=lambdas, seed=get("run", "seed", int, d.seed), parallel=parallel,
    )


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


# ---------------------------------------------------------------------------
# serialization


def _fmt(x: float) -> str:
    return repr(float(x))


def _arr(xs) -> str:
    return ", ".join(_fmt(x) for x in xs)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; ``parse_config(serialize_config(c)) == c``."""
    lines = ["[model]", f"algebra = {cfg.algebra}", f"system = {cfg.system}", f"r = {_fmt(cfg.r)}",
             f"a = {_arr(cfg.a_coeffs)}", f"c = {_arr(cfg.c_coeffs)}"]
    if cfg.axis is not None:
        lines.append(f"axis = {_arr(cfg.axis)}")
    lines += ["", "[grid]", f"N = {cfg.N}", f"Ls = {_fmt(cfg.Ls)}",
              "", "[time]", f"T_end = {_fmt(cfg.T_end)}", f"cfl = {_fmt(cfg.cfl)}"]
    if cfg.dt is not None:
        lines.append(f"dt = {_fmt(cfg.dt)}")
    lines += ["", "[initial]", f"type = {cfg.initial_type}", f"m = {_fmt(cfg.m)}", f"n = {_fmt(cfg.n)}"]
    if cfg.mu0 is not None:
        lines.append(f"mu0 = {_arr(cfg.mu0)}")
    if cfg.gamma0 is not None:
        lines.append(f"gamma0 = {_arr(cfg.gamma0)}")
    lines += [f"kmax = {cfg.random_kmax}", f"amplitude = {_fmt(cfg.random_amplitude)}"]
    if cfg.initial_file is not None:
        lines.append(f"path = {cfg.initial_file}")
    for i, md in enumerate(cfg.modes, 1):
        lines.append(f"mode{i} = {md.field}, {md.k}, {_fmt(md.amplitude)}, {md.component}, {md.phase}")
    lines += ["", "[output]", f"directory = {cfg.directory}", f"cadence = {cfg.cadence}",
              f"lambda_samples = {_arr(cfg.lambda_samples)}",
              "", "[run]", f"seed = {cfg.seed}", f"parallel = {cfg.parallel}", ""]
    return "\n".join(lines)


def config_hash(cfg: RunConfig) -> str:
    """Provenance hash.  The thread count is excluded since it never changes results."""
    canonical = serialize_config(replace(cfg, parallel=1))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# initial data


def read_snapshot(path, algebra: str, Ls: float) -> StrandState:
    """Load a snapshot file written by ``simulate`` (``j, mu..., gamma...`` rows)."""
    dim = build_algebra(algebra).dim
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] != 1 + 2 * dim:
        raise ConfigError(f"{path}: expected {1 + 2 * dim} columns, got {data.shape[1]}")
    N = data.shape[0]
    return StrandState(algebra, Ls / N, data[:, 1:1 + dim], data[:, 1 + dim:])


def initial_state(cfg: RunConfig, base_dir: Path | None = None) -> StrandState:
    """Initial fields described by the ``[initial]`` section."""
    dim = cfg.dim
    if cfg.initial_type == "file":
        path = Path(cfg.initial_file)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        state = read_snapshot(path, cfg.algebra, cfg.Ls)
        if state.N != cfg.N:
            raise ConfigError(f"{path} has {state.N} grid points but N = {cfg.N}", "initial", "path")
        return state

    if cfg.initial_type == "equilibrium":
        if cfg.algebra == "so3":
            A = np.asarray(cfg.axis if cfg.axis is not None else (0.0, 0.0, 1.0))
            A = A / np.linalg.norm(A)
            mu0, g0 = cfg.m * A, cfg.n * A
        else:
            tbl = build_algebra(cfg.algebra)
            mu0, g0 = np.zeros(dim), np.zeros(dim)
            for i in tbl.cartan_indices[:1]:
                mu0[i], g0[i] = cfg.m, cfg.n
    else:
        mu0 = np.asarray(cfg.mu0 if cfg.mu0 is not None else np.zeros(dim), float)
        g0 = np.asarray(cfg.gamma0 if cfg.gamma0 is not None else np.zeros(dim), float)
    state = constant_state(cfg.algebra, mu0, g0, cfg.N, cfg.Ls)

    theta = 2.0 * math.pi * state.s / cfg.Ls
    if cfg.initial_type in ("equilibrium", "fourier_modes"):
        for md in cfg.modes:
            wave = np.cos(md.k * theta) if md.phase == "cos" else np.sin(md.k * theta)
            target = state.mu if md.field == "mu" else state.gamma
            target[:, md.component] += md.amplitude * wave
    elif cfg.initial_type == "random_modes":
        rng = np.random.default_rng(cfg.seed)
        for target in (state.mu, state.gamma):
            for k in range(1, cfg.random_kmax + 1):
                ca, sa = rng.normal(size=(2, dim)) * cfg.random_amplitude / k
                target += np.outer(np.cos(k * theta), ca) + np.outer(np.sin(k * theta), sa)
    return state


def with_overrides(cfg: RunConfig, **changes) -> RunConfig:
    names = {f.name for f in fields(RunConfig)}
    unknown = set(changes) - names
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)}")
    return replace(cfg, **changes)


DEFAULT_ZCR_CONFIG = """\
[model]
algebra = so3
system = compact
r = 0.3
a = 1.0
c = 0.5

[grid]
N = 128

[time]
T_end = 1.0
cfl = 0.4

[initial]
type = fourier_modes
mu0 = 0.0, 0.0, 1.0
gamma0 = 0.0, 0.0, 0.5
mode1 = mu, 1, 0.3, 0, cos
mode2 = mu, 2, 0.2, 1, sin
mode3 = gamma, 1, 0.1, 0, sin
mode4 = gamma, 1, 0.3, 1, cos
mode5 = mu, 1, 0.1, 2, cos
mode6 = gamma, 1, 0.2, 2, sin

[output]
directory = zcr_out
cadence = 1
"""
