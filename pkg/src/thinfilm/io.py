"""
Run configuration and on-disk artifacts.

Configs are flat INI documents read with :mod:`configparser`::

    [run]
    mode = main
    N = 65
    snapshots = 21
    initial = cosine            ; or coeffs: 0.5, 0.25  (cosine series)

    [regularization]
    eps = 1e-2
    delta = 1e-1
    n_exp = 1

    [solver]
    T_final = 1e-3

Every key may be overridden from the environment as
``THINFILM_<SECTION>__<KEY>``, e.g. ``THINFILM_SOLVER__T_FINAL=1e-4``.
Unknown sections or keys are errors in strict mode.

Snapshots are plain text: ``#``-prefixed ``key = value`` header lines,
then one ``x u`` row per node written with ``%.17g`` so that every
float64 survives a write/read cycle exactly.
"""

import configparser
import csv
from dataclasses import dataclass, field, fields
import json
import logging
import os
from pathlib import Path

import numpy as np

from .continuation import ContinuationSchedule
from .errors import ConfigError, MissingKey, TypeMismatch, UnknownKey
from .grid import Field, RegularizationParams, build_grid
from .physical import PhysicalParams
from .stepper import SolverConfig

FORMAT_VERSION = 1
ENV_PREFIX = "THINFILM_"
MODES = ("main", "physical", "continuation", "inequalities", "mms")
INITIAL_PRESETS = ("cosine", "bump")

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class InitialCondition:
    """Named preset, or cosine-series coefficients u0 = sum_k c_k cos(k pi x)."""

    preset: str = "cosine"
    coeffs: tuple = ()

    def __post_init__(self):
        if self.coeffs:
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
            object.__setattr__(self, "preset", "coeffs")
        elif self.preset not in INITIAL_PRESETS:
            raise ConfigError(f"unknown initial preset {self.preset!r}", key="initial")

    def field(self, grid):
        x = grid.x
        if self.preset == "cosine":
            v = 0.5 + 0.25 * np.cos(np.pi * x)
        elif self.preset == "bump":
            v = 0.5 * (1 + np.cos(np.pi * x)) ** 2 + 0.01
        else:
            v = sum(c * np.cos(k * np.pi * x) for k, c in enumerate(self.coeffs))
        return Field(v, grid, 0.0)

    def text(self):
        if self.preset == "coeffs":
            return "coeffs: " + ", ".join(repr(c) for c in self.coeffs)
        return self.preset


@dataclass(frozen=True)
class RunConfig:
    mode: str
    N: int = 65
    params: object = None           # RegularizationParams or PhysicalParams
    solver: SolverConfig = field(default_factory=SolverConfig)
    initial: InitialCondition = field(default_factory=InitialCondition)
    out: str = "out"
    snapshots: int = 21
    seed: int = 0
    schedule: ContinuationSchedule = None
    n_functions: int = 50
    mms_sizes: tuple = (33, 65, 129, 257)
    mms_T: float = 1e-2
    mms_dt_factor: float = 1.0 / 16
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}", key="mode")
        build_grid(self.N)
        if self.snapshots < 2:
            raise ConfigError("snapshots must be >= 2", key="snapshots")
        if self.mode == "main" and not isinstance(self.params, RegularizationParams):
            raise MissingKey("main mode needs a [regularization] section", key="regularization")
        if self.mode == "physical" and not isinstance(self.params, PhysicalParams):
            raise MissingKey("physical mode needs a [physical] section", key="physical")
        if self.mode == "continuation" and self.schedule is None:
            object.__setattr__(self, "schedule", ContinuationSchedule.default())
        for n in self.mms_sizes:
            build_grid(n)
        if self.workers < 1:
            raise ConfigError("workers must be >= 1", key="workers")


# -- parsing -----------------------------------------------------------------

_SCHEMA = {
    "run": {"mode": str, "N": int, "snapshots": int, "initial": str, "out": str,
            "seed": int, "workers": int},
    "regularization": {"eps": float, "delta": float, "n_exp": float},
    "physical": {"a": float, "b": float, "c": float, "eps": float, "delta": float,
                 "two_u_term": bool},
    "solver": {f.name: f.type for f in fields(SolverConfig)},
    "continuation": {"levels": str, "n_exp": float},
    "inequalities": {"n_functions": int},
    "mms": {"sizes": str, "T": float, "dt_factor": float},
}


def _convert(section, key, raw, typ):
    raw = raw.strip()
    try:
        if typ is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ is int:
            v = float(raw)
            if v != int(v):
                raise ValueError(raw)
            return int(v)
        return typ(raw)
    except ValueError:
        raise TypeMismatch(f"[{section}] {key} = {raw!r} is not a valid {typ.__name__}",
                           key=f"{section}.{key}") from None


def _parser():
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    cp.optionxform = str
    return cp


def _env_overrides(cp, env):
    for name, value in env.items():
        if not name.startswith(ENV_PREFIX) or "__" not in name[len(ENV_PREFIX):]:
            continue
        sec, key = name[len(ENV_PREFIX):].split("__", 1)
        sec = sec.lower()
        schema = _SCHEMA.get(sec, {})
        # environment names are upper case; map back onto the schema spelling
        key = next((k for k in schema if k.lower() == key.lower()), key.lower())
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, key, value)


def parse_config(text, strict=True, env=None):
    """Parse and validate a config document; ``env`` defaults to ``os.environ``."""
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    _env_overrides(cp, os.environ if env is None else env)
    values = {}
    for sec in cp.sections():
        if sec not in _SCHEMA:
            if strict:
                raise UnknownKey(f"unknown section [{sec}]", key=sec)
            log.warning("ignoring unknown section [%s]", sec)
            continue
        for key, raw in cp.items(sec):
            if key not in _SCHEMA[sec]:
                if strict:
                    raise UnknownKey(f"unknown key [{sec}] {key}", key=f"{sec}.{key}")
                log.warning("ignoring unknown key [%s] %s", sec, key)
                continue
            values.setdefault(sec, {})[key] = _convert(sec, key, raw, _SCHEMA[sec][key])
    return _build(values)


def _need(sec, d, key):
    if key not in d:
        raise MissingKey(f"[{sec}] requires {key}", key=f"{sec}.{key}")
    return d[key]


def _parse_initial(text):
    text = text.strip()
    if text.startswith("coeffs:"):
        try:
            coeffs = tuple(float(c) for c in text[len("coeffs:"):].split(","))
        except ValueError:
            raise TypeMismatch(f"bad coefficient list {text!r}", key="run.initial") from None
        return InitialCondition(coeffs=coeffs)
    return InitialCondition(preset=text)


def _parse_levels(text):
    try:
        levels = tuple(tuple(float(v) for v in item.split(":")) for item in text.split(","))
    except ValueError:
        raise TypeMismatch(f"bad levels {text!r}", key="continuation.levels") from None
    if any(len(lv) != 2 for lv in levels):
        raise TypeMismatch("levels are eps:delta pairs", key="continuation.levels")
    return levels


def _build(values):
    run = values.get("run", {})
    kw = {"mode": _need("run", run, "mode")}
    for key in ("N", "snapshots", "out", "seed", "workers"):
        if key in run:
            kw[key] = run[key]
    if "initial" in run:
        kw["initial"] = _parse_initial(run["initial"])
    if "regularization" in values:
        r = values["regularization"]
        kw["params"] = RegularizationParams(_need("regularization", r, "eps"),
                                            _need("regularization", r, "delta"),
                                            r.get("n_exp", 1.0))
    if "physical" in values:
        if "params" in kw:
            raise ConfigError("give either [regularization] or [physical], not both",
                              key="physical")
        p = values["physical"]
        kw["params"] = PhysicalParams(*(_need("physical", p, k)
                                        for k in ("a", "b", "c", "eps", "delta")),
                                      two_u_term=p.get("two_u_term", True))
    kw["solver"] = SolverConfig(**values.get("solver", {}))
    if "continuation" in values:
        c = values["continuation"]
        n_exp = c.get("n_exp", 1.0)
        kw["schedule"] = (ContinuationSchedule(_parse_levels(c["levels"]), n_exp)
                          if "levels" in c else ContinuationSchedule.default(n_exp=n_exp))
    if "inequalities" in values:
        kw.update(values["inequalities"])
    if "mms" in values:
        m = values["mms"]
        if "sizes" in m:
            try:
                kw["mms_sizes"] = tuple(int(s) for s in m["sizes"].split(","))
            except ValueError:
                raise TypeMismatch(f"bad sizes {m['sizes']!r}", key="mms.sizes") from None
        if "T" in m:
            kw["mms_T"] = m["T"]
        if "dt_factor" in m:
            kw["mms_dt_factor"] = m["dt_factor"]
    return RunConfig(**kw)


def serialize_config(cfg):
    """Config document that :func:`parse_config` maps back onto ``cfg``."""
    cp = _parser()
    cp["run"] = {"mode": cfg.mode, "N": str(cfg.N), "snapshots": str(cfg.snapshots),
                 "initial": cfg.initial.text(), "out": cfg.out, "seed": str(cfg.seed),
                 "workers": str(cfg.workers)}
    p = cfg.params
    if isinstance(p, RegularizationParams):
        cp["regularization"] = {"eps": repr(p.eps), "delta": repr(p.delta),
                                "n_exp": repr(float(p.n_exp))}
    elif isinstance(p, PhysicalParams):
        cp["physical"] = {k: repr(float(getattr(p, k))) for k in ("a", "b", "c", "eps", "delta")}
        cp["physical"]["two_u_term"] = str(p.two_u_term).lower()
    cp["solver"] = {f.name: repr(getattr(cfg.solver, f.name)) if f.name != "jac_mode"
                    else cfg.solver.jac_mode for f in fields(SolverConfig)}
    if cfg.schedule is not None:
        cp["continuation"] = {
            "levels": ", ".join(f"{e!r}:{d!r}" for e, d in cfg.schedule.levels),
            "n_exp": repr(float(cfg.schedule.n_exp))}
    cp["inequalities"] = {"n_functions": str(cfg.n_functions)}
    cp["mms"] = {"sizes": ", ".join(str(n) for n in cfg.mms_sizes), "T": repr(cfg.mms_T),
                 "dt_factor": repr(cfg.mms_dt_factor)}
    lines = []
    for sec in cp.sections():
        lines.append(f"[{sec}]")
        lines.extend(f"{k} = {v}" for k, v in cp.items(sec))
        lines.append("")
    return "\n".join(lines)


def load_config(path, strict=True, env=None):
    return parse_config(Path(path).read_text(encoding="utf-8"), strict, env)


# -- snapshots ---------------------------------------------------------------

def _fmt(v):
    return "%.17g" % v


def write_snapshot(path, u, mode="main", params=None):
    """Write ``u`` with a provenance header; returns the path."""
    header = {"version": FORMAT_VERSION, "mode": mode, "N": u.grid.N, "t": _fmt(u.t)}
    if params is not None:
        for k, v in vars(params).items():
            header[k] = _fmt(v) if isinstance(v, float) else v
    lines = [f"# {k} = {v}" for k, v in header.items()]
    lines.extend(f"{_fmt(x)} {_fmt(v)}" for x, v in zip(u.grid.x, u.values))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_snapshot(path):
    """Returns ``(Field, header)``; header values are left as strings."""
    header, rows = {}, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].partition("=")
            header[k.strip()] = v.strip()
        elif line.strip():
            rows.append([float(s) for s in line.split()])
    data = np.array(rows)
    N = int(header.get("N", len(rows)))
    if data.shape != (N, 2):
        raise ValueError(f"snapshot {path} has {data.shape[0]} rows, header says N={N}")
    grid = build_grid(N, allow_small=True)
    if not np.array_equal(grid.x, data[:, 0]):
        raise ValueError(f"snapshot {path} nodes do not match a uniform {N}-node grid")
    return Field(data[:, 1], grid, float(header.get("t", 0.0))), header


# -- tables ------------------------------------------------------------------

def write_csv(path, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(columns)
        for row in rows:
            wr.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return Path(path)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
    return Path(path)
