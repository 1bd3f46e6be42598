"""Experiment configuration: flat INI sections, validated before any run.

Validation is collect-all: a bad file reports every problem at once instead
of failing on the first. Range checks are delegated to CutoffSpec so the
error text always cites the same invariant the library enforces.
"""

import configparser
import hashlib
import math
from dataclasses import dataclass, field, fields

from .cutoff import CutoffSpec

__all__ = ["ConfigError", "ExperimentConfig", "parse_config"]

_EXPERIMENTS = ("exact-suite", "uniqueness", "q-sweep", "boundary-layer", "simulate")

# section -> allowed keys; anything else is an unknown-key error.
# configparser lowercases option names, so the schema is lowercase too.
_SCHEMA = {
    "experiment": {"id", "out_dir", "seed"},
    "grid": {"s_min", "s_max", "n", "ratio"},
    "cutoff": {"r0", "r", "gamma"},
    "flow": {"ramps", "t", "dt", "sample_times"},
}


class ConfigError(ValueError):
    """Carries the full list of validation problems in .errors."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "simulate"
    out_dir: str = "out"
    seed: int = 0  # reserved for perturbation studies, unused by the numerics
    s_min: float | None = None  # None: derive S/4 from the cutoff at run time
    s_max: float | None = None  # None: derive max(8, 4 s0)
    n: int = 261
    ratio: float = 1.02
    r0: float = 0.55
    R_list: tuple = (0.8352702114112720,)
    gamma_list: tuple = (0.25,)
    ramps: tuple = (1e2, 1e3)
    T: float = 0.1
    dt: float = 1e-3
    sample_times: tuple = ()

    def __post_init__(self):
        errors = validate(self)
        if errors:
            raise ConfigError(errors)

    @property
    def config_hash(self) -> str:
        parts = []
        for f in fields(self):
            parts.append(f"{f.name}={getattr(self, f.name)!r}")
        return hashlib.sha1("|".join(parts).encode()).hexdigest()[:12]

    def grid_bounds(self, R: float) -> tuple:
        """(s_min, s_max) for a run at cut-off radius R, deriving the default
        truncation s_min = S/4, s_max = max(8, 4 s0) where not pinned."""
        S = -math.log(R)
        s0 = -math.log(self.r0)
        lo = self.s_min if self.s_min is not None else S / 4.0
        hi = self.s_max if self.s_max is not None else max(8.0, 4.0 * s0)
        return lo, hi

    def write_ini(self, path) -> None:
        cp = configparser.ConfigParser()
        cp["experiment"] = {"id": self.experiment, "out_dir": self.out_dir, "seed": str(self.seed)}
        grid = {"n": str(self.n), "ratio": repr(self.ratio)}
        if self.s_min is not None:
            grid["s_min"] = repr(self.s_min)
        if self.s_max is not None:
            grid["s_max"] = repr(self.s_max)
        cp["grid"] = grid
        cp["cutoff"] = {
            "r0": repr(self.r0),
            "R": ", ".join(repr(x) for x in self.R_list),
            "gamma": ", ".join(repr(x) for x in self.gamma_list),
        }
        flow = {
            "ramps": ", ".join(repr(x) for x in self.ramps),
            "T": repr(self.T),
            "dt": repr(self.dt),
        }
        if self.sample_times:
            flow["sample_times"] = ", ".join(repr(x) for x in self.sample_times)
        cp["flow"] = flow
        with open(path, "w") as fh:
            cp.write(fh)


def validate(cfg: ExperimentConfig) -> list:
    errors = []
    if cfg.experiment not in _EXPERIMENTS:
        errors.append(f"experiment id {cfg.experiment!r} not one of {_EXPERIMENTS}")
    if cfg.n < 16:
        errors.append("grid n must be at least 16")
    if cfg.ratio < 1.0:
        errors.append("grid ratio must be >= 1")
    if cfg.s_min is not None and cfg.s_min <= 0.0:
        errors.append("grid s_min must be positive")
    if cfg.s_max is not None and cfg.s_min is not None and cfg.s_max <= cfg.s_min:
        errors.append("grid s_max must exceed s_min")
    if cfg.T <= 0.0:
        errors.append("flow horizon T must be positive")
    if cfg.dt <= 0.0 or cfg.dt > cfg.T:
        errors.append("flow dt must lie in (0, T]")
    if any(k <= 0.0 for k in cfg.ramps):
        errors.append("ramps must be positive")
    if list(cfg.ramps) != sorted(cfg.ramps):
        errors.append("ramps must be nondecreasing")
    for t in cfg.sample_times:
        if not 0.0 < t <= cfg.T:
            errors.append(f"sample time {t:g} outside (0, T]")
    if not cfg.R_list:
        errors.append("cutoff R list must not be empty")
    if not cfg.gamma_list:
        errors.append("cutoff gamma list must not be empty")
    # range checks via CutoffSpec so messages cite the library invariant
    seen = set()
    for R in cfg.R_list:
        for gamma in cfg.gamma_list:
            try:
                CutoffSpec(cfg.r0, R, gamma)
            except ValueError as exc:
                msg = f"cutoff (r0={cfg.r0:g}, R={R:g}, gamma={gamma:g}): {exc}"
                if str(exc) not in seen:
                    errors.append(msg)
                    seen.add(str(exc))
    return errors


def _floats(raw: str) -> tuple:
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def parse_config(path) -> ExperimentConfig:
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError([f"config file {path} not found or unreadable"])
    errors = []
    for section in cp.sections():
        if section not in _SCHEMA:
            errors.append(f"unknown section [{section}]")
            continue
        unknown = set(cp[section]) - _SCHEMA[section]
        if unknown:
            errors.append(f"unknown keys in [{section}]: {', '.join(sorted(unknown))}")
    if errors:
        raise ConfigError(errors)

    kwargs = {}
    try:
        if cp.has_section("experiment"):
            sec = cp["experiment"]
            kwargs["experiment"] = sec.get("id", ExperimentConfig.experiment)
            kwargs["out_dir"] = sec.get("out_dir", ExperimentConfig.out_dir)
            kwargs["seed"] = sec.getint("seed", ExperimentConfig.seed)
        if cp.has_section("grid"):
            sec = cp["grid"]
            if "s_min" in sec:
                kwargs["s_min"] = sec.getfloat("s_min")
            if "s_max" in sec:
                kwargs["s_max"] = sec.getfloat("s_max")
            kwargs["n"] = sec.getint("n", ExperimentConfig.n)
            kwargs["ratio"] = sec.getfloat("ratio", ExperimentConfig.ratio)
        if cp.has_section("cutoff"):
            sec = cp["cutoff"]
            kwargs["r0"] = sec.getfloat("r0", ExperimentConfig.r0)
            if "r" in sec:
                kwargs["R_list"] = _floats(sec["r"])
            if "gamma" in sec:
                kwargs["gamma_list"] = _floats(sec["gamma"])
        if cp.has_section("flow"):
            sec = cp["flow"]
            if "ramps" in sec:
                kwargs["ramps"] = _floats(sec["ramps"])
            kwargs["T"] = sec.getfloat("t", ExperimentConfig.T)
            kwargs["dt"] = sec.getfloat("dt", ExperimentConfig.dt)
            if "sample_times" in sec:
                kwargs["sample_times"] = _floats(sec["sample_times"])
    except ValueError as exc:
        raise ConfigError([f"malformed value: {exc}"]) from exc
    return ExperimentConfig(**kwargs)
