"""
Experiment configuration: a nested YAML tree mapped onto frozen dataclasses.

``ExperimentConfig.from_dict(cfg.to_dict()) == cfg`` for every valid config,
and the YAML text written by :func:`dump_config` loads back to the same
config.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from .inequalities import Family, HypothesisError
from .solver import InitialData, Scheme, SolverConfig, default_snapshot_times
from .spectral import GevreyParams, GridSpec

ENV_VAR = "SQG_CONFIG"
U64_MAX = 2**64 - 1


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the dotted field name."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


class Experiment(str, Enum):
    SIMULATE = "simulate"
    PICARD = "picard"
    VERIFY = "verify"
    DECAY = "decay"
    LP_INSPECT = "lp-inspect"


@dataclass(frozen=True)
class GridSection:
    n: int = 128
    domain_length: float = 2.0 * math.pi
    dealias_fraction: float = 2.0 / 3.0


@dataclass(frozen=True)
class GevreySection:
    lam: float = 1.0
    alpha: float = 0.6
    kappa: float = 0.8
    beta: float = 0.2


@dataclass(frozen=True)
class SolverSection:
    dt: float = 0.02
    t_end: float = 1.0
    scheme: str = "IFRK4"
    snapshot_times: Optional[tuple[float, ...]] = None
    cfl_safety: float = 0.9
    linear_only: bool = False


@dataclass(frozen=True)
class InitialSection:
    amplitude: float = 1.0
    exponent: float = -1.5
    k0: float = 8.0
    target_norm: Optional[float] = 0.01


@dataclass(frozen=True)
class PicardSection:
    n_max: int = 20
    tol: float = 1e-10
    advection: str = "stage"


@dataclass(frozen=True)
class VerifySection:
    """``families`` is a list of family names or ``["all"]``; ``params`` maps family name to overrides."""

    families: tuple[str, ...] = ("all",)
    n_trials: int = 50
    params: dict = field(default_factory=dict)
    compare_n: Optional[int] = None
    axis: Optional[str] = None
    values: Optional[tuple] = None
    ceiling: float = 4.0


@dataclass(frozen=True)
class DecaySection:
    times: tuple[float, ...] = (0.5, 1.0)
    n_max: int = 10


@dataclass(frozen=True)
class LpInspectSection:
    snapshot: str = ""
    j_min: Optional[int] = None
    j_max: Optional[int] = None


_SECTIONS = {
    "grid": GridSection,
    "gevrey": GevreySection,
    "solver": SolverSection,
    "initial": InitialSection,
    "picard": PicardSection,
    "verify": VerifySection,
    "decay": DecaySection,
    "lp_inspect": LpInspectSection,
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: Experiment = Experiment.SIMULATE
    seed: int = 0
    output_dir: str = "out"
    supercritical: bool = True
    grid: GridSection = field(default_factory=GridSection)
    gevrey: GevreySection = field(default_factory=GevreySection)
    solver: SolverSection = field(default_factory=SolverSection)
    initial: InitialSection = field(default_factory=InitialSection)
    picard: PicardSection = field(default_factory=PicardSection)
    verify: VerifySection = field(default_factory=VerifySection)
    decay: DecaySection = field(default_factory=DecaySection)
    lp_inspect: LpInspectSection = field(default_factory=LpInspectSection)

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "experiment", Experiment(self.experiment))
        except ValueError:
            raise ConfigError("experiment", f"unknown experiment {self.experiment!r}") from None
        self.validate()

    # validation -----------------------------------------------------------------

    def validate(self) -> None:
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed <= U64_MAX:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.seed!r}")
        k = self.gevrey.kappa
        if self.supercritical and not 0 < k < 1:
            raise ConfigError("gevrey.kappa", f"supercritical runs need 0 < kappa < 1, got {k}")
        if not 0 < k <= 2:
            raise ConfigError("gevrey.kappa", f"must lie in (0, 2], got {k}")
        try:
            self.grid_spec()
        except (TypeError, ValueError) as exc:
            raise ConfigError("grid", str(exc)) from None
        if k <= 1:
            try:
                self.gevrey_params()
            except ValueError as exc:
                raise ConfigError("gevrey", str(exc)) from None
        try:
            self.solver_config()
        except ValueError as exc:
            raise ConfigError("solver", str(exc)) from None
        try:
            self.initial_data()
        except ValueError as exc:
            raise ConfigError("initial", str(exc)) from None
        if self.picard.advection not in ("stage", "interp"):
            raise ConfigError("picard.advection", f"must be 'stage' or 'interp', got {self.picard.advection!r}")
        if self.picard.n_max < 1:
            raise ConfigError("picard.n_max", "must be >= 1")
        if not self.picard.tol >= 0:
            raise ConfigError("picard.tol", "must be >= 0")
        for name in self.verify.families:
            if name != "all":
                try:
                    Family(name)
                except ValueError:
                    raise ConfigError("verify.families", f"unknown family {name!r}") from None
        for name in self.verify.params:
            try:
                Family(name)
            except ValueError:
                raise ConfigError("verify.params", f"unknown family {name!r}") from None
        if self.verify.n_trials < 1:
            raise ConfigError("verify.n_trials", "must be >= 1")
        if self.verify.axis not in (None, "j", "s", "resolution"):
            raise ConfigError("verify.axis", f"must be one of j, s, resolution, got {self.verify.axis!r}")
        if self.verify.axis is not None and not self.verify.values:
            raise ConfigError("verify.values", "a sweep axis needs values")
        if self.decay.n_max > 12 or self.decay.n_max < 1:
            raise ConfigError("decay.n_max", "must lie in [1, 12]")
        if any(t <= 0 or t > self.solver.t_end for t in self.decay.times):
            raise ConfigError("decay.times", "must lie in (0, solver.t_end]")

    # derived objects ---------------------------------------------------------------

    def grid_spec(self) -> GridSpec:
        g = self.grid
        return GridSpec(int(g.n), float(g.domain_length), float(g.dealias_fraction))

    def gevrey_params(self) -> GevreyParams:
        g = self.gevrey
        return GevreyParams.make(g.lam, g.alpha, g.kappa, g.beta)

    def snapshot_times(self) -> tuple[float, ...]:
        s = self.solver
        base = default_snapshot_times(s.t_end) if s.snapshot_times is None else tuple(s.snapshot_times)
        extra = tuple(t for t in self.decay.times if 0 < t <= s.t_end)
        return tuple(sorted(set(base) | set(extra)))

    def solver_config(self) -> SolverConfig:
        s = self.solver
        return SolverConfig(
            kappa=float(self.gevrey.kappa),
            dt=float(s.dt),
            t_end=float(s.t_end),
            scheme=Scheme(s.scheme),
            snapshot_times=self.snapshot_times(),
            cfl_safety=float(s.cfl_safety),
            linear_only=bool(s.linear_only),
        )

    def initial_data(self) -> InitialData:
        i = self.initial
        return InitialData(i.amplitude, i.exponent, i.k0, i.target_norm)

    def with_overrides(self, *, seed: Optional[int] = None, output_dir: Optional[str] = None) -> "ExperimentConfig":
        kw = {}
        if seed is not None:
            kw["seed"] = seed
        if output_dir is not None:
            kw["output_dir"] = output_dir
        return replace(self, **kw) if kw else self

    # serialization ---------------------------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "experiment": self.experiment.value,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "supercritical": self.supercritical,
        }
        for name in _SECTIONS:
            d[name] = _plain(asdict(getattr(self, name)))
        return d

    def hash_record(self) -> dict:
        """Everything that determines the numerical output (``output_dir`` excluded)."""
        d = self.to_dict()
        d.pop("output_dir")
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a mapping")
        top = {f.name for f in fields(cls)}
        for key in data:
            if key not in top:
                raise ConfigError(str(key), "unknown key")
        kw: dict[str, Any] = {}
        for key in ("experiment", "seed", "output_dir", "supercritical"):
            if key in data:
                kw[key] = data[key]
        for name, sec in _SECTIONS.items():
            raw = data.get(name) or {}
            if not isinstance(raw, dict):
                raise ConfigError(name, "must be a mapping")
            allowed = {f.name for f in fields(sec)}
            for key in raw:
                if key not in allowed:
                    raise ConfigError(f"{name}.{key}", "unknown key")
            vals = {k: _tuplify(v) if k != "params" else (v or {}) for k, v in raw.items()}
            try:
                kw[name] = sec(**vals)
            except TypeError as exc:
                raise ConfigError(name, str(exc)) from None
        return cls(**kw)


def _plain(x: Any) -> Any:
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Enum):
        return x.value
    return x


def _tuplify(x: Any) -> Any:
    return tuple(_tuplify(v) for v in x) if isinstance(x, list) else x


def load_config(path: Optional[Union[str, os.PathLike]] = None) -> ExperimentConfig:
    """Load from ``path``, or from the file named by ``SQG_CONFIG`` when ``path`` is None."""
    if path is None:
        path = os.environ.get(ENV_VAR)
        if not path:
            raise ConfigError("--config", f"no config file given and {ENV_VAR} is unset")
    p = Path(path)
    if not p.exists():
        raise ConfigError("--config", f"file not found: {p}")
    try:
        data = yaml.safe_load(p.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError("--config", f"not valid YAML: {exc}") from None
    return ExperimentConfig.from_dict(data or {})


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True, default_flow_style=False)


def save_config(cfg: ExperimentConfig, path: Union[str, os.PathLike]) -> None:
    Path(path).write_text(dump_config(cfg), encoding="utf-8")


__all__ = [
    "ConfigError",
    "Experiment",
    "ExperimentConfig",
    "HypothesisError",
    "load_config",
    "dump_config",
    "save_config",
    "ENV_VAR",
]
