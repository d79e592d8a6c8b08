"""Run configuration: strict YAML loading, validation and round-tripping.

A run file has up to five sections (all optional, every key defaulted):

    market:     mu0, sigma, r, alpha, epsilon, s0
    law:        kind (fixed | geometric | finite | geometric_tail)
                plus the field that kind needs: n, q, beta or head
    sim:        dt, horizon, seed, guard, max_reject
    experiment: n_paths, w0, sweep: {param, values}
    output:     dir, precision

Unknown keys are rejected at every level, values are validated against the
domain types at load time, and parse -> dump -> parse is the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import yaml

from .model import ModelParams
from .montecarlo import ExperimentConfig, LawSpec
from .simulate import SimConfig

__all__ = ["ConfigError", "RunConfig", "from_dict", "to_dict", "loads", "dumps", "load", "dump"]

DEFAULT_BETA = (0.1, 0.1, 0.2, 0.2, 0.2, 0.1, 0.1)

_SWEEP_PARAMS = ("mu0", "alpha")


class ConfigError(ValueError):
    """A run configuration that cannot be parsed or validated."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs: market, law, grid, replication, output.

    ``seed`` stays None until set explicitly (file or flag); experiment
    commands refuse to run without one, so results are never silently
    wall-clock seeded.
    """

    mu0: float = 0.1
    sigma: float = 0.15
    r: float = 0.02
    alpha: float = 1.0
    epsilon: float = 0.3
    s0: float = 1.0
    law: LawSpec = field(default_factory=lambda: LawSpec(kind="finite", beta=DEFAULT_BETA))
    dt: float = 1e-3
    horizon: float = 10.0
    seed: int | None = None
    guard: float | None = None
    max_reject: int = 100
    n_paths: int = 2000
    w0: float = 1.0
    sweep_param: str | None = None
    sweep_values: tuple[float, ...] = ()
    out_dir: str = "out"
    precision: int = 6

    def __post_init__(self) -> None:
        try:
            self.params()
            SimConfig(
                dt=self.dt,
                horizon=self.horizon,
                seed=self.seed if self.seed is not None else 0,
                guard=self.guard,
                max_reject=self.max_reject,
            )
            if self.n_paths < 2:
                raise ValueError(f"n_paths must be at least 2, got {self.n_paths}")
            if not (self.w0 > 0.0 and math.isfinite(self.w0)):
                raise ValueError(f"w0 must be positive and finite, got {self.w0}")
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not isinstance(self.precision, int) or self.precision < 1:
            raise ConfigError(f"output.precision must be a positive integer, got {self.precision!r}")
        if self.sweep_param is not None and self.sweep_param not in _SWEEP_PARAMS:
            raise ConfigError(
                f"experiment.sweep.param must be one of {_SWEEP_PARAMS}, got {self.sweep_param!r}"
            )
        if self.sweep_values:
            if self.sweep_param is None:
                raise ConfigError("experiment.sweep.values given without experiment.sweep.param")
            bad = [v for v in self.sweep_values if not math.isfinite(v)]
            if bad:
                raise ConfigError(f"experiment.sweep.values must be finite, got {bad}")
        elif self.sweep_param is not None:
            raise ConfigError("experiment.sweep.param given without experiment.sweep.values")

    def params(self) -> ModelParams:
        return ModelParams.from_log_band(
            mu0=self.mu0,
            sigma=self.sigma,
            r=self.r,
            alpha=self.alpha,
            epsilon=self.epsilon,
            s0=self.s0,
        )

    def experiment(self) -> ExperimentConfig:
        if self.seed is None:
            raise ConfigError("a seed is required for experiments: set sim.seed or pass --seed")
        return ExperimentConfig(
            mu0=self.mu0,
            sigma=self.sigma,
            r=self.r,
            alpha=self.alpha,
            epsilon=self.epsilon,
            s0=self.s0,
            law=self.law,
            dt=self.dt,
            horizon=self.horizon,
            seed=self.seed,
            guard=self.guard,
            max_reject=self.max_reject,
            n_paths=self.n_paths,
            w0=self.w0,
        )

    def override(self, **changes) -> "RunConfig":
        try:
            return replace(self, **changes)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


_TOP_KEYS = ("market", "law", "sim", "experiment", "output")
_MARKET_KEYS = ("mu0", "sigma", "r", "alpha", "epsilon", "s0")
_SIM_KEYS = ("dt", "horizon", "seed", "guard", "max_reject")
_EXPERIMENT_KEYS = ("n_paths", "w0", "sweep")
_SWEEP_KEYS = ("param", "values")
_OUTPUT_KEYS = ("dir", "precision")
_LAW_FIELD = {"fixed": "n", "geometric": "q", "finite": "beta", "geometric_tail": "head"}


def _require_mapping(obj, where: str) -> dict:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(obj).__name__}")
    return obj


def _reject_unknown(data: dict, allowed, where: str) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in {where}; allowed: {list(allowed)}")


def _as_float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    return value


def _parse_law(data) -> LawSpec:
    data = _require_mapping(data, "law")
    if not data:
        return LawSpec(kind="finite", beta=DEFAULT_BETA)
    _reject_unknown(data, ("kind",) + tuple(_LAW_FIELD.values()), "law")
    kind = data.get("kind")
    if kind not in _LAW_FIELD:
        raise ConfigError(f"law.kind must be one of {sorted(_LAW_FIELD)}, got {kind!r}")
    needed = _LAW_FIELD[kind]
    extra = sorted(k for k in data if k not in ("kind", needed))
    if extra:
        raise ConfigError(f"law kind {kind!r} takes only {needed!r}, got extra key(s) {extra}")
    if needed not in data:
        raise ConfigError(f"law kind {kind!r} requires key {needed!r}")
    value = data[needed]
    try:
        if kind == "fixed":
            return LawSpec(kind="fixed", n=_as_int(value, "law.n"))
        if kind == "geometric":
            return LawSpec(kind="geometric", q=_as_float(value, "law.q"))
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"law.{needed} must be a list of numbers, got {value!r}")
        weights = tuple(_as_float(v, f"law.{needed}[{i}]") for i, v in enumerate(value))
        if kind == "finite":
            return LawSpec(kind="finite", beta=weights)
        return LawSpec(kind="geometric_tail", head=weights)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"law: {exc}") from exc


def from_dict(data) -> RunConfig:
    """Build a validated RunConfig from a parsed mapping."""
    data = _require_mapping(data, "config")
    _reject_unknown(data, _TOP_KEYS, "config")

    market = _require_mapping(data.get("market"), "market")
    _reject_unknown(market, _MARKET_KEYS, "market")
    sim = _require_mapping(data.get("sim"), "sim")
    _reject_unknown(sim, _SIM_KEYS, "sim")
    experiment = _require_mapping(data.get("experiment"), "experiment")
    _reject_unknown(experiment, _EXPERIMENT_KEYS, "experiment")
    sweep = _require_mapping(experiment.get("sweep"), "experiment.sweep")
    _reject_unknown(sweep, _SWEEP_KEYS, "experiment.sweep")
    output = _require_mapping(data.get("output"), "output")
    _reject_unknown(output, _OUTPUT_KEYS, "output")

    kwargs = {}
    for key in _MARKET_KEYS:
        if key in market:
            kwargs[key] = _as_float(market[key], f"market.{key}")
    if "law" in data:
        kwargs["law"] = _parse_law(data["law"])
    for key in ("dt", "horizon"):
        if key in sim:
            kwargs[key] = _as_float(sim[key], f"sim.{key}")
    if sim.get("seed") is not None:
        kwargs["seed"] = _as_int(sim["seed"], "sim.seed")
    if sim.get("guard") is not None:
        kwargs["guard"] = _as_float(sim["guard"], "sim.guard")
    if "max_reject" in sim:
        kwargs["max_reject"] = _as_int(sim["max_reject"], "sim.max_reject")
    if "n_paths" in experiment:
        kwargs["n_paths"] = _as_int(experiment["n_paths"], "experiment.n_paths")
    if "w0" in experiment:
        kwargs["w0"] = _as_float(experiment["w0"], "experiment.w0")
    if sweep:
        if "param" not in sweep or "values" not in sweep:
            raise ConfigError("experiment.sweep needs both param and values")
        param = sweep["param"]
        if not isinstance(param, str):
            raise ConfigError(f"experiment.sweep.param must be a string, got {param!r}")
        values = sweep["values"]
        if not isinstance(values, (list, tuple)) or not values:
            raise ConfigError("experiment.sweep.values must be a nonempty list of numbers")
        kwargs["sweep_param"] = param
        kwargs["sweep_values"] = tuple(
            _as_float(v, f"experiment.sweep.values[{i}]") for i, v in enumerate(values)
        )
    if "dir" in output:
        out_dir = output["dir"]
        if not isinstance(out_dir, str) or not out_dir:
            raise ConfigError(f"output.dir must be a nonempty string, got {out_dir!r}")
        kwargs["out_dir"] = out_dir
    if "precision" in output:
        kwargs["precision"] = _as_int(output["precision"], "output.precision")
    return RunConfig(**kwargs)


def to_dict(rc: RunConfig) -> dict:
    """Mapping form of a RunConfig; from_dict(to_dict(rc)) == rc."""
    law = {"kind": rc.law.kind}
    field_name = _LAW_FIELD[rc.law.kind]
    value = getattr(rc.law, field_name)
    law[field_name] = list(value) if isinstance(value, tuple) else value
    experiment = {"n_paths": rc.n_paths, "w0": rc.w0}
    if rc.sweep_param is not None:
        experiment["sweep"] = {"param": rc.sweep_param, "values": list(rc.sweep_values)}
    return {
        "market": {key: getattr(rc, key) for key in _MARKET_KEYS},
        "law": law,
        "sim": {
            "dt": rc.dt,
            "horizon": rc.horizon,
            "seed": rc.seed,
            "guard": rc.guard,
            "max_reject": rc.max_reject,
        },
        "experiment": experiment,
        "output": {"dir": rc.out_dir, "precision": rc.precision},
    }


def loads(text: str) -> RunConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    return from_dict(data)


def dumps(rc: RunConfig) -> str:
    return yaml.safe_dump(to_dict(rc), sort_keys=False, default_flow_style=False)


def load(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        return loads(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def dump(rc: RunConfig, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(rc))
