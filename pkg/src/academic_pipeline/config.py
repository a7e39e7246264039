"""TOML run configuration. See ``configs/default.toml`` for an annotated example."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import UNCONSTRAINED, VACANCY_LIMITED, ModelParams
from .errors import ConfigError
from .scenarios import DEFAULT_THRESHOLD, NAMED_SCALES, ScenarioSpec
from .sensitivity import (
    DEFAULT_AF_GRID,
    DEFAULT_KF_GRID,
    DEFAULT_OAT_POINTS,
    DEFAULT_PRCC_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_SPAN,
    OUTCOMES,
    SWEEP_PARAMS,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_TOP_KEYS = {"data", "output_dir", "seed", "override_feasibility", "threads", "composition",
             "params", "scenarios", "sensitivity"}
_SCENARIO_KEYS = {"label", "regime", "inflow_scale", "scale", "projection", "horizon",
                  "initial_P", "initial_F", "params", "inflow"}
_SENS_KEYS = {"oat_params", "oat_points", "oat_span", "skip_infeasible", "prcc_params",
              "prcc_samples", "prcc_span", "prcc_outcome", "heatmap_a_F", "heatmap_K_F", "threshold"}


@dataclass
class SensitivityConfig:
    oat_params: tuple = SWEEP_PARAMS
    oat_points: int = DEFAULT_OAT_POINTS
    oat_span: float = DEFAULT_SPAN
    skip_infeasible: bool = False
    prcc_params: tuple = SWEEP_PARAMS
    prcc_samples: int = DEFAULT_PRCC_SAMPLES
    prcc_span: float = DEFAULT_SPAN
    prcc_outcome: str = "final_F"
    heatmap_a_F: tuple = DEFAULT_AF_GRID
    heatmap_K_F: tuple = DEFAULT_KF_GRID
    threshold: float = DEFAULT_THRESHOLD


def default_scenarios(params: ModelParams) -> list:
    specs = []
    for regime in (VACANCY_LIMITED, UNCONSTRAINED):
        for name, scale in NAMED_SCALES.items():
            label = name if regime == VACANCY_LIMITED else f"{name}_unconstrained"
            specs.append(ScenarioSpec(label=label, regime=regime, inflow_scale=scale, params=params))
    return specs


@dataclass
class RunConfig:
    data_path: Optional[Path] = None  # None: bundled synthetic sample
    params: ModelParams = field(default_factory=ModelParams)
    composition: str = "estimate"
    scenarios: list = field(default_factory=list)
    sensitivity: SensitivityConfig = field(default_factory=SensitivityConfig)
    output_dir: Path = Path("out")
    seed: int = DEFAULT_SEED
    override_feasibility: bool = False
    threads: int = 1
    source: Optional[Path] = None

    def __post_init__(self):
        if not self.scenarios:
            self.scenarios = default_scenarios(self.params)


def _unknown(keys, allowed, where):
    extra = sorted(set(keys) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


def _params(block, base: ModelParams, where) -> ModelParams:
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be a table")
    _unknown(block, set(ModelParams.field_names()), where)
    try:
        return base.replace(**block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _grid(value, where) -> tuple:
    if isinstance(value, dict):
        _unknown(value, {"start", "stop", "num"}, where)
        try:
            return tuple(np.linspace(float(value["start"]), float(value["stop"]), int(value["num"])).tolist())
        except KeyError as exc:
            raise ConfigError(f"{where} needs start, stop and num (missing {exc})") from None
    if isinstance(value, list) and value:
        return tuple(float(v) for v in value)
    raise ConfigError(f"{where} must be a nonempty list or a {{start, stop, num}} table")


def _names(value, where) -> tuple:
    if not isinstance(value, list):
        raise ConfigError(f"{where} must be a list of parameter names")
    for name in value:
        if name not in SWEEP_PARAMS:
            raise ConfigError(f"{where}: unknown parameter {name!r}; expected one of {', '.join(SWEEP_PARAMS)}")
    return tuple(value)


def _scenario(entry, params, where) -> ScenarioSpec:
    _unknown(entry, _SCENARIO_KEYS, where)
    kw = {k: entry[k] for k in ("label", "regime", "projection", "horizon", "initial_P", "initial_F", "inflow")
          if k in entry}
    if "scale" in entry:
        if entry["scale"] not in NAMED_SCALES:
            raise ConfigError(f"{where}: unknown named scale {entry['scale']!r}; expected one of {list(NAMED_SCALES)}")
        kw["inflow_scale"] = NAMED_SCALES[entry["scale"]]
        kw.setdefault("label", entry["scale"])
    if "inflow_scale" in entry:
        kw["inflow_scale"] = float(entry["inflow_scale"])
    if "params" in entry:
        params = _params(entry["params"], params, f"{where}.params")
    return ScenarioSpec(params=params, **kw)


def parse_config(doc: dict, base_dir: Path = Path(".")) -> RunConfig:
    _unknown(doc, _TOP_KEYS, "config")
    params = _params(doc.get("params", {}), ModelParams(), "[params]")
    composition = doc.get("composition", "estimate")
    if composition not in ("estimate", "params"):
        raise ConfigError("composition must be 'estimate' or 'params'")

    scenarios = []
    labels = set()
    for i, entry in enumerate(doc.get("scenarios", [])):
        spec = _scenario(entry, params, f"[[scenarios]] #{i + 1}")
        if spec.label in labels:
            raise ConfigError(f"duplicate scenario label {spec.label!r}")
        labels.add(spec.label)
        scenarios.append(spec)

    sens_doc = doc.get("sensitivity", {})
    _unknown(sens_doc, _SENS_KEYS, "[sensitivity]")
    sens = SensitivityConfig()
    if "oat_params" in sens_doc:
        sens.oat_params = _names(sens_doc["oat_params"], "sensitivity.oat_params")
    if "prcc_params" in sens_doc:
        sens.prcc_params = _names(sens_doc["prcc_params"], "sensitivity.prcc_params")
    for key, cast in (("oat_points", int), ("oat_span", float), ("prcc_samples", int),
                      ("prcc_span", float), ("threshold", float), ("skip_infeasible", bool)):
        if key in sens_doc:
            setattr(sens, key, cast(sens_doc[key]))
    for key in ("oat_span", "prcc_span"):
        if not 0.0 < getattr(sens, key) < 1.0:
            raise ConfigError(f"sensitivity.{key} must lie in (0, 1), got {getattr(sens, key)}")
    if sens.oat_points < 2:
        raise ConfigError(f"sensitivity.oat_points must be at least 2, got {sens.oat_points}")
    if sens.prcc_samples < 2:
        raise ConfigError(f"sensitivity.prcc_samples must be at least 2, got {sens.prcc_samples}")
    if not sens.threshold > 0:
        raise ConfigError(f"sensitivity.threshold must be positive, got {sens.threshold}")
    if "prcc_outcome" in sens_doc:
        if sens_doc["prcc_outcome"] not in OUTCOMES:
            raise ConfigError(f"sensitivity.prcc_outcome must be one of {OUTCOMES}")
        sens.prcc_outcome = sens_doc["prcc_outcome"]
    if "heatmap_a_F" in sens_doc:
        sens.heatmap_a_F = _grid(sens_doc["heatmap_a_F"], "sensitivity.heatmap_a_F")
    if "heatmap_K_F" in sens_doc:
        sens.heatmap_K_F = _grid(sens_doc["heatmap_K_F"], "sensitivity.heatmap_K_F")

    data = doc.get("data")
    seed = doc.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}")
    return RunConfig(
        data_path=(base_dir / data) if data else None,
        params=params,
        composition=composition,
        scenarios=scenarios,
        sensitivity=sens,
        output_dir=base_dir / doc.get("output_dir", "out"),
        seed=seed,
        override_feasibility=bool(doc.get("override_feasibility", False)),
        threads=int(doc.get("threads", 1)),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    cfg = parse_config(doc, path.parent)
    cfg.source = path
    return cfg
