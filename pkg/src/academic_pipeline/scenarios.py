"""Scenario construction, trajectory runs and derived workforce metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .core import (
    REGIMES,
    UNCONSTRAINED,
    VACANCY_LIMITED,
    ModelParams,
    PipelineState,
    StepLedger,
    feasibility_check,
    p_pf,
)
from .data import DegreeSeries, reconstruct_stocks
from .errors import ConfigError, InfeasibleParamsError

PROJECTIONS = ("none", "hold_last", "linear_trend")
TREND_WINDOW = 10
DEFAULT_THRESHOLD = 1.0
NAMED_SCALES = {"reduced": 0.75, "baseline": 1.0, "expanded": 1.25}

LEDGER_COLUMNS = tuple(f.name for f in fields(StepLedger) if f.name != "regime")


@dataclass(frozen=True)
class ScenarioSpec:
    label: str = "baseline"
    regime: str = VACANCY_LIMITED
    inflow_scale: float = 1.0
    projection: str = "none"
    horizon: int = 0
    initial_P: Optional[float] = None
    initial_F: Optional[float] = None
    params: ModelParams = field(default_factory=ModelParams)
    # explicit undergraduate inflow B(t), one value per table year (unconstrained regime only)
    inflow: Optional[tuple] = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ConfigError(f"scenario {self.label!r}: unknown regime {self.regime!r}; expected one of {REGIMES}")
        if self.projection not in PROJECTIONS:
            raise ConfigError(f"scenario {self.label!r}: unknown projection {self.projection!r}")
        if not (isinstance(self.inflow_scale, (int, float)) and self.inflow_scale > 0
                and math.isfinite(self.inflow_scale)):
            raise ConfigError(f"scenario {self.label!r}: inflow_scale must be positive, got {self.inflow_scale!r}")
        if not isinstance(self.horizon, int) or self.horizon < 0:
            raise ConfigError(f"scenario {self.label!r}: horizon must be a nonnegative integer")
        if self.horizon > 0 and self.projection == "none":
            raise ConfigError(f"scenario {self.label!r}: horizon {self.horizon} given but projection is 'none'")
        for name in ("initial_P", "initial_F"):
            v = getattr(self, name)
            if v is not None and not (v >= 0 and math.isfinite(v)):
                raise ConfigError(f"scenario {self.label!r}: {name} must be nonnegative, got {v!r}")
        if self.inflow is not None:
            object.__setattr__(self, "inflow", tuple(float(x) for x in self.inflow))
            if any(not (x >= 0 and math.isfinite(x)) for x in self.inflow):
                raise ConfigError(f"scenario {self.label!r}: inflow values must be nonnegative")

    def replace(self, **changes) -> "ScenarioSpec":
        return replace(self, **changes)


def build_scenario(series: DegreeSeries, spec: ScenarioSpec) -> DegreeSeries:
    """Scale every degree count and append projected years if requested.

    ``hold_last`` repeats the final observed row. ``linear_trend`` continues
    each channel from its last value along the least-squares slope of the
    final ten observed years, floored at zero.
    """
    s = spec.inflow_scale
    years = series.years
    cols = [series.bachelors * s, series.masters * s, series.doctorates * s]
    if spec.projection != "none" and spec.horizon > 0:
        h = spec.horizon
        steps = np.arange(1, h + 1, dtype=np.float64)
        extended = []
        for col in cols:
            if spec.projection == "hold_last":
                tail = np.full(h, col[-1])
            else:
                k = min(TREND_WINDOW, len(col))
                slope = np.polyfit(years[-k:].astype(np.float64), col[-k:], 1)[0]
                tail = np.maximum(col[-1] + slope * steps, 0.0)
            extended.append(np.concatenate([col, tail]))
        cols = extended
        years = np.concatenate([years, years[-1] + np.arange(1, h + 1)])
    return DegreeSeries(years, *cols)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Stocks for every year plus the flows of each annual step.

    ``flows`` maps each ledger column to an array one shorter than the
    stock arrays: entry ``k`` covers the step from year ``k`` to ``k + 1``.
    """

    label: str
    regime: str
    years: np.ndarray
    U: np.ndarray
    G: np.ndarray
    P: np.ndarray
    F: np.ndarray
    flows: dict
    params: ModelParams

    def __len__(self):
        return len(self.years)

    @property
    def states(self):
        return [PipelineState(float(u), float(g), float(p), float(f), t)
                for t, (u, g, p, f) in enumerate(zip(self.U, self.G, self.P, self.F))]

    @property
    def ledgers(self):
        cols = [self.flows[c] for c in LEDGER_COLUMNS]
        return [StepLedger(*(float(c[k]) for c in cols), regime=self.regime)
                for k in range(len(self.years) - 1)]

    @property
    def pf_ratio(self) -> np.ndarray:
        return _safe_divide(self.P, self.F)


def default_initial_F(params: ModelParams) -> float:
    return params.K_F


def default_initial_P(G0: float, F0: float, params: ModelParams) -> float:
    """Postdoc level at which inflow from graduates balances exits and transitions at ``(G0, F0)``."""
    return params.p_GP * params.g_G * G0 / (params.a_P + p_pf(F0, params))


def require_feasible(params: ModelParams, override: bool = False):
    report = feasibility_check(params)
    if not report.ok and not override:
        raise InfeasibleParamsError(
            f"parameters fail feasibility/boundedness conditions: {report.describe_failures()}",
            failed=[c.name for c in report.failures()],
        )
    return report


def run_scenario(spec: ScenarioSpec, series: DegreeSeries, override_feasibility: bool = False) -> Trajectory:
    """Simulate one scenario over the (scaled, possibly projected) degree table.

    Vacancy-limited runs take U and G straight from reconstruction and evolve
    only P and F. Unconstrained runs start from the first reconstructed year
    and step all four stocks, driven by ``B(t) = B_s(t) (g_U + a_U) / g_U``
    unless the scenario supplies its own inflow.
    """
    params = spec.params
    require_feasible(params, override_feasibility)
    table = build_scenario(series, spec)
    stocks = reconstruct_stocks(table, params)
    n = len(table)

    if spec.inflow is not None:
        if len(spec.inflow) != n:
            raise ConfigError(f"scenario {spec.label!r}: inflow has {len(spec.inflow)} values, table has {n} years")
        B = np.asarray(spec.inflow, dtype=np.float64) * spec.inflow_scale
    else:
        B = table.bachelors / params.g_U * (params.g_U + params.a_U)

    F0 = spec.initial_F if spec.initial_F is not None else default_initial_F(params)
    P0 = spec.initial_P if spec.initial_P is not None else default_initial_P(float(stocks.G[0]), F0, params)

    p = params
    if spec.regime == VACANCY_LIMITED:
        U, G = stocks.U, stocks.G
        P, F, V, c_dir, c_post, H, H_post, ppf = kernels.vacancy_limited(G, P0, F0, p)
        hires_dir = H - H_post
    else:
        U, G, P, F, _pug, ppf = kernels.unconstrained(B[:-1], stocks.U[0], stocks.G[0], P0, F0, p)
        V = p.a_F * F[:-1]
        c_dir = p.p_GF * p.g_G * G[:-1]
        c_post = ppf * P[:-1]
        H = c_dir + c_post
        H_post = c_post
        hires_dir = c_dir

    Ut, Gt, Pt, Ft = U[:-1], G[:-1], P[:-1], F[:-1]
    flows = {
        "inflow": B[:-1].copy(),
        "undergrad_completions": p.g_U * Ut,
        "grad_completions": p.g_G * Gt,
        "exit_U": p.a_U * Ut,
        "exit_G": p.a_G * Gt,
        "exit_P": p.a_P * Pt,
        "exit_F": p.a_F * Ft,
        "vacancies": V,
        "c_dir": c_dir,
        "c_post": c_post,
        "hires_total": H,
        "hires_post": H_post,
        "hires_dir": hires_dir,
        "p_ug_eff": p.p_UG_max * np.maximum(0.0, 1.0 - Gt / p.K_G),
        "p_pf_eff": ppf,
    }
    return Trajectory(spec.label, spec.regime, table.years.copy(), U, G, P, F, flows, params)


def _safe_divide(num, den) -> np.ndarray:
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    out = np.full(np.broadcast(num, den).shape, np.nan)
    np.divide(num, den, out=out, where=den != 0)
    return out


def market_pressure(ledger: StepLedger) -> Optional[float]:
    """Candidates per opening, ``(c_dir + c_post) / V``; None when there are no openings."""
    if ledger.vacancies == 0:
        return None
    return (ledger.c_dir + ledger.c_post) / ledger.vacancies


competition_intensity = market_pressure


def postdoc_share(ledger: StepLedger) -> Optional[float]:
    if ledger.hires_total == 0:
        return None
    return ledger.hires_post / ledger.hires_total


@dataclass(frozen=True, eq=False)
class MetricSeries:
    """Per-year metrics; NaN marks an absent value (zero denominator or no step)."""

    years: np.ndarray
    regime: str
    market_pressure: np.ndarray
    competition_intensity: np.ndarray
    postdoc_share: np.ndarray
    pf_ratio: np.ndarray
    index_P: np.ndarray
    index_F: np.ndarray


def _pad(values: np.ndarray, n: int) -> np.ndarray:
    out = np.full(n, np.nan)
    out[: len(values)] = values
    return out


def compute_metrics(traj: Trajectory) -> MetricSeries:
    """Derived metrics. Flow-based entries for the final year are absent.

    Candidates per opening appears as ``market_pressure`` for unconstrained
    runs and as ``competition_intensity`` for vacancy-limited runs.
    """
    n = len(traj)
    f = traj.flows
    ratio = _pad(_safe_divide(f["c_dir"] + f["c_post"], f["vacancies"]), n)
    absent = np.full(n, np.nan)
    return MetricSeries(
        years=traj.years.copy(),
        regime=traj.regime,
        market_pressure=ratio if traj.regime == UNCONSTRAINED else absent,
        competition_intensity=ratio if traj.regime == VACANCY_LIMITED else absent.copy(),
        postdoc_share=_pad(_safe_divide(f["hires_post"], f["hires_total"]), n),
        pf_ratio=traj.pf_ratio,
        index_P=_safe_divide(traj.P, traj.P[0]),
        index_F=_safe_divide(traj.F, traj.F[0]),
    )


def first_threshold_year(traj: Trajectory, threshold: float = DEFAULT_THRESHOLD) -> Optional[int]:
    """First calendar year with ``P / F`` strictly above ``threshold`` (years with F = 0 skipped)."""
    if not threshold > 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    ratio = traj.pf_ratio
    hits = np.nonzero(ratio > threshold)[0]  # NaN compares false
    return int(traj.years[hits[0]]) if hits.size else None


def run_many(specs: Sequence[ScenarioSpec], series: DegreeSeries, override_feasibility=False, workers=None):
    from .parallel import ordered_map

    return ordered_map(lambda s: run_scenario(s, series, override_feasibility), specs, workers)
