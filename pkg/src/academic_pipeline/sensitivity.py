"""Local one-at-a-time sweeps, LHS/PRCC global sensitivity and the (a_F, K_F) congestion grid.

Every run here uses the vacancy-limited regime over the observed data window.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .core import VACANCY_LIMITED, ModelParams, _UNIT_FIELDS
from .data import DegreeSeries
from .errors import InfeasibleParamsError, PrccDegeneracyError
from .parallel import ordered_map
from .scenarios import DEFAULT_THRESHOLD, ScenarioSpec, first_threshold_year, require_feasible, run_scenario

# completion probabilities enter only through stock reconstruction, so they are not swept
SWEEP_PARAMS = ("alpha_F", "a_P", "a_F", "p_PF_max", "K_F", "p_GF", "p_GP")
OUTCOMES = ("final_F", "peak_F", "final_P", "peak_P", "terminal_pf_ratio")
DEFAULT_SEED = 20260119
DEFAULT_SPAN = 0.5
DEFAULT_OAT_POINTS = 21
DEFAULT_PRCC_SAMPLES = 1000
DEFAULT_AF_GRID = tuple(np.linspace(0.01, 0.08, 8).tolist())
DEFAULT_KF_GRID = tuple(np.linspace(2000.0, 8000.0, 7).tolist())

# residual norms below this fraction of the centred rank norm count as exactly explained
_RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class OutcomeSummary:
    final_F: float
    peak_F: float
    final_P: float
    peak_P: float
    terminal_pf_ratio: float  # NaN when terminal F is 0
    first_threshold_year: Optional[int]

    def get(self, name: str) -> float:
        return getattr(self, name)


def summarize(traj, threshold: float = DEFAULT_THRESHOLD) -> OutcomeSummary:
    F_end, P_end = float(traj.F[-1]), float(traj.P[-1])
    return OutcomeSummary(
        final_F=F_end,
        peak_F=float(np.max(traj.F)),
        final_P=P_end,
        peak_P=float(np.max(traj.P)),
        terminal_pf_ratio=P_end / F_end if F_end != 0 else float("nan"),
        first_threshold_year=first_threshold_year(traj, threshold),
    )


def _check_span(span):
    if not 0.0 < span < 1.0:
        raise ValueError(f"span must lie in (0, 1), got {span}")


def _check_param_name(name):
    if name not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {name!r}; expected one of {', '.join(SWEEP_PARAMS)}")


def _window_spec(base: ScenarioSpec, params: ModelParams) -> ScenarioSpec:
    return base.replace(params=params, regime=VACANCY_LIMITED, projection="none", horizon=0)


def _perturbed(params: ModelParams, changes: Mapping[str, float], override=False) -> ModelParams:
    try:
        new = params.replace(**changes)
    except ValueError as exc:
        raise InfeasibleParamsError(f"infeasible perturbation {dict(changes)}: {exc}") from None
    try:
        require_feasible(new, override)
    except InfeasibleParamsError as exc:
        raise InfeasibleParamsError(f"infeasible perturbation {dict(changes)}: {exc}", exc.failed) from None
    return new


def oat_values(params: ModelParams, name: str, points: int = DEFAULT_OAT_POINTS,
               span: float = DEFAULT_SPAN) -> np.ndarray:
    """Evenly spaced values over ``baseline * [1 - span, 1 + span]``, clipped to [0, 1] for probabilities."""
    _check_param_name(name)
    _check_span(span)
    b = getattr(params, name)
    values = np.linspace(b * (1.0 - span), b * (1.0 + span), points)
    if name in _UNIT_FIELDS:
        values = np.clip(values, 0.0, 1.0)
    return values


def oat_sweep(base: ScenarioSpec, param_name: str, values: Sequence[float], series: DegreeSeries,
              threshold: float = DEFAULT_THRESHOLD, skip_infeasible: bool = False, workers=None):
    """Vary one parameter with everything else held at ``base``.

    Returns ``[(value, OutcomeSummary), ...]`` in the order given. Infeasible
    values raise unless ``skip_infeasible`` is set, in which case they are
    dropped with a warning.
    """
    _check_param_name(param_name)
    specs = []
    for v in values:
        v = float(v)
        try:
            params = _perturbed(base.params, {param_name: v})
        except InfeasibleParamsError as exc:
            if not skip_infeasible:
                raise
            warnings.warn(f"skipping {param_name}={v}: {exc}", stacklevel=2)
            continue
        specs.append((v, _window_spec(base, params)))
    summaries = ordered_map(lambda s: summarize(run_scenario(s, series), threshold),
                            [s for _, s in specs], workers)
    return [(v, out) for (v, _), out in zip(specs, summaries)]


def default_ranges(params: ModelParams, names=SWEEP_PARAMS, span: float = DEFAULT_SPAN) -> dict:
    _check_span(span)
    out = {}
    for name in names:
        _check_param_name(name)
        b = getattr(params, name)
        lo, hi = b * (1.0 - span), b * (1.0 + span)
        if name in _UNIT_FIELDS:
            lo, hi = max(lo, 0.0), min(hi, 1.0)
        out[name] = (lo, hi)
    return out


def lhs_sample(ranges, n: int, seed: int) -> np.ndarray:
    """Latin hypercube sample of shape ``(n, len(ranges))``.

    Each column places exactly one point, uniformly, in each of the ``n``
    equal-width strata of its range. Columns are drawn in order from
    ``numpy.random.default_rng(seed)``: a permutation of the strata, then
    ``n`` uniform offsets.
    """
    bounds = list(ranges.values()) if isinstance(ranges, Mapping) else list(ranges)
    names = list(ranges.keys()) if isinstance(ranges, Mapping) else [str(i) for i in range(len(bounds))]
    if n < 2:
        raise ValueError(f"LHS needs n >= 2, got {n}")
    if not bounds:
        raise ValueError("LHS needs at least one parameter range")
    for name, (lo, hi) in zip(names, bounds):
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"invalid range for {name}: [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    out = np.empty((n, len(bounds)))
    for j, (lo, hi) in enumerate(bounds):
        strata = rng.permutation(n)
        unit = (strata + rng.random(n)) / n
        out[:, j] = lo + unit * (hi - lo)
    return out


@dataclass(frozen=True, eq=False)
class PrccResult:
    names: tuple
    coefficients: np.ndarray  # NaN where the partial correlation is undefined
    n: int
    ranges: Optional[tuple] = None
    seed: Optional[int] = None

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.coefficients.tolist()))


def prcc(samples, outcomes, names=None, *, ranges=None, seed=None) -> PrccResult:
    """Partial rank correlation of each column of ``samples`` with ``outcomes``.

    Ranks use average tie handling. For column ``j`` the ranks of ``j`` and of
    the outcome are each regressed (OLS with intercept) on the ranks of all
    other columns; the coefficient is the correlation of the two residuals.
    A residual with no variance leaves the coefficient undefined (NaN).
    """
    X = np.asarray(samples, dtype=np.float64)
    y = np.asarray(outcomes, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("samples must be (n, k) and outcomes length n")
    n, k = X.shape
    if n < k + 2:
        raise ValueError(f"PRCC needs at least {k + 2} samples for {k} parameters, got {n}")
    names = tuple(names) if names is not None else tuple(str(i) for i in range(k))
    for j in range(k):
        if np.all(X[:, j] == X[0, j]):
            raise PrccDegeneracyError(f"parameter column {names[j]!r} is constant")

    R = np.column_stack([rankdata(X[:, j]) for j in range(k)])
    ry = rankdata(y)
    design = np.column_stack([np.ones(n), R])
    if np.linalg.matrix_rank(design) < k + 1:
        raise PrccDegeneracyError("rank regression is singular: parameter ranks are linearly dependent")

    coefs = np.empty(k)
    for j in range(k):
        Z = np.delete(design, j + 1, axis=1)
        ex = _residual(Z, R[:, j])
        ey = _residual(Z, ry)
        if _negligible(ex, R[:, j]) or _negligible(ey, ry):
            coefs[j] = np.nan
            continue
        ex = ex - ex.mean()
        ey = ey - ey.mean()
        coefs[j] = float(np.clip(ex @ ey / math.sqrt((ex @ ex) * (ey @ ey)), -1.0, 1.0))
    rng_t = tuple(tuple(r) for r in ranges.values()) if isinstance(ranges, Mapping) else (
        tuple(tuple(r) for r in ranges) if ranges is not None else None)
    return PrccResult(names, coefs, n, rng_t, seed)


def _residual(Z, v):
    beta = np.linalg.lstsq(Z, v, rcond=None)[0]
    return v - Z @ beta


def _negligible(resid, v):
    scale = np.linalg.norm(v - v.mean())
    return scale == 0 or np.linalg.norm(resid) <= _RESIDUAL_RTOL * scale


def prcc_analysis(base: ScenarioSpec, series: DegreeSeries, ranges=None, n: int = DEFAULT_PRCC_SAMPLES,
                  seed: int = DEFAULT_SEED, outcome: str = "final_F", threshold: float = DEFAULT_THRESHOLD,
                  workers=None):
    """Sample parameters by LHS, simulate each draw, and compute PRCC against ``outcome``.

    Returns ``(PrccResult, samples, outcomes)``.
    """
    if outcome not in OUTCOMES:
        raise ValueError(f"unknown outcome {outcome!r}; expected one of {OUTCOMES}")
    ranges = dict(ranges) if ranges is not None else default_ranges(base.params)
    for name in ranges:
        _check_param_name(name)
    names = tuple(ranges)
    X = lhs_sample(ranges, n, seed)
    specs = [_window_spec(base, _perturbed(base.params, dict(zip(names, row.tolist())))) for row in X]
    y = np.array(ordered_map(lambda s: summarize(run_scenario(s, series), threshold).get(outcome),
                             specs, workers))
    return prcc(X, y, names, ranges=ranges, seed=seed), X, y


@dataclass(frozen=True, eq=False)
class HeatmapResult:
    a_F: np.ndarray
    K_F: np.ndarray
    terminal_ratio: np.ndarray  # shape (len(a_F), len(K_F)); NaN = absent
    first_year: np.ndarray  # float years, NaN = never exceeded or infeasible
    feasible: np.ndarray

    def rows(self):
        """Row-major ``(a_F, K_F, terminal_ratio, first_threshold_year)``."""
        out = []
        for i, af in enumerate(self.a_F.tolist()):
            for j, kf in enumerate(self.K_F.tolist()):
                year = self.first_year[i, j]
                out.append((af, kf, float(self.terminal_ratio[i, j]),
                            None if np.isnan(year) else int(year)))
        return out


def heatmap_sweep(aF_values, KF_values, base: ScenarioSpec, series: DegreeSeries,
                  threshold: float = DEFAULT_THRESHOLD, workers=None) -> HeatmapResult:
    """Terminal P/F ratio and first congestion year over an (a_F, K_F) grid.

    Infeasible cells are marked absent and the sweep continues.
    """
    aF = np.asarray(list(aF_values), dtype=np.float64)
    KF = np.asarray(list(KF_values), dtype=np.float64)
    if aF.size == 0 or KF.size == 0:
        raise ValueError("heatmap grids must be nonempty")
    cells = [(i, j) for i in range(aF.size) for j in range(KF.size)]

    def run_cell(ij):
        i, j = ij
        try:
            params = _perturbed(base.params, {"a_F": float(aF[i]), "K_F": float(KF[j])})
        except InfeasibleParamsError:
            return None
        return summarize(run_scenario(_window_spec(base, params), series), threshold)

    results = ordered_map(run_cell, cells, workers)
    ratio = np.full((aF.size, KF.size), np.nan)
    year = np.full((aF.size, KF.size), np.nan)
    feasible = np.zeros((aF.size, KF.size), dtype=bool)
    for (i, j), out in zip(cells, results):
        if out is None:
            continue
        feasible[i, j] = True
        ratio[i, j] = out.terminal_pf_ratio
        if out.first_threshold_year is not None:
            year[i, j] = out.first_threshold_year
    return HeatmapResult(aF, KF, ratio, year, feasible)
