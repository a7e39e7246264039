"""State/parameter types and the annual update maps of the pipeline model.

Stocks are real-valued head counts. All transition intensities are evaluated
at the current state before anything is updated, so every right-hand side
refers to year ``t`` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import NamedTuple

from .errors import PreconditionError

UNCONSTRAINED = "unconstrained"
VACANCY_LIMITED = "vacancy_limited"
REGIMES = (UNCONSTRAINED, VACANCY_LIMITED)

# fields constrained to [0, 1]
_UNIT_FIELDS = (
    "g_U", "a_U", "g_G", "a_G", "p_GP", "p_GF", "a_P", "a_F",
    "p_UG_max", "p_PF_max", "r_M", "r_D",
)


@dataclass(frozen=True)
class ModelParams:
    """Rates, placement fractions, capacities and competition constants.

    Defaults are the baseline calibration. ``p_UG_max`` has no published
    baseline; 0.5 is used.
    """

    g_U: float = 0.14
    a_U: float = 0.12
    g_G: float = 0.17
    a_G: float = 0.08
    p_GP: float = 0.45
    p_GF: float = 0.08
    a_P: float = 0.25
    a_F: float = 0.03
    p_UG_max: float = 0.5
    K_G: float = 25000.0
    p_PF_max: float = 0.18
    K_F: float = 4000.0
    alpha_F: float = 1.0
    r_M: float = 0.80
    r_D: float = 0.20

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{f.name} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        for name in _UNIT_FIELDS:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.K_G <= 0:
            raise ValueError(f"K_G must be positive, got {self.K_G}")
        if self.K_F <= 0:
            raise ValueError(f"K_F must be positive, got {self.K_F}")
        if self.alpha_F < 0:
            raise ValueError(f"alpha_F must be nonnegative, got {self.alpha_F}")
        if self.p_GP + self.p_GF > 1.0 + 1e-12:
            raise ValueError(f"p_GP + p_GF must not exceed 1, got {self.p_GP + self.p_GF}")
        if abs(self.r_M + self.r_D - 1.0) > 1e-9:
            raise ValueError(f"r_M + r_D must equal 1, got {self.r_M + self.r_D}")

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class PipelineState:
    U: float
    G: float
    P: float
    F: float
    t: int = 0

    def in_feasible_region(self) -> bool:
        return self.U >= 0 and self.G >= 0 and self.P >= 0 and self.F >= 0

    def total(self) -> float:
        return self.U + self.G + self.P + self.F


@dataclass(frozen=True)
class StepLedger:
    """Flow accounting for one annual step (persons or positions per year)."""

    inflow: float
    undergrad_completions: float
    grad_completions: float
    exit_U: float
    exit_G: float
    exit_P: float
    exit_F: float
    vacancies: float
    c_dir: float
    c_post: float
    hires_total: float
    hires_post: float
    hires_dir: float
    p_ug_eff: float
    p_pf_eff: float
    regime: str

    @property
    def exits(self) -> float:
        return self.exit_U + self.exit_G + self.exit_P + self.exit_F


class Hires(NamedTuple):
    total: float
    direct: float
    post: float


def _require_nonnegative(**values):
    for name, value in values.items():
        if not value >= 0 or not math.isfinite(value):
            raise PreconditionError(f"{name} must be a finite nonnegative number, got {value!r}")


def _require_state(state: PipelineState):
    _require_nonnegative(U=state.U, G=state.G, P=state.P, F=state.F)


def p_ug(G: float, params: ModelParams) -> float:
    """Undergraduate-to-graduate transition probability, saturating at the graduate capacity scale."""
    _require_nonnegative(G=G)
    return params.p_UG_max * max(0.0, 1.0 - G / params.K_G)


def p_pf(F: float, params: ModelParams) -> float:
    """Postdoc-to-faculty intensity, decreasing in the faculty stock."""
    _require_nonnegative(F=F)
    return params.p_PF_max / (1.0 + params.alpha_F * F / params.K_F)


def vacancies(F: float, params: ModelParams) -> float:
    _require_nonnegative(F=F)
    return params.a_F * F


def candidate_supply_direct(G: float, params: ModelParams) -> float:
    _require_nonnegative(G=G)
    return params.p_GF * params.g_G * G


def candidate_supply_postdoc(P: float, F: float, params: ModelParams) -> float:
    _require_nonnegative(P=P)
    return p_pf(F, params) * P


def allocate_hires(V: float, c_dir: float, c_post: float) -> Hires:
    """Cap hires at the vacancy count and split them in proportion to supply.

    With no candidates at all nothing is hired. When only one pool is
    nonempty the proportional formula sends every hire to that pool.
    """
    _require_nonnegative(V=V, c_dir=c_dir, c_post=c_post)
    supply = c_dir + c_post
    if supply <= 0.0:
        return Hires(0.0, 0.0, 0.0)
    total = V if V < supply else supply
    post = total * c_post / supply
    return Hires(total, total - post, post)


def step_unconstrained(state: PipelineState, inflow: float, params: ModelParams):
    """Advance the full four-stage system one year with uncapped hiring.

    Returns ``(next_state, ledger)``.
    """
    _require_state(state)
    _require_nonnegative(inflow=inflow)
    U, G, P, F = state.U, state.G, state.P, state.F
    pug = p_ug(G, params)
    ppf = p_pf(F, params)
    c_dir = params.p_GF * params.g_G * G
    c_post = ppf * P

    U1 = (1.0 - params.g_U - params.a_U) * U + inflow
    G1 = (1.0 - params.g_G - params.a_G) * G + pug * params.g_U * U
    P1 = (1.0 - ppf - params.a_P) * P + params.p_GP * params.g_G * G
    F1 = (1.0 - params.a_F) * F + c_dir + c_post

    ledger = StepLedger(
        inflow=inflow,
        undergrad_completions=params.g_U * U,
        grad_completions=params.g_G * G,
        exit_U=params.a_U * U,
        exit_G=params.a_G * G,
        exit_P=params.a_P * P,
        exit_F=params.a_F * F,
        vacancies=params.a_F * F,
        c_dir=c_dir,
        c_post=c_post,
        hires_total=c_dir + c_post,
        hires_post=c_post,
        hires_dir=c_dir,
        p_ug_eff=pug,
        p_pf_eff=ppf,
        regime=UNCONSTRAINED,
    )
    nxt = PipelineState(U1, G1, P1, F1, state.t + 1)
    _check_finite(nxt)
    return nxt, ledger


def step_vacancy_limited(G: float, P: float, F: float, params: ModelParams, *, U: float = 0.0):
    """Advance postdoc and faculty stocks one year with hires capped by vacancies.

    ``G`` (and optionally ``U``, recorded in the ledger only) are exogenous
    upstream stocks for year ``t``. Returns ``(P_next, F_next, ledger)``.
    """
    _require_nonnegative(G=G, P=P, F=F, U=U)
    ppf = p_pf(F, params)
    V = params.a_F * F
    c_dir = params.p_GF * params.g_G * G
    c_post = ppf * P
    hires = allocate_hires(V, c_dir, c_post)

    F1 = (1.0 - params.a_F) * F + hires.total
    P1 = P - hires.post - params.a_P * P + params.p_GP * params.g_G * G

    ledger = StepLedger(
        inflow=0.0,
        undergrad_completions=params.g_U * U,
        grad_completions=params.g_G * G,
        exit_U=params.a_U * U,
        exit_G=params.a_G * G,
        exit_P=params.a_P * P,
        exit_F=params.a_F * F,
        vacancies=V,
        c_dir=c_dir,
        c_post=c_post,
        hires_total=hires.total,
        hires_post=hires.post,
        hires_dir=hires.direct,
        p_ug_eff=p_ug(G, params),
        p_pf_eff=ppf,
        regime=VACANCY_LIMITED,
    )
    if not (math.isfinite(P1) and math.isfinite(F1)):
        raise FloatingPointError(f"non-finite downstream update: P={P1}, F={F1}")
    return P1, F1, ledger


def _check_finite(state: PipelineState):
    if not all(math.isfinite(v) for v in (state.U, state.G, state.P, state.F)):
        raise FloatingPointError(f"non-finite state produced: {state}")


class Accumulation(NamedTuple):
    dP_positive: bool
    dF_positive: bool
    dP_sign: int  # -1, 0 or +1
    dF_sign: int


def _sign(inflow: float, outflow: float) -> int:
    return (inflow > outflow) - (inflow < outflow)


def accumulation_predicates(state: PipelineState, params: ModelParams) -> Accumulation:
    """One-step accumulation conditions for the postdoc and faculty stocks.

    Each flag is true exactly when the corresponding unconstrained increment
    is strictly positive; ties count as no accumulation. The sign fields
    distinguish growth, balance and decline.
    """
    _require_state(state)
    ppf = p_pf(state.F, params)
    grad_out = params.g_G * state.G
    sP = _sign(params.p_GP * grad_out, (ppf + params.a_P) * state.P)
    sF = _sign(params.p_GF * grad_out + ppf * state.P, params.a_F * state.F)
    return Accumulation(sP > 0, sF > 0, sP, sF)


@dataclass(frozen=True)
class Condition:
    name: str
    group: str  # "positivity" or "boundedness"
    passed: bool
    detail: str


@dataclass(frozen=True)
class FeasibilityReport:
    conditions: tuple

    @property
    def positivity_ok(self) -> bool:
        return all(c.passed for c in self.conditions if c.group == "positivity")

    @property
    def boundedness_ok(self) -> bool:
        return all(c.passed for c in self.conditions if c.group == "boundedness")

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failures(self) -> list:
        return [c for c in self.conditions if not c.passed]

    def describe_failures(self) -> str:
        return "; ".join(f"{c.name} ({c.group}): {c.detail}" for c in self.failures())


def feasibility_check(params: ModelParams) -> FeasibilityReport:
    """Check the static sufficient conditions for positivity and boundedness.

    ``p_PF_max + a_P <= 1`` stands in for the per-step condition on
    ``p_pf(F_t) + a_P`` since ``p_pf`` never exceeds its ceiling.
    """
    p = params

    def cond(name, group, passed, lhs):
        return Condition(name, group, bool(passed), f"{lhs}")

    conds = (
        cond("g_U + a_U <= 1", "positivity", p.g_U + p.a_U <= 1.0, f"g_U + a_U = {p.g_U + p.a_U:g}"),
        cond("g_G + a_G <= 1", "positivity", p.g_G + p.a_G <= 1.0, f"g_G + a_G = {p.g_G + p.a_G:g}"),
        cond("p_PF_max + a_P <= 1", "positivity", p.p_PF_max + p.a_P <= 1.0,
             f"p_PF_max + a_P = {p.p_PF_max + p.a_P:g}"),
        cond("p_UG >= 0", "positivity", p.p_UG_max >= 0.0, f"p_UG_max = {p.p_UG_max:g}"),
        cond("p_PF >= 0", "positivity", p.p_PF_max >= 0.0 and p.alpha_F >= 0.0,
             f"p_PF_max = {p.p_PF_max:g}, alpha_F = {p.alpha_F:g}"),
        cond("g_U + a_U > 0", "boundedness", p.g_U + p.a_U > 0.0, f"g_U + a_U = {p.g_U + p.a_U:g}"),
        cond("g_G + a_G > 0", "boundedness", p.g_G + p.a_G > 0.0, f"g_G + a_G = {p.g_G + p.a_G:g}"),
        cond("a_P > 0", "boundedness", p.a_P > 0.0, f"a_P = {p.a_P:g}"),
        cond("a_F > 0", "boundedness", p.a_F > 0.0, f"a_F = {p.a_F:g}"),
    )
    return FeasibilityReport(conds)


def analytic_bound_U(U0: float, B_max: float, params: ModelParams) -> float:
    """Upper bound on the undergraduate stock under inflow at most ``B_max``."""
    _require_nonnegative(U0=U0, B_max=B_max)
    rate = params.g_U + params.a_U
    if rate <= 0.0:
        raise PreconditionError("g_U + a_U must be positive for the undergraduate bound")
    return U0 + B_max / rate


def comparison_bounds(U0, G0, P0, F0, B_max, params: ModelParams, steps: int):
    """Iterate the comparison inequalities with running suprema of upstream stocks.

    Returns per-step upper envelopes ``(U, G, P, F)`` as lists of length
    ``steps + 1``; any trajectory from the same start with inflow at most
    ``B_max`` stays below them.
    """
    p = params
    U, G, P, F = [U0], [G0], [P0], [F0]
    for _ in range(steps):
        U.append((1.0 - p.g_U - p.a_U) * U[-1] + B_max)
        G.append((1.0 - p.g_G - p.a_G) * G[-1] + p.g_U * U[-2])
        P.append((1.0 - p.a_P) * P[-1] + p.p_GP * p.g_G * G[-2])
        F.append((1.0 - p.a_F) * F[-1] + p.p_GF * p.g_G * G[-2] + P[-2])
    return U, G, P, F
