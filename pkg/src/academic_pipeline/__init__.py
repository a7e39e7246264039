"""Discrete-time model of the academic pipeline (undergraduate, graduate, postdoc, faculty).

Upstream stocks are reconstructed from observed degree counts; postdoc and
faculty stocks evolve under either uncapped or vacancy-limited hiring.
"""
from .core import (
    REGIMES,
    UNCONSTRAINED,
    VACANCY_LIMITED,
    ModelParams,
    PipelineState,
    StepLedger,
    accumulation_predicates,
    allocate_hires,
    analytic_bound_U,
    candidate_supply_direct,
    candidate_supply_postdoc,
    feasibility_check,
    p_pf,
    p_ug,
    step_unconstrained,
    step_vacancy_limited,
    vacancies,
)
from .kernels import BACKEND

__version__ = "0.1.0"
