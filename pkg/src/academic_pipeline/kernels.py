"""Trajectory loop backend, chosen once at import.

The compiled ``_ckernels`` extension is used when it was built; otherwise
the pure-Python ``_pykernels`` module. Set ``ACADEMIC_PIPELINE_PURE_PYTHON=1``
to force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("ACADEMIC_PIPELINE_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def vacancy_limited(G, P0, F0, params, impl=None):
    """Run the capped-hiring P/F recurrence over an exogenous graduate series.

    Returns arrays ``(P, F, V, c_dir, c_post, H, H_post, p_pf)``; stocks
    have ``len(G)`` entries, flows one fewer.
    """
    k = impl or _impl
    p = params
    return k.vacancy_limited(G, float(P0), float(F0), p.g_G, p.p_GP, p.p_GF, p.a_P, p.a_F,
                             p.p_PF_max, p.K_F, p.alpha_F)


def unconstrained(B, U0, G0, P0, F0, params, impl=None):
    """Run the four-stage uncapped recurrence driven by inflow ``B``.

    Returns ``(U, G, P, F, p_ug, p_pf)``; stocks have ``len(B) + 1`` entries.
    """
    k = impl or _impl
    p = params
    return k.unconstrained(B, float(U0), float(G0), float(P0), float(F0), p.g_U, p.a_U, p.g_G,
                           p.a_G, p.p_GP, p.p_GF, p.a_P, p.a_F, p.p_UG_max, p.K_G, p.p_PF_max,
                           p.K_F, p.alpha_F)
