"""Compiled and pure-Python trajectory loops agree with each other and with the scalar steps."""
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from academic_pipeline import _pykernels, kernels
from academic_pipeline.core import PipelineState, step_unconstrained, step_vacancy_limited
from academic_pipeline.data import reconstruct_stocks

from strategies import feasible_params

try:
    from academic_pipeline import _ckernels
except ImportError:
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def test_vacancy_kernel_matches_scalar_steps(kernel_impl, baseline, sample):
    G = reconstruct_stocks(sample, baseline).G
    P, F, V, c_dir, c_post, H, H_post, ppf = kernels.vacancy_limited(G, 1500.0, 900.0, baseline, impl=kernel_impl)
    p, f = 1500.0, 900.0
    for k in range(len(G) - 1):
        p, f, led = step_vacancy_limited(float(G[k]), p, f, baseline)
        assert (P[k + 1], F[k + 1]) == (p, f)
        assert (V[k], c_dir[k], c_post[k], H[k], H_post[k], ppf[k]) == (
            led.vacancies, led.c_dir, led.c_post, led.hires_total, led.hires_post, led.p_pf_eff)


def test_unconstrained_kernel_matches_scalar_steps(kernel_impl, baseline, sample):
    B = np.asarray(sample.bachelors) * 1.3
    out = kernels.unconstrained(B, 50000.0, 12000.0, 3000.0, 2500.0, baseline, impl=kernel_impl)
    state = PipelineState(50000.0, 12000.0, 3000.0, 2500.0)
    for k, b in enumerate(B):
        state, led = step_unconstrained(state, float(b), baseline)
        assert (out[0][k + 1], out[1][k + 1], out[2][k + 1], out[3][k + 1]) == (state.U, state.G, state.P, state.F)
        assert (out[4][k], out[5][k]) == (led.p_ug_eff, led.p_pf_eff)


@needs_c
@settings(max_examples=50, deadline=None)
@given(feasible_params(), st.lists(st.floats(0, 1e6), min_size=1, max_size=60),
       st.floats(0, 1e6), st.floats(0, 1e6))
def test_backends_bit_identical(params, series, s0, s1):
    x = np.asarray(series)
    a = kernels.vacancy_limited(x, s0, s1, params, impl=_pykernels)
    b = kernels.vacancy_limited(x, s0, s1, params, impl=_ckernels)
    for u, v in zip(a, b):
        np.testing.assert_array_equal(u, v)
    a = kernels.unconstrained(x, s0, s1, s0, s1, params, impl=_pykernels)
    b = kernels.unconstrained(x, s0, s1, s0, s1, params, impl=_ckernels)
    for u, v in zip(a, b):
        np.testing.assert_array_equal(u, v)


def test_output_lengths(kernel_impl, baseline):
    G = np.linspace(1000, 2000, 7)
    out = kernels.vacancy_limited(G, 10.0, 20.0, baseline, impl=kernel_impl)
    assert [len(a) for a in out] == [7, 7, 6, 6, 6, 6, 6, 6]
    out = kernels.unconstrained(G, 1.0, 1.0, 1.0, 1.0, baseline, impl=kernel_impl)
    assert [len(a) for a in out] == [8, 8, 8, 8, 7, 7]


def test_single_year_series(kernel_impl, baseline):
    P, F, *flows = kernels.vacancy_limited(np.array([5.0]), 3.0, 4.0, baseline, impl=kernel_impl)
    assert P.tolist() == [3.0] and F.tolist() == [4.0]
    assert all(len(f) == 0 for f in flows)


@pytest.mark.parametrize("value,expected", [("1", "python"), ("0", None), ("", None)])
def test_environment_variable_selects_backend(value, expected):
    env = dict(os.environ, ACADEMIC_PIPELINE_PURE_PYTHON=value)
    out = subprocess.run([sys.executable, "-c", "import academic_pipeline.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    default = "cython" if _ckernels is not None else "python"
    assert out == (expected or default)
