"""Compiled and numpy kernels must agree."""

import numpy as np
import pytest

from hmmtrend import kernels

from .oracles import random_model

compiled = kernels.compiled_backend
py = kernels.python_backend

needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def _inputs(seed, T=40):
    rng = np.random.default_rng(seed)
    model = random_model(rng, int(rng.integers(1, 6)), int(rng.integers(1, 4)), sparse=seed % 2 == 1)
    obs = rng.integers(0, model.n_symbols, T).astype(np.int64)
    arrays = [np.ascontiguousarray(x) for x in (model.initial, model.transition, model.emission)]
    return model, obs, arrays


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


@needs_ext
@pytest.mark.parametrize("seed", range(25))
def test_forward_backward_xi_agree(seed):
    _, obs, (pi, A, B) = _inputs(seed)
    a1, c1 = compiled.forward_scaled(pi, A, B, obs)
    a2, c2 = py.forward_scaled(pi, A, B, obs)
    np.testing.assert_allclose(a1, a2, rtol=1e-12, atol=1e-300)
    np.testing.assert_allclose(c1, c2, rtol=1e-12)
    if np.all(c1 > 0):
        b1 = compiled.backward_scaled(A, B, obs, c1)
        b2 = py.backward_scaled(A, B, obs, c1)
        np.testing.assert_allclose(b1, b2, rtol=1e-12)
        np.testing.assert_allclose(
            compiled.xi_sum(a1, b1, c1, A, B, obs), py.xi_sum(a1, b1, c1, A, B, obs), rtol=1e-12
        )


@needs_ext
@pytest.mark.parametrize("seed", range(25))
def test_viterbi_agrees_exactly(seed):
    _, obs, (pi, A, B) = _inputs(seed)
    with np.errstate(divide="ignore"):
        logs = [np.log(x) for x in (pi, A, B)]
    p1, s1 = compiled.viterbi(*logs, obs)
    p2, s2 = py.viterbi(*logs, obs)
    np.testing.assert_array_equal(p1, p2)
    assert s1 == s2


@needs_ext
@pytest.mark.parametrize("carried", [False, True])
@pytest.mark.parametrize("seed", range(10))
def test_sampling_is_bit_identical(seed, carried):
    from hmmtrend.generator import _cdf_tables

    model, _, _ = _inputs(seed)
    cdf_A, last_A = _cdf_tables(model.transition)
    cdf_B, last_B = _cdf_tables(model.emission)
    u = np.random.default_rng(seed).random((500, 2))
    out1 = compiled.sample_path(cdf_A, cdf_B, last_A, last_B, 0, u, carried)
    out2 = py.sample_path(cdf_A, cdf_B, last_A, last_B, 0, u, carried)
    for x, y in zip(out1, out2):
        np.testing.assert_array_equal(x, y)


def test_draw_never_picks_zero_probability_entry():
    from hmmtrend.generator import _cdf_tables

    row = np.array([[0.0, 0.3, 0.0, 0.7, 0.0]])
    cdf, last = _cdf_tables(row)
    assert last[0] == 3
    u = np.array([[x, 0.0] for x in (0.0, 0.299999, 0.3, 0.999999, 1.0 - 1e-17)])
    B = np.ascontiguousarray([[1.0]] * 5)
    cdf_B, last_B = _cdf_tables(B)
    for backend in filter(None, (py, compiled)):
        states, _ = backend.sample_path(np.repeat(cdf, 5, axis=0), cdf_B, np.repeat(last, 5), last_B, 0, u, False)
        assert set(states.tolist()) <= {1, 3}
