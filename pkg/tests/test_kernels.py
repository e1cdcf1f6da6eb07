import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonpaths import _kernels, _pykernels

_ckernels = pytest.importorskip("photonpaths._ckernels")

BACKENDS = [pytest.param(_pykernels, id="numpy"), pytest.param(_ckernels, id="cython")]


def random_program(rng, n_terms, n_params):
    lengths = rng.integers(0, 4, n_terms)
    indptr = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    indices = rng.integers(0, max(n_params, 1), indptr[-1]).astype(np.int64) if n_params else np.zeros(0, np.int64)
    if not n_params:
        indptr[:] = 0
    coeffs = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
    return coeffs, indptr, indices


def test_dispatch_backend():
    assert _kernels.BACKEND in ("cython", "numpy")


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.integers(0, 4), st.integers(1, 20))
def test_path_sum_agree(seed, n_terms, n_params, n_rows):
    rng = np.random.default_rng(seed)
    coeffs, indptr, indices = random_program(rng, n_terms, n_params)
    theta = rng.uniform(-7, 7, (n_rows, n_params))
    a = _pykernels.path_sum(coeffs, indptr, indices, theta)
    b = _ckernels.path_sum(coeffs, indptr, indices, theta)
    assert np.allclose(a, b, rtol=0, atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_path_sum_reference(backend):
    coeffs = np.array([1.0, 2j])
    indptr = np.array([0, 1, 3], dtype=np.int64)
    indices = np.array([0, 0, 1], dtype=np.int64)
    theta = np.array([[np.pi, 0.5]])
    expected = np.exp(1j * np.pi) + 2j * np.exp(1j * (np.pi + 0.5))
    assert backend.path_sum(coeffs, indptr, indices, theta)[0] == pytest.approx(expected)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(0, 500))
def test_sample_outcomes_agree(seed, k, n):
    rng = np.random.default_rng(seed)
    p = rng.uniform(0, 1, k)
    p[rng.integers(0, k)] = 0.0 if k > 1 else p[0]
    cdf = np.cumsum(p / p.sum())
    cdf[-1] = 1.0
    u = rng.random(n)
    a = _pykernels.sample_outcomes(cdf, u)
    b = _ckernels.sample_outcomes(cdf, u)
    assert np.array_equal(a, b)
    assert np.all((0 <= a) & (a < k))


@pytest.mark.parametrize("backend", BACKENDS)
def test_sample_outcomes_edges(backend):
    cdf = np.array([0.0, 0.5, 1.0])
    out = backend.sample_outcomes(cdf, np.array([0.0, 0.49, 0.5, 0.999999]))
    assert out.tolist() == [1, 1, 2, 2]


@given(st.integers(0, 2**32 - 1), st.integers(0, 300))
def test_tally_agree(seed, n):
    rng = np.random.default_rng(seed)
    trials = np.repeat(np.arange(n, dtype=np.int64), 2)
    arms = np.tile(np.array([0, 1], dtype=np.int64), n)
    codes = np.where(arms == 0, rng.integers(0, 2, 2 * n), rng.integers(2, 4, 2 * n)).astype(np.int64)
    a = _pykernels.tally_pairs(trials, arms, codes, 4)
    b = _ckernels.tally_pairs(trials, arms, codes, 4)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]) and a[3] == b[3] == 0
    assert a[0].sum() == n


@pytest.mark.parametrize("backend", BACKENDS)
def test_tally_detects_unpaired(backend):
    trials = np.array([0, 0, 1], dtype=np.int64)
    arms = np.array([0, 1, 0], dtype=np.int64)
    codes = np.array([0, 1, 0], dtype=np.int64)
    _, _, bad_trial, bad = backend.tally_pairs(trials, arms, codes, 2)
    assert bad and bad_trial == 1
