import itertools
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from kpz_endpoint import lppsim
from kpz_endpoint.density import EndpointTable, symmetric_grid
from kpz_endpoint.errors import DataError


def enumerate_profile(w):
    # all up-right paths from (0,0) to each (n+y, n-y)
    n2 = w.shape[0] - 1
    out = []
    for i in range(n2 + 1):
        j = n2 - i
        best = None
        for steps in set(itertools.permutations("R" * i + "U" * j)):
            a = b = 0
            tot = w[0, 0]
            for s in steps:
                a, b = (a + 1, b) if s == "R" else (a, b + 1)
                tot += w[a, b]
            best = tot if best is None else max(best, tot)
        out.append(best)
    return np.array(out)


def test_profile_all_zero():
    assert lppsim.last_passage_profile(np.zeros((3, 3), dtype=int)).tolist() == [0, 0, 0]


def test_profile_worked_example():
    w = np.zeros((3, 3), dtype=int)
    w[0, 0], w[1, 0], w[0, 1] = 1, 5, 2
    # index i runs y = -n..n with G(i, 2n - i): L(0,2), L(1,1), L(2,0)
    assert lppsim.last_passage_profile(w).tolist() == [3, 6, 6]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_profile_matches_enumeration(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        w = rng.integers(0, 6, size=(2 * n + 1, 2 * n + 1))
        assert np.array_equal(lppsim.last_passage_profile(w), enumerate_profile(w))


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 4).flatmap(
        lambda n: st.tuples(
            st.lists(st.integers(0, 9), min_size=(2 * n + 1) ** 2, max_size=(2 * n + 1) ** 2),
            st.integers(0, (2 * n + 1) ** 2 - 1),
            st.integers(1, 5),
        )
    )
)
def test_profile_monotone_in_weights(data):
    vals, k, bump = data
    size = int(round(len(vals) ** 0.5))
    w = np.array(vals, dtype=np.int64).reshape(size, size)
    w2 = w.copy()
    w2.flat[k] += bump
    assert np.all(lppsim.last_passage_profile(w2) >= lppsim.last_passage_profile(w))


@pytest.mark.parametrize(
    "w", [np.zeros((2, 2), int), np.zeros((3, 4), int), np.zeros(3, int), np.full((3, 3), 0.5),
          -np.ones((3, 3), int)]
)
def test_profile_rejects_malformed(w):
    with pytest.raises(ValueError):
        lppsim.last_passage_profile(w)


@pytest.mark.parametrize("n", [1, 5, 70])
def test_fast_kernel_matches_reference(n):
    cfg = lppsim.LppConfig(n=n, samples=3, seed=11)
    for i in range(3):
        ref = lppsim.last_passage_profile(lppsim.draw_weights(cfg, i))
        assert np.array_equal(lppsim.sample_profile(cfg, i), ref)


def test_weight_mean_matches_geometric():
    for q in (0.3, 0.5, 0.8):
        cfg = lppsim.LppConfig(q=q, n=100, samples=1, seed=3)
        w = lppsim.draw_weights(cfg, 0)
        ii, jj = np.indices(w.shape)
        x = w[ii + jj <= 2 * cfg.n]
        mu = (1 - q) / q
        se = np.sqrt((1 - q) / q**2 / x.size)
        assert abs(x.mean() - mu) < 3 * se
        assert x.min() >= 0


def test_geometric_pmf():
    u = np.random.default_rng(5).random(200000)
    k = lppsim._geometric(u, 0.4)
    counts = np.bincount(k, minlength=30)[:30]
    pmf = 0.4 * 0.6 ** np.arange(30)
    assert sps.chisquare(counts[:12], pmf[:12] / pmf[:12].sum() * counts[:12].sum()).pvalue > 1e-3


def test_batch_deterministic_across_threads():
    cfg = lppsim.LppConfig(n=40, samples=200, seed=9)
    a = lppsim.sample_endpoints(cfg)
    b = lppsim.sample_endpoints(cfg, threads=4)
    assert np.array_equal(a.endpoints_y, b.endpoints_y)
    c = lppsim.sample_endpoints(replace(cfg, seed=10))
    assert not np.array_equal(a.endpoints_y, c.endpoints_y)


def test_batch_rescaling_and_symmetry():
    cfg = lppsim.LppConfig(n=60, samples=3000, seed=1)
    batch = lppsim.sample_endpoints(cfg)
    assert np.allclose(batch.rescaled, batch.endpoints_y * 60 ** (-2 / 3))
    assert np.all(np.abs(batch.endpoints_y) <= 60)
    se = batch.rescaled.std() / np.sqrt(cfg.samples)
    assert abs(batch.rescaled.mean()) < 4 * se
    scaled = lppsim.sample_endpoints(replace(cfg, c3=2.0))
    assert np.allclose(scaled.rescaled, 2.0 * batch.rescaled)


def test_argmax_tie_breaking():
    assert lppsim._argmax_y(np.array([5, 5, 5]), 1) == 0
    assert lppsim._argmax_y(np.array([5, 1, 5]), 1) == -1
    assert lppsim._argmax_y(np.array([1, 2, 3, 9, 9]), 2) == 1
    assert lppsim._argmax_y(np.array([9, 2, 3, 1, 9]), 2) == -2


def test_progress_callback():
    seen = []
    lppsim.sample_endpoints(lppsim.LppConfig(n=5, samples=50, seed=2), progress=seen.append)
    assert sum(seen) == 50


@pytest.mark.parametrize(
    "kw", [dict(q=0.0), dict(q=1.0), dict(n=0), dict(samples=0), dict(seed=-1), dict(c3=0.0)]
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        lppsim.LppConfig(**kw)


def test_excess_kurtosis():
    x = np.random.default_rng(0).normal(size=200000)
    assert lppsim.excess_kurtosis(x) == pytest.approx(0.0, abs=0.05)
    with pytest.raises(DataError):
        lppsim.excess_kurtosis(np.ones(10))


def inverse_cdf_sample(reference, size, seed):
    t, f = reference.t_grid, reference.values
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(t))])
    cum /= cum[-1]
    return np.interp(np.random.default_rng(seed).random(size), cum, t)


def test_ks_on_reference_resample(endpoint_default):
    x = inverse_cdf_sample(endpoint_default, 20000, 123)
    assert lppsim.ks_distance(x, endpoint_default) < 0.012


def test_ks_scale_invariant(endpoint_default):
    x = inverse_cdf_sample(endpoint_default, 5000, 7)
    base = lppsim.ks_distance(x, endpoint_default)
    ref2 = EndpointTable(3.0 * endpoint_default.t_grid, endpoint_default.values / 3.0, None)
    assert lppsim.ks_distance(3.0 * x, ref2) == pytest.approx(base, abs=1e-9)


def test_ks_detects_wrong_shape(endpoint_default):
    t = symmetric_grid(4.0, 0.02)
    uniform = EndpointTable(t, (np.abs(t) <= 1).astype(float) + 1e-12, None)
    x = inverse_cdf_sample(endpoint_default, 20000, 5)
    assert lppsim.ks_distance(x, uniform) > 0.03


def test_ks_degenerate_batch(endpoint_default):
    with pytest.raises(DataError):
        lppsim.ks_distance(np.zeros(100), endpoint_default)
