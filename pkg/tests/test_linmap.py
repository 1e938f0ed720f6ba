import numpy as np
import pytest
from scipy.stats import unitary_group

from relaybc.core import Allocation, NumericError, SearchSpaceError, default_config
from relaybc.linmap import (
    MappingMatrix,
    brute_force_eigen_search,
    build_mapping_matrix,
    logdet_hpd,
    numeric_logdet_rate,
    optimal_eigenvalues,
    relay_gain_rate,
)
from relaybc.throughput import link_snrs, rate_relay_combined


def test_optimal_eigenvalues():
    assert optimal_eigenvalues(5, 3).values == [1.0, 1.0, 1.0]
    assert optimal_eigenvalues(2, 6).values == [3.0, 3.0]
    assert optimal_eigenvalues(0, 6).values == []
    assert optimal_eigenvalues(4, 4).total == pytest.approx(4.0)


@pytest.mark.parametrize("M, N", [(5, 3), (4, 4), (2, 6), (1, 7)])
def test_mapping_matrix_structure(M, N):
    G = build_mapping_matrix(M, N)
    assert (G.rows, G.cols) == (N, M)
    eig = np.sort(np.linalg.eigvalsh(G.entries @ G.entries.conj().T))[::-1]
    expected = optimal_eigenvalues(M, N).values
    assert eig[: len(expected)] == pytest.approx(expected)
    assert np.allclose(eig[len(expected):], 0.0, atol=1e-10)


def test_mapping_matrix_rejects_wrong_power():
    with pytest.raises(NumericError):
        MappingMatrix(entries=2.0 * np.eye(3))


def test_logdet_hpd():
    assert logdet_hpd(np.diag([1.0, 2.0, 4.0])) == pytest.approx(np.log(8.0))
    with pytest.raises(NumericError):
        logdet_hpd(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NumericError):
        logdet_hpd(np.diag([1.0, -1.0]))
    with pytest.raises(NumericError):
        logdet_hpd(np.array([[np.inf]]))


def test_logdet_rate_matches_closed_form(chan, rng):
    for _ in range(25):
        M, N = (int(x) for x in rng.integers(1, 9, size=2))
        cfg = default_config(L=M + N)
        beta = float(rng.uniform(0.05, 1.0))
        P0, P1 = (float(p) for p in rng.uniform(0.0, 20.0, size=2))
        alloc = Allocation(M=M, N=N, P0=P0, P1=P1, beta=beta)
        numeric = numeric_logdet_rate(build_mapping_matrix(M, N), beta, P0, P1, chan, cfg)
        assert numeric == pytest.approx(rate_relay_combined(alloc, chan, cfg), rel=1e-9)


@pytest.mark.parametrize("M, N", [(6, 3), (3, 6)])
def test_rate_is_invariant_under_unitary_rotation(chan, M, N):
    cfg = default_config(L=M + N)
    G = build_mapping_matrix(M, N)
    U = unitary_group.rvs(N, random_state=7)
    V = unitary_group.rvs(M, random_state=11)
    rotated = MappingMatrix(entries=U @ G.entries @ V)
    base = numeric_logdet_rate(G, 0.5, 10.0, 5.0, chan, cfg)
    assert numeric_logdet_rate(rotated, 0.5, 10.0, 5.0, chan, cfg) == pytest.approx(base)


def test_uniform_profile_beats_skewed_profiles(chan, cfg):
    g_sd, _, g_rd = link_snrs(0.5, 10.0, 1e-4, chan)
    uniform = relay_gain_rate([2.0, 2.0], g_sd, g_rd, cfg.tsw, cfg.L)
    skewed = relay_gain_rate([[3.0, 1.0], [4.0, 0.0]], g_sd, g_rd, cfg.tsw, cfg.L)
    assert np.all(skewed < uniform)


@pytest.mark.parametrize("k, step", [(2, 0.05), (3, 0.1)])
def test_brute_force_search_finds_uniform_profile(chan, rng, k, step):
    M, N = k, 2 * k
    cfg = default_config(L=M + N)
    for _ in range(5):
        beta = float(rng.uniform(0.05, 1.0))
        P0, P1 = (float(p) for p in rng.uniform(0.1, 20.0, size=2))
        profile, _ = brute_force_eigen_search(M, N, beta, P0, P1, chan, cfg, step)
        assert np.max(np.abs(np.array(profile.values) - 2.0)) <= step + 1e-12
        assert profile.total == pytest.approx(N)


def test_brute_force_search_guards(chan, cfg):
    with pytest.raises(SearchSpaceError):
        brute_force_eigen_search(5, 5, 0.5, 10.0, 5.0, chan, cfg, 0.5)
    profile, value = brute_force_eigen_search(3, 0, 0.5, 10.0, 5.0, chan, cfg, 0.1)
    assert profile.values == [] and value == 0.0
