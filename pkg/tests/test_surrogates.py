import numpy as np
import pytest

from relaybc.allocator import (
    LinkConstants,
    ScaFunctions,
    continuous_rates,
    fill_budget,
    sca_surrogates,
    surrogate_point,
)
from relaybc.allocator.forms import persp, persp_partials
from relaybc.core import default_config, min_backscatter_power


def _fd(fun, x, i, h=1e-6):
    step = np.zeros(len(x))
    step[i] = h * max(1.0, abs(x[i]))
    return (fun(*(x + step)) - fun(*(x - step))) / (2.0 * step[i])


@pytest.fixture
def expansion(chan, cfg):
    rho_j = 0.72
    a_j, b_j = (1.0 - rho_j) * 16.0, (1.0 - rho_j) * 9.0
    pt = surrogate_point(rho_j, a_j, b_j, chan, cfg)
    return pt, sca_surrogates(pt, chan, cfg), ScaFunctions(LinkConstants.build(chan, cfg))


def test_persp():
    assert persp(0.0, 3.0) == 0.0
    assert persp(0.5, 4.0) == pytest.approx(0.5 * np.log2(8.0))
    d_tau, d_z = persp_partials(0.5, 4.0)
    assert d_tau == pytest.approx((np.log(8.0) - 1.0) / np.log(2.0))
    assert d_z == pytest.approx(0.5 / (4.0 * np.log(2.0)))


def test_link_constants_reproduce_snr(chan, cfg):
    k = LinkConstants.build(chan, cfg)
    P0 = 12.0
    beta = 1.0 - k.p0_min / P0
    gamma_sr = beta * P0 * chan.g_sr**2 / chan.noise_bw
    gamma_sd = beta * P0 * chan.g_sr * chan.g_sd / chan.noise_bw
    assert k.A + k.k_sr * P0 == pytest.approx(1.0 + gamma_sr)
    assert k.B + k.k_sd * P0 == pytest.approx(1.0 + gamma_sd)
    assert k.tsw == pytest.approx(100.0)


def test_point_derivatives_match_finite_differences(expansion):
    pt, _, fns = expansion
    x_g = np.array([pt.rho_j, pt.a_j])
    x_f = np.array([pt.rho_j, pt.b_j])
    assert pt.g_rho == pytest.approx(_fd(fns.g, x_g, 0), rel=1e-5)
    assert pt.g_a == pytest.approx(_fd(fns.g, x_g, 1), rel=1e-5)
    assert pt.w_rho == pytest.approx(_fd(fns.w, x_g, 0), rel=1e-5)
    assert pt.w_a == pytest.approx(_fd(fns.w, x_g, 1), rel=1e-5)
    assert pt.f_rho == pytest.approx(_fd(fns.f, x_f, 0), rel=1e-5)
    assert pt.f_b == pytest.approx(_fd(fns.f, x_f, 1), rel=1e-5)
    assert pt.y_prime == pytest.approx(-1.0 / pt.rho_j**2)
    assert pt.f_rhorho == pytest.approx(2.0 * pt.b_j / pt.rho_j**3)
    assert pt.g_aa < 0.0 and pt.w_aa < 0.0


def test_surrogates_touch_at_expansion_point(expansion):
    pt, sur, fns = expansion
    rho, a, b = pt.rho_j, pt.a_j, pt.b_j
    assert sur.y_lb(rho) == pytest.approx(fns.y(rho), rel=1e-12)
    assert sur.f_ub(rho, b) == pytest.approx(fns.f(rho, b), rel=1e-12)
    assert sur.g_lb(rho, a) == pytest.approx(fns.g(rho, a), rel=1e-12)
    assert sur.w_lb(rho, a) == pytest.approx(fns.w(rho, a), rel=1e-12)


def test_surrogate_gradients_match_originals(expansion):
    pt, sur, _ = expansion
    rho, a, b = pt.rho_j, pt.a_j, pt.b_j
    assert sur.g_lb_grad(rho, a)[:2] == pytest.approx([pt.g_rho, pt.g_a], rel=1e-8)
    assert sur.w_lb_grad(rho, a)[:2] == pytest.approx([pt.w_rho, pt.w_a], rel=1e-8)
    assert sur.f_ub_grad(rho, b)[[0, 2]] == pytest.approx([pt.f_rho, pt.f_b], rel=1e-8)
    assert sur.y_lb_grad(rho)[0] == pytest.approx(pt.y_prime)


def test_bound_directions(expansion, chan, cfg, rng):
    _, sur, fns = expansion
    p0_min = min_backscatter_power(chan, cfg)
    rho = rng.uniform(0.51, 0.99, size=2000)
    a = (1.0 - rho) * rng.uniform(p0_min, cfg.Pmax, size=rho.size)
    b = (1.0 - rho) * rng.uniform(0.0, cfg.Pmax, size=rho.size)
    tol = 1e-9
    assert np.all(sur.y_lb(rho) <= fns.y(rho) + tol)
    assert np.all(sur.f_ub(rho, b) >= fns.f(rho, b) - tol)
    assert np.all(sur.g_lb(rho, a) <= fns.g(rho, a) + tol * np.abs(fns.g(rho, a)))
    assert np.all(sur.w_lb(rho, a) <= fns.w(rho, a) + tol * np.maximum(1.0, np.abs(fns.w(rho, a))))


def test_zero_relay_power_uses_linear_bound(chan, cfg):
    pt = surrogate_point(0.8, 0.2 * 10.0, 0.0, chan, cfg)
    sur = sca_surrogates(pt, chan, cfg)
    assert sur.f_ub(0.8, 1.0) == pytest.approx(2.0)
    assert sur.f_ub_grad(0.8, 1.0) == pytest.approx([0.0, 0.0, 2.0])


def test_half_split_keeps_surrogates_finite(chan, cfg):
    pt = surrogate_point(0.5, 0.5 * 10.0, 0.5 * 5.0, chan, cfg)
    sur = sca_surrogates(pt, chan, cfg)
    assert np.isfinite(sur.w_lb(0.6, 4.0))
    assert np.all(np.isfinite(sur.w_lb_grad(0.6, 4.0)))


def test_continuous_rates_branches(chan, cfg):
    k = LinkConstants.build(chan, cfg)
    high = continuous_rates(0.7, 15.0, 10.0, chan, cfg)
    sd = k.B + k.k_sd * 15.0
    expected = 0.3 * np.log2(sd + k.k_rd * 10.0) + 0.4 * np.log2(sd)
    assert high.r_d == pytest.approx(100.0 * expected)
    assert high.r_sr == pytest.approx(70.0 * np.log2(k.A + k.k_sr * 15.0))
    assert high.t == min(high.r_sr, high.r_d)

    low = continuous_rates(0.25, 15.0, 10.0, chan, cfg)
    assert low.r_d == pytest.approx(25.0 * np.log2(sd + 3.0 * k.k_rd * 10.0))
    assert not low.floored


def test_continuous_rates_flag_floored_logs(chan, cfg, caplog):
    rates = continuous_rates(0.7, 1.0, 0.0, chan, cfg)
    assert rates.floored
    assert "floored" in caplog.text


def test_fill_budget(chan):
    cfg = default_config(P=12.0)
    P0, P1 = fill_budget(0.7, 10.0, 5.0, cfg, 3.0)
    assert (P0, P1) == pytest.approx((10.0, 5.0 + 3.5 / 0.3))
    assert 0.7 * P0 + 0.3 * P1 == pytest.approx(12.0)

    P0, P1 = fill_budget(0.7, 15.0, 20.0, cfg, 3.0)
    assert (P0, P1) == pytest.approx((15.0, 5.0))

    # P0 is lifted to its floor, P1 capped at Pmax, and the leftover budget goes to P0
    P0, P1 = fill_budget(0.7, 1.0, 30.0, cfg, 3.0)
    assert (P0, P1) == pytest.approx((6.0 / 0.7, 20.0))
