"""
Convex restriction of the high-rho subproblem around an expansion point.

Variables are (rho, a, b) with a = (1-rho)*P0 and b = (1-rho)*P1. The nonconvex
pieces y = 1/rho, f = b/rho, g = TsW*rho*log2(A + k_sr*a/(1-rho)) and
w = TsW*(2rho-1)*log2(B + k_sd*a/(1-rho)) are replaced by y_lb <= y, f_ub >= f,
g_lb <= g and w_lb <= w. Each surrogate equals its original at the point and has
the same gradient there.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from relaybc.allocator.forms import LN2, LinkConstants, persp, persp_partials, safe_log2
from relaybc.allocator.models import SurrogatePoint
from relaybc.core.channel import ChannelState
from relaybc.core.config import NetworkConfig

RHO_EDGE = 1e-9
B_FLOOR_REL = 1e-9
RHO_LO = 0.5


class ScaFunctions:
    """The original (non-surrogate) functions of the high-rho subproblem."""

    def __init__(self, consts: LinkConstants):
        self.k = consts

    def y(self, rho):
        return 1.0 / rho

    def f(self, rho, b):
        return b / rho

    def g(self, rho, a):
        k = self.k
        return k.tsw * rho * safe_log2(k.A + k.k_sr * a / (1.0 - rho))

    def w(self, rho, a):
        k = self.k
        return k.tsw * (2.0 * rho - 1.0) * safe_log2(k.B + k.k_sd * a / (1.0 - rho))

    def e(self, rho, a, b):
        """TsW*(1-rho)*log2(B + (k_sd*a + k_rd*b)/(1-rho)); jointly concave, used as is."""
        k = self.k
        return k.tsw * persp(1.0 - rho, k.B * (1.0 - rho) + k.k_sd * a + k.k_rd * b)

    def e_grad(self, rho, a, b) -> np.ndarray:
        k = self.k
        d_tau, d_z = persp_partials(1.0 - rho, k.B * (1.0 - rho) + k.k_sd * a + k.k_rd * b)
        return k.tsw * np.array([-d_tau - k.B * d_z, k.k_sd * d_z, k.k_rd * d_z])

    def t(self, rho, a, b):
        """min(g, e + w): the relay-path throughput at (rho, a, b)."""
        return np.minimum(self.g(rho, a), self.e(rho, a, b) + self.w(rho, a))


def _h_g(rho: float) -> float:
    return (xlogy(rho, rho) - xlogy(rho, 1.0 - rho)) / LN2


def _h_g_prime(rho: float) -> float:
    return (np.log(rho) + 1.0 - np.log(1.0 - rho) + rho / (1.0 - rho)) / LN2


def _h_w(rho: float) -> float:
    sigma = 2.0 * rho - 1.0
    return (xlogy(sigma, sigma) - xlogy(sigma, 1.0 - rho)) / LN2


def _h_w_prime(rho: float) -> float:
    sigma = 2.0 * rho - 1.0
    return (2.0 * np.log(sigma) + 2.0 - 2.0 * np.log(1.0 - rho) + sigma / (1.0 - rho)) / LN2


def surrogate_point(
    rho_j: float, a_j: float, b_j: float, chan: ChannelState, cfg: NetworkConfig
) -> SurrogatePoint:
    """Evaluate y, f, g, w and their partial derivatives at (rho_j, a_j, b_j)."""
    k = LinkConstants.build(chan, cfg)
    fns = ScaFunctions(k)
    tsw = k.tsw
    share = 1.0 - rho_j
    sigma = 2.0 * rho_j - 1.0
    S = max(k.A * share + k.k_sr * a_j, 1e-300)
    V = max(k.B * share + k.k_sd * a_j, 1e-300)

    return SurrogatePoint(
        rho_j=rho_j,
        a_j=a_j,
        b_j=b_j,
        y=fns.y(rho_j),
        f=fns.f(rho_j, b_j),
        g=float(fns.g(rho_j, a_j)),
        w=float(fns.w(rho_j, a_j)),
        y_prime=-1.0 / rho_j**2,
        f_rho=-b_j / rho_j**2,
        f_b=1.0 / rho_j,
        f_rhorho=2.0 * b_j / rho_j**3,
        g_rho=float(
            tsw * safe_log2(S / share) + tsw * rho_j * a_j * k.k_sr / (share * S * LN2)
        ),
        g_a=tsw * rho_j * k.k_sr / (S * LN2),
        g_aa=-tsw * rho_j * k.k_sr**2 / (S**2 * LN2),
        w_rho=float(
            2.0 * tsw * safe_log2(V / share) + tsw * sigma * a_j * k.k_sd / (share * V * LN2)
        ),
        w_a=tsw * sigma * k.k_sd / (V * LN2),
        w_aa=-tsw * sigma * k.k_sd**2 / (V**2 * LN2),
    )


@dataclass(frozen=True)
class SurrogateBundle:
    """y_lb, f_ub, g_lb and w_lb built at one expansion point; all accept numpy arrays."""

    point: SurrogatePoint
    consts: LinkConstants
    b_floor: float

    @property
    def _theta(self) -> float:
        return 1.0 / (self.point.rho_j * self.point.b_j)

    @property
    def _f_fallback(self) -> bool:
        return self.point.b_j <= self.b_floor

    def y_lb(self, rho):
        pt = self.point
        return pt.y + pt.y_prime * (rho - pt.rho_j)

    def y_lb_grad(self, rho) -> np.ndarray:
        return np.array([self.point.y_prime, 0.0, 0.0])

    def f_ub(self, rho, b):
        if self._f_fallback:
            return b / RHO_LO
        theta = self._theta
        return 0.5 * (theta * b**2 + 1.0 / (theta * rho**2))

    def f_ub_grad(self, rho, b) -> np.ndarray:
        if self._f_fallback:
            return np.array([0.0, 0.0, 1.0 / RHO_LO])
        theta = self._theta
        return np.array([-1.0 / (theta * rho**3), 0.0, theta * b])

    def g_lb(self, rho, a):
        k, rho_j = self.consts, self._rho_g
        S = k.A * (1.0 - rho) + k.k_sr * a
        return k.tsw * (persp(rho, S) + _h_g(rho_j) + _h_g_prime(rho_j) * (rho - rho_j))

    def g_lb_grad(self, rho, a) -> np.ndarray:
        k = self.consts
        d_tau, d_z = persp_partials(rho, k.A * (1.0 - rho) + k.k_sr * a)
        d_rho = d_tau - k.A * d_z + _h_g_prime(self._rho_g)
        return k.tsw * np.array([d_rho, k.k_sr * d_z, 0.0])

    def w_lb(self, rho, a):
        k, rho_j = self.consts, self._rho_w
        V = k.B * (1.0 - rho) + k.k_sd * a
        return k.tsw * (
            persp(2.0 * rho - 1.0, V) + _h_w(rho_j) + _h_w_prime(rho_j) * (rho - rho_j)
        )

    def w_lb_grad(self, rho, a) -> np.ndarray:
        k = self.consts
        d_tau, d_z = persp_partials(2.0 * rho - 1.0, k.B * (1.0 - rho) + k.k_sd * a)
        d_rho = 2.0 * d_tau - k.B * d_z + _h_w_prime(self._rho_w)
        return k.tsw * np.array([d_rho, k.k_sd * d_z, 0.0])

    @property
    def _rho_g(self) -> float:
        return float(np.clip(self.point.rho_j, RHO_EDGE, 1.0 - RHO_EDGE))

    @property
    def _rho_w(self) -> float:
        # the tangent of h_w is vertical at rho = 1/2
        return float(np.clip(self.point.rho_j, 0.5 + RHO_EDGE, 1.0 - RHO_EDGE))


def sca_surrogates(pt: SurrogatePoint, chan: ChannelState, cfg: NetworkConfig) -> SurrogateBundle:
    """Build the surrogate bundle at an expansion point."""
    return SurrogateBundle(
        point=pt,
        consts=LinkConstants.build(chan, cfg),
        b_floor=B_FLOOR_REL * max(1.0, cfg.Pmax),
    )
