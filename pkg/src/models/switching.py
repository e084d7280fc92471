"""Switching functions chi(tau) and their autocorrelations.

Times are in units of T. The autocorrelation C(u) = int chi(s + u) chi(s) ds
feeds every stationary response; the increment C(u) - C(0) is kept
separately because the Minkowski finite-part integral divides it by u^2.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import special

from src.config import TRUNCATED_WINDOW
from src.detector_schema import QuadratureConfig
from src.models.quadrature import integrate_1d
from src.utils import require_finite, require_positive


def erfc(x: float) -> float:
    """Complementary error function."""
    return float(special.erfc(require_finite("x", x)))


@dataclass(frozen=True)
class GaussianSwitching:
    """chi(tau) = exp(-tau^2)."""

    name = "gaussian"

    def __call__(self, tau):
        tau = np.asarray(tau)
        return np.exp(-tau * tau)

    def fourier_power(self, k):
        """|chi~(k)|^2 with chi~(k) = int chi(tau) exp(-i k tau) dtau."""
        k = np.asarray(k)
        return math.pi * np.exp(-k * k / 2.0)

    def autocorrelation(self, u, cfg: QuadratureConfig = None):
        u = np.asarray(u)
        return math.sqrt(math.pi / 2.0) * np.exp(-u * u / 2.0)

    def autocorrelation_increment(self, u, cfg: QuadratureConfig = None):
        u = np.asarray(u)
        return math.sqrt(math.pi / 2.0) * np.expm1(-u * u / 2.0)

    def tau_halfwidth(self, cfg: QuadratureConfig) -> float:
        return cfg.support_halfwidth

    def lag_halfwidth(self, cfg: QuadratureConfig) -> float:
        """|u| beyond which C(u) is negligible."""
        return cfg.support_halfwidth

    def edges(self) -> Tuple[float, ...]:
        return ()


@dataclass(frozen=True)
class TruncatedGaussianSwitching:
    """Gaussian cut to [-a, a] with tanh-smoothed corners of width eps_uv.

    chi(tau) = [Theta(tau + a) - Theta(tau - a)] exp(-tau^2),
    Theta(z) = (1 + tanh(z / eps_uv)) / 2.
    """

    eps_uv: float
    window: float = TRUNCATED_WINDOW["halfwidth"]

    name = "truncated"

    def __post_init__(self):
        require_positive("eps_uv", self.eps_uv)
        require_positive("window", self.window)

    def __call__(self, tau):
        tau = np.asarray(tau)
        box = 0.5 * (
            np.tanh((tau + self.window) / self.eps_uv)
            - np.tanh((tau - self.window) / self.eps_uv)
        )
        return box * np.exp(-tau * tau)

    def tau_halfwidth(self, cfg: QuadratureConfig) -> float:
        padded = self.window + TRUNCATED_WINDOW["edge_padding"] * self.eps_uv
        return min(padded, cfg.support_halfwidth)

    def lag_halfwidth(self, cfg: QuadratureConfig) -> float:
        return 2.0 * self.tau_halfwidth(cfg)

    def edges(self) -> Tuple[float, ...]:
        return (-self.window, self.window)

    def _lagged_points(self, u: float) -> Tuple[float, ...]:
        return self.edges() + tuple(e - u for e in self.edges())

    def autocorrelation(self, u: float, cfg: QuadratureConfig) -> float:
        h = self.tau_halfwidth(cfg)
        u = abs(float(u))
        return float(
            integrate_1d(
                lambda s: self(s) * self(s + u), -h, h, cfg, self._lagged_points(u)
            )
        )

    def autocorrelation_increment(self, u: float, cfg: QuadratureConfig) -> float:
        """C(u) - C(0) = -1/2 int (chi(s + u) - chi(s))^2 ds, accurate as u -> 0."""
        h = self.tau_halfwidth(cfg)
        u = abs(float(u))
        if u == 0.0:
            return 0.0
        square = integrate_1d(
            lambda s: (self(s + u) - self(s)) ** 2,
            -h - u,
            h,
            cfg,
            self._lagged_points(u),
            abs_tol=cfg.abs_tol * min(1.0, u * u),
        )
        return -0.5 * float(square)
