"""Constitutive functions and the model parameter record.

Two operating modes share one parameter record:

* ``physical`` -- the production model: double well q(u) = 2(1-u^2)^2
  scaled by 1/eps^2, stabilizer g(u) = (1-u^2)^2 regularized in
  denominators as sqrt(g^2 + e0^2), degenerate mobility M0*(1-u^2)^2, and
  the climb-force cutoff h(u) = H0*(1-u^2)^2.
* ``analysis`` -- the nondegenerate variant used for energy-decay checks:
  stabilizer and mobility floored at theta^m, no 1/eps scalings, no
  climb-force term in the chemical potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MODE_PHYSICAL = "physical"
MODE_ANALYSIS = "analysis"

__all__ = [
    "MODE_PHYSICAL",
    "MODE_ANALYSIS",
    "ModelParams",
    "calibrated_h0",
    "double_well",
    "double_well_prime",
    "stabilizer",
    "mobility",
    "theta_cutoff",
    "climb_cutoff",
]


def calibrated_h0(shear_g: float, nu: float, b: float) -> float:
    """Climb-force cutoff amplitude 52.65 * 2(1-nu) / (G b^2).

    52.65 is the empirical calibration constant that makes the diffuse
    loop generate the correct climb force for the default core width.
    """
    return 52.65 * 2.0 * (1.0 - nu) / (shear_g * b * b)


@dataclass(frozen=True)
class ModelParams:
    """All physical and numerical constants of the model.

    eps      core-width parameter (length), > 0
    beta     climb mobility (1/time), >= 0
    m0       pipe-diffusion mobility amplitude, >= 0 (0 disables self-climb)
    h0       climb-force cutoff amplitude, >= 0
    shear_g  shear modulus, > 0
    nu       Poisson ratio in (-1, 0.5)
    b        Burgers vector magnitude (length), > 0
    e0       denominator regularization, > 0
    theta    mobility floor parameter (analysis mode), > 0 there
    m_exp    stabilizer exponent (analysis mode), integer >= 2
    model_mode  "physical" or "analysis"
    f_app    constant applied climb force
    """

    eps: float
    beta: float = 0.0
    m0: float = 1.0
    h0: float = 0.0
    shear_g: float = 1.0
    nu: float = 0.3
    b: float = 2.0 * math.pi / 300.0
    e0: float = 0.005
    theta: float = 0.0
    m_exp: int = 2
    model_mode: str = MODE_PHYSICAL
    f_app: float = 0.0

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.m0 < 0:
            raise ValueError("m0 must be nonnegative")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.h0 < 0:
            raise ValueError("h0 must be nonnegative")
        if self.e0 <= 0:
            raise ValueError("e0 must be positive")
        if self.shear_g <= 0:
            raise ValueError("shear_g must be positive")
        if self.b <= 0:
            raise ValueError("b must be positive")
        if not (-1.0 < self.nu < 0.5):
            raise ValueError(f"nu must lie in (-1, 0.5), got {self.nu}")
        if self.model_mode not in (MODE_PHYSICAL, MODE_ANALYSIS):
            raise ValueError(f"unknown model_mode {self.model_mode!r}")
        if self.model_mode == MODE_ANALYSIS:
            if self.theta <= 0:
                raise ValueError("analysis mode requires theta > 0")
            if self.m_exp < 2:
                raise ValueError("analysis mode requires m_exp >= 2")

    @property
    def analysis(self) -> bool:
        return self.model_mode == MODE_ANALYSIS


def double_well(u):
    """q(u) = 2(1-u^2)^2, minima at u = +-1."""
    w = 1.0 - np.asarray(u) ** 2
    return 2.0 * w * w


def double_well_prime(u):
    """q'(u) = -8u(1-u^2)."""
    u = np.asarray(u)
    return -8.0 * u * (1.0 - u * u)


def stabilizer(u, p: ModelParams):
    """Return (g, g_reg): g(u) = (1-u^2)^2 and sqrt(g^2 + e0^2).

    The regularized value is used only where g appears in a denominator;
    g_reg >= e0 > 0 everywhere.
    """
    w = 1.0 - np.asarray(u) ** 2
    g = w * w
    return g, np.sqrt(g * g + p.e0 * p.e0)


def theta_cutoff(u, p: ModelParams):
    """Return (g_theta, M_theta): |1-u^2|^m floored at theta^m, and M0*g_theta."""
    if p.theta <= 0:
        raise ValueError("theta_cutoff requires theta > 0")
    w = np.abs(1.0 - np.asarray(u) ** 2)
    g_theta = np.where(w > p.theta, w, p.theta) ** p.m_exp
    return g_theta, p.m0 * g_theta


def mobility(u, p: ModelParams):
    """Diffusion mobility: M0*(1-u^2)^2, or the floored form in analysis mode."""
    if p.analysis:
        return theta_cutoff(u, p)[1]
    w = 1.0 - np.asarray(u) ** 2
    return p.m0 * w * w


def climb_cutoff(u, p: ModelParams):
    """h(u) = H0*(1-u^2)^2: confines the climb force to the core region."""
    w = 1.0 - np.asarray(u) ** 2
    return p.h0 * w * w
