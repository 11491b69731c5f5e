"""Chemical potential, right-hand side assembly, and time stepping.

Physical mode advances

    u_t = div( M(u) grad( mu / g_reg(u) ) ) - beta * mu,
    mu  = -lap u + q'(u)/eps^2 + h(u) f_cl / eps,

by forward Euler (the production scheme).  Analysis mode advances the
nondegenerate variant

    g_th(u) (u_t + beta*mu) = div( M_th(u) grad( mu / g_th(u) ) ),
    mu = -lap u + q'(u) + (-lap)^(1/2) u,

whose energy is an exact Lyapunov function; g_th >= theta^m > 0 makes the
left-hand division safe there.  The mixed pseudospectral evaluation order
is fixed: pointwise w = mu/g, spectral grad w, pointwise flux M*grad w,
spectral divergence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import EnergyReport, energy
from .forces import climb_force_spectral
from .material import (ModelParams, climb_cutoff, double_well_prime,
                       mobility, stabilizer, theta_cutoff)
from .spectral import GridSpec, WaveNumbers, divergence, gradient, inverse, forward

__all__ = ["StabilityError", "SimState", "StepReport", "chemical_potential",
           "rhs", "step_forward_euler", "step_semi_implicit", "suggest_dt"]


class StabilityError(RuntimeError):
    """Raised when a step produces non-finite values."""


@dataclass(frozen=True)
class SimState:
    """Order-parameter field with its wavenumber tables and clock."""

    u: np.ndarray
    wn: WaveNumbers
    t: float = 0.0
    step: int = 0


@dataclass(frozen=True)
class StepReport:
    dt_used: float
    max_abs_rhs: float
    mean_u: float
    energy: EnergyReport | None


def chemical_potential(u: np.ndarray, p: ModelParams, wn: WaveNumbers,
                       f_total: np.ndarray | None = None) -> np.ndarray:
    """mu(u); a precomputed total climb force may be supplied."""
    uh = forward(u, wn)
    lap = inverse(-wn.k2 * uh, wn)
    if p.analysis:
        half = inverse(wn.kmag * uh, wn)
        return -lap + double_well_prime(u) + half
    if f_total is None:
        f_total = climb_force_spectral(u, p, wn).f_total
    return (-lap + double_well_prime(u) / p.eps ** 2
            + climb_cutoff(u, p) * f_total / p.eps)


def _rhs_full(u: np.ndarray, p: ModelParams, wn: WaveNumbers):
    """Right-hand side plus the intermediates (mu, f_d) it computed."""
    # blow-ups are detected explicitly below; keep numpy quiet on the way
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _rhs_unchecked(u, p, wn)


def _rhs_unchecked(u: np.ndarray, p: ModelParams, wn: WaveNumbers):
    uh = forward(u, wn)
    lap = inverse(-wn.k2 * uh, wn)

    if p.analysis:
        half = inverse(wn.kmag * uh, wn)
        mu = -lap + double_well_prime(u) + half
        g_th, m_th = theta_cutoff(u, p)
        w = mu / g_th
        wx, wy = gradient(w, wn)
        div = divergence(m_th * wx, m_th * wy, wn)
        if wn.dealias_mask is not None:
            div = inverse(np.where(wn.dealias_mask, forward(div, wn), 0.0), wn)
        r = div / g_th - p.beta * mu
        f_d = None
    else:
        pref = p.shear_g * p.b * p.b / (4.0 * (1.0 - p.nu))
        f_d = pref * inverse(wn.kmag * uh, wn)
        mu = (-lap + double_well_prime(u) / p.eps ** 2
              + climb_cutoff(u, p) * (f_d + p.f_app) / p.eps)
        g, g_reg = stabilizer(u, p)
        w = mu / g_reg
        wx, wy = gradient(w, wn)
        m = p.m0 * g
        div = divergence(m * wx, m * wy, wn)
        if wn.dealias_mask is not None:
            div = inverse(np.where(wn.dealias_mask, forward(div, wn), 0.0), wn)
        r = div - p.beta * mu

    if not np.all(np.isfinite(r)):
        raise StabilityError("non-finite right-hand side")
    return r, mu, f_d


def rhs(u: np.ndarray, p: ModelParams, wn: WaveNumbers) -> np.ndarray:
    """Time derivative of u for the configured mode."""
    return _rhs_full(u, p, wn)[0]


def step_forward_euler(state: SimState, dt: float, p: ModelParams,
                       with_energy: bool = True) -> tuple[SimState, StepReport]:
    """One forward-Euler step: u <- u + dt * rhs(u).

    Raises StabilityError (naming the step and max|rhs|) if the update
    is non-finite.  ``with_energy=False`` skips the energy part of the
    report for hot loops.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    try:
        r, _mu, _fd = _rhs_full(state.u, p, state.wn)
    except StabilityError as exc:
        raise StabilityError(f"step {state.step}: {exc}") from None
    u_new = state.u + dt * r
    max_rhs = float(np.max(np.abs(r)))
    if not np.all(np.isfinite(u_new)):
        raise StabilityError(
            f"step {state.step}: non-finite update, max|rhs| = {max_rhs:.3e}")
    new_state = SimState(u=u_new, wn=state.wn, t=state.t + dt, step=state.step + 1)
    rep = StepReport(
        dt_used=dt,
        max_abs_rhs=max_rhs,
        mean_u=float(np.mean(u_new)),
        energy=energy(u_new, p, state.wn) if with_energy else None,
    )
    return new_state, rep


def step_semi_implicit(state: SimState, dt: float, p: ModelParams,
                       stabilization: float | None = None,
                       with_energy: bool = True) -> tuple[SimState, StepReport]:
    """Optional stabilized scheme for long runs: the linear term
    -S*lap^2 u is treated implicitly in Fourier space, the rest explicitly.

    Not used by the acceptance runs (those are forward Euler).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    s = p.m0 if stabilization is None else stabilization
    try:
        r, _mu, _fd = _rhs_full(state.u, p, state.wn)
    except StabilityError as exc:
        raise StabilityError(f"step {state.step}: {exc}") from None
    wn = state.wn
    k4 = wn.k2 * wn.k2
    rh = forward(r, wn) + s * k4 * forward(state.u, wn)
    uh_new = (forward(state.u, wn) + dt * rh) / (1.0 + dt * s * k4)
    u_new = inverse(uh_new, wn)
    if not np.all(np.isfinite(u_new)):
        raise StabilityError(f"step {state.step}: non-finite semi-implicit update")
    new_state = SimState(u=u_new, wn=wn, t=state.t + dt, step=state.step + 1)
    rep = StepReport(
        dt_used=dt,
        max_abs_rhs=float(np.max(np.abs(r))),
        mean_u=float(np.mean(u_new)),
        energy=energy(u_new, p, wn) if with_energy else None,
    )
    return new_state, rep


def suggest_dt(p: ModelParams, grid: GridSpec, safety: float = 0.4) -> float:
    """Forward-Euler step heuristic.

    dt = safety / ( M0 (kmax^4 + C kmax^2 / eps^2) + beta (kmax^2 + C / eps^2) )

    with C = 8 and kmax the per-axis Nyquist wavenumber.  Analysis mode
    drops the eps scalings (eps enters as 1) and divides the mobility
    term by theta^(2m): the floored stabilizer divides both the flux
    argument and the time derivative, and per-step energy monotonicity
    (the point of that mode) needs the squared amplification.  This is a
    heuristic; the run loop halves dt on stability failures (up to 6
    times).
    """
    kmax = max(np.pi * grid.nx / grid.length_x, np.pi * grid.ny / grid.length_y)
    c_q = 8.0
    if p.analysis:
        eps = 1.0
        m_eff = p.m0 / p.theta ** (2 * p.m_exp)
    else:
        eps = p.eps
        m_eff = p.m0
    denom = (m_eff * (kmax ** 4 + c_q * kmax ** 2 / eps ** 2)
             + p.beta * (kmax ** 2 + c_q / eps ** 2))
    if denom <= 0:
        raise ValueError("m0 and beta are both zero: nothing evolves")
    return safety / denom
