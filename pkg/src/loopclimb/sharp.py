"""Sharp-interface companion solver.

Three pieces cross-validate the field simulator:

* the 1-D dislocation core profile U(rho), solved by pseudo-time
  relaxation of  U_t = U'' - q'(U) - h(U) f_core(rho)  with far fields
  U(-inf) = 1, U(+inf) = -1, where f_core is the singular self-stress,
  a Hilbert transform of U';
* the velocity-law coefficients alpha, lambda, eta, reduced to three
  profile integrals;
* a marker-point evolver for the limiting curve law
      v_n = -lambda d2/ds2 (alpha*kappa - H0 f0) + eta (alpha*kappa - H0 f0)
  with v_n positive along the inward normal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .material import ModelParams, climb_cutoff, double_well_prime

__all__ = ["CoreProfile", "VelocityCoeffs", "Curve", "CurveTopologyError",
           "hilbert_transform", "solve_core_profile", "compute_coefficients",
           "curvature_and_normals", "resample_equal_arclength",
           "has_self_intersection", "evolve_curve", "suggest_curve_dt", "circle",
           "ellipse"]

# exact value of Int[(1-U^2)^2 dU] from U=1 down to U=-1, any monotone profile
FLUX_INTEGRAL_EXACT = -16.0 / 15.0


class CurveTopologyError(RuntimeError):
    """Raised when the evolving curve self-intersects (merging is out of scope)."""


@dataclass(frozen=True)
class CoreProfile:
    """Relaxed core profile on a uniform rho grid.

    ``integrals`` holds (Int[(U')^2], Int[g(U)], Int[g(U) U']) computed by
    the trapezoid rule; the last one equals -16/15 for any converged
    monotone profile.
    """

    rho: np.ndarray
    u0: np.ndarray
    du0: np.ndarray
    residual_norm: float
    integrals: tuple[float, float, float]


@dataclass(frozen=True)
class VelocityCoeffs:
    alpha: float
    lam: float
    eta: float


def hilbert_transform(f: np.ndarray) -> np.ndarray:
    """Periodic spectral Hilbert transform, multiplier -i*sign(k).

    The sign is zeroed at the Nyquist mode so real input maps to real
    output.
    """
    n = len(f)
    fh = np.fft.fft(f)
    k = np.fft.fftfreq(n)
    mult = -1j * np.sign(k)
    if n % 2 == 0:
        mult[n // 2] = 0.0
    return np.fft.ifft(mult * fh).real


def _d1_4th(u: np.ndarray, h: float) -> np.ndarray:
    """4th-order first derivative; 2nd-order one-sided near the ends
    (the profile tails are flat there)."""
    d = np.empty_like(u)
    d[2:-2] = (u[:-4] - 8.0 * u[1:-3] + 8.0 * u[3:-1] - u[4:]) / (12.0 * h)
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
    d[1] = (u[2] - u[0]) / (2.0 * h)
    d[-2] = (u[-1] - u[-3]) / (2.0 * h)
    d[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)
    return d


def _d2_4th(u: np.ndarray, h: float) -> np.ndarray:
    """4th-order second derivative; 2nd-order 3-point next to the ends."""
    d = np.empty_like(u)
    d[2:-2] = (-u[:-4] + 16.0 * u[1:-3] - 30.0 * u[2:-2]
               + 16.0 * u[3:-1] - u[4:]) / (12.0 * h * h)
    d[1] = (u[0] - 2.0 * u[1] + u[2]) / (h * h)
    d[-2] = (u[-3] - 2.0 * u[-2] + u[-1]) / (h * h)
    d[0] = d[1]
    d[-1] = d[-2]
    return d


def core_self_force(du: np.ndarray, p: ModelParams) -> np.ndarray:
    """Singular self-stress across the core: (G b^2 / 4(1-nu)) * H[U'].

    Equals the principal-value integral (G b^2 / 4 pi (1-nu))
    Int[ U'(tau) / (rho - tau) ] via pi * Hilbert transform.  The profile
    derivative decays exponentially, so the periodic transform on the
    truncated window approximates the line transform.
    """
    pref = p.shear_g * p.b * p.b / (4.0 * (1.0 - p.nu))
    return pref * hilbert_transform(du)


def solve_core_profile(p: ModelParams, length: float = 18.0, n: int = 2048,
                       tol: float = 1e-8, max_iter: int = 2_000_000) -> CoreProfile:
    """Relax the core-profile equation  U'' = q'(U) + h(U) f_core.

    Explicit pseudo-time stepping (dt = 0.2 drho^2) from -tanh(2 rho)
    with the endpoints pinned at +-1, until the residual max-norm drops
    below ``tol``.  The self-force is refreshed every iteration.

    Raises RuntimeError on non-convergence or loss of monotonicity.
    """
    if length < 15.0:
        raise ValueError("length must be >= 15 (tail truncation)")
    if n < 1024:
        raise ValueError("n must be >= 1024")

    h = 2.0 * length / n
    rho = -length + h * np.arange(n)
    u = -np.tanh(2.0 * rho)
    u[0], u[-1] = 1.0, -1.0
    dt = 0.2 * h * h

    check_every = 200
    res_norm = np.inf
    for it in range(max_iter):
        du = _d1_4th(u, h)
        force = climb_cutoff(u, p) * core_self_force(du, p)
        resid = _d2_4th(u, h) - double_well_prime(u) - force
        resid[0] = resid[-1] = 0.0
        u += dt * resid
        u[0], u[-1] = 1.0, -1.0
        if it % check_every == 0:
            res_norm = float(np.max(np.abs(resid)))
            if not np.isfinite(res_norm):
                raise RuntimeError("core-profile relaxation diverged")
            if res_norm <= tol:
                break
    else:
        raise RuntimeError(
            f"core profile did not converge: residual {res_norm:.3e} after "
            f"{max_iter} iterations")

    du = _d1_4th(u, h)
    if np.any(np.diff(u) > 1e-10):
        raise RuntimeError("core profile lost monotonicity")

    g = (1.0 - u * u) ** 2
    integrals = (
        float(np.trapezoid(du * du, dx=h)),
        float(np.trapezoid(g, dx=h)),
        float(np.trapezoid(g * du, dx=h)),
    )
    return CoreProfile(rho=rho, u0=u, du0=du,
                       residual_norm=res_norm, integrals=integrals)


def compute_coefficients(profile: CoreProfile, p: ModelParams,
                         lhs_stabilizer: bool = True) -> VelocityCoeffs:
    """Velocity-law coefficients from the profile integrals.

    With ``lhs_stabilizer`` (the model whose time derivative carries the
    stabilizer factor):

        alpha = -Int[(U')^2] / Int[g U'],
        lambda = -M0 Int[g] / Int[g U'],   eta = -beta Int[g] / Int[g U'].

    Without it (the variant the field solver time-steps):

        lambda = M0 Int[g] / 2,            eta = beta Int[g] / 2,

    with the same alpha.
    """
    grad_sq, stab, flux = profile.integrals
    if flux >= 0 or grad_sq <= 0 or stab <= 0:
        raise RuntimeError(f"degenerate profile integrals: {profile.integrals}")
    alpha = -grad_sq / flux
    if lhs_stabilizer:
        lam = -p.m0 * stab / flux
        eta = -p.beta * stab / flux
    else:
        lam = 0.5 * p.m0 * stab
        eta = 0.5 * p.beta * stab
    if alpha <= 0 or lam < 0 or (lam == 0 and p.m0 > 0):
        raise RuntimeError(f"non-positive coefficients: alpha={alpha}, lambda={lam}")
    return VelocityCoeffs(alpha=alpha, lam=lam, eta=eta)


# ---------------------------------------------------------------------------
# closed-curve evolution
# ---------------------------------------------------------------------------

@dataclass
class Curve:
    """Closed planar marker-point curve, counterclockwise, no duplicate
    endpoint."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError("vertices must be an (n, 2) array")
        if len(v) >= 2 and np.allclose(v[0], v[-1]):
            v = v[:-1]
        if len(v) < 16:
            raise ValueError("a curve needs at least 16 marker points")
        x, y = v[:, 0], v[:, 1]
        area2 = np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        if area2 < 0:
            v = v[::-1].copy()
        self.vertices = v

    @property
    def n(self) -> int:
        return len(self.vertices)

    def enclosed_area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def perimeter(self) -> float:
        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        return float(np.sum(np.hypot(d[:, 0], d[:, 1])))

    def equivalent_radius(self) -> float:
        return float(np.sqrt(abs(self.enclosed_area()) / np.pi))


def circle(radius: float, n: int = 256, center=(0.0, 0.0)) -> Curve:
    th = 2.0 * np.pi * np.arange(n) / n
    return Curve(np.c_[center[0] + radius * np.cos(th),
                       center[1] + radius * np.sin(th)])


def ellipse(a: float, b: float, n: int = 256, center=(0.0, 0.0)) -> Curve:
    th = 2.0 * np.pi * np.arange(n) / n
    c = Curve(np.c_[center[0] + a * np.cos(th), center[1] + b * np.sin(th)])
    c.vertices = resample_equal_arclength(c.vertices, n)
    return c


def curvature_and_normals(vertices: np.ndarray):
    """Periodic finite differences in arclength on ~equally spaced markers.

    Returns (kappa, inward_normals, mean_spacing).  kappa > 0 for a
    counterclockwise convex curve; the inward normal is the tangent
    rotated +90 degrees.
    """
    v = vertices
    seg = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    h = float(np.mean(lengths))
    vp = (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / (2.0 * h)
    vpp = (np.roll(v, -1, axis=0) - 2.0 * v + np.roll(v, 1, axis=0)) / (h * h)
    speed_sq = vp[:, 0] ** 2 + vp[:, 1] ** 2
    kappa = (vp[:, 0] * vpp[:, 1] - vp[:, 1] * vpp[:, 0]) / speed_sq ** 1.5
    tang = vp / np.sqrt(speed_sq)[:, None]
    normals = np.c_[-tang[:, 1], tang[:, 0]]
    return kappa, normals, h


def resample_equal_arclength(vertices: np.ndarray, n: int) -> np.ndarray:
    """Redistribute markers to equal arclength via a periodic cubic spline."""
    v = vertices
    seg = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    s = np.concatenate([[0.0], np.cumsum(lengths)])
    closed = np.vstack([v, v[:1]])
    spl = CubicSpline(s, closed, bc_type="periodic", axis=0)
    s_new = s[-1] * np.arange(n) / n
    return spl(s_new)


def suggest_curve_dt(coeffs: VelocityCoeffs, spacing: float,
                     safety: float = 0.45) -> float:
    """Marker time step from the explicit stability bounds.

    Combines the fourth-order rate 16*lam*alpha/ds^4 of the arclength
    bilaplacian with the second-order rate 4*eta*alpha/ds^2 of the
    curvature term; pass the smallest spacing the run will reach.
    """
    rate = (16.0 * coeffs.lam * coeffs.alpha / spacing ** 4
            + 4.0 * coeffs.eta * coeffs.alpha / spacing ** 2)
    if rate <= 0:
        raise ValueError("coefficients produce no motion")
    return safety * 2.0 / rate


def has_self_intersection(vertices: np.ndarray) -> bool:
    """True if any two non-adjacent segments of the closed polygon cross."""
    v = vertices
    n = len(v)
    a = v
    b = np.roll(v, -1, axis=0)
    d = b - a
    # all pairs (i, j): solve a_i + t d_i = a_j + w d_j
    ax, ay = a[:, 0][:, None], a[:, 1][:, None]
    dx, dy = d[:, 0][:, None], d[:, 1][:, None]
    bx, by = a[:, 0][None, :], a[:, 1][None, :]
    ex, ey = d[:, 0][None, :], d[:, 1][None, :]
    denom = dx * ey - dy * ex
    rx = bx - ax
    ry = by - ay
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (rx * ey - ry * ex) / denom
        w = (rx * dy - ry * dx) / denom
    crossing = (denom != 0) & (t > 1e-12) & (t < 1 - 1e-12) \
        & (w > 1e-12) & (w < 1 - 1e-12)
    idx = np.arange(n)
    adjacent = (np.abs(idx[:, None] - idx[None, :]) <= 1) \
        | (np.abs(idx[:, None] - idx[None, :]) == n - 1)
    return bool(np.any(crossing & ~adjacent))


def evolve_curve(curve: Curve, coeffs: VelocityCoeffs, p: ModelParams,
                 dt: float, f0_mode: str = "zero",
                 check_topology: bool = True) -> Curve:
    """Advance the curve one step of the limiting velocity law.

    f0_mode selects the slow climb-force term f0:
      zero           validation mode, f0 = 0;
      constant       f0 = f_app from the parameters;
      curvature_log  f0 = (G b^2 / 4 pi (1-nu)) * kappa * ln(eps)
                     (the O(1) core correction is not known and dropped).

    dt must sit below the explicit fourth-order stability bound
    ~ ds^4 / (8 lambda alpha) for the current spacing.
    """
    if f0_mode not in ("zero", "constant", "curvature_log"):
        raise ValueError(f"unknown f0_mode {f0_mode!r}")
    kappa, normals, h = curvature_and_normals(curve.vertices)
    if f0_mode == "zero":
        f0 = 0.0
    elif f0_mode == "constant":
        f0 = p.f_app
    else:
        f0 = (p.shear_g * p.b * p.b / (4.0 * np.pi * (1.0 - p.nu))
              * kappa * np.log(p.eps))
    w = coeffs.alpha * kappa - p.h0 * f0
    d2w = (np.roll(w, -1) - 2.0 * w + np.roll(w, 1)) / (h * h)
    v_n = -coeffs.lam * d2w + coeffs.eta * w
    moved = curve.vertices + dt * v_n[:, None] * normals
    moved = resample_equal_arclength(moved, curve.n)
    if check_topology and has_self_intersection(moved):
        raise CurveTopologyError(
            "curve self-intersection detected (topology change): "
            f"area={Curve(moved).enclosed_area():.4e}")
    return Curve(moved)
