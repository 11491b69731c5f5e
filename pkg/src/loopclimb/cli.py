"""Command-line interface.

Subcommands:

* ``run``             phase-field simulation from a config file
* ``core-profile``    1-D core profile, its integrals and coefficients
* ``sharp-interface`` marker-curve evolution under the limiting law
* ``force-check``     spectral climb force vs direct kernel quadrature
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, config_keys_help, load_config
from .material import ModelParams, calibrated_h0


def _cmd_run(args) -> int:
    from .runner import run
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.output_dir:
        cfg.output_dir = args.output_dir
    try:
        result = run(cfg, progress=args.progress)
    except Exception as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    print(f"stop reason:      {result.stop_reason}")
    print(f"steps taken:      {result.steps}")
    print(f"final time:       {result.final_t:.6e}")
    print(f"final loop count: {result.final_loop_count}")
    print(f"final dt:         {result.dt_final:.6e} ({result.halvings} halvings)")
    print(f"wall time:        {result.wall_seconds:.1f} s")
    print(f"outputs in:       {result.output_dir}")
    return 0


def _profile_params(args) -> ModelParams:
    h0 = args.h0
    if h0 is None:
        h0 = calibrated_h0(args.shear_g, args.nu, args.b)
    return ModelParams(eps=args.eps, beta=args.beta, m0=args.m0, h0=h0,
                       shear_g=args.shear_g, nu=args.nu, b=args.b)


def _cmd_core_profile(args) -> int:
    from .sharp import compute_coefficients, solve_core_profile
    p = _profile_params(args)
    profile = solve_core_profile(p, length=args.length, n=args.n)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "core_profile.csv", "w", encoding="ascii") as fh:
        fh.write("rho,u,du\n")
        for r, u, du in zip(profile.rho, profile.u0, profile.du0):
            fh.write(f"{r:.17g},{u:.17g},{du:.17g}\n")

    k_lhs = compute_coefficients(profile, p, lhs_stabilizer=True)
    k_plain = compute_coefficients(profile, p, lhs_stabilizer=False)
    grad_sq, stab, flux = profile.integrals
    with open(out / "coefficients.csv", "w", encoding="ascii") as fh:
        fh.write("variant,alpha,lambda,eta\n")
        fh.write(f"lhs_stabilizer,{k_lhs.alpha:.17g},{k_lhs.lam:.17g},{k_lhs.eta:.17g}\n")
        fh.write(f"plain,{k_plain.alpha:.17g},{k_plain.lam:.17g},{k_plain.eta:.17g}\n")

    print(f"residual max-norm: {profile.residual_norm:.3e}")
    print(f"Int[(U')^2] = {grad_sq:.8f}   Int[g] = {stab:.8f}   "
          f"Int[g U'] = {flux:.8f}")
    print(f"alpha = {k_lhs.alpha:.6f}  lambda = {k_lhs.lam:.6f}  "
          f"eta = {k_lhs.eta:.6f}")
    if args.figures:
        from .plotting import save_profile_figure
        save_profile_figure(out / "core_profile.png", profile)
    print(f"outputs in: {out}")
    return 0


def _cmd_sharp_interface(args) -> int:
    from .diagnostics import isoperimetric_ratio
    from .sharp import (Curve, circle, compute_coefficients,
                        curvature_and_normals, ellipse, evolve_curve,
                        solve_core_profile, suggest_curve_dt)
    p = _profile_params(args)
    profile = solve_core_profile(p, length=args.length, n=args.profile_n)
    coeffs = compute_coefficients(profile, p,
                                  lhs_stabilizer=not args.plain_coefficients)

    if args.shape == "circle":
        curve = circle(args.r1, args.markers)
    else:
        curve = ellipse(args.r1, args.r2, args.markers)

    spacing_end = curve.perimeter() / args.markers * args.min_spacing_factor
    dt = args.dt if args.dt else suggest_curve_dt(coeffs, spacing_end)
    steps = int(np.ceil(args.t_end / dt))

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    snapshots = [(0.0, curve.vertices.copy())]
    every = max(1, steps // args.snapshots)

    with open(out / "curve_timeseries.csv", "w", encoding="ascii") as fh:
        fh.write("t,r_equivalent,area,perimeter,kappa_min,kappa_max,isoperimetric\n")

        def emit(t: float, c: Curve) -> None:
            kap, _, _ = curvature_and_normals(c.vertices)
            fh.write(f"{t:.17g},{c.equivalent_radius():.17g},"
                     f"{c.enclosed_area():.17g},{c.perimeter():.17g},"
                     f"{kap.min():.17g},{kap.max():.17g},"
                     f"{isoperimetric_ratio(np.vstack([c.vertices, c.vertices[:1]])):.17g}\n")

        emit(0.0, curve)
        t = 0.0
        for i in range(steps):
            curve = evolve_curve(curve, coeffs, p, dt, f0_mode=args.f0_mode,
                                 check_topology=(i % 25 == 0))
            t += dt
            if (i + 1) % every == 0 or i == steps - 1:
                emit(t, curve)
                snapshots.append((t, curve.vertices.copy()))

    print(f"alpha = {coeffs.alpha:.6f}  lambda = {coeffs.lam:.6f}  "
          f"eta = {coeffs.eta:.6f}")
    print(f"{steps} steps at dt = {dt:.6e}; final equivalent radius "
          f"{curve.equivalent_radius():.6f}")
    if args.figures:
        from .plotting import save_curve_figure
        save_curve_figure(out / "curve_evolution.png", snapshots)
    print(f"outputs in: {out}")
    return 0


def _cmd_force_check(args) -> int:
    from .forces import climb_force_kernel_oracle, climb_force_spectral
    from .spectral import GridSpec, build_wavenumbers, coordinates
    grid = GridSpec(args.n, args.n)
    wn = build_wavenumbers(grid)
    X, Y = coordinates(grid)
    p = ModelParams(eps=args.eps if args.eps else 3.0 * grid.dx,
                    h0=1.0, shear_g=args.shear_g, nu=args.nu, b=args.b)
    d = np.hypot(X, Y) - args.radius
    u = np.tanh(d / (1.5 * p.eps))

    f_spec = climb_force_spectral(u, p, wn).f_d
    f_orac = climb_force_kernel_oracle(u, p, wn)
    num = np.sqrt(np.sum((f_spec - f_orac) ** 2))
    den = np.sqrt(np.sum(f_orac ** 2))
    rel = num / den

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "force_check.csv", "w", encoding="ascii") as fh:
        fh.write("grid,radius,eps,rel_l2_discrepancy\n")
        fh.write(f"{args.n},{args.radius:.17g},{p.eps:.17g},{rel:.17g}\n")
    print(f"{args.n}^2 grid, loop radius {args.radius}: "
          f"relative L2 discrepancy = {rel:.3e}")
    if args.figures:
        from .plotting import save_force_check_figure
        save_force_check_figure(out / "force_check.png", grid, f_spec, f_orac)
    print(f"outputs in: {out}")
    return 0


def _add_profile_args(sp) -> None:
    sp.add_argument("--eps", type=float, default=2.0 * np.pi / 32,
                    help="core-width parameter (default 2*pi/32)")
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--m0", type=float, default=1.0)
    sp.add_argument("--h0", type=float, default=None,
                    help="climb cutoff amplitude (default: calibrated value)")
    sp.add_argument("--shear-g", type=float, default=1.0, dest="shear_g")
    sp.add_argument("--nu", type=float, default=0.3)
    sp.add_argument("--b", type=float, default=2.0 * np.pi / 300.0)
    sp.add_argument("--length", type=float, default=18.0,
                    help="half-width of the rho window")
    sp.add_argument("--output-dir", default="out")
    sp.add_argument("--no-figures", dest="figures", action="store_false")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="loopclimb",
        description="Phase-field simulation of dislocation loop climb and "
                    "self-climb, with a sharp-interface companion solver.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="run a phase-field simulation",
                        epilog="config keys:\n" + config_keys_help(),
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("config", help="path to a key = value config file")
    sp.add_argument("--output-dir", default=None,
                    help="override the config's output directory")
    sp.add_argument("--progress", action="store_true")
    sp.set_defaults(func=_cmd_run)

    sp = sub.add_parser("core-profile",
                        help="solve the 1-D core profile and coefficients")
    _add_profile_args(sp)
    sp.add_argument("--n", type=int, default=2048, help="grid points")
    sp.set_defaults(func=_cmd_core_profile)

    sp = sub.add_parser("sharp-interface",
                        help="evolve a closed curve under the limiting law")
    _add_profile_args(sp)
    sp.add_argument("--profile-n", type=int, default=2048)
    sp.add_argument("--shape", choices=("circle", "ellipse"), default="circle")
    sp.add_argument("--r1", type=float, default=100.0,
                    help="radius / semi-major axis")
    sp.add_argument("--r2", type=float, default=50.0, help="semi-minor axis")
    sp.add_argument("--markers", type=int, default=256)
    sp.add_argument("--t-end", type=float, default=100.0, dest="t_end")
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--min-spacing-factor", type=float, default=0.5,
                    dest="min_spacing_factor",
                    help="fraction of the initial spacing the run may reach")
    sp.add_argument("--f0-mode", choices=("zero", "constant", "curvature_log"),
                    default="zero", dest="f0_mode")
    sp.add_argument("--plain-coefficients", action="store_true",
                    help="use the no-stabilizer-factor coefficient variant")
    sp.add_argument("--snapshots", type=int, default=10)
    sp.set_defaults(func=_cmd_sharp_interface)

    sp = sub.add_parser("force-check",
                        help="compare the spectral climb force with the "
                             "direct kernel quadrature")
    sp.add_argument("--n", type=int, default=128, help="grid size")
    sp.add_argument("--radius", type=float, default=0.8)
    sp.add_argument("--eps", type=float, default=None,
                    help="tanh width parameter (default 3 dx)")
    sp.add_argument("--shear-g", type=float, default=1.0, dest="shear_g")
    sp.add_argument("--nu", type=float, default=0.3)
    sp.add_argument("--b", type=float, default=2.0 * np.pi / 300.0)
    sp.add_argument("--output-dir", default="out")
    sp.add_argument("--no-figures", dest="figures", action="store_false")
    sp.set_defaults(func=_cmd_force_check)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
