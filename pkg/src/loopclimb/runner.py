"""Scenario construction, the run loop, and on-disk output formats.

Outputs land in the configured directory:

* ``timeseries.csv``  -- step, t, mean_u, e_ch, e_el, e_total, loop_count,
  total_abs_area, isoperimetric_max (floats printed with 17 significant
  digits; byte-identical across runs of one configuration on a platform);
* ``u_step<step>.dat`` -- grid dumps: header line ``nx ny t`` then ny rows
  of nx floats (y-outer);
* ``u_step<step>.pgm`` -- optional 8-bit greymaps, u mapped from [-1, 1];
* ``report.txt`` plus matplotlib figures rendered at the end of the run.

On a stability failure the loop restores the last emitted state, halves
dt, and retries; after 6 halvings it aborts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .config import RunConfig
from .diagnostics import LoopSet, energy, extract_loops
from .dynamics import (SimState, StabilityError, step_forward_euler,
                       step_semi_implicit, suggest_dt)
from .spectral import (GridSpec, build_wavenumbers, coordinates,
                       random_band_limited)

__all__ = ["RunResult", "build_initial_field", "run", "save_grid_dump",
           "load_grid_dump", "save_pgm", "CSV_HEADER"]

CSV_HEADER = ("step,t,mean_u,e_ch,e_el,e_total,loop_count,"
              "total_abs_area,isoperimetric_max")

MAX_HALVINGS = 6
EXTINCT_CONSECUTIVE = 10
PHASE_COLLAPSE_TOL = 0.05
RANGE_LIMIT = 2.0  # |u| beyond this is treated as a blow-up in progress


@dataclass(frozen=True)
class RunResult:
    """Exit report of one run."""

    stop_reason: str        # "t_end" | "extinct" | "max_steps"
    steps: int
    final_t: float
    final_loop_count: int
    dt_final: float
    halvings: int
    wall_seconds: float
    output_dir: str


def _signed_distance(cfg: RunConfig, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Signed distance to the union of loop boundaries, positive outside.

    Boundaries are sampled densely and queried through a KD-tree; the sign
    comes from each loop's implicit function, combined by the minimum.
    """
    d_min = None
    for loop in cfg.loops:
        if loop[0] == "circle":
            _, cx, cy, r = loop
            d = np.hypot(X - cx, Y - cy) - r
        else:
            _, cx, cy, a, bb = loop
            th = np.linspace(0.0, 2.0 * np.pi, 8192, endpoint=False)
            pts = np.c_[cx + a * np.cos(th), cy + bb * np.sin(th)]
            tree = cKDTree(pts)
            dist, _ = tree.query(np.c_[X.ravel(), Y.ravel()])
            inside = ((X - cx) / a) ** 2 + ((Y - cy) / bb) ** 2 < 1.0
            d = dist.reshape(X.shape) * np.where(inside, -1.0, 1.0)
        d_min = d if d_min is None else np.minimum(d_min, d)
    return d_min


def _check_no_overlap(cfg: RunConfig) -> None:
    circles = [l for l in cfg.loops if l[0] == "circle"]
    for i in range(len(circles)):
        for j in range(i + 1, len(circles)):
            _, x1, y1, r1 = circles[i]
            _, x2, y2, r2 = circles[j]
            if math.hypot(x2 - x1, y2 - y1) <= r1 + r2:
                raise ValueError(
                    f"initial loops {i + 1} and {j + 1} overlap "
                    f"(center distance {math.hypot(x2 - x1, y2 - y1):.4f} "
                    f"<= {r1 + r2:.4f})")


def build_initial_field(cfg: RunConfig) -> np.ndarray:
    """Initial order parameter: u = tanh(d / (1.5 eps)), -1 inside loops.

    The tanh layer |u| < tanh(1) then spans about 3 eps.  For the
    custom_field scenario the field is loaded from ``field_path``.
    A nonzero ``perturb`` adds a seeded band-limited ripple (amplitude
    perturb * b) to the signed distance.
    """
    grid = cfg.grid_spec()
    if cfg.scenario == "custom_field":
        u, _t, nx, ny = load_grid_dump(cfg.field_path)
        if (ny, nx) != grid.shape:
            raise ValueError(
                f"field file is {nx} x {ny} but the grid is {grid.nx} x {grid.ny}")
        return u
    _check_no_overlap(cfg)
    X, Y = coordinates(grid)
    d = _signed_distance(cfg, X, Y)
    if cfg.perturb != 0.0:
        d = d + cfg.perturb * cfg.b * random_band_limited(grid, 4, cfg.seed)
    return np.tanh(d / (1.5 * cfg.eps))


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def save_grid_dump(path, u: np.ndarray, t: float) -> None:
    ny, nx = u.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{nx} {ny} {t:.17g}\n")
        for j in range(ny):
            fh.write(" ".join(f"{v:.17g}" for v in u[j]) + "\n")


def load_grid_dump(path):
    """Return (u, t, nx, ny) from a grid dump file."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: malformed dump header")
        nx, ny, t = int(header[0]), int(header[1]), float(header[2])
        u = np.loadtxt(fh)
    u = np.atleast_2d(u)
    if u.shape != (ny, nx):
        raise ValueError(f"{path}: expected {ny} x {nx} values, got {u.shape}")
    return u, t, nx, ny


def save_pgm(path, u: np.ndarray) -> None:
    """8-bit binary greymap; u mapped linearly from [-1, 1], clamped.

    Rows are written top = max y.
    """
    ny, nx = u.shape
    scaled = np.clip((u + 1.0) * 0.5, 0.0, 1.0) * 255.0
    img = np.rint(scaled).astype(np.uint8)[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def _csv_row(step: int, t: float, e, loops: LoopSet) -> str:
    vals = [e.mean_u, e.e_ch, e.e_el, e.e_total]
    parts = [str(step), f"{t:.17g}"] + [f"{v:.17g}" for v in vals]
    parts.append(str(loops.count))
    parts.append(f"{loops.total_abs_area:.17g}")
    parts.append(f"{loops.max_isoperimetric:.17g}")
    return ",".join(parts)


# ---------------------------------------------------------------------------
# run loop
# ---------------------------------------------------------------------------

def run(cfg: RunConfig, progress: bool = False) -> RunResult:
    """Execute a configured run; returns the exit report.

    Stops at t_end, on loop extinction (no loops for 10 consecutive
    diagnostics while max|1 - |u|| < 0.05), or at max_steps.
    """
    t_start = time.perf_counter()
    grid = cfg.grid_spec()
    wn = build_wavenumbers(grid, dealias=cfg.dealias)
    p = cfg.params()
    stepper = step_semi_implicit if cfg.scheme == "semi_implicit" \
        else step_forward_euler

    u0 = build_initial_field(cfg)
    t0, step0 = 0.0, 0
    dt = cfg.dt if cfg.dt is not None else suggest_dt(p, grid, cfg.dt_safety)
    if cfg.scenario == "custom_field":
        _, t_loaded, _, _ = load_grid_dump(cfg.field_path)
        t0 = t_loaded
        step0 = int(round(t0 / dt))

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    state = SimState(u=u0, wn=wn, t=t0, step=step0)
    halvings = 0
    extinct_streak = 0
    seen_loops = False
    stop_reason = "max_steps"
    loop_traces: list[tuple[float, LoopSet]] = []

    csv_path = out / "timeseries.csv"
    with open(csv_path, "w", encoding="ascii") as csv:
        csv.write(CSV_HEADER + "\n")

        def emit(st: SimState) -> LoopSet:
            nonlocal extinct_streak, seen_loops
            e = energy(st.u, p, wn)
            loops = extract_loops(st.u, grid)
            csv.write(_csv_row(st.step, st.t, e, loops) + "\n")
            loop_traces.append((st.t, loops))
            if loops.count > 0:
                seen_loops = True
                extinct_streak = 0
            else:
                collapsed = float(np.max(np.abs(1.0 - np.abs(st.u)))) < PHASE_COLLAPSE_TOL
                extinct_streak = extinct_streak + 1 if collapsed else 0
            if progress:
                print(f"step {st.step}  t {st.t:.6e}  loops {loops.count}  "
                      f"iso {loops.max_isoperimetric:.4f}")
            return loops

        def snapshot(st: SimState) -> None:
            save_grid_dump(out / f"u_step{st.step:08d}.dat", st.u, st.t)
            if cfg.pgm:
                save_pgm(out / f"u_step{st.step:08d}.pgm", st.u)

        emit(state)
        snapshot(state)
        checkpoint = state

        while True:
            if state.t >= cfg.t_end:
                stop_reason = "t_end"
                break
            if seen_loops and extinct_streak >= EXTINCT_CONSECUTIVE:
                stop_reason = "extinct"
                break
            if state.step - step0 >= cfg.max_steps:
                stop_reason = "max_steps"
                break

            try:
                new_state, _rep = stepper(state, dt, p, with_energy=False)
                if float(np.max(np.abs(new_state.u))) > RANGE_LIMIT:
                    raise StabilityError(
                        f"step {state.step}: |u| exceeded {RANGE_LIMIT}")
            except StabilityError as exc:
                halvings += 1
                if halvings > MAX_HALVINGS:
                    raise StabilityError(
                        f"unstable after {MAX_HALVINGS} dt halvings "
                        f"(last dt {dt:.3e}): {exc}") from None
                dt *= 0.5
                state = checkpoint
                if progress:
                    print(f"stability failure ({exc}); retrying from step "
                          f"{state.step} with dt {dt:.3e}")
                continue

            state = new_state
            if state.step % cfg.timeseries_every == 0:
                emit(state)
                checkpoint = state
            if cfg.snapshot_every and state.step % cfg.snapshot_every == 0:
                snapshot(state)

        if state.step % cfg.timeseries_every != 0:
            emit(state)
        snapshot(state)

    final_loops = loop_traces[-1][1]
    wall = time.perf_counter() - t_start
    result = RunResult(stop_reason=stop_reason, steps=state.step - step0,
                       final_t=state.t, final_loop_count=final_loops.count,
                       dt_final=dt, halvings=halvings, wall_seconds=wall,
                       output_dir=str(out))

    with open(out / "report.txt", "w", encoding="ascii") as fh:
        fh.write(f"stop_reason: {result.stop_reason}\n"
                 f"steps: {result.steps}\n"
                 f"final_t: {result.final_t:.17g}\n"
                 f"final_loop_count: {result.final_loop_count}\n"
                 f"dt_final: {result.dt_final:.17g}\n"
                 f"halvings: {result.halvings}\n"
                 f"wall_seconds: {result.wall_seconds:.3f}\n")

    if cfg.figures:
        from . import plotting
        plotting.render_run_figures(out, grid, state.u, loop_traces)

    return result
