"""Figure rendering for run reports.

Everything renders to files through the Agg backend; no display is ever
opened.  Figures land next to the delimited output they illustrate.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .spectral import GridSpec, coordinates  # noqa: E402

__all__ = ["render_run_figures", "save_field_figure", "save_timeseries_figure",
           "save_loops_figure", "save_profile_figure", "save_curve_figure",
           "save_force_check_figure"]

_DPI = 150


def save_field_figure(path, grid: GridSpec, u: np.ndarray,
                      loops=None, title: str = "") -> None:
    X, Y = coordinates(grid)
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    im = ax.pcolormesh(X, Y, u, cmap="RdBu_r", vmin=-1.0, vmax=1.0,
                       shading="auto")
    fig.colorbar(im, ax=ax, label="u")
    if loops is not None:
        for poly in loops:
            ax.plot(poly[:, 0], poly[:, 1], "k-", lw=1.0)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_loops_figure(path, loop_traces, title: str = "loop contours") -> None:
    """Overlay of u = 0 contours colored by time."""
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    times = [t for t, _ in loop_traces]
    tmax = max(times) if times and max(times) > 0 else 1.0
    cmap = plt.get_cmap("viridis")
    for t, loops in loop_traces:
        for poly in loops.loops:
            ax.plot(poly[:, 0], poly[:, 1], color=cmap(t / tmax), lw=0.9)
    sm = plt.cm.ScalarMappable(cmap=cmap,
                               norm=plt.Normalize(vmin=0.0, vmax=tmax))
    fig.colorbar(sm, ax=ax, label="t")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_timeseries_figure(path, rows: dict) -> None:
    """Energy, loop count, area and isoperimetric traces vs time."""
    t = rows["t"]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6.4), sharex=True)
    axes[0, 0].plot(t, rows["e_total"], label="total")
    axes[0, 0].plot(t, rows["e_ch"], "--", label="gradient+potential")
    axes[0, 0].plot(t, rows["e_el"], ":", label="elastic")
    axes[0, 0].set_ylabel("energy")
    axes[0, 0].legend(fontsize=8)
    axes[0, 1].plot(t, rows["loop_count"], drawstyle="steps-post")
    axes[0, 1].set_ylabel("loop count")
    axes[1, 0].plot(t, rows["total_abs_area"])
    axes[1, 0].set_ylabel("total |area|")
    axes[1, 0].set_xlabel("t")
    axes[1, 1].plot(t, rows["isoperimetric_max"])
    axes[1, 1].axhline(1.0, color="grey", lw=0.6)
    axes[1, 1].set_ylabel("isoperimetric ratio")
    axes[1, 1].set_xlabel("t")
    for ax in axes.flat:
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def read_timeseries(path) -> dict:
    data = np.genfromtxt(path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    return {name: data[name] for name in data.dtype.names}


def render_run_figures(outdir, grid: GridSpec, u_final: np.ndarray,
                       loop_traces) -> None:
    outdir = Path(outdir)
    rows = read_timeseries(outdir / "timeseries.csv")
    save_timeseries_figure(outdir / "timeseries.png", rows)
    final_loops = loop_traces[-1][1].loops if loop_traces else None
    save_field_figure(outdir / "field_final.png", grid, u_final,
                      loops=final_loops, title="final state")
    save_loops_figure(outdir / "loops.png", loop_traces)


def save_profile_figure(path, profile) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.plot(profile.rho, profile.u0)
    ax1.set_xlabel("rho")
    ax1.set_ylabel("U")
    ax1.grid(alpha=0.3)
    ax2.plot(profile.rho, profile.du0)
    ax2.set_xlabel("rho")
    ax2.set_ylabel("dU/drho")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_curve_figure(path, snapshots) -> None:
    """Curve outlines colored by time; snapshots = [(t, vertices)]."""
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    tmax = max(t for t, _ in snapshots) or 1.0
    cmap = plt.get_cmap("viridis")
    for t, v in snapshots:
        closed = np.vstack([v, v[:1]])
        ax.plot(closed[:, 0], closed[:, 1], color=cmap(t / tmax), lw=0.9)
    sm = plt.cm.ScalarMappable(cmap=cmap, norm=plt.Normalize(0.0, tmax))
    fig.colorbar(sm, ax=ax, label="t")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_force_check_figure(path, grid: GridSpec, f_spectral: np.ndarray,
                            f_oracle: np.ndarray) -> None:
    X, _ = coordinates(grid)
    j = grid.ny // 2
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.plot(X[j], f_spectral[j], label="spectral")
    ax1.plot(X[j], f_oracle[j], "--", label="kernel quadrature")
    ax1.set_xlabel("x (midline)")
    ax1.set_ylabel("climb force")
    ax1.legend(fontsize=8)
    ax1.grid(alpha=0.3)
    im = ax2.pcolormesh(np.abs(f_spectral - f_oracle), shading="auto")
    fig.colorbar(im, ax=ax2, label="|difference|")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
