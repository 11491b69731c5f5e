"""Energy functionals and zero-contour loop extraction.

The energy split follows the model: a gradient + potential part and an
elastic part.  Loop geometry comes from marching squares on the u = 0
level set with linear edge interpolation; extracted loops are closed
polylines with counterclockwise-positive signed area (the phase inside a
vacancy loop is u = -1, so vacancy loops come out counterclockwise).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .material import (ModelParams, climb_cutoff, double_well, stabilizer,
                       theta_cutoff)
from .spectral import (GridSpec, WaveNumbers, coordinates, forward,
                       frac_laplacian_half, gradient, inverse)

__all__ = ["EnergyReport", "LoopSet", "energy", "extract_loops",
           "loop_area", "loop_perimeter", "polygon_centroid",
           "isoperimetric_ratio"]


@dataclass(frozen=True)
class EnergyReport:
    """Gradient+potential energy, elastic energy, their sum, and mean(u)."""

    e_ch: float
    e_el: float
    e_total: float
    mean_u: float


def energy(u: np.ndarray, p: ModelParams, wn: WaveNumbers,
           f_d: np.ndarray | None = None) -> EnergyReport:
    """Rectangle-rule energies (spectrally exact for band-limited fields).

    Physical mode:  e_ch = Int[ |grad u|^2 / 2 + q(u)/eps^2 ],
                    e_el = (1/eps) Int[ u f_d / 2 + u f_app ].
    Analysis mode:  e_ch = Int[ |grad u|^2 / 2 + q(u) ],
                    e_el = Int[ u (-lap)^(1/2) u ].

    A precomputed f_d may be passed to avoid one transform.
    """
    grid = wn.grid
    w = grid.cell_area
    ux, uy = gradient(u, wn)
    grad_sq = 0.5 * np.sum(ux * ux + uy * uy) * w

    if p.analysis:
        e_ch = grad_sq + np.sum(double_well(u)) * w
        half = frac_laplacian_half(u, wn)
        e_el = np.sum(u * half) * w
    else:
        e_ch = grad_sq + np.sum(double_well(u)) * w / p.eps ** 2
        if f_d is None:
            from .forces import climb_force_spectral
            f_d = climb_force_spectral(u, p, wn).f_d
        e_el = np.sum(0.5 * u * f_d + u * p.f_app) * w / p.eps

    return EnergyReport(e_ch=float(e_ch), e_el=float(e_el),
                        e_total=float(e_ch + e_el), mean_u=float(np.mean(u)))


# ---------------------------------------------------------------------------
# marching squares
# ---------------------------------------------------------------------------

@dataclass
class LoopSet:
    """Closed zero-contour loops with per-loop shoelace metrics.

    Each loop is an (m, 2) array of physical (x, y) vertices with the
    first vertex repeated at the end.  Signed areas follow the
    counterclockwise-positive convention.  ``open_chains`` counts contour
    pieces that hit the domain boundary; those are excluded from the
    metrics.
    """

    loops: list = field(default_factory=list)
    areas: list = field(default_factory=list)
    perimeters: list = field(default_factory=list)
    centroids: list = field(default_factory=list)
    count: int = 0
    open_chains: int = 0

    @property
    def total_abs_area(self) -> float:
        return float(sum(abs(a) for a in self.areas))

    @property
    def max_isoperimetric(self) -> float:
        if not self.loops:
            return 0.0
        return max(4.0 * np.pi * abs(a) / (l * l)
                   for a, l in zip(self.areas, self.perimeters))


def loop_area(vertices: np.ndarray) -> float:
    """Shoelace signed area of a closed polyline (CCW positive)."""
    v = _ring(vertices)
    x, y = v[:, 0], v[:, 1]
    return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def loop_perimeter(vertices: np.ndarray) -> float:
    v = _ring(vertices)
    return float(np.sum(np.hypot(*(np.roll(v, -1, axis=0) - v).T)))


def polygon_centroid(vertices: np.ndarray) -> tuple[float, float]:
    v = _ring(vertices)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * np.sum(cross)
    if abs(a) < 1e-300:
        return float(np.mean(x)), float(np.mean(y))
    cx = np.sum((x + xn) * cross) / (6.0 * a)
    cy = np.sum((y + yn) * cross) / (6.0 * a)
    return float(cx), float(cy)


def isoperimetric_ratio(vertices: np.ndarray) -> float:
    """4 pi |A| / L^2; 1 for a circle, < 1 otherwise."""
    a = loop_area(vertices)
    l = loop_perimeter(vertices)
    return float(4.0 * np.pi * abs(a) / (l * l))


def _ring(vertices: np.ndarray) -> np.ndarray:
    """Strip the duplicate closing vertex; require a genuine polygon."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise ValueError("vertices must be an (n, 2) array")
    if len(v) >= 2 and np.allclose(v[0], v[-1]):
        v = v[:-1]
    if len(v) < 3:
        raise ValueError("polyline needs at least 3 distinct vertices")
    return v


# Directed segments per marching-squares case, oriented so the u < 0
# region lies on the left of the walking direction.  Edges are named by
# the side of the cell they live on: B(ottom), R(ight), T(op), L(eft).
# Key: (bl, br, tr, tl) booleans for "corner value < 0".
_CASES: dict[tuple[int, int, int, int], list[tuple[str, str]]] = {
    (0, 0, 0, 0): [],
    (1, 1, 1, 1): [],
    (1, 0, 0, 0): [("B", "L")],
    (0, 1, 0, 0): [("R", "B")],
    (0, 0, 1, 0): [("T", "R")],
    (0, 0, 0, 1): [("L", "T")],
    (0, 1, 1, 1): [("L", "B")],
    (1, 0, 1, 1): [("B", "R")],
    (1, 1, 0, 1): [("R", "T")],
    (1, 1, 1, 0): [("T", "L")],
    (1, 1, 0, 0): [("R", "L")],
    (0, 0, 1, 1): [("L", "R")],
    (1, 0, 0, 1): [("B", "T")],
    (0, 1, 1, 0): [("T", "B")],
    # saddles resolved by the cell-center sign at lookup time
}


def _saddle_segments(neg_center: bool, diag_bl_tr: bool) -> list[tuple[str, str]]:
    if diag_bl_tr:  # corners BL and TR negative
        if neg_center:
            return [("B", "R"), ("T", "L")]
        return [("B", "L"), ("T", "R")]
    # corners BR and TL negative
    if neg_center:
        return [("L", "B"), ("R", "T")]
    return [("R", "B"), ("L", "T")]


def extract_loops(u: np.ndarray, grid: GridSpec) -> LoopSet:
    """Marching-squares extraction of the u = 0 contour.

    Segments are chained by shared cell-edge identity into closed
    polylines; chains that reach the domain boundary are reported as
    warnings and excluded.  Contours are expected to stay away from the
    periodic seam (no wrap-around stitching).
    """
    if u.shape != grid.shape:
        raise ValueError(f"field shape {u.shape} does not match grid {grid.shape}")
    neg = u < 0.0
    ny, nx = grid.shape
    x0, y0 = -0.5 * grid.length_x, -0.5 * grid.length_y
    dx, dy = grid.dx, grid.dy

    # mixed cells only
    bl = neg[:-1, :-1]
    br = neg[:-1, 1:]
    tr = neg[1:, 1:]
    tl = neg[1:, :-1]
    mixed = ~((bl == br) & (br == tr) & (tr == tl))
    cj, ci = np.nonzero(mixed)

    def crossing(j0, i0, j1, i1):
        a = u[j0, i0]
        b = u[j1, i1]
        t = a / (a - b)
        return (x0 + (i0 + t * (i1 - i0)) * dx,
                y0 + (j0 + t * (j1 - j0)) * dy)

    # edge ids: ("H", i, j) joins nodes (i,j)-(i+1,j); ("V", i, j) joins (i,j)-(i,j+1)
    def edge_id(side: str, i: int, j: int):
        if side == "B":
            return ("H", i, j)
        if side == "T":
            return ("H", i, j + 1)
        if side == "L":
            return ("V", i, j)
        return ("V", i + 1, j)

    points: dict[tuple, tuple[float, float]] = {}
    next_edge: dict[tuple, list] = {}

    for j, i in zip(cj, ci):
        key = (bool(neg[j, i]), bool(neg[j, i + 1]),
               bool(neg[j + 1, i + 1]), bool(neg[j + 1, i]))
        segs = _CASES.get(tuple(int(v) for v in key))
        if segs is None:
            center = 0.25 * (u[j, i] + u[j, i + 1] + u[j + 1, i + 1] + u[j + 1, i])
            segs = _saddle_segments(center < 0.0, key[0])
        for side_a, side_b in segs:
            ea, eb = edge_id(side_a, i, j), edge_id(side_b, i, j)
            for side, eid in ((side_a, ea), (side_b, eb)):
                if eid not in points:
                    if side == "B":
                        points[eid] = crossing(j, i, j, i + 1)
                    elif side == "T":
                        points[eid] = crossing(j + 1, i, j + 1, i + 1)
                    elif side == "L":
                        points[eid] = crossing(j, i, j + 1, i)
                    else:
                        points[eid] = crossing(j, i + 1, j + 1, i + 1)
            next_edge.setdefault(ea, []).append(eb)

    result = LoopSet()
    visited: set = set()
    for start in list(next_edge.keys()):
        if start in visited:
            continue
        chain = [start]
        visited.add(start)
        cur = start
        closed = False
        while True:
            nxts = next_edge.get(cur)
            if not nxts:
                break
            cur = nxts.pop()
            if cur == start:
                closed = True
                break
            if cur in visited:
                break
            visited.add(cur)
            chain.append(cur)
        if not closed:
            result.open_chains += 1
            continue
        verts = np.array([points[e] for e in chain] + [points[chain[0]]])
        result.loops.append(verts)
        result.areas.append(loop_area(verts))
        result.perimeters.append(loop_perimeter(verts))
        result.centroids.append(polygon_centroid(verts))

    result.count = len(result.loops)
    if result.open_chains:
        warnings.warn(f"{result.open_chains} open contour chain(s) hit the "
                      "domain boundary and were excluded", stacklevel=2)
    return result
