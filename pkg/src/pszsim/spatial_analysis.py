"""Spatial isolation maps, iso-level contours and enclosed area.

A planar grid of single-point IPI values shows where in the sound field a
listener would still enjoy a given isolation level. Contours at chosen
levels (marching squares with linear interpolation) outline those
regions, and the area they enclose is a scalar robustness proxy: the
larger the area, the more a listener can move before isolation drops
below the level.

Contours and area share one table of per-cell polygon walks, so the area
is exactly the shoelace area of the polygonized superlevel region and the
two views can never disagree. Cells with any non-finite corner (grid
point on a speaker, or an unbounded ratio) are excluded from both.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .acoustics import response_matrix
from .filter_design import FilterMatrix
from .scene import Scene


@dataclass(frozen=True)
class IpiMap:
    """Single-point IPI in dB over a rectangular grid.

    ``values_db[iy, ix]`` belongs to the point (x0 + ix*spacing,
    y0 + iy*spacing) in the z = 0 plane. Values are stored untruncated so
    contour levels below the cap are unaffected by it;
    :meth:`capped_values` applies the cap for display and export. Invalid
    cells (grid point on a speaker) hold NaN.
    """

    frequency: float
    x0: float
    y0: float
    spacing: float
    nx: int
    ny: int
    values_db: np.ndarray
    cap_db: float = 40.0

    def __post_init__(self):
        arr = np.asarray(self.values_db, dtype=float)
        if arr.shape != (self.ny, self.nx):
            raise ValueError(
                f"values_db shape {arr.shape} does not match (ny, nx) = "
                f"({self.ny}, {self.nx})"
            )
        arr = arr.copy() if arr is self.values_db else arr
        arr.setflags(write=False)
        object.__setattr__(self, "values_db", arr)

    def x_coords(self) -> np.ndarray:
        return self.x0 + np.arange(self.nx) * self.spacing

    def y_coords(self) -> np.ndarray:
        return self.y0 + np.arange(self.ny) * self.spacing

    def capped_values(self) -> np.ndarray:
        """Values truncated at ``cap_db`` (NaN cells stay NaN)."""
        return np.minimum(self.values_db, self.cap_db)


@dataclass(frozen=True)
class ContourSet:
    """Iso-level polylines of one map at one level.

    Each polyline is an (n, 2) array of (x, y) vertices in meters lying
    on grid cell edges. A polyline whose first and last vertices are
    identical is closed.
    """

    level_db: float
    polylines: tuple[np.ndarray, ...]

    def __post_init__(self):
        frozen = []
        for line in self.polylines:
            arr = np.asarray(line, dtype=float)
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "polylines", tuple(frozen))


def ipi_map(
    scene: Scene,
    C: FilterMatrix,
    region,
    resolution: float,
    frequency: float,
    target_channels,
    interferer_channels,
    cap_db: float = 40.0,
) -> IpiMap:
    """Evaluate single-point IPI on a grid in the z = 0 plane.

    Parameters
    ----------
    region : (x_min, x_max, y_min, y_max)
        Rectangle in meters. Both extents must be integer multiples of
        ``resolution`` so the grid covers the region exactly.
    C : FilterMatrix
        Filters designed at ``frequency`` (mismatch raises).
    target_channels, interferer_channels
        Disjoint channel index sets of the designed system.

    At each grid point the 1 x L transfer row is formed, multiplied by C,
    and the single-point IPI computed from the resulting channel row. A
    grid point exactly on a speaker yields NaN for that cell instead of
    failing the whole map.
    """
    if resolution <= 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    if C.frequency != frequency:
        raise ValueError(
            f"filters designed at {C.frequency} Hz, map requested at {frequency} Hz"
        )
    x_min, x_max, y_min, y_max = (float(v) for v in region)
    if x_max <= x_min or y_max <= y_min:
        raise ValueError(f"region must have positive extent, got {region}")

    def _axis_count(extent: float, name: str) -> int:
        steps = extent / resolution
        n = int(round(steps))
        if abs(steps - n) > 1e-6:
            raise ValueError(
                f"region {name} extent {extent} is not a multiple of resolution {resolution}"
            )
        return n + 1

    nx = _axis_count(x_max - x_min, "x")
    ny = _axis_count(y_max - y_min, "y")

    target = tuple(int(i) for i in target_channels)
    interferer = tuple(int(i) for i in interferer_channels)
    n_chan = C.entries.shape[1]
    for name, chans in (("target", target), ("interferer", interferer)):
        if not chans:
            raise ValueError(f"{name} channel set must not be empty")
        bad = [i for i in chans if not 0 <= i < n_chan]
        if bad:
            raise ValueError(f"{name} channel indices out of range: {bad}")
    if set(target) & set(interferer):
        raise ValueError("target and interferer channel sets overlap")

    xs = x_min + np.arange(nx) * resolution
    ys = y_min + np.arange(ny) * resolution
    gx, gy = np.meshgrid(xs, ys)  # (ny, nx), x varies along axis 1
    points = np.column_stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)])

    rows = response_matrix(scene, points, frequency, on_coincident="nan")
    m = rows @ C.entries  # (n_points, n_channels); NaN rows propagate

    with np.errstate(divide="ignore", invalid="ignore"):
        t_coh = np.abs(m[:, target].sum(axis=1)) ** 2 / len(target)
        j_coh = np.abs(m[:, interferer].sum(axis=1)) ** 2 / len(interferer)
        t_inc = (np.abs(m[:, target]) ** 2).sum(axis=1) / len(target)
        j_inc = (np.abs(m[:, interferer]) ** 2).sum(axis=1) / len(interferer)
        value = np.minimum(t_coh / j_coh, t_inc / j_inc)
        values_db = 10.0 * np.log10(value)

    return IpiMap(
        frequency=float(frequency),
        x0=x_min,
        y0=y_min,
        spacing=float(resolution),
        nx=nx,
        ny=ny,
        values_db=values_db.reshape(ny, nx),
        cap_db=float(cap_db),
    )


# Per-cell polygon walks of the superlevel region. Corners c0..c3 run
# counterclockwise from the bottom-left; e0..e3 are the level crossings on
# the bottom, right, top and left edges. The region inside a cell is the
# union of the listed polygons; every cyclically consecutive pair of
# crossing vertices in a walk is a contour chord. Masks 5 and 10 are the
# saddle cases, disambiguated by the cell-center mean.
_WALKS = {
    0: [],
    1: [("c0", "e0", "e3")],
    2: [("e0", "c1", "e1")],
    3: [("c0", "c1", "e1", "e3")],
    4: [("e1", "c2", "e2")],
    6: [("e0", "c1", "c2", "e2")],
    7: [("c0", "c1", "c2", "e2", "e3")],
    8: [("e2", "c3", "e3")],
    9: [("c0", "e0", "e2", "c3")],
    11: [("c0", "c1", "e1", "e2", "c3")],
    12: [("e1", "c2", "c3", "e3")],
    13: [("c0", "e0", "e1", "c2", "c3")],
    14: [("e0", "c1", "c2", "c3", "e3")],
    15: [("c0", "c1", "c2", "c3")],
}
_SADDLE = {
    (5, True): [("c0", "e0", "e1", "c2", "e2", "e3")],
    (5, False): [("c0", "e0", "e3"), ("e1", "c2", "e2")],
    (10, True): [("e0", "c1", "e1", "e2", "c3", "e3")],
    (10, False): [("e0", "c1", "e1"), ("e2", "c3", "e3")],
}

# Edge endpoints as corner indices (low, high) and the global key template.
_EDGE_CORNERS = {"e0": (0, 1), "e1": (1, 2), "e2": (3, 2), "e3": (0, 3)}


def _edge_key(token: str, ix: int, iy: int):
    if token == "e0":
        return ("h", ix, iy)
    if token == "e2":
        return ("h", ix, iy + 1)
    if token == "e3":
        return ("v", ix, iy)
    return ("v", ix + 1, iy)  # e1


def _cell_geometry(m: IpiMap, level: float):
    """Yield (ix, iy, corner values, walks) for every contributing cell."""
    v = m.values_db
    for iy in range(m.ny - 1):
        for ix in range(m.nx - 1):
            corners = (
                v[iy, ix],
                v[iy, ix + 1],
                v[iy + 1, ix + 1],
                v[iy + 1, ix],
            )
            if not all(math.isfinite(c) for c in corners):
                continue
            mask = 0
            for bit, val in enumerate(corners):
                if val >= level:
                    mask |= 1 << bit
            if mask == 0:
                continue
            if mask in (5, 10):
                center_inside = sum(corners) / 4.0 >= level
                walks = _SADDLE[(mask, center_inside)]
            else:
                walks = _WALKS[mask]
            yield ix, iy, corners, walks


def _vertex_xy(token: str, ix: int, iy: int, corners, level: float, m: IpiMap):
    s = m.spacing
    cx = m.x0 + ix * s
    cy = m.y0 + iy * s
    if token[0] == "c":
        corner = int(token[1])
        dx = s if corner in (1, 2) else 0.0
        dy = s if corner in (2, 3) else 0.0
        return (cx + dx, cy + dy)
    lo, hi = _EDGE_CORNERS[token]
    t = (level - corners[lo]) / (corners[hi] - corners[lo])
    if token in ("e0", "e2"):
        return (cx + t * s, cy + (s if token == "e2" else 0.0))
    return (cx + (s if token == "e1" else 0.0), cy + t * s)


def extract_contours(m: IpiMap, level_db: float) -> ContourSet:
    """Iso-level polylines at ``level_db`` from the untruncated values.

    Marching squares with linear interpolation along cell edges; saddle
    cells are resolved by the side of the cell-center mean, so the result
    is deterministic. Chord segments from neighboring cells are chained
    into maximal polylines; loops come back closed (first vertex repeated
    at the end). An empty set is returned when the level is never crossed.
    """
    level = float(level_db)
    coords: dict = {}
    adjacency = defaultdict(list)
    segments = []

    for ix, iy, corners, walks in _cell_geometry(m, level):
        for walk in walks:
            n = len(walk)
            for i in range(n):
                a, b = walk[i], walk[(i + 1) % n]
                if a[0] == "e" and b[0] == "e":
                    ka = _edge_key(a, ix, iy)
                    kb = _edge_key(b, ix, iy)
                    coords.setdefault(ka, _vertex_xy(a, ix, iy, corners, level, m))
                    coords.setdefault(kb, _vertex_xy(b, ix, iy, corners, level, m))
                    segments.append((ka, kb))
                    adjacency[ka].append(kb)
                    adjacency[kb].append(ka)

    used: set = set()

    def _walk_from(start):
        path = [start]
        current = start
        while True:
            step = None
            for neighbor in adjacency[current]:
                seg = (current, neighbor) if current <= neighbor else (neighbor, current)
                if seg not in used:
                    used.add(seg)
                    step = neighbor
                    break
            if step is None:
                return path
            path.append(step)
            current = step

    polylines = []
    endpoints = sorted(k for k, nbrs in adjacency.items() if len(nbrs) == 1)
    for start in endpoints:
        if any(
            ((start, n) if start <= n else (n, start)) not in used
            for n in adjacency[start]
        ):
            path = _walk_from(start)
            polylines.append(np.array([coords[k] for k in path]))
    for start in sorted(adjacency):  # remaining segments form loops
        if any(
            ((start, n) if start <= n else (n, start)) not in used
            for n in adjacency[start]
        ):
            path = _walk_from(start)
            polylines.append(np.array([coords[k] for k in path]))

    return ContourSet(level_db=level, polylines=tuple(polylines))


def enclosed_area(contours: ContourSet, m: IpiMap) -> float:
    """Area in m^2 of the region where the map is at or above the level.

    Interior cells count fully, boundary cells fractionally through the
    same interpolated polygon walks that produce the contour chords, so
    the total equals the shoelace area of the closed contours whenever
    the region stays clear of the map border. Cells with non-finite
    corners contribute nothing.
    """
    level = float(contours.level_db)
    total = 0.0
    for ix, iy, corners, walks in _cell_geometry(m, level):
        for walk in walks:
            pts = [_vertex_xy(t, ix, iy, corners, level, m) for t in walk]
            acc = 0.0
            n = len(pts)
            for i in range(n):
                x1, y1 = pts[i]
                x2, y2 = pts[(i + 1) % n]
                acc += x1 * y2 - x2 * y1
            total += abs(acc) / 2.0
    return total
