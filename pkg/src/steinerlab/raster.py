"""Grid engine: an independent oracle for the exact kernel, and an
approximate symmetrizer for 3-D bodies and non-convex sets.

A :class:`GridBody` covers the cube [-L, L]^dim with ``resolution`` cells
per axis. Array axis k is coordinate k (x, y, z), and cell i on an axis has
center -L + (i + 1/2)·h with h = 2L / resolution, so the coordinate planes
through the origin fall on cell boundaries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from . import _kernels
from .geom2d import ConvexBody2, Direction, InvalidInputError, normalize, circumradius

__all__ = [
    "GridBody",
    "annulus",
    "annulus_experiment",
    "grid_area",
    "grid_circumradius",
    "grid_from_indicator",
    "grid_hausdorff",
    "grid_steiner",
    "rasterize",
    "rasterize_hull3",
    "read_bitset",
    "read_pgm",
    "write_bitset",
    "write_pgm",
]

DEFAULT_RESOLUTION = {2: 1024, 3: 128}


@dataclass(frozen=True, eq=False)
class GridBody:
    dim: int
    resolution: int
    extent: float
    occupancy: np.ndarray

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise InvalidInputError(f"grid dimension must be 2 or 3, got {self.dim!r}")
        n = int(self.resolution)
        if n < 2 or n & (n - 1):
            raise InvalidInputError(f"resolution must be a power of two, got {self.resolution!r}")
        if not (self.extent > 0 and math.isfinite(self.extent)):
            raise InvalidInputError(f"extent must be positive, got {self.extent!r}")
        occ = np.asarray(self.occupancy, dtype=bool)
        if occ.shape != (n,) * self.dim:
            raise InvalidInputError(f"occupancy shape {occ.shape} does not match {(n,) * self.dim}")
        occ = occ.copy()
        occ.flags.writeable = False
        object.__setattr__(self, "resolution", n)
        object.__setattr__(self, "extent", float(self.extent))
        object.__setattr__(self, "occupancy", occ)

    @property
    def cell_size(self) -> float:
        return 2.0 * self.extent / self.resolution

    @property
    def centers(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        h = self.cell_size
        return -self.extent + (np.arange(self.resolution) + 0.5) * h

    @property
    def count(self) -> int:
        return int(self.occupancy.sum())

    def occupied_centers(self) -> np.ndarray:
        idx = np.argwhere(self.occupancy)
        return -self.extent + (idx + 0.5) * self.cell_size

    def like(self, occupancy) -> GridBody:
        return GridBody(self.dim, self.resolution, self.extent, occupancy)

    def sidecar(self) -> dict:
        return {"dim": self.dim, "resolution": self.resolution, "extent": self.extent}


def _check_grid_args(resolution, extent):
    if extent is None or not (extent > 0 and math.isfinite(extent)):
        raise InvalidInputError(f"extent must be a positive number, got {extent!r}")
    return int(resolution), float(extent)


def rasterize(K: ConvexBody2, resolution: int = 1024, extent: float = 2.0) -> GridBody:
    """Mark every cell whose center lies in K."""
    n, L = _check_grid_args(resolution, extent)
    if float(np.max(np.abs(K.vertices))) >= L:
        raise InvalidInputError(f"body does not fit inside [-{L}, {L}]^2")
    c = -L + (np.arange(n) + 0.5) * (2.0 * L / n)
    occ = np.zeros((n, n), dtype=bool)
    V = K.vertices
    if K.is_point:
        i = np.flatnonzero(c == V[0, 0])
        j = np.flatnonzero(c == V[0, 1])
        if i.size and j.size:
            occ[i[0], j[0]] = True
        return GridBody(2, n, L, occ)
    if K.is_segment:
        a, b = V
        d = b - a
        # centers on the segment: collinear with it and inside its span
        X, Y = np.meshgrid(c, c, indexing="ij")
        cross = (X - a[0]) * d[1] - (Y - a[1]) * d[0]
        t = ((X - a[0]) * d[0] + (Y - a[1]) * d[1]) / float(d @ d)
        occ = (np.abs(cross) <= 1e-12 * float(np.hypot(*d))) & (t >= 0) & (t <= 1)
        return GridBody(2, n, L, occ)
    la, lb, ua, ub = _kernels._chains(np.ascontiguousarray(V[:, 0]), np.ascontiguousarray(V[:, 1]))
    inside = (c >= la[0]) & (c <= la[-1])
    lo = np.interp(c, la, lb)
    hi = np.interp(c, ua, ub)
    occ = (c[None, :] >= lo[:, None]) & (c[None, :] <= hi[:, None]) & inside[:, None]
    return GridBody(2, n, L, occ)


def grid_from_indicator(indicator, dim: int = 2, resolution: int | None = None, extent: float = 2.0) -> GridBody:
    """Grid of the cells whose center satisfies ``indicator(x, y[, z])``.

    ``indicator`` receives coordinate arrays and must return a boolean array.
    """
    n, L = _check_grid_args(resolution or DEFAULT_RESOLUTION.get(dim, 0), extent)
    c = -L + (np.arange(n) + 0.5) * (2.0 * L / n)
    mesh = np.meshgrid(*([c] * dim), indexing="ij")
    return GridBody(dim, n, L, np.asarray(indicator(*mesh), dtype=bool))


def rasterize_hull3(points, resolution: int = 128, extent: float = 2.0) -> GridBody:
    """3-D grid of the convex hull of a point set (cell centers inside the hull)."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3 or not np.all(np.isfinite(P)):
        raise InvalidInputError("expected a finite (k, 3) point array")
    n, L = _check_grid_args(resolution, extent)
    if float(np.max(np.abs(P))) >= L:
        raise InvalidInputError(f"points do not fit inside [-{L}, {L}]^3")
    try:
        hull = ConvexHull(P)
    except QhullError as exc:
        raise InvalidInputError(f"degenerate 3-D hull: {exc}") from None
    A = hull.equations[:, :3]
    b = hull.equations[:, 3]
    c = -L + (np.arange(n) + 0.5) * (2.0 * L / n)
    X, Y, Z = np.meshgrid(c, c, c, indexing="ij")
    occ = np.ones((n, n, n), dtype=bool)
    for k in range(len(b)):
        occ &= A[k, 0] * X + A[k, 1] * Y + A[k, 2] * Z + b[k] <= 1e-12
    return GridBody(3, n, L, occ)


def _balance_axis(occ: np.ndarray, axis: int) -> np.ndarray:
    # k occupied cells in a column become the run [n/2 - k//2, n/2 - k//2 + k)
    n = occ.shape[axis]
    counts = occ.sum(axis=axis, keepdims=True)
    start = n // 2 - counts // 2
    shape = [1] * occ.ndim
    shape[axis] = n
    idx = np.arange(n).reshape(shape)
    return (idx >= start) & (idx < start + counts)


def _axis_of(G: GridBody, axis_or_direction) -> int | Direction:
    if isinstance(axis_or_direction, Direction):
        u = axis_or_direction
        for k, e in enumerate(((1.0, 0.0), (0.0, 1.0))):
            if abs(u.ux) == abs(e[0]) and abs(u.uy) == abs(e[1]) and G.dim == 2:
                return k
        if G.dim == 3:
            raise InvalidInputError("3-D grids support axis directions only")
        return u
    try:
        k = int(axis_or_direction)
    except (TypeError, ValueError):
        raise InvalidInputError(f"expected an axis index or a Direction, got {axis_or_direction!r}") from None
    if not 0 <= k < G.dim:
        raise InvalidInputError(f"axis must lie in [0, {G.dim}), got {axis_or_direction!r}")
    return k


def _rotated_chords(G: GridBody, u: Direction, oversample: int):
    """Chord lengths of the occupied set along lines parallel to u.

    Lines sit at a = (i + 1/2)·h + a0 across u-perp; along each one the
    occupancy is sampled every h / oversample by nearest-cell lookup.
    """
    h = G.cell_size
    n = G.resolution
    L = G.extent
    P = G.occupied_centers()
    w = np.array([u.uy, -u.ux])
    uv = np.array([u.ux, u.uy])
    a = P @ w
    b = P @ uv
    a0 = (math.floor(a.min() / h) - 1) * h
    na = int(math.ceil((a.max() - a0) / h)) + 2
    step = h / oversample
    b0 = (math.floor(b.min() / step) - oversample) * step
    nb = int(math.ceil((b.max() - b0) / step)) + 2 * oversample
    bs = b0 + (np.arange(nb) + 0.5) * step
    lengths = np.zeros(na)
    occ = G.occupancy
    for i in range(na):
        ai = a0 + (i + 0.5) * h
        x = ai * w[0] + bs * uv[0]
        y = ai * w[1] + bs * uv[1]
        ix = np.floor((x + L) / h).astype(np.int64)
        iy = np.floor((y + L) / h).astype(np.int64)
        ok = (ix >= 0) & (ix < n) & (iy >= 0) & (iy < n)
        lengths[i] = step * np.count_nonzero(occ[ix[ok], iy[ok]])
    return a0, lengths


def grid_steiner(G: GridBody, axis_or_direction, oversample: int = 2) -> GridBody:
    """Grid Steiner symmetrization along a coordinate axis or a 2-D direction.

    Along an axis each column keeps its cell count exactly; its cells are
    re-emitted as one run centered on the mid-plane (an odd count puts the
    extra cell on the positive side). A general 2-D direction u goes
    through a rotated frame: chord lengths are measured along lines
    parallel to u by nearest-cell resampling, and each output cell is
    marked when |x·u| is at most half the chord of its line. That path is
    approximate, to about one cell.
    """
    k = _axis_of(G, axis_or_direction)
    if isinstance(k, int):
        return G.like(_balance_axis(G.occupancy, k))
    u = k
    if not G.occupancy.any():
        return G.like(G.occupancy)
    h = G.cell_size
    a0, lengths = _rotated_chords(G, u, oversample)
    c = G.centers
    X, Y = np.meshgrid(c, c, indexing="ij")
    a = X * u.uy - Y * u.ux
    b = X * u.ux + Y * u.uy
    line = np.floor((a - a0) / h).astype(np.int64)
    ok = (line >= 0) & (line < len(lengths))
    half = np.zeros_like(a)
    half[ok] = 0.5 * lengths[line[ok]]
    return G.like((np.abs(b) <= half) & (half > 0))


def _nonempty(G: GridBody):
    if not G.occupancy.any():
        raise InvalidInputError("grid has no occupied cells")


def grid_area(G: GridBody) -> float:
    """Occupied measure: cell count times cell area (volume in 3-D)."""
    _nonempty(G)
    return G.count * G.cell_size ** G.dim


def grid_hausdorff(G1: GridBody, G2: GridBody) -> float:
    """Symmetric Hausdorff distance between the occupied cell centers."""
    _nonempty(G1)
    _nonempty(G2)
    if (G1.dim, G1.resolution, G1.extent) != (G2.dim, G2.resolution, G2.extent):
        raise InvalidInputError("grids must share dimension, resolution and extent")
    d1 = ndimage.distance_transform_edt(~G1.occupancy)
    d2 = ndimage.distance_transform_edt(~G2.occupancy)
    return float(max(d1[G2.occupancy].max(), d2[G1.occupancy].max())) * G1.cell_size


def grid_circumradius(G: GridBody) -> float:
    """Radius of the smallest disk containing every occupied cell center (2-D)."""
    _nonempty(G)
    if G.dim != 2:
        raise InvalidInputError("grid circumradius is implemented for 2-D grids")
    return circumradius(normalize(G.occupied_centers())).radius


# -- I/O --------------------------------------------------------------------


def write_pgm(G: GridBody, path) -> None:
    """Binary PGM (P5), occupied = 255; image rows run from +y down to -y."""
    if G.dim != 2:
        raise InvalidInputError("PGM export needs a 2-D grid")
    img = np.where(G.occupancy.T[::-1], 255, 0).astype(np.uint8)
    n = G.resolution
    with open(path, "wb") as fh:
        fh.write(f"P5\n# extent {G.extent!r}\n{n} {n}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path, extent: float | None = None) -> GridBody:
    """Read a PGM written by :func:`write_pgm` (any nonzero pixel is occupied)."""
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    found_extent = None
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            end = data.index(b"\n", pos)
            comment = data[pos + 1:end].decode("ascii").split()
            if len(comment) == 2 and comment[0] == "extent":
                found_extent = float(comment[1])
            pos = end + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end].decode("ascii"))
        pos = end
    pos += 1
    if tokens[0] != "P5":
        raise InvalidInputError(f"not a binary PGM file: magic {tokens[0]!r}")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if w != h or maxval > 255:
        raise InvalidInputError("expected a square 8-bit PGM")
    img = np.frombuffer(data[pos:pos + w * h], dtype=np.uint8).reshape(h, w)
    L = extent if extent is not None else found_extent
    if L is None:
        raise InvalidInputError("PGM carries no extent; pass one explicitly")
    return GridBody(2, w, L, (img[::-1].T > 0))


def write_bitset(G: GridBody, path) -> Path:
    """Little-endian packed bitset (C order) plus a JSON sidecar ``<path>.json``."""
    path = Path(path)
    bits = np.packbits(G.occupancy.ravel(order="C"), bitorder="little")
    path.write_bytes(bits.tobytes())
    meta = {**G.sidecar(), "order": "C", "bitorder": "little"}
    side = path.with_name(path.name + ".json")
    side.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return side


def read_bitset(path) -> GridBody:
    path = Path(path)
    meta = json.loads(path.with_name(path.name + ".json").read_text(encoding="utf-8"))
    try:
        dim, n, L = int(meta["dim"]), int(meta["resolution"]), float(meta["extent"])
    except KeyError as exc:
        raise InvalidInputError(f"bitset sidecar is missing {exc}") from None
    bits = np.frombuffer(path.read_bytes(), dtype=np.uint8)
    occ = np.unpackbits(bits, count=n ** dim, bitorder="little").astype(bool)
    return GridBody(dim, n, L, occ.reshape((n,) * dim))


# -- exploratory experiment -------------------------------------------------


def annulus(inner: float = 0.35, outer: float = 0.7, center=(0.2, 0.1), resolution: int = 512, extent: float = 2.0) -> GridBody:
    cx, cy = center

    def inside(x, y):
        r = np.hypot(x - cx, y - cy)
        return (r >= inner) & (r <= outer)

    return grid_from_indicator(inside, 2, resolution, extent)


def annulus_experiment(steps: int = 40, resolution: int = 512, angle: float = 1.0) -> list[dict]:
    """Alternate grid symmetrizations along 0 and ``angle`` radians on an annulus.

    Returns one row per step with the grid area and circumradius. Nothing
    here is asserted; the rows are meant to be logged.
    """
    G = annulus(resolution=resolution)
    dirs = (Direction.from_angle(0.0), Direction.from_angle(angle))
    rows = [{"step": 0, "area": grid_area(G), "circumradius": grid_circumradius(G)}]
    for i in range(1, steps + 1):
        G = grid_steiner(G, dirs[(i - 1) % 2])
        rows.append({"step": i, "area": grid_area(G), "circumradius": grid_circumradius(G)})
    return rows
