"""Exact planar convex-body kernel.

Bodies are stored as vertex lists in a canonical form: counter-clockwise,
strictly convex, lexicographically smallest vertex first. Bodies without
interior are kept as their own variants (a point or a segment) instead of
thin polygons, since symmetrization treats them differently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import _kernels

__all__ = [
    "Ball2",
    "ConvexBody2",
    "DEFAULT_TOLERANCES",
    "DegenerateBodyError",
    "Direction",
    "InvalidInputError",
    "Tolerances",
    "area",
    "body_from_json",
    "body_to_json",
    "circumradius",
    "contains_ball",
    "diameter",
    "disk_polygon",
    "hausdorff",
    "in_ball",
    "inradius",
    "mean_width",
    "minkowski_sum",
    "normalize",
    "origin_circumradius",
    "origin_inradius",
    "perimeter",
    "point",
    "polygon",
    "reflect",
    "regular_polygon",
    "scale",
    "segment",
    "support",
    "support_difference_range",
    "support_many",
    "translate",
]


class InvalidInputError(ValueError):
    """Raised for malformed geometric input (non-finite data, bad parameters)."""


class DegenerateBodyError(ValueError):
    """Raised when an operation needs a body with interior."""


@dataclass(frozen=True)
class Tolerances:
    vertex_tol: float = 1e-12
    area_tol: float = 1e-12
    hausdorff_tol: float = 1e-9
    quadrature_tol: float = 1e-10

    def __post_init__(self):
        for name in ("vertex_tol", "area_tol", "hausdorff_tol", "quadrature_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidInputError(f"{name} must be a positive finite number, got {value!r}")

    def to_dict(self) -> dict:
        return {
            "vertex_tol": self.vertex_tol,
            "area_tol": self.area_tol,
            "hausdorff_tol": self.hausdorff_tol,
            "quadrature_tol": self.quadrature_tol,
        }


DEFAULT_TOLERANCES = Tolerances()

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Direction:
    """A unit vector in the plane, kept together with its angle."""

    theta: float
    ux: float
    uy: float

    @classmethod
    def from_angle(cls, theta: float) -> Direction:
        if not math.isfinite(theta):
            raise InvalidInputError(f"angle must be finite, got {theta!r}")
        t = math.fmod(theta, TWO_PI)
        if t < 0:
            t += TWO_PI
        if t >= TWO_PI:
            t = 0.0
        c, s = math.cos(t), math.sin(t)
        # quarter turns get exact components so axis directions stay exact
        if abs(c) < 1e-15:
            c, s = 0.0, math.copysign(1.0, s)
        elif abs(s) < 1e-15:
            c, s = math.copysign(1.0, c), 0.0
        return cls(t, c, s)

    @classmethod
    def from_degrees(cls, degrees: float) -> Direction:
        return cls.from_angle(math.radians(degrees))

    @classmethod
    def from_vector(cls, x: float, y: float) -> Direction:
        norm = math.hypot(x, y)
        if not (norm > 0 and math.isfinite(norm)):
            raise InvalidInputError(f"cannot build a direction from ({x!r}, {y!r})")
        return cls.from_angle(math.atan2(y, x))

    @property
    def degrees(self) -> float:
        return math.degrees(self.theta)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.ux, self.uy])

    @property
    def perp(self) -> np.ndarray:
        """Unit vector spanning the line u-perp, oriented as (uy, -ux)."""
        return np.array([self.uy, -self.ux])

    def canonical(self) -> Direction:
        """The same reflection axis with angle folded into [0, pi)."""
        t = math.fmod(self.theta, math.pi)
        if math.pi - t <= 1e-15:
            t = 0.0
        return Direction.from_angle(t)


@dataclass(frozen=True)
class Ball2:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise InvalidInputError(f"ball radius must be nonnegative, got {self.radius!r}")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "radius", float(self.radius))


_KINDS = ("point", "segment", "polygon")


def _frozen(array) -> np.ndarray:
    a = np.array(array, dtype=float).reshape(-1, 2)
    a += 0.0  # clears negative zeros
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class ConvexBody2:
    """A compact convex set in the plane: a point, a segment, or a polygon.

    ``vertices`` holds one row for a point, the two endpoints of a segment,
    or the CCW vertex cycle of a polygon. Instances are produced by
    :func:`normalize` and are never mutated.
    """

    kind: str
    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInputError(f"unknown body kind {self.kind!r}")
        object.__setattr__(self, "vertices", _frozen(self.vertices))
        expected = {"point": (1, 1), "segment": (2, 2), "polygon": (3, None)}[self.kind]
        k = len(self.vertices)
        if k < expected[0] or (expected[1] is not None and k > expected[1]):
            raise InvalidInputError(f"{self.kind} body cannot have {k} vertices")

    @property
    def is_point(self) -> bool:
        return self.kind == "point"

    @property
    def is_segment(self) -> bool:
        return self.kind == "segment"

    @property
    def is_polygon(self) -> bool:
        return self.kind == "polygon"

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, ConvexBody2):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash((self.kind, self.vertices.tobytes()))

    def __repr__(self):
        if self.kind == "point":
            x, y = self.vertices[0]
            return f"Point({x:.6g}, {y:.6g})"
        if self.kind == "segment":
            (ax, ay), (bx, by) = self.vertices
            return f"Segment(({ax:.6g}, {ay:.6g}), ({bx:.6g}, {by:.6g}))"
        return f"Polygon(<{len(self.vertices)} vertices>)"


# -- construction -----------------------------------------------------------


def _as_points(points) -> np.ndarray:
    try:
        P = np.asarray(points, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"points must be numeric pairs: {exc}") from None
    if P.ndim == 1 and P.size == 2:
        P = P.reshape(1, 2)
    if P.ndim != 2 or P.shape[1] != 2 or P.shape[0] < 1:
        raise InvalidInputError(f"expected a non-empty list of planar points, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise InvalidInputError("point coordinates must be finite")
    return P


def _cross_turns(P: np.ndarray) -> np.ndarray:
    prev = np.roll(P, 1, axis=0)
    nxt = np.roll(P, -1, axis=0)
    return (P[:, 0] - prev[:, 0]) * (nxt[:, 1] - P[:, 1]) - (P[:, 1] - prev[:, 1]) * (nxt[:, 0] - P[:, 0])


def _is_canonical_ccw(P: np.ndarray, tol: Tolerances) -> bool:
    if len(P) < 3:
        return False
    if np.any(_cross_turns(P) <= tol.area_tol):
        return False
    E = np.roll(P, -1, axis=0) - P
    if np.any(np.hypot(E[:, 0], E[:, 1]) <= tol.vertex_tol):
        return False
    # a strictly convex cycle turns exactly once
    En = np.roll(E, -1, axis=0)
    turning = np.arctan2(E[:, 0] * En[:, 1] - E[:, 1] * En[:, 0], np.einsum("ij,ij->i", E, En))
    return abs(turning.sum() - TWO_PI) < 1e-6 and _shoelace(P) > tol.area_tol


def _lexmin_first(P: np.ndarray) -> np.ndarray:
    s = int(np.lexsort((P[:, 1], P[:, 0]))[0])
    return np.roll(P, -s, axis=0)


def _hull(P: np.ndarray) -> np.ndarray:
    P = np.unique(P, axis=0)
    if len(P) < 3:
        return P
    return _kernels.monotone_chain(np.ascontiguousarray(P))


def _shoelace(P: np.ndarray) -> float:
    return float(_kernels.shoelace(np.ascontiguousarray(P, dtype=float)))


def _degenerate(P: np.ndarray, tol: Tolerances) -> ConvexBody2:
    if len(P) == 1:
        return ConvexBody2("point", P)
    # farthest pair of the (small or thin) vertex set
    if len(P) > 64:
        P = _hull(P)
    D = np.hypot(P[:, None, 0] - P[None, :, 0], P[:, None, 1] - P[None, :, 1])
    i, j = np.unravel_index(int(np.argmax(D)), D.shape)
    if D[i, j] <= tol.vertex_tol:
        return ConvexBody2("point", _lexmin_first(P)[:1])
    ends = np.array([P[i], P[j]])
    return ConvexBody2("segment", ends[np.lexsort((ends[:, 1], ends[:, 0]))])


def _from_ccw(V: np.ndarray, tol: Tolerances) -> ConvexBody2:
    """Canonical body from a vertex cycle already known to be CCW convex."""
    V = np.ascontiguousarray(V, dtype=float)
    if len(V) >= 3:
        W = _kernels.prune_ccw(V, tol.area_tol, tol.vertex_tol)
        if len(W) >= 3 and _shoelace(W) > tol.area_tol:
            return ConvexBody2("polygon", W)
    # collapse from the unpruned cycle so the farthest pair survives
    return _degenerate(V, tol)


def normalize(points, tol: Tolerances = DEFAULT_TOLERANCES) -> ConvexBody2:
    """Canonical convex body spanned by a finite point list.

    The result is the convex hull in CCW order starting from the
    lexicographically smallest vertex, with near-collinear vertices
    (turn cross product <= area_tol) removed. Hulls with area <= area_tol
    become segments, and those with diameter <= vertex_tol become points.

    >>> normalize([(0, 0), (2, 2), (1, 1)])
    Segment((0, 0), (2, 2))
    """
    if isinstance(points, ConvexBody2):
        points = points.vertices
    P = _as_points(points)
    if _is_canonical_ccw(P, tol):
        return ConvexBody2("polygon", _lexmin_first(P))
    return _from_ccw(_hull(P), tol)


def point(x: float, y: float) -> ConvexBody2:
    return normalize([(x, y)])


def segment(a, b, tol: Tolerances = DEFAULT_TOLERANCES) -> ConvexBody2:
    return normalize([a, b], tol)


def polygon(vertices, tol: Tolerances = DEFAULT_TOLERANCES) -> ConvexBody2:
    return normalize(vertices, tol)


def regular_polygon(k: int, circumradius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> ConvexBody2:
    """Regular k-gon with a vertex at angle ``phase`` (radians)."""
    if k < 3:
        raise InvalidInputError(f"a regular polygon needs at least 3 vertices, got {k}")
    t = phase + TWO_PI * np.arange(k) / k
    V = np.column_stack([center[0] + circumradius * np.cos(t), center[1] + circumradius * np.sin(t)])
    return normalize(V)


def disk_polygon(area_value: float | None = None, n: int = 256, radius: float | None = None) -> ConvexBody2:
    """Regular n-gon centered at the origin, sized by area or by circumradius."""
    if radius is None:
        if area_value is None:
            radius = 1.0
        else:
            radius = math.sqrt(2.0 * area_value / (n * math.sin(TWO_PI / n)))
    return regular_polygon(n, radius)


# -- scalar functionals -----------------------------------------------------


def support(K: ConvexBody2, u: Direction) -> float:
    return float(np.max(K.vertices @ np.array([u.ux, u.uy])))


def support_many(K: ConvexBody2, angles) -> np.ndarray:
    """Support function evaluated at an array of angles (radians)."""
    t = np.asarray(angles, dtype=float)
    U = np.stack([np.cos(t), np.sin(t)])
    return np.max(K.vertices @ U, axis=0)


def area(K: ConvexBody2) -> float:
    if not K.is_polygon:
        return 0.0
    return _shoelace(K.vertices)


def perimeter(K: ConvexBody2) -> float:
    V = K.vertices
    if K.is_point:
        return 0.0
    # a segment is traversed there and back, so both sides count
    E = np.roll(V, -1, axis=0) - V
    return float(np.sum(np.hypot(E[:, 0], E[:, 1])))


def mean_width(K: ConvexBody2) -> float:
    return perimeter(K) / math.pi


def diameter(K: ConvexBody2) -> float:
    return float(_kernels.polygon_diameter(np.ascontiguousarray(K.vertices)))


def origin_circumradius(K: ConvexBody2) -> float:
    """Smallest R with K inside the origin-centered disk of radius R."""
    return float(np.max(np.hypot(K.vertices[:, 0], K.vertices[:, 1])))


def origin_inradius(K: ConvexBody2) -> float:
    """Largest r with the origin-centered disk of radius r inside K (0 if none)."""
    if not K.is_polygon:
        return 0.0
    N, d = _edge_halfplanes(K.vertices)
    return max(0.0, float(np.min(d)))


# -- circumscribed and inscribed disks --------------------------------------


def _disk2(p, q):
    c = 0.5 * (p + q)
    return c, 0.5 * math.hypot(p[0] - q[0], p[1] - q[1])


def _disk3(p, q, s):
    ax, ay = p
    bx, by = q
    cx, cy = s
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-300:
        best = max((_disk2(p, q), _disk2(p, s), _disk2(q, s)), key=lambda cr: cr[1])
        return best
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    c = np.array([ux, uy])
    return c, max(math.hypot(ax - ux, ay - uy), math.hypot(bx - ux, by - uy), math.hypot(cx - ux, cy - uy))


def _first_outside(P, c, r, start, stop):
    if start >= stop:
        return -1
    Q = P[start:stop]
    dist = np.hypot(Q[:, 0] - c[0], Q[:, 1] - c[1])
    out = dist > r * (1.0 + 1e-12) + 1e-15
    if not out.any():
        return -1
    return start + int(np.argmax(out))


def _min_disk(P: np.ndarray):
    # incremental (Welzl-style) construction; each scan is vectorized
    c, r = P[0].copy(), 0.0
    i = 1
    while (i := _first_outside(P, c, r, i, len(P))) >= 0:
        p = P[i]
        c, r = p.copy(), 0.0
        j = 0
        while (j := _first_outside(P, c, r, j, i)) >= 0:
            q = P[j]
            c, r = _disk2(p, q)
            k = 0
            while (k := _first_outside(P, c, r, k, j)) >= 0:
                c, r = _disk3(p, q, P[k])
                k += 1
            j += 1
        i += 1
    return c, r


def circumradius(K: ConvexBody2) -> Ball2:
    """Minimum enclosing disk of the body."""
    V = K.vertices
    if len(V) == 1:
        return Ball2(tuple(V[0]), 0.0)
    order = np.random.default_rng(0).permutation(len(V))
    c, r = _min_disk(V[order])
    return Ball2((float(c[0]), float(c[1])), float(r))


def _edge_halfplanes(V: np.ndarray):
    """Unit outer normals N and offsets d with K = {x : N x <= d}."""
    E = np.roll(V, -1, axis=0) - V
    L = np.hypot(E[:, 0], E[:, 1])
    N = np.column_stack([E[:, 1] / L, -E[:, 0] / L])
    d = np.einsum("ij,ij->i", N, V)
    return N, d


def inradius(K: ConvexBody2) -> Ball2:
    """Largest inscribed disk (Chebyshev center) of a polygon.

    Ties between optimal centers are broken toward the lexicographically
    smallest center.
    """
    if not K.is_polygon:
        raise DegenerateBodyError(f"inradius needs a body with interior, got {K!r}")
    N, d = _edge_halfplanes(K.vertices)
    A = np.column_stack([N, np.ones(len(N))])
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=A, b_ub=d, bounds=[(None, None), (None, None), (0, None)], method="highs")
    if res.status != 0:  # pragma: no cover - a bounded polygon always has an optimum
        raise RuntimeError(f"Chebyshev LP failed: {res.message}")
    c = np.array(res.x[:2])
    slack = d - N @ c
    r = float(np.min(slack))
    scale_ = 1.0 + float(np.max(np.abs(K.vertices)))
    tight = np.flatnonzero(slack - r <= 1e-9 * scale_)
    NT = N[tight]
    for n0 in NT:
        for w in (np.array([-n0[1], n0[0]]), np.array([n0[1], -n0[0]])):
            if np.max(NT @ w) > 1e-9:
                continue
            # optimal centers form a segment along w between parallel edges
            nw = N @ w
            room = slack - r
            up = nw > 1e-12
            down = nw < -1e-12
            hi = float(np.min(room[up] / nw[up])) if up.any() else 0.0
            lo = float(np.max(room[down] / nw[down])) if down.any() else 0.0
            ends = [c + lo * w, c + hi * w]
            c = min(ends, key=lambda p: (round(p[0], 12), round(p[1], 12)))
            r = float(np.min(d - N @ c))
            return Ball2((float(c[0]), float(c[1])), max(r, 0.0))
    return Ball2((float(c[0]), float(c[1])), max(r, 0.0))


# -- Minkowski algebra and rigid maps ---------------------------------------


def _bottom_first(V):
    s = int(np.lexsort((V[:, 0], V[:, 1]))[0])
    return np.roll(V, -s, axis=0)


def minkowski_sum(K: ConvexBody2, L: ConvexBody2, tol: Tolerances = DEFAULT_TOLERANCES) -> ConvexBody2:
    """K + L, by merging edge sequences in polar-angle order."""
    if not (K.is_polygon and L.is_polygon):
        V = (K.vertices[:, None, :] + L.vertices[None, :, :]).reshape(-1, 2)
        return normalize(V, tol)
    P = _bottom_first(K.vertices)
    Q = _bottom_first(L.vertices)
    E = np.vstack([np.roll(P, -1, axis=0) - P, np.roll(Q, -1, axis=0) - Q])
    ang = np.mod(np.arctan2(E[:, 1], E[:, 0]), TWO_PI)
    E = E[np.argsort(ang, kind="stable")]
    V = (P[0] + Q[0]) + np.vstack([np.zeros((1, 2)), np.cumsum(E[:-1], axis=0)])
    return _from_ccw(V, tol)


def scale(K: ConvexBody2, a: float, tol: Tolerances = DEFAULT_TOLERANCES) -> ConvexBody2:
    """The dilate aK about the origin."""
    if not (a >= 0 and math.isfinite(a)):
        raise InvalidInputError(f"scale factor must be a nonnegative finite number, got {a!r}")
    if a == 0:
        return ConvexBody2("point", np.zeros((1, 2)))
    if a == 1:
        return K
    if K.is_polygon:
        return _from_ccw(K.vertices * a, tol)
    return normalize(K.vertices * a, tol)


def translate(K: ConvexBody2, offset, tol: Tolerances = DEFAULT_TOLERANCES) -> ConvexBody2:
    x = np.asarray(offset, dtype=float).reshape(2)
    if K.is_polygon:
        return _from_ccw(K.vertices + x, tol)
    return normalize(K.vertices + x, tol)


def reflect(K: ConvexBody2, u: Direction, tol: Tolerances = DEFAULT_TOLERANCES) -> ConvexBody2:
    """Mirror image of K in the line u-perp through the origin."""
    uvec = np.array([u.ux, u.uy])
    V = K.vertices - 2.0 * np.outer(K.vertices @ uvec, uvec)
    if K.is_polygon:
        return _from_ccw(V[::-1].copy(), tol)
    return normalize(V, tol)


# -- metric and containment -------------------------------------------------


def hausdorff(K: ConvexBody2, L: ConvexBody2, cap: float = math.inf) -> float:
    """Exact Hausdorff distance: the sup over unit w of |h_K(w) - h_L(w)|.

    Normal fans of both bodies are merged into arcs; on each arc both
    support functions are linear in (cos t, sin t), so the sup is attained
    at an arc endpoint or where the difference of supporting vertices
    points into the arc. With a finite ``cap`` the sweep may stop early:
    results below cap are exact, results at or above it are lower bounds.
    """
    return float(_kernels.support_gap(np.ascontiguousarray(K.vertices), np.ascontiguousarray(L.vertices), cap))


def support_difference_range(K: ConvexBody2, L: ConvexBody2) -> tuple[float, float]:
    """Exact (min, max) over unit w of h_K(w) - h_L(w).

    K is contained in L exactly when the max is <= 0.
    """
    lo, hi = _kernels.support_diff_range(np.ascontiguousarray(K.vertices), np.ascontiguousarray(L.vertices), math.inf)
    return float(lo), float(hi)


def contains_ball(K: ConvexBody2, ball: Ball2, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """ball is inside K, up to hausdorff_tol."""
    c = np.array(ball.center)
    slack = tol.hausdorff_tol
    if not K.is_polygon:
        if ball.radius > slack:
            return False
        return _distance_to_body(K, c) <= slack
    N, d = _edge_halfplanes(K.vertices)
    margin = d - N @ c
    return bool(np.all(margin >= -slack) and np.all(margin >= ball.radius - slack))


def in_ball(K: ConvexBody2, ball: Ball2, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """K is inside ball, up to hausdorff_tol."""
    c = np.array(ball.center)
    dist = np.hypot(K.vertices[:, 0] - c[0], K.vertices[:, 1] - c[1])
    return bool(np.all(dist <= ball.radius + tol.hausdorff_tol))


def _distance_to_body(K: ConvexBody2, x: np.ndarray) -> float:
    V = K.vertices
    if K.is_point:
        return float(np.hypot(*(x - V[0])))
    if K.is_segment:
        a, b = V
        t = float(np.clip(np.dot(x - a, b - a) / np.dot(b - a, b - a), 0.0, 1.0))
        return float(np.hypot(*(x - (a + t * (b - a)))))
    N, d = _edge_halfplanes(V)
    if np.all(N @ x <= d):
        return 0.0
    A = V
    B = np.roll(V, -1, axis=0)
    AB = B - A
    t = np.clip(np.einsum("ij,ij->i", x - A, AB) / np.einsum("ij,ij->i", AB, AB), 0.0, 1.0)
    P = A + t[:, None] * AB
    return float(np.min(np.hypot(P[:, 0] - x[0], P[:, 1] - x[1])))


# -- JSON -------------------------------------------------------------------


def body_to_json(K: ConvexBody2) -> dict:
    V = K.vertices.tolist()
    if K.is_point:
        return {"type": "point", "p": V[0]}
    if K.is_segment:
        return {"type": "segment", "a": V[0], "b": V[1]}
    return {"type": "polygon", "vertices": V}


def body_from_json(data: dict, tol: Tolerances = DEFAULT_TOLERANCES) -> ConvexBody2:
    if not isinstance(data, dict) or "type" not in data:
        raise InvalidInputError("body JSON must be an object with a 'type' field")
    kind = data["type"]
    try:
        if kind == "point":
            pts = [data["p"]]
        elif kind == "segment":
            pts = [data["a"], data["b"]]
        elif kind == "polygon":
            pts = data["vertices"]
        else:
            raise InvalidInputError(f"unknown body type {kind!r}")
    except KeyError as exc:
        raise InvalidInputError(f"{kind} body JSON is missing field {exc}") from None
    return normalize(pts, tol)
