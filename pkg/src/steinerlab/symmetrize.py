"""Exact Steiner symmetrization of planar convex bodies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geom2d import (
    DEFAULT_TOLERANCES,
    ConvexBody2,
    Direction,
    InvalidInputError,
    Tolerances,
    _from_ccw,
    hausdorff,
    normalize,
    reflect,
)

__all__ = ["SteinerResult", "fixpoint_residual", "is_symmetric", "project", "steiner", "steiner_step"]


@dataclass(frozen=True)
class SteinerResult:
    body: ConvexBody2
    pruned_area: float = 0.0
    pruned_height: float = 0.0


def project(K: ConvexBody2, u: Direction, tol: Tolerances = DEFAULT_TOLERANCES) -> ConvexBody2:
    """Orthogonal projection of K onto the line u-perp through the origin."""
    w = np.array([u.uy, -u.ux])
    a = K.vertices @ w
    lo, hi = float(a.min()), float(a.max())
    return normalize([lo * w, hi * w], tol)


def steiner_step(K: ConvexBody2, u: Direction, tol: Tolerances = DEFAULT_TOLERANCES) -> SteinerResult:
    """Symmetral of K in direction u, with what vertex pruning cost.

    Chords of K parallel to u are slid along u until each is centered on
    u-perp. For a polygon the half-chord function is concave and piecewise
    linear with breakpoints at the vertex abscissae, so the symmetral is the
    polygon through (a_k, +-f(a_k)). Breakpoints whose removal changes the
    area by at most ``tol.area_tol`` are dropped in mirrored pairs, so the
    output stays exactly symmetric.
    """
    ux, uy = u.ux, u.uy
    w = np.array([uy, -ux])
    if K.is_polygon:
        V, removed, height = _kernels.steiner_polygon(np.ascontiguousarray(K.vertices), ux, uy, tol.area_tol)
        return SteinerResult(_from_ccw(V, tol), float(removed), float(height))
    a = K.vertices @ w
    if K.is_segment and abs(a[1] - a[0]) <= tol.vertex_tol:
        # chord itself parallel to u: recenter it on u-perp
        b = K.vertices @ np.array([ux, uy])
        mid = 0.5 * (a[0] + a[1])
        half = 0.5 * abs(b[1] - b[0])
        uvec = np.array([ux, uy])
        body = normalize([mid * w - half * uvec, mid * w + half * uvec], tol)
        return SteinerResult(body)
    # every chord is a single point: the symmetral is the projection
    return SteinerResult(project(K, u, tol))


def steiner(K: ConvexBody2, u: Direction, tol: Tolerances = DEFAULT_TOLERANCES) -> ConvexBody2:
    return steiner_step(K, u, tol).body


def is_symmetric(K: ConvexBody2, u: Direction, tol: float = 1e-9) -> bool:
    """K coincides with its reflection in u-perp, up to Hausdorff distance tol."""
    return hausdorff(K, reflect(K, u)) <= tol


def fixpoint_residual(K: ConvexBody2, dirs, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Largest Hausdorff distance between K and a one-step symmetral s_v K."""
    dirs = list(dirs)
    if not dirs:
        raise InvalidInputError("fixpoint_residual needs at least one direction")
    return max(hausdorff(steiner(K, v, tol), K) for v in dirs)
