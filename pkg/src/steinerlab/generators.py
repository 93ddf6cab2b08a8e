"""Named body generators, so experiments can cite a short spec string.

``regular:k``
    regular k-gon, circumradius 1, centered at the origin, vertex on +x.
``random:k,seed``
    convex hull of k points drawn uniformly from the unit disk.
``segment:len``
    segment of the given length on the x-axis, centered at the origin.
``triangle`` / ``triangle:right`` / ``triangle:equilateral``
    the right triangle (0,0), (1,0), (0,1); or the equilateral triangle
    with circumradius 1 centered at the origin.
"""

from __future__ import annotations

import math

import numpy as np

from .geom2d import ConvexBody2, InvalidInputError, normalize, polygon, regular_polygon, segment

__all__ = ["generate", "random_direction_set", "random_polygon", "uniform_disk_points"]

TRIANGLES = {
    "right": [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)],
}


def uniform_disk_points(rng: np.random.Generator, k: int, radius: float = 1.0) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, k))
    t = rng.uniform(0.0, 2.0 * math.pi, k)
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def random_polygon(rng: np.random.Generator, k_min: int = 3, k_max: int = 12, radius: float = 1.0) -> ConvexBody2:
    """Hull of k uniform points in the disk, k uniform in [k_min, k_max].

    Draws are repeated until the hull has interior.
    """
    while True:
        k = int(rng.integers(k_min, k_max + 1))
        K = normalize(uniform_disk_points(rng, k, radius))
        if K.is_polygon:
            return K


def random_direction_set(rng: np.random.Generator, m: int, min_gap: float = 1e-3) -> list[float]:
    """m angles in [0, pi), pairwise at least min_gap apart modulo pi."""
    while True:
        t = np.sort(rng.uniform(0.0, math.pi, m))
        gaps = np.diff(np.concatenate([t, [t[0] + math.pi]]))
        if m == 1 or gaps.min() > min_gap:
            return t.tolist()


def generate(spec: str) -> ConvexBody2:
    """Build a body from a generator string such as ``"random:8,3"``."""
    name, _, arg = spec.strip().partition(":")
    try:
        if name == "regular":
            return regular_polygon(int(arg))
        if name == "random":
            k, seed = (int(x) for x in arg.split(","))
            if k < 1:
                raise InvalidInputError("random generator needs k >= 1")
            return normalize(uniform_disk_points(np.random.default_rng(seed), k))
        if name == "segment":
            length = float(arg)
            if not length > 0:
                raise InvalidInputError("segment length must be positive")
            return segment((-0.5 * length, 0.0), (0.5 * length, 0.0))
        if name == "triangle":
            kind = arg or "right"
            if kind == "equilateral":
                return regular_polygon(3, phase=math.pi / 2)
            if kind in TRIANGLES:
                return polygon(TRIANGLES[kind])
            raise InvalidInputError(f"unknown triangle preset {kind!r}")
    except ValueError as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"bad generator argument in {spec!r}: {exc}") from None
    raise InvalidInputError(f"unknown generator {spec!r}")
