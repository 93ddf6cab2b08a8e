"""The layering function, mixed areas, and a small adaptive quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geom2d import (
    DEFAULT_TOLERANCES,
    ConvexBody2,
    InvalidInputError,
    Tolerances,
    _distance_to_body,
    _edge_halfplanes,
    area,
    minkowski_sum,
    origin_circumradius,
)

__all__ = [
    "OmegaValue",
    "adaptive_simpson",
    "disk_intersection_area",
    "mixed_area",
    "mixed_area_polarized",
    "omega",
]

SQRT_PI = math.sqrt(math.pi)

# Splitting the range at every kink of r -> area(K cap rB) only pays off for
# small polygons; large ones are near-disks with tiny kinks.
MAX_SPLIT_VERTICES = 64


@dataclass(frozen=True)
class OmegaValue:
    value: float
    abs_error_bound: float

    def __float__(self) -> float:
        return self.value


def disk_intersection_area(K: ConvexBody2, r: float) -> float:
    """Area of K intersected with the origin-centered disk of radius r."""
    if not (r >= 0 and math.isfinite(r)):
        raise InvalidInputError(f"radius must be a nonnegative finite number, got {r!r}")
    if not K.is_polygon:
        return 0.0
    return float(_kernels.disk_area(np.ascontiguousarray(K.vertices), float(r)))


def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 48) -> tuple[float, float]:
    """Integrate f over [a, b] by adaptive Simpson with Richardson correction.

    Returns ``(value, error_estimate)``. An interval is accepted once the
    two-halves estimate differs from the whole-interval one by at most
    15 times its share of ``tol``; the share halves at each split.
    """
    if b < a:
        v, e = adaptive_simpson(f, b, a, tol, max_depth)
        return -v, e
    if b == a:
        return 0.0, 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    err = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, S, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = f(lm)
        frm = f(rm)
        left = (mid - lo) * (flo + 4.0 * flm + fmid) / 6.0
        right = (hi - mid) * (fmid + 4.0 * frm + fhi) / 6.0
        delta = left + right - S
        if abs(delta) <= 15.0 * eps or depth >= max_depth:
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
            continue
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    return total, err


def _kinks(V: np.ndarray, lo: float, hi: float) -> list[float]:
    """Radii in (lo, hi) where the circle passes a vertex or touches an edge."""
    radii = list(np.hypot(V[:, 0], V[:, 1]))
    N, d = _edge_halfplanes(V)
    foot = N * d[:, None]
    A = V
    B = np.roll(V, -1, axis=0)
    t = np.einsum("ij,ij->i", foot - A, B - A) / np.einsum("ij,ij->i", B - A, B - A)
    radii += list(np.abs(d[(t > 0) & (t < 1)]))
    return sorted(r for r in set(radii) if lo < r < hi)


def omega(K: ConvexBody2, tol: Tolerances = DEFAULT_TOLERANCES) -> OmegaValue:
    """Layering function: integral over r >= 0 of area(K cap rB)·exp(-r^2).

    For r beyond the largest vertex norm R the integrand is
    area(K)·exp(-r^2), which integrates in closed form through erfc. If
    the origin is interior, the integrand is pi r^2 exp(-r^2) up to the
    origin-centered inradius, also closed form. The remaining range is
    split at the kinks of the integrand and integrated adaptively.
    """
    if not K.is_polygon:
        return OmegaValue(0.0, 0.0)
    V = np.ascontiguousarray(K.vertices)
    A = area(K)
    R = origin_circumradius(K)
    N, d = _edge_halfplanes(V)
    r_in = float(np.min(d))
    head = 0.0
    if r_in > 0:
        lo = r_in
        head = math.pi * (0.25 * SQRT_PI * math.erf(r_in) - 0.5 * r_in * math.exp(-r_in * r_in))
    else:
        lo = _distance_to_body(K, np.zeros(2))
    tail = A * 0.5 * SQRT_PI * math.erfc(R)

    budget = 0.5 * tol.quadrature_tol * max(1.0, A)
    cuts = [lo]
    if len(V) <= MAX_SPLIT_VERTICES:
        cuts += _kinks(V, lo, R)
    cuts.append(R)

    def integrand(r):
        return _kernels.disk_area(V, r) * math.exp(-r * r)

    body = 0.0
    err = 0.0
    span = max(R - lo, 1e-300)
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        v, e = adaptive_simpson(integrand, a, b, budget * (b - a) / span)
        body += v
        err += e
    value = head + body + tail
    # rounding in the closed-form pieces and the summation
    err += 4.0 * np.finfo(float).eps * max(1.0, abs(value)) * len(cuts)
    return OmegaValue(float(max(value, 0.0)), float(err))


def mixed_area_polarized(K: ConvexBody2, L: ConvexBody2, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """V(K, L) from the polarization identity (area(K+L) - area(K) - area(L)) / 2."""
    return 0.5 * (area(minkowski_sum(K, L, tol)) - area(K) - area(L))


def mixed_area(K: ConvexBody2, L: ConvexBody2, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Mixed area V(K, L): half the sum over edges of K of h_L(normal)·length.

    When K has no interior the edge formula is replaced by polarization.
    """
    if not K.is_polygon:
        return mixed_area_polarized(K, L, tol)
    V = K.vertices
    E = np.roll(V, -1, axis=0) - V
    # outer normal times edge length is (e_y, -e_x) for a CCW cycle
    W = np.column_stack([E[:, 1], -E[:, 0]])
    h = _kernels.support_sweep(np.ascontiguousarray(L.vertices), np.ascontiguousarray(W))
    return 0.5 * float(np.sum(h))
