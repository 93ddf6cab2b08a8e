import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SQUARE, TRIANGLE, coords, directions, polygons
from oracles import disk_area_grid, mixed_area_polar, omega_quadrature
from steinerlab.functionals import adaptive_simpson, disk_intersection_area, mixed_area, mixed_area_polarized, omega
from steinerlab.generators import random_polygon
from steinerlab.geom2d import (
    DEFAULT_TOLERANCES,
    area,
    disk_polygon,
    hausdorff,
    minkowski_sum,
    perimeter,
    point,
    polygon,
    regular_polygon,
    scale,
    segment,
    translate,
)
from steinerlab.symmetrize import steiner

Q2 = 2 * DEFAULT_TOLERANCES.quadrature_tol


def test_disk_intersection_examples():
    sq = polygon(SQUARE)
    assert disk_intersection_area(sq, 10) == pytest.approx(1.0, abs=1e-15)
    assert disk_intersection_area(sq, 0.5) == pytest.approx(math.pi / 4, abs=1e-15)
    assert disk_intersection_area(polygon(TRIANGLE), 0.25) == pytest.approx(math.pi / 64, abs=1e-15)
    assert disk_intersection_area(sq, 0) == 0.0
    assert disk_intersection_area(segment((0, 0), (1, 0)), 1) == 0.0


def test_disk_intersection_matches_grid(rng):
    for _ in range(6):
        K = translate(random_polygon(rng), rng.uniform(-0.5, 0.5, 2))
        r = float(rng.uniform(0.2, 1.2))
        ref = disk_area_grid(K.vertices, r, n=2048)
        assert disk_intersection_area(K, r) == pytest.approx(ref, abs=4e-3 * max(area(K), 1e-3))


def test_adaptive_simpson():
    val, err = adaptive_simpson(math.sin, 0.0, math.pi, 1e-12)
    assert val == pytest.approx(2.0, abs=1e-12) and err <= 1e-11
    val, _ = adaptive_simpson(lambda x: abs(x - 0.3), 0.0, 1.0, 1e-12)
    assert val == pytest.approx(0.29, abs=1e-12)


def test_omega_vanishes_without_interior():
    assert omega(segment((0, 0), (1, 1))).value == 0.0
    assert omega(point(0.2, 0.1)).value == 0.0


def test_omega_unit_square_matches_area_integral():
    val = omega(polygon(SQUARE))
    assert val.value > 0
    assert val.value == pytest.approx(omega_quadrature(np.array(SQUARE)), abs=1e-9)
    assert val.abs_error_bound <= DEFAULT_TOLERANCES.quadrature_tol


def test_omega_matches_area_integral_on_random_bodies(rng):
    for shift in ((0, 0), (1.5, 0.2), (-0.3, 2.0)):
        K = translate(random_polygon(rng), shift)
        assert omega(K).value == pytest.approx(omega_quadrature(K.vertices), abs=1e-9)


def test_omega_many_vertices():
    K = disk_polygon(1.0, 2000)
    assert omega(K).value == pytest.approx(omega_quadrature(K.vertices), abs=1e-8)


def test_mixed_area_examples():
    unit = polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert mixed_area(unit, unit) == pytest.approx(1.0)
    sq = polygon(SQUARE)
    assert mixed_area(sq, point(0, 0)) == pytest.approx(0.0, abs=1e-15)
    assert mixed_area(sq, point(3, -2)) == pytest.approx(0.0, abs=1e-14)
    tri = polygon(TRIANGLE)
    assert mixed_area(tri, tri) == pytest.approx(area(tri))


def test_mixed_area_perimeter_identity():
    B = disk_polygon(radius=1.0, n=256)
    for K in (polygon(SQUARE), polygon(TRIANGLE), regular_polygon(7)):
        assert 2 * mixed_area(K, B) == pytest.approx(perimeter(K), abs=1e-3)


@given(polygons(), polygons())
def test_mixed_area_matches_polarization(K, L):
    ref = mixed_area_polar(K.vertices, L.vertices)
    assert mixed_area(K, L) == pytest.approx(ref, abs=1e-12)
    assert mixed_area_polarized(K, L) == pytest.approx(ref, abs=1e-12)
    assert mixed_area(K, L) == pytest.approx(mixed_area(L, K), abs=1e-12)


@given(polygons(), st.tuples(coords, coords))
def test_mixed_area_with_segment(K, end):
    S = segment((0, 0), end)
    ref = (area(minkowski_sum(K, S)) - area(K)) / 2
    assert mixed_area(K, S) == pytest.approx(ref, abs=1e-12)


@given(polygons(), polygons(), directions)
def test_mixed_area_does_not_grow(K, L, u):
    assert mixed_area(steiner(K, u), steiner(L, u)) <= mixed_area(K, L) + 1e-9


@settings(max_examples=40)
@given(polygons(), directions)
def test_omega_does_not_decrease(K, u):
    S = steiner(K, u)
    gain = omega(S).value - omega(K).value
    assert gain >= -Q2
    if hausdorff(S, K) >= 1e-3 and area(K) >= 0.1:
        assert gain > Q2
    if hausdorff(S, K) <= 1e-9:
        assert abs(gain) <= Q2


@settings(max_examples=30)
@given(polygons())
def test_omega_monotone_under_inclusion(K):
    L = minkowski_sum(K, regular_polygon(6, 0.1))
    assert omega(L).value >= omega(K).value - Q2


@settings(max_examples=20)
@given(polygons())
def test_omega_continuous_along_dilations(K):
    base = omega(K).value
    gaps = [abs(omega(scale(K, 1 + 1 / m)).value - base) for m in (1, 4, 16, 64, 256)]
    assert all(b <= a + Q2 for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] <= 0.02 * max(gaps[0], 1e-12) + Q2
