import math

import numpy as np
import pytest
from hypothesis import given

from conftest import SQUARE, TRIANGLE, bodies, directions, polygons
from oracles import steiner_chords
from steinerlab.geom2d import (
    Direction,
    InvalidInputError,
    area,
    hausdorff,
    minkowski_sum,
    perimeter,
    point,
    polygon,
    regular_polygon,
    scale,
    segment,
    support_difference_range,
)
from steinerlab.raster import grid_steiner, rasterize
from steinerlab.symmetrize import fixpoint_residual, is_symmetric, project, steiner, steiner_step

X = Direction.from_vector(1, 0)
Y = Direction.from_vector(0, 1)


def test_project_examples():
    P = project(polygon(SQUARE), Y)
    assert P.kind == "segment"
    np.testing.assert_allclose(P.vertices, [[-0.5, 0], [0.5, 0]])
    np.testing.assert_array_equal(project(point(3, 4), X).vertices, [[0, 4]])
    np.testing.assert_array_equal(project(segment((0, 0), (2, 2)), X).vertices, [[0, 0], [0, 2]])


def test_steiner_examples():
    sq = polygon(SQUARE)
    assert steiner(sq, Y) == sq
    T = steiner(polygon(TRIANGLE), Y)
    assert hausdorff(T, polygon([(0, 0.5), (0, -0.5), (1, 0)])) < 1e-15
    S = steiner(segment((0, 0), (2, 2)), X)
    np.testing.assert_array_equal(S.vertices, [[0, 0], [0, 2]])


def test_segment_parallel_to_u_is_recentered():
    S = steiner(segment((1, 3), (4, 3)), X)
    np.testing.assert_allclose(S.vertices, [[-1.5, 3], [1.5, 3]])


def test_point_projects():
    np.testing.assert_array_equal(steiner(point(3, 4), X).vertices, [[0, 4]])


def test_triangle_symmetral_matches_grid_oracle():
    tri = polygon(TRIANGLE)
    G = grid_steiner(rasterize(tri, 1024, 1.25), 1)
    E = rasterize(steiner(tri, Y), 1024, 1.25)
    agree = np.mean(G.occupancy == E.occupancy)
    assert agree >= 0.99
    overlap = np.sum(G.occupancy & E.occupancy) / np.sum(G.occupancy | E.occupancy)
    assert overlap >= 0.99


def test_is_symmetric_examples():
    assert is_symmetric(polygon(SQUARE), X)
    assert not is_symmetric(polygon(TRIANGLE), Y)


def test_fixpoint_residual_examples():
    disk = regular_polygon(64)
    axes = [Direction.from_angle(k * math.pi / 64) for k in range(4)]
    assert fixpoint_residual(disk, axes) <= 1e-12
    assert fixpoint_residual(polygon(SQUARE), [X]) == 0.0
    tri = polygon(TRIANGLE)
    r = fixpoint_residual(tri, [Y])
    assert r == pytest.approx(hausdorff(tri, steiner(tri, Y))) and r > 0.1
    with pytest.raises(InvalidInputError):
        fixpoint_residual(tri, [])


def test_pruning_is_reported():
    fine = regular_polygon(4000)
    res = steiner_step(fine, Direction.from_angle(0.3))
    assert res.pruned_area >= 0.0
    assert abs(area(res.body) - area(fine) + res.pruned_area) < 1e-12


def test_discontinuity_at_segments():
    u = X
    prev = math.inf
    for i in range(1, 15):
        ui = Direction.from_angle(2.0 ** -i)
        d = hausdorff(steiner(segment(-ui.vector, ui.vector), u), point(0, 0))
        assert d < prev
        prev = d
    assert prev < 1e-3
    K = segment((-1, 0), (1, 0))
    assert hausdorff(steiner(K, u), K) == 0.0


# -- properties -------------------------------------------------------------


@given(polygons(), directions)
def test_chords_match_clipping_oracle(K, u):
    """Half-chords of the symmetral equal half the chord lengths of K."""
    S = steiner(K, u)
    a = K.vertices @ u.perp
    samples = np.linspace(a.min(), a.max(), 41)[1:-1]
    ref = steiner_chords(K.vertices, u.vector, samples)
    got = steiner_chords(S.vertices, u.vector, samples)
    # pruning may shave at most a sliver of height per chord
    assert np.max(np.abs(got - ref)) <= 1e-6


@given(polygons(), directions)
def test_area_preserved(K, u):
    assert abs(area(steiner(K, u)) - area(K)) <= 1e-12 * max(1.0, area(K)) + 1e-12


@given(polygons(), directions)
def test_projection_preserved(K, u):
    assert hausdorff(project(steiner(K, u), u), project(K, u)) <= 1e-12


@given(bodies(), directions)
def test_symmetral_is_symmetric_and_idempotent(K, u):
    S = steiner(K, u)
    assert is_symmetric(S, u, 1e-9)
    assert hausdorff(steiner(S, u), S) <= 1e-9


@given(polygons(), directions)
def test_inclusion_is_preserved(K, u):
    L = minkowski_sum(K, regular_polygon(5, 0.2, phase=0.1))  # contains K
    assert support_difference_range(K, L)[1] <= 1e-12
    _, hi = support_difference_range(steiner(K, u), steiner(L, u))
    assert hi <= 1e-9


@given(polygons(), directions)
def test_perimeter_does_not_grow(K, u):
    assert perimeter(steiner(K, u)) <= perimeter(K) + 1e-9


@given(polygons(), directions)
def test_descending_continuity(K, u):
    S = steiner(K, u)
    dists = [hausdorff(steiner(scale(K, 1 + 1 / m), u), S) for m in (1, 2, 4, 8, 16, 32, 64)]
    assert all(b <= a + 1e-12 for a, b in zip(dists, dists[1:]))
    assert dists[-1] <= 0.05 * max(1.0, dists[0])
