import json
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import SQUARE, TRIANGLE, bodies, directions, polygons
from oracles import circumradius_brute, hausdorff_sampled, inradius_brute, minkowski_brute, trapezoid_area
from steinerlab.geom2d import (
    Ball2,
    DegenerateBodyError,
    Direction,
    InvalidInputError,
    area,
    body_from_json,
    body_to_json,
    circumradius,
    contains_ball,
    diameter,
    hausdorff,
    in_ball,
    inradius,
    mean_width,
    minkowski_sum,
    normalize,
    origin_circumradius,
    origin_inradius,
    perimeter,
    point,
    polygon,
    reflect,
    regular_polygon,
    scale,
    segment,
    support,
    support_difference_range,
    translate,
)

S2 = math.sqrt(2.0)


# -- construction -----------------------------------------------------------


def test_normalize_dispatches_on_dimension():
    assert normalize([(1, 2)]).kind == "point"
    assert normalize([(0, 0), (1, 1), (2, 2)]).kind == "segment"
    assert normalize([(0, 0), (1, 0), (0, 1), (0.2, 0.2)]).n_vertices == 3


def test_normalize_canonical_form():
    K = normalize([(0, 1), (1, 0), (0, 0)])
    np.testing.assert_array_equal(K.vertices, [[0, 0], [1, 0], [0, 1]])


def test_normalize_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        normalize([])
    with pytest.raises(InvalidInputError):
        normalize([(0, math.nan)])


def test_direction_canonical_and_snap():
    u = Direction.from_degrees(270)
    assert (u.ux, u.uy) == (0.0, -1.0)
    assert math.isclose(u.canonical().degrees, 90.0)
    assert Direction.from_vector(3, 4).ux == pytest.approx(0.6)


def test_points_are_frozen():
    K = polygon(SQUARE)
    with pytest.raises(ValueError):
        K.vertices[0, 0] = 2.0


# -- functionals ------------------------------------------------------------


def test_support_examples():
    assert support(polygon(SQUARE), Direction.from_vector(1, 0)) == 0.5
    assert support(point(3, 4), Direction.from_vector(0.6, 0.8)) == pytest.approx(5.0)
    assert support(polygon(TRIANGLE), Direction.from_degrees(45)) == pytest.approx(1 / S2)


def test_area_perimeter_width_examples():
    sq, tri = polygon(SQUARE), polygon(TRIANGLE)
    assert area(sq) == 1.0 and area(segment((0, 0), (2, 2))) == 0.0 and area(tri) == 0.5
    assert perimeter(sq) == 4.0
    assert perimeter(segment((0, 0), (0, 1))) == 2.0
    assert perimeter(tri) == pytest.approx(2 + S2, abs=1e-15)
    assert mean_width(sq) == pytest.approx(4 / math.pi)
    assert mean_width(segment((0, 0), (1, 0))) == pytest.approx(2 / math.pi)
    assert mean_width(point(1, 1)) == 0.0


def test_diameter_examples():
    assert diameter(polygon(SQUARE)) == pytest.approx(S2)
    assert diameter(segment((0, 0), (3, 4))) == 5.0
    assert diameter(regular_polygon(6)) == pytest.approx(2.0)


def test_circumradius_examples():
    b = circumradius(polygon(SQUARE))
    assert b.radius == pytest.approx(S2 / 2) and np.allclose(b.center, 0)
    b = circumradius(segment((-1, 0), (1, 0)))
    assert b.radius == pytest.approx(1.0) and np.allclose(b.center, 0)
    b = circumradius(polygon(TRIANGLE))
    assert b.radius == pytest.approx(S2 / 2) and np.allclose(b.center, 0.5)


def test_inradius_examples():
    b = inradius(polygon(SQUARE))
    assert b.radius == pytest.approx(0.5) and np.allclose(b.center, 0, atol=1e-12)
    assert inradius(polygon(TRIANGLE)).radius == pytest.approx((2 - S2) / 2, abs=1e-12)
    assert inradius(regular_polygon(6)).radius == pytest.approx(math.sqrt(3) / 2, abs=1e-12)
    with pytest.raises(DegenerateBodyError):
        inradius(segment((0, 0), (1, 0)))


def test_inradius_tie_break_is_lexicographic():
    rect = polygon([(0, 0), (4, 0), (4, 1), (0, 1)])
    b = inradius(rect)
    assert b.radius == pytest.approx(0.5)
    assert b.center[0] == pytest.approx(0.5, abs=1e-9)


def test_origin_radii():
    sq = polygon(SQUARE)
    assert origin_circumradius(sq) == pytest.approx(S2 / 2)
    assert origin_inradius(sq) == pytest.approx(0.5)
    assert origin_inradius(translate(sq, (2, 0))) == 0.0


@given(polygons())
def test_circumradius_matches_brute_force(K):
    _, r = circumradius_brute(K.vertices)
    assert circumradius(K).radius == pytest.approx(r, abs=1e-9)


@given(polygons())
def test_inradius_matches_brute_force(K):
    assert inradius(K).radius == pytest.approx(inradius_brute(K.vertices), abs=1e-9)


@given(polygons())
def test_area_matches_trapezoid_rule(K):
    assert area(K) == pytest.approx(trapezoid_area(K.vertices), abs=1e-14)


# -- operations -------------------------------------------------------------


def test_minkowski_examples():
    sq = polygon(SQUARE)
    assert hausdorff(minkowski_sum(sq, sq), scale(sq, 2)) < 1e-15
    tri = polygon(TRIANGLE)
    assert hausdorff(minkowski_sum(tri, point(1, 1)), translate(tri, (1, 1))) < 1e-15
    S = minkowski_sum(segment((0, 0), (1, 0)), segment((0, 0), (0, 1)))
    np.testing.assert_allclose(S.vertices, [[0, 0], [1, 0], [1, 1], [0, 1]])


@given(polygons(), polygons())
def test_minkowski_matches_pairwise_hull(K, L):
    M = minkowski_sum(K, L)
    assert hausdorff(M, normalize(minkowski_brute(K.vertices, L.vertices))) < 1e-12


def test_scale_examples():
    sq = polygon(SQUARE)
    assert area(scale(sq, 2)) == 4.0
    assert scale(sq, 1) == sq
    assert scale(sq, 0).kind == "point"
    with pytest.raises(InvalidInputError):
        scale(sq, -1)


def test_reflect_examples():
    sq = polygon(SQUARE)
    for deg in (0, 90):
        assert hausdorff(reflect(sq, Direction.from_degrees(deg)), sq) == 0.0
    p = reflect(point(1, 0), Direction.from_vector(1, 0))
    np.testing.assert_array_equal(p.vertices, [[-1, 0]])
    T = reflect(polygon(TRIANGLE), Direction.from_vector(1, 0))
    assert hausdorff(T, polygon([(0, 0), (-1, 0), (0, 1)])) == 0.0


def test_hausdorff_examples():
    sq = polygon(SQUARE)
    assert hausdorff(sq, sq) == 0.0
    a = polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    assert hausdorff(a, scale(a, 2)) == pytest.approx(S2)
    assert hausdorff(sq, translate(sq, (0.3, 0))) == pytest.approx(0.3)


def test_support_difference_range_signs():
    a = polygon(SQUARE)
    lo, hi = support_difference_range(a, scale(a, 2))
    assert lo == pytest.approx(-S2 / 2) and hi == pytest.approx(-0.5)


def test_ball_predicates():
    sq = polygon(SQUARE)
    assert contains_ball(sq, Ball2((0, 0), 0.5))
    assert in_ball(sq, Ball2((0, 0), S2 / 2))
    assert not contains_ball(sq, Ball2((0, 0), 0.6))
    assert not in_ball(sq, Ball2((0, 0), 0.7))


def test_json_round_trip():
    for K in (polygon(TRIANGLE), segment((0, 0), (1, 2)), point(3, 4)):
        data = json.loads(json.dumps(body_to_json(K)))
        assert body_from_json(data) == K
    with pytest.raises(InvalidInputError):
        body_from_json({"type": "blob"})


# -- properties -------------------------------------------------------------

coef = st.floats(0.0, 2.0)


@given(polygons(), polygons(), coef, coef)
def test_support_is_linear_in_minkowski_combinations(K, L, a, b):
    # a dilate with area <= area_tol is demoted to a segment by design
    assume(a == 0 or a * a * area(K) > 1e-10)
    assume(b == 0 or b * b * area(L) > 1e-10)
    M = minkowski_sum(scale(K, a), scale(L, b))
    for t in np.linspace(0, 2 * math.pi, 64, endpoint=False):
        u = Direction.from_angle(t)
        assert support(M, u) == pytest.approx(a * support(K, u) + b * support(L, u), abs=1e-9)


@given(polygons(), coef, coef)
def test_scaled_copies_add(K, a, b):
    assume(a == 0 or a * a * area(K) > 1e-10)
    assume(b == 0 or b * b * area(K) > 1e-10)
    M = minkowski_sum(scale(K, a), scale(K, b))
    assert hausdorff(M, scale(K, a + b)) <= 1e-9


@given(bodies(), bodies(), bodies())
def test_hausdorff_is_a_metric(K, L, M):
    d = hausdorff(K, L)
    assert abs(d - hausdorff(L, K)) <= 1e-12
    assert hausdorff(K, M) <= d + hausdorff(L, M) + 1e-9
    assert hausdorff(K, K) <= 1e-12


@given(bodies(), bodies())
def test_hausdorff_matches_sampled_sup(K, L):
    d = hausdorff(K, L)
    bound = max(diameter(K), diameter(L), 1.0) * 2 * math.pi / 8192
    ref = hausdorff_sampled(K.vertices, L.vertices)
    assert ref - 1e-12 <= d <= ref + bound


@given(bodies(), directions)
def test_reflect_is_an_involution(K, u):
    assert hausdorff(reflect(reflect(K, u), u), K) <= 1e-12


@given(bodies())
def test_normalize_is_idempotent(K):
    assert normalize(K.vertices) == K
