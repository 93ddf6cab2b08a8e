import math

import numpy as np
import pytest

from conftest import SQUARE, TRIANGLE
from steinerlab.generators import random_polygon
from steinerlab.geom2d import Direction, InvalidInputError, area, point, polygon, regular_polygon, segment
from steinerlab.raster import (
    GridBody,
    annulus_experiment,
    grid_area,
    grid_circumradius,
    grid_from_indicator,
    grid_hausdorff,
    grid_steiner,
    rasterize,
    rasterize_hull3,
    read_bitset,
    read_pgm,
    write_bitset,
    write_pgm,
)
from steinerlab.symmetrize import steiner


def test_rasterize_square_area():
    G = rasterize(polygon(SQUARE), 1024, 2.0)
    assert grid_area(G) == pytest.approx(1.0, rel=5e-3)


def test_rasterize_triangle_area():
    G = rasterize(polygon(TRIANGLE), 1024, 2.0)
    assert grid_area(G) == pytest.approx(0.5, rel=5e-3)


def test_rasterize_point_and_segment():
    assert rasterize(point(0.3, 0.2), 64, 1.0).count <= 1
    h = 2.0 / 64
    c = -1 + 10.5 * h
    assert rasterize(point(c, c), 64, 1.0).count == 1
    G = rasterize(segment((-1 + 0.5 * h, c), (1 - 0.5 * h, c)), 64, 1.0)
    assert G.count == 64


def test_rasterize_rejects_oversized_body():
    with pytest.raises(InvalidInputError):
        rasterize(polygon(SQUARE), 64, 0.4)


def test_grid_validation():
    with pytest.raises(InvalidInputError):
        GridBody(2, 100, 1.0, np.zeros((100, 100), bool))
    with pytest.raises(InvalidInputError):
        GridBody(4, 8, 1.0, np.zeros((8,) * 4, bool))
    with pytest.raises(InvalidInputError):
        GridBody(2, 8, 1.0, np.zeros((8, 4), bool))


def test_axis_balancing_counts_and_centering():
    occ = np.zeros((16, 16), bool)
    occ[3, 1:6] = True  # 5 cells, off center
    occ[7, 10:12] = True
    G = grid_steiner(GridBody(2, 16, 1.0, occ), 1)
    assert np.array_equal(G.occupancy.sum(axis=1), occ.sum(axis=1))
    assert np.flatnonzero(G.occupancy[3]).tolist() == [6, 7, 8, 9, 10]
    assert np.flatnonzero(G.occupancy[7]).tolist() == [7, 8]


def test_symmetric_columns_unchanged():
    occ = np.zeros((16, 16), bool)
    occ[:, 6:10] = True
    G = GridBody(2, 16, 1.0, occ)
    assert np.array_equal(grid_steiner(G, 1).occupancy, occ)


def test_direction_along_axis_uses_exact_path():
    G = rasterize(polygon(TRIANGLE), 256, 1.25)
    a = grid_steiner(G, Direction.from_degrees(90))
    b = grid_steiner(G, 1)
    assert np.array_equal(a.occupancy, b.occupancy)


def test_bad_axis():
    G = rasterize(polygon(SQUARE), 16, 1.0)
    with pytest.raises(InvalidInputError):
        grid_steiner(G, 2)
    with pytest.raises(InvalidInputError):
        grid_steiner(G, "y")


def test_grid_metric_examples():
    G = rasterize(polygon(SQUARE), 256, 2.0)
    assert grid_hausdorff(G, G) == 0.0
    shifted = G.like(np.roll(G.occupancy, 3, axis=0))
    assert grid_hausdorff(G, shifted) == pytest.approx(3 * G.cell_size)
    empty = G.like(np.zeros_like(G.occupancy))
    with pytest.raises(InvalidInputError):
        grid_area(empty)
    with pytest.raises(InvalidInputError):
        grid_hausdorff(G, empty)


def test_oblique_symmetral_matches_exact(rng):
    # hulls of many points have no corner thinner than a few cells
    for _ in range(5):
        K = random_polygon(rng, k_min=30, k_max=40, radius=0.95)
        u = Direction.from_angle(float(rng.uniform(0, math.pi)))
        G = grid_steiner(rasterize(K, 1024, 1.0), u)
        E = rasterize(steiner(K, u), 1024, 1.0)
        assert grid_hausdorff(G, E) <= 2 * G.cell_size
        assert grid_area(G) == pytest.approx(grid_area(E), rel=5e-3)


def test_oblique_symmetral_of_regular_polygons():
    for k, deg in [(3, 17.0), (5, 71.5), (7, 133.0)]:
        K = regular_polygon(k, 0.9, phase=0.3)
        u = Direction.from_degrees(deg)
        G = grid_steiner(rasterize(K, 1024, 1.0), u)
        E = rasterize(steiner(K, u), 1024, 1.0)
        assert grid_hausdorff(G, E) <= 2 * G.cell_size
        assert grid_area(G) == pytest.approx(grid_area(E), rel=5e-3)


def test_grid_circumradius():
    G = rasterize(polygon(SQUARE), 512, 1.0)
    assert grid_circumradius(G) == pytest.approx(math.sqrt(0.5), abs=2 * G.cell_size)


def test_three_d_axis_symmetrization():
    pts = np.array([[0, 0, 0], [0.8, 0, 0], [0, 0.8, 0], [0, 0, 0.8]]) - 0.1
    G = rasterize_hull3(pts, 64, 1.0)
    assert grid_area(G) == pytest.approx(0.8 ** 3 / 6, rel=0.1)
    S = grid_steiner(G, 2)
    assert S.count == G.count
    cols = S.occupancy.sum(axis=2)
    assert np.array_equal(cols, G.occupancy.sum(axis=2))
    even = (cols % 2 == 0)
    assert np.array_equal(S.occupancy[even], S.occupancy[even][:, ::-1])
    with pytest.raises(InvalidInputError):
        grid_steiner(G, Direction.from_degrees(30))


def test_even_columns_are_mirror_symmetric():
    G = rasterize(polygon(TRIANGLE), 128, 1.25)
    S = grid_steiner(G, 1)
    even = S.occupancy.sum(axis=1) % 2 == 0
    assert np.array_equal(S.occupancy[even], S.occupancy[even][:, ::-1])


def test_pgm_round_trip(tmp_path):
    G = rasterize(polygon(TRIANGLE), 64, 1.25)
    p = tmp_path / "g.pgm"
    write_pgm(G, p)
    H = read_pgm(p)
    assert H.extent == 1.25 and np.array_equal(H.occupancy, G.occupancy)
    assert p.read_bytes().startswith(b"P5\n")


def test_bitset_round_trip(tmp_path):
    G = grid_from_indicator(lambda x, y, z: x * x + y * y + z * z <= 0.5, 3, 16, 1.0)
    side = write_bitset(G, tmp_path / "g.bits")
    assert side.name == "g.bits.json"
    H = read_bitset(tmp_path / "g.bits")
    assert (H.dim, H.resolution, H.extent) == (3, 16, 1.0)
    assert np.array_equal(H.occupancy, G.occupancy)
    assert (tmp_path / "g.bits").stat().st_size == 16 ** 3 // 8


def test_symmetrization_keeps_grid_area(rng):
    K = random_polygon(rng, radius=0.9)
    G = rasterize(K, 512, 1.0)
    assert grid_area(grid_steiner(G, 0)) == grid_area(G)
    assert grid_area(G) == pytest.approx(area(K), rel=2e-2)


def test_annulus_experiment_runs():
    rows = annulus_experiment(steps=4, resolution=128)
    assert len(rows) == 5
    assert all(r["area"] > 0 for r in rows)
