import numpy as np
import pytest

from oracles import inside_union
from sss3d.geom3 import Corner, Wall
from sss3d.scene import (Polyhedron, SceneError, box_mesh, build_features, classify_corner,
                         closest_feature, gen_random_tetrahedra, point_inside_polyhedron,
                         point_inside_union, tetrahedron)

CUBE = box_mesh([0, 0, 0], [1, 1, 1])


def test_feature_counts():
    tet = tetrahedron([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    s = build_features([tet])
    assert (s.n_corners, s.n_edges, s.n_walls) == (4, 6, 4)
    s = build_features([CUBE])
    assert (s.n_corners, s.n_edges, s.n_walls) == (8, 18, 12)
    assert s.n_features == 38


def test_orientation_is_repaired_for_tetrahedra():
    tet = tetrahedron([[0, 0, 0], [0, 1, 0], [1, 0, 0], [0, 0, 1]])
    assert tet.signed_volume() > 0


def test_open_mesh_rejected():
    with pytest.raises(SceneError, match="open mesh"):
        Polyhedron(CUBE.vertices, CUBE.triangles[:-1])
    with pytest.raises(SceneError, match="twice"):
        Polyhedron(CUBE.vertices, np.vstack([CUBE.triangles, CUBE.triangles[:1]]))


def test_inward_mesh_rejected():
    with pytest.raises(SceneError, match="outward"):
        Polyhedron(CUBE.vertices, CUBE.triangles[:, ::-1])


def test_bad_index_rejected():
    with pytest.raises(SceneError, match="range"):
        Polyhedron([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
                   [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 9]])


def test_closest_feature_examples():
    f = closest_feature(CUBE, [2, 2, 2])
    assert isinstance(f, Corner) and np.allclose(f.p, [1, 1, 1])
    assert isinstance(closest_feature(CUBE, [0.3, 0.6, 2]), Wall)


def test_corner_classification():
    assert classify_corner(CUBE, [1, 1, 1], [2, 2, 2]) == "pseudo-convex"
    assert classify_corner(CUBE, [1, 1, 1], [0.9, 0.9, 0.9]) == "pseudo-concave"


def test_inside_examples():
    assert point_inside_polyhedron(CUBE, [0.5, 0.5, 0.5])
    assert not point_inside_polyhedron(CUBE, [1.5, 0.5, 0.5])
    assert point_inside_polyhedron(CUBE, [1.0, 0.5, 0.5])


def test_inside_agrees_with_ray_parity():
    scene = gen_random_tetrahedra(12, seed=5)
    rng = np.random.default_rng(0)
    near = scene.corners[rng.integers(scene.n_corners, size=2000)] + rng.normal(0, 8, (2000, 3))
    X = np.vstack([rng.uniform(0, 512, (1000, 3)), near])
    ref = inside_union(scene, X)
    got = np.array([point_inside_union(scene, x) for x in X])
    assert ref.sum() > 40
    assert np.array_equal(got, ref)


def test_generator_is_deterministic():
    a = gen_random_tetrahedra(10, seed=3)
    b = gen_random_tetrahedra(10, seed=3)
    c = gen_random_tetrahedra(10, seed=4)
    assert len(a.polyhedra) == 10 and a.n_features == 140
    assert np.array_equal(a.walls, b.walls)
    assert not np.array_equal(a.walls, c.walls)
    assert np.all(a.corners >= 0) and np.all(a.corners <= 512)


def test_generator_rejects_bad_sizes():
    with pytest.raises(ValueError):
        gen_random_tetrahedra(1, 0, size_range=(10.0, 400.0))
