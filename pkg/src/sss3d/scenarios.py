"""Shipped scenario scenes.

The pillar and L-post scenes are qualitative reconstructions: only their
general layout is known, not exact coordinates.
"""

from __future__ import annotations

import numpy as np

from .scene import Polyhedron, Scene, box_mesh, gen_random_tetrahedra

WORLD = 512.0


def _world(lo=0.0, hi=WORLD):
    return np.full(3, lo, dtype=float), np.full(3, hi, dtype=float)


def empty_scene() -> Scene:
    return Scene([], *_world())


def hollow_box_mesh(outer_lo, outer_hi, inner_lo, inner_hi) -> Polyhedron:
    """A closed shell: outer box with a sealed cavity (inner faces reversed)."""
    outer = box_mesh(outer_lo, outer_hi)
    inner = box_mesh(inner_lo, inner_hi)
    V = np.vstack([outer.vertices, inner.vertices])
    T = np.vstack([outer.triangles, inner.triangles[:, ::-1] + len(outer.vertices)])
    return Polyhedron(V, T)


def hollow_cube_scene(outer=(128.0, 384.0), cavity=(192.0, 320.0)) -> Scene:
    """A solid cube with a closed cavity around the world centre."""
    P = hollow_box_mesh([outer[0]] * 3, [outer[1]] * 3, [cavity[0]] * 3, [cavity[1]] * 3)
    return Scene([P], *_world())


def two_slab_scene(gap: float, thickness: float = 32.0) -> Scene:
    """A wall across the world at x = 256 made of two slabs separated in y
    by a slit of width ``gap`` (touching slabs when ``gap == 0``)."""
    if gap < 0 or gap >= WORLD:
        raise ValueError("gap must lie in [0, world size)")
    x0, x1 = 256.0 - thickness / 2, 256.0 + thickness / 2
    y0, y1 = 256.0 - gap / 2, 256.0 + gap / 2
    a = box_mesh([x0, 0.0, 0.0], [x1, y0, WORLD])
    b = box_mesh([x0, y1, 0.0], [x1, WORLD, WORLD])
    return Scene([a, b], *_world())


def posts_scene() -> Scene:
    """Reconstruction: a 3x3 grid of vertical square pillars."""
    polys = []
    for i in (128.0, 256.0, 384.0):
        for j in (128.0, 256.0, 384.0):
            polys.append(box_mesh([i - 20, j - 20, 32.0], [i + 20, j + 20, 480.0]))
    return Scene(polys, *_world())


def lposts_scene() -> Scene:
    """Reconstruction: pillars carrying horizontal arms (L-shaped posts)."""
    polys = []
    for k, (i, j) in enumerate(((144.0, 144.0), (368.0, 144.0), (144.0, 368.0), (368.0, 368.0))):
        polys.append(box_mesh([i - 16, j - 16, 32.0], [i + 16, j + 16, 448.0]))
        if k % 2 == 0:
            polys.append(box_mesh([i + 16, j - 16, 400.0], [i + 144, j + 16, 432.0]))
        else:
            polys.append(box_mesh([i - 16, j + 16, 96.0], [i + 16, j + 144, 128.0]))
    return Scene(polys, *_world())


def rand_scene(n: int = 40, seed: int = 1) -> Scene:
    return gen_random_tetrahedra(n, seed)


SCENARIOS = {
    "empty": empty_scene,
    "hollow-cube": hollow_cube_scene,
    "slabs-open": lambda: two_slab_scene(128.0),
    "slabs-closed": lambda: two_slab_scene(0.0),
    "posts": posts_scene,
    "lposts": lposts_scene,
    "rand40": rand_scene,
}
