"""Polyhedral obstacle scenes.

The obstacle set is a union of closed, outward-oriented triangle meshes that
may overlap. Boundary features are numbered globally: corners first, then
edges, then walls; the arrays on :class:`Scene` are what the box
classifiers consume in batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geom3 import Corner, Edge, Wall, closest_point_triangle

CORNER, EDGE, WALL = 0, 1, 2


class SceneError(ValueError):
    """Invalid mesh or scene description."""


@dataclass(eq=False)
class Polyhedron:
    """Closed triangle mesh with outward orientation."""

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray = field(init=False)
    edge_tris: np.ndarray = field(init=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=int).reshape(-1, 3)
        self._validate()

    def _validate(self):
        V, T = self.vertices, self.triangles
        if len(T) < 4:
            raise SceneError("a closed mesh needs at least 4 triangles")
        if T.min() < 0 or T.max() >= len(V):
            raise SceneError("triangle index out of range")
        diag = float(np.linalg.norm(V.max(0) - V.min(0)))
        tol = 1e-12 * max(diag, 1e-300)
        directed = {}
        for ti, (a, b, c) in enumerate(T):
            if len({a, b, c}) < 3:
                raise SceneError(f"triangle {ti} repeats a vertex")
            if np.linalg.norm(np.cross(V[b] - V[a], V[c] - V[a])) <= tol * diag:
                raise SceneError(f"triangle {ti} is degenerate")
            for u, v in ((a, b), (b, c), (c, a)):
                if np.linalg.norm(V[u] - V[v]) <= tol:
                    raise SceneError(f"edge ({u}, {v}) has zero length")
                if (u, v) in directed:
                    raise SceneError(f"edge ({u}, {v}) is used twice with the same orientation")
                directed[(u, v)] = ti
        edges, edge_tris = [], []
        for (u, v), ti in directed.items():
            if (v, u) not in directed:
                raise SceneError(f"edge ({u}, {v}) is a boundary edge (open mesh)")
            if u < v:
                edges.append((u, v))
                edge_tris.append((ti, directed[(v, u)]))
        self.edges = np.array(edges, dtype=int).reshape(-1, 2)
        self.edge_tris = np.array(edge_tris, dtype=int).reshape(-1, 2)
        if self.signed_volume() <= 0:
            raise SceneError("mesh is not oriented outward (nonpositive volume)")

    def signed_volume(self) -> float:
        P = self.vertices[self.triangles]
        return float(np.sum(np.einsum("ij,ij->i", P[:, 0], np.cross(P[:, 1], P[:, 2]))) / 6.0)

    def tri_normals(self) -> np.ndarray:
        P = self.vertices[self.triangles]
        n = np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
        return n / np.linalg.norm(n, axis=1)[:, None]

    def vertex_pseudo_normals(self) -> np.ndarray:
        """Angle-weighted sums of incident triangle normals."""
        V, T = self.vertices, self.triangles
        N = self.tri_normals()
        out = np.zeros_like(V)
        for k in range(3):
            a = V[T[:, k]]
            b = V[T[:, (k + 1) % 3]]
            c = V[T[:, (k + 2) % 3]]
            e1 = b - a
            e2 = c - a
            cosang = np.einsum("ij,ij->i", e1, e2) / (np.linalg.norm(e1, axis=1)
                                                    * np.linalg.norm(e2, axis=1))
            ang = np.arccos(np.clip(cosang, -1.0, 1.0))
            np.add.at(out, T[:, k], ang[:, None] * N)
        return out

    def bounds(self):
        return self.vertices.min(0), self.vertices.max(0)


@dataclass(eq=False)
class Scene:
    """Obstacles, their boundary features and the translational world box."""

    polyhedra: list
    world_lo: np.ndarray
    world_hi: np.ndarray

    def __post_init__(self):
        self.world_lo = np.asarray(self.world_lo, dtype=float).reshape(3)
        self.world_hi = np.asarray(self.world_hi, dtype=float).reshape(3)
        if np.any(self.world_hi <= self.world_lo):
            raise SceneError("world box must have positive width")
        corners, c_own, c_pn = [], [], []
        edges, e_own, e_pn = [], [], []
        walls, w_own, w_n = [], [], []
        for k, P in enumerate(self.polyhedra):
            tn = P.tri_normals()
            corners.append(P.vertices)
            c_own.append(np.full(len(P.vertices), k))
            c_pn.append(P.vertex_pseudo_normals())
            edges.append(P.vertices[P.edges])
            e_own.append(np.full(len(P.edges), k))
            e_pn.append(tn[P.edge_tris[:, 0]] + tn[P.edge_tris[:, 1]])
            walls.append(P.vertices[P.triangles])
            w_own.append(np.full(len(P.triangles), k))
            w_n.append(tn)

        def cat(xs, shape):
            return np.concatenate(xs) if xs else np.zeros(shape)

        self.corners = cat(corners, (0, 3))
        self.corner_owner = cat(c_own, (0,)).astype(int)
        self.corner_pn = cat(c_pn, (0, 3))
        self.edges = cat(edges, (0, 2, 3))
        self.edge_owner = cat(e_own, (0,)).astype(int)
        self.edge_pn = cat(e_pn, (0, 3))
        self.walls = cat(walls, (0, 3, 3))
        self.wall_owner = cat(w_own, (0,)).astype(int)
        self.wall_normals = cat(w_n, (0, 3))
        self.n_corners = len(self.corners)
        self.n_edges = len(self.edges)
        self.n_walls = len(self.walls)
        self.n_features = self.n_corners + self.n_edges + self.n_walls
        # per-polyhedron triangle slices into the wall arrays
        offs = np.cumsum([0] + [len(P.triangles) for P in self.polyhedra])
        self._tri_slices = [slice(int(a), int(b)) for a, b in zip(offs[:-1], offs[1:])]
        if self.n_walls:
            lo = np.array([P.bounds()[0] for P in self.polyhedra])
            hi = np.array([P.bounds()[1] for P in self.polyhedra])
        else:
            lo = hi = np.zeros((0, 3))
        self.poly_lo, self.poly_hi = lo, hi

    # ---------------------------------------------------------------- access

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.world_hi - self.world_lo))

    def feature_kind(self, fid: int) -> int:
        if fid < self.n_corners:
            return CORNER
        if fid < self.n_corners + self.n_edges:
            return EDGE
        return WALL

    def feature(self, fid: int):
        """Feature object for a global id."""
        if fid < self.n_corners:
            return Corner(self.corners[fid], int(self.corner_owner[fid]))
        fid -= self.n_corners
        if fid < self.n_edges:
            a, b = self.edges[fid]
            return Edge(a, b, int(self.edge_owner[fid]))
        fid -= self.n_edges
        p1, p2, p3 = self.walls[fid]
        return Wall(p1, p2, p3, int(self.wall_owner[fid]), self.wall_normals[fid])

    @property
    def features(self):
        return [self.feature(i) for i in range(self.n_features)]

    def split_ids(self, ids):
        """Split global ids into (corner, edge, wall) local index arrays."""
        ids = np.asarray(ids, dtype=int)
        nc, ne = self.n_corners, self.n_edges
        return ids[ids < nc], ids[(ids >= nc) & (ids < nc + ne)] - nc, ids[ids >= nc + ne] - nc - ne

    def point_feature_dists(self, p, ids=None):
        """Distances from ``p`` to the given features (all by default)."""
        from .geom3 import point_segment_dist, point_triangle_dist
        if ids is None:
            ids = np.arange(self.n_features)
        ci, ei, wi = self.split_ids(ids)
        p = np.asarray(p, dtype=float)
        return np.concatenate([
            np.linalg.norm(self.corners[ci] - p, axis=1),
            point_segment_dist(p, self.edges[ei, 0], self.edges[ei, 1]),
            point_triangle_dist(p, self.walls[wi, 0], self.walls[wi, 1], self.walls[wi, 2]),
        ])

    def closest_points(self, p, ids):
        """Closest points on the given features (same order as split_ids)."""
        from .geom3 import closest_point_triangle as cpt
        ci, ei, wi = self.split_ids(ids)
        p = np.asarray(p, dtype=float)
        a, b = self.edges[ei, 0], self.edges[ei, 1]
        d = b - a
        t = np.clip(np.einsum("ij,ij->i", p - a, d) / np.einsum("ij,ij->i", d, d), 0, 1)
        return np.concatenate([
            self.corners[ci],
            a + t[:, None] * d,
            cpt(p, self.walls[wi, 0], self.walls[wi, 1], self.walls[wi, 2]).reshape(-1, 3),
        ])


def build_features(polyhedra, world_lo=(0, 0, 0), world_hi=(512, 512, 512)) -> Scene:
    """Scene from validated polyhedra (or ``(vertices, triangles)`` pairs)."""
    polys = [P if isinstance(P, Polyhedron) else Polyhedron(*P) for P in polyhedra]
    return Scene(polys, world_lo, world_hi)


# ------------------------------------------------------------ closest feature

def _closest_on_polyhedron(P: Polyhedron, q):
    """Closest boundary point, its feature (kind, local index) and distance."""
    V, T = P.vertices, P.triangles
    q = np.asarray(q, dtype=float)
    X = closest_point_triangle(q, V[T[:, 0]], V[T[:, 1]], V[T[:, 2]])
    d = np.linalg.norm(X - q, axis=1)
    ti = int(np.argmin(d))
    x = X[ti]
    dmin = float(d[ti])
    scale = max(1.0, float(np.max(np.abs(V))))
    tol = 1e-10 * scale
    tri = T[ti]
    # identify the lowest-dimensional feature containing x
    vd = np.linalg.norm(V[tri] - x, axis=1)
    k = int(np.argmin(vd))
    if vd[k] <= tol:
        return x, (CORNER, int(tri[k])), dmin
    for u, v in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
        a, b = V[u], V[v]
        e = b - a
        t = float((x - a) @ e / (e @ e))
        if np.linalg.norm(a + t * e - x) <= tol:
            lo, hi = (u, v) if u < v else (v, u)
            ei = int(np.nonzero((P.edges[:, 0] == lo) & (P.edges[:, 1] == hi))[0][0])
            return x, (EDGE, ei), dmin
    return x, (WALL, ti), dmin


def closest_feature(P: Polyhedron, q):
    """The boundary feature of ``P`` nearest to ``q``.

    All triangles are scanned (vectorized) and the nearest point is assigned
    to the lowest-dimensional feature containing it, so ties between a
    corner and its incident edges or walls resolve to the corner.
    """
    _, (kind, i), _ = _closest_on_polyhedron(P, q)
    V = P.vertices
    if kind == CORNER:
        return Corner(V[i])
    if kind == EDGE:
        a, b = P.edges[i]
        return Edge(V[a], V[b])
    t = P.triangles[i]
    return Wall(V[t[0]], V[t[1]], V[t[2]], normal=P.tri_normals()[i])


def _pseudo_normal(P: Polyhedron, kind, i):
    if kind == CORNER:
        return P.vertex_pseudo_normals()[i]
    tn = P.tri_normals()
    if kind == EDGE:
        a, b = P.edge_tris[i]
        return tn[a] + tn[b]
    return tn[i]


def classify_corner(P: Polyhedron, c, q) -> str:
    """``'pseudo-convex'`` or ``'pseudo-concave'`` for the corner ``c`` closest to ``q``.

    The witness half-space through ``c`` is bounded by the plane tangent at
    ``c`` to the ball around ``q``. Its side is decided with the
    angle-weighted pseudo-normal of the corner, which points away from the
    solid exactly when ``q`` is outside.
    """
    V = P.vertices
    c = np.asarray(c, dtype=float)
    i = int(np.argmin(np.linalg.norm(V - c, axis=1)))
    n = P.vertex_pseudo_normals()[i]
    return "pseudo-convex" if float((np.asarray(q, dtype=float) - V[i]) @ n) > 0 else "pseudo-concave"


def point_inside_polyhedron(P: Polyhedron, q) -> bool:
    x, (kind, i), d = _closest_on_polyhedron(P, q)
    if d == 0.0:
        return True
    return float((np.asarray(q, dtype=float) - x) @ _pseudo_normal(P, kind, i)) < 0


def point_inside_union(scene: Scene, q, candidates=None) -> bool:
    """Is ``q`` inside any candidate polyhedron (all of them by default)?"""
    q = np.asarray(q, dtype=float)
    ids = range(len(scene.polyhedra)) if candidates is None else candidates
    for k in ids:
        if np.any(q < scene.poly_lo[k]) or np.any(q > scene.poly_hi[k]):
            continue
        if point_inside_polyhedron(scene.polyhedra[k], q):
            return True
    return False


# ---------------------------------------------------------------- clearance

def segment_segment_dist(p0, p1, q0, q1):
    """Distances between segment batches ``[p0, p1]`` and ``[q0, q1]``."""
    p0, p1, q0, q1 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (p0, p1, q0, q1)))
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = np.sum(d1 * d1, -1)
    e = np.sum(d2 * d2, -1)
    f = np.sum(d2 * r, -1)
    c = np.sum(d1 * r, -1)
    b = np.sum(d1 * d2, -1)
    denom = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 1e-14 * a * e, np.clip((b * f - c * e) / denom, 0, 1), 0.0)
        t = (b * s + f) / e
        s = np.where(t < 0, np.clip(-c / a, 0, 1), np.where(t > 1, np.clip((b - c) / a, 0, 1), s))
        t = np.clip(t, 0, 1)
    return np.linalg.norm(p0 + s[..., None] * d1 - (q0 + t[..., None] * d2), axis=-1)


def segment_hits_triangles(a, b, T):
    """Does segment ``[a, b]`` meet each closed triangle in ``T`` (N, 3, 3)?"""
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a
    v0, v1, v2 = T[:, 0], T[:, 1], T[:, 2]
    e1, e2 = v1 - v0, v2 - v0
    h = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, h)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / det
        s = a - v0
        u = inv * np.einsum("ij,ij->i", s, h)
        qv = np.cross(s, e1)
        v = inv * (qv @ d)
        t = inv * np.einsum("ij,ij->i", e2, qv)
        eps = 1e-12
        hit = (np.abs(det) > 1e-300) & (u >= -eps) & (v >= -eps) & (u + v <= 1 + eps) \
            & (t >= -eps) & (t <= 1 + eps)
    return hit


def segment_triangle_dist(a, b, T):
    """Exact distance between segment ``[a, b]`` and each triangle of ``T``."""
    from .geom3 import point_triangle_dist
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = np.minimum(point_triangle_dist(a, T[:, 0], T[:, 1], T[:, 2]),
                   point_triangle_dist(b, T[:, 0], T[:, 1], T[:, 2]))
    for i, j in ((0, 1), (1, 2), (2, 0)):
        d = np.minimum(d, segment_segment_dist(a, b, T[:, i], T[:, j]))
    return np.where(segment_hits_triangles(a, b, T), 0.0, d)


def clearance(robot, config, scene: Scene) -> float:
    """Separation between the robot footprint and the obstacles (0 on collision).

    An empty scene reports the world box diameter.
    """
    if scene.n_walls == 0:
        return scene.diameter
    return robot.clearance(config, scene)


# ----------------------------------------------------------- random scenes

_TET_TRIS = np.array([[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]])


def tetrahedron(verts) -> Polyhedron:
    """Outward-oriented tetrahedron on four points."""
    v = np.asarray(verts, dtype=float).reshape(4, 3)
    vol = np.dot(v[1] - v[0], np.cross(v[2] - v[0], v[3] - v[0]))
    if vol < 0:
        v = v[[0, 2, 1, 3]]
    return Polyhedron(v, _TET_TRIS)


def box_mesh(lo, hi) -> Polyhedron:
    """Axis-aligned box as a 12-triangle outward mesh."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    V = np.array([[(hi if (k >> ax) & 1 else lo)[ax] for ax in range(3)] for k in range(8)])
    quads = [(0, 2, 3, 1), (4, 5, 7, 6), (0, 1, 5, 4), (2, 6, 7, 3), (0, 4, 6, 2), (1, 3, 7, 5)]
    T = []
    for a, b, c, d in quads:
        T += [(a, b, c), (a, c, d)]
    return Polyhedron(V, T)


def gen_random_tetrahedra(n: int, seed: int, world_lo=(0, 0, 0), world_hi=(512, 512, 512),
                          size_range=(32.0, 96.0)) -> Scene:
    """``n`` random tetrahedra inside the world box, reproducible from ``seed``.

    Each tetrahedron draws a size ``s`` from ``size_range`` and a centre
    keeping it inside the box, then four vertices within ``s`` of the centre.
    Nearly flat samples (volume below ``1e-9 s^3``) are redrawn.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    lo = np.asarray(world_lo, dtype=float)
    hi = np.asarray(world_hi, dtype=float)
    if not 0 < size_range[0] <= size_range[1] < 0.5 * float(np.min(hi - lo)):
        raise ValueError("size range must fit inside half the world box")
    polys = []
    while len(polys) < n:
        s = rng.uniform(*size_range)
        c = rng.uniform(lo + s, hi - s)
        v = c + rng.uniform(-s, s, size=(4, 3))
        vol = abs(np.dot(v[1] - v[0], np.cross(v[2] - v[0], v[3] - v[0]))) / 6.0
        if vol < 1e-9 * s ** 3:
            continue
        polys.append(tetrahedron(v))
    return Scene(polys, lo, hi)
