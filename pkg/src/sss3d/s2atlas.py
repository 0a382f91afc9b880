"""The square model of the direction sphere: the surface of ``[-1, 1]^3``.

A direction ``q`` is represented by ``q / |q|_inf`` on one of the six faces,
indexed ``0..5`` as ``+x, -x, +y, -y, +z, -z``. Inside a face the chart
coordinates ``(u, v)`` are the two remaining coordinates in increasing axis
order, so ``+x`` uses ``(y, z)``, ``+y`` uses ``(x, z)`` and ``+z`` uses
``(x, y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import itertools
import math

import numpy as np

from .geom3 import RoundCone

FACE_NAMES = ("+x", "-x", "+y", "-y", "+z", "-z")
FACE_AXIS = (0, 0, 1, 1, 2, 2)
FACE_SIGN = (1.0, -1.0, 1.0, -1.0, 1.0, -1.0)
_UV_AXES = ((1, 2), (1, 2), (0, 2), (0, 2), (0, 1), (0, 1))


def face_index(name: str) -> int:
    return FACE_NAMES.index(name)


@dataclass(frozen=True)
class CubePoint:
    """A point of the cube surface with its face and chart coordinates."""

    face: int
    u: float
    v: float

    @property
    def q(self) -> np.ndarray:
        return chart(self.face, self.u, self.v)

    @property
    def face_name(self) -> str:
        return FACE_NAMES[self.face]


def chart(face: int, u, v) -> np.ndarray:
    """Cube-surface point(s) for chart coordinates on ``face``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = np.empty(np.broadcast(u, v).shape + (3,))
    a, b = _UV_AXES[face]
    out[..., FACE_AXIS[face]] = FACE_SIGN[face]
    out[..., a] = u
    out[..., b] = v
    return out


def project_to_cube(q) -> CubePoint:
    """Central projection of a nonzero vector onto the cube surface.

    Points on cube edges or corners go to the first face in the order
    ``+x, -x, +y, -y, +z, -z``.
    """
    q = np.asarray(q, dtype=float).reshape(3)
    m = float(np.max(np.abs(q)))
    if not m > 0 or not np.all(np.isfinite(q)):
        raise ValueError("undefined direction")
    qh = q / m
    for face in range(6):
        ax = FACE_AXIS[face]
        if qh[ax] * FACE_SIGN[face] >= 1.0 - 1e-12:
            a, b = _UV_AXES[face]
            return CubePoint(face, float(qh[a]), float(qh[b]))
    raise AssertionError("unreachable")


def project_batch(Q):
    """Vectorized :func:`project_to_cube`: returns (faces, u, v) arrays."""
    Q = np.asarray(Q, dtype=float)
    m = np.max(np.abs(Q), axis=-1)
    qh = Q / m[..., None]
    faces = np.full(m.shape, -1, dtype=int)
    for face in range(5, -1, -1):
        hit = qh[..., FACE_AXIS[face]] * FACE_SIGN[face] >= 1.0 - 1e-12
        faces = np.where(hit, face, faces)
    u = np.empty(m.shape)
    v = np.empty(m.shape)
    for face in range(6):
        sel = faces == face
        a, b = _UV_AXES[face]
        u[sel] = qh[..., a][sel]
        v[sel] = qh[..., b][sel]
    return faces, u, v


def lift_to_sphere(p: CubePoint) -> np.ndarray:
    q = p.q
    return q / np.linalg.norm(q)


def geodesic_dist_sphere(p, q) -> float:
    c = float(np.clip(np.dot(p, q), -1.0, 1.0))
    return math.acos(c)


# ----------------------------------------------------------- cube geodesics

def _adjacent_faces(f, g):
    return FACE_AXIS[f] != FACE_AXIS[g]


def _face_normal(f):
    n = np.zeros(3)
    n[FACE_AXIS[f]] = FACE_SIGN[f]
    return n


def _shared_edge(f, g):
    """Endpoints of the cube edge shared by adjacent faces ``f`` and ``g``."""
    fixed = {FACE_AXIS[f]: FACE_SIGN[f], FACE_AXIS[g]: FACE_SIGN[g]}
    free = ({0, 1, 2} - set(fixed)).pop()
    a = np.zeros(3)
    b = np.zeros(3)
    for ax, s in fixed.items():
        a[ax] = b[ax] = s
    a[free], b[free] = -1.0, 1.0
    return a, b


def _rotation(axis, angle):
    axis = axis / np.linalg.norm(axis)
    K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)


@lru_cache(maxsize=None)
def _unfoldings(f1, f2):
    """Face sequences from ``f1`` to ``f2`` with at most two intermediate faces,
    each with the rigid map (R, t) that unfolds ``f2`` into the plane of
    ``f1`` and the unfolded hinge edges in order."""
    if f1 == f2:
        return [(np.eye(3), np.zeros(3), [])]
    seqs = []
    others = [f for f in range(6) if f not in (f1, f2)]
    if _adjacent_faces(f1, f2):
        seqs.append((f1, f2))
    for a in others:
        if _adjacent_faces(f1, a) and _adjacent_faces(a, f2):
            seqs.append((f1, a, f2))
    for a, b in itertools.permutations(others, 2):
        if _adjacent_faces(f1, a) and _adjacent_faces(a, b) and _adjacent_faces(b, f2):
            seqs.append((f1, a, b, f2))
    out = []
    for seq in seqs:
        R = np.eye(3)
        t = np.zeros(3)
        hinges = []
        for A, B in zip(seq[:-1], seq[1:]):
            e0, e1 = _shared_edge(A, B)
            # hinge in current unfolded coordinates
            h0, h1 = R @ e0 + t, R @ e1 + t
            hinges.append((h0, h1))
            # rotate face B about its edge with A so that it lies flat next to A
            Rl = _rotation(np.cross(_face_normal(B), _face_normal(A)), math.pi / 2)
            # x -> R (Rl (x - e0) + e0) + t
            t = R @ (e0 - Rl @ e0) + t
            R = R @ Rl
        out.append((R, t, hinges))
    return out


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def geodesic_dist_cube_batch(fa, ua, va, fb, ub, vb):
    """Shortest surface distances between batches of cube points."""
    fa = np.asarray(fa)
    fb = np.asarray(fb)
    n = fa.shape[0]
    P = np.stack([chart(int(f), u, v) for f, u, v in zip(fa, ua, va)]) if n else np.zeros((0, 3))
    Q = np.stack([chart(int(f), u, v) for f, u, v in zip(fb, ub, vb)]) if n else np.zeros((0, 3))
    out = np.full(n, np.inf)
    for f1 in range(6):
        for f2 in range(6):
            sel = np.nonzero((fa == f1) & (fb == f2))[0]
            if sel.size == 0:
                continue
            p = P[sel]
            q = Q[sel]
            ax = _UV_AXES[f1]
            p2 = p[:, ax]
            best = np.full(sel.size, np.inf)
            for R, t, hinges in _unfoldings(f1, f2):
                qq = q @ R.T + t
                d = np.linalg.norm(qq - p, axis=1)
                ok = np.ones(sel.size, dtype=bool)
                q2 = qq[:, ax]
                s_prev = np.zeros(sel.size)
                for h0, h1 in hinges:
                    a2, b2 = h0[list(ax)], h1[list(ax)]
                    r = q2 - p2
                    e = b2 - a2
                    den = _cross2(r, e)
                    w = a2 - p2
                    with np.errstate(divide="ignore", invalid="ignore"):
                        s = _cross2(w, e) / den
                        u = _cross2(w, r) / den
                    tol = 1e-9
                    good = (np.abs(den) > 1e-14) & (s >= s_prev - tol) & (s <= 1 + tol) \
                        & (u >= -tol) & (u <= 1 + tol)
                    ok &= good
                    s_prev = np.where(good, s, s_prev)
                best = np.where(ok, np.minimum(best, d), best)
            out[sel] = best
    return out


def geodesic_dist_cube(p: CubePoint, q: CubePoint) -> float:
    """Length of the shortest path between two points on the cube surface."""
    return float(geodesic_dist_cube_batch(np.array([p.face]), np.array([p.u]), np.array([p.v]),
                                          np.array([q.face]), np.array([q.u]), np.array([q.v]))[0])


# ------------------------------------------------------------ rotation boxes

@dataclass(frozen=True)
class WholeSphere:
    """The root rotational box."""

    @property
    def width(self) -> float:
        return 4.0

    def area(self) -> float:
        return 24.0


@dataclass(frozen=True)
class FaceBox:
    """Square ``[u0, u0 + w] x [v0, v0 + w]`` on one face."""

    face: int
    u0: float
    v0: float
    w: float

    @property
    def width(self) -> float:
        return self.w

    @property
    def is_full_face(self) -> bool:
        return self.w >= 2.0

    def area(self) -> float:
        return self.w * self.w

    def center_uv(self):
        return self.u0 + self.w / 2, self.v0 + self.w / 2

    def center(self) -> np.ndarray:
        """Chart centre as a point of the cube surface."""
        return chart(self.face, *self.center_uv())

    def direction(self) -> np.ndarray:
        c = self.center()
        return c / np.linalg.norm(c)

    def corners(self) -> np.ndarray:
        u = [self.u0, self.u0 + self.w]
        v = [self.v0, self.v0 + self.w]
        return np.array([chart(self.face, a, b) for a in u for b in v])

    def closure_box(self):
        """Closure as a degenerate axis-aligned box ``(lo, hi)`` in R^3."""
        lo = np.zeros(3)
        hi = np.zeros(3)
        ax = FACE_AXIS[self.face]
        lo[ax] = hi[ax] = FACE_SIGN[self.face]
        a, b = _UV_AXES[self.face]
        lo[a], hi[a] = self.u0, self.u0 + self.w
        lo[b], hi[b] = self.v0, self.v0 + self.w
        return lo, hi

    def contains(self, p: CubePoint) -> bool:
        """Half-open membership; the upper end is closed on the face border."""
        if p.face != self.face:
            return False
        u1 = self.u0 + self.w
        v1 = self.v0 + self.w
        return (self.u0 <= p.u and (p.u < u1 or u1 >= 1.0)
                and self.v0 <= p.v and (p.v < v1 or v1 >= 1.0))


RotBox = WholeSphere | FaceBox


def full_face(face: int) -> FaceBox:
    return FaceBox(face, -1.0, -1.0, 2.0)


def split_rotbox(b) -> list:
    """Children of a rotational box: 6 faces for the sphere, else 4 quadrants."""
    if isinstance(b, WholeSphere):
        return [full_face(f) for f in range(6)]
    h = b.w / 2
    return [FaceBox(b.face, b.u0 + i * h, b.v0 + j * h, h) for i in (0, 1) for j in (0, 1)]


def rotbox_contact_dim(a, b) -> int:
    """Dimension of the intersection of the two closures (-1 when empty)."""
    if isinstance(a, WholeSphere) or isinstance(b, WholeSphere):
        return 2
    la, ha = a.closure_box()
    lb, hb = b.closure_box()
    lo = np.maximum(la, lb)
    hi = np.minimum(ha, hb)
    if np.any(lo > hi):
        return -1
    return int(np.sum(hi > lo))


def rotbox_adjacent(a, b) -> bool:
    """Closures share a segment of positive length (across faces too)."""
    return rotbox_contact_dim(a, b) == 1


def rotbox_cone(b: FaceBox, apex):
    """Round cone from ``apex`` enclosing all directions of ``b``.

    Returns ``(cone, capped)``. The cone axis points at the chart centre
    ``c`` and its half-angle is ``asin((w / sqrt 2) / |c|)``; when that
    argument reaches 1 the half-angle is capped at ``pi / 2`` and
    ``capped`` is True.
    """
    c = b.center()
    s = (b.w / math.sqrt(2.0)) / float(np.linalg.norm(c))
    capped = s >= 1.0
    theta = math.pi / 2 if capped else math.asin(s)
    return RoundCone(np.asarray(apex, dtype=float), c, theta), capped


def rotbox_half_angle(b: FaceBox) -> float:
    """Exact maximal angle between the box's central direction and its directions."""
    d = b.direction()
    cs = b.corners()
    cs = cs / np.linalg.norm(cs, axis=1)[:, None]
    # the angle to the centre is maximised at a corner of the chart square
    return float(np.max(np.arccos(np.clip(cs @ d, -1.0, 1.0))))


def sample_directions(b, n, rng) -> np.ndarray:
    """``n`` unit directions drawn uniformly in chart coordinates of ``b``."""
    if isinstance(b, WholeSphere):
        v = rng.normal(size=(n, 3))
        return v / np.linalg.norm(v, axis=1)[:, None]
    u = b.u0 + b.w * rng.random(n)
    v = b.v0 + b.w * rng.random(n)
    q = chart(b.face, u, v)
    return q / np.linalg.norm(q, axis=1)[:, None]
