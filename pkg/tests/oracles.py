"""Independent reference checks shared by the test modules.

Nothing here calls the planner's own hit kernels: collisions are decided by
direct ray/segment/circle versus triangle intersection and ray parity.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from sss3d.box import CBox
from sss3d.s2atlas import FaceBox, WholeSphere, chart, sample_directions

# acceptance criterion number -> (passed, detail)
ACCEPTANCE = {}


def report(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


# ----------------------------------------------------------------- sampling

def sample_configs(B: CBox, n, rng):
    """Positions (n, 3) and unit directions (n, 3) drawn from the box."""
    P = B.center + B.half * rng.uniform(-1.0, 1.0, size=(n, 3))
    return P, sample_directions(B.rot, n, rng)


def random_rotbox(rng, min_depth=0, max_depth=6):
    depth = int(rng.integers(min_depth, max_depth + 1))
    if depth == 0:
        return WholeSphere()
    face = int(rng.integers(6))
    w = 2.0 / 2 ** (depth - 1)
    k = 2 ** (depth - 1)
    i, j = rng.integers(k, size=2)
    return FaceBox(face, -1.0 + i * w, -1.0 + j * w, w)


def random_box(rng, lo=0.0, hi=512.0, half_range=(0.5, 32.0), min_depth=0, max_depth=6):
    h = float(rng.uniform(*half_range))
    c = rng.uniform(lo + h, hi - h, size=3)
    return CBox(c, h, random_rotbox(rng, min_depth, max_depth))


def rod_points(P, D, r0, n=9):
    t = np.linspace(0.0, 1.0, n)
    return P[:, None, :] + r0 * t[None, :, None] * D[:, None, :]


def frames(D):
    """Orthonormal (e1, e2) perpendicular to each row of ``D``."""
    k = np.argmin(np.abs(D), axis=1)
    A = np.eye(3)[k]
    e1 = np.cross(D, A)
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    return e1, np.cross(D, e1)


def ring_points(P, D, r0, n=16):
    e1, e2 = frames(D)
    ph = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    return (P[:, None, :] + r0 * (np.cos(ph)[None, :, None] * e1[:, None, :]
                                  + np.sin(ph)[None, :, None] * e2[:, None, :]))


# -------------------------------------------------------------- collisions

def _bary_inside(X, T):
    """Is X (..., 3) inside the triangle plane-projection of T (..., 3, 3)?"""
    v0, v1, v2 = T[..., 0, :], T[..., 1, :], T[..., 2, :]
    e1, e2, w = v1 - v0, v2 - v0, X - v0
    d11 = np.sum(e1 * e1, -1)
    d12 = np.sum(e1 * e2, -1)
    d22 = np.sum(e2 * e2, -1)
    w1 = np.sum(w * e1, -1)
    w2 = np.sum(w * e2, -1)
    den = d11 * d22 - d12 * d12
    u = (d22 * w1 - d12 * w2) / den
    v = (d11 * w2 - d12 * w1) / den
    return (u >= 0) & (v >= 0) & (u + v <= 1)


def segments_hit_triangles(A, B, T):
    """(K, M) closed segment-triangle intersection, generic position."""
    d = (B - A)[:, None, :]
    v0 = T[None, :, 0]
    e1 = (T[:, 1] - T[:, 0])[None]
    e2 = (T[:, 2] - T[:, 0])[None]
    p = np.cross(d, e2)
    det = np.sum(e1 * p, -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / det
        s = A[:, None, :] - v0
        u = np.sum(s * p, -1) * inv
        q = np.cross(s, e1)
        v = np.sum(d * q, -1) * inv
        t = np.sum(e2 * q, -1) * inv
    return (np.abs(det) > 1e-300) & (u >= 0) & (v >= 0) & (u + v <= 1) & (t >= 0) & (t <= 1)


def circles_hit_triangles(P, D, r0, T):
    """(K, M) circle-triangle intersection for circles centred at P with
    normals D; tangencies and coplanar cases are ignored (measure zero)."""
    e1, e2 = frames(D)
    m = np.cross(T[:, 1] - T[:, 0], T[:, 2] - T[:, 0])
    m /= np.linalg.norm(m, axis=1)[:, None]
    h0 = np.sum((P[:, None, :] - T[None, :, 0]) * m[None], -1)
    A1 = r0 * (e1 @ m.T)
    A2 = r0 * (e2 @ m.T)
    amp = np.hypot(A1, A2)
    ok = amp > np.abs(h0)
    ph0 = np.arctan2(A2, A1)
    with np.errstate(invalid="ignore", divide="ignore"):
        dph = np.arccos(np.clip(-h0 / amp, -1.0, 1.0))
    hit = np.zeros(h0.shape, dtype=bool)
    for sgn in (1.0, -1.0):
        ph = ph0 + sgn * dph
        X = (P[:, None, :] + r0 * (np.cos(ph)[..., None] * e1[:, None, :]
                                   + np.sin(ph)[..., None] * e2[:, None, :]))
        hit |= ok & _bary_inside(X, np.broadcast_to(T[None], X.shape[:2] + (3, 3)))
    return hit


_RAY = np.array([0.5773, 0.5781, 0.5764])
_RAY = _RAY / np.linalg.norm(_RAY)


def inside_union(scene, X):
    """Ray-parity membership of points X (n, 3) in the union of obstacles."""
    X = np.asarray(X, dtype=float).reshape(-1, 3)
    out = np.zeros(len(X), dtype=bool)
    for k in range(len(scene.polyhedra)):
        lo, hi = scene.poly_lo[k], scene.poly_hi[k]
        sel = np.nonzero(np.all((X >= lo) & (X <= hi), axis=1))[0]
        if sel.size == 0:
            continue
        T = scene.walls[scene.wall_owner == k]
        far = X[sel] + 4.0 * scene.diameter * _RAY
        n = np.count_nonzero(segments_hit_triangles(X[sel], far, T), axis=1)
        out[sel] |= (n % 2) == 1
    return out


def near_walls(scene, center, radius):
    """Walls within ``radius`` of ``center`` (bounding-sphere prefilter)."""
    if scene.n_walls == 0:
        return scene.walls
    W = scene.walls
    c = W.mean(axis=1)
    rr = np.max(np.linalg.norm(W - c[:, None], axis=2), axis=1)
    return W[np.linalg.norm(c - center, axis=1) <= radius + rr]


def footprint_collisions(scene, robot, B: CBox, n, rng):
    """Per-sample collision flags for ``n`` configurations drawn from ``B``."""
    P, D = sample_configs(B, n, rng)
    reach = robot.size + B.radius + robot.tau
    W = near_walls(scene, B.center, reach)
    if robot.kind == "rod":
        hit = (segments_hit_triangles(P, P + robot.size * D, W).any(axis=1)
               if len(W) else np.zeros(n, dtype=bool))
        probe = P
    else:
        hit = (circles_hit_triangles(P, D, robot.size, W).any(axis=1)
               if len(W) else np.zeros(n, dtype=bool))
        e1, _ = frames(D)
        probe = P + robot.size * e1
    if len(W) == 0:
        # no boundary within reach: every footprint is on the centre's side
        return np.full(n, bool(inside_union(scene, B.center[None])[0]))
    return hit | inside_union(scene, probe)


# ------------------------------------------------------------- circles

def circle_samples(C, n):
    return C.point(np.linspace(0.0, 2 * math.pi, n, endpoint=False))


def brute_sep(C, kind, n, *args):
    """Minimum over ``n`` circle samples of the distance to a feature."""
    X = circle_samples(C, n)
    if kind == "point":
        d = np.linalg.norm(X - args[0], axis=1)
    elif kind == "line":
        P, u = args
        u = u / np.linalg.norm(u)
        w = X - P
        d = np.linalg.norm(w - (w @ u)[:, None] * u, axis=1)
    elif kind == "segment":
        a, b = args
        e = b - a
        t = np.clip((X - a) @ e / (e @ e), 0.0, 1.0)
        d = np.linalg.norm(X - (a + t[:, None] * e), axis=1)
    elif kind == "plane":
        P, m = args
        m = m / np.linalg.norm(m)
        s = (X - P) @ m
        if s.min() <= 0.0 <= s.max():
            return 0.0
        d = np.abs(s)
    else:
        raise ValueError(kind)
    return float(d.min())


# ------------------------------------------------------ dense certification

def _seg_dist(X, A, B):
    e = B - A
    t = np.clip(np.sum((X - A) * e, -1) / np.sum(e * e, -1), 0.0, 1.0)
    return np.linalg.norm(X - (A + t[..., None] * e), axis=-1)


def point_triangle_distances(X, T):
    """(n, M) distances from points X (n, 3) to closed triangles T (M, 3, 3)."""
    X = X[:, None, :]
    v0, v1, v2 = T[None, :, 0], T[None, :, 1], T[None, :, 2]
    m = np.cross(v1 - v0, v2 - v0)
    m = m / np.linalg.norm(m, axis=-1)[..., None]
    h = np.sum((X - v0) * m, -1)
    foot = X - h[..., None] * m
    inside = _bary_inside(foot, np.broadcast_to(T[None], foot.shape[:2] + (3, 3)))
    d = np.minimum(np.minimum(_seg_dist(X, v0, v1), _seg_dist(X, v1, v2)), _seg_dist(X, v2, v0))
    return np.where(inside, np.abs(h), d)


def dense_footprint_points(robot, B: CBox, n_pos=5, n_dir=5, n_along=17):
    """Points covering Fp(B) and their covering radius (every footprint
    point of every configuration in B lies within it of some sample)."""
    g = np.linspace(-1.0, 1.0, n_pos)
    P = B.center + B.half * np.stack(np.meshgrid(g, g, g, indexing="ij"), -1).reshape(-1, 3)
    rot = B.rot
    s = np.linspace(0.0, 1.0, n_dir)
    U, V = np.meshgrid(rot.u0 + rot.w * s, rot.v0 + rot.w * s, indexing="ij")
    D = chart(rot.face, U.ravel(), V.ravel())
    D /= np.linalg.norm(D, axis=1)[:, None]
    cov_p = math.sqrt(3.0) * B.half / (n_pos - 1)
    # chart distance bounds the angle on the face (|q| >= 1 there)
    cov_dir = robot.size * math.sqrt(2.0) / 2 * rot.w / (n_dir - 1)
    Pi = np.repeat(P, len(D), axis=0)
    Di = np.tile(D, (len(P), 1))
    if robot.kind == "rod":
        X = rod_points(Pi, Di, robot.size, n_along)
        cov_fp = robot.size / (2 * (n_along - 1))
    else:
        X = ring_points(Pi, Di, robot.size, 4 * n_along)
        cov_fp = robot.size * math.pi / (4 * n_along)
    return X.reshape(-1, 3), cov_p + cov_dir + cov_fp


@njit(cache=True)
def _seg_d2(x0, x1, x2, a0, a1, a2, b0, b1, b2):
    e0, e1, e2 = b0 - a0, b1 - a1, b2 - a2
    r0, r1, r2 = x0 - a0, x1 - a1, x2 - a2
    t = (r0 * e0 + r1 * e1 + r2 * e2) / (e0 * e0 + e1 * e1 + e2 * e2)
    t = min(1.0, max(0.0, t))
    q0, q1, q2 = r0 - t * e0, r1 - t * e1, r2 - t * e2
    return q0 * q0 + q1 * q1 + q2 * q2


@njit(cache=True)
def min_point_triangle_distance(X, T):
    """Smallest distance between points X (n, 3) and triangles T (m, 3, 3)."""
    best = np.inf
    for j in range(T.shape[0]):
        a0, a1, a2 = T[j, 0, 0], T[j, 0, 1], T[j, 0, 2]
        b0, b1, b2 = T[j, 1, 0], T[j, 1, 1], T[j, 1, 2]
        c0, c1, c2 = T[j, 2, 0], T[j, 2, 1], T[j, 2, 2]
        u0, u1, u2 = b0 - a0, b1 - a1, b2 - a2
        v0, v1, v2 = c0 - a0, c1 - a1, c2 - a2
        d11 = u0 * u0 + u1 * u1 + u2 * u2
        d12 = u0 * v0 + u1 * v1 + u2 * v2
        d22 = v0 * v0 + v1 * v1 + v2 * v2
        den = d11 * d22 - d12 * d12
        for i in range(X.shape[0]):
            x0, x1, x2 = X[i, 0], X[i, 1], X[i, 2]
            w0, w1, w2 = x0 - a0, x1 - a1, x2 - a2
            p = w0 * u0 + w1 * u1 + w2 * u2
            q = w0 * v0 + w1 * v1 + w2 * v2
            s = (d22 * p - d12 * q) / den
            t = (d11 * q - d12 * p) / den
            if s >= 0.0 and t >= 0.0 and s + t <= 1.0:
                h0 = w0 - s * u0 - t * v0
                h1 = w1 - s * u1 - t * v1
                h2 = w2 - s * u2 - t * v2
                dd = h0 * h0 + h1 * h1 + h2 * h2
            else:
                dd = min(_seg_d2(x0, x1, x2, a0, a1, a2, b0, b1, b2),
                         _seg_d2(x0, x1, x2, b0, b1, b2, c0, c1, c2),
                         _seg_d2(x0, x1, x2, c0, c1, c2, a0, a1, a2))
            if dd < best:
                best = dd
    return np.sqrt(best)


def certify_free(scene, robot, B: CBox, margin=0.0):
    """Dense-sampling certificate that no configuration of B collides."""
    X, cov = dense_footprint_points(robot, B)
    W = near_walls(scene, B.center, robot.size + B.radius + cov + margin)
    if len(W) and min_point_triangle_distance(X, np.ascontiguousarray(W)) <= cov + margin:
        return False
    return not inside_union(scene, X[:1])[0]
