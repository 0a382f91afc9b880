"""Rod robot: a segment of length ``r0`` rotating about one endpoint.

For a box ``B = Bt x Br`` the approximate footprint is a single Pi1 term: the
ball of radius ``r0 + r_B`` around the box centre intersected with the four
side half-spaces of the square cone over ``Br`` (each pushed outward by
``r_B``) and the half-space above the lower face of ``Bt`` parallel to the
chart face. An optional thickness ``tau`` grows every factor by ``tau``.

The batched kernel :func:`halfspace_ball_hits` decides exactly (up to a tiny
slack toward "hit") whether corners, edges and walls meet such a
ball-and-half-spaces region, for many boxes at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geom3 import Ball, HalfSpace, Pi1Set, Sigma2Set, intersects_feature_conservative
from .s2atlas import FACE_AXIS, FACE_SIGN, _UV_AXES, FaceBox, WholeSphere
from ._rodkernel import rod_hits
from .scene import Scene, point_inside_union, segment_triangle_dist


@dataclass(frozen=True, eq=False)
class RodApproxFp:
    outer_ball: Ball
    expanded_sides: tuple
    base: HalfSpace | None

    @property
    def halfspaces(self):
        return self.expanded_sides + ((self.base,) if self.base is not None else ())

    def as_pi1(self) -> Pi1Set:
        return Pi1Set((self.outer_ball,) + self.halfspaces)

    def contains(self, p, tol=0.0):
        return self.as_pi1().contains(p, tol)


def _side_normals(rot: FaceBox):
    """Unit inward normals of the four side planes of the square cone."""
    k, s = FACE_AXIS[rot.face], FACE_SIGN[rot.face]
    a, b = _UV_AXES[rot.face]
    u0, v0 = rot.u0, rot.v0
    u1, v1 = u0 + rot.w, v0 + rot.w
    out = np.zeros((4, 3))
    out[0, a], out[0, k] = 1.0, -u0 * s
    out[1, a], out[1, k] = -1.0, u1 * s
    out[2, b], out[2, k] = 1.0, -v0 * s
    out[3, b], out[3, k] = -1.0, v1 * s
    return out / np.linalg.norm(out, axis=1)[:, None]


def rod_halfspaces(center, half, rot, tau=0.0, expand=None):
    """Normals (P, 3) and offsets (P,) of the half-space factors.

    ``expand`` is the outward push of the side planes (default ``r_B + tau``).
    """
    center = np.asarray(center, dtype=float)
    if isinstance(rot, WholeSphere):
        return np.zeros((0, 3)), np.zeros(0)
    rB = half * np.sqrt(3.0)
    if expand is None:
        expand = rB + tau
    n = _side_normals(rot)
    off = n @ center - expand
    k, s = FACE_AXIS[rot.face], FACE_SIGN[rot.face]
    n0 = np.zeros(3)
    n0[k] = s
    return np.vstack([n, n0]), np.append(off, s * center[k] - half - tau)


class RodRobot:
    """Rod of length ``r0`` and optional thickness ``tau``."""

    kind = "rod"

    def __init__(self, r0: float, tau: float = 0.0):
        if not r0 > 0:
            raise ValueError("rod length must be positive")
        if tau < 0:
            raise ValueError("thickness must be nonnegative")
        self.r0 = float(r0)
        self.tau = float(tau)

    @property
    def size(self) -> float:
        return self.r0

    def __repr__(self):
        return f"RodRobot(r0={self.r0:g}, tau={self.tau:g})"

    # ------------------------------------------------------------ footprints

    def footprint(self, config):
        """Segment endpoints ``(p, p + r0 d)``."""
        p = config.position
        return p, p + self.r0 * config.unit_direction

    def sample_footprint(self, config, n: int) -> np.ndarray:
        a, b = self.footprint(config)
        t = np.linspace(0.0, 1.0, n)
        return a + t[:, None] * (b - a)

    def inner_footprint(self, B) -> Pi1Set:
        """Ball of radius ``r0`` at the box centre cut by the square cone over ``Br``."""
        if not isinstance(B.rot, FaceBox):
            raise ValueError("inner footprint needs a face box")
        n = _side_normals(B.rot)
        m = B.center
        return Pi1Set((Ball(m, self.r0),) + tuple(HalfSpace(ni, ni @ m) for ni in n))

    def approx_footprint(self, B) -> RodApproxFp:
        R = self.r0 + B.radius + self.tau
        N, O = rod_halfspaces(B.center, B.half, B.rot, self.tau)
        hs = tuple(HalfSpace(n, o) for n, o in zip(N, O))
        if not hs:
            return RodApproxFp(Ball(B.center, R), (), None)
        return RodApproxFp(Ball(B.center, R), hs[:4], hs[4])

    def approx_set(self, B) -> Sigma2Set:
        return Sigma2Set((self.approx_footprint(B).as_pi1(),))

    def box_feature_test(self, B, f) -> bool:
        """Might feature ``f`` meet the approximate footprint of ``B``?"""
        return intersects_feature_conservative(self.approx_set(B), f)

    # ------------------------------------------------------- batch filtering

    def filter_features(self, boxes, scene: Scene, ids, eps=None):
        """Boolean mask (len(boxes), len(ids)): feature may touch footprint."""
        ids = np.asarray(ids, dtype=int)
        K = len(boxes)
        if K == 0 or ids.size == 0:
            return np.zeros((K, ids.size), dtype=bool)
        if eps is None:
            eps = 1e-9 * scene.diameter
        out = np.zeros((K, ids.size), dtype=bool)
        groups = {}
        for i, B in enumerate(boxes):
            groups.setdefault(isinstance(B.rot, WholeSphere), []).append(i)
        for _, idx in groups.items():
            bs = [boxes[i] for i in idx]
            hs = [rod_halfspaces(B.center, B.half, B.rot, self.tau) for B in bs]
            N = np.stack([h[0] for h in hs])
            O = np.stack([h[1] for h in hs])
            M = np.stack([B.center for B in bs])
            R = np.array([self.r0 + B.radius + self.tau for B in bs])
            out[idx] = compiled_scene_hits(scene, ids, N, O, M, R, eps)
        return out

    def probe_point(self, B) -> np.ndarray:
        return B.center

    # ------------------------------------------------------------- clearance

    def clearance(self, config, scene: Scene) -> float:
        a, b = self.footprint(config)
        if scene.n_walls == 0:
            return scene.diameter
        d = float(np.min(segment_triangle_dist(a, b, scene.walls)))
        if d <= self.tau or point_inside_union(scene, a):
            return 0.0
        return d - self.tau


# ------------------------------------------------------------------ kernels

def scene_hits(scene: Scene, ids, N, O, M, R, eps):
    """Apply :func:`halfspace_ball_hits` to scene features given by global ids."""
    ci, ei, wi = scene.split_ids(ids)
    hc, he, hw = halfspace_ball_hits(N, O, M, R, scene.corners[ci], scene.edges[ei, 0],
                                     scene.edges[ei, 1], scene.walls[wi],
                                     scene.wall_normals[wi], eps)
    return np.concatenate([hc, he, hw], axis=1)


def compiled_scene_hits(scene: Scene, ids, N, O, M, R, eps):
    """Same mask as :func:`scene_hits`, from the compiled per-pair kernel."""
    ci, ei, wi = scene.split_ids(ids)
    return rod_hits(np.ascontiguousarray(N), np.ascontiguousarray(O), np.ascontiguousarray(M),
                    np.ascontiguousarray(R, dtype=float), scene.corners[ci], scene.edges[ei, 0],
                    scene.edges[ei, 1], scene.walls[wi], scene.wall_normals[wi], float(eps))


def _seg_hits(N, O, M, R, A, B, eps):
    """Segments [A, B] (n, 3) vs K regions Ball(M, R) cut by half-spaces."""
    K, n = M.shape[0], A.shape[0]
    lo = np.zeros((K, n))
    hi = np.ones((K, n))
    ok = np.ones((K, n), dtype=bool)
    if N.shape[1]:
        fa = np.einsum("kpj,nj->kpn", N, A) - O[:, :, None]
        fb = np.einsum("kpj,nj->kpn", N, B) - O[:, :, None]
        for p in range(N.shape[1]):
            a_, b_ = fa[:, p] + eps, fb[:, p] + eps
            ok &= (a_ >= 0) | (b_ >= 0)
            with np.errstate(divide="ignore", invalid="ignore"):
                t = a_ / (a_ - b_)
            lo = np.where((a_ < 0) & (b_ >= 0), np.maximum(lo, t), lo)
            hi = np.where((b_ < 0) & (a_ >= 0), np.minimum(hi, t), hi)
    ok &= lo <= hi
    d = B - A
    dd = np.einsum("nj,nj->n", d, d)
    w = A[None, :, :] - M[:, None, :]
    t0 = np.clip(-np.einsum("knj,nj->kn", w, d) / dd, lo, hi)
    q = w + t0[..., None] * d
    ok &= np.einsum("knj,knj->kn", q, q) <= ((R + eps) ** 2)[:, None]
    return ok


def halfspace_ball_hits(N, O, M, R, C, EA, EB, W, WN, eps):
    """Exact hit masks of corners, edges and walls against K convex regions.

    Region k is ``Ball(M[k], R[k])`` intersected with the half-spaces
    ``N[k, p] . x >= O[k, p]``. A wall hits a region iff one of its edges
    does, or the foot of the ball centre on its plane lies in the wall and
    the region, or some half-space plane cuts the wall plane in a line whose
    part inside the wall, the other half-spaces and the ball is nonempty.
    """
    K, P = N.shape[0], N.shape[1]
    # corners
    if len(C):
        hc = np.linalg.norm(C[None] - M[:, None], axis=-1) <= (R + eps)[:, None]
        if P:
            hc &= np.all(np.einsum("kpj,nj->kpn", N, C) - O[:, :, None] >= -eps, axis=1)
    else:
        hc = np.zeros((K, 0), dtype=bool)
    he = _seg_hits(N, O, M, R, EA, EB, eps) if len(EA) else np.zeros((K, 0), dtype=bool)
    nw = len(W)
    if nw == 0:
        return hc, he, np.zeros((K, 0), dtype=bool)
    v0, v1, v2 = W[:, 0], W[:, 1], W[:, 2]
    hw = (_seg_hits(N, O, M, R, v0, v1, eps) | _seg_hits(N, O, M, R, v1, v2, eps)
          | _seg_hits(N, O, M, R, v2, v0, eps))
    nT = WN
    cT = np.einsum("nj,nj->n", nT, v0)
    # inward in-plane normals of the triangle edges
    nus, cus = [], []
    for a, b in ((v0, v1), (v1, v2), (v2, v0)):
        nu = np.cross(nT, b - a)
        nu /= np.linalg.norm(nu, axis=1)[:, None]
        nus.append(nu)
        cus.append(np.einsum("nj,nj->n", nu, a))
    # foot of the centre on the wall plane
    hm = M @ nT.T - cT[None]
    foot = M[:, None, :] - hm[..., None] * nT[None]
    ok = np.abs(hm) <= (R + eps)[:, None]
    for nu, cu in zip(nus, cus):
        ok &= np.einsum("knj,nj->kn", foot, nu) - cu[None] >= -eps
    if P:
        ok &= np.all(np.einsum("kpj,knj->kpn", N, foot) - O[:, :, None] >= -eps, axis=1)
    hw |= ok
    # lines where a half-space plane crosses the wall plane
    for p in range(P):
        todo = ~hw
        if not todo.any():
            break
        ni = N[:, p]
        u = np.cross(nT[None, :, :], ni[:, None, :])
        uu = np.einsum("knj,knj->kn", u, u)
        line = uu > 1e-20
        with np.errstate(divide="ignore", invalid="ignore"):
            x0 = (cT[None, :, None] * np.cross(ni[:, None, :], u)
                  + O[:, p][:, None, None] * np.cross(u, nT[None, :, :])) / uu[..., None]
            u = u / np.sqrt(uu)[..., None]
        s_lo = np.full((K, nw), -np.inf)
        s_hi = np.full((K, nw), np.inf)
        feas = line & todo
        cons = [(np.broadcast_to(nu[None], u.shape), cu[None]) for nu, cu in zip(nus, cus)]
        cons += [(np.broadcast_to(N[:, j][:, None, :], u.shape), O[:, j][:, None])
                 for j in range(P) if j != p]
        for g, c in cons:
            al = np.einsum("knj,knj->kn", g, u)
            be = np.einsum("knj,knj->kn", g, x0) - c + eps
            with np.errstate(divide="ignore", invalid="ignore"):
                s = -be / al
            pos = al > 1e-15
            neg = al < -1e-15
            s_lo = np.where(pos, np.maximum(s_lo, s), s_lo)
            s_hi = np.where(neg, np.minimum(s_hi, s), s_hi)
            feas &= pos | neg | (be >= 0)
        w = x0 - M[:, None, :]
        wu = np.einsum("knj,knj->kn", w, u)
        disc = wu * wu - (np.einsum("knj,knj->kn", w, w) - ((R + eps) ** 2)[:, None])
        feas &= disc >= 0
        sq = np.sqrt(np.maximum(disc, 0.0))
        s_lo = np.maximum(s_lo, -wu - sq)
        s_hi = np.minimum(s_hi, -wu + sq)
        hw |= feas & (s_lo <= s_hi)
    return hc, he, hw
