"""Ring robot: an embedded circle of radius ``r0`` centred at the position,
with the direction as its normal.

For a box with central direction ``a`` and angular radius ``theta`` the
footprints of the central position sweep the zone of the sphere
``S(m, r0)`` with ``|(x - m).a| <= r0 sin(theta)``. Its Minkowski sum with
``Ball(rho)``, ``rho = r_B + tau``, is the union of

* two thick rings around the zone's boundary circles (at heights
  ``+-r0 sin(theta)`` along ``a`` with radius ``r0 cos(theta)``), and
* the truncated annulus: the spherical shell ``r0 - rho <= |x - m| <= r0 + rho``
  outside the double cone of half-angle ``pi/2 - theta`` about ``a``.

This union equals the Minkowski sum exactly, which the feature tests below
exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .circles import (EmbeddedCircle, circle_frame, sep_circle_point, sep_circle_segment,
                      sep_circle_triangle)
from .geom3 import (Ball, BallComplement, Pi1Set, RoundConeComplement, Sigma2Set, ThickRing,
                    intersects_feature_conservative, point_segment_dist, point_triangle_dist)
from .s2atlas import FaceBox, rotbox_cone
from .scene import Scene, point_inside_union


@dataclass(frozen=True, eq=False)
class RingApproxFp:
    ring_top: ThickRing | None
    ring_bottom: ThickRing | None
    truncated_annulus: Pi1Set

    def as_sigma2(self) -> Sigma2Set:
        terms = [self.truncated_annulus]
        for r in (self.ring_top, self.ring_bottom):
            if r is not None:
                terms.insert(0, Pi1Set((r,)))
        return Sigma2Set(terms)

    def contains(self, p, tol=0.0):
        return self.as_sigma2().contains(p, tol)


@dataclass(frozen=True)
class _RingBoxGeom:
    """Numbers describing the approximate footprint of one box."""

    m: np.ndarray
    a: np.ndarray | None     # None for an improper rotational box
    theta: float
    r0: float
    rho: float

    @property
    def r_in(self):
        return max(0.0, self.r0 - self.rho)

    @property
    def r_out(self):
        return self.r0 + self.rho

    def circles(self):
        h = self.r0 * math.sin(self.theta)
        rc = self.r0 * math.cos(self.theta)
        if rc <= 0:
            return []
        return [EmbeddedCircle(self.m + h * self.a, self.a, rc),
                EmbeddedCircle(self.m - h * self.a, self.a, rc)]


class RingRobot:
    """Ring of radius ``r0`` and optional thickness ``tau``."""

    kind = "ring"

    def __init__(self, r0: float, tau: float = 0.0):
        if not r0 > 0:
            raise ValueError("ring radius must be positive")
        if tau < 0:
            raise ValueError("thickness must be nonnegative")
        self.r0 = float(r0)
        self.tau = float(tau)

    @property
    def size(self) -> float:
        return self.r0

    def __repr__(self):
        return f"RingRobot(r0={self.r0:g}, tau={self.tau:g})"

    def footprint(self, config) -> EmbeddedCircle:
        return EmbeddedCircle(config.position, config.unit_direction, self.r0)

    def sample_footprint(self, config, n: int) -> np.ndarray:
        return self.footprint(config).sample(n)

    # ------------------------------------------------------ box footprints

    def _geom(self, B) -> _RingBoxGeom:
        rho = B.radius + self.tau
        if isinstance(B.rot, FaceBox):
            cone, capped = rotbox_cone(B.rot, B.center)
            if not capped:
                return _RingBoxGeom(B.center, cone.axis, cone.half_angle, self.r0, rho)
        return _RingBoxGeom(B.center, None, math.pi / 2, self.r0, rho)

    def approx_footprint(self, B) -> RingApproxFp:
        """Thick rings plus truncated annulus; a plain ball for improper boxes."""
        g = self._geom(B)
        if g.a is None:
            return RingApproxFp(None, None, Pi1Set((Ball(g.m, g.r_out),)))
        c1, c2 = g.circles()
        ann = Pi1Set((Ball(g.m, g.r_out), BallComplement(g.m, g.r_in),
                      RoundConeComplement(g.m, g.a, math.pi / 2 - g.theta, double=True)))
        return RingApproxFp(ThickRing(c1, g.rho), ThickRing(c2, g.rho), ann)

    def approx_set(self, B) -> Sigma2Set:
        return self.approx_footprint(B).as_sigma2()

    def box_feature_test(self, B, f) -> bool:
        return intersects_feature_conservative(self.approx_set(B), f)

    def probe_point(self, B) -> np.ndarray:
        """A point of the central footprint circle."""
        if isinstance(B.rot, FaceBox):
            a = B.rot.direction()
        else:
            a = np.array([0.0, 0.0, 1.0])
        e1, _, _ = circle_frame(a)
        return B.center + self.r0 * e1

    # ------------------------------------------------------- batch filtering

    def filter_features(self, boxes, scene: Scene, ids, eps=None):
        ids = np.asarray(ids, dtype=int)
        out = np.zeros((len(boxes), ids.size), dtype=bool)
        if ids.size == 0:
            return out
        if eps is None:
            eps = 1e-9 * scene.diameter
        ci, ei, wi = scene.split_ids(ids)
        C = scene.corners[ci]
        EA, EB = scene.edges[ei, 0], scene.edges[ei, 1]
        W = scene.walls[wi]
        WN = scene.wall_normals[wi]
        for k, B in enumerate(boxes):
            g = self._geom(B)
            out[k] = np.concatenate([
                ring_corner_hits(g, C, eps), ring_edge_hits(g, EA, EB, eps),
                ring_wall_hits(g, W, WN, eps)])
        return out

    # ------------------------------------------------------------ clearance

    def clearance(self, config, scene: Scene) -> float:
        C = self.footprint(config)
        if scene.n_walls == 0:
            return scene.diameter
        W = scene.walls
        dc = point_triangle_dist(C.center, W[:, 0], W[:, 1], W[:, 2])
        dmax = np.max(np.linalg.norm(W - C.center, axis=2), axis=1)
        lb = np.maximum(np.maximum(dc - C.radius, C.radius - dmax), 0.0)
        best = math.inf
        for i in np.argsort(lb):
            if lb[i] >= best:
                break
            best = min(best, sep_circle_triangle(C, *W[i]))
            if best <= self.tau:
                return 0.0
        if point_inside_union(scene, C.point(0.0)):
            return 0.0
        return best - self.tau


# ----------------------------------------------------------------- kernels

def _ann_contains(g: _RingBoxGeom, X, eps):
    """Membership in the truncated annulus for points X (..., 3)."""
    w = X - g.m
    r = np.linalg.norm(w, axis=-1)
    ok = (r <= g.r_out + eps) & (r >= g.r_in - eps)
    if g.a is not None:
        ok &= np.abs(w @ g.a) <= r * math.sin(g.theta) + eps
    return ok


def ring_corner_hits(g: _RingBoxGeom, C, eps):
    if len(C) == 0:
        return np.zeros(0, dtype=bool)
    if g.a is None:
        return np.linalg.norm(C - g.m, axis=1) <= g.r_out + eps
    hit = _ann_contains(g, C, eps)
    for circ in g.circles():
        hit |= sep_circle_point(circ, C) <= g.rho + eps
    return hit


def _quad_roots01(A, Bq, Cq):
    """Both roots (NaN if absent) of A t^2 + B t + C for arrays of coefficients."""
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = Bq * Bq - 4 * A * Cq
        sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
        lin = np.abs(A) <= 1e-14 * (np.abs(Bq) + np.abs(Cq) + 1e-300)
        q = -0.5 * (Bq + np.copysign(sq, Bq))
        r1 = np.where(lin, -Cq / Bq, q / A)
        r2 = np.where(lin, np.nan, Cq / q)
    return r1, r2


def _segment_ann_hits(g: _RingBoxGeom, A, B, eps):
    """Exact segment vs truncated annulus (membership is constant between
    the roots of the three defining quadratics)."""
    n = len(A)
    d = B - A
    w = A - g.m
    dd = np.einsum("nj,nj->n", d, d)
    wd = np.einsum("nj,nj->n", w, d)
    ww = np.einsum("nj,nj->n", w, w)
    roots = []
    for r in (g.r_in, g.r_out):
        roots += list(_quad_roots01(dd, 2 * wd, ww - r * r))
    if g.a is not None:
        s2 = math.sin(g.theta) ** 2
        wa, da = w @ g.a, d @ g.a
        roots += list(_quad_roots01(da * da - s2 * dd, 2 * (wa * da - s2 * wd), wa * wa - s2 * ww))
    T = np.column_stack([np.zeros(n), np.ones(n)] + roots)
    T = np.where((T >= 0) & (T <= 1), T, np.nan)
    T = np.sort(T, axis=1)
    mids = 0.5 * (T[:, 1:] + T[:, :-1])
    P = np.concatenate([T, mids], axis=1)
    valid = ~np.isnan(P)
    X = A[:, None, :] + np.nan_to_num(P)[..., None] * d[:, None, :]
    return np.any(valid & _ann_contains(g, X, eps), axis=1)


def _ring_lower_bound_segments(circ, A, B):
    dc = point_segment_dist(circ.center, A, B)
    dmax = np.maximum(np.linalg.norm(A - circ.center, axis=1), np.linalg.norm(B - circ.center, axis=1))
    return np.maximum(dc - circ.radius, circ.radius - dmax)


_NS = 32
_CHORD = 2 * math.sin(math.pi / (2 * _NS))


def _sampled_bracket(circ, dist, idx):
    """``(upper, lower)`` bounds on the circle's distance to features ``idx``.

    ``dist(P, idx)`` gives distances from points ``P`` (n, 3) to features
    ``idx`` (n,). Every circle point lies within the chord bound of a sample
    and distance is 1-Lipschitz.
    """
    S = circ.sample(_NS)
    k = idx.size
    P = np.repeat(S, k, axis=0)
    J = np.tile(idx, _NS)
    ub = dist(P, J).reshape(_NS, k).min(axis=0)
    return ub, ub - _CHORD * circ.radius


def _thick_ring_hits(circ, idx, rho, dist, exact):
    """Indices among ``idx`` whose feature meets the thick ring."""
    if idx.size == 0:
        return idx
    ub, lb = _sampled_bracket(circ, dist, idx)
    sure = ub <= rho
    unsure = ~sure & (lb <= rho)
    extra = [i for i in idx[unsure] if exact(i) <= rho]
    return np.concatenate([idx[sure], np.asarray(extra, dtype=int)])


def ring_edge_hits(g: _RingBoxGeom, A, B, eps):
    n = len(A)
    if n == 0:
        return np.zeros(0, dtype=bool)
    if g.a is None:
        return point_segment_dist(g.m, A, B) <= g.r_out + eps
    near = point_segment_dist(g.m, A, B) <= g.r_out + eps
    hit = np.zeros(n, dtype=bool)
    idx = np.nonzero(near)[0]
    if idx.size == 0:
        return hit
    hit[idx] = _segment_ann_hits(g, A[idx], B[idx], eps)
    def dist(P, J):
        return point_segment_dist(P, A[J], B[J])

    for circ in g.circles():
        lb = _ring_lower_bound_segments(circ, A, B)
        todo = idx[(~hit[idx]) & (lb[idx] <= g.rho + eps)]
        got = _thick_ring_hits(circ, todo, g.rho + eps, dist,
                               lambda i: sep_circle_segment(circ, A[i], B[i]))
        hit[got] = True
    return hit


def _wall_ann_candidates(g: _RingBoxGeom, W, WN):
    """Points (n, k, 3) such that every component of the annulus cut by the
    wall plane that avoids the wall's boundary contains one of them."""
    n = len(W)
    m, a = g.m, g.a
    nT = WN
    dsig = np.einsum("nj,nj->n", m - W[:, 0], nT)          # signed distance of m
    foot = m - dsig[:, None] * nT
    cands = [foot[:, None, :]]
    # in-plane frame
    e1 = np.cross(nT, a)
    s1 = np.linalg.norm(e1, axis=1)
    alt = np.cross(nT, np.eye(3)[np.argmin(np.abs(nT), axis=1)])
    e1 = np.where((s1 > 1e-9)[:, None], e1, alt)
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    e2 = np.cross(nT, e1)
    st = math.sin(g.theta)
    for r in {g.r_in, g.r_out}:
        rad2 = r * r - dsig * dsig
        rad = np.sqrt(np.where(rad2 >= 0, rad2, np.nan))
        # crossings of the in-plane circle with the planes (x - m).a = +-r sin(theta)
        # x = foot + rad (cos t e1 + sin t e2):  (foot - m).a + rad (cos t e1.a + sin t e2.a) = h
        fa = (foot - m) @ a
        ca, sa = e1 @ a, e2 @ a
        amp = np.hypot(ca, sa) * rad
        phase = np.arctan2(sa, ca)
        angs = []
        for h in (r * st, -r * st):
            with np.errstate(invalid="ignore", divide="ignore"):
                c = np.clip((h - fa) / amp, -2, 2)
                ok = np.abs(c) <= 1
                base = np.arccos(np.clip(c, -1, 1))
            angs += [np.where(ok, phase + base, np.nan), np.where(ok, phase - base, np.nan)]
        angs = np.mod(np.column_stack(angs), 2 * math.pi)
        angs = np.sort(angs, axis=1)
        cnt = np.sum(~np.isnan(angs), axis=1)
        # arc midpoints between consecutive crossings, wrapping around
        nxt = np.roll(angs, -1, axis=1)
        last = np.clip(cnt - 1, 0, 3)
        first = angs[:, 0]
        nxt[np.arange(n), last] = first + 2 * math.pi
        mids = 0.5 * (angs + nxt)
        allang = np.concatenate([angs, mids, np.zeros((n, 1))], axis=1)
        for j in range(allang.shape[1]):
            t = allang[:, j]
            pts = foot + rad[:, None] * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)
            cands.append(pts[:, None, :])
    # conic vertices: generators of the cone boundary in the symmetry plane
    alpha = math.pi / 2 - g.theta
    wv = nT - (nT @ a)[:, None] * a
    wn = np.linalg.norm(wv, axis=1)
    wv = np.where((wn > 1e-12)[:, None], wv / np.maximum(wn, 1e-300)[:, None], e1 - (e1 @ a)[:, None] * a)
    wv /= np.linalg.norm(wv, axis=1)[:, None]
    for sa_ in (1.0, -1.0):
        for sw in (1.0, -1.0):
            gen = math.cos(alpha) * sa_ * a + math.sin(alpha) * sw * wv
            den = np.einsum("nj,nj->n", gen, nT)
            with np.errstate(divide="ignore", invalid="ignore"):
                s = -dsig / den
            s = np.where(s > 0, s, np.nan)
            cands.append((m + s[:, None] * gen)[:, None, :])
    return np.concatenate(cands, axis=1)


def _inside_triangles(X, W, WN, eps):
    """X (n, k, 3) inside the (closed, slightly grown) triangles W (n, 3, 3)."""
    ok = np.ones(X.shape[:2], dtype=bool)
    for i in range(3):
        a, b = W[:, i], W[:, (i + 1) % 3]
        nu = np.cross(WN, b - a)
        nu /= np.linalg.norm(nu, axis=1)[:, None]
        ok &= np.einsum("nkj,nj->nk", X - a[:, None, :], nu) >= -eps
    return ok


def ring_wall_hits(g: _RingBoxGeom, W, WN, eps):
    n = len(W)
    if n == 0:
        return np.zeros(0, dtype=bool)
    dc = point_triangle_dist(g.m, W[:, 0], W[:, 1], W[:, 2])
    if g.a is None:
        return dc <= g.r_out + eps
    hit = np.zeros(n, dtype=bool)
    idx = np.nonzero(dc <= g.r_out + eps)[0]
    if idx.size == 0:
        return hit
    Wi, Ni = W[idx], WN[idx]
    h = np.zeros(idx.size, dtype=bool)
    for i in range(3):
        h |= _segment_ann_hits(g, Wi[:, i], Wi[:, (i + 1) % 3], eps)
    X = _wall_ann_candidates(g, Wi, Ni)
    valid = ~np.any(np.isnan(X), axis=2)
    Xc = np.nan_to_num(X)
    h |= np.any(valid & _inside_triangles(Xc, Wi, Ni, eps)
                & _ann_contains(g, Xc, eps), axis=1)
    hit[idx] = h
    dmax = np.max(np.linalg.norm(W - g.m, axis=2), axis=1)

    def dist(P, J):
        return point_triangle_dist(P, W[J, 0], W[J, 1], W[J, 2])

    for circ in g.circles():
        dci = point_triangle_dist(circ.center, W[:, 0], W[:, 1], W[:, 2])
        lb = np.maximum(dci - circ.radius, circ.radius - (dmax + np.linalg.norm(circ.center - g.m)))
        todo = idx[(~hit[idx]) & (lb[idx] <= g.rho + eps)]
        got = _thick_ring_hits(circ, todo, g.rho + eps, dist,
                               lambda i: sep_circle_triangle(circ, *W[i]))
        hit[got] = True
    return hit
