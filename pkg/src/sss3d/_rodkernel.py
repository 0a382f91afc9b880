"""Compiled per-pair form of the rod footprint hit test.

Region k is ``Ball(M[k], R[k])`` cut by the half-spaces ``N[k, p] . x >= O[k, p]``.
Same predicate as the vectorised kernel in :mod:`sss3d.rod`, evaluated pair by
pair so that far features are rejected after one distance check.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@njit(cache=True)
def _seg_hit(N, O, P, m, R, a, b, eps):
    lo, hi = 0.0, 1.0
    for p in range(P):
        fa = N[p, 0] * a[0] + N[p, 1] * a[1] + N[p, 2] * a[2] - O[p] + eps
        fb = N[p, 0] * b[0] + N[p, 1] * b[1] + N[p, 2] * b[2] - O[p] + eps
        if fa < 0.0 and fb < 0.0:
            return False
        if fa < 0.0:
            t = fa / (fa - fb)
            if t > lo:
                lo = t
        elif fb < 0.0:
            t = fa / (fa - fb)
            if t < hi:
                hi = t
    if lo > hi:
        return False
    d0, d1, d2 = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    w0, w1, w2 = a[0] - m[0], a[1] - m[1], a[2] - m[2]
    dd = d0 * d0 + d1 * d1 + d2 * d2
    t = -(w0 * d0 + w1 * d1 + w2 * d2) / dd if dd > 0 else 0.0
    if t < lo:
        t = lo
    if t > hi:
        t = hi
    q0, q1, q2 = w0 + t * d0, w1 + t * d1, w2 + t * d2
    return q0 * q0 + q1 * q1 + q2 * q2 <= (R + eps) * (R + eps)


@njit(cache=True)
def _wall_hit(N, O, P, m, R, tri, nT, eps):
    v0, v1, v2 = tri[0], tri[1], tri[2]
    cT = _dot(nT, v0)
    hm = _dot(m, nT) - cT
    if abs(hm) > R + eps:
        return False
    if (_seg_hit(N, O, P, m, R, v0, v1, eps) or _seg_hit(N, O, P, m, R, v1, v2, eps)
            or _seg_hit(N, O, P, m, R, v2, v0, eps)):
        return True
    # inward in-plane edge normals
    nus = np.empty((3, 3))
    cus = np.empty(3)
    for i in range(3):
        a = tri[i]
        b = tri[(i + 1) % 3]
        e0, e1, e2 = b[0] - a[0], b[1] - a[1], b[2] - a[2]
        x = nT[1] * e2 - nT[2] * e1
        y = nT[2] * e0 - nT[0] * e2
        z = nT[0] * e1 - nT[1] * e0
        s = math.sqrt(x * x + y * y + z * z)
        nus[i, 0], nus[i, 1], nus[i, 2] = x / s, y / s, z / s
        cus[i] = _dot(nus[i], a)
    foot = np.empty(3)
    for j in range(3):
        foot[j] = m[j] - hm * nT[j]
    ok = True
    for i in range(3):
        if _dot(foot, nus[i]) - cus[i] < -eps:
            ok = False
    if ok:
        for p in range(P):
            if _dot(N[p], foot) - O[p] < -eps:
                ok = False
        if ok:
            return True
    u = np.empty(3)
    x0 = np.empty(3)
    for p in range(P):
        ni = N[p]
        u[0] = nT[1] * ni[2] - nT[2] * ni[1]
        u[1] = nT[2] * ni[0] - nT[0] * ni[2]
        u[2] = nT[0] * ni[1] - nT[1] * ni[0]
        uu = _dot(u, u)
        if uu <= 1e-20:
            continue
        # x0 = (cT (ni x u) + O_p (u x nT)) / uu
        c1 = ni[1] * u[2] - ni[2] * u[1]
        c2 = ni[2] * u[0] - ni[0] * u[2]
        c3 = ni[0] * u[1] - ni[1] * u[0]
        d1 = u[1] * nT[2] - u[2] * nT[1]
        d2 = u[2] * nT[0] - u[0] * nT[2]
        d3 = u[0] * nT[1] - u[1] * nT[0]
        x0[0] = (cT * c1 + O[p] * d1) / uu
        x0[1] = (cT * c2 + O[p] * d2) / uu
        x0[2] = (cT * c3 + O[p] * d3) / uu
        su = math.sqrt(uu)
        for j in range(3):
            u[j] /= su
        s_lo, s_hi = -np.inf, np.inf
        feas = True
        for c in range(3 + P):
            if c < 3:
                al = _dot(nus[c], u)
                be = _dot(nus[c], x0) - cus[c] + eps
            else:
                j = c - 3
                if j == p:
                    continue
                al = _dot(N[j], u)
                be = _dot(N[j], x0) - O[j] + eps
            if al > 1e-15:
                s = -be / al
                if s > s_lo:
                    s_lo = s
            elif al < -1e-15:
                s = -be / al
                if s < s_hi:
                    s_hi = s
            elif be < 0.0:
                feas = False
                break
        if not feas:
            continue
        w0, w1, w2 = x0[0] - m[0], x0[1] - m[1], x0[2] - m[2]
        wu = w0 * u[0] + w1 * u[1] + w2 * u[2]
        disc = wu * wu - (w0 * w0 + w1 * w1 + w2 * w2 - (R + eps) * (R + eps))
        if disc < 0.0:
            continue
        sq = math.sqrt(disc)
        if -wu - sq > s_lo:
            s_lo = -wu - sq
        if -wu + sq < s_hi:
            s_hi = -wu + sq
        if s_lo <= s_hi:
            return True
    return False


@njit(cache=True)
def rod_hits(N, O, M, R, C, EA, EB, W, WN, eps):
    """Hit mask (K, nc + ne + nw) of corners, edges and walls."""
    K, P = N.shape[0], N.shape[1]
    nc, ne, nw = C.shape[0], EA.shape[0], W.shape[0]
    out = np.zeros((K, nc + ne + nw), dtype=np.bool_)
    for k in range(K):
        m = M[k]
        r = R[k] + eps
        r2 = r * r
        for i in range(nc):
            w0, w1, w2 = C[i, 0] - m[0], C[i, 1] - m[1], C[i, 2] - m[2]
            if w0 * w0 + w1 * w1 + w2 * w2 > r2:
                continue
            ok = True
            for p in range(P):
                if _dot(N[k, p], C[i]) - O[k, p] < -eps:
                    ok = False
                    break
            out[k, i] = ok
        for i in range(ne):
            out[k, nc + i] = _seg_hit(N[k], O[k], P, m, R[k], EA[i], EB[i], eps)
        for i in range(nw):
            out[k, nc + ne + i] = _wall_hit(N[k], O[k], P, m, R[k], W[i], WN[i], eps)
    return out
