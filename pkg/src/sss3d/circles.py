"""Exact separations between an embedded circle and linear features.

The circle-line case follows the classical elimination: the closest pair
(p on the circle, q on the line) satisfies four orthogonality conditions,
two of which are linear and two quadratic, and eliminating x between the
two quadratics leaves a quartic in y. Real roots are turned back into
circle points, polished in angle form, and validated by direct distance.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .quartic import solve_polynomial

@dataclass(frozen=True, eq=False)
class EmbeddedCircle:
    """Circle of radius ``r`` centred at ``center`` in the plane with unit ``normal``."""

    center: np.ndarray
    normal: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(3)
        n = np.asarray(self.normal, dtype=float).reshape(3)
        nn = np.linalg.norm(n)
        if not nn > 0:
            raise ValueError("circle normal must be nonzero")
        if self.radius <= 0:
            raise ValueError("circle radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "normal", n / nn)
        object.__setattr__(self, "radius", float(self.radius))

    def frame(self):
        """Orthonormal (e1, e2, n) with the circle in span(e1, e2)."""
        return circle_frame(self.normal)

    def point(self, phi):
        e1, e2, _ = self.frame()
        phi = np.asarray(phi, dtype=float)
        return (self.center + self.radius * (np.cos(phi)[..., None] * e1
                                             + np.sin(phi)[..., None] * e2))

    def sample(self, n):
        return self.point(np.linspace(0.0, 2.0 * math.pi, n, endpoint=False))


def circle_frame(n):
    n = np.asarray(n, dtype=float)
    k = int(np.argmin(np.abs(n)))
    a = np.zeros(3)
    a[k] = 1.0
    e1 = np.cross(n, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2, n


def sep_circle_point(C: EmbeddedCircle, p):
    """Distance from the circle to point(s) ``p`` (shape (3,) or (N, 3))."""
    w = np.asarray(p, dtype=float) - C.center
    h = w @ C.normal
    rho = np.linalg.norm(w - h[..., None] * C.normal if w.ndim > 1 else w - h * C.normal,
                         axis=-1)
    return np.sqrt((rho - C.radius) ** 2 + h * h)


def sep_circle_plane(C: EmbeddedCircle, point, normal):
    """Distance from the circle to the plane through ``point`` with ``normal``."""
    m = np.asarray(normal, dtype=float)
    m = m / np.linalg.norm(m)
    s = float((C.center - np.asarray(point, dtype=float)) @ m)
    cosang = float(C.normal @ m)
    extent = C.radius * math.sqrt(max(0.0, 1.0 - cosang * cosang))
    return max(0.0, abs(s) - extent)


# ---------------------------------------------------------------- circle-line

def _local(C, P, d):
    """Line data in the circle frame, scaled so that the radius is 1."""
    e1, e2, n = C.frame()
    R = np.vstack([e1, e2, n])
    s = C.radius
    P_ = R @ (np.asarray(P, dtype=float) - C.center) / s
    d_ = R @ np.asarray(d, dtype=float)
    d_ /= np.linalg.norm(d_)
    return P_, d_


def _line_g_derivs(phi, P, d):
    """Squared distance from the unit-circle point at ``phi`` to the line, with
    its first two derivatives in ``phi``."""
    c = np.array([math.cos(phi), math.sin(phi), 0.0])
    c1 = np.array([-c[1], c[0], 0.0])
    w = c - P
    wd = w @ d
    c1d = c1 @ d
    g = w @ w - wd * wd
    g1 = 2.0 * (w @ c1) - 2.0 * wd * c1d
    g2 = 2.0 * (c1 @ c1 - w @ c) - 2.0 * (c1d * c1d - wd * (c @ d))
    return g, g1, g2


def _newton_phi(phi, P, d, iters=6):
    for _ in range(iters):
        _, g1, g2 = _line_g_derivs(phi, P, d)
        if g2 <= 0.0 or not math.isfinite(g2):
            break
        step = g1 / g2
        if abs(step) > 0.5:
            break
        phi -= step
        if abs(step) < 1e-15:
            break
    return phi


def _bisection_candidates(P, d, n=96):
    """Critical angles of the squared distance located by sign changes of g'."""
    phis = np.linspace(0.0, 2.0 * math.pi, n + 1)
    g1 = np.array([_line_g_derivs(p, P, d)[1] for p in phis])
    out = []
    for i in range(n):
        a, b = phis[i], phis[i + 1]
        fa, fb = g1[i], g1[i + 1]
        if fa == 0.0:
            out.append(a)
            continue
        if fa * fb > 0.0:
            continue
        for _ in range(60):
            m = 0.5 * (a + b)
            fm = _line_g_derivs(m, P, d)[1]
            if fa * fm <= 0.0:
                b = m
            else:
                a, fa = m, fm
        out.append(0.5 * (a + b))
    # local minima between samples whose derivative does not change sign
    gs = np.array([_line_g_derivs(p, P, d)[0] for p in phis])
    out.append(float(phis[int(np.argmin(gs))]))
    return out


def _quartic_candidates(P, d):
    """Circle points (as angles) satisfying the closest-pair conditions.

    In the unit-radius frame, p = (x, y, 0) and q = P + ((p - P).d) d.
    Condition ``x q_y - y q_x = 0`` is a quadratic in x with coefficients
    a' (constant), b'(y) (linear), c'(y) (quadratic); together with
    ``x^2 + y^2 - 1 = 0`` the resultant in x gives the quartic
    ``(c' - a' c)^2 + b'^2 c = 0`` with c = y^2 - 1.
    """
    Px, Py, Pz = P
    dx, dy, dz = d
    k = P @ d
    # q_x = Px + (x dx + y dy - k) dx,  q_y = Py + (x dx + y dy - k) dy
    # x q_y - y q_x = dx dy x^2 + (Py - k dy) x + (dy^2 - dx^2) x y
    #                 - dx dy y^2 - (Px - k dx) y
    ap = dx * dy
    # b'(y) = (dy^2 - dx^2) y + (Py - k dy)
    b1, b0 = dy * dy - dx * dx, Py - k * dy
    # c'(y) = -dx dy y^2 - (Px - k dx) y
    c2, c1, c0 = -dx * dy, -(Px - k * dx), 0.0
    # c' - a' c = (c2 - ap) y^2 + c1 y + (c0 + ap)
    u2, u1, u0 = c2 - ap, c1, c0 + ap
    quart = np.polyadd(np.polymul([u2, u1, u0], [u2, u1, u0]),
                       np.polymul(np.polymul([b1, b0], [b1, b0]), [1.0, 0.0, -1.0]))
    quart = np.concatenate([np.zeros(5 - len(quart)), quart])
    if np.max(np.abs(quart)) < 1e-10:
        return None
    out = []
    for y in solve_polynomial(quart, tol=1e-8):
        if abs(y) > 1.0 + 1e-6:
            continue
        y = max(-1.0, min(1.0, y))
        x = math.sqrt(max(0.0, 1.0 - y * y))
        out.append(math.atan2(y, x))
        out.append(math.atan2(y, -x))
    # a minimum always exists, so an empty set signals lost roots
    return out or None


def _circle_line_critical(C, P, d):
    """Polished critical angles of the circle-to-line distance (local frame)."""
    P_, d_ = _local(C, P, d)
    # axial line: every circle point is equidistant
    cross = math.hypot(d_[0], d_[1])
    if cross < 1e-12 and math.hypot(P_[0], P_[1]) < 1e-12:
        return P_, d_, [0.0]
    cands = _quartic_candidates(P_, d_)
    if cands is None:
        cands = _bisection_candidates(P_, d_)
    cands = [_newton_phi(phi, P_, d_) for phi in cands]
    return P_, d_, cands


def sep_circle_line(C: EmbeddedCircle, P, d):
    """Distance from the circle to the infinite line ``P + t d``."""
    P_, d_, cands = _circle_line_critical(C, P, d)
    best = math.inf
    for phi in cands:
        g = _line_g_derivs(phi, P_, d_)[0]
        best = min(best, math.sqrt(max(0.0, g)))
    return best * C.radius


def sep_circle_segment(C: EmbeddedCircle, a, b):
    """Distance from the circle to the closed segment ``[a, b]``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    best = float(min(sep_circle_point(C, a), sep_circle_point(C, b)))
    d = b - a
    L = float(np.linalg.norm(d))
    if L == 0.0:
        return best
    P_, d_, cands = _circle_line_critical(C, a, d / L)
    Lr = L / C.radius
    for phi in cands:
        c = np.array([math.cos(phi), math.sin(phi), 0.0])
        t = float((c - P_) @ d_)
        if 0.0 < t < Lr:
            w = c - P_
            g = w @ w - t * t
            best = min(best, math.sqrt(max(0.0, g)) * C.radius)
    return best


def sep_upper_bound_line(C: EmbeddedCircle, a, b):
    """Projection heuristic for the circle-to-segment distance.

    The segment is projected into the circle plane, the point p' of the
    projected line closest to the circle is lifted back to the segment
    (clamped to its ends) and paired with the circle point nearest p'. The
    returned pair distance is realised by actual points, so it is an upper
    bound for the true separation. It is a heuristic only: it can misorder
    features and must not drive box classification.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    e1, e2, n = C.frame()
    pa = np.array([(a - C.center) @ e1, (a - C.center) @ e2])
    pb = np.array([(b - C.center) @ e1, (b - C.center) @ e2])
    dd = pb - pa
    L2 = float(dd @ dd)
    r = C.radius
    if L2 <= (1e-12 * max(1.0, r)) ** 2:
        # projection degenerates to a point: the segment is perpendicular
        t = 0.5
        pp = pa
    else:
        t0 = -float(pa @ dd) / L2
        foot = pa + t0 * dd
        fn = float(np.linalg.norm(foot))
        if fn >= r:
            t = t0
        else:
            # projected line crosses the circle: take the crossing nearest the foot param
            s = math.sqrt(max(0.0, r * r - fn * fn) / L2)
            t1, t2 = t0 - s, t0 + s
            t = t1 if abs(t1 - 0.5) <= abs(t2 - 0.5) else t2
        pp = pa + t * dd
        t = min(1.0, max(0.0, t))
    p = a + t * (b - a)
    nrm = float(np.linalg.norm(pp))
    if nrm < 1e-15:
        q2 = np.array([r, 0.0])
    else:
        q2 = pp * (r / nrm)
    q = C.center + q2[0] * e1 + q2[1] * e2
    return float(np.linalg.norm(p - q))


# ---------------------------------------------------------------- triangle

def sep_circle_triangle(C: EmbeddedCircle, A, B, Cc):
    """Distance from the circle to the closed triangle ``ABC``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Cc = np.asarray(Cc, dtype=float)
    best = min(sep_circle_segment(C, A, B), sep_circle_segment(C, B, Cc),
               sep_circle_segment(C, Cc, A))
    if best == 0.0:
        return 0.0
    nT = np.cross(B - A, Cc - A)
    nT /= np.linalg.norm(nT)
    e1, e2, _ = C.frame()
    r = C.radius
    # signed height of the circle point at phi: h0 + A1 cos phi + A2 sin phi
    h0 = float((C.center - A) @ nT)
    A1 = r * float(e1 @ nT)
    A2 = r * float(e2 @ nT)
    amp = math.hypot(A1, A2)
    if amp <= 1e-14 * max(1.0, r):
        # parallel planes: the projected circle meets the triangle iff the
        # triangle is neither outside the disk nor strictly inside it
        proj = C.center - h0 * nT
        dmin = float(_point_triangle_dist(proj, A, B, Cc))
        dmax = max(float(np.linalg.norm(v - proj)) for v in (A, B, Cc))
        if dmin <= r <= dmax:
            return min(best, abs(h0))
        return best
    ph0 = math.atan2(A2, A1)
    ratio = -h0 / amp
    if abs(ratio) <= 1.0:
        # the circle pierces the plane here; inside the triangle that is contact
        dphi = math.acos(ratio)
        for phi in (ph0 + dphi, ph0 - dphi):
            x = C.point(phi)
            if _inside_triangle(x - float((x - A) @ nT) * nT, A, B, Cc, nT):
                return 0.0
    for phi in (ph0, ph0 + math.pi):
        x = C.point(phi)
        h = float((x - A) @ nT)
        if _inside_triangle(x - h * nT, A, B, Cc, nT):
            best = min(best, abs(h))
    return best


def _inside_triangle(p, A, B, C, n, tol=1e-12):
    s = max(1.0, float(np.max(np.abs(np.concatenate([A, B, C])))))
    for u, v in ((A, B), (B, C), (C, A)):
        if float(np.cross(v - u, p - u) @ n) < -tol * s * s:
            return False
    return True


def _point_triangle_dist(p, A, B, C):
    from .geom3 import closest_point_triangle
    q = closest_point_triangle(p, A, B, C)
    return np.linalg.norm(p - q)
