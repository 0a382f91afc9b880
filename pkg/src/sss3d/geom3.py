"""Geometric primitives and the elementary / Pi1 / Sigma2 set algebra.

Points are numpy arrays of shape ``(3,)``; most helpers broadcast over a
leading batch axis. A ``Pi1Set`` is an intersection of elementary sets and
a ``Sigma2Set`` a union of ``Pi1Set`` terms. The footprint builders produce
such sets, and ``intersects_feature_conservative`` answers the one-sided
question "might this feature touch the set?": ``False`` is only returned
when the intersection is provably empty.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .circles import EmbeddedCircle, sep_circle_point, sep_circle_triangle

__all__ = [
    "vec3", "Corner", "Edge", "Wall", "Feature",
    "HalfSpace", "Ball", "BallComplement", "RoundCone", "RoundConeComplement",
    "Cylinder", "ThickRing", "EmbeddedCircle", "Pi1Set", "Sigma2Set",
    "contains", "sep_point_feature", "clip_segment_halfspace",
    "intersects_feature_conservative", "expand_tau",
    "point_segment_dist", "closest_point_triangle", "point_triangle_dist",
]

TOL = 1e-12


def vec3(x, y, z):
    return np.array([x, y, z], dtype=float)


def _unit(v):
    v = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if not n > 0:
        raise ValueError("zero vector where a direction is required")
    return v / n


# ------------------------------------------------------------------ features

@dataclass(frozen=True, eq=False)
class Corner:
    p: np.ndarray
    owner: int = -1

    dim = 0


@dataclass(frozen=True, eq=False)
class Edge:
    a: np.ndarray
    b: np.ndarray
    owner: int = -1

    dim = 1


@dataclass(frozen=True, eq=False)
class Wall:
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    owner: int = -1
    normal: np.ndarray | None = None

    dim = 2

    @property
    def vertices(self):
        return (self.p1, self.p2, self.p3)


Feature = Corner | Edge | Wall


# ------------------------------------------------------- point separations

def point_segment_dist(p, a, b):
    """Distance from points ``p`` to segments ``[a, b]`` (broadcasting)."""
    p, a, b = (np.asarray(x, dtype=float) for x in (p, a, b))
    d = b - a
    dd = np.sum(d * d, axis=-1)
    t = np.clip(np.sum((p - a) * d, axis=-1) / np.where(dd > 0, dd, 1.0), 0.0, 1.0)
    q = a + t[..., None] * d
    return np.linalg.norm(p - q, axis=-1)


def closest_point_triangle(p, a, b, c):
    """Closest point of the closed triangle ``abc`` to ``p``; broadcasts.

    Voronoi-region classification of the query against the vertices, edges
    and face of the triangle, done branch-free so that batches vectorize.
    """
    p, a, b, c = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (p, a, b, c)))
    ab, ac, ap = b - a, c - a, p - a
    d1 = np.sum(ab * ap, -1)
    d2 = np.sum(ac * ap, -1)
    bp = p - b
    d3 = np.sum(ab * bp, -1)
    d4 = np.sum(ac * bp, -1)
    cp = p - c
    d5 = np.sum(ab * cp, -1)
    d6 = np.sum(ac * cp, -1)
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    with np.errstate(divide="ignore", invalid="ignore"):
        denom = va + vb + vc
        v = np.where(denom != 0, vb / denom, 0.0)
        w = np.where(denom != 0, vc / denom, 0.0)
        out = a + v[..., None] * ab + w[..., None] * ac
        # edge bc
        wbc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        m = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
        out = np.where(m[..., None], b + np.nan_to_num(wbc)[..., None] * (c - b), out)
        # edge ac
        wac = d2 / (d2 - d6)
        m = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
        out = np.where(m[..., None], a + np.nan_to_num(wac)[..., None] * ac, out)
        # edge ab
        vab = d1 / (d1 - d3)
        m = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
        out = np.where(m[..., None], a + np.nan_to_num(vab)[..., None] * ab, out)
    # vertex regions last so they take precedence
    out = np.where(((d6 >= 0) & (d5 <= d6))[..., None], c, out)
    out = np.where(((d3 >= 0) & (d4 <= d3))[..., None], b, out)
    out = np.where(((d1 <= 0) & (d2 <= 0))[..., None], a, out)
    return out


def point_triangle_dist(p, a, b, c):
    return np.linalg.norm(np.asarray(p, dtype=float) - closest_point_triangle(p, a, b, c), axis=-1)


def sep_point_feature(p, f) -> float:
    """Euclidean distance from ``p`` to the closure of feature ``f``."""
    p = np.asarray(p, dtype=float)
    if isinstance(f, Corner):
        return float(np.linalg.norm(p - f.p))
    if isinstance(f, Edge):
        return float(point_segment_dist(p, f.a, f.b))
    if isinstance(f, Wall):
        return float(point_triangle_dist(p, f.p1, f.p2, f.p3))
    raise TypeError(f"not a feature: {f!r}")


# --------------------------------------------------------- interval helpers

def _real_roots_in(coeffs, lo=0.0, hi=1.0):
    """Real roots in ``[lo, hi]`` of a polynomial (highest degree first)."""
    from .quartic import solve_polynomial
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if c.size <= 1 or np.max(np.abs(c)) == 0.0:
        return []
    return [t for t in solve_polynomial(c, tol=1e-8) if lo - 1e-12 <= t <= hi + 1e-12]


def _intervals_from_breaks(breaks, member):
    """Build the sub-intervals of [0, 1] on which ``member(t)`` holds, given
    all points where membership can change."""
    pts = sorted({0.0, 1.0, *[min(1.0, max(0.0, t)) for t in breaks]})
    out = []

    def add(lo, hi):
        if out and lo <= out[-1][1] + 1e-15:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))

    for i, t in enumerate(pts):
        if member(t):
            add(t, t)
        if i + 1 < len(pts):
            u = pts[i + 1]
            if u > t and member(0.5 * (t + u)):
                add(t, u)
    return out


def _intersect_intervals(xs, ys):
    out = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        lo = max(xs[i][0], ys[j][0])
        hi = min(xs[i][1], ys[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if xs[i][1] < ys[j][1]:
            i += 1
        else:
            j += 1
    return out


# --------------------------------------------------------- elementary sets

class Elementary:
    """Base class. Subclasses implement ``value`` (<= 0 inside), ``line_polys``
    (polynomials along p(t) = a + t d whose roots are the only places
    membership can change) and ``expand`` (list of alternatives, each a list
    of elementary sets to intersect)."""

    convex = True

    def contains(self, p, tol=0.0):
        return self.value(np.asarray(p, dtype=float)) <= tol

    def segment_intervals(self, a, b, tol=TOL):
        a = np.asarray(a, dtype=float)
        d = np.asarray(b, dtype=float) - a
        breaks = []
        for poly in self.line_polys(a, d):
            breaks += _real_roots_in(poly)
        scale = tol * max(1.0, self.scale())
        return _intervals_from_breaks(breaks, lambda t: bool(self.value(a + t * d) <= scale))

    def scale(self):
        return 1.0


@dataclass(frozen=True, eq=False)
class HalfSpace(Elementary):
    """``{x : normal . x >= offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", _unit(self.normal))
        object.__setattr__(self, "offset", float(self.offset))

    def value(self, p):
        return self.offset - p @ self.normal

    def line_polys(self, a, d):
        return [[-(d @ self.normal), self.offset - a @ self.normal]]

    def expand(self, tau):
        return [[HalfSpace(self.normal, self.offset - tau)]]

    def scale(self):
        return abs(self.offset)


@dataclass(frozen=True, eq=False)
class Ball(Elementary):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))
        if self.radius < 0:
            raise ValueError("negative radius")

    def value(self, p):
        return np.linalg.norm(p - self.center, axis=-1) - self.radius

    def line_polys(self, a, d):
        w = a - self.center
        return [[d @ d, 2 * (w @ d), w @ w - self.radius ** 2]]

    def expand(self, tau):
        return [[Ball(self.center, self.radius + tau)]]

    def scale(self):
        return self.radius + float(np.max(np.abs(self.center)))


@dataclass(frozen=True, eq=False)
class BallComplement(Elementary):
    """Closed complement ``{x : |x - center| >= radius}``."""

    center: np.ndarray
    radius: float
    convex = False

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))
        if self.radius < 0:
            raise ValueError("negative radius")

    def value(self, p):
        return self.radius - np.linalg.norm(p - self.center, axis=-1)

    def line_polys(self, a, d):
        w = a - self.center
        return [[d @ d, 2 * (w @ d), w @ w - self.radius ** 2]]

    def expand(self, tau):
        return [[BallComplement(self.center, max(0.0, self.radius - tau))]]

    def scale(self):
        return self.radius + float(np.max(np.abs(self.center)))


def _cone_value(p, apex, axis, half_angle, double):
    w = p - apex
    r = np.linalg.norm(w, axis=-1)
    h = w @ axis
    if double:
        h = np.abs(h)
    # angle(w, axis) - half_angle, evaluated as a length-scaled quantity
    return r * math.cos(half_angle) - h


@dataclass(frozen=True, eq=False)
class RoundCone(Elementary):
    """Points whose direction from ``apex`` is within ``half_angle`` of ``axis``.

    With ``double`` the opposite nappe is included as well.
    """

    apex: np.ndarray
    axis: np.ndarray
    half_angle: float
    double: bool = False

    def __post_init__(self):
        object.__setattr__(self, "apex", np.asarray(self.apex, dtype=float).reshape(3))
        object.__setattr__(self, "axis", _unit(self.axis))
        if not 0.0 <= self.half_angle <= math.pi / 2 + 1e-15:
            raise ValueError("cone half-angle must lie in [0, pi/2]")

    @property
    def convex(self):
        return not self.double

    def value(self, p):
        return _cone_value(p, self.apex, self.axis, self.half_angle, self.double)

    def line_polys(self, a, d):
        w = a - self.apex
        c2 = math.cos(self.half_angle) ** 2
        wa, da = w @ self.axis, d @ self.axis
        quad = [da * da - c2 * (d @ d), 2 * (wa * da - c2 * (w @ d)), wa * wa - c2 * (w @ w)]
        return [quad, [da, wa]]

    def expand(self, tau):
        s = math.sin(self.half_angle)
        if tau == 0.0:
            return [[self]]
        shift = tau / s if s > 0 else math.inf
        if not math.isfinite(shift):
            return [[Cylinder(self.apex, self.axis, tau)]]
        up = RoundCone(self.apex - shift * self.axis, self.axis, self.half_angle)
        if not self.double:
            return [[up]]
        down = RoundCone(self.apex + shift * self.axis, -self.axis, self.half_angle)
        return [[up], [down]]

    def scale(self):
        return float(np.max(np.abs(self.apex)))


@dataclass(frozen=True, eq=False)
class RoundConeComplement(Elementary):
    """Closed complement of the open ``RoundCone`` with the same parameters."""

    apex: np.ndarray
    axis: np.ndarray
    half_angle: float
    double: bool = False
    convex = False

    def __post_init__(self):
        object.__setattr__(self, "apex", np.asarray(self.apex, dtype=float).reshape(3))
        object.__setattr__(self, "axis", _unit(self.axis))
        if not 0.0 <= self.half_angle <= math.pi / 2 + 1e-15:
            raise ValueError("cone half-angle must lie in [0, pi/2]")

    def value(self, p):
        return -_cone_value(p, self.apex, self.axis, self.half_angle, self.double)

    def line_polys(self, a, d):
        return RoundCone.line_polys(self, a, d)

    def expand(self, tau):
        # the complement grows by pulling each nappe's apex inwards
        if tau == 0.0:
            return [[self]]
        s = math.sin(self.half_angle)
        if s <= 0:
            return [[]]
        shift = tau / s
        terms = [RoundConeComplement(self.apex + shift * self.axis, self.axis, self.half_angle)]
        if self.double:
            terms.append(RoundConeComplement(self.apex - shift * self.axis, -self.axis,
                                             self.half_angle))
        return [terms]

    def scale(self):
        return float(np.max(np.abs(self.apex)))


@dataclass(frozen=True, eq=False)
class Cylinder(Elementary):
    """Infinite solid cylinder of ``radius`` around the line through
    ``point`` along ``axis``."""

    point: np.ndarray
    axis: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float).reshape(3))
        object.__setattr__(self, "axis", _unit(self.axis))

    def value(self, p):
        w = p - self.point
        h = w @ self.axis
        return np.sqrt(np.maximum(0.0, np.sum(w * w, -1) - h * h)) - self.radius

    def line_polys(self, a, d):
        w = a - self.point
        wa, da = w @ self.axis, d @ self.axis
        return [[d @ d - da * da, 2 * (w @ d - wa * da), w @ w - wa * wa - self.radius ** 2]]

    def expand(self, tau):
        return [[Cylinder(self.point, self.axis, self.radius + tau)]]

    def scale(self):
        return self.radius + float(np.max(np.abs(self.point)))


@dataclass(frozen=True, eq=False)
class ThickRing(Elementary):
    """Points within ``thickness`` of an embedded circle."""

    circle: EmbeddedCircle
    thickness: float
    convex = False

    def value(self, p):
        return sep_circle_point(self.circle, p) - self.thickness

    def line_polys(self, a, d):
        # dist^2 <= th^2  <=>  G <= 2 r rho,  G = |w|^2 + r^2 - th^2
        C = self.circle
        w = a - C.center
        n = C.normal
        r, th = C.radius, self.thickness
        G = np.array([d @ d, 2 * (w @ d), w @ w + r * r - th * th])
        wn, dn = w @ n, d @ n
        rho2 = np.array([d @ d - dn * dn, 2 * (w @ d - wn * dn), w @ w - wn * wn])
        quart = np.polysub(np.polymul(G, G), 4 * r * r * rho2)
        return [G, quart, rho2]

    def expand(self, tau):
        return [[ThickRing(self.circle, self.thickness + tau)]]

    def scale(self):
        return self.circle.radius + float(np.max(np.abs(self.circle.center)))


# ------------------------------------------------------------- Pi1 / Sigma2

@dataclass(frozen=True, eq=False)
class Pi1Set:
    """Intersection of elementary sets; the empty list is all of R^3."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def contains(self, p, tol=0.0):
        p = np.asarray(p, dtype=float)
        out = np.ones(p.shape[:-1], dtype=bool)
        for e in self.terms:
            out &= e.contains(p, tol)
        return out


@dataclass(frozen=True, eq=False)
class Sigma2Set:
    """Union of ``Pi1Set`` terms; the empty list is the empty set."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(
            t if isinstance(t, Pi1Set) else Pi1Set(t) for t in self.terms))

    def contains(self, p, tol=0.0):
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape[:-1], dtype=bool)
        for t in self.terms:
            out |= t.contains(p, tol)
        return out


def _as_sigma2(s):
    if isinstance(s, Sigma2Set):
        return s
    if isinstance(s, Pi1Set):
        return Sigma2Set((s,))
    if isinstance(s, Elementary):
        return Sigma2Set((Pi1Set((s,)),))
    raise TypeError(f"not a set: {s!r}")


def contains(s, p, tol=0.0):
    """Membership of ``p`` (or a batch of points) in a set of the algebra."""
    return _as_sigma2(s).contains(p, tol)


def expand_tau(s, tau: float) -> Sigma2Set:
    """A Sigma2 superset of ``s (+) Ball(tau)``.

    Each Pi1 term is expanded factor by factor, which is a superset because
    Minkowski sums distribute over unions and are sub-distributive over
    intersections.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    s = _as_sigma2(s)
    if tau == 0:
        return s
    out = []
    for term in s.terms:
        alts = [[]]
        for e in term.terms:
            alts = [x + y for x in alts for y in e.expand(tau)]
        out += [Pi1Set(a) for a in alts]
    return Sigma2Set(out)


def clip_segment_halfspace(seg, h: HalfSpace):
    """Part of the segment inside the half-space, or ``None`` if empty."""
    a, b = (np.asarray(x, dtype=float) for x in seg)
    fa = a @ h.normal - h.offset
    fb = b @ h.normal - h.offset
    if fa >= 0 and fb >= 0:
        return a, b
    if fa < 0 and fb < 0:
        return None
    t = fa / (fa - fb)
    m = a + t * (b - a)
    return (m, b) if fa < 0 else (a, m)


def clip_polygon_halfspace(poly, h: HalfSpace, tol=0.0):
    """Sutherland-Hodgman clip of a convex polygon (list of points)."""
    out = []
    n = len(poly)
    if n == 0:
        return out
    vals = [float(p @ h.normal - h.offset) for p in poly]
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp, fq = vals[i], vals[(i + 1) % n]
        if fp >= -tol:
            out.append(p)
        if (fp >= -tol) != (fq >= -tol) and fp != fq:
            t = fp / (fp - fq)
            out.append(p + t * (q - p))
    return out


# ------------------------------------------------- conservative feature tests

def _segment_hits_terms(a, b, terms):
    iv = [(0.0, 1.0)]
    for e in terms:
        iv = _intersect_intervals(iv, e.segment_intervals(a, b))
        if not iv:
            return False
    return True


def _poly_plane(poly):
    p0 = poly[0]
    best = None
    for i in range(1, len(poly) - 1):
        n = np.cross(poly[i] - p0, poly[i + 1] - p0)
        if best is None or np.linalg.norm(n) > np.linalg.norm(best):
            best = n
    return best


def _point_in_convex_polygon(x, poly, n, tol=1e-12):
    s = max(1.0, max(float(np.max(np.abs(p))) for p in poly))
    for i in range(len(poly)):
        u, v = poly[i], poly[(i + 1) % len(poly)]
        if float(np.cross(v - u, x - u) @ n) < -tol * s * s:
            return False
    return True


def _ray_hits_polygon(origin, direction, poly, n, both_ways=False):
    denom = float(direction @ n)
    if abs(denom) < 1e-15:
        return False
    t = float((poly[0] - origin) @ n) / denom
    if t < 0 and not both_ways:
        return False
    return _point_in_convex_polygon(origin + t * direction, poly, n)


def _fan(poly):
    return [(poly[0], poly[i], poly[i + 1]) for i in range(1, len(poly) - 1)]


def _poly_dist_range(c, poly):
    """[min, max] distance from point ``c`` to a convex polygon."""
    dmin = min(float(point_triangle_dist(c, *t)) for t in _fan(poly))
    dmax = max(float(np.linalg.norm(p - c)) for p in poly)
    return dmin, dmax


def _angle_range(apex, axis, poly):
    """Interval enclosing the angle between ``axis`` and ``x - apex`` over the
    convex polygon. Computed from the vertex angles widened by the angular
    radius of the polygon as seen from the apex."""
    dirs = [p - apex for p in poly]
    norms = [float(np.linalg.norm(d)) for d in dirs]
    dmin, dmax = _poly_dist_range(apex, poly)
    if dmin <= 1e-15:
        return 0.0, math.pi
    angs = [math.acos(max(-1.0, min(1.0, float(d @ axis) / nd))) for d, nd in zip(dirs, norms)]
    n = _poly_plane(poly)
    if _ray_hits_polygon(apex, axis, poly, n):
        lo = 0.0
    else:
        lo = None
    if _ray_hits_polygon(apex, -axis, poly, n):
        hi = math.pi
    else:
        hi = None
    # any polygon point lies within this angular radius of some vertex direction
    diam = max(float(np.linalg.norm(p - q)) for p in poly for q in poly)
    spread = math.asin(min(1.0, diam / dmin)) if diam < dmin else math.pi
    lo = max(0.0, min(angs) - spread) if lo is None else lo
    hi = min(math.pi, max(angs) + spread) if hi is None else hi
    return lo, hi


def _certify_empty(e, poly):
    """True if the elementary set provably misses the convex polygon."""
    if isinstance(e, HalfSpace):
        return all(float(e.value(p)) > 0 for p in poly)
    if isinstance(e, Ball):
        return _poly_dist_range(e.center, poly)[0] > e.radius
    if isinstance(e, BallComplement):
        return _poly_dist_range(e.center, poly)[1] < e.radius
    if isinstance(e, ThickRing):
        return min(sep_circle_triangle(e.circle, *t) for t in _fan(poly)) > e.thickness
    if isinstance(e, (RoundCone, RoundConeComplement)):
        lo, hi = _angle_range(e.apex, e.axis, poly)
        th = e.half_angle
        if isinstance(e, RoundCone):
            if e.double:
                return lo > th and hi < math.pi - th
            return lo > th
        if e.double:
            return hi < th or lo > math.pi - th
        return hi < th
    if isinstance(e, Cylinder):
        n = _poly_plane(poly)
        if _ray_hits_polygon(e.point, e.axis, poly, n, both_ways=True):
            return False
        k = len(poly)
        return min(_segment_line_dist(poly[i], poly[(i + 1) % k], e.point, e.axis)
                   for i in range(k)) > e.radius
    return False


def _segment_line_dist(a, b, p, u):
    """Distance between segment ``[a, b]`` and the line ``p + s u`` (unit u)."""
    d = b - a
    w = a - p
    # distance^2 to the line along the segment is a convex quadratic in t
    dp = d - (d @ u) * u
    wp = w - (w @ u) * u
    den = float(dp @ dp)
    t = 0.0 if den == 0.0 else min(1.0, max(0.0, -float(wp @ dp) / den))
    return float(np.linalg.norm(wp + t * dp))


def _exact_single_term_interior(e, poly):
    """For a convex polygon whose boundary misses ``e``, decide whether the
    polygon interior meets ``e``. Returns None when no exact rule applies."""
    n = _poly_plane(poly)
    if isinstance(e, Ball):
        return _poly_dist_range(e.center, poly)[0] <= e.radius
    if isinstance(e, (BallComplement, RoundConeComplement)):
        # convex complement side already contains the whole boundary
        return False
    if isinstance(e, RoundCone):
        hit = _ray_hits_polygon(e.apex, e.axis, poly, n)
        if e.double:
            hit = hit or _ray_hits_polygon(e.apex, -e.axis, poly, n)
        return hit
    if isinstance(e, Cylinder):
        return _ray_hits_polygon(e.point, e.axis, poly, n, both_ways=True)
    if isinstance(e, ThickRing):
        return min(sep_circle_triangle(e.circle, *t) for t in _fan(poly)) <= e.thickness
    return None


def _subdivide_test(terms, tri, depth):
    """Recursive certificate search on a triangle; True means 'may intersect'."""
    c = (tri[0] + tri[1] + tri[2]) / 3.0
    if all(bool(e.contains(c, TOL * max(1.0, e.scale()))) for e in terms):
        return True
    if any(_certify_empty(e, list(tri)) for e in terms):
        return False
    if depth == 0:
        return True
    a, b, cc = tri
    ab, bc, ca = (a + b) / 2, (b + cc) / 2, (cc + a) / 2
    return any(_subdivide_test(terms, t, depth - 1)
               for t in ((a, ab, ca), (ab, b, bc), (ca, bc, cc), (ab, bc, ca)))


def _wall_hits_pi1(term: Pi1Set, tri, depth=5):
    poly = [np.asarray(p, dtype=float) for p in tri]
    rest = []
    for e in term.terms:
        if isinstance(e, HalfSpace):
            poly = clip_polygon_halfspace(poly, e, TOL * max(1.0, e.scale()))
            if not poly:
                return False
        else:
            rest.append(e)
    if not rest:
        return True
    if len(poly) < 3:
        # degenerate clip (point or segment)
        a, b = poly[0], poly[-1]
        return _segment_hits_terms(a, b, rest)
    k = len(poly)
    for i in range(k):
        if _segment_hits_terms(poly[i], poly[(i + 1) % k], rest):
            return True
    for e in rest:
        if _certify_empty(e, poly):
            return False
    if len(rest) == 1:
        exact = _exact_single_term_interior(rest[0], poly)
        if exact is not None:
            return exact
    # the intersection, if any, lies strictly inside the polygon
    return any(_subdivide_test(rest, t, depth) for t in _fan(poly))


def intersects_feature_conservative(s, f, depth: int = 5) -> bool:
    """One-sided test: ``False`` only if feature ``f`` misses set ``s``.

    Corners and edges are decided exactly up to root-finding tolerance.
    Walls are clipped by the half-space factors; the remaining factors are
    tested on the clipped polygon boundary, then by emptiness certificates,
    and finally by a bounded subdivision that answers ``True`` when no
    certificate is found.
    """
    s = _as_sigma2(s)
    if isinstance(f, Corner):
        return any(bool(t.contains(f.p, TOL * max(1.0, float(np.max(np.abs(f.p))))))
                   for t in s.terms)
    if isinstance(f, Edge):
        return any(_segment_hits_terms(f.a, f.b, t.terms) for t in s.terms)
    if isinstance(f, Wall):
        return any(_wall_hits_pi1(t, f.vertices, depth) for t in s.terms)
    raise TypeError(f"not a feature: {f!r}")
