"""Real roots of polynomials up to degree four.

Closed forms (Ferrari with a resolvent cubic) provide starting values which
are then polished by Newton steps on the original polynomial. Nearly real
complex roots are kept as candidates so that double roots are not lost to
rounding, and a root is only reported if its polished residual is small.
"""

from __future__ import annotations

import math

_TINY = 1e-13


def _horner(coeffs, x):
    p = 0.0
    dp = 0.0
    for c in coeffs:
        dp = dp * x + p
        p = p * x + c
    return p, dp


def _scale_at(coeffs, x):
    ax = abs(x)
    s = 0.0
    for c in coeffs:
        s = s * ax + abs(c)
    return s


def _polish(coeffs, x, iters=8):
    for _ in range(iters):
        p, dp = _horner(coeffs, x)
        if dp == 0.0 or p == 0.0:
            break
        step = p / dp
        nx = x - step
        if not math.isfinite(nx):
            break
        # keep the step only if it does not increase the residual
        if abs(_horner(coeffs, nx)[0]) > abs(p):
            break
        x = nx
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def _quadratic(a, b, c):
    """Complex-aware roots of a x^2 + b x + c, returned as (re, im) pairs."""
    if a == 0.0:
        if b == 0.0:
            return []
        return [(-c / b, 0.0)]
    disc = b * b - 4.0 * a * c
    if disc >= 0.0:
        sq = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(sq, b))
        if q == 0.0:
            return [(0.0, 0.0), (0.0, 0.0)]
        return [(q / a, 0.0), (c / q, 0.0)]
    re = -b / (2.0 * a)
    im = math.sqrt(-disc) / (2.0 * abs(a))
    return [(re, im), (re, -im)]


def _cubic_real(a, b, c, d):
    """Real roots of a x^3 + b x^2 + c x + d (a != 0), unpolished."""
    b, c, d = b / a, c / a, d / a
    # depressed: x = t - b/3, t^3 + p t + q = 0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    if p == 0.0 and q == 0.0:
        return [shift]
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0.0:
        sq = math.sqrt(disc)
        u = -q / 2.0 + sq if q <= 0 else -q / 2.0 - sq
        u = math.copysign(abs(u) ** (1.0 / 3.0), u)
        t = u - p / (3.0 * u) if u != 0.0 else 0.0
        roots = [t + shift]
        # a near-double pair may hide behind a tiny positive discriminant
        tr = -t / 2.0
        roots.append(tr + shift)
        return roots
    if p >= 0.0:
        return [shift]
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    arg = max(-1.0, min(1.0, arg))
    th = math.acos(arg) / 3.0
    return [m * math.cos(th - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]


def _candidates(coeffs):
    """Approximate roots (possibly spurious) of a polynomial of degree <= 4."""
    n = len(coeffs) - 1
    if n == 1:
        return [-coeffs[1] / coeffs[0]]
    if n == 2:
        return [re for re, im in _quadratic(*coeffs) if abs(im) <= 1e-6 * (1.0 + abs(re))]
    if n == 3:
        return _cubic_real(*coeffs)
    a, b, c, d, e = coeffs
    b, c, d, e = b / a, c / a, d / a, e / a
    shift = -b / 4.0
    # depressed quartic y^4 + p y^2 + q y + r
    p = c - 3.0 * b * b / 8.0
    q = d - b * c / 2.0 + b ** 3 / 8.0
    r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b ** 4 / 256.0
    out = []
    scale = max(1.0, abs(p), abs(r) ** 0.5)
    if abs(q) <= 1e-14 * scale ** 1.5:
        for z, zi in _quadratic(1.0, p, r):
            if abs(zi) > 1e-7 * (1.0 + abs(z)):
                continue
            if z >= 0.0:
                s = math.sqrt(z)
                out += [s + shift, -s + shift]
            elif z > -1e-12 * scale:
                out.append(shift)
        return out
    # resolvent 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0, largest root is > 0
    ms = _cubic_real(8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q)
    rc = (8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q)
    ms = [_polish(rc, x) for x in ms]
    m = max(ms)
    if m <= 0.0:
        m = abs(m) + 1e-300
    s = math.sqrt(2.0 * m)
    for sign in (1.0, -1.0):
        # y^2 + sign*s*y + (p/2 + m - sign*q/(2s)) = 0
        for re, im in _quadratic(1.0, sign * s, p / 2.0 + m - sign * q / (2.0 * s)):
            if abs(im) <= 1e-6 * (1.0 + abs(re)):
                out.append(re + shift)
    return out


def solve_polynomial(coeffs, tol=1e-10):
    """Real roots of a polynomial of degree at most four.

    Parameters
    ----------
    coeffs : sequence of float
        Coefficients from the highest degree down.
    tol : float
        Relative residual accepted after polishing.

    Returns
    -------
    roots : list of float
        Sorted distinct real roots.
    """
    cs = [float(c) for c in coeffs]
    big = max((abs(c) for c in cs), default=0.0)
    if big == 0.0:
        raise ValueError("all coefficients are zero")
    cs = [c / big for c in cs]
    while len(cs) > 1 and abs(cs[0]) <= _TINY:
        cs = cs[1:]
    if len(cs) == 1:
        return []
    if len(cs) > 5:
        raise ValueError("degree above four")
    roots = []
    for x in _candidates(cs):
        if not math.isfinite(x):
            continue
        x = _polish(cs, x)
        res = abs(_horner(cs, x)[0])
        if res <= tol * _scale_at(cs, x):
            roots.append(x)
    roots.sort()
    merged = []
    for x in roots:
        if merged and abs(x - merged[-1]) <= 1e-9 * max(1.0, abs(x)):
            continue
        merged.append(x)
    return merged


def solve_quartic(c4, c3, c2, c1, c0):
    """Real roots of ``c4 y^4 + c3 y^3 + c2 y^2 + c1 y + c0``.

    Degree drops (vanishing leading coefficients) fall through to the cubic,
    quadratic or linear closed forms. Repeated roots are reported once.
    """
    return solve_polynomial((c4, c3, c2, c1, c0))
