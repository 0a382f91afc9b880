"""Subdivision boxes of R^3 x S^2."""

from __future__ import annotations

import math

import numpy as np

from .s2atlas import FaceBox, rotbox_contact_dim, split_rotbox

FREE, STUCK, MIXED, UNKNOWN = "FREE", "STUCK", "MIXED", "UNKNOWN"
SQRT3 = math.sqrt(3.0)


class CBox:
    """Box ``Bt x Br``: an axis-aligned cube (centre, half-width) times a rotational box."""

    __slots__ = ("center", "half", "rot", "status", "features", "vfeatures", "parent",
                 "children", "depth", "id", "dmin", "near", "nbrs", "side", "queued",
                 "tlo", "thi", "rlo", "rhi")

    def __init__(self, center, half, rot, parent=None, depth=0, id=-1):
        self.center = np.asarray(center, dtype=float)
        self.half = float(half)
        self.rot = rot
        self.status = UNKNOWN
        self.features = None
        self.vfeatures = None
        self.parent = parent
        self.children = None
        self.depth = depth
        self.id = id
        self.dmin = math.inf
        self.near = False
        self.nbrs = None
        self.side = 0
        self.queued = 0
        c, h = self.center, self.half
        self.tlo = (float(c[0] - h), float(c[1] - h), float(c[2] - h))
        self.thi = (float(c[0] + h), float(c[1] + h), float(c[2] + h))
        if isinstance(rot, FaceBox):
            lo, hi = rot.closure_box()
            self.rlo, self.rhi = tuple(map(float, lo)), tuple(map(float, hi))
        else:
            self.rlo = self.rhi = None

    @property
    def radius(self) -> float:
        """Circumradius ``r_B`` of the translational cube."""
        return self.half * SQRT3

    @property
    def lo(self):
        return self.center - self.half

    @property
    def hi(self):
        return self.center + self.half

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    def t_split(self):
        h = self.half / 2
        out = []
        for i in (-1, 1):
            for j in (-1, 1):
                for k in (-1, 1):
                    out.append(CBox(self.center + h * np.array([i, j, k]), h, self.rot,
                                    self, self.depth + 1))
        return out

    def r_split(self):
        return [CBox(self.center, self.half, r, self, self.depth + 1)
                for r in split_rotbox(self.rot)]

    def contains_point(self, p) -> bool:
        """Half-open membership of a position, closed at the world border."""
        p = np.asarray(p, dtype=float)
        return bool(np.all(self.lo <= p) and np.all(p <= self.hi))

    def measure(self) -> float:
        """5-D product measure (cube volume times chart area)."""
        return (2 * self.half) ** 3 * self.rot.area()

    def __repr__(self):
        c = ",".join(f"{x:g}" for x in self.center)
        return f"CBox(({c}) h={self.half:g} {self.rot} {self.status})"


def shrink(B: CBox, sigma: float) -> CBox:
    """The box ``B / sigma``: same centres, widths divided by ``sigma``."""
    r = B.rot
    if isinstance(r, FaceBox):
        cu, cv = r.center_uv()
        w = r.w / sigma
        r = FaceBox(r.face, cu - w / 2, cv - w / 2, w)
    return CBox(B.center, B.half / sigma, r)


def translational_contact_dim(a: CBox, b: CBox) -> int:
    lo = np.maximum(a.lo, b.lo)
    hi = np.minimum(a.hi, b.hi)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(hi))))
    if np.any(lo > hi + tol):
        return -1
    return int(np.sum(hi - lo > tol))


def _contact(alo, ahi, blo, bhi, tol):
    d = 0
    for i in range(3):
        lo = alo[i] if alo[i] > blo[i] else blo[i]
        hi = ahi[i] if ahi[i] < bhi[i] else bhi[i]
        if lo > hi + tol:
            return -1
        if hi - lo > tol:
            d += 1
    return d


def contact_dims(alo, ahi, blo, bhi, tol):
    """Contact dimensions (K, n) between boxes given as bound arrays
    (K, 3) and (n, 3); -1 where the closures are disjoint."""
    lo = np.maximum(alo[:, None, :], blo[None, :, :])
    hi = np.minimum(ahi[:, None, :], bhi[None, :, :])
    gap = hi - lo
    d = np.sum(gap > tol, axis=2)
    return np.where(np.any(gap < -tol, axis=2), -1, d)


def contact_dim(a: CBox, b: CBox, tol: float = 0.0) -> int:
    """Dimension of the intersection of the closures of two boxes (-1 if empty)."""
    dt = _contact(a.tlo, a.thi, b.tlo, b.thi, tol)
    if dt < 0:
        return -1
    if a.rlo is None or b.rlo is None:
        return dt + 2
    dr = _contact(a.rlo, a.rhi, b.rlo, b.rhi, 0.0)
    return -1 if dr < 0 else dt + dr


def boxes_adjacent(a: CBox, b: CBox) -> bool:
    """Closures meet in a 4-dimensional face of the product."""
    dt = translational_contact_dim(a, b)
    if dt < 0:
        return False
    dr = rotbox_contact_dim(a.rot, b.rot)
    return dr >= 0 and dt + dr == 4
