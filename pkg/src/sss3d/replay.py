"""Dense replay of waypoint paths against the clearance oracle."""

from __future__ import annotations

import math

import numpy as np

from .config import Config


def slerp(a, b, t):
    """Great-circle interpolation between unit vectors; antipodal pairs turn
    about a fixed perpendicular axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = float(np.clip(a @ b, -1.0, 1.0))
    om = math.acos(c)
    if om < 1e-12:
        return a.copy()
    if math.pi - om < 1e-9:
        p = np.cross(a, np.eye(3)[int(np.argmin(np.abs(a)))])
        p /= np.linalg.norm(p)
        return math.cos(t * math.pi) * a + math.sin(t * math.pi) * p
    return (math.sin((1 - t) * om) * a + math.sin(t * om) * b) / math.sin(om)


def interpolate(c0: Config, c1: Config, step: float, size: float):
    """Configurations from ``c0`` to ``c1`` (inclusive) where neither the
    position nor any footprint point (at distance ``size`` from the
    reference point) moves more than ``step`` between samples."""
    d0, d1 = c0.unit_direction, c1.unit_direction
    ang = math.acos(float(np.clip(d0 @ d1, -1.0, 1.0)))
    span = max(float(np.linalg.norm(c1.position - c0.position)) + size * ang, 0.0)
    n = max(1, math.ceil(span / step))
    out = []
    for i in range(n + 1):
        t = i / n
        out.append(Config.from_vectors((1 - t) * c0.position + t * c1.position, slerp(d0, d1, t)))
    return out


def replay(scene, robot, path, step: float):
    """Minimum oracle clearance along the densely interpolated path and the
    number of configurations checked."""
    best = math.inf
    count = 0
    for a, b in zip(path[:-1], path[1:]):
        for c in interpolate(a, b, step, robot.size):
            best = min(best, robot.clearance(c, scene))
            count += 1
    if len(path) == 1:
        best = robot.clearance(path[0], scene)
        count = 1
    return best, count
