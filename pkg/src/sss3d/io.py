"""Versioned file formats: scene, planning result, segment-soup trace.

Scene files are JSON::

    {"format": "sss3d-scene", "version": 1, "name": ..., "units": ...,
     "world": {"min": [x, y, z], "max": [x, y, z]},
     "polyhedra": [{"vertices": [[x, y, z], ...], "triangles": [[i, j, k], ...]}, ...]}

Writing is canonical (fixed key order, floats in shortest round-trip form),
so ``write_scene(parse_scene(text))`` is the normal form of ``text``.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .box import CBox
from .circles import EmbeddedCircle
from .config import Config
from .scene import Polyhedron, Scene, SceneError

SCENE_FORMAT = "sss3d-scene"
RESULT_FORMAT = "sss3d-result"
TRACE_FORMAT = "sss3d-trace"
VERSION = 1
RING_SEGMENTS = 64    # display tessellation of ring footprints


class FormatError(ValueError):
    """Malformed document; the message names the location of the problem."""


# ------------------------------------------------------------------ scenes

def _vec(x, what, n=3):
    if not isinstance(x, list) or len(x) != n:
        raise FormatError(f"{what}: expected a list of {n} numbers")
    try:
        v = [float(t) for t in x]
    except (TypeError, ValueError):
        raise FormatError(f"{what}: expected numbers") from None
    if not all(math.isfinite(t) for t in v):
        raise FormatError(f"{what}: non-finite number")
    return v


def scene_to_dict(scene: Scene, name=None, units=None) -> dict:
    return {
        "format": SCENE_FORMAT,
        "version": VERSION,
        "name": name,
        "units": units,
        "world": {"min": [float(x) for x in scene.world_lo],
                  "max": [float(x) for x in scene.world_hi]},
        "polyhedra": [
            {"vertices": [[float(x) for x in v] for v in P.vertices],
             "triangles": [[int(i) for i in t] for t in P.triangles]}
            for P in scene.polyhedra
        ],
    }


def _dump(doc) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def write_scene(scene: Scene, name=None, units=None) -> str:
    return _dump(scene_to_dict(scene, name, units))


def parse_scene_dict(doc) -> tuple[Scene, dict]:
    """Scene and its metadata (``name``, ``units``) from a loaded document."""
    if not isinstance(doc, dict):
        raise FormatError("scene document must be an object")
    if doc.get("format") != SCENE_FORMAT:
        raise FormatError(f"format: expected {SCENE_FORMAT!r}")
    if doc.get("version") != VERSION:
        raise FormatError(f"version: unsupported {doc.get('version')!r}")
    world = doc.get("world")
    if not isinstance(world, dict):
        raise FormatError("world: expected an object with min and max")
    lo = _vec(world.get("min"), "world.min")
    hi = _vec(world.get("max"), "world.max")
    if not all(a < b for a, b in zip(lo, hi)):
        raise FormatError("world: min must be below max on every axis")
    polys = doc.get("polyhedra")
    if not isinstance(polys, list):
        raise FormatError("polyhedra: expected a list")
    out = []
    for k, p in enumerate(polys):
        if not isinstance(p, dict):
            raise FormatError(f"polyhedra[{k}]: expected an object")
        vs = p.get("vertices")
        ts = p.get("triangles")
        if not isinstance(vs, list) or not isinstance(ts, list):
            raise FormatError(f"polyhedra[{k}]: needs vertices and triangles lists")
        V = [_vec(v, f"polyhedra[{k}].vertices[{i}]") for i, v in enumerate(vs)]
        T = []
        for i, t in enumerate(ts):
            if (not isinstance(t, list) or len(t) != 3
                    or not all(isinstance(j, int) and not isinstance(j, bool) for j in t)):
                raise FormatError(f"polyhedra[{k}].triangles[{i}]: expected 3 integer indices")
            T.append(t)
        try:
            out.append(Polyhedron(np.array(V, dtype=float).reshape(-1, 3),
                                  np.array(T, dtype=int).reshape(-1, 3)))
        except SceneError as e:
            raise SceneError(f"polyhedron {k}: {e}") from None
    meta = {"name": doc.get("name"), "units": doc.get("units")}
    return Scene(out, lo, hi), meta


def parse_scene(text: str) -> Scene:
    """Scene from JSON text; syntax errors report line and column."""
    return parse_scene_with_meta(text)[0]


def parse_scene_with_meta(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return parse_scene_dict(doc)


def normalize_scene_text(text: str) -> str:
    scene, meta = parse_scene_with_meta(text)
    return write_scene(scene, **meta)


def load_scene(path) -> Scene:
    with open(path, encoding="utf-8") as fh:
        return parse_scene(fh.read())


def save_scene(scene: Scene, path, name=None, units=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_scene(scene, name, units))


# ----------------------------------------------------------------- results

def result_to_dict(result, run: dict) -> dict:
    """Result document; ``run`` records the inputs (robot, endpoints, eps...)."""
    stats = dict(result.stats)
    return {
        "format": RESULT_FORMAT,
        "version": VERSION,
        "outcome": result.outcome,
        "run": run,
        "path": [c.as_list() for c in result.path],
        "stats": stats,
    }


def write_result(result, run: dict) -> str:
    return _dump(result_to_dict(result, run))


def parse_result(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict) or doc.get("format") != RESULT_FORMAT:
        raise FormatError(f"format: expected {RESULT_FORMAT!r}")
    if doc.get("version") != VERSION:
        raise FormatError(f"version: unsupported {doc.get('version')!r}")
    for i, w in enumerate(doc.get("path", [])):
        _vec(w, f"path[{i}]", 6)
    return doc


def path_from_result(doc: dict):
    return [Config.from_vectors(w[:3], w[3:]) for w in doc["path"]]


# ------------------------------------------------------------------ traces

class TraceError(RuntimeError):
    """Trace requested from a run that did not record one."""


def _box_wireframe(B: CBox):
    lo, hi = B.lo, B.hi
    corners = [np.array([(hi if (k >> a) & 1 else lo)[a] for a in range(3)]) for k in range(8)]
    segs = []
    for k in range(8):
        for a in range(3):
            if not (k >> a) & 1:
                segs.append((corners[k], corners[k | (1 << a)]))
    return segs


def footprint_segments(robot, config: Config):
    """Display segments of one footprint (ring: a 64-gon)."""
    fp = robot.footprint(config)
    if isinstance(fp, EmbeddedCircle):
        pts = fp.sample(RING_SEGMENTS)
        return [(pts[i], pts[(i + 1) % RING_SEGMENTS]) for i in range(RING_SEGMENTS)]
    a, b = fp
    return [(np.asarray(a), np.asarray(b))]


def trace_sections(result, robot):
    """``{"path": [...], "footprints": [...], "boxes": [...]}`` segment lists."""
    if not getattr(result, "traced", False):
        raise TraceError("tracing was not enabled for this run")
    path = result.path
    return {
        "path": [(a.position, b.position) for a, b in zip(path[:-1], path[1:])],
        "footprints": [s for c in path for s in footprint_segments(robot, c)],
        "boxes": [s for B in result.boxes for s in _box_wireframe(B)],
    }


def write_trace(result, robot) -> tuple[str, str]:
    """Segment soup (one ``x1 y1 z1 x2 y2 z2`` per line, ``#`` section
    headers) and the stats document."""
    sec = trace_sections(result, robot)
    lines = [f"# {TRACE_FORMAT} {VERSION}"]
    for name in ("path", "footprints", "boxes"):
        lines.append(f"# {name} {len(sec[name])}")
        for a, b in sec[name]:
            lines.append(" ".join(repr(float(x)) for x in (*a, *b)))
    stats = {"format": TRACE_FORMAT + "-stats", "version": VERSION, "outcome": result.outcome,
             "segments": {k: len(v) for k, v in sec.items()}, "stats": dict(result.stats)}
    return "\n".join(lines) + "\n", _dump(stats)


def parse_trace(text: str) -> dict:
    """Section name -> array (n, 6) of segments."""
    out = {}
    cur = None
    for i, line in enumerate(text.splitlines(), 1):
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] in ("path", "footprints", "boxes"):
                cur = parts[0]
                out[cur] = []
            continue
        if cur is None:
            raise FormatError(f"line {i}: segment before any section header")
        vals = line.split()
        if len(vals) != 6:
            raise FormatError(f"line {i}: expected 6 numbers")
        out[cur].append([float(v) for v in vals])
    return {k: np.array(v, dtype=float).reshape(-1, 6) for k, v in out.items()}
