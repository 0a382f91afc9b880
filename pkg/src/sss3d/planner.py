"""Soft subdivision search over R^3 x S^2.

The search keeps a subdivision tree of boxes, a priority queue of MIXED
candidate leaves, and a union-find structure over FREE leaves whose edges
are box adjacencies. Start and goal boxes are refined first; then
candidates are split until the two boxes share a component (PATH) or no
candidate can ever join them (NO-PATH).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
import heapq
import math
import time

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .box import FREE, MIXED, STUCK, CBox, _contact, contact_dims
from .config import Config
from .s2atlas import FaceBox, WholeSphere, chart, project_to_cube
from .scene import Scene, point_inside_union

STRATEGIES = ("BFS", "GREEDY", "DIST_PLUS_SIZE", "VORONOI", "RANDOM")
# strategies that grow the start and goal components toward each other
FRONTIER_STRATEGIES = ("GREEDY", "DIST_PLUS_SIZE", "VORONOI")
PATH, NO_PATH, BUDGET = "PATH", "NO_PATH", "BUDGET_EXCEEDED"


class PlannerInputError(ValueError):
    """Start or goal outside the world box, or bad parameters."""


@dataclass
class PlannerConfig:
    eps: float
    strategy: str = "GREEDY"
    seed: int = 0
    max_boxes: int = 2_000_000
    voronoi_delta: float | None = None   # default 2 r_B
    size_weight: float = 0.5             # DIST_PLUS_SIZE lambda
    check_invariants: bool = False
    trace: bool = False

    def __post_init__(self):
        if not self.eps > 0:
            raise PlannerInputError("eps must be positive")
        self.strategy = self.strategy.upper()
        if self.strategy not in STRATEGIES:
            raise PlannerInputError(f"unknown strategy {self.strategy!r}")


@dataclass
class PlanResult:
    outcome: str
    path: list = field(default_factory=list)
    boxes: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    planner: "SSSPlanner | None" = None
    traced: bool = False

    @property
    def found(self) -> bool:
        return self.outcome == PATH


def box_config(B: CBox) -> Config:
    """Central configuration of a box."""
    if isinstance(B.rot, FaceBox):
        u, v = B.rot.center_uv()
        return Config(B.center.copy(), project_to_cube(chart(B.rot.face, u, v)))
    return Config(B.center.copy(), project_to_cube([1.0, 0.0, 0.0]))


def _rot_closure(r):
    if isinstance(r, WholeSphere):
        return None
    return r.closure_box()


def shared_face_config(a: CBox, b: CBox) -> Config:
    """Configuration at the centre of the common face of two adjacent boxes."""
    lo = np.maximum(a.lo, b.lo)
    hi = np.minimum(a.hi, b.hi)
    pos = 0.5 * (lo + hi)
    ra, rb = _rot_closure(a.rot), _rot_closure(b.rot)
    if ra is None and rb is None:
        q = np.array([1.0, 0.0, 0.0])
    elif ra is None:
        q = 0.5 * (rb[0] + rb[1])
    elif rb is None:
        q = 0.5 * (ra[0] + ra[1])
    else:
        q = 0.5 * (np.maximum(ra[0], rb[0]) + np.minimum(ra[1], rb[1]))
    return Config(pos, project_to_cube(q))


class SSSPlanner:
    """One planning run; keeps the tree for inspection after ``run``.

    Besides the candidate queue, the planner tracks the FREE components of
    the start and goal boxes and, for each, a frontier heap of the candidate
    leaves adjacent to it. A component whose frontier is empty can never
    grow, so the two can never meet: that is NO-PATH, exactly as if the
    queue had been drained. Heuristic strategies draw from the two
    frontiers alternately, growing each side toward the other endpoint;
    BFS and RANDOM draw from the global queue.
    """

    def __init__(self, scene: Scene, robot, cfg: PlannerConfig):
        self.scene = scene
        self.robot = robot
        self.cfg = cfg
        c = 0.5 * (scene.world_lo + scene.world_hi)
        h = 0.5 * float(np.max(scene.world_hi - scene.world_lo))
        self.root = CBox(c, h, WholeSphere(), None, 0, 0)
        self.root.nbrs = {}
        self.n_boxes = 1
        self.n_splits = 0
        self.counts = {FREE: 0, STUCK: 0, MIXED: 0}
        self.uf = DisjointSet()
        self.queue = []
        self.frontier = ([], [])
        self._targets = (None, None)
        self._tick = 0
        self._rng = np.random.default_rng(cfg.seed)
        self._marked = False
        self.free_boxes = []
        self.eps_abs = 1e-9 * scene.diameter
        self.all_ids = np.arange(scene.n_features)
        self.tol = 1e-9 * h

    # ------------------------------------------------------------ geometry

    def is_candidate(self, B: CBox) -> bool:
        if B.status != MIXED or B.children is not None:
            return False
        if isinstance(B.rot, WholeSphere):
            return True
        return B.radius >= self.cfg.eps or B.rot.w * self.robot.size >= self.cfg.eps

    def split(self, B: CBox):
        """Children of ``B``: rotational split for the whole sphere or when
        the angular width (in robot units) exceeds the translational
        half-width, translational split otherwise."""
        if isinstance(B.rot, WholeSphere) or B.half < B.rot.w * self.robot.size:
            kids = B.r_split()
        else:
            kids = B.t_split()
        for k in kids:
            k.id = self.n_boxes
            self.n_boxes += 1
        B.children = kids
        self.n_splits += 1
        return kids

    # ------------------------------------------------------ classification

    def classify(self, boxes, parent_ids):
        """Soft classification of sibling boxes from the parent feature set."""
        mask = self.robot.filter_features(boxes, self.scene, parent_ids, self.eps_abs)
        for B, row in zip(boxes, mask):
            B.features = parent_ids[row]
            if B.features.size:
                B.status = MIXED
            elif point_inside_union(self.scene, self.robot.probe_point(B)):
                B.status = STUCK
            else:
                B.status = FREE
            self.counts[B.status] += 1
            if self.cfg.check_invariants:
                assert np.all(np.isin(B.features, parent_ids)), "feature set not inherited"
        if self.cfg.strategy == "VORONOI":
            for B in boxes:
                self._voronoi(B)

    def _voronoi(self, B: CBox):
        parent = B.parent
        if parent is not None and parent.half == B.half:
            # rotational split: same translational cube
            B.vfeatures, B.dmin, B.near = parent.vfeatures, parent.dmin, parent.near
            return
        pv = self.all_ids if parent is None else parent.vfeatures
        B.vfeatures, B.dmin, B.near = voronoi_feature_set(self.scene, B, pv, self.cfg.voronoi_delta)

    # ------------------------------------------------------------ priority

    def priority(self, B: CBox, target=None):
        """Ordering key; smaller is expanded first. ``target`` is the
        position the box should approach (the goal by default)."""
        s = self.cfg.strategy
        if s == "BFS":
            return 0.0
        if s == "RANDOM":
            return float(self._rng.random())
        t = self._targets[0] if target is None else target
        d = float(np.linalg.norm(B.center - t))
        if s == "GREEDY":
            return d
        if s == "DIST_PLUS_SIZE":
            return d - self.cfg.size_weight * 2 * B.half
        return (0 if B.near else 1, d)

    def _push_global(self, B: CBox):
        self._tick += 1
        heapq.heappush(self.queue, (self.priority(B), self._tick, B))

    def _push_frontier(self, B: CBox, side: int):
        bit = 1 << side
        if B.queued & bit:
            return
        B.queued |= bit
        self._tick += 1
        if self.cfg.strategy in FRONTIER_STRATEGIES:
            key = self.priority(B, self._targets[side])
        else:
            key = 0.0
        heapq.heappush(self.frontier[side], (key, self._tick, B))

    def _absorb(self, B: CBox, side: int):
        """Mark the FREE region reachable from ``B`` as part of an endpoint
        component and queue its candidate neighbours on that frontier."""
        bit = 1 << side
        if B.side & bit:
            return
        B.side |= bit
        todo = [B]
        while todo:
            X = todo.pop()
            for N in X.nbrs.values():
                if N.status == FREE:
                    if not N.side & bit:
                        N.side |= bit
                        todo.append(N)
                elif self.is_candidate(N):
                    self._push_frontier(N, side)

    def _frontier_top(self, side: int):
        """Best live frontier box of one side (None when the side is sealed)."""
        h = self.frontier[side]
        while h and h[0][-1].children is not None:
            heapq.heappop(h)
        return h[0][-1] if h else None

    # ------------------------------------------------------- connectivity

    def _link_children(self, B: CBox, kids):
        """Adjacency lists of the children, from siblings and the parent's
        neighbours (a leaf touching a child also touches the parent).

        A split keeps one factor of the parent, so that factor's contact
        with a neighbour is computed once. Siblings are adjacent when their
        indices differ in one bit (octants, quadrants) or, for the six
        faces of the sphere, when the faces are not opposite.
        """
        tol = self.tol
        for k in kids:
            k.nbrs = {}
        whole = isinstance(B.rot, WholeSphere)
        for i, k in enumerate(kids):
            for j in range(i + 1, len(kids)):
                if (i // 2 != j // 2) if whole else bin(i ^ j).count("1") == 1:
                    s = kids[j]
                    k.nbrs[s.id] = s
                    s.nbrs[k.id] = k
        nbrs = list(B.nbrs.values())
        for N in nbrs:
            del N.nbrs[B.id]
        if not nbrs:
            B.nbrs = None
            return
        if kids[0].rot is B.rot:
            # translational split: rotational contact is the parent's
            dr = np.array([_contact(B.rlo, B.rhi, N.rlo, N.rhi, 0.0)
                           if B.rlo is not None and N.rlo is not None else 2 for N in nbrs])
            D = contact_dims(np.array([k.tlo for k in kids]), np.array([k.thi for k in kids]),
                             np.array([N.tlo for N in nbrs]), np.array([N.thi for N in nbrs]), tol)
            D = np.where(D < 0, -9, D + dr[None, :])
        else:
            dt = np.array([_contact(B.tlo, B.thi, N.tlo, N.thi, tol) for N in nbrs])
            D = np.full((len(kids), len(nbrs)), -9)
            face = [j for j, N in enumerate(nbrs) if N.rlo is not None]
            D[:, [j for j, N in enumerate(nbrs) if N.rlo is None]] = 2
            if face:
                R = contact_dims(np.array([k.rlo for k in kids]), np.array([k.rhi for k in kids]),
                                 np.array([nbrs[j].rlo for j in face]),
                                 np.array([nbrs[j].rhi for j in face]), 0.0)
                D[:, face] = np.where(R < 0, -9, R)
            D = D + dt[None, :]
        for i, j in zip(*np.nonzero(D == 4)):
            k, N = kids[i], nbrs[j]
            k.nbrs[N.id] = N
            N.nbrs[k.id] = k
        B.nbrs = None

    def _expand(self, B: CBox):
        kids = self.split(B)
        self.classify(kids, B.features)
        self._link_children(B, kids)
        free = [k for k in kids if k.status == FREE]
        for k in free:
            self.uf.add(k.id)
            self.free_boxes.append(k)
        for k in free:
            for N in k.nbrs.values():
                if N.status == FREE:
                    self.uf.merge(k.id, N.id)
        global_q = self.cfg.strategy not in FRONTIER_STRATEGIES
        for k in kids:
            if self.is_candidate(k):
                if global_q:
                    self._push_global(k)
                if self._marked:
                    for side in (0, 1):
                        if any(N.side >> side & 1 for N in k.nbrs.values()):
                            self._push_frontier(k, side)
        if self._marked:
            for k in free:
                for side in (0, 1):
                    if any(N.side >> side & 1 for N in k.nbrs.values()):
                        self._absorb(k, side)
        if self.cfg.check_invariants:
            total = sum(k.measure() for k in kids)
            assert abs(total - B.measure()) <= 1e-9 * B.measure(), "children do not partition"
        return kids

    def locate(self, config: Config) -> CBox:
        """Leaf containing the configuration (half-open convention)."""
        B = self.root
        p = config.position
        q = config.direction
        while B.children is not None:
            kids = B.children
            if kids[0].rot is B.rot:
                c = B.center
                i = 4 * int(p[0] >= c[0]) + 2 * int(p[1] >= c[1]) + int(p[2] >= c[2])
            elif isinstance(B.rot, WholeSphere):
                i = q.face
            else:
                mu, mv = B.rot.center_uv()
                i = 2 * int(q.u >= mu) + int(q.v >= mv)
            B = kids[i]
        return B

    # ---------------------------------------------------------------- run

    def _stats(self, t0):
        return {"boxes": self.n_boxes, "splits": self.n_splits,
                "free": self.counts[FREE], "stuck": self.counts[STUCK],
                "mixed": self.counts[MIXED],
                "seconds": time.perf_counter() - t0}

    def _refine_endpoint(self, config: Config):
        B = self.locate(config)
        while B.status != FREE:
            if B.status == STUCK or not self.is_candidate(B):
                return None
            if self.n_boxes >= self.cfg.max_boxes:
                return BUDGET
            self._expand(B)
            B = self.locate(config)
        return B

    def _next_box(self, turn: int):
        if self.cfg.strategy in FRONTIER_STRATEGIES:
            return self._frontier_top(turn)
        while self.queue:
            X = heapq.heappop(self.queue)[-1]
            if X.children is None:
                return X
        return None

    def run(self, alpha: Config, beta: Config) -> PlanResult:
        t0 = time.perf_counter()
        for name, c in (("start", alpha), ("goal", beta)):
            if np.any(c.position < self.scene.world_lo) or np.any(c.position > self.scene.world_hi):
                raise PlannerInputError(f"{name} position lies outside the world box")
        self._targets = (beta.position, alpha.position)
        self.classify([self.root], self.all_ids)
        if self.root.status == FREE:
            self.uf.add(self.root.id)
            self.free_boxes.append(self.root)
        elif self.is_candidate(self.root) and self.cfg.strategy not in FRONTIER_STRATEGIES:
            self._push_global(self.root)

        ends = []
        for c in (alpha, beta):
            B = self._refine_endpoint(c)
            if B is None:
                return PlanResult(NO_PATH, stats=self._stats(t0), planner=self, traced=self.cfg.trace)
            if B is BUDGET:
                return PlanResult(BUDGET, stats=self._stats(t0), planner=self, traced=self.cfg.trace)
            ends.append(B)
        Ba, Bb = ends
        self._marked = True
        self._absorb(Ba, 0)
        self._absorb(Bb, 1)
        turn = 0
        while not self.uf.connected(Ba.id, Bb.id):
            if self._frontier_top(0) is None or self._frontier_top(1) is None:
                return PlanResult(NO_PATH, stats=self._stats(t0), planner=self, traced=self.cfg.trace)
            B = self._next_box(turn)
            turn ^= 1
            if B is None:
                return PlanResult(NO_PATH, stats=self._stats(t0), planner=self, traced=self.cfg.trace)
            if self.n_boxes >= self.cfg.max_boxes:
                return PlanResult(BUDGET, stats=self._stats(t0), planner=self, traced=self.cfg.trace)
            self._expand(B)
        chain = self.box_path(Ba, Bb)
        path = extract_path(chain, alpha, beta)
        return PlanResult(PATH, path, chain, self._stats(t0), self, self.cfg.trace)

    def box_path(self, Ba: CBox, Bb: CBox):
        """Breadth-first chain of adjacent FREE leaves from ``Ba`` to ``Bb``."""
        prev = {Ba.id: None}
        todo = deque([Ba])
        while todo:
            X = todo.popleft()
            if X is Bb:
                break
            for N in X.nbrs.values():
                if N.status == FREE and N.id not in prev:
                    prev[N.id] = X
                    todo.append(N)
        chain = [Bb]
        while chain[-1] is not Ba:
            chain.append(prev[chain[-1].id])
        return chain[::-1]

    def leaves(self):
        out = []
        stack = [self.root]
        while stack:
            S = stack.pop()
            if S.children is None:
                out.append(S)
            else:
                stack.extend(S.children)
        return out


def extract_path(chain, alpha: Config, beta: Config):
    """Waypoints: start, box centres joined through shared-face midpoints, goal."""
    if len(chain) == 1:
        return [alpha, beta]
    out = [alpha]
    for a, b in zip(chain[:-1], chain[1:]):
        out.append(box_config(a))
        out.append(shared_face_config(a, b))
    out.append(box_config(chain[-1]))
    out.append(beta)
    return out


def voronoi_feature_set(scene: Scene, B: CBox, parent_ids, delta=None):
    """Features that may be nearest to some point of the box, with the
    box's minimum feature distance and its near-Voronoi flag.

    A feature is kept when its distance from the centre is at most
    ``d_min + 2 r_B + 2 diam`` (``diam = 2 r_B``). The box is near-Voronoi
    when two kept features lie within ``delta`` of ``d_min`` while their
    closest points are more than ``delta`` apart.
    """
    ids = np.asarray(parent_ids, dtype=int)
    if ids.size == 0:
        return ids, math.inf, False
    # distances come back grouped by kind; reorder ids to match
    ci, ei, wi = scene.split_ids(ids)
    gids = np.concatenate([ci, ei + scene.n_corners, wi + scene.n_corners + scene.n_edges])
    d = scene.point_feature_dists(B.center, gids)
    dmin = float(d.min())
    keep = d <= dmin + 2 * B.radius + 2 * (2 * B.radius)
    delta = 2 * B.radius if delta is None else delta
    close = d <= dmin + delta
    near = False
    if np.count_nonzero(close) >= 2:
        pts = scene.closest_points(B.center, gids[close])
        diff = np.linalg.norm(pts[:, None] - pts[None], axis=2)
        near = bool(np.any(diff > delta))
    return np.sort(gids[keep]), dmin, near


def find_path(scene: Scene, robot, alpha: Config, beta: Config, cfg: PlannerConfig) -> PlanResult:
    """Resolution-exact planning from ``alpha`` to ``beta``."""
    return SSSPlanner(scene, robot, cfg).run(alpha, beta)
