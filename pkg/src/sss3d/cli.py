"""Command-line driver.

Exit codes: 0 PATH (or success), 1 NO-PATH (or replay failure), 2 box
budget exceeded, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import io
from .config import Config
from .planner import BUDGET, NO_PATH, PATH, PlannerConfig, PlannerInputError, STRATEGIES, find_path
from .replay import replay
from .ring import RingRobot
from .rod import RodRobot
from .scenarios import SCENARIOS
from .scene import SceneError, gen_random_tetrahedra

EXIT = {PATH: 0, NO_PATH: 1, BUDGET: 2}
EXIT_INPUT = 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _robot(args):
    if args.robot == "rod":
        if args.length is None:
            raise InputError("--length is required for a rod")
        return RodRobot(args.length, args.thickness)
    if args.radius is None:
        raise InputError("--radius is required for a ring")
    return RingRobot(args.radius, args.thickness)


def _config(vals, what):
    v = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(v)):
        raise InputError(f"{what}: non-finite value")
    if np.linalg.norm(v[3:]) == 0:
        raise InputError(f"{what}: direction must be nonzero")
    return Config.from_vectors(v[:3], v[3:])


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}") from None


def _load_scene(path):
    try:
        return io.load_scene(path)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def cmd_plan(args) -> int:
    scene = _load_scene(args.scene)
    robot = _robot(args)
    alpha, beta = _config(args.start, "--start"), _config(args.goal, "--goal")
    cfg = PlannerConfig(eps=args.eps, strategy=args.strategy, seed=args.seed,
                        max_boxes=args.max_boxes, trace=args.trace is not None)
    res = find_path(scene, robot, alpha, beta, cfg)
    run = {"robot": {"kind": robot.kind, "size": robot.size, "thickness": robot.tau},
           "start": alpha.as_list(), "goal": beta.as_list(), "eps": args.eps,
           "strategy": cfg.strategy, "seed": args.seed, "max_boxes": args.max_boxes,
           "scene": str(args.scene)}
    _write(args.out, io.write_result(res, run))
    if args.trace is not None:
        soup, stats = io.write_trace(res, robot)
        _write(args.trace, soup)
        _write(args.trace + ".stats.json", stats)
    print(f"{res.outcome}: {len(res.path)} waypoints, {res.stats['boxes']} boxes, "
          f"{res.stats['seconds']:.2f} s", file=sys.stderr)
    return EXIT[res.outcome]


def cmd_generate(args) -> int:
    lo, hi = args.world
    try:
        scene = gen_random_tetrahedra(args.n, args.seed, (lo,) * 3, (hi,) * 3)
    except ValueError as e:
        raise InputError(str(e)) from None
    _write(args.out, io.write_scene(scene, name=f"random-{args.n}-seed-{args.seed}"))
    return 0


def cmd_scenario(args) -> int:
    scene = SCENARIOS[args.name]()
    _write(args.out, io.write_scene(scene, name=args.name))
    return 0


def cmd_replay(args) -> int:
    scene = _load_scene(args.scene)
    try:
        with open(args.result, encoding="utf-8") as fh:
            doc = io.parse_result(fh.read())
    except OSError as e:
        raise InputError(f"cannot read {args.result}: {e.strerror}") from None
    r = doc["run"]["robot"]
    robot = (RodRobot if r["kind"] == "rod" else RingRobot)(r["size"], r["thickness"])
    path = io.path_from_result(doc)
    if not path:
        print("no path to replay", file=sys.stderr)
        return 1
    step = args.step if args.step else doc["run"]["eps"] / 4
    clear, n = replay(scene, robot, path, step)
    print(json.dumps({"min_clearance": clear, "configurations": n, "step": step}))
    return 0 if clear > 0 else 1


def cmd_bench(args) -> int:
    scene = gen_random_tetrahedra(args.n, args.seed)
    robot = RodRobot(args.length)
    alpha = Config.from_vectors([20, 20, 20], [1, 0, 0])
    beta = Config.from_vectors([490, 490, 490], [0, 0, 1])
    t0 = time.perf_counter()
    res = find_path(scene, robot, alpha, beta,
                    PlannerConfig(eps=args.eps, strategy=args.strategy, max_boxes=args.max_boxes))
    out = {"outcome": res.outcome, "waypoints": len(res.path), "wall_seconds": time.perf_counter() - t0,
           **res.stats}
    print(json.dumps(out, indent=1))
    return EXIT[res.outcome]


def build_parser():
    p = _Parser(prog="sss3d", description="Resolution-exact rod/ring path planning.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    q = sub.add_parser("plan", help="plan a path in a scene file")
    q.add_argument("--scene", required=True)
    q.add_argument("--robot", choices=("rod", "ring"), required=True)
    q.add_argument("--length", type=float, help="rod length")
    q.add_argument("--radius", type=float, help="ring radius")
    q.add_argument("--thickness", type=float, default=0.0)
    q.add_argument("--start", type=float, nargs=6, required=True, metavar="V")
    q.add_argument("--goal", type=float, nargs=6, required=True, metavar="V")
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--strategy", default="GREEDY", type=str.upper, choices=STRATEGIES)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--max-boxes", type=int, default=2_000_000)
    q.add_argument("--out", default="-", help="result file (default stdout)")
    q.add_argument("--trace", help="segment-soup trace file (stats go to <trace>.stats.json)")
    q.set_defaults(func=cmd_plan)

    g = sub.add_parser("generate", help="write a random-tetrahedra scene")
    g.add_argument("--n", type=int, default=40)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--world", type=float, nargs=2, default=(0.0, 512.0), metavar=("LO", "HI"))
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("scenario", help="write one of the shipped scenario scenes")
    s.add_argument("name", choices=sorted(SCENARIOS))
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_scenario)

    r = sub.add_parser("replay", help="check a result path against the clearance oracle")
    r.add_argument("--scene", required=True)
    r.add_argument("--result", required=True)
    r.add_argument("--step", type=float, help="interpolation step (default eps/4)")
    r.set_defaults(func=cmd_replay)

    b = sub.add_parser("bench", help="random-tetrahedra benchmark run")
    b.add_argument("--n", type=int, default=40)
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--length", type=float, default=64.0)
    b.add_argument("--eps", type=float, default=8.0)
    b.add_argument("--strategy", default="GREEDY", type=str.upper, choices=STRATEGIES)
    b.add_argument("--max-boxes", type=int, default=2_000_000)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, io.FormatError, SceneError, PlannerInputError, ValueError) as e:
        print(f"sss3d: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
