"""Plan a rod through the random-tetrahedra scene and replay the result.

Run: python3 demos/rod_random_tetrahedra.py
"""

from sss3d.config import Config
from sss3d.planner import PlannerConfig, find_path
from sss3d.replay import replay
from sss3d.rod import RodRobot
from sss3d.scenarios import rand_scene

scene = rand_scene(40, seed=1)
rod = RodRobot(64.0)
start = Config.from_vectors([20, 20, 20], [1, 0, 0])
goal = Config.from_vectors([490, 490, 490], [0, 0, 1])

for strategy in ("GREEDY", "DIST_PLUS_SIZE", "VORONOI", "BFS"):
    res = find_path(scene, rod, start, goal, PlannerConfig(eps=8.0, strategy=strategy))
    s = res.stats
    print(f"{strategy:15s} {res.outcome:8s} boxes={s['boxes']:6d} free={s['free']:5d} "
          f"stuck={s['stuck']:4d} chain={len(res.boxes):3d} {s['seconds']:.2f}s")
    if res.found:
        clear, n = replay(scene, rod, res.path, step=2.0)
        print(f"{'':15s} replayed {n} configurations, min clearance {clear:.2f}")
