"""A ring in open space, then a rod sealed inside a hollow cube.

The second run shows the planner certifying NO-PATH: the start lies in the
cavity and the goal outside, so the start's free component stops growing.

Run: python3 demos/ring_and_sealed_cavity.py
"""

from sss3d.config import Config
from sss3d.planner import PlannerConfig, find_path
from sss3d.ring import RingRobot
from sss3d.rod import RodRobot
from sss3d.scenarios import hollow_cube_scene, posts_scene

ring = RingRobot(16.0)
a = Config.from_vectors([40, 40, 40], [0, 0, 1])
b = Config.from_vectors([470, 470, 470], [1, 1, 0])
res = find_path(posts_scene(), ring, a, b, PlannerConfig(eps=8.0, max_boxes=200_000))
print("ring among posts:", res.outcome, res.stats["boxes"], "boxes,", len(res.path), "waypoints")

rod = RodRobot(16.0)
inside = Config.from_vectors([256, 256, 256], [1, 0, 0])
outside = Config.from_vectors([64, 64, 64], [1, 0, 0])
res = find_path(hollow_cube_scene(), rod, outside, inside, PlannerConfig(eps=16.0))
print("rod into sealed cavity:", res.outcome, res.stats["boxes"], "boxes",
      f"({res.stats['seconds']:.1f} s)")
