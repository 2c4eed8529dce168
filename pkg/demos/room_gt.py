"""Generate one furnished room, plan a walk through it and render depth along the way."""

import sys
from pathlib import Path

import numpy as np

from procgraph.gt import render_gt
from procgraph.io import depth_preview, write_png
from procgraph.rng import RandomStream
from procgraph.scene import sample_room
from procgraph.scene.cameras import path_to_cameras
from procgraph.scene.planning import rrt_star

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_room")
out.mkdir(parents=True, exist_ok=True)

scene = sample_room(3, n_cameras=2)
free = scene.free_space()
start = scene.cameras[0].position
goal = scene.cameras[1].position
plan = rrt_star(start, goal, free, (free.lo, free.hi), RandomStream(0), max_iters=3000)
print(f"path of {len(plan.path)} waypoints, cost {plan.cost:.2f} m after {plan.iterations} iterations")

for k, cam in enumerate(path_to_cameras(plan.path, 0.5, 1.0, resolution=(160, 120))):
    frame = render_gt(scene, cam)
    print(f"frame {k}: depth {np.nanmin(frame.depth):.2f}..{frame.depth[frame.valid].max():.2f} m")
    write_png(out / f"depth_{k:03d}.png", depth_preview(frame.depth), srgb=False)
