"""Cut planning: slices, trim path simplification, cubing grid, 3-D lifting.

Plans all four cut families for a segmented scene and lifts the slice plan
into a timed knife trajectory with sinusoidal plunges.
"""

import numpy as np

from cutsim.calib import pixel_to_robot
from cutsim.config import RunConfig
from cutsim.harness import generate_scene, random_meat_spec
from cutsim.harness.pipeline import _calibrate_board
from cutsim.planner import (
    CutMotionProfile,
    PlanSpec,
    Task,
    lift_to_3d,
    plan_cubes,
    plan_point_to_point,
    plan_slices,
    plan_trim,
    squish_e,
)
from cutsim.vision import fat_meat_interface, segment_scene

scene, truth = generate_scene(random_meat_spec(seed=8))
config = RunConfig.default()
params = _calibrate_board(truth.board)
seg = segment_scene(scene)
meat = pixel_to_robot(params, seg.meat_contour.astype(float))

slices = plan_slices(meat, PlanSpec(Task.SLICE, n_pieces=9))
print(f"slicing: {len(slices.polylines)} cuts at x = "
      f"{[round(p[0, 0] * 100, 1) for p in slices.polylines]} cm")

interface = pixel_to_robot(params, fat_meat_interface(seg, tol=2.0).astype(float))
compressed = squish_e(interface, 0.002)
trim = plan_trim(interface, 0.002)
print(f"trim: {len(interface)} interface points -> {len(compressed)} after SQUISH-E "
      f"(bound 2 mm), extended to {len(trim.polylines[0])} waypoints")

p2p = plan_point_to_point((0.06, 0.20), (0.34, 0.21))
print(f"point-to-point: straight cut {p2p.polylines[0].tolist()}")

cubes = plan_cubes(meat, PlanSpec(Task.CUBE, cube_side_cm=3.0))
print(f"cubing: {len(cubes.polylines)} grid lines")

profile = CutMotionProfile()
traj = lift_to_3d(slices, profile, config.region())
plunges = int(np.isclose(traj.xyz[:, 2], profile.z_cut_depth).sum())
print(f"lifted slice plan: {len(traj)} timed waypoints over {traj.t[-1]:.1f} s, "
      f"{plunges} plunge bottoms, z in [{traj.xyz[:, 2].min()}, {traj.xyz[:, 2].max()}] m")
