"""Proportional tracking of the three primitive motions at 1 kHz.

Reproduces the accuracy experiment: horizontal, vertical, and trim motions,
three trials each, reporting the mean error against the 2.5 mm / 5 mm bounds.
"""

import math

import numpy as np

from cutsim.control import ControllerConfig, PlantModel, simulate_tracking
from cutsim.planner import CutMotionProfile, CutPlan, Task, lift_to_3d, plan_trim
from cutsim.workspace import SafeRegion

region = SafeRegion(-0.5, 0.5, -0.5, 0.5, 0.0, 0.3)
cfg = ControllerConfig()  # K = 40/s at 1 kHz, 0.5 mm waypoint tolerance
plant = PlantModel(command_noise_sigma=0.001)

xs = np.linspace(-0.08, 0.08, 30)
curve = np.column_stack([xs, 0.03 * np.sin(xs / 0.16 * 2 * math.pi)])
motions = {
    "horizontal": CutPlan([np.array([[-0.10, 0.0], [0.10, 0.0]])], Task.POINT_TO_POINT),
    "vertical": CutPlan([np.array([[0.0, -0.10], [0.0, 0.10]])], Task.POINT_TO_POINT),
    "trim": plan_trim(curve, squish_bound=0.002),
}

print(f"{'motion':<12} {'mean err (3 trials)':>20} {'max err':>10}  bounds: 2.5 mm mean, 5 mm max")
for name, plan in motions.items():
    traj = lift_to_3d(plan, CutMotionProfile(), region)
    means, maxes, holds = [], [], 0
    for trial in range(3):
        report = simulate_tracking(traj, cfg, plant, region, seed=trial)
        means.append(report.mean_error)
        maxes.append(report.max_error)
        holds += report.held_steps
    print(f"{name:<12} {np.mean(means) * 1000:17.3f} mm {max(maxes) * 1000:7.3f} mm"
          f"  ({len(traj)} waypoints, {holds} holds)")
