"""Workspace safety: plan-time clamping and execution-time gating.

A plan wandering outside the safe box is clamped point by point; a noisy
command stream is gated so the robot never leaves the box.
"""

import numpy as np

from cutsim.workspace import RobotState, SafeRegion, clamp_plan, gate_step

region = SafeRegion(-0.2, 0.2, -0.2, 0.2, 0.0, 0.3)
print(f"safe region: x[{region.x_min}, {region.x_max}] y[{region.y_min}, {region.y_max}] "
      f"z[{region.z_min}, {region.z_max}]")

plan = np.array([
    [0.0, 0.0, 0.1],
    [0.25, 0.0, 0.1],   # x overshoots
    [0.1, -0.3, 0.35],  # y and z overshoot
])
clamped = clamp_plan(region, plan)
for before, after in zip(plan, clamped):
    mark = "clamped" if not np.array_equal(before, after) else "ok"
    print(f"  {before} -> {after}  [{mark}]")

rng = np.random.default_rng(0)
state = RobotState(0.0, 0.0, 0.1)
held = 0
for _ in range(500):
    step = rng.normal(scale=0.08, size=3)
    proposed = RobotState(state.x + step[0], state.y + step[1], state.z + step[2])
    decision = gate_step(region, state, proposed)
    held += not decision.execute
    state = decision.state
    assert region.contains(state.x, state.y, state.z)
print(f"500 random commands: {held} held at the boundary, all visited states inside")
