"""Safe operating region for the knife: plan-time clamping and execution-time gating.

The robot gripper (and attached knife) is confined to an axis-aligned box above
the cutting board.  Planned trajectories are clamped into the box point by
point; at execution time each step is gated so that a command whose endpoint
would leave the box is simply not executed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "SafeRegion",
    "RobotState",
    "GateDecision",
    "SafetyViolationError",
    "clamp_waypoint",
    "clamp_plan",
    "gate_step",
]


class SafetyViolationError(RuntimeError):
    """The current state is already outside the safe region (upstream bug)."""


@dataclass(frozen=True)
class SafeRegion:
    """Axis-aligned workspace box, bounds in meters.  Faces are inclusive."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    z_min: float
    z_max: float

    def __post_init__(self):
        for lo, hi, axis in (
            (self.x_min, self.x_max, "x"),
            (self.y_min, self.y_max, "y"),
            (self.z_min, self.z_max, "z"),
        ):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"non-finite {axis} bounds: [{lo}, {hi}]")
            if not lo < hi:
                raise ValueError(f"{axis}_min must be < {axis}_max, got [{lo}, {hi}]")

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.x_min, self.y_min, self.z_min])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.x_max, self.y_max, self.z_max])

    def contains(self, x: float, y: float, z: float) -> bool:
        """Inclusive membership test (points on a face are inside)."""
        return (
            self.x_min <= x <= self.x_max
            and self.y_min <= y <= self.y_max
            and self.z_min <= z <= self.z_max
        )


@dataclass(frozen=True)
class RobotState:
    """Gripper state: position in meters, knife heading phi in (-pi, pi]."""

    x: float
    y: float
    z: float
    phi: float = 0.0

    def __post_init__(self):
        if not all(map(math.isfinite, (self.x, self.y, self.z, self.phi))):
            raise ValueError(f"non-finite robot state {(self.x, self.y, self.z, self.phi)}")

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


class GateDecision(NamedTuple):
    execute: bool
    state: RobotState


def clamp_waypoint(region: SafeRegion, point) -> np.ndarray:
    """Move a 3-D point into the region by clamping each coordinate to its bounds."""
    p = np.asarray(point, dtype=float)
    if p.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {p.shape}")
    return np.clip(p, region.lower, region.upper)


def clamp_plan(region: SafeRegion, trajectory) -> np.ndarray:
    """Clamp every waypoint of a plan; order and length are preserved.

    `trajectory` is an (n, 3) array of positions.  Raises ValueError on an
    empty plan.
    """
    pts = np.asarray(trajectory, dtype=float)
    if pts.size == 0:
        raise ValueError("empty trajectory")
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) trajectory, got shape {pts.shape}")
    return np.clip(pts, region.lower, region.upper)


def gate_step(region: SafeRegion, current: RobotState, proposed: RobotState) -> GateDecision:
    """Execution-time safety check for a single control step.

    Returns Execute(proposed) when the proposed position lies inside the
    (closed) region, otherwise Hold(current): the step is discarded and the
    robot stays put.  The current state must already be inside the region;
    anything else means an upstream component broke the safety invariant and
    the run must abort.
    """
    if not region.contains(current.x, current.y, current.z):
        raise SafetyViolationError(
            f"current state {(current.x, current.y, current.z)} is outside the safe region"
        )
    if region.contains(proposed.x, proposed.y, proposed.z):
        return GateDecision(True, proposed)
    return GateDecision(False, current)
