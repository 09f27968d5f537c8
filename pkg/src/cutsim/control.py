"""Proportional trajectory tracking against a simulated plant.

The controller chases the lifted waypoints one at a time at a fixed rate
(1 kHz by default): the velocity command is u = K * (desired - actual) with
the heading error wrapped to (-pi, pi], the plant integrates the command, and
every step is gated by the workspace so the executed state can never leave
the safe region.  The tracker advances to the next waypoint once within a
positional tolerance.  Tracking error is the mean positional distance to the
current desired waypoint over all executed samples; heading error is
reported separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .planner import Trajectory
from .workspace import RobotState, SafeRegion, SafetyViolationError

__all__ = [
    "ControllerConfig",
    "PlantModel",
    "TrackingReport",
    "StallError",
    "AlignmentError",
    "step_controller",
    "simulate_tracking",
    "tracking_error",
    "wrap_angle",
]


class StallError(RuntimeError):
    """A waypoint was not reached within the per-waypoint timeout."""


class AlignmentError(ValueError):
    """Trajectories cannot be resampled onto a common timeline."""


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


@dataclass(frozen=True)
class ControllerConfig:
    """Proportional gain (1/s), control rate (Hz), and waypoint tolerance (m)."""

    gain_K: float = 40.0
    rate: float = 1000.0
    waypoint_tolerance: float = 0.0005
    stall_timeout: float = 10.0

    def __post_init__(self):
        dt = 1.0 / self.rate
        if not (0.0 < self.gain_K * dt <= 1.0):
            raise ValueError(
                f"discrete stability requires 0 < K*dt <= 1, got {self.gain_K * dt}"
            )
        if self.waypoint_tolerance <= 0 or self.stall_timeout <= 0:
            raise ValueError("waypoint_tolerance and stall_timeout must be positive")

    @property
    def dt(self) -> float:
        return 1.0 / self.rate


@dataclass(frozen=True)
class PlantModel:
    """Simulated plant: an ideal velocity integrator or a first-order lag.

    `command_noise_sigma` (m/s) perturbs each velocity command.  These models
    stand in for the physical arm so runs work at desk scale.
    """

    kind: str = "ideal"  # "ideal" | "lagged"
    lag_tau: float = 0.05
    command_noise_sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("ideal", "lagged"):
            raise ValueError(f"unknown plant kind {self.kind!r}")
        if self.kind == "lagged" and self.lag_tau <= 0:
            raise ValueError("lag_tau must be positive")
        if self.command_noise_sigma < 0:
            raise ValueError("command_noise_sigma must be >= 0")


@dataclass
class TrackingReport:
    """Tracking outcome: error stats, the executed trajectory, gate holds."""

    mean_error: float
    max_error: float
    executed: Trajectory
    held_steps: int
    mean_phi_error: float = 0.0

    def __post_init__(self):
        if self.mean_error > self.max_error + 1e-15:
            raise ValueError("mean_error cannot exceed max_error")


def step_controller(state: RobotState, desired: RobotState, cfg: ControllerConfig) -> np.ndarray:
    """Velocity command u = K * (desired - state), heading error wrapped."""
    return np.array(
        [
            cfg.gain_K * (desired.x - state.x),
            cfg.gain_K * (desired.y - state.y),
            cfg.gain_K * (desired.z - state.z),
            cfg.gain_K * wrap_angle(desired.phi - state.phi),
        ]
    )


def simulate_tracking(
    plan: Trajectory,
    cfg: ControllerConfig,
    plant: PlantModel,
    region: SafeRegion,
    seed: int = 0,
) -> TrackingReport:
    """Track a lifted plan waypoint by waypoint and report the error.

    The plant starts at the first waypoint, which must be inside the region.
    Raises StallError when a waypoint is not reached within the timeout.
    """
    wp_xyz = plan.xyz
    wp_phi = plan.phi
    n_wp = len(plan)
    if n_wp == 0:
        raise ValueError("empty plan")

    dt = cfg.dt
    K = cfg.gain_K
    tol = cfg.waypoint_tolerance
    x, y, z = (float(v) for v in wp_xyz[0])
    phi = float(wp_phi[0])
    if not region.contains(x, y, z):
        raise SafetyViolationError("plan starts outside the safe region")

    lagged = plant.kind == "lagged"
    vx = vy = vz = vphi = 0.0
    sigma = plant.command_noise_sigma
    rng = np.random.default_rng(seed) if sigma > 0 else None

    max_steps_per_wp = int(cfg.stall_timeout * cfg.rate)
    xs, ys, zs, phis = [x], [y], [z], [phi]
    e0 = math.sqrt(
        (wp_xyz[0][0] - x) ** 2 + (wp_xyz[0][1] - y) ** 2 + (wp_xyz[0][2] - z) ** 2
    )
    err_sum = e0
    err_max = e0
    phi_err_sum = abs(wrap_angle(float(wp_phi[0]) - phi))
    held = 0
    steps = 0

    x_min, x_max = region.x_min, region.x_max
    y_min, y_max = region.y_min, region.y_max
    z_min, z_max = region.z_min, region.z_max

    for k in range(n_wp):
        xd, yd, zd = (float(v) for v in wp_xyz[k])
        phid = float(wp_phi[k])
        wp_steps = 0
        while True:
            ex, ey, ez = xd - x, yd - y, zd - z
            dist = math.sqrt(ex * ex + ey * ey + ez * ez)
            if dist <= tol:
                break
            if wp_steps >= max_steps_per_wp:
                raise StallError(
                    f"waypoint {k} not reached within {cfg.stall_timeout}s "
                    f"(remaining distance {dist:.2e} m)"
                )
            ux, uy, uz = K * ex, K * ey, K * ez
            uphi = K * wrap_angle(phid - phi)
            if rng is not None:
                nx_, ny_, nz_ = rng.normal(0.0, sigma, 3)
                ux, uy, uz = ux + nx_, uy + ny_, uz + nz_
            if lagged:
                a = dt / plant.lag_tau
                vx += a * (ux - vx)
                vy += a * (uy - vy)
                vz += a * (uz - vz)
                vphi += a * (uphi - vphi)
            else:
                vx, vy, vz, vphi = ux, uy, uz, uphi
            px, py, pz = x + vx * dt, y + vy * dt, z + vz * dt
            pphi = phi + vphi * dt
            # same inclusive-box rule as workspace.gate_step
            if x_min <= px <= x_max and y_min <= py <= y_max and z_min <= pz <= z_max:
                x, y, z, phi = px, py, pz, pphi
            else:
                held += 1
            steps += 1
            wp_steps += 1
            xs.append(x)
            ys.append(y)
            zs.append(z)
            phis.append(phi)
            ex, ey, ez = xd - x, yd - y, zd - z
            e = math.sqrt(ex * ex + ey * ey + ez * ez)
            err_sum += e
            if e > err_max:
                err_max = e
            phi_err_sum += abs(wrap_angle(phid - phi))

    executed = Trajectory(
        np.arange(len(xs)) * dt,
        np.column_stack([xs, ys, zs]),
        np.array(phis),
    )
    n = len(xs)
    return TrackingReport(
        mean_error=err_sum / n,
        max_error=err_max,
        executed=executed,
        held_steps=held,
        mean_phi_error=phi_err_sum / n,
    )


def tracking_error(desired: Trajectory, actual: Trajectory) -> float:
    """Mean positional distance after resampling `actual` at `desired`'s timestamps.

    Heading is excluded from the norm.  Raises AlignmentError when the actual
    trajectory does not cover the desired timeline.
    """
    td, ta = desired.t, actual.t
    if len(ta) < 2:
        raise AlignmentError("actual trajectory too short to resample")
    eps = 1e-9
    if td.min() < ta.min() - eps or td.max() > ta.max() + eps:
        raise AlignmentError(
            f"desired timeline [{td.min()}, {td.max()}] not covered by "
            f"actual [{ta.min()}, {ta.max()}]"
        )
    resampled = np.column_stack(
        [np.interp(td, ta, actual.xyz[:, i]) for i in range(3)]
    )
    return float(np.linalg.norm(desired.xyz - resampled, axis=1).mean())
