"""cutsim: a simulation-first toolkit for a collaborative meat-cutting robot arm.

Subsystems:

- `calib`     camera-to-robot calibration on the table plane
- `workspace` safe operating region (plan-time clamp, execution-time gate)
- `vision`    color-based scene segmentation and contour extraction
- `planner`   cut planning (slice / point-to-point / trim / cube) and 3-D lifting
- `control`   proportional trajectory tracking against simulated plants
- `contact`   instrumented-knife contact detection (data pipeline + random forest)
- `harness`   scene generation, end-to-end pipeline, metrics, persistence, service
"""

__version__ = "0.1.0"
