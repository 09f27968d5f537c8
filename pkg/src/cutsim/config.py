"""Run configuration: a flat INI file with one section per subsystem.

Every value has a default; a config file only needs the keys it overrides.
`RunConfig.from_ini` parses text, `to_ini` emits the full effective
configuration (used for run-log snapshots so a run can be replayed).
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass

from .control import ControllerConfig, PlantModel
from .planner import CutMotionProfile
from .vision import ColorRanges
from .workspace import SafeRegion

__all__ = ["RunConfig", "DEFAULTS"]

DEFAULTS: dict[str, dict[str, str]] = {
    "workspace": {
        "x_min": "-0.02",
        "x_max": "0.42",
        "y_min": "-0.02",
        "y_max": "0.32",
        "z_min": "0.0",
        "z_max": "0.30",
    },
    "vision": {
        "meat_lo": "120,0,0",
        "meat_hi": "255,100,100",
        "fat_lo": "180,180,180",
        "fat_hi": "255,255,255",
        "marker_lo": "100,0,100",
        "marker_hi": "200,90,220",
        "interface_tol_px": "2.0",
    },
    "planner": {
        "n_slices": "0",  # 0 = derive from meat length and slice_target_cm
        "slice_target_cm": "3.0",
        "trim_bound_m": "0.002",
        "cube_side_cm": "3.0",
        "z_travel": "0.10",
        "z_cut_depth": "0.005",
        "period_T": "2.0",
        "pause_spacing": "0.02",
        "travel_speed": "0.05",
        "waypoint_dt": "0.01",
    },
    "control": {
        "gain_K": "40.0",
        "rate": "1000.0",
        "waypoint_tolerance": "0.0005",
        "stall_timeout": "10.0",
        "plant": "ideal",
        "lag_tau": "0.05",
        "command_noise_sigma": "0.001",
    },
    "harness": {
        "board_width_m": "0.40",
        "board_height_m": "0.30",
        "px_per_m": "1000.0",
        "margin_px": "20",
        "weight_band_g": "150,250",
        "fat_removal": "trim",  # trim | p2p | none
        "plan_source": "vision",  # vision | truth
        "out_dir": "runs",
        "seed": "0",
    },
    "contact": {
        "n_trees": "500",
        "mtry": "4",  # 0 = tune via out-of-bag probes
        "seed": "0",
        "split": "swt",
        "train_fraction": "0.6",
    },
}


def _rgb(text: str) -> tuple[int, int, int]:
    parts = [int(v) for v in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected 'r,g,b', got {text!r}")
    return tuple(parts)


@dataclass
class RunConfig:
    """Effective configuration for a pipeline run or service session."""

    parser: configparser.ConfigParser

    @classmethod
    def default(cls) -> "RunConfig":
        return cls.from_ini("")

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        parser = configparser.ConfigParser()
        parser.read_dict(DEFAULTS)
        parser.read_string(text)
        return cls(parser)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as f:
            return cls.from_ini(f.read())

    def to_ini(self) -> str:
        buf = io.StringIO()
        self.parser.write(buf)
        return buf.getvalue()

    # typed views -------------------------------------------------------------

    def region(self) -> SafeRegion:
        s = self.parser["workspace"]
        return SafeRegion(
            s.getfloat("x_min"),
            s.getfloat("x_max"),
            s.getfloat("y_min"),
            s.getfloat("y_max"),
            s.getfloat("z_min"),
            s.getfloat("z_max"),
        )

    def color_ranges(self) -> ColorRanges:
        s = self.parser["vision"]
        return ColorRanges(
            meat_lo=_rgb(s["meat_lo"]),
            meat_hi=_rgb(s["meat_hi"]),
            fat_lo=_rgb(s["fat_lo"]),
            fat_hi=_rgb(s["fat_hi"]),
            marker_lo=_rgb(s["marker_lo"]),
            marker_hi=_rgb(s["marker_hi"]),
        )

    def profile(self) -> CutMotionProfile:
        s = self.parser["planner"]
        return CutMotionProfile(
            z_travel=s.getfloat("z_travel"),
            z_cut_depth=s.getfloat("z_cut_depth"),
            period_T=s.getfloat("period_T"),
            pause_spacing=s.getfloat("pause_spacing"),
            travel_speed=s.getfloat("travel_speed"),
            waypoint_dt=s.getfloat("waypoint_dt"),
        )

    def controller(self) -> ControllerConfig:
        s = self.parser["control"]
        return ControllerConfig(
            gain_K=s.getfloat("gain_K"),
            rate=s.getfloat("rate"),
            waypoint_tolerance=s.getfloat("waypoint_tolerance"),
            stall_timeout=s.getfloat("stall_timeout"),
        )

    def plant(self) -> PlantModel:
        s = self.parser["control"]
        return PlantModel(
            kind=s["plant"],
            lag_tau=s.getfloat("lag_tau"),
            command_noise_sigma=s.getfloat("command_noise_sigma"),
        )

    def getfloat(self, section: str, key: str) -> float:
        return self.parser[section].getfloat(key)

    def getint(self, section: str, key: str) -> int:
        return self.parser[section].getint(key)

    def get(self, section: str, key: str) -> str:
        return self.parser[section][key]

    def weight_band_g(self) -> tuple[float, float]:
        lo, hi = (float(v) for v in self.parser["harness"]["weight_band_g"].split(","))
        return lo, hi
