"""Synthetic cutting-board scenes with exact ground truth.

A meat blob is a star-shaped outline around its center: a base ellipse plus
harmonic perturbations of the radius.  An optional fat band sits along the
far (larger-y) edge with a thickness profile that varies along the band.
Scenes are rasterized at a fixed scale onto a dark board inside a larger
camera frame; the exact outline polygons, the fat-meat interface curve, and
the true pixel-to-robot mapping are returned alongside the raster so runs can
be scored against reality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import Polygon

from ..calib import CalibrationParams
from ..vision import BoardRegion, Scene

__all__ = [
    "BoardGeometry",
    "MeatSpec",
    "GroundTruth",
    "generate_scene",
    "random_meat_spec",
]

MEAT_RGB = (200, 30, 30)
FAT_RGB = (240, 240, 240)
MARKER_RGB = (150, 40, 160)
BOARD_RGB = (12, 12, 12)
EXTERIOR_RGB = (70, 70, 78)
OUTLINE_SAMPLES = 720
MARKER_SIZE_PX = 6


@dataclass(frozen=True)
class BoardGeometry:
    """Board extent in meters, raster scale, and camera margin around the board."""

    width_m: float = 0.40
    height_m: float = 0.30
    px_per_m: float = 1000.0
    margin_px: int = 20

    @property
    def image_size(self) -> tuple[int, int]:
        w = int(round(self.width_m * self.px_per_m)) + 2 * self.margin_px
        h = int(round(self.height_m * self.px_per_m)) + 2 * self.margin_px
        return w, h

    @property
    def board_region(self) -> BoardRegion:
        w, h = self.image_size
        return BoardRegion(self.margin_px, self.margin_px, w - self.margin_px, h - self.margin_px)

    def true_calibration(self) -> CalibrationParams:
        """Exact pixel-index to robot mapping for generated scenes.

        Pixel index (c, r) names the pixel whose center is (c+0.5, r+0.5), so
        the offset absorbs the half pixel.
        """
        s = 1.0 / self.px_per_m
        d = (self.margin_px - 0.5) / self.px_per_m
        return CalibrationParams(0.0, s, s, d, d)

    def robot_to_px(self, xy) -> np.ndarray:
        p = np.asarray(xy, float)
        return p * self.px_per_m + self.margin_px


@dataclass(frozen=True)
class MeatSpec:
    """Parametric meat blob (cm units) with an optional fat band on the far edge.

    `shape` is "blob" (ellipse + harmonics) or "rect" (axis-aligned rectangle
    with the radii as half extents).
    """

    center_cm: tuple[float, float] = (20.0, 13.0)
    radius_x_cm: float = 12.0
    radius_y_cm: float = 7.0
    shape: str = "blob"
    harmonics: tuple[tuple[int, float, float], ...] = ()  # (k, amplitude_cm, phase)
    fat_base_cm: float = 2.0
    fat_harmonics: tuple[tuple[int, float, float], ...] = ()
    fat_span: float = 0.84  # fraction of the x extent covered by the band
    thickness_cm: float = 3.0
    density_g_cm3: float = 1.05
    seed: int = 0

    def __post_init__(self):
        if self.radius_x_cm <= 0 or self.radius_y_cm <= 0 or self.thickness_cm <= 0:
            raise ValueError("dimensions must be positive")
        if self.shape not in ("blob", "rect"):
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.fat_base_cm < 0:
            raise ValueError("fat_base_cm must be >= 0")
        if not 0 < self.fat_span <= 1:
            raise ValueError("fat_span must be in (0, 1]")


@dataclass
class GroundTruth:
    """Exact geometry behind a rendered scene, in robot meters."""

    meat_polygon: Polygon
    fat_polygon: Polygon | None
    interface: np.ndarray | None  # fat-meat boundary curve, ordered by x
    board: BoardGeometry
    thickness_cm: float
    density_g_cm3: float

    @property
    def meat_area_cm2(self) -> float:
        return self.meat_polygon.area * 1e4

    @property
    def fat_area_cm2(self) -> float:
        return 0.0 if self.fat_polygon is None else self.fat_polygon.area * 1e4


def _outline_radius(spec: MeatSpec, phi: np.ndarray) -> np.ndarray:
    rx, ry = spec.radius_x_cm, spec.radius_y_cm
    r = rx * ry / np.sqrt((ry * np.cos(phi)) ** 2 + (rx * np.sin(phi)) ** 2)
    for k, amp, phase in spec.harmonics:
        r = r + amp * np.cos(k * phi + phase)
    return np.maximum(r, 0.5)


def _meat_polygon(spec: MeatSpec) -> Polygon:
    cx, cy = (c / 100.0 for c in spec.center_cm)
    if spec.shape == "rect":
        hx, hy = spec.radius_x_cm / 100.0, spec.radius_y_cm / 100.0
        return Polygon(
            [(cx - hx, cy - hy), (cx + hx, cy - hy), (cx + hx, cy + hy), (cx - hx, cy + hy)]
        )
    phi = np.linspace(0.0, 2.0 * math.pi, OUTLINE_SAMPLES, endpoint=False)
    r = _outline_radius(spec, phi) / 100.0  # cm -> m
    return Polygon(np.column_stack([cx + r * np.cos(phi), cy + r * np.sin(phi)]))


def _fat_thickness(spec: MeatSpec, u: np.ndarray) -> np.ndarray:
    t = np.full_like(u, spec.fat_base_cm)
    for k, amp, phase in spec.fat_harmonics:
        t = t + amp * np.cos(k * math.pi * u + phase)
    return np.maximum(t, 0.0)


def _fat_geometry(spec: MeatSpec, meat: Polygon):
    if spec.fat_base_cm <= 0:
        return None, None
    x0, _, x1, _ = meat.bounds
    w = x1 - x0
    lo = x0 + (1.0 - spec.fat_span) / 2.0 * w
    hi = x1 - (1.0 - spec.fat_span) / 2.0 * w
    xs = np.linspace(lo, hi, 200)
    boundary = meat.boundary
    y_top = []
    for x in xs:
        line = shapely.LineString([(x, meat.bounds[1] - 0.01), (x, meat.bounds[3] + 0.01)])
        hits = line.intersection(boundary)
        ys = [g.y for g in getattr(hits, "geoms", [hits]) if not g.is_empty]
        y_top.append(max(ys))
    y_top = np.asarray(y_top)
    u = (xs - lo) / (hi - lo)
    t = _fat_thickness(spec, u) / 100.0
    lower = np.column_stack([xs, y_top])
    upper = np.column_stack([xs[::-1], (y_top + t)[::-1]])
    fat = Polygon(np.vstack([lower, upper]))
    if not fat.is_valid or fat.area <= 0:
        fat = fat.buffer(0)
    return fat, lower


def _fill(pixels, polygon: Polygon, board: BoardGeometry, rgb):
    minx, miny, maxx, maxy = polygon.bounds
    c0 = max(int(board.robot_to_px((minx, miny))[0]) - 1, 0)
    r0 = max(int(board.robot_to_px((minx, miny))[1]) - 1, 0)
    c1 = min(int(board.robot_to_px((maxx, maxy))[0]) + 2, pixels.shape[1])
    r1 = min(int(board.robot_to_px((maxx, maxy))[1]) + 2, pixels.shape[0])
    if c1 <= c0 or r1 <= r0:
        return
    cols, rows = np.meshgrid(np.arange(c0, c1), np.arange(r0, r1))
    xs = (cols + 0.5 - board.margin_px) / board.px_per_m
    ys = (rows + 0.5 - board.margin_px) / board.px_per_m
    inside = shapely.contains_xy(polygon, xs.ravel(), ys.ravel()).reshape(xs.shape)
    pixels[r0:r1, c0:c1][inside] = rgb


def render_pieces(
    meat_polygons,
    fat_polygons,
    board: BoardGeometry,
    markers=(),
    seed: int = 0,
) -> Scene:
    """Rasterize a piece inventory onto the board.

    `markers` is an iterable of robot-frame (x, y) positions painted as small
    purple squares.
    """
    w, h = board.image_size
    rng = np.random.default_rng(seed)
    pixels = np.empty((h, w, 3), np.uint8)
    pixels[:, :] = EXTERIOR_RGB
    b = board.board_region
    noise = rng.integers(-6, 7, size=(b.y1 - b.y0, b.x1 - b.x0, 3))
    pixels[b.y0 : b.y1, b.x0 : b.x1] = np.clip(np.array(BOARD_RGB) + noise, 0, 255)

    for poly in meat_polygons:
        _fill(pixels, poly, board, MEAT_RGB)
    for poly in fat_polygons:
        _fill(pixels, poly, board, FAT_RGB)

    half = MARKER_SIZE_PX // 2
    for m in markers:
        cx, cy = board.robot_to_px(m)
        c, r = int(round(cx)), int(round(cy))
        pixels[max(r - half, 0) : r + half, max(c - half, 0) : c + half] = MARKER_RGB
    return Scene(pixels, board.board_region)


def generate_scene(
    spec: MeatSpec,
    board: BoardGeometry | None = None,
    markers=(),
) -> tuple[Scene, GroundTruth]:
    """Render a deterministic scene and return it with its exact ground truth.

    Raises ValueError when the blob does not fit the board.
    """
    board = board or BoardGeometry()
    meat = _meat_polygon(spec)
    fat, interface = _fat_geometry(spec, meat)

    minx, miny, maxx, maxy = (fat.union(meat) if fat else meat).bounds
    if minx < 0 or miny < 0 or maxx > board.width_m or maxy > board.height_m:
        raise ValueError("meat spec exceeds the board")

    scene = render_pieces([meat], [fat] if fat is not None else [], board, markers, spec.seed)
    truth = GroundTruth(meat, fat, interface, board, spec.thickness_cm, spec.density_g_cm3)
    return scene, truth


def random_meat_spec(seed: int, fat: bool = True) -> MeatSpec:
    """A randomized loin-like spec: wavy outline, uneven fat band."""
    rng = np.random.default_rng(seed)
    harmonics = tuple(
        (int(k), float(rng.uniform(0.2, 0.9)), float(rng.uniform(0, 2 * math.pi)))
        for k in (2, 3, 5)
    )
    fat_harmonics = tuple(
        (int(k), float(rng.uniform(0.1, 0.5)), float(rng.uniform(0, 2 * math.pi)))
        for k in (1, 2)
    )
    return MeatSpec(
        center_cm=(20.0, float(rng.uniform(11.0, 13.0))),
        radius_x_cm=float(rng.uniform(10.5, 13.0)),
        radius_y_cm=float(rng.uniform(6.0, 7.5)),
        harmonics=harmonics,
        fat_base_cm=float(rng.uniform(1.2, 2.2)) if fat else 0.0,
        fat_harmonics=fat_harmonics if fat else (),
        thickness_cm=float(rng.uniform(2.5, 3.5)),
        seed=seed,
    )
