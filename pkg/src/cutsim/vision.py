"""Color-based scene segmentation for the cutting board camera.

A scene is an RGB raster plus a rectangular board region; pixels outside the
board are ignored entirely.  Meat is the largest red connected component, fat
the largest white one, and purple blobs above a small area threshold are
human-placed markers.  Components use 8-connectivity (4-connected
background), and contours are traced with Moore neighborhood tracing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

__all__ = [
    "BoardRegion",
    "Scene",
    "ColorRanges",
    "SceneSegmentation",
    "NoMeatError",
    "AmbiguousMarkersError",
    "NoInterfaceError",
    "segment_scene",
    "color_mask",
    "largest_component",
    "trace_contour",
    "fat_meat_interface",
    "read_ppm",
    "write_ppm",
    "segmentation_to_text",
    "segmentation_from_text",
]

MARKER_MIN_AREA = 9  # px; rejects speckle noise

# 8-connected components (full 3x3 structuring element)
_STRUCTURE8 = np.ones((3, 3), dtype=bool)

# Moore neighborhood ring in (row, col), clockwise in raster view starting west.
_RING = ((0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1))


class NoMeatError(ValueError):
    """No red component found on the board."""


class AmbiguousMarkersError(ValueError):
    """More than two marker blobs; point-to-point needs exactly two."""


class NoInterfaceError(ValueError):
    """Fat and meat contours are nowhere within tolerance of each other."""


@dataclass(frozen=True)
class BoardRegion:
    """Pixel rectangle [x0, x1) x [y0, y1) that contains the cutting board."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate board region {self}")


@dataclass
class Scene:
    """RGB raster (height x width x 3, uint8) with its board region."""

    pixels: np.ndarray
    board: BoardRegion

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"pixels must be (h, w, 3), got {px.shape}")
        self.pixels = px.astype(np.uint8, copy=False)
        h, w = px.shape[:2]
        b = self.board
        if not (0 <= b.x0 and b.x1 <= w and 0 <= b.y0 and b.y1 <= h):
            raise ValueError(f"board region {b} outside image {w}x{h}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class ColorRanges:
    """Inclusive per-channel RGB ranges for the three object classes.

    Defaults match the synthetic scene generator; override for photographs.
    """

    meat_lo: tuple[int, int, int] = (120, 0, 0)
    meat_hi: tuple[int, int, int] = (255, 100, 100)
    fat_lo: tuple[int, int, int] = (180, 180, 180)
    fat_hi: tuple[int, int, int] = (255, 255, 255)
    marker_lo: tuple[int, int, int] = (100, 0, 100)
    marker_hi: tuple[int, int, int] = (200, 90, 220)

    def __post_init__(self):
        for name in ("meat", "fat", "marker"):
            lo, hi = getattr(self, f"{name}_lo"), getattr(self, f"{name}_hi")
            if any(l > h for l, h in zip(lo, hi)):
                raise ValueError(f"{name} range has lo > hi: {lo} .. {hi}")


@dataclass
class SceneSegmentation:
    """Extracted meat/fat contours (pixel coordinates, (x, y) pairs) and markers."""

    meat_contour: np.ndarray
    meat_area: int
    fat_contour: np.ndarray | None = None
    fat_area: int = 0
    markers: list[tuple[float, float]] = field(default_factory=list)


def color_mask(scene: Scene, lo, hi) -> np.ndarray:
    """Boolean mask of board pixels inside the inclusive RGB range."""
    px = scene.pixels
    mask = np.all((px >= np.asarray(lo, np.uint8)) & (px <= np.asarray(hi, np.uint8)), axis=2)
    out = np.zeros_like(mask)
    b = scene.board
    out[b.y0 : b.y1, b.x0 : b.x1] = mask[b.y0 : b.y1, b.x0 : b.x1]
    return out


def largest_component(mask: np.ndarray) -> np.ndarray | None:
    """Largest 8-connected component of a boolean mask, or None when empty.

    Ties break toward the component whose first pixel in row-major order
    comes earliest.
    """
    mask = np.asarray(mask, dtype=bool)
    labels, n = ndimage.label(mask, structure=_STRUCTURE8)
    if n == 0:
        return None
    counts = np.bincount(labels.ravel())[1:]
    best = int(np.argmax(counts)) + 1  # label ids follow raster-scan discovery order
    return labels == best


def trace_contour(component: np.ndarray) -> np.ndarray:
    """Ordered boundary of an 8-connected component (Moore neighborhood tracing).

    Returns an (n, 2) array of (x, y) pixel coordinates, closed implicitly
    (last point connects to the first).  The walk starts at the top-left
    boundary pixel and proceeds clockwise in raster view, which reads
    counter-clockwise on the board once the y axis points up (and in the
    robot frame after calibration).
    """
    comp = np.asarray(component, dtype=bool)
    rows, cols = np.nonzero(comp)
    if rows.size == 0:
        raise ValueError("empty component")
    start = (int(rows[0]), int(cols[0]))  # nonzero() is row-major: topmost-leftmost
    if rows.size == 1:
        return np.array([[start[1], start[0]]])

    h, w = comp.shape

    def is_set(r, c):
        return 0 <= r < h and 0 <= c < w and comp[r, c]

    contour = [start]
    # Backtrack starts due west of the start pixel (always background there).
    cur = start
    back = (start[0], start[1] - 1)
    first_transition = None
    max_steps = 4 * rows.size + 8
    for _ in range(max_steps):
        start_k = _RING.index((back[0] - cur[0], back[1] - cur[1]))
        nxt = None
        for k in range(1, 9):
            d = (start_k + k) % 8
            cand = (cur[0] + _RING[d][0], cur[1] + _RING[d][1])
            if is_set(*cand):
                prev = (start_k + k - 1) % 8
                new_back = (cur[0] + _RING[prev][0], cur[1] + _RING[prev][1])
                nxt = cand
                break
        if nxt is None:
            break  # single isolated pixel
        if first_transition is None:
            first_transition = (cur, nxt)
        elif (cur, nxt) == first_transition:
            break  # Jacob's stopping criterion: initial move about to repeat
        cur, back = nxt, new_back
        contour.append(cur)
    if len(contour) > 1 and contour[-1] == start:
        contour.pop()
    return np.array([[c, r] for r, c in contour])


def segment_scene(scene: Scene, ranges: ColorRanges | None = None) -> SceneSegmentation:
    """Segment a scene into meat, fat, and markers by color.

    Pixels outside the board region are ignored.  Raises NoMeatError when no
    red component exists and AmbiguousMarkersError when more than two marker
    blobs are found.
    """
    ranges = ranges or ColorRanges()

    meat_mask = largest_component(color_mask(scene, ranges.meat_lo, ranges.meat_hi))
    if meat_mask is None:
        raise NoMeatError("no red component found on the board")
    meat_contour = trace_contour(meat_mask)
    meat_area = int(meat_mask.sum())

    fat_contour = None
    fat_area = 0
    fat_mask = largest_component(color_mask(scene, ranges.fat_lo, ranges.fat_hi))
    if fat_mask is not None:
        fat_contour = trace_contour(fat_mask)
        fat_area = int(fat_mask.sum())

    markers = []
    marker_mask = color_mask(scene, ranges.marker_lo, ranges.marker_hi)
    labels, n = ndimage.label(marker_mask, structure=_STRUCTURE8)
    for label in range(1, n + 1):
        ys, xs = np.nonzero(labels == label)
        if xs.size >= MARKER_MIN_AREA:
            markers.append((float(xs.mean()), float(ys.mean())))
    if len(markers) > 2:
        raise AmbiguousMarkersError(f"found {len(markers)} markers, expected at most 2")

    return SceneSegmentation(meat_contour, meat_area, fat_contour, fat_area, markers)


def fat_meat_interface(seg: SceneSegmentation, tol: float = 2.0) -> np.ndarray:
    """Meat-contour points lying within `tol` pixels of the fat contour.

    Points are returned in meat-contour traversal order; when the matching
    stretch wraps past the contour start it is rotated so the sequence stays
    contiguous.  Raises NoInterfaceError when the contours are nowhere within
    tolerance.
    """
    if seg.fat_contour is None or len(seg.fat_contour) == 0:
        raise ValueError("fat contour absent; cannot extract interface")
    tree = cKDTree(seg.fat_contour)
    dist, _ = tree.query(seg.meat_contour)
    idx = np.nonzero(dist <= tol)[0]
    if idx.size == 0:
        raise NoInterfaceError(f"fat and meat contours are farther than {tol} px apart")
    n = len(seg.meat_contour)
    if idx.size < n:
        # rotate past the largest index gap so a wrap-around stretch stays contiguous
        gaps = np.diff(np.concatenate([idx, [idx[0] + n]]))
        start = (int(np.argmax(gaps)) + 1) % idx.size
        idx = np.concatenate([idx[start:], idx[:start]])
    return seg.meat_contour[idx]


# --- raster and text interfaces ---------------------------------------------

def write_ppm(path, pixels: np.ndarray):
    """Write an RGB raster as binary PPM (P6)."""
    px = np.asarray(pixels, dtype=np.uint8)
    h, w = px.shape[:2]
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(px.tobytes())


def read_ppm(path) -> np.ndarray:
    """Read a binary PPM (P6) raster into an (h, w, 3) uint8 array."""
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P6"):
        raise ValueError("not a P6 PPM file")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    w, h, maxval = fields
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    px = np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=pos)
    return px.reshape(h, w, 3).copy()


def _contour_text(contour: np.ndarray) -> str:
    return " ".join(f"{int(x)},{int(y)}" for x, y in contour)


def _parse_contour(text: str) -> np.ndarray:
    pts = [tuple(map(int, tok.split(","))) for tok in text.split()]
    return np.array(pts, dtype=int)


def segmentation_to_text(seg: SceneSegmentation) -> str:
    lines = ["[meat]", f"area={seg.meat_area}", f"contour={_contour_text(seg.meat_contour)}"]
    if seg.fat_contour is not None:
        lines += ["[fat]", f"area={seg.fat_area}", f"contour={_contour_text(seg.fat_contour)}"]
    lines.append("[markers]")
    lines.append(f"count={len(seg.markers)}")
    for i, (mx, my) in enumerate(seg.markers):
        lines.append(f"m{i}={mx!r},{my!r}")
    return "\n".join(lines) + "\n"


def segmentation_from_text(text: str) -> SceneSegmentation:
    section = None
    data: dict[str, dict[str, str]] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            data[section] = {}
        else:
            key, _, value = line.partition("=")
            data[section][key.strip()] = value.strip()
    meat = data["meat"]
    seg = SceneSegmentation(_parse_contour(meat["contour"]), int(meat["area"]))
    if "fat" in data:
        seg.fat_contour = _parse_contour(data["fat"]["contour"])
        seg.fat_area = int(data["fat"]["area"])
    markers = data.get("markers", {})
    for i in range(int(markers.get("count", 0))):
        mx, my = markers[f"m{i}"].split(",")
        seg.markers.append((float(mx), float(my)))
    return seg
