"""
Zone detection: polygon zones, feature sums, adaptive hysteresis thresholds,
movement gating and binary occupancy.

Per frame and zone the composition is
    feature sum -> range update -> thresholds -> movement -> occupancy
and every step is a pure function of the previous ZoneState.
"""

import math
from dataclasses import dataclass, replace, astuple
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .constants import Attributes
from .errors import StructuralError, ZoneConfigError
from .frame_model import Frame

Point = Tuple[int, int]


class ThresholdConfig(BaseModel):
    """Hysteresis ratio and range creep/decay rates."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(0.8, gt=0, lt=1, description="t_low = alpha * t_high")
    beta_min: float = Field(0.1, gt=0, description="Upward creep of s_min per frame")
    beta_max: float = Field(0.01, gt=0, description="Downward decay of s_max per frame")


class MovementConfig(BaseModel):
    """Frame-differencing parameters of the movement gate."""

    model_config = ConfigDict(frozen=True)

    pixel_delta: int = Field(15, gt=0, lt=255, description="Per-pixel |difference| threshold")
    zone_fraction: float = Field(0.01, gt=0, le=1, description="Fraction of zone pixels that must change")
    hold_frames: int = Field(5, ge=1, description="Frames a detected movement keeps the gate open")


# ===================== Polygon geometry =====================


def _orientation(a: Point, b: Point, c: Point) -> int:
    value = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (value > 0) - (value < 0)


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """True when closed segments p1p2 and q1q2 share at least one point."""
    o1 = _orientation(p1, p2, q1)
    o2 = _orientation(p1, p2, q2)
    o3 = _orientation(q1, q2, p1)
    o4 = _orientation(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return (
        (o1 == 0 and _on_segment(p1, p2, q1))
        or (o2 == 0 and _on_segment(p1, p2, q2))
        or (o3 == 0 and _on_segment(q1, q2, p1))
        or (o4 == 0 and _on_segment(q1, q2, p2))
    )


def is_simple_polygon(polygon: Sequence[Point]) -> bool:
    """No repeated consecutive vertices and no contact between non-adjacent edges."""
    n = len(polygon)
    if n < 3:
        return False
    edges = [(tuple(polygon[i]), tuple(polygon[(i + 1) % n])) for i in range(n)]
    if any(a == b for a, b in edges):
        return False
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                # adjacent edges share a vertex; reject only collinear fold-backs
                a, b = edges[i]
                c, d = edges[j]
                shared = b if j == i + 1 else a
                other_i = a if shared == b else b
                other_j = d if shared == c else c
                if _orientation(shared, other_i, other_j) == 0 and (
                    _on_segment(shared, other_i, other_j) or _on_segment(shared, other_j, other_i)
                ):
                    return False
                continue
            if segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def rasterize_polygon(polygon: Sequence[Point], width: int, height: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pixels whose centres (x + 0.5, y + 0.5) lie inside the polygon.

    Even-odd rule over pixel centres; centres exactly on an edge are included.
    Returns row and column index arrays in row-major order.
    """
    pts = np.asarray(polygon, dtype=np.float64)
    x0 = max(int(math.floor(pts[:, 0].min())), 0)
    x1 = min(int(math.ceil(pts[:, 0].max())), width)
    y0 = max(int(math.floor(pts[:, 1].min())), 0)
    y1 = min(int(math.ceil(pts[:, 1].max())), height)
    if x1 <= x0 or y1 <= y0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)

    gy, gx = np.mgrid[y0:y1, x0:x1]
    py = gy + 0.5
    px = gx + 0.5
    inside = np.zeros(py.shape, dtype=bool)
    on_edge = np.zeros(py.shape, dtype=bool)

    n = len(pts)
    for i in range(n):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % n]
        if ay != by:
            crosses = (ay > py) != (by > py)
            x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
            inside ^= crosses & (px < x_cross)
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        on_edge |= (
            (cross == 0)
            & (px >= min(ax, bx))
            & (px <= max(ax, bx))
            & (py >= min(ay, by))
            & (py <= max(ay, by))
        )

    mask = inside | on_edge
    return gy[mask].astype(np.int64), gx[mask].astype(np.int64)


@dataclass(frozen=True, eq=False)
class DetectionZone:
    """A polygonal detection zone and its rasterised pixel set."""

    id: str
    polygon: Tuple[Point, ...]
    ys: np.ndarray
    xs: np.ndarray
    p_d: float = 0.2

    @classmethod
    def from_polygon(
        cls, zone_id: str, polygon: Sequence[Sequence[int]], width: int, height: int, p_d: float = 0.2
    ) -> "DetectionZone":
        """Validate a polygon against the frame bounds and rasterise it."""
        vertices = tuple((int(x), int(y)) for x, y in polygon)
        if len(vertices) < 3:
            raise ZoneConfigError(f"zone '{zone_id}': polygon needs at least 3 vertices")
        if not 0.0 <= p_d <= 1.0:
            raise ZoneConfigError(f"zone '{zone_id}': p_d={p_d} outside [0, 1]")
        for x, y in vertices:
            if not (0 <= x <= width and 0 <= y <= height):
                raise ZoneConfigError(
                    f"zone '{zone_id}': vertex ({x}, {y}) outside frame {width}x{height}"
                )
        if not is_simple_polygon(vertices):
            raise ZoneConfigError(f"zone '{zone_id}': polygon is self-intersecting")

        ys, xs = rasterize_polygon(vertices, width, height)
        if len(ys) == 0:
            raise ZoneConfigError(f"zone '{zone_id}': polygon covers no pixel centre")
        return cls(id=zone_id, polygon=vertices, ys=ys, xs=xs, p_d=float(p_d))

    @property
    def pixel_count(self) -> int:
        return len(self.ys)

    def mask(self, width: int, height: int) -> np.ndarray:
        out = np.zeros((height, width), dtype=bool)
        out[self.ys, self.xs] = True
        return out


# ===================== Zone state =====================


@dataclass(frozen=True)
class ZoneState:
    """Running state of one zone."""

    s: float = 0.0
    s_min: float = 0.0
    s_max: float = 0.0
    t_high: float = 0.0
    t_low: float = 0.0
    occupied: bool = False
    movement: bool = False
    last_movement_frame: Optional[int] = None
    seeded: bool = False


@dataclass(frozen=True)
class OccupancyRecord:
    """One output row: the observable occupancy stream of a zone."""

    frame: int
    zone: str
    occupied: int
    s: float
    t_high: float
    t_low: float
    movement: int
    warmup: int

    def as_row(self) -> tuple:
        return astuple(self)


def zone_feature_sum(zone: DetectionZone, vf: np.ndarray) -> float:
    """
    Total vehicle-feature mass of the zone.

    vf holds one score per zone pixel and attribute, shape (N, 5). The sum is
    correctly rounded (math.fsum), so it does not depend on summation order.
    """
    if vf is None or vf.shape != (zone.pixel_count, Attributes.COUNT):
        shape = None if vf is None else vf.shape
        raise StructuralError(
            f"zone {zone.id}: expected scores of shape {(zone.pixel_count, Attributes.COUNT)}, got {shape}"
        )
    return math.fsum(vf.ravel().tolist())


def update_range(state: ZoneState, s: float, cfg: ThresholdConfig = None) -> ZoneState:
    cfg = cfg or ThresholdConfig()
    if not state.seeded:
        return replace(state, s=s, s_min=s, s_max=s, seeded=True)

    s_min = s if s <= state.s_min else state.s_min + cfg.beta_min
    s_max = s if s >= state.s_max else state.s_max - cfg.beta_max
    s_min = min(s_min, s_max)
    return replace(state, s=s, s_min=s_min, s_max=s_max)


def compute_thresholds(state: ZoneState, p_d: float, cfg: ThresholdConfig = None) -> Tuple[float, float]:
    cfg = cfg or ThresholdConfig()
    t_high = max(p_d * state.s_max + (1.0 - p_d) * state.s_min, 100.0 * p_d)
    return t_high, cfg.alpha * t_high


def detect_movement(
    frame_t: Frame, frame_prev: Optional[Frame], zone: DetectionZone, cfg: MovementConfig = None
) -> bool:
    """Inter-frame differencing restricted to the zone pixels."""
    cfg = cfg or MovementConfig()
    if frame_prev is None:
        return False
    if frame_t.data.shape != frame_prev.data.shape:
        raise StructuralError(
            f"frame {frame_t.t} has shape {frame_t.data.shape}, previous {frame_prev.data.shape}"
        )
    current = frame_t.data[zone.ys, zone.xs].astype(np.int16)
    previous = frame_prev.data[zone.ys, zone.xs].astype(np.int16)
    changed = int(np.count_nonzero(np.abs(current - previous) > cfg.pixel_delta))
    return changed > cfg.zone_fraction * zone.pixel_count


def update_occupancy(state: ZoneState, s: float, movement_recent: bool) -> ZoneState:
    """Hysteresis on the current thresholds; transitions need recent movement."""
    if s >= state.t_high:
        candidate = True
    elif s <= state.t_low:
        candidate = False
    else:
        candidate = state.occupied

    if candidate != state.occupied and not movement_recent:
        candidate = state.occupied
    return replace(state, occupied=candidate)


def step_zone(
    zone: DetectionZone,
    state: ZoneState,
    frame_t: Frame,
    frame_prev: Optional[Frame],
    vf: np.ndarray,
    thresholds: ThresholdConfig,
    movement: MovementConfig,
    warmup_frames: int = 0,
) -> Tuple[ZoneState, OccupancyRecord]:
    """Advance one zone by one frame and emit its record."""
    t = frame_t.t
    s = zone_feature_sum(zone, vf)
    state = update_range(state, s, thresholds)
    t_high, t_low = compute_thresholds(state, zone.p_d, thresholds)
    state = replace(state, t_high=t_high, t_low=t_low)

    moved = detect_movement(frame_t, frame_prev, zone, movement)
    last_movement = t if moved else state.last_movement_frame
    recent = last_movement is not None and t - last_movement < movement.hold_frames
    state = replace(state, movement=moved, last_movement_frame=last_movement)

    warmup = t < warmup_frames
    if warmup:
        state = replace(state, occupied=False)
    else:
        state = update_occupancy(state, s, recent)

    record = OccupancyRecord(
        frame=t,
        zone=zone.id,
        occupied=int(state.occupied),
        s=s,
        t_high=t_high,
        t_low=t_low,
        movement=int(moved),
        warmup=int(warmup),
    )
    return state, record


def count_activations(occupied: Sequence[int]) -> int:
    """Number of 0 -> 1 transitions in an occupancy sequence."""
    previous = 0
    pulses = 0
    for value in occupied:
        if value and not previous:
            pulses += 1
        previous = value
    return pulses
