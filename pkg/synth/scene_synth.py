"""
Deterministic synthetic traffic scenes with geometric ground truth.

The scene is a top-down road between a dark left verge and a bright right
verge. Vehicles are textured rectangles entering at the top edge and moving
down their column at constant speed, optionally halting for a while. Noise,
illumination drift, reflections and camera jitter are drawn from seeded
xorshift64* streams, so a ScenarioSpec fully determines every frame.

Truth occupancy of a zone is 1 when the union of the vehicle rectangles
covers at least truth_overlap of the zone's pixels. It is computed from
geometry alone and does not depend on the seed.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from core.constants import Formats
from core.errors import ScenarioError
from core.frame_model import Frame
from utils.frame_io import write_sequence
from utils.zone_config import ZoneSpec, dump_zone_specs

from .rng import XorShift64Star

# stream ids of the independent random sequences
TEXTURE_STREAM = 1
NOISE_STREAM = 2
JITTER_STREAM = 3
VEHICLE_STREAM = 4


class Headlights(BaseModel):
    """Two bright blobs at the front corners of a vehicle."""

    model_config = ConfigDict(frozen=True)

    intensity: int = Field(255, ge=0, le=255)
    width: int = Field(8, ge=1)
    length: int = Field(6, ge=1)
    inset: int = Field(3, ge=0)


class VehicleEvent(BaseModel):
    """One vehicle pass down the lane."""

    model_config = ConfigDict(frozen=True)

    entry_frame: int = Field(..., ge=0, description="Frame at which the front edge is at y = 0")
    x: int = Field(..., description="Left column of the vehicle")
    speed: float = Field(4.0, gt=0, description="Pixels per frame")
    width: int = Field(40, ge=1)
    length: int = Field(48, ge=1)
    intensity: int = Field(40, ge=0, le=255, description="Body intensity")
    texture: float = Field(8.0, ge=0, description="Amplitude of the static body texture")
    underside: int = Field(0, ge=0, description="Rows of dark band at the front edge")
    underside_intensity: int = Field(15, ge=0, le=255)
    headlights: Optional[Headlights] = None
    dwell_y: Optional[float] = Field(None, description="Front-edge row where the vehicle halts")
    dwell_frames: int = Field(0, ge=0, description="Frames spent halted at dwell_y")

    def front_edge(self, t: int) -> Optional[float]:
        """Row of the front edge at frame t, None before entry."""
        travel = t - self.entry_frame
        if travel < 0:
            return None
        if self.dwell_y is None or self.dwell_frames == 0:
            return self.speed * travel
        arrival = self.dwell_y / self.speed
        halted = min(max(travel - arrival, 0.0), float(self.dwell_frames))
        return self.speed * (travel - halted)

    def rows(self, t: int) -> Optional[Tuple[int, int]]:
        """Unclipped row span [top, bottom) at frame t."""
        front = self.front_edge(t)
        if front is None:
            return None
        bottom = int(math.floor(front))
        return bottom - self.length, bottom


class ReflectionEvent(BaseModel):
    """A bright patch on the pavement during [start_frame, end_frame)."""

    model_config = ConfigDict(frozen=True)

    start_frame: int = Field(..., ge=0)
    end_frame: int = Field(..., ge=1)
    x: int
    y: int
    width: int = Field(..., ge=1)
    height: int = Field(..., ge=1)
    intensity: int = Field(230, ge=0, le=255)

    @model_validator(mode="after")
    def _check_span(self):
        if self.end_frame <= self.start_frame:
            raise ValueError("end_frame must be after start_frame")
        return self


class ScenarioSpec(BaseModel):
    """Complete description of a synthetic sequence."""

    model_config = ConfigDict(frozen=True)

    width: int = Field(96, ge=7)
    height: int = Field(192, ge=7)
    frames: int = Field(1150, ge=1)
    fps: float = Field(25.0, gt=0)
    seed: int = Field(0)

    road_intensity: int = Field(120, ge=0, le=255)
    road_texture: float = Field(4.0, ge=0, description="Amplitude of the static pavement texture")
    verge_width: int = Field(16, ge=0)
    left_verge_intensity: int = Field(40, ge=0, le=255)
    right_verge_intensity: int = Field(210, ge=0, le=255)

    noise_sigma: float = Field(2.0, ge=0)
    drift: float = Field(0.0, description="Global intensity change per frame")
    jitter: int = Field(0, ge=0, description="Max camera translation in pixels")
    truth_overlap: float = Field(0.3, gt=0, le=1)

    vehicles: List[VehicleEvent] = Field(default_factory=list)
    reflections: List[ReflectionEvent] = Field(default_factory=list)
    zones: List[ZoneSpec] = Field(default_factory=list)

    @model_validator(mode="before")
    @classmethod
    def _default_zone(cls, data):
        """Without zones, one square zone sits centred in the lower half."""
        if isinstance(data, dict) and not data.get("zones"):
            width = int(data.get("width", 96))
            height = int(data.get("height", 192))
            size = max(min(64, width, height // 2), 1)
            zone = ZoneSpec.rectangle("D1", (width - size) // 2, height // 2, size, size)
            data = {**data, "zones": [zone]}
        return data


@dataclass(frozen=True)
class GroundTruth:
    """Truth occupancy, shape (frames, zones), in zone order."""

    zone_ids: Tuple[str, ...]
    occupied: np.ndarray

    @property
    def frame_count(self) -> int:
        return self.occupied.shape[0]

    def for_zone(self, zone_id: str) -> np.ndarray:
        return self.occupied[:, self.zone_ids.index(zone_id)]

    def to_frame(self) -> pd.DataFrame:
        """Long format with columns frame, zone_id, truth; frame-major."""
        frames, zones = self.occupied.shape
        return pd.DataFrame(
            {
                "frame": np.repeat(np.arange(frames), zones),
                "zone_id": np.tile(np.array(self.zone_ids, dtype=object), frames),
                "truth": self.occupied.reshape(-1).astype(np.int64),
            },
            columns=list(Formats.TRUTH_COLUMNS),
        )


# ===================== Validation =====================


def load_scenario(path: Union[str, Path]) -> ScenarioSpec:
    """Read a scenario YAML file."""
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as e:
        raise ScenarioError(f"{path}: malformed YAML: {e}")
    try:
        return ScenarioSpec(**data)
    except ValidationError as e:
        raise ScenarioError(f"{path}: {e}")


def _span(start: int, size: int, limit: int) -> Tuple[int, int]:
    return max(start, 0), min(start + size, limit)


def validate_scenario(spec: ScenarioSpec):
    """Reject event lists the renderer cannot honour."""
    entries = [v.entry_frame for v in spec.vehicles]
    if entries != sorted(entries):
        raise ScenarioError("vehicle events must be sorted by entry frame")

    for index, vehicle in enumerate(spec.vehicles):
        x0, x1 = _span(vehicle.x, vehicle.width, spec.width)
        if x1 <= x0:
            raise ScenarioError(f"vehicle {index}: columns {vehicle.x}..{vehicle.x + vehicle.width} miss the frame")
        visible = False
        for t in range(vehicle.entry_frame, spec.frames):
            top, bottom = vehicle.rows(t)
            if max(top, 0) < min(bottom, spec.height):
                visible = True
                break
            if top >= spec.height:
                break
        if not visible:
            raise ScenarioError(f"vehicle {index}: never intersects the frame within {spec.frames} frames")

    for index, patch in enumerate(spec.reflections):
        x0, x1 = _span(patch.x, patch.width, spec.width)
        y0, y1 = _span(patch.y, patch.height, spec.height)
        if x1 <= x0 or y1 <= y0 or patch.start_frame >= spec.frames:
            raise ScenarioError(f"reflection {index}: never intersects the frame")

    if 2 * spec.verge_width >= spec.width:
        raise ScenarioError("verges leave no road")


# ===================== Rendering =====================


def _background(spec: ScenarioSpec) -> np.ndarray:
    rng = XorShift64Star(spec.seed, lanes=spec.width * spec.height, stream=TEXTURE_STREAM)
    texture = (rng.uniform() * 2.0 - 1.0) * spec.road_texture
    image = spec.road_intensity + texture.reshape(spec.height, spec.width)
    if spec.verge_width:
        image[:, : spec.verge_width] = spec.left_verge_intensity
        image[:, spec.width - spec.verge_width :] = spec.right_verge_intensity
    return image


def _vehicle_textures(spec: ScenarioSpec) -> List[np.ndarray]:
    textures = []
    for index, vehicle in enumerate(spec.vehicles):
        rng = XorShift64Star(spec.seed + index, lanes=vehicle.width * vehicle.length, stream=VEHICLE_STREAM)
        pattern = (rng.uniform() * 2.0 - 1.0) * vehicle.texture
        body = vehicle.intensity + pattern.reshape(vehicle.length, vehicle.width)
        if vehicle.underside:
            body[-vehicle.underside :, :] = vehicle.underside_intensity
        lights = vehicle.headlights
        if lights is not None:
            rows = slice(max(vehicle.length - lights.length, 0), vehicle.length)
            left = slice(lights.inset, lights.inset + lights.width)
            right = slice(max(vehicle.width - lights.inset - lights.width, 0), vehicle.width - lights.inset)
            body[rows, left] = lights.intensity
            body[rows, right] = lights.intensity
        textures.append(body)
    return textures


def _paste(image: np.ndarray, sprite: np.ndarray, top: int, left: int):
    height, width = image.shape
    rows, cols = sprite.shape
    y0, y1 = max(top, 0), min(top + rows, height)
    x0, x1 = max(left, 0), min(left + cols, width)
    if y1 <= y0 or x1 <= x0:
        return
    image[y0:y1, x0:x1] = sprite[y0 - top : y1 - top, x0 - left : x1 - left]


def _shift(image: np.ndarray, dx: int, dy: int) -> np.ndarray:
    if dx == 0 and dy == 0:
        return image
    pad = max(abs(dx), abs(dy))
    padded = np.pad(image, pad, mode="edge")
    height, width = image.shape
    return padded[pad - dy : pad - dy + height, pad - dx : pad - dx + width]


def vehicle_mask(spec: ScenarioSpec, t: int) -> np.ndarray:
    """Union of vehicle rectangles at frame t."""
    mask = np.zeros((spec.height, spec.width), dtype=bool)
    for vehicle in spec.vehicles:
        rows = vehicle.rows(t)
        if rows is None:
            continue
        y0, y1 = _span(rows[0], vehicle.length, spec.height)
        x0, x1 = _span(vehicle.x, vehicle.width, spec.width)
        if y1 > y0 and x1 > x0:
            mask[y0:y1, x0:x1] = True
    return mask


def compute_truth(spec: ScenarioSpec) -> GroundTruth:
    """Geometric truth occupancy for every frame and zone."""
    zones = [z.to_zone(spec.width, spec.height) for z in spec.zones]
    truth = np.zeros((spec.frames, len(zones)), dtype=np.uint8)
    for t in range(spec.frames):
        mask = vehicle_mask(spec, t)
        for j, zone in enumerate(zones):
            covered = int(np.count_nonzero(mask[zone.ys, zone.xs]))
            truth[t, j] = covered >= spec.truth_overlap * zone.pixel_count
    return GroundTruth(zone_ids=tuple(z.id for z in zones), occupied=truth)


def iter_frames(spec: ScenarioSpec) -> Iterator[Frame]:
    """Render the sequence frame by frame."""
    validate_scenario(spec)
    background = _background(spec)
    sprites = _vehicle_textures(spec)
    noise = XorShift64Star(spec.seed, lanes=spec.width * spec.height, stream=NOISE_STREAM)
    jitter = XorShift64Star(spec.seed, lanes=2, stream=JITTER_STREAM)

    for t in range(spec.frames):
        image = background.copy()
        for patch in spec.reflections:
            if patch.start_frame <= t < patch.end_frame:
                _paste(image, np.full((patch.height, patch.width), float(patch.intensity)), patch.y, patch.x)
        for vehicle, sprite in zip(spec.vehicles, sprites):
            rows = vehicle.rows(t)
            if rows is not None:
                _paste(image, sprite, rows[0], vehicle.x)

        if spec.drift:
            image += spec.drift * t
        if spec.noise_sigma > 0:
            image += spec.noise_sigma * noise.normal().reshape(spec.height, spec.width)

        data = np.clip(np.rint(image), 0, 255).astype(np.uint8)
        if spec.jitter:
            dx, dy = (int(v) for v in jitter.integers(-spec.jitter, spec.jitter))
            data = _shift(data, dx, dy)
        yield Frame(data=data, t=t)


def generate_sequence(spec: ScenarioSpec) -> Tuple[List[Frame], GroundTruth]:
    """Render all frames and their truth."""
    frames = list(iter_frames(spec))
    return frames, compute_truth(spec)


def write_scenario(spec: ScenarioSpec, out_dir: Union[str, Path]) -> dict:
    """Persist frames as numbered PGM files plus truth.csv and zones.json."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frame_paths = write_sequence(out_dir, iter_frames(spec))
    truth_path = out_dir / Formats.TRUTH_FILE
    compute_truth(spec).to_frame().to_csv(truth_path, index=False, lineterminator="\n")
    zones_path = dump_zone_specs(list(spec.zones), out_dir / Formats.ZONES_FILE)
    return {"frames": frame_paths, "truth": truth_path, "zones": zones_path}


# ===================== Scenario presets =====================


def _lane_x(spec_width: int, vehicle_width: int) -> int:
    return (spec_width - vehicle_width) // 2


def traffic_scenario(
    seed: int,
    frames: int = 1150,
    vehicles: int = 8,
    first_entry: int = 100,
    gap: Tuple[int, int] = (100, 140),
    noise_sigma: float = 2.0,
    **overrides,
) -> ScenarioSpec:
    """
    A single-lane scene with `vehicles` passes at seeded gaps.

    Bodies alternate between dark and bright with seeded intensities, so
    both ends of the colour variable are exercised.
    """
    rng = XorShift64Star(seed, lanes=1, stream=VEHICLE_STREAM + 1)
    width = overrides.get("width", 96)
    events = []
    entry = first_entry
    for k in range(vehicles):
        if k % 2 == 0:
            intensity = rng.scalar_integer(20, 60)
        else:
            intensity = rng.scalar_integer(185, 230)
        events.append(VehicleEvent(entry_frame=entry, x=_lane_x(width, 40), intensity=intensity))
        entry += rng.scalar_integer(*gap)
    if events and events[-1].entry_frame >= frames:
        raise ScenarioError(f"{vehicles} vehicles do not fit into {frames} frames")
    return ScenarioSpec(seed=seed, frames=frames, vehicles=events, noise_sigma=noise_sigma, **overrides)


def eight_vehicle_scenario(seed: int = 2010) -> ScenarioSpec:
    """1150 frames with eight evenly spaced vehicle passes over one zone."""
    entries = [100, 230, 360, 490, 620, 750, 880, 1010]
    intensities = [30, 205, 45, 220, 25, 190, 55, 215]
    events = [
        VehicleEvent(entry_frame=e, x=_lane_x(96, 40), intensity=i) for e, i in zip(entries, intensities)
    ]
    return ScenarioSpec(seed=seed, frames=1150, vehicles=events, noise_sigma=2.0)


def benchmark_scenario(
    width: int = 768,
    height: int = 512,
    frames: int = 500,
    zone_count: int = 4,
    zone_size: int = 64,
    seed: int = 2010,
) -> ScenarioSpec:
    """Wide road with one lane per zone, zones side by side across the frame."""
    verge = max(width // 16, 0)
    road = width - 2 * verge
    lane = road // zone_count
    zone_size = min(zone_size, lane, height // 2)
    vehicle_width = max(zone_size * 5 // 8, 1)
    speed = max(height / 64.0, 1.0)
    # a vehicle shows its first row ceil(1 / speed) frames after entry
    last_entry = frames - math.ceil(1.0 / speed)
    zones = []
    events = []
    for k in range(zone_count):
        center = verge + lane * k + lane // 2
        zones.append(ZoneSpec.rectangle(f"D{k + 1}", center - zone_size // 2, height // 2, zone_size, zone_size))
        period = max(height // 4 + 40, 60)
        for entry in range(10 + 7 * k, last_entry, period):
            events.append(
                VehicleEvent(
                    entry_frame=entry,
                    x=center - vehicle_width // 2,
                    width=vehicle_width,
                    length=max(zone_size * 3 // 4, 1),
                    intensity=30 if (entry // period + k) % 2 == 0 else 210,
                    speed=speed,
                )
            )
    events.sort(key=lambda v: v.entry_frame)
    return ScenarioSpec(
        width=width,
        height=height,
        frames=frames,
        seed=seed,
        verge_width=verge,
        vehicles=events,
        zones=zones,
    )
