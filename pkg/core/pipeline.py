"""
DetectorPipeline: the optimized per-frame engine.

Per frame: mean image -> scheduled calibration -> zone attributes ->
accumulator update (frozen by the previous frame's occupancy) -> feature
classification -> zone step. Zones are independent once the mean image and
calibration exist, so they may fan out to a thread pool; records are always
returned in zone order.
"""

import math
import os
import threading
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from utils.log_utils import get_log_utils

from .constants import Attributes
from .errors import FrameDimensionError
from .feature_memory import AccumulatorBank, dump_bank, update_bank, vehicle_scores
from .frame_model import (
    ColorCalibration,
    Frame,
    MeanImage,
    calibrate_color,
    compute_mean_image,
    compute_mean_window,
)
from .linguistic_attributes import eval_attribute_frame, eval_attribute_grid
from .zone_detection import DetectionZone, OccupancyRecord, ZoneState, step_zone

if TYPE_CHECKING:
    from utils.config_utils import DetectorSettings


class PipelineConfig(BaseModel):
    """Evaluation domain, parallelism and warm-up length."""

    model_config = ConfigDict(frozen=True)

    attribute_domain: Literal["zones", "full_frame"] = Field("zones", description="Where attributes are evaluated")
    threads: int = Field(0, ge=0, description="Worker cap for zone fan-out, 0 = auto")
    warmup_frames: Optional[int] = Field(None, ge=0, description="Frames with suppressed output, None = n_full")


class StageTimer:
    """Accumulates wall time per pipeline stage; a no-op when disabled."""

    STAGES = ("mean", "calibrate", "attributes", "accumulate", "classify", "zone_step")

    def __init__(self, enabled: bool = False):
        self.enabled = enabled
        self.totals: Dict[str, float] = defaultdict(float)
        self._lock = threading.Lock()

    @contextmanager
    def stage(self, name: str):
        if not self.enabled:
            yield
            return
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            with self._lock:
                self.totals[name] += elapsed

    def per_frame_us(self, frames: int) -> Dict[str, float]:
        frames = max(frames, 1)
        return {name: self.totals.get(name, 0.0) * 1e6 / frames for name in self.STAGES}


class ZoneWindow:
    """
    Bounding box of a zone grown by the contrast reach, clipped to the frame.

    Neighbour lookups that clamp to the window land on the same pixels as
    lookups clamping to the frame: the window either covers the reach or
    ends at the frame border.
    """

    def __init__(self, zone: DetectionZone, width: int, height: int):
        reach = max(max(abs(dx), abs(dy)) for dx, dy in Attributes.CONTRAST_OFFSETS.values())
        self.y0 = max(int(zone.ys.min()) - reach, 0)
        self.y1 = min(int(zone.ys.max()) + 1 + reach, height)
        self.x0 = max(int(zone.xs.min()) - reach, 0)
        self.x1 = min(int(zone.xs.max()) + 1 + reach, width)
        self.ys = zone.ys - self.y0
        self.xs = zone.xs - self.x0

    def means(self, frame: Frame, full: Optional[MeanImage]) -> MeanImage:
        if full is not None:
            return MeanImage(data=full.data[self.y0 : self.y1, self.x0 : self.x1], t=full.t)
        return compute_mean_window(frame, self.y0, self.y1, self.x0, self.x1)


def resolve_workers(threads: int, zone_count: int) -> int:
    if threads and threads > 0:
        return max(1, min(threads, zone_count))
    return max(1, min(zone_count, os.cpu_count() or 1))


class DetectorPipeline:
    """Stateful detector over a fixed frame size and zone list."""

    def __init__(
        self,
        zones: List[DetectionZone],
        settings: "DetectorSettings",
        width: int,
        height: int,
        instrument: bool = False,
        name: str = "pipeline",
    ):
        self.name = name
        self.zones = list(zones)
        self.settings = settings
        self.width = width
        self.height = height
        self.timer = StageTimer(enabled=instrument)
        self._log = get_log_utils()

        cc = settings.count_classifier
        self.windows = [ZoneWindow(z, width, height) for z in self.zones]
        self.banks = [AccumulatorBank.zeros(z.id, z.ys, z.xs, a_max=cc.a_max) for z in self.zones]
        self.states = [ZoneState() for _ in self.zones]
        self.last_vf: List[Optional[np.ndarray]] = [None] * len(self.zones)

        warmup = settings.pipeline.warmup_frames
        self.warmup_frames = int(math.ceil(cc.n_full)) if warmup is None else warmup

        self.calibration: Optional[ColorCalibration] = None
        self.mean_image: Optional[MeanImage] = None
        self._prev_frame: Optional[Frame] = None
        self.frames_processed = 0

        self.workers = resolve_workers(settings.pipeline.threads, len(self.zones))
        self._executor = (
            ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix="vloop-zone")
            if self.workers > 1
            else None
        )

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def process(self, frame: Frame) -> List[OccupancyRecord]:
        """Run all stages for one frame; returns one record per zone."""
        if frame.size != (self.width, self.height):
            raise FrameDimensionError(
                f"frame {frame.t} is {frame.width}x{frame.height}, expected {self.width}x{self.height}"
            )

        calibrating = self.frames_processed % self.settings.calibration.interval == 0
        full_frame = self.settings.pipeline.attribute_domain == "full_frame"

        # whole-frame means only for the histogram or full-frame attributes;
        # otherwise each zone computes its own window
        self.mean_image = None
        if calibrating or full_frame:
            with self.timer.stage("mean"):
                self.mean_image = compute_mean_image(frame)

        if calibrating:
            with self.timer.stage("calibrate"):
                self.calibration = calibrate_color(self.mean_image, self.settings.calibration)
            c = self.calibration
            self._log.log_message(
                self.name, "DEBUG", "calibration", frame=frame.t, b0=c.b0, b1=c.b1, w1=c.w1, w2=c.w2
            )

        full_attrs = None
        if full_frame:
            with self.timer.stage("attributes"):
                full_attrs = eval_attribute_frame(self.mean_image, self.calibration, self.settings.contrast)

        indices = range(len(self.zones))
        if self._executor is not None:
            records = list(self._executor.map(lambda i: self._process_zone(i, frame, full_attrs), indices))
        else:
            records = [self._process_zone(i, frame, full_attrs) for i in indices]

        if frame.t + 1 == self.warmup_frames:
            self._log.log_message(self.name, "INFO", "warm-up finished", frame=frame.t)

        self._prev_frame = frame
        self.frames_processed += 1
        return records

    def _process_zone(self, index: int, frame: Frame, full_attrs: Optional[np.ndarray]) -> OccupancyRecord:
        zone = self.zones[index]
        bank = self.banks[index]
        state = self.states[index]
        settings = self.settings

        window = self.windows[index]
        if full_attrs is None:
            with self.timer.stage("mean"):
                means = window.means(frame, self.mean_image)

        with self.timer.stage("attributes"):
            if full_attrs is not None:
                attrs = full_attrs[zone.ys * self.width + zone.xs]
            else:
                attrs = eval_attribute_grid(window.ys, window.xs, means, self.calibration, settings.contrast)

        with self.timer.stage("accumulate"):
            update_bank(bank, attrs, state.occupied, settings.count_classifier)

        with self.timer.stage("classify"):
            vf = vehicle_scores(attrs, bank.counts, settings.count_classifier)

        with self.timer.stage("zone_step"):
            new_state, record = step_zone(
                zone,
                state,
                frame,
                self._prev_frame,
                vf,
                settings.thresholds,
                settings.movement,
                self.warmup_frames,
            )

        if new_state.occupied != state.occupied and not record.warmup:
            self._log.log_message(
                self.name,
                "INFO",
                frame=frame.t,
                zone=zone.id,
                state="occupied" if new_state.occupied else "empty",
                s=record.s,
                t_high=record.t_high,
            )

        self.states[index] = new_state
        self.last_vf[index] = vf
        return record

    def dump_snapshots(self, directory) -> List[Path]:
        """Write one accumulator snapshot per zone."""
        directory = Path(directory)
        return [dump_bank(bank, directory / f"bank_{bank.zone_id}.vlac") for bank in self.banks]
