"""
BenchmarkService: throughput of the detector on preloaded frames.

Frames are rendered (or decoded) before the clock starts, so the figure
excludes file I/O. The timed loop is the same DetectorPipeline.process used
by detection, with the stage timer switched on.
"""

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from core import AbstractService
from core.pipeline import DetectorPipeline, StageTimer
from synth.scene_synth import benchmark_scenario, generate_sequence
from utils.config_utils import RunConfig
from utils.frame_io import FrameSource, parse_size
from utils.zone_config import parse_zone_config


@dataclass
class BenchmarkReport:
    frames: int
    width: int
    height: int
    zones: int
    zone_pixels: int
    records: int
    elapsed_s: float
    fps: float
    stages: Dict[str, float] = field(default_factory=dict)


def run_benchmark(cfg: RunConfig, frames: Optional[int] = None, size: Optional[str] = None) -> BenchmarkReport:
    return BenchmarkService(cfg, frames=frames, size=size).run()


class BenchmarkService(AbstractService):
    """Times the pipeline over a synthetic or supplied sequence."""

    def __init__(self, config: RunConfig, frames: Optional[int] = None, size: Optional[str] = None):
        super().__init__("benchmark", config)
        bench = config.settings.benchmark
        self.frame_count = int(frames) if frames is not None else bench.frames
        if size is not None:
            self.width, self.height = parse_size(size)
        else:
            self.width, self.height = bench.width, bench.height

    def _load(self):
        cfg = self.config
        bench = cfg.settings.benchmark
        if cfg.input:
            source = FrameSource(cfg.input)
            frames = []
            for frame in source:
                frames.append(frame)
                if len(frames) == self.frame_count:
                    break
            width, height = frames[0].width, frames[0].height
            zones = None
        else:
            spec = benchmark_scenario(
                width=self.width,
                height=self.height,
                frames=self.frame_count,
                zone_count=bench.zone_count,
                zone_size=bench.zone_size,
                seed=bench.seed,
            )
            frames, _ = generate_sequence(spec)
            width, height = spec.width, spec.height
            zones = [z.to_zone(width, height) for z in spec.zones]

        if cfg.zones:
            zones = parse_zone_config(cfg.zones, width, height)
        if not zones:
            raise ValueError("benchmark on supplied frames needs --zones")
        return frames, zones, width, height

    def execute(self) -> BenchmarkReport:
        settings = self.config.settings.with_calibration_interval(self.config.calib_interval)
        frames, zones, width, height = self._load()
        self.log("INFO", f"Benchmark: {len(frames)} preloaded {width}x{height} frames, {len(zones)} zones")

        records: List = []
        with DetectorPipeline(zones, settings, width, height, instrument=True, name=self.name) as pipeline:
            start = time.perf_counter()
            for frame in frames:
                records.extend(pipeline.process(frame))
            elapsed = time.perf_counter() - start
            stages = pipeline.timer.per_frame_us(len(frames))

        report = BenchmarkReport(
            frames=len(frames),
            width=width,
            height=height,
            zones=len(zones),
            zone_pixels=sum(z.pixel_count for z in zones),
            records=len(records),
            elapsed_s=elapsed,
            fps=len(frames) / elapsed if elapsed > 0 else float("inf"),
            stages={name: stages[name] for name in StageTimer.STAGES},
        )
        self.log("INFO", f"Benchmark: {report.fps:.1f} fps over {report.frames} frames ({report.elapsed_s:.3f} s)")
        for name, micros in report.stages.items():
            self.log("DEBUG", "stage timing", stage=name, us_per_frame=micros)
        return report
