"""
DetectionService: runs the detector over an input frame source.

Features:
- Decodes frames in order and feeds them to DetectorPipeline
- Optional debug overlays per frame and accumulator snapshots at the end
- Writes the occupancy CSV only after the whole stream succeeded
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List

import pandas as pd

from core import AbstractService, Formats, ZoneConfigError
from core.pipeline import DetectorPipeline
from core.zone_detection import OccupancyRecord, count_activations
from utils.config_utils import RunConfig
from utils.frame_io import FrameSource
from utils.overlay import write_overlay
from utils.zone_config import parse_zone_config


@dataclass
class DetectionResult:
    frames: int
    out: Path
    records: pd.DataFrame
    activations: Dict[str, int] = field(default_factory=dict)


def records_to_frame(records: List[OccupancyRecord]) -> pd.DataFrame:
    df = pd.DataFrame([r.as_row() for r in records], columns=list(Formats.RECORD_COLUMNS))
    return df.astype({"frame": "int64", "occupied": "int64", "movement": "int64", "warmup": "int64"})


def write_records_csv(records: pd.DataFrame, path) -> Path:
    """Occupancy CSV: 6 significant digits, LF line endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records.to_csv(path, index=False, float_format=Formats.FLOAT_FORMAT, lineterminator="\n")
    return path


def run_detection(cfg: RunConfig, name: str = "detection") -> DetectionResult:
    """Execute a detection run; see DetectionService for the service wrapper."""
    return DetectionService(cfg, name=name).run()


class DetectionService(AbstractService):
    """
    Service wrapping one detection run.

    Zones are validated against the size of the first frame before any frame
    is processed.
    """

    def __init__(self, config: RunConfig, name: str = "detection"):
        super().__init__(name, config)
        self.settings = config.settings.with_calibration_interval(config.calib_interval)

    def execute(self) -> DetectionResult:
        cfg = self.config
        if not cfg.input or not cfg.out:
            raise ValueError("detection needs --input and --out")

        source = FrameSource(cfg.input)
        width, height = source.peek_size()
        if not cfg.zones:
            raise ZoneConfigError("no zone file given")
        zones = parse_zone_config(cfg.zones, width, height)
        self.log(
            "INFO",
            f"Detecting on {cfg.input} ({width}x{height}), {len(zones)} zones, "
            f"calibration every {self.settings.calibration.interval} frames, "
            f"domain={self.settings.pipeline.attribute_domain}",
        )

        records: List[OccupancyRecord] = []
        frames = 0
        with DetectorPipeline(zones, self.settings, width, height, instrument=cfg.benchmark, name=self.name) as pipeline:
            for frame in source:
                records.extend(pipeline.process(frame))
                if cfg.overlay_dir:
                    write_overlay(frame, zones, pipeline.states, pipeline.last_vf, cfg.overlay_dir)
                frames += 1

            if cfg.snapshot_dir:
                paths = pipeline.dump_snapshots(cfg.snapshot_dir)
                self.log("INFO", f"Wrote {len(paths)} accumulator snapshots to {cfg.snapshot_dir}")

        table = records_to_frame(records)
        out = write_records_csv(table, cfg.out)

        activations = {
            zone.id: count_activations(table.loc[table["zone"] == zone.id, "occupied"].tolist()) for zone in zones
        }
        self.log("INFO", f"Processed {frames} frames, wrote {len(table)} records to {out}")
        for zone_id, pulses in activations.items():
            self.log("INFO", "activations", zone=zone_id, count=pulses)
        return DetectionResult(frames=frames, out=out, records=table, activations=activations)
