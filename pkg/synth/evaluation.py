"""
Interval error rates of an occupancy stream against ground truth.

The sequence is cut into fixed intervals (2 s by default). Per zone and
interval, after dropping warm-up frames:
    false negative: truth shows a vehicle in some frame, occupancy is 0 in all
    false positive: truth is empty in all frames, occupancy is 1 in all
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import pandas as pd

from core.errors import StructuralError


@dataclass(frozen=True)
class EvaluationReport:
    per_zone: pd.DataFrame
    intervals: int
    false_negatives: int
    false_positives: int

    @property
    def errors(self) -> int:
        return self.false_negatives + self.false_positives

    @property
    def error_rate(self) -> float:
        return self.errors / self.intervals if self.intervals else 0.0


def interval_length(fps: float, interval_s: float) -> int:
    frames = int(round(fps * interval_s))
    if frames < 1:
        raise ValueError(f"interval of {interval_s}s at {fps} fps is shorter than one frame")
    return frames


def evaluate_intervals(
    records: pd.DataFrame, truth: pd.DataFrame, fps: float = 25.0, interval_s: float = 2.0
) -> EvaluationReport:
    """
    Args:
        records: occupancy rows with columns frame, zone, occupied, warmup
        truth: rows with columns frame, zone_id, truth
    """
    missing = {"frame", "zone", "occupied"} - set(records.columns)
    if missing:
        raise StructuralError(f"records lack columns {sorted(missing)}")

    truth = truth.rename(columns={"zone_id": "zone"})
    records = records.assign(zone=records["zone"].astype(str))
    truth = truth.assign(zone=truth["zone"].astype(str))
    merged = records.merge(truth[["frame", "zone", "truth"]], on=["frame", "zone"], how="inner")
    if len(merged) != len(records):
        raise StructuralError(f"{len(records) - len(merged)} records have no truth row")

    if "warmup" in merged.columns:
        merged = merged[merged["warmup"] == 0]

    merged = merged.assign(interval=merged["frame"] // interval_length(fps, interval_s))
    grouped = merged.groupby(["zone", "interval"], sort=True)
    per_interval = pd.DataFrame(
        {
            "any_truth": grouped["truth"].max() > 0,
            "never_occupied": grouped["occupied"].max() == 0,
            "always_occupied": grouped["occupied"].min() == 1,
        }
    )
    per_interval["fn"] = per_interval["any_truth"] & per_interval["never_occupied"]
    per_interval["fp"] = ~per_interval["any_truth"] & per_interval["always_occupied"]

    per_zone = per_interval.groupby(level="zone").agg(
        intervals=("fn", "size"), fn=("fn", "sum"), fp=("fp", "sum")
    )
    per_zone["error_rate"] = (per_zone["fn"] + per_zone["fp"]) / per_zone["intervals"]

    return EvaluationReport(
        per_zone=per_zone,
        intervals=int(per_zone["intervals"].sum()),
        false_negatives=int(per_zone["fn"].sum()),
        false_positives=int(per_zone["fp"].sum()),
    )


def evaluate_files(
    records_path: Union[str, Path], truth_path: Union[str, Path], fps: float = 25.0, interval_s: float = 2.0
) -> EvaluationReport:
    records = pd.read_csv(records_path, dtype={"zone": str})
    truth = pd.read_csv(truth_path, dtype={"zone_id": str})
    return evaluate_intervals(records, truth, fps, interval_s)


def combine_reports(reports) -> EvaluationReport:
    """Pool several reports, e.g. over a batch of seeded scenarios."""
    reports = list(reports)
    per_zone = pd.concat([r.per_zone for r in reports], keys=range(len(reports)), names=["run"])
    return EvaluationReport(
        per_zone=per_zone,
        intervals=sum(r.intervals for r in reports),
        false_negatives=sum(r.false_negatives for r in reports),
        false_positives=sum(r.false_positives for r in reports),
    )
