"""
Feature memory: accumulator banks of attribute occurrences and the
vehicle / background / unknown feature classification built on them.

Each zone owns one AccumulatorBank holding a signed count per
(zone pixel, attribute, term). Counts start at zero, move by 2*mu - 1 per
frame and saturate at +/- a_max. Strongly negative counts mark rarely seen
attribute values (vehicle features), strongly positive ones the background.
"""

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .constants import Attributes, Formats, Terms
from .errors import StructuralError

Number = Union[float, np.ndarray]


class CountClassifierConfig(BaseModel):
    """Shape of the negative / low / positive count sets and the clamp bound."""

    model_config = ConfigDict(frozen=True)

    n_full: float = Field(50.0, description="Count magnitude of full negative/positive membership")
    n_zero: float = Field(10.0, description="Half-width of the low plateau")
    a_max: float = Field(1000.0, description="Accumulator clamp bound")
    freeze_threshold: float = Field(0.5, description="mu_low above which occupied zones freeze")

    @model_validator(mode="after")
    def _check_order(self):
        if not (0 < self.n_zero < self.n_full):
            raise ValueError("require 0 < n_zero < n_full")
        if self.a_max <= 0:
            raise ValueError("a_max must be positive")
        return self


class CountMemberships(NamedTuple):
    mu_neg: Number
    mu_low: Number
    mu_pos: Number


class FeatureClassScores(NamedTuple):
    """Vehicle, background and unknown feature degrees (scalars or arrays)."""

    vf: Number
    bf: Number
    uf: Number


def classify_count(count: Number, cfg: CountClassifierConfig = None) -> CountMemberships:
    cfg = cfg or CountClassifierConfig()
    width = cfg.n_full - cfg.n_zero
    mu_neg = np.clip((-count - cfg.n_zero) / width, 0.0, 1.0)
    mu_pos = np.clip((count - cfg.n_zero) / width, 0.0, 1.0)
    mu_low = 1.0 - mu_neg - mu_pos
    if np.ndim(mu_neg) == 0:
        return CountMemberships(float(mu_neg), float(mu_low), float(mu_pos))
    return CountMemberships(mu_neg, mu_low, mu_pos)


def update_accumulator(prev: Number, mu: Number, a_max: float = 1000.0) -> Number:
    """Accumulator update 2*mu - 1, clamped to [-a_max, a_max]; a_max=None disables the clamp."""
    updated = prev + 2.0 * mu - 1.0
    if a_max is None:
        return updated
    clamped = np.clip(updated, -a_max, a_max)
    return float(clamped) if np.ndim(clamped) == 0 else clamped


@dataclass
class AccumulatorBank:
    """
    Accumulators of one zone.

    counts has shape (N, 5, 3) for the N zone pixels. ys/xs locate the pixels
    in the frame and are needed only for snapshots.
    """

    zone_id: str
    counts: np.ndarray
    ys: np.ndarray
    xs: np.ndarray
    a_max: float = 1000.0

    @classmethod
    def zeros(cls, zone_id: str, ys: np.ndarray, xs: np.ndarray, a_max: float = 1000.0):
        counts = np.zeros((len(ys), Attributes.COUNT, Terms.COUNT), dtype=np.float64)
        return cls(zone_id=zone_id, counts=counts, ys=np.asarray(ys), xs=np.asarray(xs), a_max=a_max)

    @property
    def pixel_count(self) -> int:
        return self.counts.shape[0]

    def copy(self) -> "AccumulatorBank":
        return AccumulatorBank(self.zone_id, self.counts.copy(), self.ys, self.xs, self.a_max)


def update_bank(
    bank: AccumulatorBank,
    attrs: np.ndarray,
    zone_occupied: bool,
    cfg: CountClassifierConfig = None,
) -> AccumulatorBank:
    """
    Apply one frame of memberships to a bank, in place.

    In an occupied zone an accumulator moves only while its count is not low
    (mu_low <= freeze_threshold); low counts are carried over unchanged.
    """
    cfg = cfg or CountClassifierConfig()
    if attrs.shape != bank.counts.shape:
        raise StructuralError(
            f"zone {bank.zone_id}: attribute grid {attrs.shape} does not match bank {bank.counts.shape}"
        )

    # (count + 2*mu) - 1 in one scratch buffer
    updated = np.multiply(attrs, 2.0)
    np.add(bank.counts, updated, out=updated)
    np.subtract(updated, 1.0, out=updated)
    np.clip(updated, -bank.a_max, bank.a_max, out=updated)
    if zone_occupied:
        mu_low = classify_count(bank.counts, cfg).mu_low
        np.copyto(updated, bank.counts, where=mu_low > cfg.freeze_threshold)
    bank.counts = updated
    return bank


def classify_feature(
    attr_triple, counts, cfg: CountClassifierConfig = None
) -> FeatureClassScores:
    """Max-product classification of one attribute value against its three counts."""
    cfg = cfg or CountClassifierConfig()
    mu = np.asarray(attr_triple, dtype=np.float64)
    memberships = classify_count(np.asarray(counts, dtype=np.float64), cfg)
    vf = float(np.max(memberships.mu_neg * mu))
    bf = float(np.max(memberships.mu_pos * mu))
    uf = float(np.max(memberships.mu_low * mu))
    return FeatureClassScores(vf, bf, uf)


def classify_features(
    attrs: np.ndarray, counts: np.ndarray, cfg: CountClassifierConfig
) -> FeatureClassScores:
    """
    Vectorized classify_feature over a bank.

    Args:
        attrs: memberships, shape (N, 5, 3)
        counts: accumulator counts, shape (N, 5, 3)

    Returns:
        FeatureClassScores of arrays with shape (N, 5)
    """
    if attrs.shape != counts.shape:
        raise StructuralError(f"attribute grid {attrs.shape} does not match counts {counts.shape}")
    memberships = classify_count(counts, cfg)
    vf = _max_term(memberships.mu_neg * attrs)
    bf = _max_term(memberships.mu_pos * attrs)
    uf = _max_term(memberships.mu_low * attrs)
    return FeatureClassScores(vf, bf, uf)


def _max_term(products: np.ndarray) -> np.ndarray:
    # elementwise over the three terms; a reduction over a length-3 axis is slow
    return np.maximum(np.maximum(products[..., 0], products[..., 1]), products[..., 2])


def vehicle_scores(attrs: np.ndarray, counts: np.ndarray, cfg: CountClassifierConfig) -> np.ndarray:
    """
    Only the vf part of classify_features, shape (N, 5).

    Evaluated in a single scratch buffer with the same operation order as
    classify_count, so the values are identical.
    """
    if attrs.shape != counts.shape:
        raise StructuralError(f"attribute grid {attrs.shape} does not match counts {counts.shape}")
    width = cfg.n_full - cfg.n_zero
    scratch = np.negative(counts)
    np.subtract(scratch, cfg.n_zero, out=scratch)
    np.divide(scratch, width, out=scratch)
    np.clip(scratch, 0.0, 1.0, out=scratch)
    np.multiply(scratch, attrs, out=scratch)
    return _max_term(scratch)


# ===================== Snapshots =====================


def _bounding_box(bank: AccumulatorBank) -> Tuple[int, int, int, int]:
    y0, x0 = int(bank.ys.min()), int(bank.xs.min())
    y1, x1 = int(bank.ys.max()) + 1, int(bank.xs.max()) + 1
    return y0, y1, x0, x1


def dump_bank(bank: AccumulatorBank, path: Union[str, Path]) -> Path:
    """
    Write a bank snapshot.

    Layout: 16-byte header (magic b"VLAC", uint32 width, uint32 height,
    uint32 planes) followed by float32 little-endian counts of shape
    (height, width, planes) over the zone bounding box; pixels outside the
    zone are written as 0.
    """
    path = Path(path)
    y0, y1, x0, x1 = _bounding_box(bank)
    height, width = y1 - y0, x1 - x0
    planes = Attributes.COUNT * Terms.COUNT

    grid = np.zeros((height, width, planes), dtype="<f4")
    grid[bank.ys - y0, bank.xs - x0] = bank.counts.reshape(len(bank.ys), planes)

    header = Formats.SNAPSHOT_MAGIC + struct.pack("<III", width, height, planes)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(header + grid.tobytes(order="C"))
    return path


def load_bank(path: Union[str, Path]) -> np.ndarray:
    """Read a snapshot back as an array of shape (height, width, 5, 3)."""
    raw = Path(path).read_bytes()
    if raw[:4] != Formats.SNAPSHOT_MAGIC:
        raise StructuralError(f"{path}: not an accumulator snapshot")
    width, height, planes = struct.unpack("<III", raw[4 : Formats.SNAPSHOT_HEADER_SIZE])
    body = np.frombuffer(raw, dtype="<f4", offset=Formats.SNAPSHOT_HEADER_SIZE)
    if body.size != width * height * planes:
        raise StructuralError(f"{path}: truncated snapshot")
    return body.reshape(height, width, Attributes.COUNT, planes // Attributes.COUNT)
