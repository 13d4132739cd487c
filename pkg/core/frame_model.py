"""
Frame model: greyscale frames, 3x3 mean images and histogram calibration of
the colour linguistic variable.

Design decisions:
- Frames are immutable wrappers around a (height, width) uint8 array
- Borders are replicate-padded, so every pixel has a full 3x3 window
- Box sums come from an integer summed-area table, so means are exact sums / 9
- Breakpoints b0..w2 are fixed histogram percentiles, separated by a minimum gap
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import FrameDimensionError

MIN_FRAME_SIDE = 7
HISTOGRAM_BINS = 256


class CalibrationConfig(BaseModel):
    """Colour calibration settings."""

    model_config = ConfigDict(frozen=True)

    interval: int = Field(25, ge=1, description="Frames between histogram calibrations")
    percentiles: Tuple[float, float, float, float] = Field(
        (10.0, 30.0, 70.0, 90.0), description="Percentiles for b0, b1, w1, w2"
    )
    # b0..w2 need four separations between 0 and 255
    min_separation: float = Field(5.0, gt=0, le=255.0 / 4, description="Minimum gap between breakpoints")

    @field_validator("percentiles")
    @classmethod
    def _check_percentiles(cls, value):
        if any(p < 0 or p > 100 for p in value) or list(value) != sorted(value):
            raise ValueError("percentiles must be non-decreasing values in [0, 100]")
        return value


@dataclass(frozen=True)
class Frame:
    """One 8-bit greyscale image of the sequence."""

    data: np.ndarray
    t: int = 0

    def __post_init__(self):
        data = self.data
        if not isinstance(data, np.ndarray) or data.ndim != 2:
            raise FrameDimensionError("frame data must be a 2-D array")
        height, width = data.shape
        if width < MIN_FRAME_SIDE or height < MIN_FRAME_SIDE:
            raise FrameDimensionError(
                f"frame {width}x{height} is smaller than {MIN_FRAME_SIDE}x{MIN_FRAME_SIDE}"
            )
        if data.dtype != np.uint8:
            if data.size and (data.min() < 0 or data.max() > 255):
                raise FrameDimensionError("frame intensities must lie in [0, 255]")
            object.__setattr__(self, "data", data.astype(np.uint8))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def size(self) -> Tuple[int, int]:
        return self.width, self.height


@dataclass(frozen=True)
class MeanImage:
    """Per-pixel 3x3 box means of a frame, kept as reals."""

    data: np.ndarray
    t: int = 0

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class ColorCalibration:
    """Breakpoints of the black/grey/white trapezoids."""

    b0: float
    b1: float
    w1: float
    w2: float

    def __post_init__(self):
        if not (0.0 <= self.b0 < self.b1 <= self.w1 < self.w2 <= 255.0):
            raise ValueError(
                f"invalid colour calibration b0={self.b0} b1={self.b1} w1={self.w1} w2={self.w2}"
            )

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return self.b0, self.b1, self.w1, self.w2


def _box_sums(padded: np.ndarray) -> np.ndarray:
    """3x3 window sums of a replicate-padded array, read from a summed-area table."""
    height, width = padded.shape[0] - 2, padded.shape[1] - 2
    # int32 is exact while the table total stays below 2**31
    dtype = np.int32 if padded.size * 255 < 2**31 else np.int64
    sat = np.zeros((height + 3, width + 3), dtype=dtype)
    np.cumsum(padded, axis=0, dtype=dtype, out=sat[1:, 1:])
    np.cumsum(sat[1:, 1:], axis=1, out=sat[1:, 1:])
    return sat[3:, 3:] - sat[:-3, 3:] - sat[3:, :-3] + sat[:-3, :-3]


def compute_mean_image(frame: Frame) -> MeanImage:
    """
    Compute the 3x3 mean image of a frame.

    The frame is replicate-padded by one pixel and box sums are read from an
    integer summed-area table, so each mean equals the exact integer sum / 9.
    """
    data = frame.data
    height, width = data.shape
    if width < MIN_FRAME_SIDE or height < MIN_FRAME_SIDE:
        raise FrameDimensionError(f"frame {width}x{height} is too small")

    sums = _box_sums(np.pad(data, 1, mode="edge"))
    return MeanImage(data=sums / 9.0, t=frame.t)


def compute_mean_window(frame: Frame, y0: int, y1: int, x0: int, x1: int) -> MeanImage:
    """
    Means of rows y0..y1-1 and columns x0..x1-1 only.

    Windows touching the frame border are padded from the border pixels, so
    every value equals the same pixel of compute_mean_image(frame).
    """
    data = frame.data
    height, width = data.shape
    if not (0 <= y0 < y1 <= height and 0 <= x0 < x1 <= width):
        raise FrameDimensionError(f"window [{y0}:{y1}, {x0}:{x1}] outside frame {width}x{height}")
    rows = np.clip(np.arange(y0 - 1, y1 + 1), 0, height - 1)
    cols = np.clip(np.arange(x0 - 1, x1 + 1), 0, width - 1)
    return MeanImage(data=_box_sums(data[np.ix_(rows, cols)]) / 9.0, t=frame.t)


def histogram_percentiles(values: np.ndarray, percentiles: Sequence[float]) -> Tuple[int, ...]:
    """
    Percentiles of values over a 256-bin integer histogram.

    Values are rounded half-up to the nearest bin; the p-th percentile is the
    smallest bin whose cumulative count reaches p% of all values.
    """
    bins = np.floor(values.ravel() + 0.5).astype(np.int64)
    np.clip(bins, 0, HISTOGRAM_BINS - 1, out=bins)
    histogram = np.bincount(bins, minlength=HISTOGRAM_BINS)
    cumulative = np.cumsum(histogram)
    total = cumulative[-1]

    result = []
    for p in percentiles:
        target = p / 100.0 * total
        index = int(np.searchsorted(cumulative, target, side="left"))
        result.append(min(index, HISTOGRAM_BINS - 1))
    return tuple(result)


def separate_breakpoints(
    b0: float, b1: float, w1: float, w2: float, separation: float
) -> Tuple[float, float, float, float]:
    """
    Enforce the minimum gap between breakpoints.

    A collapsed grey plateau (w1 - b1 < separation) is re-centred to
    mid +/- separation; then b0 is pushed down and w2 up so the outer ramps
    are at least one separation wide. Everything stays inside [0, 255].
    """
    b0, b1, w1, w2 = float(b0), float(b1), float(w1), float(w2)
    if w1 - b1 < separation:
        mid = (b1 + w1) / 2.0
        mid = min(max(mid, 2.0 * separation), 255.0 - 2.0 * separation)
        b1 = mid - separation
        w1 = mid + separation
    b1 = max(b1, separation)
    w1 = min(w1, 255.0 - separation)
    b0 = min(max(min(b0, b1 - separation), 0.0), 255.0)
    w2 = min(max(max(w2, w1 + separation), 0.0), 255.0)
    return b0, b1, w1, w2


def calibrate_color(mean_image: MeanImage, cfg: CalibrationConfig = None) -> ColorCalibration:
    """Derive b0, b1, w1, w2 from the mean-image histogram."""
    cfg = cfg or CalibrationConfig()
    raw = histogram_percentiles(mean_image.data, cfg.percentiles)
    return ColorCalibration(*separate_breakpoints(*raw, separation=cfg.min_separation))
