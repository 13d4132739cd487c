"""
Debug overlays: a PGM copy of the frame with zone boundaries and marked
vehicle-feature pixels.
"""

from pathlib import Path
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from core.constants import Formats
from core.frame_model import Frame
from core.zone_detection import DetectionZone, ZoneState

from .frame_io import write_pgm

BOUNDARY_OCCUPIED = 255
BOUNDARY_EMPTY = 128
FEATURE_MARK = 0
FEATURE_THRESHOLD = 2.5


def bresenham(x0: int, y0: int, x1: int, y1: int) -> Iterator[Tuple[int, int]]:
    """Integer points of the segment (x0, y0) -> (x1, y1), both ends included."""
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        yield x0, y0
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def render_overlay(
    frame: Frame,
    zones: Sequence[DetectionZone],
    states: Sequence[ZoneState],
    scores: Sequence[Optional[np.ndarray]],
) -> np.ndarray:
    """
    Args:
        scores: per zone, vf of shape (N, 5) or None before the first frame
    """
    image = frame.data.copy()
    height, width = image.shape

    for zone, vf in zip(zones, scores):
        if vf is None:
            continue
        marked = vf.sum(axis=1) > FEATURE_THRESHOLD
        image[zone.ys[marked], zone.xs[marked]] = FEATURE_MARK

    for zone, state in zip(zones, states):
        value = BOUNDARY_OCCUPIED if state.occupied else BOUNDARY_EMPTY
        vertices = zone.polygon
        for i, (x0, y0) in enumerate(vertices):
            x1, y1 = vertices[(i + 1) % len(vertices)]
            for x, y in bresenham(x0, y0, x1, y1):
                # vertices may sit on the far frame edge
                image[min(y, height - 1), min(x, width - 1)] = value
    return image


def write_overlay(
    frame: Frame,
    zones: Sequence[DetectionZone],
    states: Sequence[ZoneState],
    scores: Sequence[Optional[np.ndarray]],
    directory: Union[str, Path],
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return write_pgm(directory / (Formats.OVERLAY_PATTERN % frame.t), render_overlay(frame, zones, states, scores))
