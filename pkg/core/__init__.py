"""
Core detection engine: frames, linguistic attributes, feature memory and
zone occupancy.
"""

from .base import AbstractService
from .constants import Attributes, ExitCodes, Formats, Terms
from .errors import (
    FrameDecodeError,
    FrameDimensionError,
    ScenarioError,
    StructuralError,
    VloopError,
    ZoneConfigError,
)
from .frame_model import Frame, MeanImage, ColorCalibration, compute_mean_image, calibrate_color
from .zone_detection import DetectionZone, OccupancyRecord, ZoneState
from .pipeline import DetectorPipeline, StageTimer

__all__ = [
    'AbstractService',
    'Attributes',
    'ExitCodes',
    'Formats',
    'Terms',
    'FrameDecodeError',
    'FrameDimensionError',
    'ScenarioError',
    'StructuralError',
    'VloopError',
    'ZoneConfigError',
    'Frame',
    'MeanImage',
    'ColorCalibration',
    'compute_mean_image',
    'calibrate_color',
    'DetectionZone',
    'OccupancyRecord',
    'ZoneState',
    'DetectorPipeline',
    'StageTimer',
]
