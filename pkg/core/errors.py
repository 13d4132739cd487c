"""
Exception hierarchy shared by the detection engine, the synthetic scene tools
and the command-line services.
"""

from typing import Optional


class VloopError(Exception):
    """Base class for all detector errors."""


class FrameDimensionError(VloopError):
    """Frame is too small for the 7x7 attribute neighbourhood or malformed."""


class StructuralError(VloopError):
    """Grid, bank or score arrays do not match the zone they belong to."""


class ZoneConfigError(VloopError):
    """Zone file could not be parsed or a zone violates its invariants."""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        location = ""
        if path is not None:
            location = f"{path}:"
        if line is not None:
            location = f"{location}{line}: "
        elif location:
            location = f"{location} "
        super().__init__(f"{location}{message}")


class FrameDecodeError(VloopError):
    """A frame of the input stream could not be decoded."""

    def __init__(self, message: str, frame_index: int):
        self.frame_index = frame_index
        super().__init__(f"frame {frame_index}: {message}")


class ScenarioError(VloopError):
    """Synthetic scenario description is invalid."""
