"""
Constants for attribute layout, output formats and exit statuses.
"""


class Attributes:
    """Attribute set evaluated per pixel, in storage order."""

    C = 0
    UR = 1
    UL = 2
    LL = 3
    LR = 4

    NAMES = ("C", "UR", "UL", "LL", "LR")
    COUNT = 5

    # (dx, dy) of the reference region for each contrast attribute; y grows downward
    CONTRAST_OFFSETS = {
        UR: (2, -2),
        UL: (-2, -2),
        LL: (-2, 2),
        LR: (2, 2),
    }


class Terms:
    """Linguistic terms, three per attribute."""

    COLOR = ("black", "grey", "white")
    CONTRAST = ("darker", "similar", "brighter")
    COUNT = 3


class Formats:
    """File format constants."""

    PGM_MAGIC = b"P5"
    PGM_MAXVAL = 255
    FRAME_PATTERN = "frame_%06d.pgm"
    OVERLAY_PATTERN = "overlay_%06d.pgm"
    TRUTH_FILE = "truth.csv"
    ZONES_FILE = "zones.json"

    SNAPSHOT_MAGIC = b"VLAC"
    SNAPSHOT_HEADER_SIZE = 16

    RECORD_COLUMNS = ("frame", "zone", "occupied", "s", "t_high", "t_low", "movement", "warmup")
    TRUTH_COLUMNS = ("frame", "zone_id", "truth")
    FLOAT_FORMAT = "%.6g"


class ExitCodes:
    """Process exit statuses of the command-line services."""

    OK = 0
    CONFIG_ERROR = 2
    DECODE_ERROR = 3
    IO_ERROR = 4

    @classmethod
    def get_all_codes(cls):
        """Get all configured exit statuses."""
        return {
            "OK": cls.OK,
            "CONFIG_ERROR": cls.CONFIG_ERROR,
            "DECODE_ERROR": cls.DECODE_ERROR,
            "IO_ERROR": cls.IO_ERROR,
        }
