"""
Frame input/output: binary PGM (P5, maxval 255) files and raw 8-bit streams.

Input sources:
    dir/frame_%06d.pgm   numbered files, starting at index 0 or 1
    dir/                 every *.pgm of a directory in name order
    dir/*.pgm            a glob pattern
    raw:path:WxH         concatenated width*height byte frames
"""

import glob
import re
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from core.constants import Formats
from core.errors import FrameDecodeError, FrameDimensionError
from core.frame_model import Frame

_RAW_PATTERN = re.compile(r"^raw:(?P<path>.+):(?P<width>\d+)x(?P<height>\d+)$")


def parse_size(size: str) -> Tuple[int, int]:
    """'768x512' -> (768, 512)"""
    match = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", str(size))
    if not match:
        raise ValueError(f"size must look like WIDTHxHEIGHT, got '{size}'")
    return int(match.group(1)), int(match.group(2))


def _header_tokens(raw: bytes, count: int) -> Tuple[List[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping # comments."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(raw):
            raise ValueError("truncated header")
        if raw[pos : pos + 1] == b"#":
            end = raw.find(b"\n", pos)
            pos = len(raw) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace() and raw[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(raw[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def decode_pgm(raw: bytes) -> np.ndarray:
    """Decode a binary P5 image with maxval 255 into a (height, width) uint8 array."""
    tokens, offset = _header_tokens(raw, 4)
    magic, width, height, maxval = tokens
    if magic != Formats.PGM_MAGIC:
        raise ValueError(f"not a binary PGM (magic {magic!r})")
    try:
        width, height, maxval = int(width), int(height), int(maxval)
    except ValueError:
        raise ValueError("non-numeric header field")
    if maxval != Formats.PGM_MAXVAL:
        raise ValueError(f"unsupported maxval {maxval}")
    if width <= 0 or height <= 0:
        raise ValueError(f"invalid size {width}x{height}")

    body = raw[offset : offset + width * height]
    if len(body) != width * height:
        raise ValueError(f"raster truncated: {len(body)} of {width * height} bytes")
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width).copy()


def encode_pgm(data: np.ndarray) -> bytes:
    height, width = data.shape
    header = f"P5\n{width} {height}\n{Formats.PGM_MAXVAL}\n".encode("ascii")
    return header + np.ascontiguousarray(data, dtype=np.uint8).tobytes()


def write_pgm(path: Union[str, Path], data: np.ndarray) -> Path:
    path = Path(path)
    path.write_bytes(encode_pgm(data))
    return path


def read_pgm(path: Union[str, Path]) -> np.ndarray:
    return decode_pgm(Path(path).read_bytes())


class FrameSource:
    """Iterates the frames of an input source in order, t = 0, 1, ..."""

    def __init__(self, spec: str):
        self.spec = str(spec)
        self._raw = _RAW_PATTERN.match(self.spec)
        self._size: Optional[Tuple[int, int]] = None

    def _files(self) -> Iterator[Path]:
        spec = self.spec
        if "%" in spec:
            index = 0 if Path(spec % 0).exists() else 1
            while True:
                path = Path(spec % index)
                if not path.exists():
                    return
                yield path
                index += 1
        elif any(ch in spec for ch in "*?["):
            for name in sorted(glob.glob(spec)):
                yield Path(name)
        else:
            directory = Path(spec)
            if directory.is_dir():
                yield from sorted(directory.glob("*.pgm"))
            elif directory.is_file():
                yield directory

    def _decode_file(self, path: Path, index: int) -> np.ndarray:
        try:
            return read_pgm(path)
        except OSError as e:
            raise FrameDecodeError(f"cannot read {path}: {e.strerror or e}", index)
        except ValueError as e:
            raise FrameDecodeError(f"{path}: {e}", index)

    def _raw_frames(self) -> Iterator[np.ndarray]:
        path = Path(self._raw.group("path"))
        width, height = int(self._raw.group("width")), int(self._raw.group("height"))
        frame_bytes = width * height
        if frame_bytes == 0:
            raise FrameDecodeError("raw frame size is zero", 0)
        try:
            handle = path.open("rb")
        except OSError as e:
            raise FrameDecodeError(f"cannot open {path}: {e.strerror or e}", 0)
        with handle:
            index = 0
            while True:
                chunk = handle.read(frame_bytes)
                if not chunk:
                    return
                if len(chunk) != frame_bytes:
                    raise FrameDecodeError(
                        f"raw stream ends inside a frame ({len(chunk)} of {frame_bytes} bytes)", index
                    )
                yield np.frombuffer(chunk, dtype=np.uint8).reshape(height, width).copy()
                index += 1

    def _arrays(self) -> Iterator[np.ndarray]:
        if self._raw:
            yield from self._raw_frames()
            return
        for index, path in enumerate(self._files()):
            yield self._decode_file(path, index)

    def __iter__(self) -> Iterator[Frame]:
        size = None
        count = 0
        for index, data in enumerate(self._arrays()):
            if size is None:
                size = data.shape
            elif data.shape != size:
                raise FrameDecodeError(
                    f"size {data.shape[1]}x{data.shape[0]} differs from first frame {size[1]}x{size[0]}",
                    index,
                )
            try:
                frame = Frame(data=data, t=index)
            except FrameDimensionError as exc:
                raise FrameDecodeError(str(exc), index) from exc
            count += 1
            yield frame
        if count == 0:
            raise FrameDecodeError(f"no frames found for input '{self.spec}'", 0)

    def peek_size(self) -> Tuple[int, int]:
        """(width, height) of the first frame."""
        if self._size is None:
            if self._raw:
                self._size = int(self._raw.group("width")), int(self._raw.group("height"))
            else:
                first = next(iter(self._arrays()), None)
                if first is None:
                    raise FrameDecodeError(f"no frames found for input '{self.spec}'", 0)
                self._size = first.shape[1], first.shape[0]
        return self._size


def write_sequence(directory: Union[str, Path], frames, pattern: str = Formats.FRAME_PATTERN) -> List[Path]:
    """Write frames as numbered PGM files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [write_pgm(directory / (pattern % frame.t), frame.data) for frame in frames]
