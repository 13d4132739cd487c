"""
Zone file parsing.

A zone file is UTF-8 JSON: a top-level list of objects
    {"id": "D1", "polygon": [[x, y], ...], "p_d": 0.2}
Every error message carries the line of the offending zone object.
"""

import json
from pathlib import Path
from typing import List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, ValidationError

from core.errors import ZoneConfigError
from core.zone_detection import DetectionZone


class ZoneSpec(BaseModel):
    """One zone object as written in a zone file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    id: StrictStr
    polygon: List[Tuple[StrictInt, StrictInt]] = Field(..., min_length=3)
    p_d: float = Field(0.2, strict=True)

    def to_zone(self, width: int, height: int) -> DetectionZone:
        return DetectionZone.from_polygon(self.id, self.polygon, width, height, self.p_d)

    @classmethod
    def rectangle(cls, zone_id: str, x: int, y: int, width: int, height: int, p_d: float = 0.2) -> "ZoneSpec":
        polygon = [(x, y), (x + width, y), (x + width, y + height), (x, y + height)]
        return cls(id=zone_id, polygon=polygon, p_d=p_d)


def _element_lines(text: str) -> List[int]:
    """1-based line of each top-level array element of a valid JSON document."""
    decoder = json.JSONDecoder()
    idx = text.index("[") + 1
    lines = []

    def skip(i: int) -> int:
        while i < len(text) and text[i] in " \t\r\n":
            i += 1
        return i

    idx = skip(idx)
    if idx < len(text) and text[idx] == "]":
        return lines
    while True:
        idx = skip(idx)
        lines.append(text.count("\n", 0, idx) + 1)
        _, idx = decoder.raw_decode(text, idx)
        idx = skip(idx)
        if text[idx] == "]":
            return lines
        idx += 1  # comma


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}" if location else first["msg"]


def load_zone_specs(path: Union[str, Path]) -> List[Tuple[int, ZoneSpec]]:
    """Parse a zone file into (line, ZoneSpec) pairs without rasterising."""
    path = Path(path)
    if not path.is_file():
        raise ZoneConfigError("zone file not found", path=str(path))

    try:
        text = path.read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as e:
        raise ZoneConfigError(f"cannot read zone file: {e}", path=str(path))

    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ZoneConfigError(f"malformed JSON: {e.msg}", line=e.lineno, path=str(path))

    if not isinstance(document, list):
        raise ZoneConfigError("top level must be a list of zone objects", line=1, path=str(path))
    if not document:
        raise ZoneConfigError("zone list is empty", line=1, path=str(path))

    specs = []
    seen = {}
    for line, item in zip(_element_lines(text), document):
        if not isinstance(item, dict):
            raise ZoneConfigError("zone entry must be an object", line=line, path=str(path))
        try:
            spec = ZoneSpec(**item)
        except ValidationError as e:
            raise ZoneConfigError(f"invalid zone: {_describe(e)}", line=line, path=str(path))
        if spec.id in seen:
            raise ZoneConfigError(
                f"duplicate zone id '{spec.id}' (first defined on line {seen[spec.id]})",
                line=line,
                path=str(path),
            )
        seen[spec.id] = line
        specs.append((line, spec))
    return specs


def parse_zone_config(path: Union[str, Path], width: int, height: int) -> List[DetectionZone]:
    """
    Parse, validate and rasterise the zones of a zone file.

    Raises:
        ZoneConfigError: malformed syntax, bad field, out-of-bounds vertex,
            self-intersecting polygon or empty zone, with the zone's line
    """
    zones = []
    for line, spec in load_zone_specs(path):
        try:
            zones.append(spec.to_zone(width, height))
        except ZoneConfigError as e:
            raise ZoneConfigError(str(e), line=line, path=str(path))
    return zones


def dump_zone_specs(specs: List[ZoneSpec], path: Union[str, Path]) -> Path:
    """Write zone specs in the zone file format, one object per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = ",\n".join("  " + json.dumps(spec.model_dump()) for spec in specs)
    path.write_text(f"[\n{body}\n]\n", encoding="utf-8")
    return path
