import json

import pytest

from core.errors import ZoneConfigError
from utils.zone_config import ZoneSpec, dump_zone_specs, load_zone_specs, parse_zone_config

VALID = """[
  {"id": "D1", "polygon": [[16, 96], [80, 96], [80, 160], [16, 160]], "p_d": 0.2},
  {"id": "D2",
   "polygon": [[0, 0], [40, 0], [0, 40]],
   "p_d": 0.5}
]
"""


def _write(tmp_path, text, name="zones.json"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def _error(tmp_path, text, width=96, height=192):
    with pytest.raises(ZoneConfigError) as info:
        parse_zone_config(_write(tmp_path, text), width, height)
    return info.value


def test_valid_file(tmp_path):
    zones = parse_zone_config(_write(tmp_path, VALID), 96, 192)
    assert [z.id for z in zones] == ["D1", "D2"]
    assert zones[0].pixel_count == 64 * 64
    assert zones[1].p_d == 0.5


def test_entry_lines(tmp_path):
    specs = load_zone_specs(_write(tmp_path, VALID))
    assert [line for line, _ in specs] == [2, 3]


def test_p_d_defaults(tmp_path):
    zones = parse_zone_config(_write(tmp_path, '[{"id": "Z", "polygon": [[0,0],[8,0],[8,8]]}]'), 16, 16)
    assert zones[0].p_d == 0.2


def test_overlapping_zones_are_independent(tmp_path):
    text = json.dumps(
        [
            {"id": "A", "polygon": [[0, 0], [10, 0], [10, 10], [0, 10]]},
            {"id": "B", "polygon": [[5, 5], [15, 5], [15, 15], [5, 15]]},
        ]
    )
    a, b = parse_zone_config(_write(tmp_path, text), 16, 16)
    assert a.pixel_count == b.pixel_count == 100


def test_p_d_above_one_names_the_line(tmp_path):
    text = VALID.replace('"p_d": 0.5', '"p_d": 1.5')
    error = _error(tmp_path, text)
    assert error.line == 3
    assert ":3: " in str(error)


def test_vertex_outside_frame_names_the_line(tmp_path):
    text = VALID.replace("[80, 160]", "[80, 400]")
    error = _error(tmp_path, text)
    assert error.line == 2


def test_self_intersection_names_the_line(tmp_path):
    text = '[\n\n  {"id": "X", "polygon": [[0,0],[8,8],[8,0],[0,8]]}\n]'
    assert _error(tmp_path, text).line == 3


def test_malformed_json_reports_parser_line(tmp_path):
    error = _error(tmp_path, '[\n  {"id": "D1",\n  "polygon": [[0,0],[8,0],[8,8]],,\n}]')
    assert error.line == 3
    assert "malformed JSON" in str(error)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"id": "D1"}', "top level"),
        ("[]", "empty"),
        ('[["D1"]]', "must be an object"),
        ('[{"id": "D1", "polygon": [[0,0],[8,0]]}]', "polygon"),
        ('[{"id": 1, "polygon": [[0,0],[8,0],[8,8]]}]', "id"),
        ('[{"id": "D1", "polygon": [[0,0],[8,0],[8,8]], "colour": 3}]', "colour"),
        ('[{"id": "D1", "polygon": [[0,0],[8.5,0],[8,8]]}]', "polygon"),
    ],
)
def test_invalid_entries(tmp_path, text, fragment):
    error = _error(tmp_path, text)
    assert fragment in str(error)


def test_duplicate_ids(tmp_path):
    text = '[\n{"id": "D1", "polygon": [[0,0],[8,0],[8,8]]},\n{"id": "D1", "polygon": [[0,0],[9,0],[9,9]]}\n]'
    error = _error(tmp_path, text)
    assert error.line == 3
    assert "line 2" in str(error)


def test_missing_file(tmp_path):
    with pytest.raises(ZoneConfigError, match="not found"):
        parse_zone_config(tmp_path / "nope.json", 16, 16)


def test_dump_round_trip(tmp_path):
    specs = [ZoneSpec.rectangle("D1", 2, 3, 5, 4), ZoneSpec.rectangle("D2", 0, 0, 8, 8, p_d=0.35)]
    path = dump_zone_specs(specs, tmp_path / "out" / "zones.json")
    loaded = load_zone_specs(path)
    assert [line for line, _ in loaded] == [2, 3]
    assert [spec for _, spec in loaded] == specs
