import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st

from core.errors import ScenarioError
from synth.rng import XorShift64Star, splitmix64
from synth.scene_synth import (
    Headlights,
    ReflectionEvent,
    ScenarioSpec,
    VehicleEvent,
    compute_truth,
    generate_sequence,
    load_scenario,
    traffic_scenario,
    vehicle_mask,
    write_scenario,
)
from utils.frame_io import FrameSource
from utils.zone_config import ZoneSpec, parse_zone_config


def _small(**kwargs):
    base = dict(width=32, height=64, frames=40, seed=3, noise_sigma=0.0, verge_width=4)
    base.update(kwargs)
    return ScenarioSpec(**base)


# ===================== random numbers =====================


def test_xorshift_is_reproducible():
    a = XorShift64Star(42, lanes=8)
    b = XorShift64Star(42, lanes=8)
    for _ in range(5):
        np.testing.assert_array_equal(a.next_u64(), b.next_u64())


def test_xorshift_streams_differ():
    a = XorShift64Star(42, lanes=4, stream=1).next_u64()
    b = XorShift64Star(42, lanes=4, stream=2).next_u64()
    assert not np.array_equal(a, b)


def test_splitmix_known_value():
    # first output of splitmix64 seeded with 0
    assert int(splitmix64(np.array([0], dtype=np.uint64))[0]) == 0xE220A8397B1DCDAF


def test_uniform_range_and_mean():
    values = XorShift64Star(7, lanes=20000).uniform()
    assert values.min() >= 0.0 and values.max() < 1.0
    assert abs(values.mean() - 0.5) < 0.01


def test_normal_moments():
    values = XorShift64Star(9, lanes=20000).normal()
    assert abs(values.mean()) < 0.03
    assert abs(values.std() - 1.0) < 0.03


def test_integers_cover_inclusive_range():
    values = XorShift64Star(1, lanes=5000).integers(-2, 2)
    assert set(np.unique(values).tolist()) == {-2, -1, 0, 1, 2}


# ===================== scenario validation =====================


def test_default_zone_is_centred_square():
    spec = ScenarioSpec()
    assert len(spec.zones) == 1
    zone = spec.zones[0].to_zone(spec.width, spec.height)
    assert zone.pixel_count == 64 * 64


def test_vehicle_outside_columns_is_rejected():
    spec = _small(vehicles=[VehicleEvent(entry_frame=0, x=40, width=8, length=8)])
    with pytest.raises(ScenarioError):
        generate_sequence(spec)


def test_vehicle_entering_after_last_frame_is_rejected():
    spec = _small(vehicles=[VehicleEvent(entry_frame=45, x=10, width=8, length=8)])
    with pytest.raises(ScenarioError):
        generate_sequence(spec)


def test_unsorted_events_are_rejected():
    events = [
        VehicleEvent(entry_frame=10, x=10, width=8, length=8),
        VehicleEvent(entry_frame=2, x=10, width=8, length=8),
    ]
    with pytest.raises(ScenarioError):
        generate_sequence(_small(vehicles=events))


def test_speed_must_be_positive():
    with pytest.raises(ValueError):
        VehicleEvent(entry_frame=0, x=0, speed=0.0)


def test_reflection_outside_frame_is_rejected():
    spec = _small(reflections=[ReflectionEvent(start_frame=0, end_frame=5, x=100, y=0, width=4, height=4)])
    with pytest.raises(ScenarioError):
        generate_sequence(spec)


# ===================== rendering =====================


def test_static_scene_without_noise_is_constant():
    frames, truth = generate_sequence(_small())
    first = frames[0].data
    assert all(np.array_equal(frame.data, first) for frame in frames)
    assert truth.occupied.sum() == 0
    assert truth.frame_count == 40


def test_same_seed_gives_identical_frames():
    spec = _small(noise_sigma=3.0, vehicles=[VehicleEvent(entry_frame=2, x=10, width=12, length=12, speed=2.0)])
    a, _ = generate_sequence(spec)
    b, _ = generate_sequence(spec)
    for fa, fb in zip(a, b):
        np.testing.assert_array_equal(fa.data, fb.data)


def test_different_seeds_change_frames_not_truth():
    vehicles = [VehicleEvent(entry_frame=2, x=10, width=12, length=12, speed=2.0)]
    a_frames, a_truth = generate_sequence(_small(seed=1, noise_sigma=3.0, vehicles=vehicles))
    b_frames, b_truth = generate_sequence(_small(seed=2, noise_sigma=3.0, vehicles=vehicles))
    assert not np.array_equal(a_frames[10].data, b_frames[10].data)
    np.testing.assert_array_equal(a_truth.occupied, b_truth.occupied)


def test_vehicle_moves_down_at_its_speed():
    spec = _small(vehicles=[VehicleEvent(entry_frame=0, x=10, width=8, length=10, speed=4.0, texture=0.0)])
    for t in (3, 6, 9):
        mask = vehicle_mask(spec, t)
        rows = np.flatnonzero(mask.any(axis=1))
        assert rows.max() == 4 * t - 1
        assert rows.min() == max(4 * t - 10, 0)


def test_vehicle_body_is_rendered():
    spec = _small(vehicles=[VehicleEvent(entry_frame=0, x=10, width=8, length=10, intensity=20, texture=0.0)])
    frames, _ = generate_sequence(spec)
    assert np.all(frames[5].data[vehicle_mask(spec, 5)] == 20)


def test_headlights_and_underside():
    vehicle = VehicleEvent(
        entry_frame=0,
        x=4,
        width=20,
        length=16,
        intensity=60,
        texture=0.0,
        underside=3,
        underside_intensity=10,
        headlights=Headlights(intensity=250, width=4, length=2, inset=1),
    )
    spec = _small(width=32, vehicles=[vehicle])
    frames, _ = generate_sequence(spec)
    data = frames[8].data  # front edge at row 32
    assert data[31, 5] == 250 and data[31, 22] == 250
    assert data[29, 12] == 10
    assert data[20, 12] == 60


def test_halted_vehicle_stays_put():
    vehicle = VehicleEvent(entry_frame=0, x=10, width=8, length=8, speed=4.0, dwell_y=20, dwell_frames=10)
    assert vehicle.front_edge(5) == 20.0
    assert vehicle.front_edge(12) == 20.0
    assert vehicle.front_edge(15) == 20.0
    assert vehicle.front_edge(16) == 24.0


def test_truth_duration_for_zone_deep_vehicle_pass():
    # zone 64 rows deep, vehicle as wide as the zone
    zone = ZoneSpec.rectangle("D1", 16, 64, 64, 64)
    spec = ScenarioSpec(
        width=96,
        height=192,
        frames=80,
        noise_sigma=0.0,
        zones=[zone],
        vehicles=[VehicleEvent(entry_frame=0, x=16, width=64, length=48, speed=4.0)],
    )
    truth = compute_truth(spec).for_zone("D1")
    # rows overlapped = min(front, 64 + 64) - max(front - 48, 64) >= 0.3 * 64 = 19.2
    expected = []
    for t in range(80):
        front = 4 * t
        overlap = max(min(front, 128) - max(front - 48, 64), 0)
        expected.append(int(overlap >= 19.2))
    np.testing.assert_array_equal(truth, expected)
    assert truth.sum() <= 16 + 48 // 4


def test_truth_table_columns():
    spec = _small(vehicles=[VehicleEvent(entry_frame=0, x=8, width=16, length=16, speed=2.0)])
    table = compute_truth(spec).to_frame()
    assert list(table.columns) == ["frame", "zone_id", "truth"]
    assert len(table) == 40


def test_noise_and_drift_clip_to_byte_range():
    frames, _ = generate_sequence(_small(noise_sigma=40.0, drift=5.0, frames=60))
    assert frames[-1].data.dtype == np.uint8
    assert frames[-1].data.max() == 255


def test_jitter_translates_whole_frame():
    spec = _small(jitter=2, noise_sigma=0.0, road_texture=6.0)
    frames, _ = generate_sequence(spec)
    assert any(not np.array_equal(f.data, frames[0].data) for f in frames[1:])


@settings(max_examples=20)
@given(seed=st.integers(0, 10_000))
def test_traffic_scenarios_are_valid(seed):
    spec = traffic_scenario(seed, frames=600, vehicles=4)
    assert [v.entry_frame for v in spec.vehicles] == sorted(v.entry_frame for v in spec.vehicles)
    assert spec.vehicles[-1].entry_frame < 600


# ===================== persistence =====================


def test_write_scenario_round_trips_through_readers(tmp_path):
    spec = _small(frames=6, vehicles=[VehicleEvent(entry_frame=0, x=8, width=16, length=16, speed=4.0)])
    written = write_scenario(spec, tmp_path)
    assert len(written["frames"]) == 6
    assert (tmp_path / "frame_000000.pgm").exists()

    frames, truth = generate_sequence(spec)
    decoded = list(FrameSource(str(tmp_path / "frame_%06d.pgm")))
    assert len(decoded) == 6
    np.testing.assert_array_equal(decoded[4].data, frames[4].data)

    table = pd.read_csv(written["truth"], dtype={"zone_id": str})
    assert table["truth"].tolist() == truth.occupied[:, 0].tolist()
    assert written["truth"].read_bytes().startswith(b"frame,zone_id,truth\n")

    zones = parse_zone_config(written["zones"], spec.width, spec.height)
    assert [z.id for z in zones] == ["D1"]


def test_load_scenario_file(tmp_path):
    path = tmp_path / "scene.yaml"
    path.write_text(
        "frames: 30\nwidth: 32\nheight: 64\nverge_width: 4\n"
        "vehicles:\n  - {entry_frame: 2, x: 8, width: 16, length: 16}\n"
    )
    spec = load_scenario(path)
    assert spec.frames == 30 and len(spec.vehicles) == 1


def test_load_scenario_reports_bad_fields(tmp_path):
    path = tmp_path / "scene.yaml"
    path.write_text("frames: -3\n")
    with pytest.raises(ScenarioError):
        load_scenario(path)
