"""
The optimized pipeline against the straight-line reference detector.

Both are expected to agree bit for bit; floats are compared with a tight
relative tolerance so an innocent reordering shows up as a clear diff.
"""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings as hsettings, strategies as st

from core.frame_model import Frame
from synth.naive_reference import naive_reference
from synth.scene_synth import ScenarioSpec, VehicleEvent, generate_sequence
from utils.zone_config import ZoneSpec

pytestmark = pytest.mark.slow


def _assert_same(fast, slow):
    assert len(fast) == len(slow)
    for a, b in zip(fast, slow):
        assert (a.frame, a.zone, a.occupied, a.movement, a.warmup) == (b.frame, b.zone, b.occupied, b.movement, b.warmup)
        for field in ("s", "t_high", "t_low"):
            x, y = getattr(a, field), getattr(b, field)
            assert x == pytest.approx(y, rel=1e-9, abs=1e-9), f"frame {a.frame} zone {a.zone} {field}"


def _zones(spec):
    return [z.to_zone(spec.width, spec.height) for z in spec.zones]


@st.composite
def small_scenes(draw):
    seed = draw(st.integers(0, 2**31 - 1))
    vehicles = []
    entry = draw(st.integers(0, 10))
    for _ in range(draw(st.integers(0, 2))):
        vehicles.append(
            VehicleEvent(
                entry_frame=entry,
                x=10,
                width=12,
                length=14,
                speed=2.0,
                intensity=draw(st.sampled_from([25, 60, 190, 230])),
                texture=4.0,
            )
        )
        entry += draw(st.integers(15, 25))
    return ScenarioSpec(
        width=32,
        height=32,
        frames=50,
        seed=seed,
        verge_width=6,
        noise_sigma=draw(st.sampled_from([0.0, 2.0, 6.0])),
        vehicles=vehicles,
    )


@hsettings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
@given(spec=small_scenes())
def test_pipeline_matches_reference(spec, small_settings, run_detector):
    frames, _ = generate_sequence(spec)
    zones = _zones(spec)
    _assert_same(run_detector(frames, zones, small_settings), naive_reference(frames, zones, small_settings))


def test_reference_with_two_zones_and_calibration_cadence(small_settings, run_detector):
    spec = ScenarioSpec(
        width=32,
        height=32,
        frames=40,
        seed=11,
        verge_width=6,
        zones=[
            ZoneSpec.rectangle("A", 6, 4, 10, 10),
            ZoneSpec(id="B", polygon=[(8, 16), (26, 18), (20, 30)], p_d=0.4),
        ],
        vehicles=[VehicleEvent(entry_frame=3, x=8, width=14, length=12, speed=2.0, intensity=30)],
    )
    settings = small_settings.with_calibration_interval(7)
    frames, _ = generate_sequence(spec)
    zones = _zones(spec)
    _assert_same(run_detector(frames, zones, settings), naive_reference(frames, zones, settings))


def test_constant_sequence_never_activates(small_settings, run_detector):
    data = np.full((32, 32), 120, dtype=np.uint8)
    frames = [Frame(data=data, t=t) for t in range(50)]
    zones = [ZoneSpec.rectangle("D1", 8, 16, 16, 16).to_zone(32, 32)]
    fast = run_detector(frames, zones, small_settings)
    slow = naive_reference(frames, zones, small_settings)
    _assert_same(fast, slow)
    assert all(r.occupied == 0 and r.movement == 0 for r in fast)
