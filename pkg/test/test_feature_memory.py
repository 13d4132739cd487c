import numpy as np
import pytest
from hypothesis import given, strategies as st

from core.errors import StructuralError
from core.feature_memory import (
    AccumulatorBank,
    CountClassifierConfig,
    classify_count,
    classify_feature,
    classify_features,
    dump_bank,
    load_bank,
    update_accumulator,
    update_bank,
    vehicle_scores,
)

CFG = CountClassifierConfig()
BLACK = 0


def _bank(n=4, fill=0.0):
    ys = np.arange(n)
    xs = np.zeros(n, dtype=np.int64)
    bank = AccumulatorBank.zeros("D1", ys, xs)
    bank.counts[:] = fill
    return bank


# ===================== count classifier =====================


def test_zero_count_is_low():
    assert classify_count(0.0) == (0.0, 1.0, 0.0)


def test_full_negative_count():
    assert classify_count(-50.0) == (1.0, 0.0, 0.0)


def test_negative_ramp_midpoint():
    assert tuple(classify_count(-30.0)) == pytest.approx((0.5, 0.5, 0.0))


def test_positive_mirrors_negative():
    assert tuple(classify_count(30.0)) == pytest.approx((0.0, 0.5, 0.5))
    assert classify_count(1000.0) == (0.0, 0.0, 1.0)


@given(count=st.floats(-1000.0, 1000.0, allow_nan=False))
def test_count_memberships_partition_unity(count):
    neg, low, pos = classify_count(count)
    assert neg + low + pos == pytest.approx(1.0, abs=1e-9)
    assert all(0.0 <= m <= 1.0 for m in (neg, low, pos))


def test_classifier_config_requires_ordered_plateaus():
    with pytest.raises(ValueError):
        CountClassifierConfig(n_full=10.0, n_zero=20.0)


# ===================== accumulator update =====================


@pytest.mark.parametrize("prev, mu, expected", [(0.0, 1.0, 1.0), (5.0, 0.5, 5.0), (5.0, 0.0, 4.0)])
def test_update_accumulator(prev, mu, expected):
    assert update_accumulator(prev, mu) == expected


def test_update_accumulator_saturates():
    assert update_accumulator(1000.0, 1.0) == 1000.0
    assert update_accumulator(-1000.0, 0.0) == -1000.0
    assert update_accumulator(1000.0, 1.0, a_max=None) == 1001.0


@given(prev=st.floats(-1000.0, 1000.0, allow_nan=False), mu=st.floats(0.0, 1.0))
def test_update_moves_count_by_at_most_one(prev, mu):
    updated = update_accumulator(prev, mu)
    assert abs(updated - prev) <= 1.0 + 1e-12
    assert -1000.0 <= updated <= 1000.0


@given(mu=st.floats(0.0, 1.0))
def test_first_update_from_zero_is_neutral(mu):
    assert update_accumulator(0.0, mu) == 2 * mu - 1


@given(seed=st.integers(0, 2**32 - 1))
def test_first_bank_update_from_zero_is_neutral(seed):
    bank = _bank(n=8)
    attrs = np.random.default_rng(seed).uniform(0.0, 1.0, size=bank.counts.shape)
    update_bank(bank, attrs, zone_occupied=False, cfg=CFG)
    np.testing.assert_array_equal(bank.counts, 2 * attrs - 1)


@given(mus=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=300))
def test_unclamped_count_drifts_at_most_one_per_frame(mus):
    count = 0.0
    for frames, mu in enumerate(mus, start=1):
        count = update_accumulator(count, mu, a_max=None)
        assert abs(count) <= frames


def test_free_zone_increments_black_accumulators():
    bank = _bank()
    attrs = np.zeros_like(bank.counts)
    attrs[:, :, BLACK] = 1.0
    update_bank(bank, attrs, zone_occupied=False, cfg=CFG)
    assert np.all(bank.counts[:, :, BLACK] == 1.0)
    assert np.all(bank.counts[:, :, 1:] == -1.0)


def test_occupied_zone_freezes_low_counts():
    bank = _bank(fill=0.0)
    attrs = np.ones_like(bank.counts)
    update_bank(bank, attrs, zone_occupied=True, cfg=CFG)
    assert np.all(bank.counts == 0.0)


def test_occupied_zone_updates_saturated_counts():
    bank = _bank(fill=-50.0)
    attrs = np.ones_like(bank.counts)
    update_bank(bank, attrs, zone_occupied=True, cfg=CFG)
    assert np.all(bank.counts == -49.0)


@given(
    seed=st.integers(0, 2**32 - 1),
    occupied=st.booleans(),
)
def test_bank_update_invariants(seed, occupied):
    rng = np.random.default_rng(seed)
    bank = _bank(n=16)
    bank.counts[:] = rng.uniform(-1000.0, 1000.0, size=bank.counts.shape)
    before = bank.counts.copy()
    attrs = rng.uniform(0.0, 1.0, size=bank.counts.shape)
    update_bank(bank, attrs, occupied, CFG)

    assert np.all(np.abs(bank.counts - before) <= 1.0 + 1e-12)
    assert np.all(np.abs(bank.counts) <= 1000.0)
    if occupied:
        low = classify_count(before, CFG).mu_low > 0.5
        np.testing.assert_array_equal(bank.counts[low], before[low])


def test_bank_shape_mismatch_is_structural_error():
    bank = _bank(n=4)
    with pytest.raises(StructuralError):
        update_bank(bank, np.zeros((3, 5, 3)), False, CFG)


# ===================== feature classification =====================


def test_full_vehicle_feature():
    scores = classify_feature((1.0, 0.0, 0.0), (-1000.0, 0.0, 0.0), CFG)
    assert scores == (1.0, 0.0, 0.0)


def test_unseen_counts_are_unknown():
    scores = classify_feature((0.2, 0.7, 0.1), (0.0, 0.0, 0.0), CFG)
    assert scores == pytest.approx((0.0, 0.0, 0.7))


def test_split_between_vehicle_and_background():
    scores = classify_feature((0.5, 0.5, 0.0), (-50.0, 50.0, 0.0), CFG)
    assert scores == pytest.approx((0.5, 0.5, 0.0))


@given(seed=st.integers(0, 2**32 - 1))
def test_vectorized_classification_matches_scalar(seed):
    rng = np.random.default_rng(seed)
    counts = rng.uniform(-100.0, 100.0, size=(6, 5, 3))
    attrs = rng.uniform(0.0, 1.0, size=(6, 5, 3))
    scores = classify_features(attrs, counts, CFG)
    assert scores.vf.shape == (6, 5)
    for i in range(6):
        for a in range(5):
            single = classify_feature(attrs[i, a], counts[i, a], CFG)
            assert scores.vf[i, a] == single.vf
            assert scores.bf[i, a] == single.bf
            assert scores.uf[i, a] == single.uf
            assert 0.0 <= single.vf <= 1.0


@given(seed=st.integers(0, 2**32 - 1))
def test_vehicle_scores_equal_classified_vf(seed):
    rng = np.random.default_rng(seed)
    counts = rng.uniform(-80.0, 80.0, size=(12, 5, 3))
    attrs = rng.uniform(0.0, 1.0, size=(12, 5, 3))
    np.testing.assert_array_equal(vehicle_scores(attrs, counts, CFG), classify_features(attrs, counts, CFG).vf)


def test_vehicle_scores_shape_mismatch_is_structural_error():
    with pytest.raises(StructuralError):
        vehicle_scores(np.zeros((2, 5, 3)), np.zeros((3, 5, 3)), CFG)


def test_bank_update_leaves_previous_counts_untouched():
    bank = _bank(fill=-50.0)
    previous = bank.counts
    update_bank(bank, np.ones_like(previous), zone_occupied=True, cfg=CFG)
    assert np.all(previous == -50.0)
    assert np.all(bank.counts == -49.0)


# ===================== snapshots =====================


def test_snapshot_layout(tmp_path):
    ys = np.array([5, 5, 6])
    xs = np.array([2, 3, 3])
    bank = AccumulatorBank.zeros("D7", ys, xs)
    bank.counts[:] = np.arange(45, dtype=np.float64).reshape(3, 5, 3)
    path = dump_bank(bank, tmp_path / "bank_D7.vlac")

    raw = path.read_bytes()
    assert raw[:4] == b"VLAC"
    assert int.from_bytes(raw[4:8], "little") == 2  # width
    assert int.from_bytes(raw[8:12], "little") == 2  # height
    assert int.from_bytes(raw[12:16], "little") == 15
    assert len(raw) == 16 + 2 * 2 * 15 * 4

    grid = load_bank(path)
    assert grid.shape == (2, 2, 5, 3)
    np.testing.assert_array_equal(grid[0, 0], bank.counts[0])
    np.testing.assert_array_equal(grid[1, 1], bank.counts[2])
    assert np.all(grid[1, 0] == 0.0)


def test_load_rejects_foreign_file(tmp_path):
    path = tmp_path / "x.vlac"
    path.write_bytes(b"NOPE" + bytes(12))
    with pytest.raises(StructuralError):
        load_bank(path)
