"""
Straight-line reference detector.

Recomputes every quantity of the detector with plain Python loops: no
summed-area table, no vectorization, no caching, single-threaded. Floating
point expressions are written in the same order as the optimized engine so
results agree bit for bit; it is slow and exists for cross-checking only.
"""

import math
from typing import Dict, List, Sequence

from core.constants import Attributes
from core.frame_model import Frame
from core.zone_detection import DetectionZone, OccupancyRecord


def _clip01(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def _clip(value: float, low: float, high: float) -> float:
    return min(max(value, low), high)


def _mean_image(frame: Frame) -> List[List[float]]:
    pixels = frame.data.tolist()
    height, width = len(pixels), len(pixels[0])
    mean = []
    for y in range(height):
        row = []
        for x in range(width):
            total = 0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    yy = _clip(y + dy, 0, height - 1)
                    xx = _clip(x + dx, 0, width - 1)
                    total += pixels[yy][xx]
            row.append(total / 9.0)
        mean.append(row)
    return mean


def _calibrate(mean: List[List[float]], percentiles: Sequence[float], separation: float):
    histogram = [0] * 256
    for row in mean:
        for value in row:
            histogram[int(_clip(math.floor(value + 0.5), 0, 255))] += 1
    total = sum(histogram)

    breakpoints = []
    for p in percentiles:
        target = p / 100.0 * total
        cumulative = 0
        chosen = 255
        for index in range(256):
            cumulative += histogram[index]
            if cumulative >= target:
                chosen = index
                break
        breakpoints.append(float(chosen))

    b0, b1, w1, w2 = breakpoints
    if w1 - b1 < separation:
        mid = (b1 + w1) / 2.0
        mid = min(max(mid, 2.0 * separation), 255.0 - 2.0 * separation)
        b1 = mid - separation
        w1 = mid + separation
    b1 = max(b1, separation)
    w1 = min(w1, 255.0 - separation)
    b0 = min(max(min(b0, b1 - separation), 0.0), 255.0)
    w2 = min(max(max(w2, w1 + separation), 0.0), 255.0)
    return b0, b1, w1, w2


def _attributes(mean, x: int, y: int, calib, contrast) -> List[List[float]]:
    height, width = len(mean), len(mean[0])
    b0, b1, w1, w2 = calib
    v = mean[y][x]

    black = _clip01((b1 - v) / (b1 - b0))
    white = _clip01((v - w1) / (w2 - w1))
    triples = [[black, 1.0 - black - white, white]]

    inner = contrast.delta_inner
    ramp = contrast.delta_outer - contrast.delta_inner
    for attr in (Attributes.UR, Attributes.UL, Attributes.LL, Attributes.LR):
        dx, dy = Attributes.CONTRAST_OFFSETS[attr]
        ref = mean[_clip(y + dy, 0, height - 1)][_clip(x + dx, 0, width - 1)]
        d = round((v - ref) * 9.0) / 9.0
        darker = _clip01((-d - inner) / ramp)
        brighter = _clip01((d - inner) / ramp)
        triples.append([darker, 1.0 - darker - brighter, brighter])
    return triples


def _count_memberships(count: float, cc):
    ramp = cc.n_full - cc.n_zero
    neg = _clip01((-count - cc.n_zero) / ramp)
    pos = _clip01((count - cc.n_zero) / ramp)
    return neg, 1.0 - neg - pos, pos


def naive_reference(frames: Sequence[Frame], zones: Sequence[DetectionZone], settings) -> List[OccupancyRecord]:
    """
    Run the whole detector on a frame sequence.

    Returns one OccupancyRecord per frame and zone, frame-major, exactly as
    the optimized pipeline emits them.
    """
    cal_cfg = settings.calibration
    contrast = settings.contrast
    cc = settings.count_classifier
    th = settings.thresholds
    mv = settings.movement
    warmup = settings.pipeline.warmup_frames
    warmup_frames = int(math.ceil(cc.n_full)) if warmup is None else warmup

    pixel_lists = {zone.id: list(zip(zone.ys.tolist(), zone.xs.tolist())) for zone in zones}
    counts: Dict[str, Dict[tuple, List[List[float]]]] = {
        zone.id: {p: [[0.0] * 3 for _ in range(Attributes.COUNT)] for p in pixel_lists[zone.id]}
        for zone in zones
    }
    state = {
        zone.id: {"seeded": False, "s_min": 0.0, "s_max": 0.0, "occupied": False, "last_move": None}
        for zone in zones
    }

    records = []
    calib = None
    previous = None
    for index, frame in enumerate(frames):
        t = frame.t
        mean = _mean_image(frame)
        if index % cal_cfg.interval == 0:
            calib = _calibrate(mean, cal_cfg.percentiles, cal_cfg.min_separation)

        for zone in zones:
            zs = state[zone.id]
            vf_values = []
            for (y, x) in pixel_lists[zone.id]:
                attrs = _attributes(mean, x, y, calib, contrast)
                bank = counts[zone.id][(y, x)]
                for a in range(Attributes.COUNT):
                    for k in range(3):
                        c = bank[a][k]
                        updated = _clip((c + 2.0 * attrs[a][k]) - 1.0, -cc.a_max, cc.a_max)
                        if zs["occupied"] and _count_memberships(c, cc)[1] > cc.freeze_threshold:
                            updated = c
                        bank[a][k] = updated
                for a in range(Attributes.COUNT):
                    best = 0.0
                    for k in range(3):
                        neg = _count_memberships(bank[a][k], cc)[0]
                        best = max(best, neg * attrs[a][k])
                    vf_values.append(best)

            s = math.fsum(vf_values)

            if not zs["seeded"]:
                zs["s_min"], zs["s_max"], zs["seeded"] = s, s, True
            else:
                s_min = s if s <= zs["s_min"] else zs["s_min"] + th.beta_min
                s_max = s if s >= zs["s_max"] else zs["s_max"] - th.beta_max
                zs["s_min"], zs["s_max"] = min(s_min, s_max), s_max

            p = zone.p_d
            t_high = max(p * zs["s_max"] + (1.0 - p) * zs["s_min"], 100.0 * p)
            t_low = th.alpha * t_high

            moved = False
            if previous is not None:
                changed = 0
                for (y, x) in pixel_lists[zone.id]:
                    if abs(int(frame.data[y, x]) - int(previous.data[y, x])) > mv.pixel_delta:
                        changed += 1
                moved = changed > mv.zone_fraction * len(pixel_lists[zone.id])
            if moved:
                zs["last_move"] = t
            recent = zs["last_move"] is not None and t - zs["last_move"] < mv.hold_frames

            in_warmup = t < warmup_frames
            if in_warmup:
                zs["occupied"] = False
            else:
                if s >= t_high:
                    candidate = True
                elif s <= t_low:
                    candidate = False
                else:
                    candidate = zs["occupied"]
                if candidate != zs["occupied"] and recent:
                    zs["occupied"] = candidate

            records.append(
                OccupancyRecord(
                    frame=t,
                    zone=zone.id,
                    occupied=int(zs["occupied"]),
                    s=s,
                    t_high=t_high,
                    t_low=t_low,
                    movement=int(moved),
                    warmup=int(in_warmup),
                )
            )
        previous = frame
    return records
