"""
Linguistic attributes: colour C and the four corner contrasts UR, UL, LL, LR.

Every attribute value is a triple of membership degrees over three terms.
All membership families are trapezoidal partitions of unity: the outer terms
are clipped ramps and the middle term is the complement of the two.

The scalar functions accept numpy arrays as well, which is how the pipeline
evaluates whole zones in one call.
"""

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .constants import Attributes
from .frame_model import ColorCalibration, MeanImage

Number = Union[float, np.ndarray]


class ContrastConfig(BaseModel):
    """Offsets placing i0..i4 around the reference intensity."""

    model_config = ConfigDict(frozen=True)

    delta_inner: float = Field(10.0, description="Half-width of the 'similar' plateau")
    delta_outer: float = Field(30.0, description="Difference of full darker/brighter")

    @model_validator(mode="after")
    def _check_order(self):
        if not (0 < self.delta_inner < self.delta_outer <= 255):
            raise ValueError("require 0 < delta_inner < delta_outer <= 255")
        return self


class MembershipTriple(NamedTuple):
    """Membership degrees (m1, m2, m3) ordered as the attribute's term set."""

    m1: float
    m2: float
    m3: float


@dataclass(frozen=True)
class AttributeVector:
    """The five membership triples of one pixel."""

    c: MembershipTriple
    ur: MembershipTriple
    ul: MembershipTriple
    ll: MembershipTriple
    lr: MembershipTriple

    def as_array(self) -> np.ndarray:
        return np.array([self.c, self.ur, self.ul, self.ll, self.lr], dtype=np.float64)


def _ramp(numerator: Number, width: float) -> Number:
    return np.clip(numerator / width, 0.0, 1.0)


def color_memberships(values: Number, calib: ColorCalibration):
    """(black, grey, white) for intensities; arrays are evaluated elementwise."""
    black = _ramp(calib.b1 - values, calib.b1 - calib.b0)
    white = _ramp(values - calib.w1, calib.w2 - calib.w1)
    grey = 1.0 - black - white
    return black, grey, white


def contrast_difference(center: Number, reference: Number) -> Number:
    """
    center - reference, snapped to the 1/9 lattice of 3x3 means.

    Means are integer sums / 9, so the snap recovers the exact difference of
    the sums and adding the same constant to both inputs cannot change it.
    """
    return np.rint((center - reference) * 9.0) / 9.0


def contrast_memberships(center: Number, reference: Number, cfg: ContrastConfig):
    """(darker, similar, brighter) of center relative to reference."""
    d = contrast_difference(center, reference)
    width = cfg.delta_outer - cfg.delta_inner
    darker = _ramp(-d - cfg.delta_inner, width)
    brighter = _ramp(d - cfg.delta_inner, width)
    similar = 1.0 - darker - brighter
    return darker, similar, brighter


def eval_color(im_value: float, calib: ColorCalibration) -> MembershipTriple:
    black, grey, white = color_memberships(float(im_value), calib)
    return MembershipTriple(float(black), float(grey), float(white))


def eval_contrast(im_center: float, im_ref: float, cfg: ContrastConfig = None) -> MembershipTriple:
    cfg = cfg or ContrastConfig()
    darker, similar, brighter = contrast_memberships(float(im_center), float(im_ref), cfg)
    return MembershipTriple(float(darker), float(similar), float(brighter))


def _clamp(value: int, upper: int) -> int:
    return min(max(value, 0), upper - 1)


def eval_attributes(
    x: int,
    y: int,
    mean_image: MeanImage,
    calib: ColorCalibration,
    cfg: ContrastConfig = None,
) -> AttributeVector:
    """Evaluate all five attributes at pixel (x, y); neighbours clamp to the border."""
    cfg = cfg or ContrastConfig()
    im = mean_image.data
    height, width = im.shape
    center = im[y, x]

    triples = {Attributes.C: eval_color(center, calib)}
    for attr, (dx, dy) in Attributes.CONTRAST_OFFSETS.items():
        ref = im[_clamp(y + dy, height), _clamp(x + dx, width)]
        triples[attr] = eval_contrast(center, ref, cfg)

    return AttributeVector(
        c=triples[Attributes.C],
        ur=triples[Attributes.UR],
        ul=triples[Attributes.UL],
        ll=triples[Attributes.LL],
        lr=triples[Attributes.LR],
    )


def eval_attribute_grid(
    ys: np.ndarray,
    xs: np.ndarray,
    mean_image: MeanImage,
    calib: ColorCalibration,
    cfg: ContrastConfig,
) -> np.ndarray:
    """
    Vectorized eval_attributes over a pixel list.

    Returns:
        Array of shape (N, 5, 3): memberships per pixel, attribute and term
    """
    im = mean_image.data
    height, width = im.shape
    center = im[ys, xs]

    out = np.empty((len(ys), Attributes.COUNT, 3), dtype=np.float64)
    out[:, Attributes.C, 0], out[:, Attributes.C, 1], out[:, Attributes.C, 2] = color_memberships(
        center, calib
    )
    for attr, (dx, dy) in Attributes.CONTRAST_OFFSETS.items():
        ref = im[np.clip(ys + dy, 0, height - 1), np.clip(xs + dx, 0, width - 1)]
        out[:, attr, 0], out[:, attr, 1], out[:, attr, 2] = contrast_memberships(center, ref, cfg)
    return out


def eval_attribute_frame(
    mean_image: MeanImage, calib: ColorCalibration, cfg: ContrastConfig
) -> np.ndarray:
    """Attributes for every pixel, shape (H*W, 5, 3) in row-major pixel order."""
    height, width = mean_image.data.shape
    ys, xs = np.divmod(np.arange(height * width), width)
    return eval_attribute_grid(ys, xs, mean_image, calib, cfg)
