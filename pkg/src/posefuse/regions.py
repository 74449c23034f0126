"""Confidence-gated hand regions and per-pixel loss weight maps.

A hand counts as reliable only when every one of its 21 keypoints has
confidence strictly above the threshold. Reliable hands get a padded
bounding box whose pixels carry an amplified loss weight; everything
else stays at weight 1. Overlapping hand boxes form a union, never a
product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .pose import PoseFrame

DEFAULT_TAU_HAND = 0.6
DEFAULT_PAD_FRAC = 0.25
MIN_PAD_PX = 4
DEGENERATE_BOX_PX = 8
LATENT_DOWNSAMPLE = 8


@dataclass(frozen=True)
class HandRegion:
    side: str
    reliable: bool
    bbox: tuple[int, int, int, int]  # (x0, y0, x1, y1), half-open

    @property
    def empty(self) -> bool:
        x0, y0, x1, y1 = self.bbox
        return x1 <= x0 or y1 <= y0


@dataclass(frozen=True)
class LossWeightMap:
    width: int
    height: int
    data: np.ndarray = field(repr=False)  # (H, W) floats

    def __post_init__(self):
        if self.data.shape != (self.height, self.width):
            raise ValueError("weight data must be (H, W)")
        if self.data.min() < 1.0:
            raise ValueError("loss weights must be >= 1")
        self.data.setflags(write=False)


def hand_reliability(frame: PoseFrame, side: str, tau_hand: float) -> bool:
    """True iff every keypoint of the given hand has confidence > tau_hand."""
    idxs = frame.layout.hand_indices(side)
    return bool(np.all(frame.conf[list(idxs)] > tau_hand))


def hand_bbox(frame: PoseFrame, side: str, pad_frac: float, width: int,
              height: int) -> tuple[int, int, int, int]:
    """Padded integer pixel bbox of the hand keypoints, clipped to canvas.

    Padding on every edge is max(4 px, pad_frac * larger bbox side). If
    all keypoints coincide, an 8x8 box centered on the point is used.
    """
    idxs = list(frame.layout.hand_indices(side))
    xs = frame.x[idxs] * width
    ys = frame.y[idxs] * height
    min_x, max_x = float(xs.min()), float(xs.max())
    min_y, max_y = float(ys.min()), float(ys.max())

    if min_x == max_x and min_y == max_y:
        half = DEGENERATE_BOX_PX // 2
        x0 = int(round(min_x)) - half
        y0 = int(round(min_y)) - half
        x1, y1 = x0 + DEGENERATE_BOX_PX, y0 + DEGENERATE_BOX_PX
    else:
        pad = max(float(MIN_PAD_PX), pad_frac * max(max_x - min_x, max_y - min_y))
        x0 = math.floor(min_x - pad)
        y0 = math.floor(min_y - pad)
        x1 = math.ceil(max_x + pad)
        y1 = math.ceil(max_y + pad)

    x0, y0 = max(0, x0), max(0, y0)
    x1, y1 = min(width, x1), min(height, y1)
    return (x0, y0, max(x0, x1), max(y0, y1))


def hand_regions(frame: PoseFrame, tau_hand: float = DEFAULT_TAU_HAND,
                 pad_frac: float = DEFAULT_PAD_FRAC, width: int = 576,
                 height: int = 1024) -> tuple[HandRegion, HandRegion]:
    regions = []
    for side in ("left", "right"):
        if hand_reliability(frame, side, tau_hand):
            box = hand_bbox(frame, side, pad_frac, width, height)
            regions.append(HandRegion(side, True, box))
        else:
            regions.append(HandRegion(side, False, (0, 0, 0, 0)))
    return tuple(regions)


def build_weight_map(frame: PoseFrame, tau_hand: float, pad_frac: float,
                     w_hand: float, width: int, height: int) -> LossWeightMap:
    """Per-pixel loss weights: w_hand inside reliable hand boxes, 1 elsewhere."""
    if w_hand < 1.0:
        raise ValueError("w_hand must be >= 1")
    data = np.ones((height, width))
    for region in hand_regions(frame, tau_hand, pad_frac, width, height):
        if region.reliable and not region.empty:
            x0, y0, x1, y1 = region.bbox
            data[y0:y1, x0:x1] = w_hand
    return LossWeightMap(width, height, data)


def downsample_weight_map(wm: LossWeightMap,
                          factor: int = LATENT_DOWNSAMPLE) -> LossWeightMap:
    """Reduce to latent resolution by max over factor x factor pixel blocks.

    Partial edge blocks are padded with weight 1, the neutral value for
    the max.
    """
    if factor < 1:
        raise ValueError("factor must be >= 1")
    h, w = wm.data.shape
    ho, wo = -(-h // factor), -(-w // factor)
    padded = np.ones((ho * factor, wo * factor))
    padded[:h, :w] = wm.data
    data = padded.reshape(ho, factor, wo, factor).max(axis=(1, 3))
    return LossWeightMap(wo, ho, data)
