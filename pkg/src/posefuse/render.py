"""Rasterize pose frames into guidance maps.

Two confidence modes: ``scaled`` multiplies every keypoint disc and limb
stroke by its confidence (limbs take the lower endpoint confidence), so
uncertain detections appear dimmer; ``threshold`` is the prior-practice
baseline that omits anything below a fixed cutoff and draws survivors at
full palette color. Overlapping strokes composite by per-channel max,
which is order-independent and keeps values in [0, 1]. No anti-aliasing:
a pixel is covered iff its center lies within the stroke.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pose import PoseFrame, PoseSequence

REFERENCE_HEIGHT = 768  # style radii are given in pixels at this canvas height
CONFIDENCE_MODES = ("scaled", "threshold")


@dataclass(frozen=True)
class RenderStyle:
    keypoint_radius: float = 4.0
    limb_thickness: float = 4.0
    confidence_mode: str = "scaled"
    threshold: float = 0.3

    def __post_init__(self):
        if self.keypoint_radius < 1 or self.limb_thickness < 1:
            raise ValueError("keypoint_radius and limb_thickness must be >= 1 px")
        if self.confidence_mode not in CONFIDENCE_MODES:
            raise ValueError(f"unknown confidence_mode {self.confidence_mode!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")


@dataclass(frozen=True)
class GuidanceMap:
    width: int
    height: int
    data: np.ndarray = field(repr=False)  # (H, W, 3) floats in [0, 1]

    def __post_init__(self):
        if self.data.shape != (self.height, self.width, 3):
            raise ValueError("guidance data must be (H, W, 3)")
        if self.data.min() < 0.0 or self.data.max() > 1.0:
            raise ValueError("guidance values must lie in [0, 1]")
        self.data.setflags(write=False)


def _paint_disc(canvas: np.ndarray, cx: float, cy: float, r: float,
                value: np.ndarray) -> None:
    h, w = canvas.shape[:2]
    x0 = max(0, int(np.floor(cx - r)) - 1)
    x1 = min(w, int(np.ceil(cx + r)) + 1)
    y0 = max(0, int(np.floor(cy - r)) - 1)
    y1 = min(h, int(np.ceil(cy + r)) + 1)
    if x0 >= x1 or y0 >= y1:
        return
    ys, xs = np.mgrid[y0:y1, x0:x1]
    mask = (xs + 0.5 - cx) ** 2 + (ys + 0.5 - cy) ** 2 <= r * r
    region = canvas[y0:y1, x0:x1]
    region[mask] = np.maximum(region[mask], value)


def _paint_capsule(canvas: np.ndarray, ax: float, ay: float, bx: float,
                   by: float, half: float, value: np.ndarray) -> None:
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0.0:
        _paint_disc(canvas, ax, ay, half, value)
        return
    h, w = canvas.shape[:2]
    x0 = max(0, int(np.floor(min(ax, bx) - half)) - 1)
    x1 = min(w, int(np.ceil(max(ax, bx) + half)) + 1)
    y0 = max(0, int(np.floor(min(ay, by) - half)) - 1)
    y1 = min(h, int(np.ceil(max(ay, by) + half)) + 1)
    if x0 >= x1 or y0 >= y1:
        return
    ys, xs = np.mgrid[y0:y1, x0:x1]
    px = xs + 0.5 - ax
    py = ys + 0.5 - ay
    t = np.clip((px * dx + py * dy) / seg2, 0.0, 1.0)
    d2 = (px - t * dx) ** 2 + (py - t * dy) ** 2
    mask = d2 <= half * half
    region = canvas[y0:y1, x0:x1]
    region[mask] = np.maximum(region[mask], value)


def render_frame(frame: PoseFrame, style: RenderStyle, width: int,
                 height: int) -> GuidanceMap:
    """Draw one pose frame onto a black canvas of the given size."""
    if width < 8 or height < 8:
        raise ValueError("canvas must be at least 8x8 pixels")
    scale = height / REFERENCE_HEIGHT
    radius = max(1.0, style.keypoint_radius * scale)
    half = max(1.0, style.limb_thickness * scale) / 2.0

    layout = frame.layout
    canvas = np.zeros((height, width, 3))
    px = frame.x * width
    py = frame.y * height
    conf = frame.conf
    thresholded = style.confidence_mode == "threshold"

    for e, (a, b, _group) in enumerate(layout.edges):
        c = min(conf[a], conf[b])
        color = layout.edge_colors[e]
        if thresholded:
            if c < style.threshold:
                continue
            value = color
        else:
            if c == 0.0:
                continue
            value = color * c
        _paint_capsule(canvas, px[a], py[a], px[b], py[b], half, value)

    for i in range(layout.keypoint_count):
        c = conf[i]
        color = layout.keypoint_colors[i]
        if thresholded:
            if c < style.threshold:
                continue
            value = color
        else:
            if c == 0.0:
                continue
            value = color * c
        _paint_disc(canvas, px[i], py[i], radius, value)

    return GuidanceMap(width, height, canvas)


def render_sequence(seq: PoseSequence, style: RenderStyle, width: int,
                    height: int) -> list[GuidanceMap]:
    """render_frame applied per frame, order preserved."""
    return [render_frame(f, style, width, height) for f in seq.frames]
