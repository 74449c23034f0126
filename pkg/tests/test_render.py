import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posefuse.pose import PoseFrame
from posefuse.render import (REFERENCE_HEIGHT, GuidanceMap, RenderStyle,
                             render_frame, render_sequence)
from posefuse.skeleton import WHOLEBODY_133

from conftest import norm_frame, person_keypoints, person_sequence


def single_point_frame(x=0.5, y=0.5, conf=1.0, index=0) -> PoseFrame:
    """Everything invisible except one keypoint (no limbs drawable)."""
    kp = np.zeros((133, 3))
    kp[:, :2] = -10.0  # far off canvas
    kp[index] = (x, y, conf)
    return norm_frame(kp)


def test_output_shape_and_range(person_frame):
    gm = render_frame(person_frame, RenderStyle(), 128, 96)
    assert isinstance(gm, GuidanceMap)
    assert gm.data.shape == (96, 128, 3)
    assert gm.data.min() >= 0.0 and gm.data.max() <= 1.0


def test_canvas_minimum_size(person_frame):
    with pytest.raises(ValueError):
        render_frame(person_frame, RenderStyle(), 4, 64)
    render_frame(person_frame, RenderStyle(), 8, 8)  # boundary accepted


def test_style_validation():
    with pytest.raises(ValueError):
        RenderStyle(keypoint_radius=0.5)
    with pytest.raises(ValueError):
        RenderStyle(confidence_mode="fuzzy")
    with pytest.raises(ValueError):
        RenderStyle(threshold=1.5)


def test_zero_confidence_leaves_background():
    gm = render_frame(single_point_frame(conf=0.0), RenderStyle(), 64, 64)
    assert not gm.data.any()


def test_half_confidence_halves_color():
    frame = single_point_frame(conf=0.5, index=0)
    gm = render_frame(frame, RenderStyle(), 64, 64)
    color = WHOLEBODY_133.keypoint_colors[0]
    lit = gm.data[gm.data.any(axis=2)]
    assert len(lit) > 0
    np.testing.assert_array_equal(lit, np.tile(color * 0.5, (len(lit), 1)))


def test_linearity_exact():
    base = render_frame(single_point_frame(conf=1.0), RenderStyle(), 64, 64)
    for c in (0.0, 0.25, 0.5, 1.0):
        gm = render_frame(single_point_frame(conf=c), RenderStyle(), 64, 64)
        assert np.array_equal(gm.data, c * base.data)


def test_confidence_monotonicity():
    prev = render_frame(single_point_frame(conf=0.0), RenderStyle(), 64, 64)
    for c in (0.2, 0.4, 0.6, 0.8, 1.0):
        cur = render_frame(single_point_frame(conf=c), RenderStyle(), 64, 64)
        assert (cur.data >= prev.data).all()
        prev = cur


@settings(max_examples=40, deadline=None)
@given(c=st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_linearity_property(c):
    base = render_frame(single_point_frame(conf=1.0), RenderStyle(), 48, 48)
    gm = render_frame(single_point_frame(conf=c), RenderStyle(), 48, 48)
    assert np.array_equal(gm.data, c * base.data)


def test_threshold_mode_omits_below_tau():
    style = RenderStyle(confidence_mode="threshold", threshold=0.3)
    low = render_frame(single_point_frame(conf=0.2), style, 64, 64)
    assert not low.data.any()
    high = render_frame(single_point_frame(conf=0.9), style, 64, 64)
    full = render_frame(single_point_frame(conf=1.0), style, 64, 64)
    assert np.array_equal(high.data, full.data)  # survivors at full color


def test_limb_uses_min_endpoint_confidence():
    # two visible wrist/elbow points connected by a body edge
    kp = np.zeros((133, 3))
    kp[:, :2] = -10.0
    kp[7] = (0.3, 0.5, 0.9)   # elbow
    kp[9] = (0.7, 0.5, 0.2)   # wrist, low confidence
    frame = norm_frame(kp)

    style = RenderStyle(confidence_mode="threshold", threshold=0.3)
    gm = render_frame(frame, style, 96, 64)
    # limb omitted (min conf 0.2 < tau), conf-0.9 disc drawn, 0.2 disc omitted
    ex, ey = int(0.3 * 96), int(0.5 * 64)
    wx = int(0.7 * 96)
    mid = int(0.5 * 96)
    assert gm.data[ey, ex].any()
    assert not gm.data[ey, wx].any()
    assert not gm.data[ey, mid].any()

    scaled = render_frame(frame, RenderStyle(), 96, 64)
    # scaled mode draws the limb at 0.2 x edge color
    assert scaled.data[ey, mid].any()
    edge_index = [i for i, (a, b, _g) in enumerate(WHOLEBODY_133.edges)
                  if {a, b} == {7, 9}][0]
    np.testing.assert_allclose(scaled.data[ey, mid],
                               WHOLEBODY_133.edge_colors[edge_index] * 0.2)


def test_scaled_and_threshold_agree_at_binary_confidence():
    rng = np.random.default_rng(0)
    kp = person_keypoints()
    kp[:, 2] = rng.integers(0, 2, size=133).astype(float)
    frame = norm_frame(kp)
    a = render_frame(frame, RenderStyle(confidence_mode="scaled"), 96, 128)
    for tau in (0.25, 0.5, 0.75):
        b = render_frame(frame, RenderStyle(confidence_mode="threshold",
                                            threshold=tau), 96, 128)
        assert a.data.tobytes() == b.data.tobytes()


def test_max_compositing_on_overlap():
    # two coincident keypoints with different colors: result is channel max
    kp = np.zeros((133, 3))
    kp[:, :2] = -10.0
    kp[0] = (0.5, 0.5, 1.0)
    kp[5] = (0.5, 0.5, 1.0)
    gm = render_frame(norm_frame(kp), RenderStyle(), 64, 64)
    expect = np.maximum(WHOLEBODY_133.keypoint_colors[0],
                        WHOLEBODY_133.keypoint_colors[5])
    np.testing.assert_array_equal(gm.data[32, 32], expect)


def test_off_canvas_clipped_silently():
    gm = render_frame(single_point_frame(x=1.5, y=-0.4), RenderStyle(), 64, 64)
    assert not gm.data.any()
    # straddling the edge still paints the inside part
    gm = render_frame(single_point_frame(x=0.999, y=0.5), RenderStyle(), 64, 64)
    assert gm.data.any()


def test_radius_scales_with_height():
    small = render_frame(single_point_frame(), RenderStyle(), 64, 64)
    big = render_frame(single_point_frame(), RenderStyle(),
                       REFERENCE_HEIGHT, REFERENCE_HEIGHT)
    # 64 px canvas clamps the radius to 1 px; at reference height the
    # disc uses the nominal 4 px radius, so the area grows superlinearly
    a_small = small.data.any(axis=2).sum()
    a_big = big.data.any(axis=2).sum()
    assert a_big > 4 * a_small


def test_minimum_one_pixel_radius():
    # at tiny canvases the scaled radius clamps to 1 px, disc stays visible
    gm = render_frame(single_point_frame(), RenderStyle(), 16, 16)
    assert gm.data.any()


def test_reference_height_render_uses_nominal_radius():
    gm = render_frame(single_point_frame(x=0.5, y=0.5),
                      RenderStyle(keypoint_radius=4.0), REFERENCE_HEIGHT,
                      REFERENCE_HEIGHT)
    ys, xs = np.nonzero(gm.data.any(axis=2))
    width = xs.max() - xs.min() + 1
    assert width in (7, 8, 9)  # 4 px radius disc, center on pixel grid


def test_render_sequence_order_and_determinism():
    seq = person_sequence(4)
    maps = render_sequence(seq, RenderStyle(), 96, 128)
    assert len(maps) == 4
    again = render_sequence(seq, RenderStyle(), 96, 128)
    for a, b in zip(maps, again):
        assert a.data.tobytes() == b.data.tobytes()
    assert maps[0].data.tobytes() != maps[1].data.tobytes()  # drifted frames
