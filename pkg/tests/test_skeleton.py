import numpy as np
import pytest

from posefuse.skeleton import (BODY, FACE, FEET, LEFT_HAND, RIGHT_HAND,
                               WHOLEBODY_133, LayoutError, SkeletonLayout,
                               get_layout, register_layout)


def test_group_sizes():
    g = WHOLEBODY_133.groups
    assert len(g[BODY]) == 17
    assert len(g[FEET]) == 6
    assert len(g[FACE]) == 68
    assert len(g[LEFT_HAND]) == 21
    assert len(g[RIGHT_HAND]) == 21
    assert WHOLEBODY_133.keypoint_count == 133


def test_groups_partition_keypoints():
    seen = sorted(i for idxs in WHOLEBODY_133.groups.values() for i in idxs)
    assert seen == list(range(133))


def test_hand_indices():
    assert WHOLEBODY_133.hand_indices("left") == tuple(range(91, 112))
    assert WHOLEBODY_133.hand_indices("right") == tuple(range(112, 133))
    with pytest.raises(LayoutError):
        WHOLEBODY_133.hand_indices("middle")


def test_edges_in_range_and_counted():
    for a, b, group in WHOLEBODY_133.edges:
        assert 0 <= a < 133 and 0 <= b < 133
        assert group in WHOLEBODY_133.groups
    # 19 body limbs, 6 foot links, 20 per hand
    per_group = {}
    for _a, _b, group in WHOLEBODY_133.edges:
        per_group[group] = per_group.get(group, 0) + 1
    assert per_group == {BODY: 19, FEET: 6, LEFT_HAND: 20, RIGHT_HAND: 20}


def test_bone_tree_single_root_acyclic():
    tree = WHOLEBODY_133.bone_tree
    assert tree.count(-1) == 1
    assert tree[WHOLEBODY_133.root_index] == -1
    for i in range(133):
        j, hops = i, 0
        while j != -1:
            j = tree[j]
            hops += 1
            assert hops <= 133


def test_bone_order_parents_first():
    order = WHOLEBODY_133.bone_children_in_order()
    assert sorted(order) == [i for i in range(133) if i != 0]
    placed = {WHOLEBODY_133.root_index}
    for i in order:
        assert WHOLEBODY_133.bone_tree[i] in placed
        placed.add(i)


def test_colors_normalized():
    for colors in (WHOLEBODY_133.keypoint_colors, WHOLEBODY_133.edge_colors):
        assert colors.min() >= 0.0 and colors.max() <= 1.0


def test_finger_colors_distinct_per_finger():
    # the four joints of one finger share a color; adjacent fingers differ
    colors = WHOLEBODY_133.keypoint_colors
    for root in (91, 112):
        finger_cols = []
        for finger in range(5):
            base = root + 1 + 4 * finger
            joints = colors[base:base + 4]
            assert (joints == joints[0]).all()
            finger_cols.append(tuple(joints[0]))
        assert len(set(finger_cols)) == 5


def test_group_of():
    assert WHOLEBODY_133.group_of(0) == BODY
    assert WHOLEBODY_133.group_of(20) == FEET
    assert WHOLEBODY_133.group_of(50) == FACE
    assert WHOLEBODY_133.group_of(100) == LEFT_HAND
    assert WHOLEBODY_133.group_of(132) == RIGHT_HAND


def test_registry_roundtrip():
    assert get_layout("coco_wholebody_133") is WHOLEBODY_133
    with pytest.raises(LayoutError):
        get_layout("nope")


def test_register_custom_layout():
    tiny = SkeletonLayout(
        name="tiny3",
        keypoint_count=3,
        edges=((0, 1, "all"), (1, 2, "all")),
        groups={"all": (0, 1, 2)},
        keypoint_colors=np.ones((3, 3)),
        edge_colors=np.ones((2, 3)),
        root_index=0,
        bone_tree=(-1, 0, 1),
    )
    register_layout(tiny)
    assert get_layout("tiny3") is tiny


def test_layout_validation_rejects_bad_tree():
    with pytest.raises(LayoutError):
        SkeletonLayout(
            name="cyclic",
            keypoint_count=2,
            edges=(),
            groups={"all": (0, 1)},
            keypoint_colors=np.zeros((2, 3)),
            edge_colors=np.zeros((0, 3)),
            root_index=0,
            bone_tree=(-1, 1),  # self-parent cycle
        )
    with pytest.raises(LayoutError):
        SkeletonLayout(
            name="two_roots",
            keypoint_count=2,
            edges=(),
            groups={"all": (0, 1)},
            keypoint_colors=np.zeros((2, 3)),
            edge_colors=np.zeros((0, 3)),
            root_index=0,
            bone_tree=(-1, -1),
        )


def test_layout_validation_rejects_bad_groups():
    with pytest.raises(LayoutError):
        SkeletonLayout(
            name="gap",
            keypoint_count=3,
            edges=(),
            groups={"all": (0, 1)},  # keypoint 2 unassigned
            keypoint_colors=np.zeros((3, 3)),
            edge_colors=np.zeros((0, 3)),
            root_index=0,
            bone_tree=(-1, 0, 0),
        )
