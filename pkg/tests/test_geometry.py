"""Box arithmetic: hand-checked examples, a rasterized IoU oracle, and
property tests over random boxes."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from anchorframe.errors import DegenerateBoxError, InvalidGeometryError
from anchorframe.geometry import BoundingBox, box_area, clamp_box, intersection_area, iou


def raster_iou(a: BoundingBox, b: BoundingBox) -> float:
    """Independent oracle: count unit cells on an integer grid covering both
    boxes. Valid only for integer-coordinate boxes."""
    x_lo = int(min(a.x1, b.x1))
    y_lo = int(min(a.y1, b.y1))
    x_hi = int(max(a.x2, b.x2))
    y_hi = int(max(a.y2, b.y2))
    grid_a = np.zeros((y_hi - y_lo, x_hi - x_lo), dtype=bool)
    grid_b = np.zeros_like(grid_a)
    grid_a[int(a.y1) - y_lo : int(a.y2) - y_lo, int(a.x1) - x_lo : int(a.x2) - x_lo] = True
    grid_b[int(b.y1) - y_lo : int(b.y2) - y_lo, int(b.x1) - x_lo : int(b.x2) - x_lo] = True
    inter = np.logical_and(grid_a, grid_b).sum()
    union = np.logical_or(grid_a, grid_b).sum()
    return inter / union


int_boxes = st.builds(
    lambda x1, y1, w, h: BoundingBox(x1, y1, x1 + w, y1 + h),
    st.integers(0, 50),
    st.integers(0, 50),
    st.integers(1, 40),
    st.integers(1, 40),
)

real_boxes = st.builds(
    lambda x1, y1, w, h: BoundingBox(x1, y1, x1 + w, y1 + h),
    st.floats(0, 100, allow_nan=False),
    st.floats(0, 100, allow_nan=False),
    st.floats(0.01, 80, allow_nan=False),
    st.floats(0.01, 80, allow_nan=False),
)


class TestBoundingBox:
    def test_valid_box(self):
        b = BoundingBox(1, 2, 3.5, 4)
        assert b.width == 2.5
        assert b.height == 2.0
        assert b.center == (2.25, 3.0)

    @pytest.mark.parametrize("coords", [(5, 0, 5, 10), (0, 5, 10, 5), (3, 0, 2, 10), (0, 3, 10, 2)])
    def test_degenerate_or_inverted_rejected(self, coords):
        with pytest.raises(InvalidGeometryError):
            BoundingBox(*coords)

    def test_negative_coordinates_allowed(self):
        BoundingBox(-5, -5, 10, 10)

    def test_coordinates_coerced_to_float(self):
        b = BoundingBox(1, 2, 3, 4)
        assert isinstance(b.x1, float)
        assert b == BoundingBox(1.0, 2.0, 3.0, 4.0)


class TestIou:
    def test_identical_boxes(self):
        b = BoundingBox(0, 0, 10, 10)
        assert iou(b, b) == 1.0

    def test_disjoint_boxes(self):
        assert iou(BoundingBox(0, 0, 1, 1), BoundingBox(5, 5, 6, 6)) == 0.0

    def test_hand_arithmetic_overlap(self):
        # intersection 1, union 4 + 4 - 1 = 7; cross-checked by cell count
        a = BoundingBox(0, 0, 2, 2)
        b = BoundingBox(1, 1, 3, 3)
        assert iou(a, b) == pytest.approx(1 / 7, abs=1e-12)
        assert raster_iou(a, b) == pytest.approx(1 / 7, abs=1e-12)

    @given(int_boxes, int_boxes)
    def test_matches_raster_oracle(self, a, b):
        assert iou(a, b) == pytest.approx(raster_iou(a, b), abs=1e-9)

    @given(real_boxes, real_boxes)
    def test_symmetry_and_range(self, a, b):
        v = iou(a, b)
        assert v == iou(b, a)
        assert 0.0 <= v <= 1.0

    @given(real_boxes)
    def test_self_iou_is_one(self, b):
        assert iou(b, b) == 1.0


class TestClampBox:
    def test_clips_negative_corner(self):
        assert clamp_box(BoundingBox(-5, -5, 10, 10), 100, 100) == BoundingBox(0, 0, 10, 10)

    def test_interior_box_unchanged(self):
        b = BoundingBox(10, 10, 20, 20)
        assert clamp_box(b, 100, 100) == b

    def test_fully_outside_raises(self):
        with pytest.raises(DegenerateBoxError):
            clamp_box(BoundingBox(150, 150, 160, 160), 100, 100)

    def test_invalid_frame_dimensions(self):
        with pytest.raises(InvalidGeometryError):
            clamp_box(BoundingBox(0, 0, 1, 1), 0, 100)


class TestBoxArea:
    @pytest.mark.parametrize(
        "box,expected",
        [
            (BoundingBox(0, 0, 2, 3), 6.0),
            (BoundingBox(1.5, 1.5, 2.5, 2.5), 1.0),
            (BoundingBox(0, 0, 7, 7), 49.0),
        ],
    )
    def test_examples(self, box, expected):
        assert box_area(box) == pytest.approx(expected, abs=1e-12)

    def test_intersection_area_disjoint(self):
        assert intersection_area(BoundingBox(0, 0, 1, 1), BoundingBox(2, 2, 3, 3)) == 0.0
