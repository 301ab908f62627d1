"""Axis-aligned bounding boxes and the box arithmetic used everywhere else.

Coordinates are continuous reals (sub-pixel positions are meaningful) with
(x1, y1) the top-left and (x2, y2) the bottom-right corner. Frame indices are
plain 0-based ints throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateBoxError, InvalidGeometryError


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box with strictly positive width and height.

    Negative coordinates are allowed: tracker output and scripted scene
    paths legitimately overhang the frame before clamping.
    """

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x1", float(self.x1))
        object.__setattr__(self, "y1", float(self.y1))
        object.__setattr__(self, "x2", float(self.x2))
        object.__setattr__(self, "y2", float(self.y2))
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise InvalidGeometryError(
                f"box requires x1 < x2 and y1 < y2, got "
                f"({self.x1}, {self.y1}, {self.x2}, {self.y2})"
            )

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def center(self) -> tuple[float, float]:
        return (self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0

    def translated(self, dx: float, dy: float) -> "BoundingBox":
        return BoundingBox(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)


def box_area(b: BoundingBox) -> float:
    """Area as a pure coordinate product (x2-x1)*(y2-y1)."""
    return b.width * b.height


def intersect_boxes(a: BoundingBox, b: BoundingBox) -> BoundingBox | None:
    """Intersection box of two boxes, or None when they are disjoint."""
    x1 = max(a.x1, b.x1)
    y1 = max(a.y1, b.y1)
    x2 = min(a.x2, b.x2)
    y2 = min(a.y2, b.y2)
    if x1 >= x2 or y1 >= y2:
        return None
    return BoundingBox(x1, y1, x2, y2)


def intersection_area(a: BoundingBox, b: BoundingBox) -> float:
    inter = intersect_boxes(a, b)
    return 0.0 if inter is None else box_area(inter)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union, in [0, 1] and symmetric in its arguments."""
    inter = intersection_area(a, b)
    union = box_area(a) + box_area(b) - inter
    if union <= 0:
        raise InvalidGeometryError("iou of zero-area boxes is undefined")
    return inter / union


def clamp_box(b: BoundingBox, width: float, height: float) -> BoundingBox:
    """Clip box coordinates into [0, width] x [0, height].

    Raises DegenerateBoxError when clipping collapses the box to zero area
    (box fully outside the frame) rather than returning an invalid box.
    """
    if width <= 0 or height <= 0:
        raise InvalidGeometryError(f"frame dimensions must be positive, got {width}x{height}")
    x1 = min(max(b.x1, 0.0), float(width))
    y1 = min(max(b.y1, 0.0), float(height))
    x2 = min(max(b.x2, 0.0), float(width))
    y2 = min(max(b.y2, 0.0), float(height))
    if x1 >= x2 or y1 >= y2:
        raise DegenerateBoxError(
            f"box {b.as_tuple()} collapses to zero area when clamped to {width}x{height}"
        )
    return BoundingBox(x1, y1, x2, y2)


def round_half_up(v: float) -> int:
    """Deterministic scalar rounding used for all raster coordinate maps."""
    return math.floor(v + 0.5)
