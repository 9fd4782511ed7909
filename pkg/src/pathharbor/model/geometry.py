"""Geometric validity checks for annotations against a slide's base extent.

Coordinate bounds are the closed interval [0, width_base] x [0, height_base]
so a full-slide rectangle is expressible. A circle is contained iff its
axis-aligned bounding box is.
"""

from __future__ import annotations

from pathharbor.model.entities import AnnotationEntity, SlideInfo

# Minimum vertex counts per kind; rectangle/circle carry a single anchor pair.
_MIN_VERTICES = {
    "point": 1,
    "line": 2,
    "rectangle": 1,
    "polygon": 3,
    "circle": 1,
    "arrow": 2,
}


def check_annotation_geometry(a: AnnotationEntity, info: SlideInfo) -> str | None:
    """None when the annotation is valid, else a violation code.

    Codes: DEGENERATE_SHAPE (too few vertices, non-positive extent or radius),
    OUT_OF_BOUNDS (any part outside the slide extent).
    """
    w, h = info.width_base, info.height_base

    if a.kind not in _MIN_VERTICES:
        return "DEGENERATE_SHAPE"
    if len(a.coordinates) < _MIN_VERTICES[a.kind]:
        return "DEGENERATE_SHAPE"
    if a.kind == "arrow" and len(a.coordinates) != 2:
        return "DEGENERATE_SHAPE"
    if a.kind in ("point", "rectangle", "circle") and len(a.coordinates) != 1:
        return "DEGENERATE_SHAPE"

    for x, y in a.coordinates:
        if not (0 <= x <= w and 0 <= y <= h):
            return "OUT_OF_BOUNDS"

    if a.kind == "rectangle":
        if a.width is None or a.height is None or a.width < 1 or a.height < 1:
            return "DEGENERATE_SHAPE"
        x0, y0 = a.coordinates[0]
        if x0 + a.width > w or y0 + a.height > h:
            return "OUT_OF_BOUNDS"

    if a.kind == "circle":
        if a.radius is None or a.radius < 1:
            return "DEGENERATE_SHAPE"
        cx, cy = a.coordinates[0]
        if cx - a.radius < 0 or cy - a.radius < 0 or cx + a.radius > w or cy + a.radius > h:
            return "OUT_OF_BOUNDS"

    return None
