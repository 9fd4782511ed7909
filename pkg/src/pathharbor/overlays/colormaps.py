"""Colormap registry and value-to-color mapping.

Content and representation stay separate: apps transmit raw float values plus
a QuantityDescriptor; the platform maps each semantic kind to exactly one
default colormap so gradients look the same across apps.

Every registered map is an explicit RGBA control-point table. The three
sequential maps keep each channel monotone in t, which guarantees that
rendered (quantized) luminance is monotone in the underlying value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from pathharbor.errors import PlatformError

SEMANTIC_KINDS = ("probability", "attribution", "density", "score")

TRANSPARENT = (0, 0, 0, 0)


class KindMismatchError(PlatformError):
    code = "KIND_MISMATCH"


@dataclass(frozen=True)
class ColormapSpec:
    colormap_id: str
    semantic_kind: str
    control_points: tuple[tuple[float, tuple[int, int, int, int]], ...]

    def __post_init__(self):
        ts = [t for t, _ in self.control_points]
        if ts[0] != 0.0 or ts[-1] != 1.0 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("control points must strictly increase from 0 to 1")

    def to_doc(self) -> dict:
        return {
            "colormap_id": self.colormap_id,
            "semantic_kind": self.semantic_kind,
            "control_points": [
                {"t": t, "rgba": list(rgba)} for t, rgba in self.control_points
            ],
        }


# dark indigo -> pale gold; every channel non-decreasing
PROBABILITY_MAP = ColormapSpec(
    "seq-indigo-gold",
    "probability",
    (
        (0.0, (13, 8, 84, 255)),
        (0.25, (56, 62, 120, 255)),
        (0.5, (98, 126, 136, 255)),
        (0.75, (170, 190, 150, 255)),
        (1.0, (253, 231, 180, 255)),
    ),
)

# diverging blue-white-red, symmetric around t=0.5
ATTRIBUTION_MAP = ColormapSpec(
    "div-blue-white-red",
    "attribution",
    (
        (0.0, (33, 102, 172, 255)),
        (0.25, (146, 197, 222, 255)),
        (0.5, (247, 247, 247, 255)),
        (0.75, (244, 165, 130, 255)),
        (1.0, (178, 24, 43, 255)),
    ),
)

# pale yellow -> deep red; every channel non-increasing
DENSITY_MAP = ColormapSpec(
    "seq-yellow-red",
    "density",
    (
        (0.0, (255, 255, 178, 255)),
        (0.5, (253, 141, 60, 255)),
        (1.0, (189, 0, 38, 255)),
    ),
)

# light gray -> dark blue; every channel non-increasing
SCORE_MAP = ColormapSpec(
    "seq-gray-blue",
    "score",
    (
        (0.0, (229, 231, 235, 255)),
        (0.5, (120, 140, 190, 255)),
        (1.0, (30, 58, 138, 255)),
    ),
)

COLORMAP_REGISTRY: dict[str, ColormapSpec] = {
    spec.colormap_id: spec
    for spec in (PROBABILITY_MAP, ATTRIBUTION_MAP, DENSITY_MAP, SCORE_MAP)
}

DEFAULTS_BY_KIND: dict[str, str] = {
    "probability": PROBABILITY_MAP.colormap_id,
    "attribution": ATTRIBUTION_MAP.colormap_id,
    "density": DENSITY_MAP.colormap_id,
    "score": SCORE_MAP.colormap_id,
}


def default_colormap_for(semantic_kind: str) -> ColormapSpec:
    return COLORMAP_REGISTRY[DEFAULTS_BY_KIND[semantic_kind]]


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def map_value_to_color(value: float, quantity, colormap: ColormapSpec) -> tuple[int, int, int, int]:
    """RGBA for one value: normalize into [0,1], clamp, interpolate linearly
    between the bracketing control points. Nodata (NaN) is fully transparent."""
    if colormap.semantic_kind != quantity.semantic_kind:
        raise KindMismatchError(
            f"colormap serves {colormap.semantic_kind}, quantity is {quantity.semantic_kind}"
        )
    if value is None or math.isnan(value):
        return TRANSPARENT
    lo, hi = quantity.range
    t = (value - lo) / (hi - lo)
    t = 0.0 if t < 0.0 else 1.0 if t > 1.0 else t

    points = colormap.control_points
    for (t0, c0), (t1, c1) in zip(points, points[1:]):
        if t <= t1:
            frac = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            return tuple(
                _round_half_up(a + (b - a) * frac) for a, b in zip(c0, c1)
            )
    return points[-1][1]
