"""Pyramid construction by integer box filtering.

Level 0 is the input; each further level halves both dimensions (rounding up)
until the image fits a single tile. Pixel (x, y) of level i+1 is the rounded
integer mean of the up-to-2x2 block {(2x, 2y), (2x+1, 2y), (2x, 2y+1),
(2x+1, 2y+1)} present at level i, per channel:

    value = floor((sum + floor(count / 2)) / count)

All arithmetic is integral, so results are bit-exact across platforms.
"""

from __future__ import annotations

import math

import numpy as np

from pathharbor.errors import PlatformError


class EmptyImageError(PlatformError):
    code = "EMPTY_IMAGE"


def level_dimensions(width_base: int, height_base: int, level: int) -> tuple[int, int]:
    return math.ceil(width_base / (1 << level)), math.ceil(height_base / (1 << level))


def pyramid_level_count(width_base: int, height_base: int, tile_size: int) -> int:
    """Levels are added until both dimensions fit within one tile."""
    levels = 1
    w, h = width_base, height_base
    while w > tile_size or h > tile_size:
        w, h = math.ceil(w / 2), math.ceil(h / 2)
        levels += 1
    return levels


def downsample_once(level: np.ndarray) -> np.ndarray:
    """One halving step of the box filter. Input HxWx3 uint8, output is
    ceil-halved in both dimensions."""
    h, w = level.shape[:2]
    out_h, out_w = math.ceil(h / 2), math.ceil(w / 2)
    sums = np.zeros((out_h, out_w, 3), dtype=np.uint32)
    counts = np.zeros((out_h, out_w, 1), dtype=np.uint32)
    for dy in (0, 1):
        for dx in (0, 1):
            part = level[dy::2, dx::2, :]
            sums[: part.shape[0], : part.shape[1], :] += part
            counts[: part.shape[0], : part.shape[1], :] += 1
    return ((sums + counts // 2) // counts).astype(np.uint8)


def build_pyramid(base_image: np.ndarray, tile_size: int) -> list[np.ndarray]:
    """Full level stack for a base RGB8 image, level 0 first."""
    if base_image.ndim != 3 or base_image.shape[2] != 3:
        raise EmptyImageError("base image must be HxWx3")
    h, w = base_image.shape[:2]
    if h < 1 or w < 1:
        raise EmptyImageError("base image must be at least 1x1")
    base_image = np.ascontiguousarray(base_image, dtype=np.uint8)
    levels = [base_image]
    while levels[-1].shape[0] > tile_size or levels[-1].shape[1] > tile_size:
        levels.append(downsample_once(levels[-1]))
    return levels
