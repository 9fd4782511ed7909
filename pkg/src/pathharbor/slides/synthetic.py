"""Deterministic synthetic slides with ground truth.

Slides are near-white textured backgrounds carrying non-overlapping filled
cell discs: positive cells in brown (120, 66, 18), negative in blue-gray
(70, 70, 160), radii 6..10 px. All randomness comes from a splitmix64 stream
seeded by the caller, so identical (seed, spec) inputs produce bit-identical
containers.

Scanner variants emulate scanner color response with a fixed per-variant
affine transform applied to the finished base image; antibody variants scale
the positive stain color. Both keep disc colors well inside the detector's
matching distance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from pathharbor.errors import PlatformError
from pathharbor.model.entities import SlideInfo, new_id
from pathharbor.slides.pyramid import build_pyramid, pyramid_level_count

MASK64 = (1 << 64) - 1

POSITIVE_COLOR = (120, 66, 18)
NEGATIVE_COLOR = (70, 70, 160)
RADIUS_MIN, RADIUS_MAX = 6, 10
# gap beyond touching, keeps rasterized discs 4-connectivity-separate
PLACEMENT_GAP = 4
MAX_PLACEMENT_ATTEMPTS = 100_000

# channel scale and offset per scanner; identity for the reference scanner
SCANNER_VARIANTS: dict[str, tuple[tuple[float, float, float], tuple[int, int, int]]] = {
    "scanner-a": ((1.0, 1.0, 1.0), (0, 0, 0)),
    "scanner-b": ((1.02, 0.98, 1.0), (6, -4, 2)),
    "scanner-c": ((0.97, 1.01, 1.03), (-5, 3, -2)),
}

# multiplier on the positive stain color per antibody
ANTIBODY_VARIANTS: dict[str, float] = {
    "ab-std": 1.0,
    "ab-dark": 0.92,
    "ab-light": 1.08,
}


class PlacementOverflowError(PlatformError):
    code = "PLACEMENT_OVERFLOW"


class Splitmix64:
    """splitmix64 sequence; also usable as a stateless per-index hash."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return (z ^ (z >> 31)) & MASK64

    def randint(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in [lo, hi]; modulo bias is irrelevant at
        these range sizes and determinism is what matters."""
        return lo + self.next_u64() % (hi - lo + 1)


def _mix_array(values: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer over a uint64 array."""
    z = (values + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(MASK64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@dataclass
class SlideSpec:
    width: int = 1024
    height: int = 768
    n_positive: int = 30
    n_negative: int = 70
    scanner_variant: str = "scanner-a"
    antibody_variant: str = "ab-std"
    tile_size: int = 256
    pixel_size_nm: int = 250

    def to_doc(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_doc(cls, doc: dict) -> "SlideSpec":
        return cls(**doc)


@dataclass
class Cell:
    center: tuple[int, int]
    radius: int
    cls: str  # positive | negative | other

    def to_doc(self) -> dict:
        return {"center": list(self.center), "radius": self.radius, "class": self.cls}

    @classmethod
    def from_doc(cls, doc: dict) -> "Cell":
        return cls(tuple(doc["center"]), int(doc["radius"]), doc["class"])


@dataclass
class GroundTruthSheet:
    slide_id: str
    cells: list[Cell] = field(default_factory=list)
    generator_seed: int = 0
    scanner_variant: str = "scanner-a"
    antibody_variant: str = "ab-std"

    def count(self, cls: str) -> int:
        return sum(1 for c in self.cells if c.cls == cls)

    def tps(self) -> float:
        positive = self.count("positive")
        total = positive + self.count("negative")
        if total == 0:
            raise ZeroDivisionError("no tumor cells in ground truth")
        return 100.0 * positive / total

    def to_doc(self) -> dict:
        return {
            "slide_id": self.slide_id,
            "cells": [c.to_doc() for c in self.cells],
            "generator_seed": self.generator_seed,
            "scanner_variant": self.scanner_variant,
            "antibody_variant": self.antibody_variant,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "GroundTruthSheet":
        return cls(
            slide_id=doc["slide_id"],
            cells=[Cell.from_doc(c) for c in doc["cells"]],
            generator_seed=int(doc["generator_seed"]),
            scanner_variant=doc.get("scanner_variant", "scanner-a"),
            antibody_variant=doc.get("antibody_variant", "ab-std"),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_doc(), indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruthSheet":
        return cls.from_doc(json.loads(Path(path).read_text(encoding="utf-8")))


def _texture(seed: int, width: int, height: int) -> np.ndarray:
    """Near-white gray texture, one draw per pixel off a hashed index stream."""
    idx = np.arange(width * height, dtype=np.uint64) + np.uint64((seed << 1) & MASK64)
    noise = (_mix_array(idx) & np.uint64(15)).astype(np.uint8)  # 0..15
    gray = (240 + noise).reshape(height, width)
    return np.repeat(gray[:, :, None], 3, axis=2)


def _place_cells(rng: Splitmix64, spec: SlideSpec) -> list[Cell]:
    cells: list[Cell] = []
    attempts = 0
    wanted = [("positive", spec.n_positive), ("negative", spec.n_negative)]
    for cls, count in wanted:
        placed = 0
        while placed < count:
            if attempts >= MAX_PLACEMENT_ATTEMPTS:
                raise PlacementOverflowError(
                    f"could not place {count} {cls} cells in {spec.width}x{spec.height}"
                )
            attempts += 1
            r = rng.randint(RADIUS_MIN, RADIUS_MAX)
            if spec.width <= 2 * r or spec.height <= 2 * r:
                raise PlacementOverflowError("slide too small for any cell")
            cx = rng.randint(r, spec.width - 1 - r)
            cy = rng.randint(r, spec.height - 1 - r)
            ok = True
            for other in cells:
                dx, dy = cx - other.center[0], cy - other.center[1]
                min_dist = r + other.radius + PLACEMENT_GAP
                if dx * dx + dy * dy <= min_dist * min_dist:
                    ok = False
                    break
            if ok:
                cells.append(Cell((cx, cy), r, cls))
                placed += 1
    return cells


def rasterize_disc(image: np.ndarray, cx: int, cy: int, radius: int, color) -> None:
    """Fill pixels with (x-cx)^2 + (y-cy)^2 <= radius^2."""
    y0, y1 = max(cy - radius, 0), min(cy + radius + 1, image.shape[0])
    x0, x1 = max(cx - radius, 0), min(cx + radius + 1, image.shape[1])
    yy, xx = np.mgrid[y0:y1, x0:x1]
    mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= radius * radius
    image[y0:y1, x0:x1][mask] = color


def apply_scanner_variant(image: np.ndarray, variant: str) -> np.ndarray:
    scale, offset = SCANNER_VARIANTS[variant]
    out = np.empty_like(image)
    for c in range(3):
        channel = image[:, :, c].astype(np.float64) * scale[c] + offset[c]
        out[:, :, c] = np.clip(np.rint(channel), 0, 255).astype(np.uint8)
    return out


def shifted_class_color(cls: str, scanner_variant: str, antibody_variant: str) -> tuple[int, int, int]:
    """The exact RGB a disc of the given class carries after variant shifts."""
    base = POSITIVE_COLOR if cls == "positive" else NEGATIVE_COLOR
    if cls == "positive":
        factor = ANTIBODY_VARIANTS[antibody_variant]
        base = tuple(int(np.clip(round(c * factor), 0, 255)) for c in base)
    scale, offset = SCANNER_VARIANTS[scanner_variant]
    return tuple(
        int(np.clip(round(base[c] * scale[c] + offset[c]), 0, 255)) for c in range(3)
    )


def render_base_image(seed: int, spec: SlideSpec, cells: list[Cell]) -> np.ndarray:
    image = _texture(seed, spec.width, spec.height)
    pos_color = POSITIVE_COLOR
    factor = ANTIBODY_VARIANTS[spec.antibody_variant]
    pos_color = tuple(int(np.clip(round(c * factor), 0, 255)) for c in pos_color)
    for cell in cells:
        color = pos_color if cell.cls == "positive" else NEGATIVE_COLOR
        rasterize_disc(image, cell.center[0], cell.center[1], cell.radius, color)
    return apply_scanner_variant(image, spec.scanner_variant)


def generate_synthetic_slide(
    seed: int, spec: SlideSpec
) -> tuple[SlideInfo, list[np.ndarray], GroundTruthSheet]:
    """Deterministic (seed, spec) -> (info, pyramid levels, ground truth)."""
    if spec.scanner_variant not in SCANNER_VARIANTS:
        raise ValueError(f"unknown scanner variant {spec.scanner_variant!r}")
    if spec.antibody_variant not in ANTIBODY_VARIANTS:
        raise ValueError(f"unknown antibody variant {spec.antibody_variant!r}")
    rng = Splitmix64(seed)
    cells = _place_cells(rng, spec)
    base = render_base_image(seed, spec, cells)
    levels = build_pyramid(base, spec.tile_size)

    # id must be deterministic for the determinism contract; derive from the stream
    id_rng = Splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5)
    slide_id = "".join(f"{id_rng.next_u64():016x}" for _ in range(2))

    info = SlideInfo(
        slide_id=slide_id,
        width_base=spec.width,
        height_base=spec.height,
        num_levels=pyramid_level_count(spec.width, spec.height, spec.tile_size),
        tile_size=spec.tile_size,
        pixel_size_nm=spec.pixel_size_nm,
        channels=3,
        format_name="ptc1",
    )
    sheet = GroundTruthSheet(
        slide_id=slide_id,
        cells=cells,
        generator_seed=seed,
        scanner_variant=spec.scanner_variant,
        antibody_variant=spec.antibody_variant,
    )
    return info, levels, sheet
