"""Overlay pyramids: float32 tiles mirroring a slide's geometry.

Tiles are written by the producing job while it runs and sealed when the job
finalizes. Unwritten tiles read as all-nodata. Values are float32
little-endian on the wire; NaN is the nodata marker.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from pathharbor.errors import NotFoundError, PlatformError
from pathharbor.model.entities import SlideInfo, new_id
from pathharbor.overlays.colormaps import SEMANTIC_KINDS


class GeometryMismatchError(PlatformError):
    code = "GEOMETRY_MISMATCH"


class ValueOutOfRangeError(PlatformError):
    code = "VALUE_OUT_OF_RANGE"


class SealedError(PlatformError):
    code = "SEALED"


class LevelOutOfRangeError(PlatformError):
    code = "LEVEL_OUT_OF_RANGE"


class TileOutOfRangeError(PlatformError):
    code = "TILE_OUT_OF_RANGE"


@dataclass(frozen=True)
class QuantityDescriptor:
    name: str
    unit: str
    range: tuple[float, float]
    semantic_kind: str

    def __post_init__(self):
        lo, hi = self.range
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError("range must be finite with min < max")
        if self.semantic_kind not in SEMANTIC_KINDS:
            raise ValueError(f"unknown semantic kind {self.semantic_kind!r}")
        if self.semantic_kind == "probability" and not (lo >= 0.0 and hi <= 1.0):
            raise ValueError("probability range must lie within [0, 1]")
        if self.semantic_kind == "attribution" and lo != -hi:
            raise ValueError("attribution range must be sign-symmetric [-a, a]")

    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "unit": self.unit,
            "range": list(self.range),
            "semantic_kind": self.semantic_kind,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "QuantityDescriptor":
        return cls(
            name=doc["name"],
            unit=doc["unit"],
            range=(float(doc["range"][0]), float(doc["range"][1])),
            semantic_kind=doc["semantic_kind"],
        )


class OverlayPyramid:
    def __init__(self, overlay_id: str, slide_info: SlideInfo, produced_by: str, quantity: QuantityDescriptor):
        self.overlay_id = overlay_id
        self.slide_info = slide_info
        self.produced_by = produced_by
        self.quantity = quantity
        self.sealed = False
        # tile writes swap in complete arrays, so readers never see partials
        self._tiles: dict[tuple[int, int, int], np.ndarray] = {}

    def _check_grid(self, level: int, col: int, row: int) -> None:
        info = self.slide_info
        if not 0 <= level < info.num_levels:
            raise LevelOutOfRangeError(f"level {level} out of range")
        cols, rows = info.tile_grid(level)
        if not (0 <= col < cols and 0 <= row < rows):
            raise TileOutOfRangeError(f"tile ({col},{row}) outside {cols}x{rows} grid")

    def write_tile(self, level: int, col: int, row: int, tile: np.ndarray) -> None:
        if self.sealed:
            raise SealedError(f"overlay {self.overlay_id} is sealed")
        self._check_grid(level, col, row)
        ts = self.slide_info.tile_size
        if tile.shape != (ts, ts) or tile.dtype != np.float32:
            raise GeometryMismatchError(f"tile must be {ts}x{ts} float32")
        lo, hi = self.quantity.range
        finite = tile[np.isfinite(tile)]
        if np.any(~np.isfinite(tile) & ~np.isnan(tile)):
            raise ValueOutOfRangeError("tile contains non-finite, non-nodata values")
        if finite.size and (finite.min() < lo or finite.max() > hi):
            raise ValueOutOfRangeError(f"values outside [{lo}, {hi}]")
        self._tiles[(level, col, row)] = tile.copy()

    def value_tile(self, level: int, col: int, row: int) -> np.ndarray:
        self._check_grid(level, col, row)
        tile = self._tiles.get((level, col, row))
        if tile is None:
            ts = self.slide_info.tile_size
            return np.full((ts, ts), np.nan, dtype=np.float32)
        return tile

    def to_doc(self) -> dict:
        return {
            "overlay_id": self.overlay_id,
            "slide_id": self.slide_info.slide_id,
            "produced_by": self.produced_by,
            "quantity": self.quantity.to_doc(),
            "sealed": self.sealed,
        }


class OverlayStore:
    def __init__(self):
        self._overlays: dict[str, OverlayPyramid] = {}
        self._lock = threading.Lock()

    def create(self, slide_info: SlideInfo, produced_by: str, quantity: QuantityDescriptor) -> OverlayPyramid:
        overlay = OverlayPyramid(new_id(), slide_info, produced_by, quantity)
        with self._lock:
            self._overlays[overlay.overlay_id] = overlay
        return overlay

    def get(self, overlay_id: str) -> OverlayPyramid:
        with self._lock:
            overlay = self._overlays.get(overlay_id)
        if overlay is None:
            raise NotFoundError(f"unknown overlay {overlay_id}")
        return overlay

    def for_slide(self, slide_id: str) -> list[OverlayPyramid]:
        with self._lock:
            return [o for o in self._overlays.values() if o.slide_info.slide_id == slide_id]

    def seal_job_overlays(self, job_id: str) -> None:
        """Called when the producing job reaches a terminal state."""
        with self._lock:
            for overlay in self._overlays.values():
                if overlay.produced_by == job_id:
                    overlay.sealed = True
