"""Slide registry over a data directory, with anonymizing import.

Containers live as ``<slide_id>.ptc`` under the data dir. Imports always
re-encode into a fresh container carrying only pixel data and geometry, so no
source metadata can survive; the alias-to-id mapping goes into a local
``manifest.json`` next to the containers, never into the container itself.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

import numpy as np

from pathharbor.errors import NotFoundError
from pathharbor.model.entities import SlideInfo, new_id
from pathharbor.slides import container as ptc
from pathharbor.slides.readers import MemorySlideHandle, SourceUnreadableError, open_slide
from pathharbor.slides.synthetic import (
    GroundTruthSheet,
    SlideSpec,
    generate_synthetic_slide,
)

MANIFEST_NAME = "manifest.json"


class SlideStore:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._handles: dict[str, object] = {}
        self._lock = threading.Lock()

    # -- registry ----------------------------------------------------------

    def list_slides(self) -> list[SlideInfo]:
        infos = [self.get_handle(p.stem).info for p in sorted(self.data_dir.glob("*.ptc"))]
        return infos

    def has_slide(self, slide_id: str) -> bool:
        if not slide_id or "/" in slide_id or "." in slide_id:
            return False
        with self._lock:
            if slide_id in self._handles:
                return True
        return (self.data_dir / f"{slide_id}.ptc").exists()

    def get_handle(self, slide_id: str):
        with self._lock:
            handle = self._handles.get(slide_id)
        if handle is not None:
            return handle
        path = self.data_dir / f"{slide_id}.ptc"
        if not self.has_slide(slide_id) or not path.exists():
            raise NotFoundError(f"unknown slide {slide_id}")
        handle = ptc.open_container(path, slide_id)
        with self._lock:
            # a racing opener may have beaten us; keep the first one
            existing = self._handles.get(slide_id)
            if existing is not None:
                handle.close()
                return existing
            self._handles[slide_id] = handle
        return handle

    def get_info(self, slide_id: str) -> SlideInfo:
        return self.get_handle(slide_id).info

    def close(self) -> None:
        with self._lock:
            for handle in self._handles.values():
                handle.close()
            self._handles.clear()

    # -- creation ----------------------------------------------------------

    def add_synthetic(self, seed: int, spec: SlideSpec) -> tuple[SlideInfo, GroundTruthSheet]:
        info, levels, sheet = generate_synthetic_slide(seed, spec)
        path = self.data_dir / f"{info.slide_id}.ptc"
        ptc.write_container(info, levels, path)
        sheet.save(self.data_dir / f"{info.slide_id}.truth.json")
        return info, sheet

    def ground_truth(self, slide_id: str) -> GroundTruthSheet:
        path = self.data_dir / f"{slide_id}.truth.json"
        if not path.exists():
            raise NotFoundError(f"no ground truth for {slide_id}")
        return GroundTruthSheet.load(path)

    # -- anonymizing import --------------------------------------------------

    def import_and_anonymize(
        self, source: str | Path, case_alias: str
    ) -> tuple[SlideInfo, dict]:
        """Re-encode a source slide under a fresh id, dropping everything but
        pixels and geometry. The alias mapping is recorded only in the local
        manifest."""
        source = Path(source)
        try:
            handle = open_slide(source)
        except (OSError, ptc.BadMagicError, ptc.TruncatedFileError, ptc.IndexCorruptError) as exc:
            raise SourceUnreadableError(f"cannot read {source}: {exc}") from exc
        try:
            src_info = handle.info
            if isinstance(handle, MemorySlideHandle):
                levels = handle.levels
            else:
                levels = [
                    _assemble_level(handle, level) for level in range(src_info.num_levels)
                ]
        finally:
            handle.close()

        slide_id = new_id()
        info = SlideInfo(
            slide_id=slide_id,
            width_base=src_info.width_base,
            height_base=src_info.height_base,
            num_levels=src_info.num_levels,
            tile_size=src_info.tile_size,
            pixel_size_nm=src_info.pixel_size_nm,
            channels=3,
            format_name="ptc1",
        )
        ptc.write_container(info, levels, self.data_dir / f"{slide_id}.ptc")
        entry = self._record_alias(case_alias, slide_id)
        return info, entry

    def _record_alias(self, case_alias: str, slide_id: str) -> dict:
        entry = {"case_alias": case_alias, "slide_id": slide_id}
        with self._lock:
            manifest = self._load_manifest()
            manifest.append(entry)
            (self.data_dir / MANIFEST_NAME).write_text(
                json.dumps(manifest, indent=1), encoding="utf-8"
            )
        return entry

    def _load_manifest(self) -> list[dict]:
        path = self.data_dir / MANIFEST_NAME
        if not path.exists():
            return []
        return json.loads(path.read_text(encoding="utf-8"))

    def manifest(self) -> list[dict]:
        with self._lock:
            return self._load_manifest()


def _assemble_level(handle, level: int):
    info = handle.info
    w, h = info.level_extent(level)
    ts = info.tile_size
    cols, rows = info.tile_grid(level)
    buf = np.empty((rows * ts, cols * ts, 3), dtype=np.uint8)
    for row in range(rows):
        for col in range(cols):
            buf[row * ts : (row + 1) * ts, col * ts : (col + 1) * ts] = handle.read_tile(
                level, col, row
            )
    return buf[:h, :w]
