"""The PTC1 on-disk slide container: bit-exact, little-endian, immutable.

Layout:

    magic   4 bytes  50 54 43 31 ("PTC1")
    u32     version (1)
    u64     width, u64 height          base-level pixels
    u32     tile_size
    u32     num_levels
    u64     pixel_size_nm
    u8      channels (3)
    7 bytes reserved, zero
    per level:
        u32 grid_cols, u32 grid_rows
        grid_cols*grid_rows entries of { u64 offset, u64 length }
    tile payloads: raw RGB8, row-major, length = tile_size^2 * 3

Edge tiles are stored full-size, padded white (255,255,255). Offsets are
absolute file positions. Every tile of every level is present.
"""

from __future__ import annotations

import math
import os
import struct
from pathlib import Path

import numpy as np

from pathharbor.errors import PlatformError
from pathharbor.model.entities import SlideInfo

MAGIC = b"PTC1"
VERSION = 1
_HEADER = struct.Struct("<4sIQQIIQB7x")  # 48 bytes
_INDEX_ENTRY = struct.Struct("<QQ")

WHITE = 255


class BadMagicError(PlatformError):
    code = "BAD_MAGIC"


class UnsupportedVersionError(PlatformError):
    code = "UNSUPPORTED_VERSION"


class TruncatedFileError(PlatformError):
    code = "TRUNCATED_FILE"


class IndexCorruptError(PlatformError):
    code = "INDEX_CORRUPT"


class LevelOutOfRangeError(PlatformError):
    code = "LEVEL_OUT_OF_RANGE"


class TileOutOfRangeError(PlatformError):
    code = "TILE_OUT_OF_RANGE"


class RegionTooLargeError(PlatformError):
    code = "REGION_TOO_LARGE"


def extract_tile(level: np.ndarray, tile_size: int, col: int, row: int) -> np.ndarray:
    """Cut one tile out of a level buffer, padding past the edge with white."""
    tile = np.full((tile_size, tile_size, 3), WHITE, dtype=np.uint8)
    y0, x0 = row * tile_size, col * tile_size
    part = level[y0 : y0 + tile_size, x0 : x0 + tile_size]
    tile[: part.shape[0], : part.shape[1]] = part
    return tile


def write_container(info: SlideInfo, levels: list[np.ndarray], path: str | Path) -> Path:
    """Serialize a level stack into a PTC1 file. Writes to a temp file and
    renames atomically so readers never observe a partial container."""
    path = Path(path)
    ts = info.tile_size
    if len(levels) != info.num_levels:
        raise ValueError("level count does not match SlideInfo")
    for i, level in enumerate(levels):
        expected = info.level_extent(i)
        if (level.shape[1], level.shape[0]) != expected:
            raise ValueError(f"level {i} dims {level.shape[:2]} != expected {expected}")

    grids = [info.tile_grid(i) for i in range(info.num_levels)]
    index_size = sum(8 + _INDEX_ENTRY.size * cols * rows for cols, rows in grids)
    tile_len = ts * ts * 3

    offset = _HEADER.size + index_size
    index_blobs = []
    for cols, rows in grids:
        entries = bytearray(struct.pack("<II", cols, rows))
        for _ in range(cols * rows):
            entries += _INDEX_ENTRY.pack(offset, tile_len)
            offset += tile_len
        index_blobs.append(bytes(entries))

    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(
            _HEADER.pack(
                MAGIC,
                VERSION,
                info.width_base,
                info.height_base,
                ts,
                info.num_levels,
                info.pixel_size_nm,
                info.channels,
            )
        )
        for blob in index_blobs:
            fh.write(blob)
        for i, level in enumerate(levels):
            cols, rows = grids[i]
            for row in range(rows):
                for col in range(cols):
                    fh.write(extract_tile(level, ts, col, row).tobytes())
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
    return path


class SlideHandle:
    """Read-only view of an open container; immutable and safe to share
    across threads (reads use positioned I/O, no seek state)."""

    def __init__(self, path: Path, info: SlideInfo, index: list[list[tuple[int, int]]]):
        self.path = path
        self.info = info
        self._index = index
        self._fd = os.open(path, os.O_RDONLY)
        self._closed = False

    def close(self) -> None:
        if not self._closed:
            os.close(self._fd)
            self._closed = True

    def __enter__(self) -> "SlideHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def read_tile(self, level: int, col: int, row: int) -> np.ndarray:
        """Exact stored bytes of one tile as a (tile_size, tile_size, 3) array."""
        info = self.info
        if not 0 <= level < info.num_levels:
            raise LevelOutOfRangeError(f"level {level} out of range")
        cols, rows = info.tile_grid(level)
        if not (0 <= col < cols and 0 <= row < rows):
            raise TileOutOfRangeError(f"tile ({col},{row}) outside {cols}x{rows} grid")
        offset, length = self._index[level][row * cols + col]
        data = os.pread(self._fd, length, offset)
        if len(data) != length:
            raise TruncatedFileError("tile payload truncated")
        ts = info.tile_size
        return np.frombuffer(data, dtype=np.uint8).reshape(ts, ts, 3)


def open_container(path: str | Path, slide_id: str | None = None) -> SlideHandle:
    """Open and fully verify a PTC1 file; fails closed on any inconsistency."""
    path = Path(path)
    size = path.stat().st_size
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < 4 or header[:4] != MAGIC:
            raise BadMagicError(f"{path} is not a PTC1 container")
        if len(header) < _HEADER.size:
            raise TruncatedFileError("header truncated")
        _, version, width, height, tile_size, num_levels, pixel_size_nm, channels = (
            _HEADER.unpack(header)
        )
        if version != VERSION:
            raise UnsupportedVersionError(f"container version {version}")
        if channels != 3 or tile_size not in (256, 512) or num_levels < 1:
            raise IndexCorruptError("implausible header fields")
        if width < 1 or height < 1 or pixel_size_nm < 1:
            raise IndexCorruptError("implausible header fields")

        info = SlideInfo(
            slide_id=slide_id or path.stem,
            width_base=width,
            height_base=height,
            num_levels=num_levels,
            tile_size=tile_size,
            pixel_size_nm=pixel_size_nm,
            channels=channels,
            format_name="ptc1",
        )
        # dimension law must hold before we trust the index
        top_w, top_h = info.level_extent(num_levels - 1)
        if top_w > tile_size or top_h > tile_size:
            raise IndexCorruptError("top level does not fit a single tile")

        tile_len = tile_size * tile_size * 3
        index: list[list[tuple[int, int]]] = []
        for level in range(num_levels):
            grid_header = fh.read(8)
            if len(grid_header) < 8:
                raise TruncatedFileError("index truncated")
            cols, rows = struct.unpack("<II", grid_header)
            expected = info.tile_grid(level)
            if (cols, rows) != expected:
                raise IndexCorruptError(
                    f"level {level} grid {cols}x{rows} != expected {expected}"
                )
            raw = fh.read(_INDEX_ENTRY.size * cols * rows)
            if len(raw) < _INDEX_ENTRY.size * cols * rows:
                raise TruncatedFileError("index truncated")
            entries = []
            for i in range(cols * rows):
                offset, length = _INDEX_ENTRY.unpack_from(raw, i * _INDEX_ENTRY.size)
                if length != tile_len:
                    raise IndexCorruptError("tile length mismatch in index")
                if offset + length > size:
                    raise TruncatedFileError("tile payload extends past end of file")
                entries.append((offset, length))
            index.append(entries)

    return SlideHandle(path, info, index)


def read_tile(handle, level: int, col: int, row: int) -> np.ndarray:
    """Exact stored bytes of one tile; works on any handle flavor."""
    return handle.read_tile(level, col, row)


def read_region(
    handle,
    level: int,
    x: int,
    y: int,
    w: int,
    h: int,
    max_area: int = 4096 * 4096,
) -> np.ndarray:
    """A w*h crop in level coordinates, stitched from tiles; parts outside
    the level extent come back white."""
    info = handle.info
    if not 0 <= level < info.num_levels:
        raise LevelOutOfRangeError(f"level {level} out of range")
    if w < 1 or h < 1:
        raise ValueError("region dimensions must be >= 1")
    if w * h > max_area:
        raise RegionTooLargeError(f"{w}x{h} exceeds configured cap")

    ts = info.tile_size
    level_w, level_h = info.level_extent(level)
    out = np.full((h, w, 3), WHITE, dtype=np.uint8)

    ix0, iy0 = max(x, 0), max(y, 0)
    ix1, iy1 = min(x + w, level_w), min(y + h, level_h)
    if ix0 >= ix1 or iy0 >= iy1:
        return out

    for row in range(iy0 // ts, (iy1 - 1) // ts + 1):
        for col in range(ix0 // ts, (ix1 - 1) // ts + 1):
            tile = handle.read_tile(level, col, row)
            tx0, ty0 = col * ts, row * ts
            sx0, sy0 = max(ix0, tx0), max(iy0, ty0)
            sx1, sy1 = min(ix1, tx0 + ts), min(iy1, ty0 + ts)
            out[sy0 - y : sy1 - y, sx0 - x : sx1 - x] = tile[
                sy0 - ty0 : sy1 - ty0, sx0 - tx0 : sx1 - tx0
            ]
    return out
