"""Reader abstraction over concrete slide formats.

Two readers exist: the native PTC1 container and a raw binary PPM (P6)
reader that builds its pyramid on the fly. Both expose the same handle
surface, proving the plug-in seam real scanner formats would use.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from pathharbor.errors import PlatformError
from pathharbor.model.entities import SlideInfo
from pathharbor.slides import container as ptc
from pathharbor.slides.pyramid import build_pyramid, pyramid_level_count


class SourceUnreadableError(PlatformError):
    code = "SOURCE_UNREADABLE"


class MemorySlideHandle:
    """Slide handle backed by in-memory level buffers (used by the PPM
    reader and by tests); mirrors the container handle surface."""

    def __init__(self, info: SlideInfo, levels: list[np.ndarray]):
        self.info = info
        self.levels = levels

    def close(self) -> None:
        pass

    def read_tile(self, level: int, col: int, row: int) -> np.ndarray:
        info = self.info
        if not 0 <= level < info.num_levels:
            raise ptc.LevelOutOfRangeError(f"level {level} out of range")
        cols, rows = info.tile_grid(level)
        if not (0 <= col < cols and 0 <= row < rows):
            raise ptc.TileOutOfRangeError(f"tile ({col},{row}) outside {cols}x{rows} grid")
        return ptc.extract_tile(self.levels[level], info.tile_size, col, row)


def parse_ppm(path: Path) -> np.ndarray:
    """Binary P6 PPM, maxval 255, into an HxWx3 array."""
    data = path.read_bytes()
    if not data.startswith(b"P6"):
        raise SourceUnreadableError(f"{path} is not a binary PPM")
    # header: P6 <width> <height> <maxval> then a single whitespace byte
    fields: list[bytes] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise SourceUnreadableError("PPM header truncated")
        fields.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise SourceUnreadableError("bad PPM header") from exc
    if maxval != 255 or width < 1 or height < 1:
        raise SourceUnreadableError("unsupported PPM variant")
    pixels = data[pos : pos + width * height * 3]
    if len(pixels) < width * height * 3:
        raise SourceUnreadableError("PPM pixel data truncated")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width, 3).copy()


def write_ppm(path: Path, image: np.ndarray) -> None:
    header = f"P6\n{image.shape[1]} {image.shape[0]}\n255\n".encode("ascii")
    path.write_bytes(header + np.ascontiguousarray(image, dtype=np.uint8).tobytes())


def open_ppm(
    path: str | Path,
    slide_id: str | None = None,
    tile_size: int = 256,
    pixel_size_nm: int = 250,
) -> MemorySlideHandle:
    path = Path(path)
    base = parse_ppm(path)
    levels = build_pyramid(base, tile_size)
    info = SlideInfo(
        slide_id=slide_id or path.stem,
        width_base=base.shape[1],
        height_base=base.shape[0],
        num_levels=pyramid_level_count(base.shape[1], base.shape[0], tile_size),
        tile_size=tile_size,
        pixel_size_nm=pixel_size_nm,
        channels=3,
        format_name="ppm",
    )
    return MemorySlideHandle(info, levels)


def open_slide(path: str | Path, slide_id: str | None = None):
    """Dispatch on format; PTC1 by magic, PPM by magic, else unreadable."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            magic = fh.read(2)
    except OSError as exc:
        raise SourceUnreadableError(str(exc)) from exc
    if magic == b"PT":
        return ptc.open_container(path, slide_id)
    if magic == b"P6":
        return open_ppm(path, slide_id)
    raise SourceUnreadableError(f"{path}: unrecognized slide format")
