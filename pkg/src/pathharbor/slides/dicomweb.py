"""DICOMweb-style frame addressing over the native tile grid.

Levels map to instances, tiles to 1-based frames in row-major order. The
frames endpoint must return bytes identical to the native tile endpoint.
"""

from __future__ import annotations

from pathharbor.errors import PlatformError
from pathharbor.model.entities import SlideInfo


class FrameOutOfRangeError(PlatformError):
    code = "FRAME_OUT_OF_RANGE"


def dicom_frame_to_tile(info: SlideInfo, level_instance: int, frame_number: int) -> tuple[int, int]:
    """(col, row) for a 1-based frame number at the given level instance."""
    cols, rows = info.tile_grid(level_instance)
    if not 1 <= frame_number <= cols * rows:
        raise FrameOutOfRangeError(
            f"frame {frame_number} outside 1..{cols * rows} at level {level_instance}"
        )
    return (frame_number - 1) % cols, (frame_number - 1) // cols


def instance_metadata(info: SlideInfo, level: int) -> dict:
    """Per-instance attributes in DICOM JSON form (TotalPixelMatrix semantics)."""
    w, h = info.level_extent(level)
    cols, rows = info.tile_grid(level)
    return {
        "00080018": {"vr": "UI", "Value": [f"{info.slide_id}.{level}"]},  # SOPInstanceUID
        "00280008": {"vr": "IS", "Value": [cols * rows]},  # NumberOfFrames
        "00280010": {"vr": "US", "Value": [info.tile_size]},  # Rows (per frame)
        "00280011": {"vr": "US", "Value": [info.tile_size]},  # Columns (per frame)
        "00480006": {"vr": "UL", "Value": [w]},  # TotalPixelMatrixColumns
        "00480007": {"vr": "UL", "Value": [h]},  # TotalPixelMatrixRows
    }
