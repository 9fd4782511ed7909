"""Slide storage and serving: pyramids, the PTC1 container, synthetic slides,
anonymizing import, and the tile/region/DICOMweb HTTP endpoints."""

from pathharbor.slides.pyramid import build_pyramid, level_dimensions, pyramid_level_count
from pathharbor.slides.container import (
    SlideHandle,
    open_container,
    read_region,
    read_tile,
    write_container,
)
from pathharbor.slides.synthetic import (
    GroundTruthSheet,
    SlideSpec,
    generate_synthetic_slide,
)
from pathharbor.slides.store import SlideStore

__all__ = [
    "build_pyramid",
    "level_dimensions",
    "pyramid_level_count",
    "SlideHandle",
    "open_container",
    "read_region",
    "read_tile",
    "write_container",
    "GroundTruthSheet",
    "SlideSpec",
    "generate_synthetic_slide",
    "SlideStore",
]
