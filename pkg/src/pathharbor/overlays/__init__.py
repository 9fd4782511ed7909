"""Pixel-wise explainability overlays: float tile pyramids with semantic
quantity descriptors, rendered server-side through a shared colormap registry."""

from pathharbor.overlays.model import OverlayStore, QuantityDescriptor
from pathharbor.overlays.colormaps import (
    COLORMAP_REGISTRY,
    ColormapSpec,
    default_colormap_for,
    map_value_to_color,
)
from pathharbor.overlays.render import render_overlay_tile

__all__ = [
    "OverlayStore",
    "QuantityDescriptor",
    "COLORMAP_REGISTRY",
    "ColormapSpec",
    "default_colormap_for",
    "map_value_to_color",
    "render_overlay_tile",
]
