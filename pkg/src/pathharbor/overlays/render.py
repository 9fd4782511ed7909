"""Server-side rendering of overlay tiles to RGBA8.

Rendering is pure representation: it reads the same float values any client
could fetch and never mutates them. Vectorized, but defined pixel-for-pixel
by map_value_to_color (the scalar mapping is the contract; tests hold the
two together).
"""

from __future__ import annotations

import numpy as np

from pathharbor.overlays.colormaps import ColormapSpec, KindMismatchError
from pathharbor.overlays.model import OverlayPyramid


def render_value_tile(
    values: np.ndarray, quantity, colormap: ColormapSpec, opacity: float
) -> np.ndarray:
    """RGBA8 array for a float tile; nodata pixels come out fully transparent
    and every alpha is scaled by ``opacity`` (round-half-up)."""
    if colormap.semantic_kind != quantity.semantic_kind:
        raise KindMismatchError(
            f"colormap serves {colormap.semantic_kind}, quantity is {quantity.semantic_kind}"
        )
    if not 0.0 <= opacity <= 1.0:
        raise ValueError("opacity must be within [0, 1]")

    lo, hi = quantity.range
    t = (values.astype(np.float64) - lo) / (hi - lo)
    nodata = np.isnan(t)
    t = np.clip(np.nan_to_num(t, nan=0.0), 0.0, 1.0)

    ts = np.array([p[0] for p in colormap.control_points])
    channels = np.array([p[1] for p in colormap.control_points], dtype=np.float64)

    # bracketing segment per pixel: index i such that ts[i] <= t <= ts[i+1]
    seg = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2)
    t0, t1 = ts[seg], ts[seg + 1]
    frac = (t - t0) / (t1 - t0)

    c0 = channels[seg]
    c1 = channels[seg + 1]
    rgba = np.floor(c0 + (c1 - c0) * frac[..., None] + 0.5).astype(np.float64)

    rgba[nodata] = (0.0, 0.0, 0.0, 0.0)
    rgba[..., 3] = np.floor(rgba[..., 3] * opacity + 0.5)
    return rgba.astype(np.uint8)


def render_overlay_tile(
    overlay: OverlayPyramid,
    level: int,
    col: int,
    row: int,
    colormap: ColormapSpec,
    opacity: float,
) -> np.ndarray:
    values = overlay.value_tile(level, col, row)
    return render_value_tile(values, overlay.quantity, colormap, opacity)
