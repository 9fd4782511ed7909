"""Overlay HTTP endpoints: descriptor creation, float tile write/read,
colormapped rendering, and the colormap registry."""

from __future__ import annotations

from typing import Callable

import numpy as np
from fastapi import APIRouter, Header, HTTPException, Request, Response

from pathharbor.errors import NotFoundError, PlatformError
from pathharbor.overlays.colormaps import (
    COLORMAP_REGISTRY,
    DEFAULTS_BY_KIND,
    default_colormap_for,
)
from pathharbor.overlays.model import OverlayStore, QuantityDescriptor
from pathharbor.overlays.render import render_overlay_tile

FLOAT_TILE = "application/x-float32-tile"
RGBA_TILE = "image/x-raw-rgba8"

Authorizer = Callable[[str | None, tuple], bool]


def _bearer(authorization: str | None) -> str | None:
    if authorization and authorization.lower().startswith("bearer "):
        return authorization[7:]
    return None


def build_overlay_router(
    overlays: OverlayStore,
    slide_info_lookup,
    authorizer: Authorizer | None = None,
) -> APIRouter:
    router = APIRouter()

    def check_write_access(slide_id: str, authorization: str | None) -> None:
        if authorizer is None:
            return
        if not authorizer(_bearer(authorization), ("slide", slide_id)):
            raise HTTPException(status_code=403, detail="UNAUTHORIZED")

    def get_overlay(overlay_id: str):
        try:
            return overlays.get(overlay_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=exc.code) from exc

    @router.post("/v1/overlays")
    def create_overlay(body: dict, authorization: str | None = Header(default=None)):
        slide_id = body.get("slide_id", "")
        check_write_access(slide_id, authorization)
        try:
            info = slide_info_lookup(slide_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=exc.code) from exc
        try:
            quantity = QuantityDescriptor.from_doc(body["quantity"])
        except (KeyError, ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=f"bad quantity: {exc}") from exc
        overlay = overlays.create(info, body.get("produced_by", ""), quantity)
        return overlay.to_doc()

    @router.put("/v1/overlays/{overlay_id}/tiles/{level}/{col}/{row}")
    async def write_tile(
        overlay_id: str,
        level: int,
        col: int,
        row: int,
        request: Request,
        authorization: str | None = Header(default=None),
    ):
        overlay = get_overlay(overlay_id)
        check_write_access(overlay.slide_info.slide_id, authorization)
        payload = await request.body()
        ts = overlay.slide_info.tile_size
        if len(payload) != ts * ts * 4:
            raise HTTPException(status_code=400, detail="GEOMETRY_MISMATCH")
        tile = np.frombuffer(payload, dtype="<f4").reshape(ts, ts)
        try:
            overlay.write_tile(level, col, row, tile)
        except PlatformError as exc:
            status = 409 if exc.code == "SEALED" else 400
            raise HTTPException(status_code=status, detail=exc.code) from exc
        return {"ok": True}

    @router.get("/v1/overlays/{overlay_id}/value/{level}/{col}/{row}")
    def value_tile(overlay_id: str, level: int, col: int, row: int):
        overlay = get_overlay(overlay_id)
        try:
            tile = overlay.value_tile(level, col, row)
        except PlatformError as exc:
            raise HTTPException(status_code=404, detail=exc.code) from exc
        return Response(
            content=tile.astype("<f4").tobytes(), media_type=FLOAT_TILE
        )

    @router.get("/v1/overlays/{overlay_id}/render/{level}/{col}/{row}")
    def render_tile(
        overlay_id: str,
        level: int,
        col: int,
        row: int,
        colormap: str | None = None,
        opacity: float = 1.0,
    ):
        overlay = get_overlay(overlay_id)
        if colormap is None:
            spec = default_colormap_for(overlay.quantity.semantic_kind)
        else:
            spec = COLORMAP_REGISTRY.get(colormap)
            if spec is None:
                raise HTTPException(status_code=404, detail="unknown colormap")
        try:
            rgba = render_overlay_tile(overlay, level, col, row, spec, opacity)
        except PlatformError as exc:
            status = 404 if "RANGE" in exc.code else 400
            raise HTTPException(status_code=status, detail=exc.code) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return Response(content=rgba.tobytes(), media_type=RGBA_TILE)

    @router.get("/v1/overlays")
    def list_overlays(slide_id: str):
        return {"overlays": [o.to_doc() for o in overlays.for_slide(slide_id)]}

    @router.get("/v1/colormaps")
    def colormaps():
        return {
            "colormaps": [spec.to_doc() for spec in COLORMAP_REGISTRY.values()],
            "defaults_by_kind": DEFAULTS_BY_KIND,
        }

    return router
