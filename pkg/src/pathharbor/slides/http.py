"""HTTP surface of the slide service: native tile/region API and the
DICOMweb-style gateway.

Raw pixel responses use content type ``image/x-raw-rgb8`` with an
``X-Tile-Size`` header on tile endpoints. When an authorizer is installed
(in-platform deployments), every request must carry a bearer token scoped to
the slide; without one the service is open (standalone serving).
"""

from __future__ import annotations

from typing import Callable

from fastapi import APIRouter, Header, HTTPException, Response

from pathharbor.errors import NotFoundError, PlatformError
from pathharbor.slides.container import read_region
from pathharbor.slides.dicomweb import dicom_frame_to_tile, instance_metadata
from pathharbor.slides.store import SlideStore

RAW_RGB8 = "image/x-raw-rgb8"

# authorize(token_secret, resource) -> bool; resource is ("slide", slide_id)
Authorizer = Callable[[str | None, tuple], bool]


def _bearer(authorization: str | None) -> str | None:
    if authorization and authorization.lower().startswith("bearer "):
        return authorization[7:]
    return None


def build_slide_router(store: SlideStore, authorizer: Authorizer | None = None) -> APIRouter:
    router = APIRouter()

    def check_access(slide_id: str, authorization: str | None) -> None:
        if authorizer is None:
            return
        if not authorizer(_bearer(authorization), ("slide", slide_id)):
            raise HTTPException(status_code=403, detail="UNAUTHORIZED")

    def get_handle(slide_id: str):
        try:
            return store.get_handle(slide_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=exc.code) from exc

    @router.get("/v1/slides")
    def list_slides():
        return {"slides": [info.to_doc() for info in store.list_slides()]}

    @router.get("/v1/slides/{slide_id}/info")
    def slide_info(slide_id: str, authorization: str | None = Header(default=None)):
        check_access(slide_id, authorization)
        return get_handle(slide_id).info.to_doc()

    @router.get("/v1/slides/{slide_id}/tile/level/{level}/position/{col}/{row}")
    def tile(
        slide_id: str,
        level: int,
        col: int,
        row: int,
        authorization: str | None = Header(default=None),
    ):
        check_access(slide_id, authorization)
        handle = get_handle(slide_id)
        try:
            data = handle.read_tile(level, col, row)
        except PlatformError as exc:
            raise HTTPException(status_code=404, detail=exc.code) from exc
        return Response(
            content=data.tobytes(),
            media_type=RAW_RGB8,
            headers={"X-Tile-Size": str(handle.info.tile_size)},
        )

    @router.get("/v1/slides/{slide_id}/region/level/{level}/start/{x}/{y}/size/{w}/{h}")
    def region(
        slide_id: str,
        level: int,
        x: int,
        y: int,
        w: int,
        h: int,
        authorization: str | None = Header(default=None),
    ):
        check_access(slide_id, authorization)
        handle = get_handle(slide_id)
        try:
            data = read_region(handle, level, x, y, w, h)
        except PlatformError as exc:
            status = 404 if exc.code == "LEVEL_OUT_OF_RANGE" else 400
            raise HTTPException(status_code=status, detail=exc.code) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return Response(
            content=data.tobytes(),
            media_type=RAW_RGB8,
            headers={"X-Region-Width": str(w), "X-Region-Height": str(h)},
        )

    # -- DICOMweb-style gateway ---------------------------------------------

    @router.get("/dicomweb/studies/{slide_id}/series/0/instances/{level}/frames/{frame}")
    def dicom_frame(
        slide_id: str,
        level: int,
        frame: int,
        authorization: str | None = Header(default=None),
    ):
        check_access(slide_id, authorization)
        handle = get_handle(slide_id)
        try:
            col, row = dicom_frame_to_tile(handle.info, level, frame)
            data = handle.read_tile(level, col, row)
        except PlatformError as exc:
            raise HTTPException(status_code=404, detail=exc.code) from exc
        return Response(content=data.tobytes(), media_type=RAW_RGB8)

    @router.get("/dicomweb/studies/{slide_id}/series/0/metadata")
    def dicom_metadata(slide_id: str, authorization: str | None = Header(default=None)):
        check_access(slide_id, authorization)
        info = get_handle(slide_id).info
        return [instance_metadata(info, level) for level in range(info.num_levels)]

    return router
