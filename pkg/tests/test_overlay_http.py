"""Overlay HTTP endpoints: binary float payloads, rendering, registry."""

import numpy as np
import pytest
from fastapi import FastAPI
from fastapi.testclient import TestClient

from pathharbor.errors import NotFoundError
from pathharbor.model.entities import SlideInfo
from pathharbor.overlays.http import build_overlay_router
from pathharbor.overlays.model import OverlayStore

INFO = SlideInfo("cd" * 16, 512, 512, 2, 256, 250)


@pytest.fixture
def client():
    store = OverlayStore()

    def lookup(slide_id):
        if slide_id == INFO.slide_id:
            return INFO
        raise NotFoundError(slide_id)

    app = FastAPI()
    app.include_router(build_overlay_router(store, lookup))
    return TestClient(app)


def _create(client):
    resp = client.post(
        "/v1/overlays",
        json={
            "slide_id": INFO.slide_id,
            "produced_by": "job-x",
            "quantity": {
                "name": "tumor probability",
                "unit": "dimensionless",
                "range": [0.0, 1.0],
                "semantic_kind": "probability",
            },
        },
    )
    assert resp.status_code == 200
    return resp.json()["overlay_id"]


def test_create_write_read_roundtrip(client):
    overlay_id = _create(client)
    tile = np.linspace(0, 1, 256 * 256, dtype=np.float32).reshape(256, 256)
    put = client.put(
        f"/v1/overlays/{overlay_id}/tiles/0/0/0", content=tile.tobytes()
    )
    assert put.status_code == 200
    got = client.get(f"/v1/overlays/{overlay_id}/value/0/0/0")
    assert got.status_code == 200
    assert got.content == tile.tobytes()


def test_write_wrong_length(client):
    overlay_id = _create(client)
    resp = client.put(f"/v1/overlays/{overlay_id}/tiles/0/0/0", content=b"123")
    assert resp.status_code == 400
    assert resp.json()["detail"] == "GEOMETRY_MISMATCH"


def test_write_out_of_range_value(client):
    overlay_id = _create(client)
    tile = np.full((256, 256), 2.0, dtype=np.float32)
    resp = client.put(f"/v1/overlays/{overlay_id}/tiles/0/0/0", content=tile.tobytes())
    assert resp.status_code == 400
    assert resp.json()["detail"] == "VALUE_OUT_OF_RANGE"


def test_render_and_registry(client):
    overlay_id = _create(client)
    tile = np.full((256, 256), 0.5, dtype=np.float32)
    client.put(f"/v1/overlays/{overlay_id}/tiles/0/0/0", content=tile.tobytes())
    rendered = client.get(f"/v1/overlays/{overlay_id}/render/0/0/0?opacity=1.0")
    assert rendered.status_code == 200
    assert len(rendered.content) == 256 * 256 * 4
    registry = client.get("/v1/colormaps").json()
    assert registry["defaults_by_kind"]["probability"] == "seq-indigo-gold"
    assert {c["colormap_id"] for c in registry["colormaps"]} >= {
        "seq-indigo-gold",
        "div-blue-white-red",
    }
    wrong_kind = client.get(
        f"/v1/overlays/{overlay_id}/render/0/0/0?colormap=div-blue-white-red"
    )
    assert wrong_kind.status_code == 400
    assert wrong_kind.json()["detail"] == "KIND_MISMATCH"


def test_list_by_slide_and_unknown(client):
    overlay_id = _create(client)
    listed = client.get("/v1/overlays", params={"slide_id": INFO.slide_id}).json()
    assert [o["overlay_id"] for o in listed["overlays"]] == [overlay_id]
    assert client.get(f"/v1/overlays/{'0'*32}/value/0/0/0").status_code == 404
    bad_slide = client.post(
        "/v1/overlays",
        json={"slide_id": "nope", "quantity": PROB_DOC},
    )
    assert bad_slide.status_code == 404


PROB_DOC = {
    "name": "p",
    "unit": "dimensionless",
    "range": [0.0, 1.0],
    "semantic_kind": "probability",
}
