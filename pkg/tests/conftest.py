import json
from pathlib import Path

import pytest

FIXTURE_NAMESPACE = "org.acme.tpsdemo.v1"


def minimal_ead_doc() -> dict:
    """Smallest legal contract: one wsi input, one rectangle input, one
    collection-of-point output."""
    return {
        "schema_version": 1,
        "namespace": FIXTURE_NAMESPACE,
        "name": "TPS demo",
        "description": "demo app",
        "modes": {
            "standalone": {"inputs": ["slide", "roi"], "outputs": ["my_cells"]},
        },
        "io": {
            "slide": {"type": "wsi"},
            "roi": {"type": "rectangle"},
            "my_cells": {
                "type": "collection",
                "items": {"type": "point"},
                "reference_to": "inputs.roi",
            },
        },
        "classes": {
            "roi": {},
            "tumor": {"positive": {}, "negative": {}},
        },
    }


@pytest.fixture
def ead_doc():
    return minimal_ead_doc()


@pytest.fixture
def write_json(tmp_path: Path):
    def _write(name: str, payload) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write
