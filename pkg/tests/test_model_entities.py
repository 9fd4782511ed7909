"""Wire-format roundtrips and slide geometry arithmetic."""

import random

import pytest

from pathharbor.model import (
    AnnotationEntity,
    ClassValue,
    Collection,
    Primitive,
    SlideInfo,
    entity_from_doc,
    entity_to_doc,
    new_id,
)


def test_new_id_is_32_lowercase_hex():
    ids = {new_id() for _ in range(64)}
    assert len(ids) == 64
    for i in ids:
        assert len(i) == 32
        assert all(c in "0123456789abcdef" for c in i)


def test_slide_info_level_extents():
    info = SlideInfo("s" * 32, 1024, 768, 3, 256, 499)
    assert info.level_extent(0) == (1024, 768)
    assert info.level_extent(1) == (512, 384)
    assert info.level_extent(2) == (256, 192)
    assert info.tile_grid(0) == (4, 3)
    assert info.tile_grid(2) == (1, 1)
    with pytest.raises(ValueError):
        info.level_extent(3)


def test_slide_info_doc_roundtrip():
    info = SlideInfo("a" * 32, 1000, 700, 3, 256, 250, 3, "ptc1")
    assert SlideInfo.from_doc(info.to_doc()) == info


def _sample_entities():
    slide = "f" * 32
    point = AnnotationEntity(new_id(), "point", [(5, 9)], 499.0, slide, "p", "scope")
    rect = AnnotationEntity(
        new_id(), "rectangle", [(0, 0)], 499.0, slide, "roi", "user", width=100, height=80
    )
    circle = AnnotationEntity(
        new_id(), "circle", [(50, 50)], 499.0, slide, "c", "user", radius=10
    )
    poly = AnnotationEntity(
        new_id(), "polygon", [(0, 0), (10, 0), (5, 8)], 499.0, slide, "t", "user"
    )
    prim = Primitive(new_id(), "float", 30.0, "tps_score", rect.id)
    cls = ClassValue(new_id(), "org.acme.tpsdemo.v1.classes.tumor.positive", point.id)
    coll = Collection(new_id(), "point", [point], rect.id)
    nested = Collection(new_id(), "collection", [coll], None)
    return [point, rect, circle, poly, prim, cls, coll, nested]


@pytest.mark.parametrize("entity", _sample_entities(), ids=lambda e: type(e).__name__ + "-" + getattr(e, "kind", "x"))
def test_entity_doc_roundtrip(entity):
    doc = entity_to_doc(entity)
    back = entity_from_doc(doc)
    assert entity_to_doc(back) == doc
    assert back == entity


def test_entity_from_doc_rejects_garbage():
    with pytest.raises(ValueError):
        entity_from_doc({"kind": "hexagon"})
    with pytest.raises(ValueError):
        entity_from_doc({"kind": "point"})
    with pytest.raises(ValueError):
        entity_from_doc("not a dict")


def test_primitive_value_kinds():
    assert Primitive("x", "integer", 3).check_value() is None
    assert Primitive("x", "integer", True).check_value() is not None
    assert Primitive("x", "float", 1.5).check_value() is None
    assert Primitive("x", "float", 2).check_value() is None
    assert Primitive("x", "float", float("nan")).check_value() is not None
    assert Primitive("x", "float", float("inf")).check_value() is not None
    assert Primitive("x", "bool", True).check_value() is None
    assert Primitive("x", "string", "hi").check_value() is None
    assert Primitive("x", "string", 5).check_value() is not None


def test_roundtrip_fuzz_points():
    rng = random.Random(7)
    slide = "0" * 32
    for _ in range(200):
        coords = [(rng.randrange(0, 4096), rng.randrange(0, 4096)) for _ in range(rng.randint(2, 6))]
        a = AnnotationEntity(new_id(), "line", coords, rng.random() * 1000, slide, "l")
        assert entity_from_doc(entity_to_doc(a)) == a
