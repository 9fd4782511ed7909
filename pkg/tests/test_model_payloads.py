"""validate_payload against the io declarations of an EAD."""

import pytest

from pathharbor.model import (
    AnnotationEntity,
    ClassValue,
    Collection,
    InMemoryEntityStore,
    Primitive,
    SlideInfo,
    new_id,
    parse_ead,
    validate_payload,
)

SLIDE_ID = "d" * 32


@pytest.fixture
def info():
    return SlideInfo(SLIDE_ID, 1024, 768, 3, 256, 499)


@pytest.fixture
def ead(ead_doc):
    doc = ead_doc
    doc["io"]["tps_score"] = {"type": "float"}
    doc["io"]["cell_classes"] = {
        "type": "collection",
        "items": {"type": "class", "classes": ["tumor.positive", "tumor.negative"]},
    }
    doc["modes"]["standalone"]["outputs"] += ["tps_score", "cell_classes"]
    return parse_ead(doc)


def _point(x, y, ref=SLIDE_ID):
    return AnnotationEntity(new_id(), "point", [(x, y)], 499.0, ref, "", "scope")


def _roi():
    return AnnotationEntity(
        new_id(), "rectangle", [(0, 0)], 499.0, SLIDE_ID, "roi", "user", width=512, height=512
    )


def test_collection_of_points_ok(ead, info):
    roi = _roi()
    coll = Collection(new_id(), "point", [_point(1, 2), _point(3, 4), _point(5, 6)], roi.id)
    bound = {"roi": roi.id}
    assert validate_payload(ead, "my_cells", coll, info, bound) is None


def test_point_at_closed_boundary(ead, info):
    roi = _roi()
    bound = {"roi": roi.id}
    ok = Collection(new_id(), "point", [_point(1024, 5)], roi.id)
    assert validate_payload(ead, "my_cells", ok, info, bound) is None
    bad = Collection(new_id(), "point", [_point(1025, 5)], roi.id)
    assert validate_payload(ead, "my_cells", bad, info, bound) == "OUT_OF_BOUNDS"


def test_heterogeneous_collection(ead, info):
    roi = _roi()
    mixed = Collection(new_id(), "point", [_point(1, 1), _roi()], roi.id)
    assert validate_payload(ead, "my_cells", mixed, info, {"roi": roi.id}) == "HETEROGENEOUS_COLLECTION"


def test_unknown_key(ead, info):
    assert validate_payload(ead, "nope", _point(0, 0), info) == "UNKNOWN_KEY"


def test_type_mismatch_scalar(ead, info):
    assert validate_payload(ead, "tps_score", Primitive(new_id(), "integer", 3), info) == "TYPE_MISMATCH"
    assert validate_payload(ead, "tps_score", Primitive(new_id(), "float", 30.0), info) is None
    assert (
        validate_payload(ead, "tps_score", Primitive(new_id(), "float", float("nan")), info)
        == "TYPE_MISMATCH"
    )


def test_class_values(ead, info):
    ok = Collection(
        new_id(),
        "class",
        [ClassValue(new_id(), "org.acme.tpsdemo.v1.classes.tumor.positive", SLIDE_ID)],
    )
    assert validate_payload(ead, "cell_classes", ok, info) is None
    undeclared = Collection(
        new_id(),
        "class",
        [ClassValue(new_id(), "org.acme.tpsdemo.v1.classes.stroma", SLIDE_ID)],
    )
    assert validate_payload(ead, "cell_classes", undeclared, info) == "UNDECLARED_CLASS"
    # declared in the tree but excluded by the io allowlist
    excluded = Collection(
        new_id(),
        "class",
        [ClassValue(new_id(), "org.acme.tpsdemo.v1.classes.roi", SLIDE_ID)],
    )
    assert validate_payload(ead, "cell_classes", excluded, info) == "UNDECLARED_CLASS"


def test_reference_to_enforced(ead, info):
    roi = _roi()
    other = _roi()
    coll = Collection(new_id(), "point", [_point(1, 1)], reference=other.id)
    assert validate_payload(ead, "my_cells", coll, info, {"roi": roi.id}) == "BAD_REFERENCE"
    assert validate_payload(ead, "my_cells", coll, info, {}) == "BAD_REFERENCE"
    coll.reference = roi.id
    assert validate_payload(ead, "my_cells", coll, info, {"roi": roi.id}) is None


def test_contained_references_must_resolve(ead, info):
    store = InMemoryEntityStore()
    store.add_slide(SLIDE_ID)
    roi = _roi()
    store.put(roi)
    ghost = "e" * 32
    coll = Collection(new_id(), "point", [_point(1, 1, ref=ghost)], roi.id)
    result = validate_payload(
        ead, "my_cells", coll, info, {"roi": roi.id}, resolve=lambda i: store.get_entity(i) or (i if store.has_slide(i) else None)
    )
    assert result == "BAD_REFERENCE"


def test_accepted_payload_is_referentially_closed(ead, info):
    """Invariant: every id contained in an accepted payload resolves."""
    from pathharbor.model import resolve_reference

    store = InMemoryEntityStore()
    store.add_slide(SLIDE_ID)
    roi = _roi()
    store.put(roi)
    points = [_point(i * 10, i * 5, ref=roi.id) for i in range(1, 6)]
    coll = Collection(new_id(), "point", points, roi.id)

    def resolver(i):
        if store.has_slide(i):
            return i
        return store.get_entity(i)

    assert validate_payload(ead, "my_cells", coll, info, {"roi": roi.id}, resolve=resolver) is None
    store.put(coll)
    for entity_id in [coll.id] + [p.id for p in points]:
        chain = resolve_reference(entity_id, store)
        assert chain[-1] == SLIDE_ID
