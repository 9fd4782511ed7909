"""Output-side contract enforcement: does a payload satisfy its io declaration?

Checks run in a fixed order and stop at the first violation so error codes are
deterministic: declared type, collection shape, class declaration, geometry
bounds, then reference wiring.
"""

from __future__ import annotations

from typing import Callable

from pathharbor.model.ead import AppDescription, class_value_declared
from pathharbor.model.entities import (
    ANNOTATION_KINDS,
    MAX_COLLECTION_DEPTH,
    AnnotationEntity,
    ClassValue,
    Collection,
    Entity,
    Primitive,
    SlideInfo,
    entity_kind,
)
from pathharbor.model.geometry import check_annotation_geometry


def _expected_kind(io_type: str) -> str:
    # io types map 1:1 onto entity kinds except wsi (a bound slide, not an entity)
    return io_type


def _check_against_spec(
    payload: Entity,
    spec: dict,
    ead: AppDescription,
    slide_info: SlideInfo | None,
    depth: int,
) -> str | None:
    io_type = spec.get("type")
    if io_type == "wsi":
        return "TYPE_MISMATCH"

    kind = entity_kind(payload)

    if io_type == "collection":
        if not isinstance(payload, Collection):
            return "TYPE_MISMATCH"
        if depth > MAX_COLLECTION_DEPTH:
            return "COLLECTION_TOO_DEEP"
        item_spec = spec.get("items") or {}
        expected_item = _expected_kind(item_spec.get("type", ""))
        if payload.item_kind != expected_item:
            return "TYPE_MISMATCH"
        for item in payload.items:
            if entity_kind(item) != payload.item_kind:
                return "HETEROGENEOUS_COLLECTION"
            code = _check_against_spec(item, item_spec, ead, slide_info, depth + 1)
            if code:
                return code
        return None

    if kind != _expected_kind(io_type):
        return "TYPE_MISMATCH"

    if isinstance(payload, Primitive):
        if payload.check_value() is not None:
            return "TYPE_MISMATCH"
        return None

    if isinstance(payload, ClassValue):
        allowed = spec.get("classes")
        if not class_value_declared(ead, payload.value):
            return "UNDECLARED_CLASS"
        if allowed:
            qualified = {f"{ead.namespace}.classes.{suffix}" for suffix in allowed}
            if payload.value not in qualified:
                return "UNDECLARED_CLASS"
        return None

    if isinstance(payload, AnnotationEntity):
        if slide_info is None:
            return None
        violation = check_annotation_geometry(payload, slide_info)
        if violation:
            return violation
        return None

    return "TYPE_MISMATCH"


def _collect_references(payload: Entity) -> list[str]:
    refs = []
    stack: list[Entity] = [payload]
    while stack:
        node = stack.pop()
        ref = getattr(node, "reference", None)
        if ref:
            refs.append(ref)
        if isinstance(node, Collection):
            stack.extend(node.items)
    return refs


def validate_payload(
    ead: AppDescription,
    key: str,
    payload: Entity,
    slide_info: SlideInfo | None = None,
    bound: dict[str, str] | None = None,
    resolve: Callable[[str], object] | None = None,
) -> str | None:
    """None when the payload satisfies the io declaration for ``key``, else a code.

    ``bound`` maps io keys to the entity ids already attached to the job, used
    to enforce reference_to wiring. ``resolve`` looks up entity/slide ids so
    every contained reference is checked to exist.

    Codes: TYPE_MISMATCH, OUT_OF_BOUNDS, DEGENERATE_SHAPE, UNDECLARED_CLASS,
    BAD_REFERENCE, HETEROGENEOUS_COLLECTION, UNKNOWN_KEY.
    """
    spec = ead.io.get(key)
    if spec is None:
        return "UNKNOWN_KEY"

    code = _check_against_spec(payload, spec, ead, slide_info, depth=1)
    if code:
        return code

    ref_to = spec.get("reference_to")
    if ref_to:
        target_key = ref_to.split(".", 1)[1]
        expected_id = (bound or {}).get(target_key)
        actual = getattr(payload, "reference", None)
        if expected_id is None or actual != expected_id:
            return "BAD_REFERENCE"

    if resolve is not None:
        for ref in _collect_references(payload):
            if resolve(ref) is None:
                return "BAD_REFERENCE"

    return None
