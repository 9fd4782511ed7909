"""Shared domain vocabulary: slides, annotations, primitives, classes, collections, EADs."""

from pathharbor.model.entities import (
    ANNOTATION_KINDS,
    PRIMITIVE_KINDS,
    AnnotationEntity,
    ClassValue,
    Collection,
    Entity,
    Primitive,
    SlideInfo,
    entity_from_doc,
    entity_to_doc,
    new_id,
)
from pathharbor.model.geometry import check_annotation_geometry
from pathharbor.model.ead import (
    GLOBAL_NAMESPACE,
    AppDescription,
    ValidationReport,
    Violation,
    parse_ead,
    qualify_class,
    validate_ead,
)
from pathharbor.model.payloads import validate_payload
from pathharbor.model.store import EntityStore, InMemoryEntityStore, resolve_reference

__all__ = [
    "ANNOTATION_KINDS",
    "PRIMITIVE_KINDS",
    "AnnotationEntity",
    "ClassValue",
    "Collection",
    "Entity",
    "Primitive",
    "SlideInfo",
    "entity_from_doc",
    "entity_to_doc",
    "new_id",
    "check_annotation_geometry",
    "GLOBAL_NAMESPACE",
    "AppDescription",
    "ValidationReport",
    "Violation",
    "parse_ead",
    "qualify_class",
    "validate_ead",
    "validate_payload",
    "EntityStore",
    "InMemoryEntityStore",
    "resolve_reference",
]
