"""Domain entities and their JSON wire encoding.

All coordinates are integer base-level pixels. Ids are 128-bit random
identifiers rendered as 32 lowercase hex characters. Wire documents use
lower_snake_case field names throughout.
"""

from __future__ import annotations

import math
import uuid
from dataclasses import dataclass, field
from typing import Union

ANNOTATION_KINDS = ("point", "line", "rectangle", "polygon", "circle", "arrow")
PRIMITIVE_KINDS = ("integer", "float", "bool", "string")

_PRIMITIVE_PY_TYPES = {
    "integer": int,
    "float": float,
    "bool": bool,
    "string": str,
}

MAX_COLLECTION_DEPTH = 3


def new_id() -> str:
    """Fresh 128-bit random identifier, 32 lowercase hex chars."""
    return uuid.uuid4().hex


@dataclass(frozen=True)
class SlideInfo:
    """Pyramid geometry and pixel metadata of one whole-slide image."""

    slide_id: str
    width_base: int
    height_base: int
    num_levels: int
    tile_size: int
    pixel_size_nm: int
    channels: int = 3
    format_name: str = "ptc1"

    def level_extent(self, level: int) -> tuple[int, int]:
        """(width, height) of the given level; level i is downsampled by 2**i."""
        if not 0 <= level < self.num_levels:
            raise ValueError(f"level {level} out of range [0, {self.num_levels})")
        return (
            math.ceil(self.width_base / (1 << level)),
            math.ceil(self.height_base / (1 << level)),
        )

    def tile_grid(self, level: int) -> tuple[int, int]:
        """(grid_cols, grid_rows) of the tile grid at the given level."""
        w, h = self.level_extent(level)
        return math.ceil(w / self.tile_size), math.ceil(h / self.tile_size)

    def to_doc(self) -> dict:
        return {
            "slide_id": self.slide_id,
            "width_base": self.width_base,
            "height_base": self.height_base,
            "num_levels": self.num_levels,
            "tile_size": self.tile_size,
            "pixel_size_nm": self.pixel_size_nm,
            "channels": self.channels,
            "format_name": self.format_name,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SlideInfo":
        return cls(
            slide_id=doc["slide_id"],
            width_base=int(doc["width_base"]),
            height_base=int(doc["height_base"]),
            num_levels=int(doc["num_levels"]),
            tile_size=int(doc["tile_size"]),
            pixel_size_nm=int(doc["pixel_size_nm"]),
            channels=int(doc.get("channels", 3)),
            format_name=doc.get("format_name", "ptc1"),
        )


@dataclass
class AnnotationEntity:
    """A drawn shape anchored to base-level pixels of one slide.

    ``coordinates`` holds vertex pairs: a single pair for point (the point),
    rectangle (upper-left corner) and circle (center); two pairs for arrow
    (tail, head); two or more for line; three or more for polygon.
    """

    id: str
    kind: str
    coordinates: list[tuple[int, int]]
    npp_created: float
    reference: str
    name: str = ""
    creator: str = "user"
    width: int | None = None
    height: int | None = None
    radius: int | None = None


@dataclass
class Primitive:
    """Scalar app output (e.g. a score) optionally referencing another entity."""

    id: str
    kind: str
    value: Union[int, float, bool, str]
    name: str = ""
    reference: str | None = None

    def check_value(self) -> str | None:
        """None if the value matches the declared kind, else a reason."""
        if self.kind not in PRIMITIVE_KINDS:
            return f"unknown primitive kind {self.kind!r}"
        expected = _PRIMITIVE_PY_TYPES[self.kind]
        if self.kind == "float":
            if isinstance(self.value, bool) or not isinstance(self.value, (int, float)):
                return "value is not a number"
            if not math.isfinite(float(self.value)):
                return "float value is not finite"
            return None
        if self.kind == "integer" and isinstance(self.value, bool):
            return "value is bool, not integer"
        if not isinstance(self.value, expected):
            return f"value is not {self.kind}"
        return None


@dataclass
class ClassValue:
    """A fully qualified dotted class string attached to a classified entity."""

    id: str
    value: str
    reference: str


@dataclass
class Collection:
    """Homogeneous ordered list of entities; nesting depth at most 3."""

    id: str
    item_kind: str
    items: list["Entity"] = field(default_factory=list)
    reference: str | None = None

    def depth(self) -> int:
        if self.item_kind != "collection" or not self.items:
            return 1
        return 1 + max(
            item.depth() if isinstance(item, Collection) else 1 for item in self.items
        )


Entity = Union[AnnotationEntity, Primitive, ClassValue, Collection]


def entity_kind(entity: Entity) -> str:
    if isinstance(entity, AnnotationEntity):
        return entity.kind
    if isinstance(entity, Primitive):
        return entity.kind
    if isinstance(entity, ClassValue):
        return "class"
    if isinstance(entity, Collection):
        return "collection"
    raise TypeError(f"not an entity: {entity!r}")


def entity_to_doc(entity: Entity) -> dict:
    """Serialize an entity to its JSON wire document."""
    if isinstance(entity, AnnotationEntity):
        doc = {
            "id": entity.id,
            "kind": entity.kind,
            "coordinates": [[int(x), int(y)] for x, y in entity.coordinates],
            "npp_created": entity.npp_created,
            "reference": entity.reference,
            "name": entity.name,
            "creator": entity.creator,
        }
        if entity.kind == "rectangle":
            doc["width"] = entity.width
            doc["height"] = entity.height
        if entity.kind == "circle":
            doc["radius"] = entity.radius
        return doc
    if isinstance(entity, Primitive):
        return {
            "id": entity.id,
            "kind": entity.kind,
            "value": entity.value,
            "name": entity.name,
            "reference": entity.reference,
        }
    if isinstance(entity, ClassValue):
        return {
            "id": entity.id,
            "kind": "class",
            "value": entity.value,
            "reference": entity.reference,
        }
    if isinstance(entity, Collection):
        return {
            "id": entity.id,
            "kind": "collection",
            "item_kind": entity.item_kind,
            "items": [entity_to_doc(item) for item in entity.items],
            "reference": entity.reference,
        }
    raise TypeError(f"not an entity: {entity!r}")


def entity_from_doc(doc: dict) -> Entity:
    """Parse a wire document back into an entity. Raises ValueError on bad shape."""
    if not isinstance(doc, dict):
        raise ValueError("entity document must be an object")
    kind = doc.get("kind")
    if kind in ANNOTATION_KINDS:
        coords = doc.get("coordinates")
        if not isinstance(coords, list):
            raise ValueError("annotation document lacks coordinates")
        pairs = []
        for pair in coords:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ValueError("coordinates must be [x, y] pairs")
            pairs.append((int(pair[0]), int(pair[1])))
        return AnnotationEntity(
            id=doc.get("id") or new_id(),
            kind=kind,
            coordinates=pairs,
            npp_created=float(doc.get("npp_created", 0.0)),
            reference=doc.get("reference", ""),
            name=doc.get("name", ""),
            creator=doc.get("creator", "user"),
            width=int(doc["width"]) if doc.get("width") is not None else None,
            height=int(doc["height"]) if doc.get("height") is not None else None,
            radius=int(doc["radius"]) if doc.get("radius") is not None else None,
        )
    if kind in PRIMITIVE_KINDS:
        if "value" not in doc:
            raise ValueError("primitive document lacks value")
        return Primitive(
            id=doc.get("id") or new_id(),
            kind=kind,
            value=doc["value"],
            name=doc.get("name", ""),
            reference=doc.get("reference"),
        )
    if kind == "class":
        if not isinstance(doc.get("value"), str):
            raise ValueError("class document lacks string value")
        return ClassValue(
            id=doc.get("id") or new_id(),
            value=doc["value"],
            reference=doc.get("reference", ""),
        )
    if kind == "collection":
        items_doc = doc.get("items")
        if not isinstance(items_doc, list):
            raise ValueError("collection document lacks items list")
        return Collection(
            id=doc.get("id") or new_id(),
            item_kind=doc.get("item_kind", ""),
            items=[entity_from_doc(item) for item in items_doc],
            reference=doc.get("reference"),
        )
    raise ValueError(f"unknown entity kind {kind!r}")
