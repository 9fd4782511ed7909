"""Entity lookup and reference chain resolution.

Stores index collection items recursively so class values can point at
individual items. Readers always see complete entities (snapshot semantics);
the in-memory store achieves this by registering an entity only after its
whole tree is indexed.
"""

from __future__ import annotations

import threading
from typing import Protocol

from pathharbor.errors import NotFoundError, PlatformError
from pathharbor.model.entities import Collection, Entity

MAX_CHAIN = 5


class CycleError(PlatformError):
    code = "CYCLE_DETECTED"


class EntityStore(Protocol):
    def get_entity(self, entity_id: str) -> Entity | None: ...

    def has_slide(self, slide_id: str) -> bool: ...


class InMemoryEntityStore:
    def __init__(self):
        self._entities: dict[str, Entity] = {}
        self._slides: set[str] = set()
        self._lock = threading.Lock()

    def add_slide(self, slide_id: str) -> None:
        with self._lock:
            self._slides.add(slide_id)

    def put(self, entity: Entity) -> None:
        staged = {}
        stack = [entity]
        while stack:
            node = stack.pop()
            staged[node.id] = node
            if isinstance(node, Collection):
                stack.extend(node.items)
        with self._lock:
            self._entities.update(staged)

    def get_entity(self, entity_id: str) -> Entity | None:
        with self._lock:
            return self._entities.get(entity_id)

    def has_slide(self, slide_id: str) -> bool:
        with self._lock:
            return slide_id in self._slides


def resolve_reference(entity_id: str, store: EntityStore) -> list[str]:
    """Follow reference fields from an entity up to its root slide.

    Returns the chain of ids, starting at ``entity_id`` and ending at a slide.
    A slide id resolves to a chain of length 1. Raises NotFoundError for
    unknown ids and CycleError if a cycle is encountered (excluded at write
    time, checked defensively).
    """
    chain: list[str] = []
    seen: set[str] = set()
    current: str | None = entity_id
    while current is not None:
        if current in seen:
            raise CycleError(f"reference cycle at {current}")
        seen.add(current)
        if store.has_slide(current):
            chain.append(current)
            return chain
        entity = store.get_entity(current)
        if entity is None:
            raise NotFoundError(f"unknown entity {current}")
        chain.append(current)
        if len(chain) > MAX_CHAIN:
            raise CycleError(f"reference chain longer than {MAX_CHAIN}")
        current = getattr(entity, "reference", None)
    return chain
