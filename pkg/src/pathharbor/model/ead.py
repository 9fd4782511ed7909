"""App Descriptions: the machine-readable contract every integrated app declares.

An EAD names the app (a versioned reverse-domain namespace), its execution
modes with ordered input/output keys, the type of every io key, and the class
vocabulary its results may use. Registration and output acceptance both hinge
on this document, so validation is strict and returns machine-readable
violations rather than raising.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

IO_TYPES = (
    "wsi",
    "rectangle",
    "polygon",
    "point",
    "circle",
    "line",
    "arrow",
    "integer",
    "float",
    "bool",
    "string",
    "class",
    "collection",
)

ANNOTATION_IO_TYPES = ("rectangle", "polygon", "point", "circle", "line", "arrow")

MODES = ("standalone", "preprocessing")

GLOBAL_NAMESPACE = "org.pathharbor.global"

# Classes usable by any app without declaring them (platform-wide vocabulary).
GLOBAL_CLASSES: dict = {"roi": {}}

_SEGMENT_RE = re.compile(r"^[a-z][a-z0-9_]*$")
_VERSION_RE = re.compile(r"^v[0-9]+$")


@dataclass(frozen=True)
class Violation:
    code: str
    path: str
    message: str = ""


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, path: str, message: str = "") -> None:
        self.violations.append(Violation(code, path, message))

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


@dataclass
class ModeSpec:
    inputs: list[str]
    outputs: list[str]


@dataclass
class AppDescription:
    schema_version: int
    namespace: str
    name: str
    description: str
    modes: dict[str, ModeSpec]
    io: dict[str, dict]
    classes: dict

    def declared_class_suffixes(self) -> set[str]:
        """Every dotted suffix reachable in the class tree (nodes at any depth)."""
        suffixes: set[str] = set()

        def walk(tree: dict, prefix: str) -> None:
            for name, subtree in tree.items():
                full = f"{prefix}.{name}" if prefix else name
                suffixes.add(full)
                if isinstance(subtree, dict):
                    walk(subtree, full)

        walk(self.classes, "")
        return suffixes

    def to_doc(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "namespace": self.namespace,
            "name": self.name,
            "description": self.description,
            "modes": {
                mode: {"inputs": spec.inputs, "outputs": spec.outputs}
                for mode, spec in self.modes.items()
            },
            "io": self.io,
            "classes": self.classes,
        }


def parse_ead(doc: dict) -> AppDescription:
    """Structural parse only; semantic issues are validate_ead's job."""
    if not isinstance(doc, dict):
        raise ValueError("EAD must be a JSON object")
    modes = {}
    for mode, spec in (doc.get("modes") or {}).items():
        spec = spec or {}
        modes[mode] = ModeSpec(
            inputs=list(spec.get("inputs") or []),
            outputs=list(spec.get("outputs") or []),
        )
    return AppDescription(
        schema_version=int(doc.get("schema_version", 1)),
        namespace=str(doc.get("namespace", "")),
        name=str(doc.get("name", "")),
        description=str(doc.get("description", "")),
        modes=modes,
        io=dict(doc.get("io") or {}),
        classes=dict(doc.get("classes") or {}),
    )


def _check_namespace(ns: str) -> str | None:
    segments = ns.split(".")
    if len(segments) < 3:
        return "namespace needs at least <domain>.<name>.v<major>"
    if not _VERSION_RE.match(segments[-1]):
        return "namespace must end in .v<major>"
    for seg in segments[:-1]:
        if not _SEGMENT_RE.match(seg):
            return f"bad namespace segment {seg!r}"
    return None


def _check_class_tree(tree, path: str, report: ValidationReport) -> None:
    if not isinstance(tree, dict):
        report.add("BAD_CLASS_TREE", path, "class tree nodes must be objects")
        return
    for name, subtree in tree.items():
        if not _SEGMENT_RE.match(str(name)):
            report.add("BAD_CLASS_TREE", f"{path}.{name}", f"bad class segment {name!r}")
        _check_class_tree(subtree if isinstance(subtree, dict) else {}, f"{path}.{name}", report)
        if not isinstance(subtree, dict):
            report.add("BAD_CLASS_TREE", f"{path}.{name}", "class subtree must be an object")


def _check_io_entry(key: str, entry, known_keys: set[str], report: ValidationReport) -> None:
    path = f"io.{key}"
    if not isinstance(entry, dict):
        report.add("BAD_IO_ENTRY", path, "io entry must be an object")
        return
    io_type = entry.get("type")
    if io_type not in IO_TYPES:
        report.add("UNKNOWN_TYPE", f"{path}.type", f"unknown io type {io_type!r}")
        return
    if io_type == "collection":
        items = entry.get("items")
        depth = 1
        while isinstance(items, dict) and items.get("type") == "collection":
            items = items.get("items")
            depth += 1
        if depth > 3:
            report.add("COLLECTION_TOO_DEEP", f"{path}.items", "nesting depth > 3")
        if not isinstance(items, dict) or items.get("type") not in IO_TYPES:
            report.add("BAD_ITEM_SPEC", f"{path}.items", "collection lacks a valid item spec")
    ref = entry.get("reference_to")
    if ref is not None:
        m = re.match(r"^(inputs|outputs)\.([a-zA-Z0-9_]+)$", str(ref))
        if not m or m.group(2) not in known_keys:
            report.add(
                "DANGLING_REFERENCE",
                f"{path}.reference_to",
                f"reference_to {ref!r} names no existing io key",
            )
    classes = entry.get("classes")
    if classes is not None and not (
        isinstance(classes, list) and all(isinstance(c, str) for c in classes)
    ):
        report.add("BAD_CLASS_LIST", f"{path}.classes", "classes must be a list of suffixes")


def _reference_cycles(io: dict) -> list[str]:
    """Keys participating in a reference_to cycle."""
    edges = {}
    for key, entry in io.items():
        if isinstance(entry, dict):
            ref = entry.get("reference_to")
            if isinstance(ref, str) and "." in ref:
                target = ref.split(".", 1)[1]
                if target in io:
                    edges[key] = target
    in_cycle = []
    for start in edges:
        seen = {start}
        node = edges.get(start)
        while node is not None:
            if node == start:
                in_cycle.append(start)
                break
            if node in seen:
                break
            seen.add(node)
            node = edges.get(node)
    return in_cycle


def validate_ead(doc) -> ValidationReport:
    """Check every AppDescription invariant; pure and idempotent.

    Returns a report whose violations carry machine-readable codes and the
    offending document path.
    """
    report = ValidationReport()
    if not isinstance(doc, dict):
        report.add("MALFORMED_DOCUMENT", "", "EAD must be a JSON object")
        return report

    ead = parse_ead(doc)

    ns_problem = _check_namespace(ead.namespace)
    if ns_problem:
        report.add("BAD_NAMESPACE", "namespace", ns_problem)
    if ".".join(ead.namespace.split(".")[:-1]) == GLOBAL_NAMESPACE:
        report.add("BAD_NAMESPACE", "namespace", "the global namespace is reserved")

    if not ead.modes:
        report.add("NO_MODES", "modes", "at least one mode is required")

    io_keys = set(ead.io.keys())
    for key in io_keys:
        if not re.match(r"^[a-zA-Z_][a-zA-Z0-9_]*$", key):
            report.add("BAD_KEY", f"io.{key}", f"bad io key {key!r}")

    for mode, spec in ead.modes.items():
        mpath = f"modes.{mode}"
        if mode not in MODES:
            report.add("UNKNOWN_MODE", mpath, f"unknown mode {mode!r}")
            continue
        for key in spec.inputs + spec.outputs:
            if key not in io_keys:
                report.add("UNKNOWN_KEY", mpath, f"mode references undeclared io key {key!r}")
        declared = [k for k in spec.inputs if k in io_keys]
        wsi_inputs = [k for k in declared if ead.io[k].get("type") == "wsi"]
        if mode == "standalone" and not wsi_inputs:
            report.add("NO_WSI_INPUT", mpath, "standalone mode needs at least one wsi input")
        if mode == "preprocessing":
            if len(wsi_inputs) != 1:
                report.add("NO_WSI_INPUT", mpath, "preprocessing mode needs exactly one wsi input")
            for k in declared:
                if ead.io[k].get("type") in ANNOTATION_IO_TYPES:
                    report.add(
                        "PREPROCESSING_ANNOTATION_INPUT",
                        f"{mpath}.inputs",
                        f"preprocessing cannot take annotation input {k!r}",
                    )

    for key, entry in ead.io.items():
        _check_io_entry(key, entry, io_keys, report)

    for key in _reference_cycles(ead.io):
        report.add("CYCLIC_REFERENCE", f"io.{key}.reference_to", "reference graph has a cycle")

    _check_class_tree(ead.classes, "classes", report)

    return report


def qualify_class(ead: AppDescription, suffix: str) -> str:
    """Fully qualify a declared class suffix under the app's namespace.

    Raises KeyError("UNDECLARED_CLASS") for suffixes absent from the tree.
    """
    if suffix not in ead.declared_class_suffixes():
        raise KeyError("UNDECLARED_CLASS")
    return f"{ead.namespace}.classes.{suffix}"


def parse_class_value(value: str) -> tuple[str, str] | None:
    """Split a qualified class string into (namespace, suffix); None if malformed.

    Grammar: ``<namespace>.classes(.<segment>)+`` with lowercase dotted segments.
    """
    if ".classes." not in value:
        return None
    namespace, suffix = value.split(".classes.", 1)
    if _check_namespace(namespace) is not None and namespace != GLOBAL_NAMESPACE:
        return None
    if not suffix:
        return None
    for seg in suffix.split("."):
        if not _SEGMENT_RE.match(seg):
            return None
    return namespace, suffix


def class_value_declared(ead: AppDescription | None, value: str) -> bool:
    """True iff the qualified class value is declared by the EAD or globally."""
    parsed = parse_class_value(value)
    if parsed is None:
        return False
    namespace, suffix = parsed
    if namespace == GLOBAL_NAMESPACE:
        node = GLOBAL_CLASSES
        for seg in suffix.split("."):
            if not isinstance(node, dict) or seg not in node:
                return False
            node = node[seg]
        return True
    if ead is None or namespace != ead.namespace:
        return False
    return suffix in ead.declared_class_suffixes()
