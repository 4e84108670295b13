"""Closed registry of scheduling intent classes and validated parse results.

The registry is compiled-in data: the intent descriptions are part of the
analyzer prompt contract and must be bit-stable, so they live here rather
than in a config file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator, Mapping

STRENGTH_VALUES = (0.5, 1.0, 1.5)


class IntentCategory(Enum):
    COLOCATION_PROXIMITY = "colocation_proximity"
    TOPOLOGICAL = "topological"
    NODE_LEVEL = "node_level"
    DEPLOYMENT_LEVEL = "deployment_level"
    RESOURCE_BASED = "resource_based"


class MetadataKind(Enum):
    NONE = "none"
    FLOAT = "float"
    STRING = "string"
    STRING_LIST = "string_list"


class UnknownIntent(Exception):
    """Raised when a name is not one of the registered intent classes."""

    def __init__(self, name: object):
        super().__init__(f"unknown intent: {name!r}")
        self.name = name


class MalformedValue(Exception):
    """Raised for analyzer output values that cannot be interpreted at all."""


@dataclass(frozen=True)
class IntentClass:
    """One scheduling directive the analyzer may detect.

    The description is rendered verbatim into the analyzer prompt.
    """

    name: str
    category: IntentCategory
    description: str
    metadata_field: str | None = None
    metadata_kind: MetadataKind = MetadataKind.NONE


_C = IntentCategory
_K = MetadataKind

_CLASSES = (
    IntentClass(
        "prefer_colocate_same_deployment",
        _C.COLOCATION_PROXIMITY,
        "Prefer scheduling this pod on the SAME node as existing pods from the "
        "SAME deployment. No metadata required.",
    ),
    IntentClass(
        "prefer_nearby_nodes_same_deployment",
        _C.COLOCATION_PROXIMITY,
        "Prefer scheduling this pod on a node TOPOLOGICALLY CLOSE (same rack > "
        "zone > region) to existing pods from the SAME deployment. No metadata "
        "required.",
    ),
    IntentClass(
        "prefer_regions",
        _C.TOPOLOGICAL,
        "Prefer scheduling in specific regions. Extract a list of region names. "
        "Metadata field: 'prefer_regions' (MUST be a JSON list of strings, "
        "e.g., ['us-east-1', 'eu-west-1']).",
        "prefer_regions",
        _K.STRING_LIST,
    ),
    IntentClass(
        "avoid_regions",
        _C.TOPOLOGICAL,
        "Avoid scheduling in specific regions. Extract a list of region names "
        "to avoid. Metadata field: 'avoid_regions' (MUST be a JSON list of "
        "strings, e.g., ['us-east-1', 'eu-west-1']).",
        "avoid_regions",
        _K.STRING_LIST,
    ),
    IntentClass(
        "spread_regions",
        _C.TOPOLOGICAL,
        "Distribute pods of the same deployment across different REGIONS. No "
        "metadata required.",
    ),
    IntentClass(
        "prefer_zones",
        _C.TOPOLOGICAL,
        "Prefer scheduling in specific availability zones. Extract a list of "
        "zone names. Metadata field: 'prefer_zones' (MUST be a JSON list of "
        "strings, e.g., ['us-east-1a', 'us-east-1b']).",
        "prefer_zones",
        _K.STRING_LIST,
    ),
    IntentClass(
        "avoid_zones",
        _C.TOPOLOGICAL,
        "Avoid scheduling in specific availability zones. Extract a list of "
        "zone names to avoid. Metadata field: 'avoid_zones' (MUST be a JSON "
        "list of strings, e.g., ['eu-central-1c']).",
        "avoid_zones",
        _K.STRING_LIST,
    ),
    IntentClass(
        "spread_zones",
        _C.TOPOLOGICAL,
        "Distribute pods of the same deployment across different availability "
        "ZONES. No metadata required.",
    ),
    IntentClass(
        "prefer_racks",
        _C.TOPOLOGICAL,
        "Prefer scheduling in specific server racks. Extract a list of rack "
        "names. Metadata field: 'prefer_racks' (MUST be a JSON list of "
        "strings, e.g., ['rack-a1', 'rack-b2']).",
        "prefer_racks",
        _K.STRING_LIST,
    ),
    IntentClass(
        "avoid_racks",
        _C.TOPOLOGICAL,
        "Avoid scheduling in specific server racks. Extract a list of rack "
        "names to avoid. Metadata field: 'avoid_racks' (MUST be a JSON list "
        "of strings, e.g., ['rack-c3']).",
        "avoid_racks",
        _K.STRING_LIST,
    ),
    IntentClass(
        "spread_racks",
        _C.TOPOLOGICAL,
        "Distribute pods of the same deployment across different server RACKS. "
        "No metadata required.",
    ),
    IntentClass(
        "prefer_nodes",
        _C.NODE_LEVEL,
        "Prefer scheduling on specific nodes (servers/hosts). Extract a list "
        "of node names. Metadata field: 'prefer_nodes' (MUST be a JSON list "
        "of strings, e.g., ['node-101', 'node-102']).",
        "prefer_nodes",
        _K.STRING_LIST,
    ),
    IntentClass(
        "avoid_nodes",
        _C.NODE_LEVEL,
        "Avoid scheduling on specific nodes (servers/hosts). Extract a list of "
        "node names to avoid. Metadata field: 'avoid_nodes' (MUST be a JSON "
        "list of strings, e.g., ['node-maint']).",
        "avoid_nodes",
        _K.STRING_LIST,
    ),
    IntentClass(
        "spread_nodes",
        _C.NODE_LEVEL,
        "Distribute pods of the same deployment across different NODES "
        "(servers/hosts). No metadata required.",
    ),
    IntentClass(
        "prefer_deployments",
        _C.DEPLOYMENT_LEVEL,
        "Prefer scheduling near pods from specific other "
        "deployments/applications. Extract a list of deployment names. "
        "Metadata field: 'prefer_deployments' (MUST be a JSON list of "
        "strings, e.g., ['database', 'cache']).",
        "prefer_deployments",
        _K.STRING_LIST,
    ),
    IntentClass(
        "avoid_deployments",
        _C.DEPLOYMENT_LEVEL,
        "Avoid scheduling near pods from specific other "
        "deployments/applications. Extract a list of deployment names to "
        "avoid. Metadata field: 'avoid_deployments' (MUST be a JSON list of "
        "strings, e.g., ['batch-job']).",
        "avoid_deployments",
        _K.STRING_LIST,
    ),
    IntentClass(
        "prefer_memory",
        _C.RESOURCE_BASED,
        "Prefer nodes with a minimum amount of available RAM. Extract the "
        "amount in Gigabytes as a float number. Metadata field: "
        "'prefer_memory_gb' (MUST be a float, e.g., 128.0 for 128GB).",
        "prefer_memory_gb",
        _K.FLOAT,
    ),
    IntentClass(
        "prefer_cpu",
        _C.RESOURCE_BASED,
        "Prefer nodes with a minimum number of CPU cores. Extract the number "
        "of cores as a float number. Metadata field: 'prefer_cpu_cores' (MUST "
        "be a float, e.g., 16.0 for 16 cores).",
        "prefer_cpu_cores",
        _K.FLOAT,
    ),
    IntentClass(
        "prefer_gpu",
        _C.RESOURCE_BASED,
        "Prefer nodes with GPU hardware (CUDA cores). Extract the minimum "
        "number of GPUs required as a float number. Metadata field: "
        "'prefer_gpu_cores' (MUST be a float, e.g., 4.0 for 4 GPUs).",
        "prefer_gpu_cores",
        _K.FLOAT,
    ),
    IntentClass(
        "prefer_tpu",
        _C.RESOURCE_BASED,
        "Prefer nodes with TPU hardware (Tensor Processing Unit). Extract the "
        "minimum number of TPU cores required as a float number. Metadata "
        "field: 'prefer_tpu_cores' (MUST be a float, e.g., 8.0 for 8 TPU "
        "cores).",
        "prefer_tpu_cores",
        _K.FLOAT,
    ),
    IntentClass(
        "prefer_ssd",
        _C.RESOURCE_BASED,
        "Prefer nodes with Solid State Drive (SSD) storage. No metadata "
        "required.",
    ),
    IntentClass(
        "prefer_public_ip",
        _C.RESOURCE_BASED,
        "Prefer nodes that have a public or external IP address. No metadata "
        "required.",
    ),
    IntentClass(
        "prefer_network_speed",
        _C.RESOURCE_BASED,
        "Prefer nodes with a minimum network bandwidth. Extract the speed in "
        "Gigabits per second (Gbps) as a float number. Metadata field: "
        "'prefer_network_gbps' (MUST be a float, e.g., 100.0 for 100Gbps).",
        "prefer_network_gbps",
        _K.FLOAT,
    ),
    IntentClass(
        "prefer_network_type",
        _C.RESOURCE_BASED,
        "Prefer nodes with a specific network interface type. Extract the "
        "network type name as a string. Metadata field: "
        "'prefer_network_type' (MUST be a string, e.g., 'infiniband', "
        "'ena').",
        "prefer_network_type",
        _K.STRING,
    ),
    IntentClass(
        "prefer_ephemeral_storage",
        _C.RESOURCE_BASED,
        "Prefer nodes with a minimum amount of local ephemeral storage. "
        "Extract the amount in Gigabytes as a float number. Metadata field: "
        "'prefer_ephemeral_storage_gb' (MUST be a float, e.g., 500.0 for "
        "500GB).",
        "prefer_ephemeral_storage_gb",
        _K.FLOAT,
    ),
)


class IntentRegistry:
    """Ordered, closed collection of the intent classes."""

    def __init__(self, classes: Iterable[IntentClass] = _CLASSES):
        self._classes = tuple(classes)
        self._by_name = {c.name: c for c in self._classes}

    def lookup(self, name: str) -> IntentClass:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownIntent(name) from None

    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self._classes)

    def __iter__(self) -> Iterator[IntentClass]:
        return iter(self._classes)

    def __len__(self) -> int:
        return len(self._classes)

    def __contains__(self, name: object) -> bool:
        return name in self._by_name


REGISTRY = IntentRegistry()


@dataclass(frozen=True)
class DetectedIntent:
    """One validated scheduling directive extracted from a hint.

    ``metadata`` holds exactly the class's required field (empty for
    no-metadata classes). A non-default strength always carries a non-empty
    explanation; validation enforces this.
    """

    intent: str
    confidence: float
    strength: float
    strength_explanation: str | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ParsedHint:
    """Full parse of one allocation hint: at most one entry per intent class."""

    hint_text: str
    intents: Mapping[str, DetectedIntent] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.intents)

    def to_wire(self, registry: IntentRegistry = REGISTRY) -> dict:
        """Serialize to the analyzer-output JSON shape, in registry order."""
        obj: dict[str, dict] = {}
        for name in registry.names():
            detected = self.intents.get(name)
            if detected is None:
                continue
            entry: dict[str, Any] = {"confidence": detected.confidence}
            entry.update(detected.metadata)
            entry["strength"] = detected.strength
            if detected.strength_explanation:
                entry["strength_explanation"] = detected.strength_explanation
            obj[name] = entry
        return obj


def _as_number(value: Any) -> float | None:
    if isinstance(value, bool):
        return float(value)
    if isinstance(value, (int, float)):
        result = float(value)
    elif isinstance(value, str):
        try:
            result = float(value.strip())
        except ValueError:
            return None
    else:
        return None
    if math.isnan(result) or math.isinf(result):
        return None
    return result


def _coerce_confidence(value: Any) -> float:
    number = _as_number(value)
    if number is None:
        raise MalformedValue(f"confidence is not a number: {value!r}")
    return min(1.0, max(0.0, number))


def _snap_strength(value: float) -> float:
    # Nearest of the 3-point scale; equidistant values round up.
    best = STRENGTH_VALUES[0]
    best_dist = abs(value - best)
    for candidate in STRENGTH_VALUES[1:]:
        dist = abs(value - candidate)
        if dist <= best_dist:
            best, best_dist = candidate, dist
    return best


def _coerce_strength(value: Any) -> float:
    number = _as_number(value)
    if number is None:
        raise MalformedValue(f"strength is not interpretable as a number: {value!r}")
    return _snap_strength(number)


def _coerce_float_field(value: Any) -> float:
    number = _as_number(value)
    if number is None:
        return 1.0
    return number


def _coerce_list_field(field_name: str, value: Any) -> list[str]:
    if value is None:
        return []
    if not isinstance(value, (list, tuple)):
        raise MalformedValue(f"{field_name} is not a list of strings: {value!r}")
    items: list[str] = []
    for item in value:
        if not isinstance(item, str):
            raise MalformedValue(f"{field_name} contains a non-string item: {item!r}")
        items.append(item)
    return items


def _coerce_string_field(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, float, bool)):
        return str(value)
    return ""


def validate_detected(
    raw_intent_name: str,
    raw_fields: Mapping[str, Any] | None,
    registry: IntentRegistry = REGISTRY,
) -> DetectedIntent:
    """Normalize raw analyzer output for one intent into a DetectedIntent.

    Tolerant where the analyzer contract allows defaults (missing strength ->
    1.0, missing/unparseable float metadata -> 1.0, missing list -> []), and
    strict where a value is present but uninterpretable (confidence/strength
    that is not a number, a list field that is not a list of strings).
    Extra fields are dropped. Idempotent on its own output.
    """
    cls = registry.lookup(raw_intent_name)
    fields = dict(raw_fields or {})

    confidence = _coerce_confidence(fields.get("confidence", 1.0))
    strength = _coerce_strength(fields.get("strength", 1.0))

    explanation = fields.get("strength_explanation")
    if explanation is not None and not isinstance(explanation, str):
        explanation = str(explanation)
    if explanation is not None and not explanation.strip():
        explanation = None
    if strength != 1.0 and explanation is None:
        # A non-default strength must quote the keyword that justified it;
        # without one the default applies.
        strength = 1.0

    metadata: dict[str, Any] = {}
    if cls.metadata_kind is MetadataKind.FLOAT:
        metadata[cls.metadata_field] = _coerce_float_field(fields.get(cls.metadata_field))
    elif cls.metadata_kind is MetadataKind.STRING_LIST:
        metadata[cls.metadata_field] = _coerce_list_field(
            cls.metadata_field, fields.get(cls.metadata_field)
        )
    elif cls.metadata_kind is MetadataKind.STRING:
        metadata[cls.metadata_field] = _coerce_string_field(fields.get(cls.metadata_field))

    return DetectedIntent(
        intent=cls.name,
        confidence=confidence,
        strength=strength,
        strength_explanation=explanation,
        metadata=metadata,
    )


def parsed_hint_from_entries(
    hint_text: str, entries: Iterable[DetectedIntent]
) -> ParsedHint:
    """Build a ParsedHint, deduplicating by intent name.

    The highest-confidence entry wins; ties keep the first occurrence.
    """
    best: dict[str, DetectedIntent] = {}
    for entry in entries:
        current = best.get(entry.intent)
        if current is None or entry.confidence > current.confidence:
            best[entry.intent] = entry
    return ParsedHint(hint_text=hint_text, intents=best)


def _strict_entry(name: str, entry: Any, registry: IntentRegistry) -> DetectedIntent:
    cls = registry.lookup(name)
    if not isinstance(entry, Mapping):
        raise MalformedValue(f"{name}: entry is not an object")
    allowed = {"confidence", "strength", "strength_explanation"}
    if cls.metadata_field:
        allowed.add(cls.metadata_field)
    extras = set(entry) - allowed
    if extras:
        raise MalformedValue(f"{name}: unexpected fields {sorted(extras)}")
    if "confidence" not in entry:
        raise MalformedValue(f"{name}: missing confidence")
    confidence = entry["confidence"]
    if isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
        raise MalformedValue(f"{name}: confidence is not a number")
    if not 0.0 <= confidence <= 1.0:
        raise MalformedValue(f"{name}: confidence {confidence} outside [0, 1]")
    strength = entry.get("strength", 1.0)
    if isinstance(strength, bool) or not isinstance(strength, (int, float)):
        raise MalformedValue(f"{name}: strength is not a number")
    if float(strength) not in STRENGTH_VALUES:
        raise MalformedValue(f"{name}: strength {strength} not one of {STRENGTH_VALUES}")
    explanation = entry.get("strength_explanation")
    if explanation is not None and not isinstance(explanation, str):
        raise MalformedValue(f"{name}: strength_explanation is not a string")
    if float(strength) != 1.0 and not (explanation and explanation.strip()):
        raise MalformedValue(f"{name}: non-default strength without explanation")
    metadata: dict[str, Any] = {}
    if cls.metadata_kind is not MetadataKind.NONE:
        if cls.metadata_field not in entry:
            raise MalformedValue(f"{name}: missing metadata field {cls.metadata_field}")
        value = entry[cls.metadata_field]
        if cls.metadata_kind is MetadataKind.FLOAT:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise MalformedValue(f"{name}: {cls.metadata_field} is not a float")
            metadata[cls.metadata_field] = float(value)
        elif cls.metadata_kind is MetadataKind.STRING_LIST:
            metadata[cls.metadata_field] = _coerce_list_field(cls.metadata_field, value)
        else:
            if not isinstance(value, str):
                raise MalformedValue(f"{name}: {cls.metadata_field} is not a string")
            metadata[cls.metadata_field] = value
    return DetectedIntent(
        intent=cls.name,
        confidence=float(confidence),
        strength=float(strength),
        strength_explanation=explanation,
        metadata=metadata,
    )


def parsed_hint_from_wire(
    obj: Mapping[str, Any],
    hint_text: str = "",
    registry: IntentRegistry = REGISTRY,
    strict: bool = False,
) -> ParsedHint:
    """Decode the wire JSON object shape back into a ParsedHint.

    In strict mode every value must already satisfy the invariants exactly
    (no clamping, no snapping, no defaults); used by the dataset loader.
    """
    if not isinstance(obj, Mapping):
        raise MalformedValue(f"wire parse is not an object: {type(obj).__name__}")
    entries = []
    for name, entry in obj.items():
        if strict:
            entries.append(_strict_entry(name, entry, registry))
        else:
            if not isinstance(entry, Mapping):
                raise MalformedValue(f"{name}: entry is not an object")
            entries.append(validate_detected(name, entry, registry))
    return parsed_hint_from_entries(hint_text, entries)
