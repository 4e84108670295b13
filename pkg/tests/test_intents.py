import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hintsched.intents import (
    REGISTRY,
    DetectedIntent,
    IntentCategory,
    MalformedValue,
    MetadataKind,
    ParsedHint,
    UnknownIntent,
    parsed_hint_from_entries,
    parsed_hint_from_wire,
    validate_detected,
)

FLOAT_FIELDS = {
    "prefer_memory_gb",
    "prefer_cpu_cores",
    "prefer_gpu_cores",
    "prefer_tpu_cores",
    "prefer_network_gbps",
    "prefer_ephemeral_storage_gb",
}


def test_registry_has_exactly_25_classes_in_order():
    names = REGISTRY.names()
    assert len(names) == 25
    assert names[0] == "prefer_colocate_same_deployment"
    assert names[-1] == "prefer_ephemeral_storage"


def test_registry_metadata_kinds():
    string_kind = [c.name for c in REGISTRY if c.metadata_kind is MetadataKind.STRING]
    assert string_kind == ["prefer_network_type"]
    float_fields = {
        c.metadata_field for c in REGISTRY if c.metadata_kind is MetadataKind.FLOAT
    }
    assert float_fields == FLOAT_FIELDS
    for cls in REGISTRY:
        assert (cls.metadata_field is None) == (cls.metadata_kind is MetadataKind.NONE)


def test_registry_category_partition():
    by_category = {}
    for cls in REGISTRY:
        by_category.setdefault(cls.category, []).append(cls.name)
    assert len(by_category[IntentCategory.COLOCATION_PROXIMITY]) == 2
    assert len(by_category[IntentCategory.TOPOLOGICAL]) == 9
    assert len(by_category[IntentCategory.NODE_LEVEL]) == 3
    assert len(by_category[IntentCategory.DEPLOYMENT_LEVEL]) == 2
    assert len(by_category[IntentCategory.RESOURCE_BASED]) == 9


def test_lookup_known_and_unknown():
    cls = REGISTRY.lookup("prefer_gpu")
    assert cls.metadata_field == "prefer_gpu_cores"
    assert cls.metadata_kind is MetadataKind.FLOAT
    assert REGISTRY.lookup("spread_zones").metadata_kind is MetadataKind.NONE
    with pytest.raises(UnknownIntent):
        REGISTRY.lookup("prefer_quantum")


def test_validate_full_entry():
    detected = validate_detected(
        "prefer_cpu",
        {
            "confidence": 0.9,
            "strength": 1.5,
            "strength_explanation": "must",
            "prefer_cpu_cores": 16.0,
        },
    )
    assert detected == DetectedIntent(
        "prefer_cpu", 0.9, 1.5, "must", {"prefer_cpu_cores": 16.0}
    )


def test_validate_fills_defaults():
    detected = validate_detected("prefer_memory", {"confidence": 0.8})
    assert detected.strength == 1.0
    assert detected.metadata == {"prefer_memory_gb": 1.0}


def test_validate_empty_list_metadata():
    detected = validate_detected("avoid_zones", {"confidence": 1.0, "avoid_zones": []})
    assert detected.metadata == {"avoid_zones": []}


def test_confidence_clamped_and_strength_snapped():
    detected = validate_detected(
        "prefer_gpu",
        {"confidence": 1.7, "strength": 1.4, "strength_explanation": "x", "prefer_gpu_cores": 2},
    )
    assert detected.confidence == 1.0
    assert detected.strength == 1.5
    assert detected.metadata["prefer_gpu_cores"] == 2.0
    low = validate_detected("prefer_gpu", {"confidence": -3, "strength": 0.1})
    assert low.confidence == 0.0
    assert low.strength == 1.0  # snapped to 0.5, then demoted without explanation


def test_strength_snap_ties_round_up():
    snapped = validate_detected(
        "spread_zones", {"confidence": 1.0, "strength": 0.75, "strength_explanation": "x"}
    )
    assert snapped.strength == 1.0
    snapped = validate_detected(
        "spread_zones", {"confidence": 1.0, "strength": 1.25, "strength_explanation": "x"}
    )
    assert snapped.strength == 1.5


def test_nondefault_strength_without_explanation_demotes():
    detected = validate_detected("spread_zones", {"confidence": 1.0, "strength": 1.5})
    assert detected.strength == 1.0
    assert detected.strength_explanation is None


def test_extra_fields_dropped():
    detected = validate_detected(
        "prefer_gpu",
        {"confidence": 0.9, "prefer_gpu_cores": 1.0, "bogus": 1, "prefer_cpu_cores": 4.0},
    )
    assert set(detected.metadata) == {"prefer_gpu_cores"}


def test_malformed_values_raise():
    with pytest.raises(MalformedValue):
        validate_detected("prefer_gpu", {"confidence": "very sure"})
    with pytest.raises(MalformedValue):
        validate_detected("prefer_gpu", {"confidence": 1.0, "strength": "strong"})
    with pytest.raises(MalformedValue):
        validate_detected("avoid_zones", {"confidence": 1.0, "avoid_zones": "us-east-1a"})
    with pytest.raises(MalformedValue):
        validate_detected("avoid_zones", {"confidence": 1.0, "avoid_zones": ["a", 3]})
    with pytest.raises(UnknownIntent):
        validate_detected("prefer_quantum", {"confidence": 1.0})


def test_unparseable_float_metadata_defaults():
    detected = validate_detected(
        "prefer_memory", {"confidence": 1.0, "prefer_memory_gb": "lots"}
    )
    assert detected.metadata["prefer_memory_gb"] == 1.0


def test_dedupe_keeps_highest_confidence():
    a = validate_detected("prefer_gpu", {"confidence": 0.9, "prefer_gpu_cores": 2.0})
    b = validate_detected("prefer_gpu", {"confidence": 0.7, "prefer_gpu_cores": 4.0})
    parsed = parsed_hint_from_entries("h", [b, a])
    assert len(parsed) == 1
    assert parsed.intents["prefer_gpu"].confidence == 0.9


def test_dedupe_tie_keeps_first():
    a = validate_detected("prefer_gpu", {"confidence": 0.9, "prefer_gpu_cores": 2.0})
    b = validate_detected("prefer_gpu", {"confidence": 0.9, "prefer_gpu_cores": 4.0})
    parsed = parsed_hint_from_entries("h", [a, b])
    assert parsed.intents["prefer_gpu"].metadata["prefer_gpu_cores"] == 2.0


def test_empty_entries_make_empty_hint():
    parsed = parsed_hint_from_entries("h", [])
    assert len(parsed) == 0


def test_two_intents_kept():
    entries = [
        validate_detected("prefer_gpu", {"confidence": 0.9}),
        validate_detected("spread_zones", {"confidence": 0.8}),
    ]
    assert set(parsed_hint_from_entries("h", entries).intents) == {
        "prefer_gpu",
        "spread_zones",
    }


def test_wire_round_trip_example():
    wire = {
        "prefer_gpu": {
            "confidence": 0.98,
            "prefer_gpu_cores": 4.0,
            "strength": 1.5,
            "strength_explanation": "User stated 'Requires 4 GPUs.'",
        },
        "avoid_regions": {
            "confidence": 0.95,
            "avoid_regions": ["us-east-1", "ap-south-1"],
            "strength": 1.0,
        },
        "prefer_cpu": {
            "confidence": 0.90,
            "prefer_cpu_cores": 8.0,
            "strength": 0.5,
            "strength_explanation": "User mentioned 'maybe 8 cores'",
        },
    }
    parsed = parsed_hint_from_wire(wire, "hint")
    assert set(parsed.intents) == {"prefer_gpu", "avoid_regions", "prefer_cpu"}
    assert parsed_hint_from_wire(parsed.to_wire(), "hint") == parsed
    # JSON-serializable and stable
    assert json.loads(json.dumps(parsed.to_wire())) == parsed.to_wire()


def test_strict_wire_rejects_off_scale_strength():
    wire = {"prefer_gpu": {"confidence": 1.0, "prefer_gpu_cores": 1.0, "strength": 0.7,
                           "strength_explanation": "x"}}
    with pytest.raises(MalformedValue):
        parsed_hint_from_wire(wire, strict=True)
    # lenient mode snaps instead
    assert parsed_hint_from_wire(wire).intents["prefer_gpu"].strength == 0.5


def test_strict_wire_rejects_extras_and_missing_metadata():
    with pytest.raises(MalformedValue):
        parsed_hint_from_wire({"prefer_gpu": {"confidence": 1.0, "strength": 1.0}}, strict=True)
    with pytest.raises(MalformedValue):
        parsed_hint_from_wire(
            {"spread_zones": {"confidence": 1.0, "strength": 1.0, "bogus": 2}}, strict=True
        )


# property: validation is idempotent and always exposes exactly the required field

_words = st.text(alphabet="abc-19 ", min_size=1, max_size=6)
_field_values = st.one_of(
    st.none(),
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
    st.integers(-10, 10),
    _words,
    st.lists(_words, max_size=3),
)


@given(
    name=st.sampled_from(REGISTRY.names()),
    fields=st.dictionaries(
        st.sampled_from(
            ["confidence", "strength", "strength_explanation", "prefer_gpu_cores",
             "avoid_zones", "prefer_network_type", "prefer_memory_gb", "extra"]
        ),
        _field_values,
        max_size=5,
    ),
)
def test_validate_idempotent_and_complete(name, fields):
    try:
        first = validate_detected(name, fields)
    except MalformedValue:
        return
    cls = REGISTRY.lookup(name)
    assert 0.0 <= first.confidence <= 1.0
    assert first.strength in (0.5, 1.0, 1.5)
    if first.strength != 1.0:
        assert first.strength_explanation
    if cls.metadata_kind is MetadataKind.NONE:
        assert first.metadata == {}
    else:
        assert set(first.metadata) == {cls.metadata_field}
    again_fields = {
        "confidence": first.confidence,
        "strength": first.strength,
        "strength_explanation": first.strength_explanation,
        **first.metadata,
    }
    assert validate_detected(name, again_fields) == first


def test_parsed_hint_wire_orders_by_registry():
    entries = [
        validate_detected("prefer_ephemeral_storage", {"confidence": 1.0}),
        validate_detected("prefer_colocate_same_deployment", {"confidence": 1.0}),
    ]
    wire = parsed_hint_from_entries("h", entries).to_wire()
    assert list(wire) == ["prefer_colocate_same_deployment", "prefer_ephemeral_storage"]
