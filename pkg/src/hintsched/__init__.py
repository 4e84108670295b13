"""Semantic soft-affinity scheduling toolkit.

Natural-language allocation hints are parsed into a closed set of structured
scheduling intents, which a deterministic weighted-additive model turns into
per-node scores behind the Kubernetes scheduler-extender webhook contract.
"""

from .cluster import (
    CachedNode,
    CachedPod,
    RecentPlacements,
    StateCache,
    effective_pods,
    parse_quantity,
)
from .intents import (
    REGISTRY,
    DetectedIntent,
    IntentRegistry,
    ParsedHint,
    parsed_hint_from_wire,
    validate_detected,
)
from .scoring import ScoringContext, normalize_scores, score_nodes

__version__ = "0.1.0"

__all__ = [
    "REGISTRY",
    "CachedNode",
    "CachedPod",
    "DetectedIntent",
    "IntentRegistry",
    "ParsedHint",
    "RecentPlacements",
    "ScoringContext",
    "StateCache",
    "effective_pods",
    "normalize_scores",
    "parse_quantity",
    "parsed_hint_from_wire",
    "score_nodes",
    "validate_detected",
    "__version__",
]
