"""Deterministic weighted-additive node scoring.

Each detected intent contributes base_weight * confidence * strength *
evaluation(node); raw sums are rescaled against the best node, and exactly
one winner (lexicographically smallest among the top raw scores) is pinned
at 100 while every other node lands in [1, 99].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .cluster import CachedNode, CachedPod
from .intents import REGISTRY, DetectedIntent, IntentRegistry, ParsedHint

AVOID_PENALTY = -2.0


class ZeroIntents(Exception):
    """base_weight is undefined for an empty intent set."""


@dataclass(frozen=True)
class ProximityWeights:
    """Decaying pull of existing pods by shared topology domain."""

    rack: float = 2.0
    zone: float = 0.5
    region: float = 0.2


PROXIMITY_WEIGHTS = ProximityWeights()


@dataclass(frozen=True)
class IntentWeight:
    base: float
    confidence: float
    strength: float
    combined: float

    @classmethod
    def of(cls, base: float, detected: DetectedIntent) -> "IntentWeight":
        return cls(
            base=base,
            confidence=detected.confidence,
            strength=detected.strength,
            combined=base * detected.confidence * detected.strength,
        )


@dataclass(frozen=True)
class SpreadTally:
    """Histogram of same-deployment pods per topology-domain value."""

    counts: Mapping[object, int]
    max_count: int

    @classmethod
    def of(cls, counts: Mapping[object, int]) -> "SpreadTally":
        return cls(counts=dict(counts), max_count=max(counts.values(), default=0))


class ScoringContext:
    """Everything one scoring round reads: candidates, effective pods, subject."""

    def __init__(
        self,
        candidates: Sequence[CachedNode],
        effective: Iterable[CachedPod],
        subject_pod: CachedPod | None = None,
        subject_deployment: str | None = None,
    ):
        if not candidates:
            raise ValueError("scoring requires at least one candidate node")
        self.candidates = tuple(candidates)
        self.effective = tuple(effective)
        self.subject_pod = subject_pod
        self.subject_deployment = subject_deployment
        self.nodes_by_name = {node.name: node for node in self.candidates}


@dataclass
class ScoreBreakdown:
    node: str
    contributions: dict[str, float] = field(default_factory=dict)
    raw: float = 0.0
    normalized: float = 0.0
    final: int = 0
    is_winner: bool = False


def base_weight(intent_count: int) -> float:
    """Equal initial influence per directive: 100 / number of intents."""
    if intent_count < 1:
        raise ZeroIntents("no intents to weight")
    return 100.0 / intent_count


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


# --- per-category evaluation logic -----------------------------------------

_SPREAD_DOMAIN = {
    "spread_regions": "region",
    "spread_zones": "zone",
    "spread_racks": "rack",
    "spread_nodes": "node",
}

_AVOID_DOMAIN = {
    "avoid_regions": "region",
    "avoid_zones": "zone",
    "avoid_racks": "rack",
    "avoid_nodes": "node",
}

_BINARY_LIST_DOMAIN = {
    "prefer_regions": "region",
    "prefer_zones": "zone",
    "prefer_racks": "rack",
    "prefer_nodes": "node",
}


def _node_domain_value(node: CachedNode, domain: str) -> object:
    if domain == "node":
        return node.name
    value = getattr(node, domain)
    if value is None:
        # A node without the label forms its own singleton domain.
        return ("__node__", node.name)
    return value


def _pod_domain_value(
    pod: CachedPod, domain: str, nodes_by_name: Mapping[str, CachedNode]
) -> object | None:
    if pod.node_name is None:
        return None
    if domain == "node":
        return pod.node_name
    node = nodes_by_name.get(pod.node_name)
    if node is None:
        return None  # cannot attribute an off-candidate pod to a labeled domain
    return _node_domain_value(node, domain)


def eval_binary_pref(intent: DetectedIntent, node: CachedNode) -> float:
    """1 if the node satisfies the preference condition, else 0."""
    name = intent.intent
    meta = intent.metadata
    if name in _BINARY_LIST_DOMAIN:
        domain = _BINARY_LIST_DOMAIN[name]
        value = node.name if domain == "node" else getattr(node, domain)
        return 1.0 if value is not None and value in meta.get(name, []) else 0.0
    if name == "prefer_memory":
        return 1.0 if node.memory_bytes / 2**30 >= meta["prefer_memory_gb"] else 0.0
    if name == "prefer_cpu":
        return 1.0 if node.cpu_count >= meta["prefer_cpu_cores"] else 0.0
    if name == "prefer_gpu":
        return 1.0 if node.gpu_count >= meta["prefer_gpu_cores"] else 0.0
    if name == "prefer_tpu":
        return 1.0 if node.tpu_count >= meta["prefer_tpu_cores"] else 0.0
    if name == "prefer_ssd":
        return 1.0 if node.has_ssd else 0.0
    if name == "prefer_public_ip":
        return 1.0 if node.has_public_ip else 0.0
    if name == "prefer_network_speed":
        return 1.0 if node.network_gbps >= meta["prefer_network_gbps"] else 0.0
    if name == "prefer_network_type":
        wanted = meta.get("prefer_network_type", "")
        return (
            1.0
            if wanted and node.network_type and node.network_type.lower() == wanted.lower()
            else 0.0
        )
    if name == "prefer_ephemeral_storage":
        return (
            1.0
            if node.ephemeral_storage_bytes / 2**30 >= meta["prefer_ephemeral_storage_gb"]
            else 0.0
        )
    raise ValueError(f"not a binary preference intent: {name}")


def eval_avoid(intent: DetectedIntent, node: CachedNode, ctx: ScoringContext) -> float:
    """-2 if the node matches the avoidance criteria, else 0."""
    name = intent.intent
    values = intent.metadata.get(name, [])
    if name == "avoid_deployments":
        targets = set(values)
        for pod in ctx.effective:
            if pod.node_name == node.name and pod.deployment in targets:
                return AVOID_PENALTY
        return 0.0
    domain = _AVOID_DOMAIN[name]
    value = node.name if domain == "node" else getattr(node, domain)
    return AVOID_PENALTY if value is not None and value in values else 0.0


def build_spread_tally(intent_name: str, ctx: ScoringContext) -> SpreadTally:
    domain = _SPREAD_DOMAIN[intent_name]
    counts: dict[object, int] = {}
    for pod in ctx.effective:
        if pod.deployment != ctx.subject_deployment or ctx.subject_deployment is None:
            continue
        value = _pod_domain_value(pod, domain, ctx.nodes_by_name)
        if value is None:
            continue
        counts[value] = counts.get(value, 0) + 1
    return SpreadTally.of(counts)


def eval_spread(intent: DetectedIntent, node: CachedNode, ctx: ScoringContext) -> float:
    """Least-loaded score (M - k + 1) / (M + 1) over the intent's domain."""
    tally = build_spread_tally(intent.intent, ctx)
    domain = _SPREAD_DOMAIN[intent.intent]
    k = tally.counts.get(_node_domain_value(node, domain), 0)
    return (tally.max_count - k + 1) / (tally.max_count + 1)


def _proximity_raw(
    node: CachedNode,
    ctx: ScoringContext,
    targets: set[str],
    weights: ProximityWeights = PROXIMITY_WEIGHTS,
) -> float:
    k_rack = k_zone = k_region = 0
    for pod in ctx.effective:
        if pod.deployment not in targets or pod.node_name is None:
            continue
        host = ctx.nodes_by_name.get(pod.node_name)
        if host is None:
            continue
        # Counts are inclusive across nested domains: a same-rack pod also
        # counts for the zone and region tallies.
        if node.rack is not None and host.rack == node.rack:
            k_rack += 1
        if node.zone is not None and host.zone == node.zone:
            k_zone += 1
        if node.region is not None and host.region == node.region:
            k_region += 1
    return weights.rack * k_rack + weights.zone * k_zone + weights.region * k_region


def _proximity_scores(
    ctx: ScoringContext, target_deployments: Iterable[str]
) -> dict[str, float]:
    targets = {t for t in target_deployments if t}
    raw = {node.name: _proximity_raw(node, ctx, targets) for node in ctx.candidates}
    top = max(raw.values(), default=0.0)
    if top <= 0.0:
        return {name: 0.0 for name in raw}
    return {name: value / top for name, value in raw.items()}


def eval_proximity(
    node: CachedNode, ctx: ScoringContext, target_deployments: Iterable[str]
) -> float:
    """Pull toward target-deployment pods, self-normalized over candidates."""
    return _proximity_scores(ctx, target_deployments)[node.name]


def _colocate_scores(ctx: ScoringContext) -> dict[str, float]:
    counts = {node.name: 0 for node in ctx.candidates}
    if ctx.subject_deployment is not None:
        for pod in ctx.effective:
            if pod.deployment == ctx.subject_deployment and pod.node_name in counts:
                counts[pod.node_name] += 1
    top = max(counts.values(), default=0)
    if top <= 0:
        return {name: 0.0 for name in counts}
    return {name: count / top for name, count in counts.items()}


def eval_colocate(node: CachedNode, ctx: ScoringContext) -> float:
    """Same-node pull: same-deployment pod count, normalized by the busiest."""
    return _colocate_scores(ctx)[node.name]


# --- scalarization and normalization ----------------------------------------


def _phi_vector(
    intent: DetectedIntent, ctx: ScoringContext
) -> dict[str, float]:
    name = intent.intent
    if name == "prefer_colocate_same_deployment":
        return _colocate_scores(ctx)
    if name == "prefer_nearby_nodes_same_deployment":
        targets = [ctx.subject_deployment] if ctx.subject_deployment else []
        return _proximity_scores(ctx, targets)
    if name == "prefer_deployments":
        return _proximity_scores(ctx, intent.metadata.get("prefer_deployments", []))
    if name in _AVOID_DOMAIN or name == "avoid_deployments":
        return {n.name: eval_avoid(intent, n, ctx) for n in ctx.candidates}
    if name in _SPREAD_DOMAIN:
        tally = build_spread_tally(name, ctx)
        domain = _SPREAD_DOMAIN[name]
        return {
            n.name: (tally.max_count - tally.counts.get(_node_domain_value(n, domain), 0) + 1)
            / (tally.max_count + 1)
            for n in ctx.candidates
        }
    return {n.name: eval_binary_pref(intent, n) for n in ctx.candidates}


def _normalize(raw: Mapping[str, float]) -> tuple[dict[str, float], str]:
    """Relative rescale to [0, 100] plus the deterministic winner."""
    if not raw:
        raise ValueError("cannot normalize an empty score map")
    max_raw = max(raw.values())
    if max_raw > 0:
        norms = {name: max(0.0, value) / max_raw * 100.0 for name, value in raw.items()}
    else:
        norms = {name: 0.0 for name in raw}
    winner = min(name for name, value in raw.items() if value == max_raw)
    return norms, winner


def normalize_scores(raw: Mapping[str, float]) -> dict[str, int]:
    """Map raw scores to final integers: winner 100, everyone else in [1, 99]."""
    norms, winner = _normalize(raw)
    return {
        name: 100 if name == winner else min(99, max(1, round_half_up(norm)))
        for name, norm in norms.items()
    }


def score_nodes(parsed: ParsedHint, ctx: ScoringContext, registry: IntentRegistry = REGISTRY) -> list[ScoreBreakdown]:
    """Score every candidate for one pod; exactly one breakdown wins at 100.

    With zero detected intents the weighting is undefined, so all raw scores
    are 0 and the degenerate normalization path picks the lexicographically
    first node.
    """
    ordered = [name for name in registry.names() if name in parsed.intents]
    contributions: dict[str, dict[str, float]] = {n.name: {} for n in ctx.candidates}
    raw: dict[str, float] = {n.name: 0.0 for n in ctx.candidates}

    if ordered:
        beta = base_weight(len(ordered))
        for name in ordered:
            detected = parsed.intents[name]
            weight = IntentWeight.of(beta, detected)
            phi = _phi_vector(detected, ctx)
            for node_name, value in phi.items():
                contribution = weight.combined * value
                contributions[node_name][name] = contribution
                raw[node_name] += contribution

    norms, winner = _normalize(raw)
    finals = {
        name: 100 if name == winner else min(99, max(1, round_half_up(norm)))
        for name, norm in norms.items()
    }
    return [
        ScoreBreakdown(
            node=name,
            contributions=contributions[name],
            raw=raw[name],
            normalized=norms[name],
            final=finals[name],
            is_winner=name == winner,
        )
        for name in sorted(raw)
    ]
