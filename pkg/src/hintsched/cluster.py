"""In-memory mirror of cluster state: normalized nodes/pods, event application,
full resync, and the short-TTL recent-placements cache.

Raw node/pod objects may be either nested Kubernetes-style documents
({"metadata": ..., "spec": ..., "status": ...}) or the flat snapshot shape
(nodes: name/labels/capacity/taints, pods: name/namespace/labels/annotations/
nodeName), so hand-trimmed real dumps load directly.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Iterable, Mapping

TOPOLOGY_REGION = "topology.kubernetes.io/region"
TOPOLOGY_ZONE = "topology.kubernetes.io/zone"
TOPOLOGY_RACK = "topology.kubernetes.io/rack"

DEFAULT_TTL_SECONDS = 10.0
GIB = 2**30


class MalformedQuantity(Exception):
    """Raised for strings outside the resource-quantity grammar."""


_QUANTITY_RE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([kKMGT]i?|m)?\s*$")

# Decimal powers are exact in binary floating point up to 10**15.
_DECIMAL_MULT = {"K": 1e3, "k": 1e3, "M": 1e6, "G": 1e9, "T": 1e12}
_BINARY_MULT = {"Ki": 2**10, "Mi": 2**20, "Gi": 2**30, "Ti": 2**40}


def parse_quantity(text: str | int | float) -> float:
    """Convert a resource string ("100m", "10Gi", "4") to a float.

    m divides by 1000; K/M/G/T multiply by powers of 1000; Ki/Mi/Gi/Ti
    multiply by powers of 1024. A bare number passes through.
    """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    if not isinstance(text, str):
        raise MalformedQuantity(f"not a quantity: {text!r}")
    match = _QUANTITY_RE.match(text)
    if not match:
        raise MalformedQuantity(f"not a quantity: {text!r}")
    number = float(match.group(1))
    suffix = match.group(2)
    if suffix is None:
        return number
    if suffix == "m":
        return number / 1000.0
    if suffix in _DECIMAL_MULT:
        return number * _DECIMAL_MULT[suffix]
    if suffix in _BINARY_MULT:
        return number * _BINARY_MULT[suffix]
    raise MalformedQuantity(f"unknown suffix in {text!r}")


@dataclass(frozen=True)
class CachedNode:
    """Pre-normalized node state; everything the scorer reads is a plain field."""

    name: str
    region: str | None = None
    zone: str | None = None
    rack: str | None = None
    cpu_count: float = 0.0
    memory_bytes: int = 0
    gpu_count: float = 0.0
    tpu_count: float = 0.0
    has_ssd: bool = False
    has_public_ip: bool = False
    network_gbps: float = 0.0
    network_type: str | None = None
    ephemeral_storage_bytes: int = 0
    unschedulable_taint: bool = False
    labels: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class CachedPod:
    name: str
    namespace: str = "default"
    node_name: str | None = None
    deployment: str | None = None
    allocation_hint: str | None = None
    labels: Mapping[str, str] = field(default_factory=dict)
    created_at: float = 0.0

    @property
    def key(self) -> tuple[str, str]:
        return (self.namespace, self.name)


def _label_float(labels: Mapping[str, str], key: str, default: float = 0.0) -> float:
    raw = labels.get(key)
    if raw is None:
        return default
    try:
        return float(raw)
    except (TypeError, ValueError):
        return default


def node_from_raw(raw: Mapping[str, Any]) -> CachedNode:
    """Normalize a raw node object into a CachedNode.

    Attribute conventions: hardware=gpu|tpu (count from gpu-count/tpu-count,
    default 1), disk=ssd, network=public or has-public-ip=true,
    network-gbps=<float>, network-type=<text>; cpu/memory/ephemeral-storage
    come from the capacity map via parse_quantity.
    """
    meta = raw.get("metadata", raw)
    name = meta.get("name")
    if not name:
        raise ValueError("node object has no name")
    labels = dict(meta.get("labels") or {})
    status = raw.get("status", {})
    capacity = status.get("capacity", raw.get("capacity") or {})
    spec = raw.get("spec", {})
    taints = spec.get("taints", raw.get("taints") or []) or []

    hardware = labels.get("hardware", "").lower()
    gpu_count = _label_float(labels, "gpu-count", 1.0) if hardware == "gpu" else 0.0
    tpu_count = _label_float(labels, "tpu-count", 1.0) if hardware == "tpu" else 0.0

    has_public_ip = (
        labels.get("network", "").lower() == "public"
        or labels.get("has-public-ip", "").lower() == "true"
    )

    return CachedNode(
        name=name,
        region=labels.get(TOPOLOGY_REGION),
        zone=labels.get(TOPOLOGY_ZONE),
        rack=labels.get(TOPOLOGY_RACK),
        cpu_count=parse_quantity(capacity.get("cpu", 0)),
        memory_bytes=int(parse_quantity(capacity.get("memory", 0))),
        gpu_count=gpu_count,
        tpu_count=tpu_count,
        has_ssd=labels.get("disk", "").lower() == "ssd",
        has_public_ip=has_public_ip,
        network_gbps=_label_float(labels, "network-gbps"),
        network_type=labels.get("network-type"),
        ephemeral_storage_bytes=int(parse_quantity(capacity.get("ephemeral-storage", 0))),
        unschedulable_taint=any(t.get("effect") == "NoSchedule" for t in taints),
        labels=labels,
    )


def _parse_timestamp(value: Any) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        try:
            return datetime.fromisoformat(value.replace("Z", "+00:00")).timestamp()
        except ValueError:
            return 0.0
    return 0.0


def pod_from_raw(raw: Mapping[str, Any], deployment_label_key: str = "app") -> CachedPod:
    """Normalize a raw pod object; deployment identity comes from a label."""
    meta = raw.get("metadata", raw)
    name = meta.get("name")
    if not name:
        raise ValueError("pod object has no name")
    labels = dict(meta.get("labels") or {})
    annotations = meta.get("annotations") or {}
    spec = raw.get("spec", {})
    node_name = spec.get("nodeName", raw.get("nodeName")) or None
    created = meta.get("creationTimestamp", raw.get("created_at", 0.0))
    return CachedPod(
        name=name,
        namespace=meta.get("namespace") or "default",
        node_name=node_name,
        deployment=labels.get(deployment_label_key),
        allocation_hint=annotations.get("allocation_hint"),
        labels=labels,
        created_at=_parse_timestamp(created),
    )


def _is_node_object(obj: Mapping[str, Any]) -> bool:
    kind = obj.get("kind")
    if kind:
        return kind == "Node"
    if "capacity" in obj or "capacity" in obj.get("status", {}):
        return True
    if "nodeName" in obj or "nodeName" in obj.get("spec", {}):
        return False
    meta = obj.get("metadata", obj)
    return "namespace" not in meta


class StateCache:
    """Mirror of nodes and pods, updated by events or replaced by full resync.

    One writer, many readers: all mutation and reads of the internal maps are
    lock-protected, and readers receive copies, never live references.
    """

    def __init__(self, deployment_label_key: str = "app"):
        self.deployment_label_key = deployment_label_key
        self._lock = threading.RLock()
        self._nodes: dict[str, CachedNode] = {}
        self._pods: dict[tuple[str, str], CachedPod] = {}

    def apply_event(self, kind: str, obj: Mapping[str, Any]) -> None:
        """Apply one ADDED/MODIFIED/DELETED watch event."""
        if kind not in ("ADDED", "MODIFIED", "DELETED"):
            raise ValueError(f"unknown event kind: {kind!r}")
        if _is_node_object(obj):
            node = node_from_raw(obj)
            with self._lock:
                if kind == "DELETED":
                    self._nodes.pop(node.name, None)
                else:
                    self._nodes[node.name] = node
        else:
            pod = pod_from_raw(obj, self.deployment_label_key)
            with self._lock:
                if kind == "DELETED":
                    self._pods.pop(pod.key, None)
                else:
                    self._pods[pod.key] = pod

    def full_resync(
        self,
        node_snapshot: Iterable[Mapping[str, Any]],
        pod_snapshot: Iterable[Mapping[str, Any]],
    ) -> None:
        """Replace the entire cache contents atomically from snapshots."""
        nodes = {}
        for raw in node_snapshot:
            node = node_from_raw(raw)
            nodes[node.name] = node
        pods = {}
        for raw in pod_snapshot:
            pod = pod_from_raw(raw, self.deployment_label_key)
            pods[pod.key] = pod
        with self._lock:
            self._nodes = nodes
            self._pods = pods

    def load_snapshot(self, doc: Mapping[str, Any]) -> None:
        """Load a {"nodes": [...], "pods": [...]} snapshot document."""
        self.full_resync(doc.get("nodes", []), doc.get("pods", []))

    def nodes(self) -> dict[str, CachedNode]:
        with self._lock:
            return dict(self._nodes)

    def get_node(self, name: str) -> CachedNode | None:
        with self._lock:
            return self._nodes.get(name)

    def pods(self) -> list[CachedPod]:
        with self._lock:
            return list(self._pods.values())

    def pod_keys(self) -> set[tuple[str, str]]:
        with self._lock:
            return set(self._pods)


@dataclass(frozen=True)
class PlacementEntry:
    pod_key: tuple[str, str]
    node_name: str
    deployment: str | None
    placed_at: float


class RecentPlacements:
    """Short-TTL record of scheduling decisions not yet visible via the API.

    An entry is alive strictly while (now - placed_at) < ttl; pruning is lazy,
    on query. Re-recording the same pod key overwrites the prior entry.
    """

    def __init__(self, ttl: float = DEFAULT_TTL_SECONDS):
        self.ttl = ttl
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], PlacementEntry] = {}

    def record(self, pod: CachedPod, node_name: str, now: float) -> None:
        entry = PlacementEntry(pod.key, node_name, pod.deployment, now)
        with self._lock:
            self._entries[pod.key] = entry

    def unexpired(self, now: float) -> list[PlacementEntry]:
        with self._lock:
            alive = {
                key: entry
                for key, entry in self._entries.items()
                if (now - entry.placed_at) < self.ttl
            }
            self._entries = alive
            return list(alive.values())

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


def effective_pods(
    cache: StateCache, recent: RecentPlacements | None, now: float
) -> list[CachedPod]:
    """Union of API-confirmed pods and unexpired local placements.

    Deduplicated by pod key; the API entry wins when both exist, so a
    placement that has become visible upstream is never counted twice.
    """
    pods = cache.pods()
    if recent is None:
        return pods
    seen = {pod.key for pod in pods}
    for entry in recent.unexpired(now):
        if entry.pod_key in seen:
            continue
        namespace, name = entry.pod_key
        pods.append(
            CachedPod(
                name=name,
                namespace=namespace,
                node_name=entry.node_name,
                deployment=entry.deployment,
                created_at=entry.placed_at,
            )
        )
    return pods
