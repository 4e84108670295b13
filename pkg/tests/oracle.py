"""Independent brute-force re-implementation of the scoring equations.

Written straight from the additive-utility definitions with plain loops and
no shared code with hintsched.scoring; used to cross-check raw scores on
randomized instances. Keep this file dumb on purpose.
"""

from __future__ import annotations

from hintsched.cluster import CachedNode, CachedPod
from hintsched.intents import REGISTRY, DetectedIntent

RACK_W, ZONE_W, REGION_W = 2.0, 0.5, 0.2


def _host(nodes: list[CachedNode], name: str | None) -> CachedNode | None:
    for node in nodes:
        if node.name == name:
            return node
    return None


def _binary(di: DetectedIntent, node: CachedNode) -> float:
    name, meta = di.intent, di.metadata
    if name == "prefer_regions":
        return 1.0 if node.region in meta["prefer_regions"] and node.region else 0.0
    if name == "prefer_zones":
        return 1.0 if node.zone in meta["prefer_zones"] and node.zone else 0.0
    if name == "prefer_racks":
        return 1.0 if node.rack in meta["prefer_racks"] and node.rack else 0.0
    if name == "prefer_nodes":
        return 1.0 if node.name in meta["prefer_nodes"] else 0.0
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
        want = meta["prefer_network_type"]
        return 1.0 if want and node.network_type and node.network_type.lower() == want.lower() else 0.0
    if name == "prefer_ephemeral_storage":
        return 1.0 if node.ephemeral_storage_bytes / 2**30 >= meta["prefer_ephemeral_storage_gb"] else 0.0
    raise AssertionError(name)


def _avoid(di: DetectedIntent, node: CachedNode, pods: list[CachedPod]) -> float:
    name, meta = di.intent, di.metadata
    if name == "avoid_deployments":
        for pod in pods:
            if pod.node_name == node.name and pod.deployment in meta["avoid_deployments"]:
                return -2.0
        return 0.0
    attr = {"avoid_regions": "region", "avoid_zones": "zone", "avoid_racks": "rack"}.get(name)
    value = node.name if name == "avoid_nodes" else getattr(node, attr)
    return -2.0 if value is not None and value in meta[name] else 0.0


def _spread(di, node, nodes, pods, subject) -> float:
    domain = di.intent.split("_")[1]  # regions|zones|racks|nodes
    attr = {"regions": "region", "zones": "zone", "racks": "rack"}.get(domain)

    def key_of_node(n: CachedNode):
        if attr is None:
            return n.name
        value = getattr(n, attr)
        return value if value is not None else ("solo", n.name)

    hist: dict = {}
    for pod in pods:
        if subject is None or pod.deployment != subject or pod.node_name is None:
            continue
        if attr is None:
            key = pod.node_name
        else:
            host = _host(nodes, pod.node_name)
            if host is None:
                continue
            key = key_of_node(host)
        hist[key] = hist.get(key, 0) + 1
    m = max(hist.values()) if hist else 0
    k = hist.get(key_of_node(node), 0)
    return (m - k + 1) / (m + 1)


def _proximity_all(nodes, pods, targets) -> dict[str, float]:
    raw = {}
    for node in nodes:
        kr = kz = kg = 0
        for pod in pods:
            if pod.deployment not in targets:
                continue
            host = _host(nodes, pod.node_name)
            if host is None:
                continue
            if node.rack is not None and host.rack == node.rack:
                kr += 1
            if node.zone is not None and host.zone == node.zone:
                kz += 1
            if node.region is not None and host.region == node.region:
                kg += 1
        raw[node.name] = RACK_W * kr + ZONE_W * kz + REGION_W * kg
    top = max(raw.values()) if raw else 0.0
    if top <= 0:
        return {name: 0.0 for name in raw}
    return {name: value / top for name, value in raw.items()}


def _colocate_all(nodes, pods, subject) -> dict[str, float]:
    counts = {node.name: 0 for node in nodes}
    for pod in pods:
        if subject is not None and pod.deployment == subject and pod.node_name in counts:
            counts[pod.node_name] += 1
    top = max(counts.values()) if counts else 0
    if top == 0:
        return {name: 0.0 for name in counts}
    return {name: c / top for name, c in counts.items()}


def oracle_raw_scores(
    intents: list[DetectedIntent],
    nodes: list[CachedNode],
    pods: list[CachedPod],
    subject_deployment: str | None,
) -> dict[str, float]:
    """Raw additive scores, summed per node in registry intent order."""
    order = {name: i for i, name in enumerate(REGISTRY.names())}
    ordered = sorted(intents, key=lambda d: order[d.intent])
    raw = {node.name: 0.0 for node in nodes}
    if not ordered:
        return raw
    beta = 100.0 / len(ordered)
    for di in ordered:
        if di.intent == "prefer_colocate_same_deployment":
            phi = _colocate_all(nodes, pods, subject_deployment)
        elif di.intent == "prefer_nearby_nodes_same_deployment":
            targets = {subject_deployment} if subject_deployment else set()
            phi = _proximity_all(nodes, pods, targets)
        elif di.intent == "prefer_deployments":
            phi = _proximity_all(nodes, pods, set(di.metadata["prefer_deployments"]))
        elif di.intent.startswith("avoid_"):
            phi = {n.name: _avoid(di, n, pods) for n in nodes}
        elif di.intent.startswith("spread_"):
            phi = {n.name: _spread(di, n, nodes, pods, subject_deployment) for n in nodes}
        else:
            phi = {n.name: _binary(di, n) for n in nodes}
        for node in nodes:
            raw[node.name] += beta * di.confidence * di.strength * phi[node.name]
    return raw


def oracle_finals(raw: dict[str, float]) -> dict[str, int]:
    """Independent rescale + winner pinning for cross-checking normalization."""
    import math

    best = max(raw.values())
    winner = min(n for n, v in raw.items() if v == best)
    out = {}
    for name, value in raw.items():
        if name == winner:
            out[name] = 100
            continue
        norm = (max(0.0, value) / best * 100.0) if best > 0 else 0.0
        out[name] = min(99, max(1, int(math.floor(norm + 0.5))))
    return out
