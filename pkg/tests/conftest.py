import random

import pytest

from hintsched.cluster import CachedNode, CachedPod
from hintsched.intents import REGISTRY, DetectedIntent


def build_node(name, **kwargs):
    return CachedNode(name=name, **kwargs)


def build_pod(name, node=None, deployment=None, **kwargs):
    return CachedPod(name=name, node_name=node, deployment=deployment, **kwargs)


ZONES = ["us-east-1a", "us-east-1b", "eu-central-1a", None]
RACKS = ["rack-1", "rack-2", "rack-3", None]
REGIONS = ["us-east-1", "eu-central-1", None]
DEPLOYMENTS = ["web", "database", "cache", "logging-agent"]


def random_node(rng: random.Random, index: int) -> CachedNode:
    return CachedNode(
        name=f"node-{index:02d}",
        region=rng.choice(REGIONS),
        zone=rng.choice(ZONES),
        rack=rng.choice(RACKS),
        cpu_count=rng.choice([1.0, 4.0, 16.0]),
        memory_bytes=rng.choice([2**30, 8 * 2**30, 64 * 2**30]),
        gpu_count=rng.choice([0.0, 1.0, 4.0]),
        tpu_count=rng.choice([0.0, 8.0]),
        has_ssd=rng.random() < 0.5,
        has_public_ip=rng.random() < 0.5,
        network_gbps=rng.choice([0.0, 10.0, 100.0]),
        network_type=rng.choice([None, "ena", "infiniband"]),
        ephemeral_storage_bytes=rng.choice([0, 50 * 2**30, 500 * 2**30]),
    )


def random_pods(rng: random.Random, nodes, count: int):
    pods = []
    names = [n.name for n in nodes] + ["offgrid-node"]
    for i in range(count):
        pods.append(
            CachedPod(
                name=f"pod-{i}",
                node_name=rng.choice(names + [None]),
                deployment=rng.choice(DEPLOYMENTS),
            )
        )
    return pods


def random_intent(rng: random.Random, name: str) -> DetectedIntent:
    cls = REGISTRY.lookup(name)
    confidence = round(rng.random(), 3)
    strength = rng.choice([0.5, 1.0, 1.5])
    explanation = "keyword" if strength != 1.0 else None
    metadata = {}
    if cls.metadata_kind.value == "float":
        metadata[cls.metadata_field] = rng.choice([0.5, 1.0, 4.0, 64.0, 100.0])
    elif cls.metadata_kind.value == "string_list":
        pool = {
            "prefer_regions": REGIONS,
            "avoid_regions": REGIONS,
            "prefer_zones": ZONES,
            "avoid_zones": ZONES,
            "prefer_racks": RACKS,
            "avoid_racks": RACKS,
            "prefer_nodes": ["node-00", "node-01", "node-02", "node-03", "node-04"],
            "avoid_nodes": ["node-00", "node-01", "node-02", "node-03", "node-04"],
            "prefer_deployments": DEPLOYMENTS,
            "avoid_deployments": DEPLOYMENTS,
        }[name]
        values = [v for v in pool if v is not None]
        metadata[cls.metadata_field] = rng.sample(values, k=rng.randint(0, min(2, len(values))))
    elif cls.metadata_kind.value == "string":
        metadata[cls.metadata_field] = rng.choice(["ena", "infiniband", ""])
    return DetectedIntent(
        intent=name,
        confidence=confidence,
        strength=strength,
        strength_explanation=explanation,
        metadata=metadata,
    )


def random_instance(rng: random.Random):
    """One randomized scoring instance: <=5 nodes, <=4 intents, random pods."""
    nodes = [random_node(rng, i) for i in range(rng.randint(1, 5))]
    pods = random_pods(rng, nodes, rng.randint(0, 6))
    subject = rng.choice(DEPLOYMENTS + [None])
    names = rng.sample(REGISTRY.names(), k=rng.randint(1, 4))
    intents = [random_intent(rng, name) for name in names]
    return nodes, pods, subject, intents


@pytest.fixture
def rng():
    return random.Random(20240811)
