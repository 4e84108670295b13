"""Nine-node simulated testbed and the six placement scenarios.

The topology: a tainted control plane plus eight workers across two zones
(zone a: m02 m03; zone b: m04..m09) and five racks (rack-1: m02 m03,
rack-2: m04, rack-3: m05 m06, rack-4: m07 m08, rack-5: m09), all in one
region. Scenario overlays add the GPU label (B), pre-existing deployments
(C), and the network-speed labels (E).

The driver schedules replicas sequentially through the extender service on a
virtual clock: each decision is recorded in the recent-placements cache
immediately, while the corresponding API event only becomes visible after the
configured api_visibility_delay, reproducing the burst race the recent cache
exists to absorb.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Iterable

from .analyzer import HintAnalyzer
from .analyzer.scripted import ScriptedAnalyzer
from .cluster import RecentPlacements, StateCache
from .extender import ExtenderService
from .intents import REGISTRY

CONTROL_PLANE = "minikube"
WORKERS = tuple(f"minikube-m{i:02d}" for i in range(2, 10))

_ZONE = {
    "minikube-m02": "us-east-1a",
    "minikube-m03": "us-east-1a",
    "minikube-m04": "us-east-1b",
    "minikube-m05": "us-east-1b",
    "minikube-m06": "us-east-1b",
    "minikube-m07": "us-east-1b",
    "minikube-m08": "us-east-1b",
    "minikube-m09": "us-east-1b",
}
_RACK = {
    "minikube-m02": "rack-1",
    "minikube-m03": "rack-1",
    "minikube-m04": "rack-2",
    "minikube-m05": "rack-3",
    "minikube-m06": "rack-3",
    "minikube-m07": "rack-4",
    "minikube-m08": "rack-4",
    "minikube-m09": "rack-5",
}
_REGION = "us-east-1"

SCENARIO_PARSES_RESOURCE = "scenario_parses.json"
EVAL_FIXTURE_RESOURCE = "eval_fixture_v1.json"


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    replicas: int
    hint: str
    deployment: str = "web"
    pre_existing: tuple[tuple[str, str], ...] = ()
    objective: str = ""
    baseline_note: str = ""
    expected: str = ""
    inter_arrival: float = 0.05
    api_visibility_delay: float = 5.0
    node_overlays: tuple[tuple[str, tuple[tuple[str, str], ...]], ...] = ()


SCENARIOS: dict[str, ScenarioSpec] = {
    "A": ScenarioSpec(
        id="A",
        replicas=6,
        hint="spread these pods evenly across all available zones for high availability",
        objective="High-availability policy: even distribution across zones.",
        baseline_note=(
            "Reference native configuration (topologySpreadConstraints, maxSkew 1, "
            "DoNotSchedule) also achieves a 3:3 split."
        ),
        expected="Perfect 3:3 split of the six replicas across the two zones.",
    ),
    "B": ScenarioSpec(
        id="B",
        replicas=6,
        hint="this is a critical ML training job, it must run on nodes with GPUs",
        objective="Resource preference: land on GPU-labeled hardware.",
        baseline_note=(
            "Reference native configuration (preferred nodeAffinity on hardware=gpu, "
            "weight 100) also places 6/6 on the GPU node."
        ),
        expected="All 6 replicas on minikube-m02, the only GPU-labeled node.",
        node_overlays=(("minikube-m02", (("hardware", "gpu"),)),),
    ),
    "C": ScenarioSpec(
        id="C",
        replicas=6,
        hint=(
            "prefer to be in the same region as the 'database' and 'cache' deployments, "
            "but avoid being on the same node as the 'logging-agent' pods."
        ),
        pre_existing=(
            ("database", "minikube-m05"),
            ("cache", "minikube-m03"),
            ("logging-agent", "minikube-m02"),
        ),
        objective="Mixed affinity and anti-affinity across other deployments.",
        baseline_note=(
            "Reference native configuration (podAffinity on database/cache by region + "
            "podAntiAffinity on logging-agent by hostname) avoids m02 and spreads over "
            "m03/m06/m07/m08/m09."
        ),
        expected="Zero replicas on minikube-m02; all 6 pulled onto minikube-m03.",
    ),
    "D": ScenarioSpec(
        id="D",
        replicas=20,
        hint="Collocate all pods from this deployment on a single node.",
        objective="Burst colocation: the recent-placements cache must absorb API lag.",
        baseline_note=(
            "Reference native configuration (required podAffinity by hostname) also "
            "lands all 20 replicas on a single node."
        ),
        expected="All 20 replicas on one distinct node despite delayed API visibility.",
    ),
    "E": ScenarioSpec(
        id="E",
        replicas=6,
        hint=(
            "This is a high-bandwidth job, please place on nodes with at least 100Gbps "
            "network speed."
        ),
        objective="Quantitative resource preference parsed from the hint.",
        baseline_note=(
            "Reference native configuration (preferred nodeAffinity Gt on network-gbps) "
            "placed only 1/6 on the fast node; its other scoring plugins outweighed the "
            "soft preference."
        ),
        expected="All 6 replicas on minikube-m09, the only 100 Gbps node.",
        node_overlays=tuple(
            (name, (("network-gbps", "100" if name == "minikube-m09" else "10"),))
            for name in WORKERS
        ),
    ),
    "F": ScenarioSpec(
        id="F",
        replicas=1,
        hint=(
            "For high performance, collocate all pods on a single node. For high "
            "availability, you must also spread these pods across all zones."
        ),
        objective="Conflicting soft preferences resolved by the additive model.",
        baseline_note=(
            "Reference native configuration (required podAffinity + DoNotSchedule "
            "topology spread) deadlocks: the pod stays Pending."
        ),
        expected="The pod schedules (no pending state); the additive sum picks a side.",
    ),
}


def _node_raw(name: str, extra_labels: dict[str, str] | None = None, tainted: bool = False) -> dict:
    labels = {"kubernetes.io/hostname": name}
    if name in _ZONE:
        labels["topology.kubernetes.io/region"] = _REGION
        labels["topology.kubernetes.io/zone"] = _ZONE[name]
        labels["topology.kubernetes.io/rack"] = _RACK[name]
    labels.update(extra_labels or {})
    raw = {
        "kind": "Node",
        "metadata": {"name": name, "labels": labels},
        "status": {"capacity": {"cpu": "4", "memory": "8Gi", "ephemeral-storage": "50Gi"}},
        "spec": {},
    }
    if tainted:
        raw["spec"]["taints"] = [
            {"key": "node-role.kubernetes.io/control-plane", "effect": "NoSchedule"}
        ]
    return raw


def _pod_raw(name: str, deployment: str, node: str | None = None, hint: str | None = None) -> dict:
    meta: dict = {"name": name, "namespace": "default", "labels": {"app": deployment}}
    if hint is not None:
        meta["annotations"] = {"allocation_hint": hint}
    return {"kind": "Pod", "metadata": meta, "spec": {"nodeName": node} if node else {}}


def build_testbed(spec: ScenarioSpec) -> StateCache:
    """StateCache primed with the nine-node topology plus scenario overlays."""
    overlays: dict[str, dict[str, str]] = {}
    for node_name, pairs in spec.node_overlays:
        overlays.setdefault(node_name, {}).update(dict(pairs))
    nodes = [_node_raw(CONTROL_PLANE, tainted=True)]
    nodes.extend(_node_raw(name, overlays.get(name)) for name in WORKERS)
    pods = [
        _pod_raw(f"{deployment}-0", deployment, node)
        for deployment, node in spec.pre_existing
    ]
    cache = StateCache()
    cache.full_resync(nodes, pods)
    return cache


@dataclass
class Assertion:
    name: str
    passed: bool
    detail: str


@dataclass
class PlacementReport:
    scenario_id: str
    hint: str
    objective: str
    baseline_note: str
    placements: list[tuple[str, str]] = field(default_factory=list)
    node_counts: dict[str, int] = field(default_factory=dict)
    zone_counts: dict[str, int] = field(default_factory=dict)
    rack_counts: dict[str, int] = field(default_factory=dict)
    assertions: list[Assertion] = field(default_factory=list)
    favored_intent: str | None = None
    parsed_wire: dict = field(default_factory=dict)
    backend: str = ""
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "hint": self.hint,
            "objective": self.objective,
            "baseline_note": self.baseline_note,
            "backend": self.backend,
            "placements": [list(p) for p in self.placements],
            "node_counts": self.node_counts,
            "zone_counts": self.zone_counts,
            "rack_counts": self.rack_counts,
            "favored_intent": self.favored_intent,
            "parsed_hint": self.parsed_wire,
            "assertions": [
                {"name": a.name, "passed": a.passed, "detail": a.detail}
                for a in self.assertions
            ],
            "passed": self.passed,
            "wall_time_seconds": self.wall_time,
        }


class VirtualClock:
    """Deterministic stand-in for wall time inside the simulator."""

    def __init__(self, start: float = 0.0):
        self._now = start

    def now(self) -> float:
        return self._now

    def advance(self, dt: float) -> None:
        self._now += dt


def scripted_scenario_analyzer() -> HintAnalyzer:
    """Analyzer replaying the bundled golden parses for all six hints."""
    data = resources.files("hintsched.data").joinpath(SCENARIO_PARSES_RESOURCE)
    records = json.loads(data.read_text(encoding="utf-8"))
    return HintAnalyzer(ScriptedAnalyzer.from_records(records))


def bundled_eval_fixture_path():
    return resources.files("hintsched.data").joinpath(EVAL_FIXTURE_RESOURCE)


def _counts(
    placements: Iterable[tuple[str, str]], key: dict[str, str] | None = None
) -> dict[str, int]:
    counts: dict[str, int] = {}
    for _, node in placements:
        bucket = key[node] if key is not None else node
        counts[bucket] = counts.get(bucket, 0) + 1
    return dict(sorted(counts.items()))


def _scenario_assertions(spec: ScenarioSpec, report: PlacementReport) -> list[Assertion]:
    checks: list[Assertion] = []
    if spec.id == "A":
        ok = report.zone_counts == {"us-east-1a": 3, "us-east-1b": 3}
        checks.append(Assertion("zone split 3:3", ok, f"zone counts {report.zone_counts}"))
    elif spec.id == "B":
        ok = report.node_counts == {"minikube-m02": 6}
        checks.append(Assertion("6/6 on the GPU node", ok, f"node counts {report.node_counts}"))
    elif spec.id == "C":
        on_m02 = report.node_counts.get("minikube-m02", 0)
        checks.append(
            Assertion("no pods beside logging-agent", on_m02 == 0, f"{on_m02} pods on minikube-m02")
        )
        ok = report.node_counts == {"minikube-m03": 6}
        checks.append(
            Assertion(
                "all pods near the cache deployment (prototype-exact)",
                ok,
                f"node counts {report.node_counts}",
            )
        )
    elif spec.id == "D":
        distinct = len(report.node_counts)
        total = sum(report.node_counts.values())
        checks.append(
            Assertion(
                "burst lands on one distinct node",
                distinct == 1 and total == spec.replicas,
                f"{total} pods over {distinct} node(s): {report.node_counts}",
            )
        )
    elif spec.id == "E":
        ok = report.node_counts == {"minikube-m09": 6}
        checks.append(Assertion("6/6 on the 100 Gbps node", ok, f"node counts {report.node_counts}"))
    elif spec.id == "F":
        ok = len(report.placements) == spec.replicas
        checks.append(
            Assertion(
                "conflicting hint still schedules",
                ok,
                f"{len(report.placements)} of {spec.replicas} replicas placed, "
                f"additive sum favored {report.favored_intent!r}",
            )
        )
    return checks


def run_scenario(
    spec: ScenarioSpec | str,
    analyzer: HintAnalyzer | None = None,
    use_recent_placements: bool = True,
    inter_arrival: float | None = None,
    api_visibility_delay: float | None = None,
) -> PlacementReport:
    """Schedule one scenario's replicas sequentially and evaluate its checks."""
    if isinstance(spec, str):
        spec = SCENARIOS[spec.upper()]
    if inter_arrival is not None or api_visibility_delay is not None:
        spec = replace(
            spec,
            inter_arrival=spec.inter_arrival if inter_arrival is None else inter_arrival,
            api_visibility_delay=(
                spec.api_visibility_delay
                if api_visibility_delay is None
                else api_visibility_delay
            ),
        )
    analyzer = analyzer or scripted_scenario_analyzer()

    started = time.perf_counter()
    cache = build_testbed(spec)
    clock = VirtualClock()
    service = ExtenderService(
        cache,
        analyzer,
        recent=RecentPlacements(),
        now_fn=clock.now,
        use_recent_placements=use_recent_placements,
    )

    report = PlacementReport(
        scenario_id=spec.id,
        hint=spec.hint,
        objective=spec.objective,
        baseline_note=spec.baseline_note,
        backend=analyzer.backend.name,
    )

    pending_events: list[tuple[float, dict]] = []
    first_breakdowns = None
    for index in range(spec.replicas):
        while pending_events and pending_events[0][0] <= clock.now():
            _, raw = pending_events.pop(0)
            cache.apply_event("ADDED", raw)
        pod_raw = _pod_raw(f"{spec.deployment}-{index}", spec.deployment, hint=spec.hint)
        priorities, breakdowns = service.prioritize_detailed(
            {"pod": pod_raw, "nodenames": list(WORKERS)}
        )
        if first_breakdowns is None:
            first_breakdowns = breakdowns
        winner = next(entry["Host"] for entry in priorities if entry["Score"] == 100)
        report.placements.append((f"{spec.deployment}-{index}", winner))
        pending_events.append(
            (
                clock.now() + spec.api_visibility_delay,
                _pod_raw(f"{spec.deployment}-{index}", spec.deployment, node=winner),
            )
        )
        clock.advance(spec.inter_arrival)

    report.node_counts = _counts(report.placements)
    report.zone_counts = _counts(report.placements, _ZONE)
    report.rack_counts = _counts(report.placements, _RACK)
    report.parsed_wire = analyzer.analyze(spec.hint).parsed.to_wire(REGISTRY)

    if first_breakdowns is not None:
        winner_breakdown = next(b for b in first_breakdowns if b.is_winner)
        if winner_breakdown.contributions:
            report.favored_intent = max(
                winner_breakdown.contributions.items(), key=lambda kv: kv[1]
            )[0]
    report.assertions = _scenario_assertions(spec, report)
    report.wall_time = time.perf_counter() - started
    return report


def run_all(
    analyzer: HintAnalyzer | None = None, use_recent_placements: bool = True
) -> list[PlacementReport]:
    """Run scenarios A through F; each gets a fresh analyzer cache view."""
    reports = []
    for scenario_id in sorted(SCENARIOS):
        reports.append(
            run_scenario(
                SCENARIOS[scenario_id],
                analyzer=analyzer,
                use_recent_placements=use_recent_placements,
            )
        )
    return reports
