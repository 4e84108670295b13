"""Scheduler-extender webhook: /filter and /prioritize over the scoring engine.

Request bodies follow the upstream extender convention: {"pod": ...,
"nodenames": [...]} (an inline {"nodes": {"items": [...]}} list is accepted
as a fallback). /prioritize responds with [{"Host": ..., "Score": ...}];
/filter responds with {"nodenames": [...], "failedNodes": {name: reason}}.
The winning placement is recorded in the recent-placements cache before the
response is written, which is what keeps affinity counting correct during
scheduling bursts.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from typing import Any, Mapping

from .analyzer import HintAnalyzer
from .cluster import (
    CachedNode,
    RecentPlacements,
    StateCache,
    effective_pods,
    node_from_raw,
    pod_from_raw,
)
from .scoring import ScoreBreakdown, ScoringContext, score_nodes

logger = logging.getLogger(__name__)


class MalformedRequest(Exception):
    """Client-side request problem; maps to HTTP 400."""


def _json_bytes(payload: Any) -> bytes:
    return json.dumps(payload, separators=(",", ":")).encode("utf-8")


class ExtenderService:
    """Webhook logic, independent of the HTTP layer for direct use in tests
    and the simulator."""

    def __init__(
        self,
        cache: StateCache,
        analyzer: HintAnalyzer,
        recent: RecentPlacements | None = None,
        now_fn=time.monotonic,
        use_recent_placements: bool = True,
    ):
        self.cache = cache
        self.analyzer = analyzer
        self.recent = recent if recent is not None else RecentPlacements()
        self.now_fn = now_fn
        self.use_recent_placements = use_recent_placements
        # Serializes the read-score-record cycle so burst requests always see
        # every prior decision.
        self._decide_lock = threading.Lock()

    # -- request plumbing ----------------------------------------------------

    def _requested_nodes(self, body: Mapping[str, Any]) -> list[str]:
        names = body.get("nodenames")
        if names is None and isinstance(body.get("nodes"), Mapping):
            items = body["nodes"].get("items", [])
            names = [item.get("metadata", item).get("name") for item in items]
        if not isinstance(names, list) or not names or not all(isinstance(n, str) for n in names):
            raise MalformedRequest("request carries no candidate node names")
        return names

    def _inline_nodes(self, body: Mapping[str, Any]) -> dict[str, CachedNode]:
        inline: dict[str, CachedNode] = {}
        if isinstance(body.get("nodes"), Mapping):
            for item in body["nodes"].get("items", []):
                try:
                    node = node_from_raw(item)
                except Exception as exc:
                    raise MalformedRequest(f"bad inline node object: {exc}") from exc
                inline[node.name] = node
        return inline

    # -- webhook verbs ---------------------------------------------------------

    def filter(self, body: Mapping[str, Any]) -> dict:
        """Accept untainted, known nodes; reject the rest with a reason."""
        if not isinstance(body, Mapping):
            raise MalformedRequest("body is not an object")
        names = self._requested_nodes(body)
        inline = self._inline_nodes(body)
        accepted: list[str] = []
        failed: dict[str, str] = {}
        for name in names:
            node = self.cache.get_node(name) or inline.get(name)
            if node is None:
                failed[name] = "unknown node"
            elif node.unschedulable_taint:
                failed[name] = "node has NoSchedule taint"
            else:
                accepted.append(name)
        return {"nodenames": accepted, "failedNodes": failed}

    def prioritize(self, body: Mapping[str, Any]) -> list[dict]:
        priorities, _ = self.prioritize_detailed(body)
        return priorities

    def prioritize_detailed(
        self, body: Mapping[str, Any]
    ) -> tuple[list[dict], list[ScoreBreakdown]]:
        """Score the pod against the candidates and record the winner.

        Analyzer failure degrades to an empty hint (neutral scoring); it never
        turns into an error response.
        """
        if not isinstance(body, Mapping):
            raise MalformedRequest("body is not an object")
        pod_raw = body.get("pod")
        if not isinstance(pod_raw, Mapping):
            raise MalformedRequest("request carries no pod object")
        try:
            pod = pod_from_raw(pod_raw, self.cache.deployment_label_key)
        except Exception as exc:
            raise MalformedRequest(f"bad pod object: {exc}") from exc

        names = self._requested_nodes(body)
        inline = self._inline_nodes(body)
        candidates: list[CachedNode] = []
        for name in names:
            node = self.cache.get_node(name) or inline.get(name)
            if node is None:
                raise MalformedRequest(f"unknown node: {name}")
            candidates.append(node)

        outcome = self.analyzer.analyze(pod.allocation_hint or "")
        if outcome.degraded:
            logger.warning("hint analysis degraded for pod %s/%s", pod.namespace, pod.name)

        with self._decide_lock:
            now = self.now_fn()
            pods = effective_pods(
                self.cache, self.recent if self.use_recent_placements else None, now
            )
            ctx = ScoringContext(
                candidates=candidates,
                effective=pods,
                subject_pod=pod,
                subject_deployment=pod.deployment,
            )
            breakdowns = score_nodes(outcome.parsed, ctx)
            finals = {b.node: b.final for b in breakdowns}
            winner = next(b.node for b in breakdowns if b.is_winner)
            self.recent.record(pod, winner, now)

        return [{"Host": name, "Score": finals[name]} for name in names], breakdowns


def create_app(service: ExtenderService):
    """FastAPI wrapper exposing the webhook verbs plus a liveness probe."""
    from fastapi import FastAPI, Request, Response

    app = FastAPI(title="hintsched-extender")

    async def _body(request: Request) -> Any:
        try:
            return json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise MalformedRequest(f"invalid JSON body: {exc}") from exc

    def _ok(payload: Any) -> Response:
        return Response(content=_json_bytes(payload), media_type="application/json")

    def _bad_request(exc: MalformedRequest) -> Response:
        return Response(
            content=_json_bytes({"error": str(exc)}),
            media_type="application/json",
            status_code=400,
        )

    @app.post("/filter")
    async def filter_nodes(request: Request):
        try:
            return _ok(service.filter(await _body(request)))
        except MalformedRequest as exc:
            return _bad_request(exc)

    @app.post("/prioritize")
    async def prioritize_nodes(request: Request):
        try:
            return _ok(service.prioritize(await _body(request)))
        except MalformedRequest as exc:
            return _bad_request(exc)

    @app.get("/healthz")
    async def healthz():
        return _ok({"status": "ok"})

    return app
