"""Hint analysis front end: sanitization, backend dispatch, and memoization.

All backends (regex, llm, scripted) sit behind HintAnalyzer, which guarantees
at most one backend invocation per distinct hint string, even under
concurrent callers. Backend failure degrades to an empty parse; it never
propagates into the scheduling path.
"""

from __future__ import annotations

import logging
import threading
import time
import unicodedata
from dataclasses import dataclass
from typing import Protocol

from ..intents import ParsedHint

logger = logging.getLogger(__name__)

DEFAULT_MAX_HINT_LENGTH = 2048


class BackendUnavailable(Exception):
    """The remote analyzer could not be reached or did not answer in time."""


@dataclass(frozen=True)
class AnalyzerConfig:
    """Remote-analyzer settings; temperature 0 / top_p 1 is the determinism contract."""

    endpoint: str = ""
    model_id: str = ""
    temperature: float = 0.0
    top_p: float = 1.0
    max_tokens: int = 512
    request_timeout: float = 30.0
    max_hint_length: int = DEFAULT_MAX_HINT_LENGTH
    dialect: str = "simple"


@dataclass(frozen=True)
class AnalysisOutcome:
    parsed: ParsedHint
    latency: float
    source: str  # regex | llm | scripted | cache
    degraded: bool = False


class AnalyzerBackend(Protocol):
    name: str

    def parse(self, raw_hint: str, sanitized_hint: str) -> ParsedHint: ...


def sanitize_hint(text: str, max_length: int = DEFAULT_MAX_HINT_LENGTH) -> str:
    """Neutralize prompt-delimiter lookalikes and strip control characters.

    Runs of three or more '-' collapse to a single '-', so untrusted text can
    never reproduce the '---'-framed prompt markers. Output is capped at
    max_length characters.
    """
    kept = []
    for ch in text:
        if unicodedata.category(ch) == "Cc" and ch not in "\t\n\r":
            continue
        kept.append(ch)
    cleaned = "".join(kept)

    out = []
    run = 0
    for ch in cleaned:
        if ch == "-":
            run += 1
            continue
        if run:
            out.append("-" if run >= 3 else "-" * run)
            run = 0
        out.append(ch)
    if run:
        out.append("-" if run >= 3 else "-" * run)
    return "".join(out)[:max_length]


class HintAnalyzer:
    """Memoizing wrapper around one analyzer backend.

    The cache is keyed by the raw hint string. Duplicate concurrent requests
    for the same hint serialize on a per-hint gate, so the backend is invoked
    at most once per distinct hint until clear_cache().
    """

    def __init__(self, backend: AnalyzerBackend, max_hint_length: int = DEFAULT_MAX_HINT_LENGTH):
        self.backend = backend
        self.max_hint_length = max_hint_length
        self._lock = threading.Lock()
        self._results: dict[str, tuple[ParsedHint, bool]] = {}
        self._gates: dict[str, threading.Lock] = {}

    def analyze(self, hint: str) -> AnalysisOutcome:
        start = time.perf_counter()
        hint = hint or ""
        if not hint.strip():
            return AnalysisOutcome(
                ParsedHint(hint, {}), time.perf_counter() - start, self.backend.name
            )

        with self._lock:
            cached = self._results.get(hint)
            if cached is not None:
                parsed, degraded = cached
                return AnalysisOutcome(parsed, time.perf_counter() - start, "cache", degraded)
            gate = self._gates.setdefault(hint, threading.Lock())

        with gate:
            with self._lock:
                cached = self._results.get(hint)
            if cached is not None:
                parsed, degraded = cached
                return AnalysisOutcome(parsed, time.perf_counter() - start, "cache", degraded)

            sanitized = sanitize_hint(hint, self.max_hint_length)
            degraded = False
            try:
                parsed = self.backend.parse(hint, sanitized)
            except BackendUnavailable as exc:
                logger.warning("analyzer backend unavailable, degrading to empty parse: %s", exc)
                parsed = ParsedHint(hint, {})
                degraded = True
            with self._lock:
                self._results[hint] = (parsed, degraded)
                self._gates.pop(hint, None)
        return AnalysisOutcome(parsed, time.perf_counter() - start, self.backend.name, degraded)

    def clear_cache(self) -> None:
        with self._lock:
            self._results.clear()
            self._gates.clear()
