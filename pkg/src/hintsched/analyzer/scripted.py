"""Fixture-replay analyzer: returns pre-recorded parses keyed by hint text.

Lets every downstream component (service, simulator, evaluation) run without
network access. Fixture format: JSON array of {"hint": ..., "parsed": ...}
records, where "parsed" uses the analyzer wire shape.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

from ..intents import REGISTRY, IntentRegistry, ParsedHint, parsed_hint_from_wire


class ScriptedAnalyzer:
    name = "scripted"

    def __init__(self, parses: Mapping[str, ParsedHint]):
        self._parses = dict(parses)

    @classmethod
    def from_records(
        cls, records: list[dict], registry: IntentRegistry = REGISTRY
    ) -> "ScriptedAnalyzer":
        parses = {}
        for record in records:
            hint = record["hint"]
            parses[hint] = parsed_hint_from_wire(record["parsed"], hint, registry)
        return cls(parses)

    @classmethod
    def from_file(cls, path: str | Path, registry: IntentRegistry = REGISTRY) -> "ScriptedAnalyzer":
        with open(path, encoding="utf-8") as fh:
            return cls.from_records(json.load(fh), registry)

    def parse(self, raw_hint: str, sanitized_hint: str) -> ParsedHint:
        parsed = self._parses.get(raw_hint)
        if parsed is None:
            return ParsedHint(raw_hint, {})
        return parsed
