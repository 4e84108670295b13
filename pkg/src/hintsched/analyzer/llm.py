"""Provider-agnostic HTTP client for the remote model backend.

One request shape (model id, prompt, sampling parameters) and one adapter per
wire dialect. The "bedrock" dialect speaks the hosted converse-style JSON
body; "simple" is the local-stub shape used in tests and self-hosted
gateways. Transport failures surface as BackendUnavailable so the analyzer
front end can degrade to an empty parse instead of blocking scheduling.
"""

from __future__ import annotations

import logging
import os
from typing import Any, Callable, Mapping

import requests

from ..intents import REGISTRY, IntentRegistry, ParsedHint
from . import AnalyzerConfig, BackendUnavailable
from .prompt import Unparseable, build_prompt, decode_model_response

logger = logging.getLogger(__name__)

ENV_ENDPOINT = "HINTSCHED_LLM_ENDPOINT"
ENV_MODEL = "HINTSCHED_LLM_MODEL"
ENV_TIMEOUT = "HINTSCHED_LLM_TIMEOUT"
ENV_DIALECT = "HINTSCHED_LLM_DIALECT"


def _build_bedrock(config: AnalyzerConfig, prompt: str) -> dict:
    return {
        "modelId": config.model_id,
        "messages": [{"role": "user", "content": [{"text": prompt}]}],
        "inferenceConfig": {
            "temperature": config.temperature,
            "topP": config.top_p,
            "maxTokens": config.max_tokens,
        },
    }


def _extract_bedrock(body: Mapping[str, Any]) -> str:
    return body["output"]["message"]["content"][0]["text"]


def _build_simple(config: AnalyzerConfig, prompt: str) -> dict:
    return {
        "model": config.model_id,
        "prompt": prompt,
        "temperature": config.temperature,
        "top_p": config.top_p,
        "max_tokens": config.max_tokens,
    }


def _extract_simple(body: Mapping[str, Any]) -> str:
    return body["completion"]


DIALECTS: dict[str, tuple[Callable[[AnalyzerConfig, str], dict], Callable[[Mapping], str]]] = {
    "bedrock": (_build_bedrock, _extract_bedrock),
    "simple": (_build_simple, _extract_simple),
}


def config_from_env(base: AnalyzerConfig | None = None) -> AnalyzerConfig:
    base = base or AnalyzerConfig()
    return AnalyzerConfig(
        endpoint=os.environ.get(ENV_ENDPOINT, base.endpoint),
        model_id=os.environ.get(ENV_MODEL, base.model_id),
        temperature=base.temperature,
        top_p=base.top_p,
        max_tokens=base.max_tokens,
        request_timeout=float(os.environ.get(ENV_TIMEOUT, base.request_timeout)),
        max_hint_length=base.max_hint_length,
        dialect=os.environ.get(ENV_DIALECT, base.dialect),
    )


class LlmAnalyzer:
    name = "llm"

    def __init__(
        self,
        config: AnalyzerConfig,
        registry: IntentRegistry = REGISTRY,
        post: Callable[..., requests.Response] = requests.post,
    ):
        if config.dialect not in DIALECTS:
            raise ValueError(f"unknown model-wire dialect: {config.dialect!r}")
        self.config = config
        self.registry = registry
        self._post = post

    def parse(self, raw_hint: str, sanitized_hint: str) -> ParsedHint:
        prompt = build_prompt(self.registry, sanitized_hint)
        build, extract = DIALECTS[self.config.dialect]
        try:
            response = self._post(
                self.config.endpoint,
                json=build(self.config, prompt),
                timeout=self.config.request_timeout,
            )
            response.raise_for_status()
            completion = extract(response.json())
        except (requests.RequestException, KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendUnavailable(str(exc)) from exc
        try:
            return decode_model_response(completion, self.registry, hint_text=raw_hint)
        except Unparseable as exc:
            logger.warning("model reply unparseable, falling back to empty parse: %s", exc)
            return ParsedHint(raw_hint, {})
