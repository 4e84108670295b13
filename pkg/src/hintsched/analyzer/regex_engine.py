"""Deterministic keyword/pattern baseline for hint parsing.

Hardcoded sentence and keyword matching: every rule maps phrases to one of
the registered intents, numeric captures fill float metadata, and name-list
captures fill list metadata. Strength follows the 3-point keyword scale
applied to the clause containing the match (strong keywords give 1.5, weak
0.5, else 1.0); every match gets a fixed 0.9 confidence since the engine has
no probability model.

Brittle by design: list intents fire only when concrete names (tokens with a
digit or hyphen, or quoted strings) can be extracted, and qualitative
phrasing only triggers intents with an explicit qualitative rule below.
"""

from __future__ import annotations

import re

from ..intents import (
    REGISTRY,
    DetectedIntent,
    IntentRegistry,
    ParsedHint,
    parsed_hint_from_entries,
    validate_detected,
)

CONFIDENCE = 0.9

_STRONG_KEYWORDS = [
    ("must", r"\bmust\b"),
    ("critical", r"\bcritical(?:ly)?\b"),
    ("required", r"\brequire[sd]?\b"),
    ("absolutely", r"\babsolutely\b"),
    ("essential", r"\bessential\b"),
    ("high priority", r"\bhigh[- ]priority\b"),
    ("need", r"\bneed(?:s|ed)?\b"),
    ("forbidden", r"\bforbidden\b"),
    ("do not", r"\bdo\s+not\b|\bdon'?t\b"),
    ("cannot", r"\bcannot\b|\bcan'?t\b"),
    ("only", r"\bonly\b"),
]

_WEAK_KEYWORDS = [
    ("prefer", r"\bprefer(?:s|red|ence|ably)?\b"),
    ("if possible", r"\bif\s+possible\b"),
    ("try", r"\btry(?:ing)?\b"),
    ("maybe", r"\bmaybe\b"),
    ("nice to have", r"\bnice\s+to\s+have\b"),
    ("optional", r"\boptional(?:ly)?\b"),
    ("low priority", r"\blow[- ]priority\b"),
    ("suggestion", r"\bsuggest(?:ion|ed)?\b"),
    ("like", r"\b(?:would|'d)\s+like\b"),
    ("ideally", r"\bideally\b"),
]

_STRONG = [(label, re.compile(rx, re.I)) for label, rx in _STRONG_KEYWORDS]
_WEAK = [(label, re.compile(rx, re.I)) for label, rx in _WEAK_KEYWORDS]

# Clause boundaries for strength scoping: sentence enders plus "but".
_CLAUSE_SPLIT = re.compile(r"[.!?;]|\bbut\b", re.I)

_AVOID_CTX = re.compile(
    r"\b(?:avoid(?:ing|s|ed)?|exclude|excluding|away\s+from|\boff\b|keep\s+(?:off|out|away)|"
    r"stay\s+(?:off|out|away)|not\s+(?:on|in|near|be)|never|don'?t|do\s+not|"
    r"cannot|can'?t|forbidden|anti[- ]affinity)\b",
    re.I,
)
_SPREAD_CTX = re.compile(
    r"\b(?:spread|distribut\w*|balanc\w*|evenly|across\s+(?:all|different|multiple|every))\b",
    re.I,
)

_NAME = r"[A-Za-z0-9][A-Za-z0-9_.\-]*"
_QUOTED = r"(?:'[^']+'|\"[^\"]+\")"
_NAME_OR_QUOTED = rf"(?:{_QUOTED}|{_NAME})"
_NAME_RUN = rf"{_NAME_OR_QUOTED}(?:\s*(?:,|\band\b|\bor\b|&)\s*{_NAME_OR_QUOTED})*"

_STOPWORDS = {
    "the", "a", "an", "all", "any", "this", "that", "these", "those", "my",
    "our", "your", "its", "of", "for", "with", "and", "or", "to", "in", "on",
    "at", "from", "near", "same", "different", "available", "other", "such",
    "specific", "like", "as", "is", "are", "be", "it", "by", "per", "every",
}


def _clauses(text: str) -> list[tuple[int, int]]:
    spans = []
    start = 0
    for m in _CLAUSE_SPLIT.finditer(text):
        spans.append((start, m.start()))
        start = m.end()
    spans.append((start, len(text)))
    return spans


def _clause_of(spans: list[tuple[int, int]], pos: int) -> tuple[int, int]:
    for span in spans:
        if span[0] <= pos < span[1]:
            return span
    return spans[-1]


def _strip_quotes(token: str) -> str:
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def _name_like(token: str) -> bool:
    if token.lower() in _STOPWORDS:
        return False
    return any(ch.isdigit() or ch == "-" for ch in token)


def _split_run(run: str, require_name_like: bool = True) -> list[str]:
    names = []
    for tok in re.split(r"\s*(?:,|\band\b|\bor\b|&)\s*", run, flags=re.I):
        tok = tok.strip()
        if not tok:
            continue
        quoted = tok != _strip_quotes(tok)
        tok = _strip_quotes(tok).strip()
        if not tok:
            continue
        if quoted or not require_name_like or _name_like(tok):
            names.append(tok)
        else:
            break  # a non-name token ends the run
    return names


def _names_near_noun(clause: str, noun: str) -> tuple[list[str], int | None]:
    """Names adjacent to a standalone noun ("zones a-1 and b-2" either order)."""
    first_pos: int | None = None
    for m in re.finditer(rf"\b{noun}s?\b", clause, re.I):
        # skip noun hits that are part of a hyphenated name (rack in rack-c3)
        if m.start() > 0 and clause[m.start() - 1] == "-":
            continue
        if m.end() < len(clause) and clause[m.end()] == "-":
            continue
        if first_pos is None:
            first_pos = m.start()
        after = re.match(rf"[:\s]+({_NAME_RUN})", clause[m.end():])
        if after:
            names = _split_run(after.group(1))
            if names:
                return names, m.start()
        before = re.search(rf"({_NAME_RUN})\s*$", clause[: m.start()].rstrip())
        if before:
            names = _split_run(before.group(1))
            if names:
                return names, m.start()
    return [], first_pos


_NODE_TOKEN = re.compile(r"\b((?:node|host|minikube)[A-Za-z0-9_.\-]*[\d\-][A-Za-z0-9_.\-]*)", re.I)

_DEPLOY_NOUN = r"(?:deployments?|pods?|apps?|applications?|services?)"
_DEPLOY_QUOTED = re.compile(
    rf"((?:{_QUOTED})(?:\s*(?:,|\band\b|\bor\b|&)\s*(?:{_QUOTED}))*)\s+{_DEPLOY_NOUN}", re.I
)
_DEPLOY_BARE = re.compile(
    rf"\bthe\s+({_NAME})\s+(?:deployment|pods|app|application|service)\b", re.I
)
_DEPLOY_CTX = re.compile(
    rf"\b(?:near|close\s+to|alongside|next\s+to|with|together\s+with|same\s+\w+\s+as)\b"
    rf"[^.!?;]*?{_DEPLOY_NOUN}",
    re.I,
)

_COLOCATE = re.compile(
    r"\bco-?l?locat\w*|\b(?:on|onto)\s+(?:a\s+single|one|the\s+same)\s+node\b(?!\s+as\b)",
    re.I,
)
_NEARBY = re.compile(
    r"\btopologically\s+close\b|"
    r"\b(?:near(?:by)?|close(?:\s+to)?|proximity)\b[^.!?;]*\b(?:same\s+deployment|"
    r"this\s+deployment|each\s+other|rest\s+of|its\s+deployment)",
    re.I,
)

_GPU = re.compile(r"\bgpus?\b|\bcuda\b|\bnvidia\b|graphics\s+(?:card|processing)", re.I)
_GPU_COUNT = re.compile(r"(\d+(?:\.\d+)?)\s*(?:x\s*)?gpus?\b|gpus?\s*[:=x]\s*(\d+(?:\.\d+)?)", re.I)
_TPU = re.compile(r"\btpus?\b|tensor\s+processing", re.I)
_TPU_COUNT = re.compile(
    r"(\d+(?:\.\d+)?)\s*(?:x\s*)?tpus?(?:\s+cores)?\b|tpus?\s*[:=x]\s*(\d+(?:\.\d+)?)", re.I
)
_CPU = re.compile(r"\bv?cpus?\b|(?<![gt]pu )(?<!cuda )\bcores?\b|\bprocessors?\b")
_CPU_COUNT = re.compile(r"(\d+(?:\.\d+)?)\s*(?:v?cpu\s+)?cores?\b|(\d+(?:\.\d+)?)\s*v?cpus?\b", re.I)
_MEMORY = re.compile(r"\b(?:ram|memory|mem)\b|memory[- ]intensive", re.I)
_GB_VALUE = re.compile(r"(\d+(?:\.\d+)?)\s*(?:gb|gib|gigabytes?)\b", re.I)
_SSD = re.compile(r"\bssds?\b|solid[- ]state|\bnvme\b", re.I)
_PUBLIC_IP = re.compile(
    r"public(?:ly)?[- ](?:ip|address|accessible|facing|or\s+external)|"
    r"external\s+ip|internet[- ]facing",
    re.I,
)
_NET_SPEED = re.compile(
    r"\d+(?:\.\d+)?\s*gbps|\bbandwidth\b|network\s+(?:speed|throughput)|fast\s+network|\bgigabit\b",
    re.I,
)
_GBPS_VALUE = re.compile(r"(\d+(?:\.\d+)?)\s*gbps", re.I)
_NET_TYPE = re.compile(rf"\b(infiniband|roce|efa|ena)\b|network\s+type\s+['\"]?({_NAME})", re.I)
_EPHEMERAL = re.compile(
    r"\bephemeral\b|scratch\s+(?:disk|space|storage)|local\s+(?:disk|storage)", re.I
)


def _first_group(match: re.Match) -> str | None:
    for group in match.groups():
        if group:
            return group
    return None


class RegexEngine:
    """Baseline analyzer backend built from the hardcoded matching rules."""

    name = "regex"

    def __init__(self, registry: IntentRegistry = REGISTRY):
        self.registry = registry

    def parse(self, raw_hint: str, sanitized_hint: str) -> ParsedHint:
        return regex_parse(sanitized_hint, self.registry, hint_text=raw_hint)


def regex_parse(
    hint: str, registry: IntentRegistry = REGISTRY, hint_text: str | None = None
) -> ParsedHint:
    """Parse a hint with the hardcoded rule set; deterministic for fixed input."""
    text = hint or ""
    spans = _clauses(text)
    entries: list[DetectedIntent] = []

    def strength_fields(pos: int) -> dict:
        lo, hi = _clause_of(spans, pos)
        window = text[lo:hi]
        for label, rx in _STRONG:
            if rx.search(window):
                return {"strength": 1.5, "strength_explanation": f"matched keyword '{label}'"}
        for label, rx in _WEAK:
            if rx.search(window):
                return {"strength": 0.5, "strength_explanation": f"matched keyword '{label}'"}
        return {"strength": 1.0}

    def add(name: str, pos: int, metadata: dict | None = None) -> None:
        fields = {"confidence": CONFIDENCE}
        fields.update(strength_fields(pos))
        fields.update(metadata or {})
        entries.append(validate_detected(name, fields, registry))

    def clause_text(pos: int) -> str:
        lo, hi = _clause_of(spans, pos)
        return text[lo:hi]

    # colocation / proximity
    m = _COLOCATE.search(text)
    if m and not _AVOID_CTX.search(clause_text(m.start())):
        add("prefer_colocate_same_deployment", m.start())
    m = _NEARBY.search(text)
    if m and not _AVOID_CTX.search(clause_text(m.start())):
        add("prefer_nearby_nodes_same_deployment", m.start())

    # topological and node-level list intents, clause by clause
    for noun, prefer_name, avoid_name in (
        ("region", "prefer_regions", "avoid_regions"),
        ("zone", "prefer_zones", "avoid_zones"),
        ("rack", "prefer_racks", "avoid_racks"),
        ("node", "prefer_nodes", "avoid_nodes"),
    ):
        for lo, hi in spans:
            clause = text[lo:hi]
            if _SPREAD_CTX.search(clause):
                continue
            names, noun_pos = _names_near_noun(clause, noun)
            if not names and noun == "node":
                tokens = _NODE_TOKEN.findall(clause)
                if tokens:
                    names, noun_pos = tokens, clause.find(tokens[0])
            if not names or noun_pos is None:
                continue
            intent = avoid_name if _AVOID_CTX.search(clause) else prefer_name
            add(intent, lo + noun_pos, {intent: names})

    # spread intents, clause by clause so "but"-joined directives stay apart
    for noun_rx, intent in (
        (r"regions?", "spread_regions"),
        (r"zones?", "spread_zones"),
        (r"racks?", "spread_racks"),
        # "server racks" and friends are adjectives, not node nouns
        (r"(?:nodes?|hosts?|servers?|machines?)(?!\s+(?:racks?|zones?|regions?))", "spread_nodes"),
    ):
        noun = rf"(?<!-)\b{noun_rx}\b(?!-)"
        for lo, hi in spans:
            m = re.search(
                rf"{_SPREAD_CTX.pattern}[^.!?;]*?{noun}|{noun}[^.!?;]*?{_SPREAD_CTX.pattern}",
                text[lo:hi],
                re.I,
            )
            if m:
                add(intent, lo + m.start())
                break

    # deployment-level intents, clause by clause
    for lo, hi in spans:
        clause = text[lo:hi]
        names: list[str] = []
        for run in _DEPLOY_QUOTED.findall(clause):
            names.extend(_split_run(run, require_name_like=False))
        for bare in _DEPLOY_BARE.finditer(clause):
            tok = bare.group(1)
            if tok.lower() not in _STOPWORDS and tok.lower() != "same":
                names.append(tok)
        if not names:
            continue
        names = list(dict.fromkeys(names))
        if _AVOID_CTX.search(clause):
            add("avoid_deployments", lo, {"avoid_deployments": names})
        elif _DEPLOY_CTX.search(clause):
            add("prefer_deployments", lo, {"prefer_deployments": names})

    # resource intents; the strength clause is anchored at whichever of the
    # trigger phrase or the captured number appears first
    def anchor(trigger: re.Match, value: re.Match | None) -> int:
        if value is not None and value.start() < trigger.start():
            return value.start()
        return trigger.start()

    m = _GPU.search(text)
    if m:
        count = _GPU_COUNT.search(text)
        add("prefer_gpu", anchor(m, count),
            {"prefer_gpu_cores": float(_first_group(count)) if count else 1.0})
    m = _TPU.search(text)
    if m:
        count = _TPU_COUNT.search(text)
        add("prefer_tpu", anchor(m, count),
            {"prefer_tpu_cores": float(_first_group(count)) if count else 1.0})
    m = _CPU.search(text.lower())
    if m:
        count = _CPU_COUNT.search(text)
        add("prefer_cpu", anchor(m, count),
            {"prefer_cpu_cores": float(_first_group(count)) if count else 1.0})
    m = _MEMORY.search(text)
    if m:
        gb = _GB_VALUE.search(clause_text(m.start())) or _GB_VALUE.search(text)
        add("prefer_memory", anchor(m, gb),
            {"prefer_memory_gb": float(gb.group(1)) if gb else 1.0})
    m = _SSD.search(text)
    if m:
        add("prefer_ssd", m.start())
    m = _PUBLIC_IP.search(text)
    if m:
        add("prefer_public_ip", m.start())
    m = _NET_SPEED.search(text)
    if m:
        gbps = _GBPS_VALUE.search(text)
        add("prefer_network_speed", anchor(m, gbps),
            {"prefer_network_gbps": float(gbps.group(1)) if gbps else 1.0})
    m = _NET_TYPE.search(text)
    if m:
        add("prefer_network_type", m.start(),
            {"prefer_network_type": (_first_group(m) or "").lower()})
    m = _EPHEMERAL.search(text)
    if m:
        gb = _GB_VALUE.search(text)
        add("prefer_ephemeral_storage", anchor(m, gb),
            {"prefer_ephemeral_storage_gb": float(gb.group(1)) if gb else 1.0})

    return parsed_hint_from_entries(hint_text if hint_text is not None else text, entries)
