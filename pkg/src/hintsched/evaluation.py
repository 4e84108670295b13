"""Intent-recognition metrics: subset accuracy, per-class and macro P/R/F1,
metadata accuracy/completeness, strength and explanation accuracy, confidence
MAE, and latency statistics, computed from a ground-truth dataset and an
analyzer's predictions.

Conventions (documented because the metric names alone underdetermine them):
metadata, strength, explanation, and confidence comparisons run over true
positives only; zero-support classes count precision/recall as 1.0 so an
intent never mentioned and never predicted does not drag the macro average;
zero-denominator percentage metrics report 100.0; P95 uses the nearest-rank
method.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .analyzer import HintAnalyzer
from .intents import (
    REGISTRY,
    IntentRegistry,
    MalformedValue,
    ParsedHint,
    UnknownIntent,
    parsed_hint_from_wire,
)

logger = logging.getLogger(__name__)

CATEGORIES = (
    "categorical_paraphrasing",
    "combinatorial",
    "strength_nuance",
    "negative_noise",
)


class SchemaViolation(Exception):
    """A dataset record does not satisfy the parse-result invariants."""


class EmptyInput(Exception):
    """Raised when a metric is requested over zero samples."""


@dataclass(frozen=True)
class GroundTruthCase:
    prompt: str
    expected: ParsedHint
    category: str


@dataclass
class MetadataFieldResult:
    field: str
    expected: object
    predicted: object
    correct: bool
    present: bool


@dataclass
class CaseTally:
    """Per-case comparison outcome; aggregation is a pure reduction over these."""

    exact_set_match: bool
    tp: tuple[str, ...]
    fp: tuple[str, ...]
    fn: tuple[str, ...]
    metadata_field_results: list[MetadataFieldResult] = field(default_factory=list)
    strength_results: list[tuple[float, float, bool]] = field(default_factory=list)
    explanation_results: list[tuple[bool, bool]] = field(default_factory=list)
    confidence_abs_errors: list[float] = field(default_factory=list)
    latency: float = 0.0
    category: str | None = None


@dataclass
class EvalReport:
    case_count: int
    subset_accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    aggregated_tp: int
    aggregated_fp: int
    aggregated_fn: int
    metadata_accuracy: float
    metadata_completeness: float
    metadata_correct: int
    metadata_expected: int
    strength_accuracy: float
    strength_explanation_accuracy: float
    confidence_mae: float
    latency_avg: float
    latency_max: float
    latency_p95: float
    per_class: dict[str, dict[str, float]] = field(default_factory=dict)
    per_category: dict[str, dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "case_count": self.case_count,
            "subset_accuracy": self.subset_accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "aggregated_tp": self.aggregated_tp,
            "aggregated_fp": self.aggregated_fp,
            "aggregated_fn": self.aggregated_fn,
            "metadata_accuracy": self.metadata_accuracy,
            "metadata_completeness": self.metadata_completeness,
            "metadata_correct": self.metadata_correct,
            "metadata_expected": self.metadata_expected,
            "strength_accuracy": self.strength_accuracy,
            "strength_explanation_accuracy": self.strength_explanation_accuracy,
            "confidence_mae": self.confidence_mae,
            "latency_avg": self.latency_avg,
            "latency_max": self.latency_max,
            "latency_p95": self.latency_p95,
            "per_class": self.per_class,
            "per_category": self.per_category,
        }


def load_dataset(
    path: str | Path, registry: IntentRegistry = REGISTRY, strict: bool = True
) -> list[GroundTruthCase]:
    """Load a JSON array of {prompt, expected, category} records.

    Strict mode fails fast on the first malformed record; lenient mode logs
    the record index and skips it.
    """
    with open(path, encoding="utf-8") as fh:
        records = json.load(fh)
    if not isinstance(records, list):
        raise SchemaViolation("dataset root is not an array")
    cases: list[GroundTruthCase] = []
    for index, record in enumerate(records):
        try:
            if not isinstance(record, dict):
                raise MalformedValue("record is not an object")
            prompt = record.get("prompt")
            if not isinstance(prompt, str):
                raise MalformedValue("prompt is not a string")
            category = record.get("category")
            if category not in CATEGORIES:
                raise MalformedValue(f"unknown category: {category!r}")
            expected = parsed_hint_from_wire(
                record.get("expected", {}), prompt, registry, strict=strict
            )
            if category == "negative_noise" and len(expected):
                raise MalformedValue("negative_noise case with non-empty expected parse")
            cases.append(GroundTruthCase(prompt, expected, category))
        except (MalformedValue, UnknownIntent) as exc:
            if strict:
                raise SchemaViolation(f"record {index}: {exc}") from exc
            logger.warning("skipping malformed dataset record %d: %s", index, exc)
    return cases


def _floats_equal(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-6, abs_tol=1e-12)


def _metadata_equal(kind: str, expected: object, predicted: object) -> bool:
    if kind == "float":
        return isinstance(predicted, (int, float)) and _floats_equal(
            float(expected), float(predicted)
        )
    if kind == "string_list":
        if not isinstance(predicted, (list, tuple)):
            return False
        return sorted(expected) == sorted(predicted)
    return isinstance(predicted, str) and str(expected).lower() == predicted.lower()


def compare_case(
    predicted: ParsedHint,
    expected: ParsedHint,
    latency: float = 0.0,
    category: str | None = None,
    registry: IntentRegistry = REGISTRY,
) -> CaseTally:
    """Compare one prediction against ground truth.

    Float metadata matches within 1e-6 relative, lists as multisets of exact
    strings, scalar strings case-insensitively. Strength, explanation, and
    confidence are compared on true positives only.
    """
    pred_names = set(predicted.intents)
    exp_names = set(expected.intents)
    tp = tuple(sorted(pred_names & exp_names))
    fp = tuple(sorted(pred_names - exp_names))
    fn = tuple(sorted(exp_names - pred_names))

    tally = CaseTally(
        exact_set_match=pred_names == exp_names,
        tp=tp,
        fp=fp,
        fn=fn,
        latency=latency,
        category=category,
    )
    for name in tp:
        exp = expected.intents[name]
        pred = predicted.intents[name]
        cls = registry.lookup(name)
        if cls.metadata_field is not None:
            exp_value = exp.metadata.get(cls.metadata_field)
            present = cls.metadata_field in pred.metadata
            pred_value = pred.metadata.get(cls.metadata_field)
            correct = present and _metadata_equal(
                cls.metadata_kind.value, exp_value, pred_value
            )
            tally.metadata_field_results.append(
                MetadataFieldResult(cls.metadata_field, exp_value, pred_value, correct, present)
            )
        tally.strength_results.append(
            (exp.strength, pred.strength, exp.strength == pred.strength)
        )
        required = exp.strength != 1.0
        provided = bool(pred.strength_explanation and pred.strength_explanation.strip())
        tally.explanation_results.append((required, provided))
        tally.confidence_abs_errors.append(abs(pred.confidence - exp.confidence))
    return tally


def percentile(values: Sequence[float], p: float) -> float:
    """Nearest-rank percentile: element ceil(p/100 * n) of the sorted list."""
    if not values:
        raise EmptyInput("percentile of an empty list")
    if not 0 < p <= 100:
        raise ValueError(f"percentile must be in (0, 100], got {p}")
    ordered = sorted(values)
    rank = math.ceil(p / 100.0 * len(ordered))
    return ordered[max(rank, 1) - 1]


def aggregate(
    tallies: Sequence[CaseTally], class_names: Iterable[str] | None = None
) -> EvalReport:
    """Reduce per-case tallies into an EvalReport; order-independent."""
    if not tallies:
        raise EmptyInput("no tallies to aggregate")
    names = tuple(class_names) if class_names is not None else REGISTRY.names()

    counts = {name: [0, 0, 0] for name in names}  # tp, fp, fn
    for tally in tallies:
        for name in tally.tp:
            counts.setdefault(name, [0, 0, 0])[0] += 1
        for name in tally.fp:
            counts.setdefault(name, [0, 0, 0])[1] += 1
        for name in tally.fn:
            counts.setdefault(name, [0, 0, 0])[2] += 1

    per_class: dict[str, dict[str, float]] = {}
    for name, (tp, fp, fn) in counts.items():
        precision = tp / (tp + fp) if (tp + fp) else 1.0
        recall = tp / (tp + fn) if (tp + fn) else 1.0
        f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
        per_class[name] = {
            "tp": tp, "fp": fp, "fn": fn,
            "precision": precision, "recall": recall, "f1": f1,
        }

    macro_names = list(names)
    macro_precision = sum(per_class[n]["precision"] for n in macro_names) / len(macro_names)
    macro_recall = sum(per_class[n]["recall"] for n in macro_names) / len(macro_names)
    macro_f1 = sum(per_class[n]["f1"] for n in macro_names) / len(macro_names)

    meta = [r for t in tallies for r in t.metadata_field_results]
    meta_expected = len(meta)
    meta_correct = sum(1 for r in meta if r.correct)
    meta_present = sum(1 for r in meta if r.present)

    strengths = [s for t in tallies for s in t.strength_results]
    explanations = [e for t in tallies for e in t.explanation_results]
    required = sum(1 for req, _ in explanations if req)
    provided_of_required = sum(1 for req, prov in explanations if req and prov)
    errors = [e for t in tallies for e in t.confidence_abs_errors]
    latencies = [t.latency for t in tallies]

    per_category: dict[str, dict[str, float]] = {}
    for category in CATEGORIES:
        subset = [t for t in tallies if t.category == category]
        if subset:
            per_category[category] = {
                "cases": len(subset),
                "subset_accuracy": 100.0 * sum(t.exact_set_match for t in subset) / len(subset),
            }

    return EvalReport(
        case_count=len(tallies),
        subset_accuracy=100.0 * sum(t.exact_set_match for t in tallies) / len(tallies),
        macro_precision=macro_precision,
        macro_recall=macro_recall,
        macro_f1=macro_f1,
        aggregated_tp=sum(c[0] for c in counts.values()),
        aggregated_fp=sum(c[1] for c in counts.values()),
        aggregated_fn=sum(c[2] for c in counts.values()),
        metadata_accuracy=100.0 * meta_correct / meta_expected if meta_expected else 100.0,
        metadata_completeness=100.0 * meta_present / meta_expected if meta_expected else 100.0,
        metadata_correct=meta_correct,
        metadata_expected=meta_expected,
        strength_accuracy=(
            100.0 * sum(1 for s in strengths if s[2]) / len(strengths) if strengths else 100.0
        ),
        strength_explanation_accuracy=(
            100.0 * provided_of_required / required if required else 100.0
        ),
        confidence_mae=sum(errors) / len(errors) if errors else 0.0,
        latency_avg=sum(latencies) / len(latencies),
        latency_max=max(latencies),
        latency_p95=percentile(latencies, 95.0),
        per_class=per_class,
        per_category=per_category,
    )


def evaluate_analyzer(
    analyzer: HintAnalyzer,
    cases: Sequence[GroundTruthCase],
    registry: IntentRegistry = REGISTRY,
) -> EvalReport:
    """Run the analyzer over every case and aggregate the comparison."""
    if not cases:
        raise EmptyInput("no dataset cases")
    tallies = []
    for case in cases:
        outcome = analyzer.analyze(case.prompt)
        tallies.append(
            compare_case(
                outcome.parsed,
                case.expected,
                latency=outcome.latency,
                category=case.category,
                registry=registry,
            )
        )
    return aggregate(tallies, registry.names())
