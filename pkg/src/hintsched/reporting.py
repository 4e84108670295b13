"""Report rendering: human-readable text, machine-readable JSON, delimited
CSV, and optional chart files for the eval and scenario report paths."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .evaluation import EvalReport
from .scenarios import PlacementReport

_EVAL_ROWS = [
    ("Subset Accuracy", "subset_accuracy", "{:.2f}%"),
    ("Macro Avg. F1-Score", "macro_f1", "{:.4f}"),
    ("Macro Avg. Precision", "macro_precision", "{:.4f}"),
    ("Macro Avg. Recall", "macro_recall", "{:.4f}"),
    ("Aggregated True Positives", "aggregated_tp", "{}"),
    ("Aggregated False Positives", "aggregated_fp", "{}"),
    ("Aggregated False Negatives", "aggregated_fn", "{}"),
    ("Metadata Accuracy", "metadata_accuracy", "{:.2f}%"),
    ("Metadata Completeness", "metadata_completeness", "{:.2f}%"),
    ("Overall Strength Accuracy", "strength_accuracy", "{:.2f}%"),
    ("Strength Expl. Accuracy", "strength_explanation_accuracy", "{:.2f}%"),
    ("Overall Confidence MAE", "confidence_mae", "{:.4f}"),
    ("Avg. Response Time", "latency_avg", "{:.4f}s"),
    ("Max Response Time", "latency_max", "{:.4f}s"),
    ("P95 Response Time", "latency_p95", "{:.4f}s"),
]


def eval_report_text(report: EvalReport, backend: str = "") -> str:
    lines = []
    title = "Intent recognition report"
    if backend:
        title += f" (backend: {backend})"
    lines.append(title)
    lines.append("=" * len(title))
    lines.append(f"Cases: {report.case_count}")
    width = max(len(label) for label, _, _ in _EVAL_ROWS)
    for label, attr, fmt in _EVAL_ROWS:
        lines.append(f"{label:<{width}}  {fmt.format(getattr(report, attr))}")
    lines.append(f"Correct Metadata Fields    {report.metadata_correct} / {report.metadata_expected}")
    if report.per_category:
        lines.append("")
        lines.append("Per category:")
        for category, stats in report.per_category.items():
            lines.append(
                f"  {category:<26} cases {int(stats['cases']):>3}  "
                f"subset accuracy {stats['subset_accuracy']:.2f}%"
            )
    return "\n".join(lines)


def eval_report_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["metric", "value"])
    writer.writerow(["case_count", report.case_count])
    for _, attr, _ in _EVAL_ROWS:
        writer.writerow([attr, getattr(report, attr)])
    for category, stats in report.per_category.items():
        writer.writerow([f"subset_accuracy[{category}]", stats["subset_accuracy"]])
    return buf.getvalue()


def scenario_report_text(report: PlacementReport) -> str:
    lines = []
    title = f"Scenario {report.scenario_id} ({report.backend} backend)"
    lines.append(title)
    lines.append("=" * len(title))
    lines.append(f"Hint: {report.hint}")
    if report.objective:
        lines.append(f"Objective: {report.objective}")
    if report.baseline_note:
        lines.append(f"Reference baseline: {report.baseline_note}")
    lines.append(f"Detected intents: {', '.join(report.parsed_wire) or '(none)'}")
    lines.append(f"Placements ({len(report.placements)}):")
    for pod, node in report.placements:
        lines.append(f"  {pod} -> {node}")
    lines.append(f"Per node: {report.node_counts}")
    lines.append(f"Per zone: {report.zone_counts}")
    lines.append(f"Per rack: {report.rack_counts}")
    if report.favored_intent:
        lines.append(f"Dominant intent on the winning node: {report.favored_intent}")
    for check in report.assertions:
        status = "PASS" if check.passed else "FAIL"
        lines.append(f"[{status}] {check.name}: {check.detail}")
    return "\n".join(lines)


def scenario_report_csv(report: PlacementReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["scenario", "pod", "node", "zone", "rack"])
    from .scenarios import _RACK, _ZONE  # topology lookups

    for pod, node in report.placements:
        writer.writerow([report.scenario_id, pod, node, _ZONE.get(node, ""), _RACK.get(node, "")])
    return buf.getvalue()


def reports_json(reports: list[PlacementReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)


# -- figure rendering ----------------------------------------------------------


def _matplotlib():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_scenario_figure(report: PlacementReport, out_dir: str | Path) -> Path:
    """Bar chart of placements per node, written next to the delimited output."""
    plt = _matplotlib()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    nodes = list(report.node_counts)
    counts = [report.node_counts[n] for n in nodes]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar(nodes, counts, color="#4878a8")
    ax.set_ylabel("pods placed")
    ax.set_title(f"Scenario {report.scenario_id}: placements per node")
    ax.tick_params(axis="x", rotation=45)
    fig.tight_layout()
    path = out_dir / f"scenario_{report.scenario_id}_placements.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_eval_figures(report: EvalReport, out_dir: str | Path) -> list[Path]:
    """Headline-metric bars plus a latency histogram."""
    plt = _matplotlib()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    labels = ["Subset", "Metadata", "Completeness", "Strength", "Expl."]
    values = [
        report.subset_accuracy,
        report.metadata_accuracy,
        report.metadata_completeness,
        report.strength_accuracy,
        report.strength_explanation_accuracy,
    ]
    fig, ax = plt.subplots(figsize=(6.5, 3.5))
    ax.bar(labels, values, color="#4878a8")
    ax.set_ylim(0, 105)
    ax.set_ylabel("accuracy (%)")
    ax.set_title("Intent recognition accuracy")
    fig.tight_layout()
    path = out_dir / "eval_metrics.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6.5, 3.5))
    ax.bar(
        ["avg", "p95", "max"],
        [report.latency_avg, report.latency_p95, report.latency_max],
        color="#a85448",
    )
    ax.set_ylabel("seconds")
    ax.set_title("Analyzer response time")
    fig.tight_layout()
    path = out_dir / "eval_latency.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)
    return paths
