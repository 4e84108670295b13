"""Command line entry point: serve, eval, scenario, and parse subcommands."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .analyzer import AnalyzerConfig, HintAnalyzer
from .analyzer.llm import LlmAnalyzer, config_from_env
from .analyzer.regex_engine import RegexEngine
from .analyzer.scripted import ScriptedAnalyzer
from .cluster import StateCache
from .evaluation import evaluate_analyzer, load_dataset
from .extender import ExtenderService, create_app
from .reporting import (
    eval_report_csv,
    eval_report_text,
    reports_json,
    save_eval_figures,
    save_scenario_figure,
    scenario_report_csv,
    scenario_report_text,
)
from .scenarios import (
    SCENARIOS,
    bundled_eval_fixture_path,
    build_testbed,
    run_scenario,
    scripted_scenario_analyzer,
)

logger = logging.getLogger(__name__)

BACKENDS = ("regex", "llm", "scripted")


def make_analyzer(args) -> HintAnalyzer:
    backend = args.backend
    if backend == "regex":
        return HintAnalyzer(RegexEngine())
    if backend == "scripted":
        fixture = getattr(args, "scripted_fixture", None)
        if fixture:
            return HintAnalyzer(ScriptedAnalyzer.from_file(fixture))
        return scripted_scenario_analyzer()
    config = config_from_env(
        AnalyzerConfig(
            endpoint=getattr(args, "llm_endpoint", "") or "",
            model_id=getattr(args, "llm_model", "") or "",
            request_timeout=getattr(args, "llm_timeout", 30.0),
            dialect=getattr(args, "llm_dialect", "simple"),
        )
    )
    if not config.endpoint:
        raise SystemExit(
            "llm backend needs an endpoint (--llm-endpoint or HINTSCHED_LLM_ENDPOINT)"
        )
    return HintAnalyzer(LlmAnalyzer(config), max_hint_length=config.max_hint_length)


def _add_backend_flags(parser: argparse.ArgumentParser, default: str = "scripted") -> None:
    parser.add_argument("--backend", choices=BACKENDS, default=default)
    parser.add_argument("--scripted-fixture", help="JSON fixture of {hint, parsed} records")
    parser.add_argument("--llm-endpoint", help="model endpoint URL")
    parser.add_argument("--llm-model", help="model identifier")
    parser.add_argument("--llm-timeout", type=float, default=30.0)
    parser.add_argument("--llm-dialect", choices=("simple", "bedrock"), default="simple")


def _add_report_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "json", "csv"), default="text")
    parser.add_argument("--figures", metavar="DIR", help="also render chart files into DIR")


def cmd_parse(args) -> int:
    analyzer = make_analyzer(args)
    outcome = analyzer.analyze(args.hint)
    print(json.dumps(outcome.parsed.to_wire(), indent=2))
    if outcome.degraded:
        print("warning: analyzer backend unavailable, returned empty parse", file=sys.stderr)
        return 1
    return 0


def cmd_eval(args) -> int:
    if args.dataset:
        dataset_path = Path(args.dataset)
    else:
        dataset_path = bundled_eval_fixture_path()
    cases = load_dataset(dataset_path, strict=args.strict)
    analyzer = make_analyzer(args)
    report = evaluate_analyzer(analyzer, cases)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    elif args.format == "csv":
        print(eval_report_csv(report), end="")
    else:
        print(eval_report_text(report, backend=args.backend))
    if args.figures:
        for path in save_eval_figures(report, args.figures):
            print(f"figure written: {path}", file=sys.stderr)
    return 0


def cmd_scenario(args) -> int:
    ids = sorted(SCENARIOS) if args.id.lower() == "all" else [args.id.upper()]
    for scenario_id in ids:
        if scenario_id not in SCENARIOS:
            raise SystemExit(f"unknown scenario: {scenario_id}")
    analyzer = make_analyzer(args)
    reports = [
        run_scenario(
            SCENARIOS[scenario_id],
            analyzer=analyzer,
            use_recent_placements=not args.disable_recent_placements,
            inter_arrival=args.inter_arrival,
            api_visibility_delay=args.api_delay,
        )
        for scenario_id in ids
    ]
    if args.format == "json":
        print(reports_json(reports))
    elif args.format == "csv":
        for report in reports:
            print(scenario_report_csv(report), end="")
    else:
        print("\n\n".join(scenario_report_text(r) for r in reports))
    if args.figures:
        for report in reports:
            path = save_scenario_figure(report, args.figures)
            print(f"figure written: {path}", file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


def cmd_serve(args) -> int:
    import uvicorn

    cache = StateCache(deployment_label_key=args.deployment_label_key)
    if args.snapshot:
        with open(args.snapshot, encoding="utf-8") as fh:
            cache.load_snapshot(json.load(fh))
    elif args.builtin_topology:
        cache = build_testbed(SCENARIOS["A"])
    analyzer = make_analyzer(args)
    from .cluster import RecentPlacements

    service = ExtenderService(cache, analyzer, recent=RecentPlacements(ttl=args.ttl))
    host, _, port = args.listen.rpartition(":")
    uvicorn.run(create_app(service), host=host or "127.0.0.1", port=int(port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hintsched",
        description="Semantic soft-affinity scheduling toolkit",
    )
    parser.add_argument("--config", help="JSON file of default flag values")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse one hint and print the intent JSON")
    p.add_argument("--hint", required=True)
    _add_backend_flags(p, default="regex")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="evaluate an analyzer against a ground-truth dataset")
    p.add_argument("--dataset", help="dataset path (defaults to the bundled fixture)")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    _add_backend_flags(p, default="regex")
    _add_report_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("scenario", help="run the placement scenarios")
    p.add_argument("--id", default="all", help="A..F or 'all'")
    p.add_argument("--inter-arrival", type=float, default=None)
    p.add_argument("--api-delay", type=float, default=None)
    p.add_argument(
        "--disable-recent-placements",
        action="store_true",
        help="test-only switch: score from API state alone",
    )
    _add_backend_flags(p, default="scripted")
    _add_report_flags(p)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("serve", help="start the scheduler-extender HTTP service")
    p.add_argument("--listen", default="127.0.0.1:8080")
    p.add_argument("--snapshot", help="cluster snapshot JSON to prime the state cache")
    p.add_argument("--builtin-topology", action="store_true", help="load the 9-node testbed")
    p.add_argument("--deployment-label-key", default="app")
    p.add_argument("--ttl", type=float, default=10.0, help="recent-placements TTL seconds")
    _add_backend_flags(p, default="regex")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            defaults = json.load(fh)
        for key, value in defaults.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and parser.get_default(attr) == getattr(args, attr):
                setattr(args, attr, value)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
