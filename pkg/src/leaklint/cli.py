"""Command-line entry point.

Subcommands: check (lint paths), explain (rule detail), list-rules
(registry table), stats (category distribution, optionally written as CSV
and PNG), and corpus (fixture-corpus run).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .catalog import Catalog, FrameworkTag, UnknownRule, explain, load_catalog
from .engine import ConfigInvalid, LintConfig, analyze_paths
from .harness import format_report, run_corpus
from .output import (
    build_report,
    render_json,
    render_sarif,
    render_stats,
    render_text,
    write_stats_outputs,
)

_CONFIG_NAME = ".leaklint.json"
_CONFIG_KEYS = {"select", "ignore", "min_confidence", "framework", "thresholds", "enable"}
_TAGS = {tag.value for tag in FrameworkTag}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leaklint", description="Resource-leak linter for ML code.")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="lint files and directories")
    check.add_argument("paths", nargs="+", help="files or directories to analyze")
    check.add_argument("--format", choices=("text", "json", "sarif"), default="text")
    check.add_argument("--select", action="append", default=None,
                       help="only run these rules/categories/tags (comma-separable, repeatable)")
    check.add_argument("--ignore", action="append", default=None,
                       help="skip these rules/categories/tags (comma-separable, repeatable)")
    check.add_argument("--min-confidence", choices=("high", "medium", "low"), default=None)
    check.add_argument("--framework", choices=("pytorch", "tensorflow", "keras", "all"), default=None)
    check.add_argument("--config", default=None, help="path to a .leaklint.json config file")
    check.add_argument("--threshold", action="append", default=None, metavar="KEY=VALUE",
                       help="override a threshold (repeatable)")
    check.add_argument("--enable", action="append", default=None,
                       help="turn on default-disabled rules (comma-separable, repeatable)")
    check.add_argument("--no-color", action="store_true")

    explain_cmd = commands.add_parser("explain", help="describe one rule and its fixes")
    explain_cmd.add_argument("rule_id")

    commands.add_parser("list-rules", help="print the rule registry table")

    stats = commands.add_parser("stats", help="category distribution for one framework side")
    stats.add_argument("--side", choices=("pytorch", "tensorflow", "keras"), required=True)
    stats.add_argument("--report-dir", default=None,
                       help="also write <side>_category_distribution.csv and .png here")

    corpus = commands.add_parser("corpus", help="run the annotated fixture corpus")
    corpus.add_argument("directory")
    return parser


def _flatten_tokens(values) -> list[str]:
    tokens: list[str] = []
    for value in values:
        tokens.extend(piece.strip() for piece in str(value).split(",") if piece.strip())
    return tokens


def _expand_tokens(values, catalog: Catalog) -> tuple[str, ...]:
    """Expand rule ids, category names, and tags into concrete rule ids."""
    expanded: list[str] = []
    for token in _flatten_tokens(values):
        upper = token.upper()
        if catalog.has_rule(upper):
            expanded.append(upper)
            continue
        if upper in _TAGS:
            expanded.extend(rule.id for rule in catalog.rules if rule.tag.value == upper)
            continue
        matched = [
            rule.id
            for rule in catalog.rules
            if rule.category.value.lower() == token.lower()
        ]
        if matched:
            expanded.extend(matched)
            continue
        raise ConfigInvalid(f"unknown rule, category, or tag: {token!r}")
    out: list[str] = []
    for rule_id in expanded:
        if rule_id not in out:
            out.append(rule_id)
    return tuple(out)


def _find_config_file(explicit: str | None) -> str | None:
    if explicit:
        return explicit
    env = os.environ.get("LEAKLINT_CONFIG")
    if env:
        return env
    current = Path.cwd()
    for candidate in (current, *current.parents):
        path = candidate / _CONFIG_NAME
        if path.is_file():
            return str(path)
    return None


def _read_config_file(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigInvalid(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigInvalid(f"config {path} must be a JSON object")
    for key, value in raw.items():
        if key not in _CONFIG_KEYS:
            raise ConfigInvalid(f"unknown config key: {key!r}")
        if key in ("select", "ignore", "enable"):
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ConfigInvalid(f"config key {key!r} must be a list of strings")
        elif key == "thresholds":
            if not isinstance(value, dict):
                raise ConfigInvalid("config key 'thresholds' must be an object")
        elif not isinstance(value, str):
            raise ConfigInvalid(f"config key {key!r} must be a string")
    return raw


def _parse_threshold_flags(specs) -> dict:
    thresholds: dict = {}
    for spec in specs:
        key, separator, value = str(spec).partition("=")
        if not separator or not key.strip():
            raise ConfigInvalid(f"--threshold expects KEY=VALUE, got {spec!r}")
        try:
            thresholds[key.strip()] = int(value.strip())
        except ValueError as exc:
            raise ConfigInvalid(f"threshold {key.strip()!r} must be an integer") from exc
    return thresholds


def load_config(args: argparse.Namespace, catalog: Catalog) -> LintConfig:
    """Build a LintConfig from defaults, then the config file, then CLI flags."""
    data: dict = {}
    path = _find_config_file(getattr(args, "config", None))
    if path:
        data = _read_config_file(path)

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return data.get(key, default)

    select = _expand_tokens(pick(args.select, "select", []), catalog)
    ignore = _expand_tokens(pick(args.ignore, "ignore", []), catalog)
    enable = _expand_tokens(pick(args.enable, "enable", []), catalog)
    min_confidence = pick(args.min_confidence, "min_confidence", "low")
    framework = pick(args.framework, "framework", "all")
    thresholds = dict(data.get("thresholds", {}))
    if args.threshold is not None:
        thresholds.update(_parse_threshold_flags(args.threshold))
    return LintConfig(
        select=select,
        ignore=ignore,
        min_confidence=min_confidence,
        framework=framework,
        thresholds=thresholds,
        enable=enable,
    )


def _cmd_check(args: argparse.Namespace, catalog: Catalog) -> int:
    config = load_config(args, catalog)
    findings, errors = analyze_paths(args.paths, catalog, config)
    report = build_report(findings, errors, catalog)
    for error in errors:
        print(f"{error.path}: {error.message}", file=sys.stderr)
    if args.format == "json":
        sys.stdout.write(render_json(report).decode("utf-8"))
    elif args.format == "sarif":
        sys.stdout.write(render_sarif(report, catalog).decode("utf-8"))
    else:
        color = (
            not args.no_color
            and "NO_COLOR" not in os.environ
            and sys.stdout.isatty()
        )
        sys.stdout.write(render_text(report, color=color))
    return 1 if findings or errors else 0


def _cmd_explain(args: argparse.Namespace, catalog: Catalog) -> int:
    try:
        text = explain(catalog, args.rule_id.upper())
    except UnknownRule as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(text)
    return 0


def _cmd_list_rules(catalog: Catalog) -> int:
    for rule in catalog.rules:
        marker = "" if rule.default_enabled else "  (default off)"
        print(
            f"{rule.id}  {rule.tag.value:<2}  {rule.confidence.value:<6}  "
            f"{rule.category.value:<21}  {rule.name}{marker}"
        )
    return 0


def _cmd_stats(args: argparse.Namespace, catalog: Catalog) -> int:
    sys.stdout.write(render_stats(catalog, args.side))
    if args.report_dir:
        csv_path, png_path = write_stats_outputs(catalog, args.side, args.report_dir)
        print(f"wrote {csv_path}")
        print(f"wrote {png_path}")
    return 0


def _cmd_corpus(args: argparse.Namespace, catalog: Catalog) -> int:
    report = run_corpus(args.directory, catalog, LintConfig())
    sys.stdout.write(format_report(report))
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    catalog = load_catalog()
    try:
        if args.command == "check":
            return _cmd_check(args, catalog)
        if args.command == "explain":
            return _cmd_explain(args, catalog)
        if args.command == "list-rules":
            return _cmd_list_rules(catalog)
        if args.command == "stats":
            return _cmd_stats(args, catalog)
        if args.command == "corpus":
            return _cmd_corpus(args, catalog)
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
