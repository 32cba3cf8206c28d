"""Renderers: human-readable text, JSON, a SARIF 2.1.0 subset, and statistics.

All renderers are pure functions of the report, so identical inputs always
produce identical bytes. The stats renderer also has a file-writing variant
that emits a CSV table and a bar-chart PNG per framework side.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from ._model import FileError, Finding
from .catalog import Catalog, category_distribution

_LEVELS = {"high": "warning", "medium": "warning", "low": "note"}
_COLORS = {"high": "\x1b[31m", "medium": "\x1b[33m", "low": "\x1b[36m"}
_RESET = "\x1b[0m"


@dataclass(frozen=True)
class Report:
    """Findings plus file errors and the summary counted over them."""

    findings: tuple[Finding, ...]
    file_errors: tuple[FileError, ...]
    summary: dict
    version: str


def _counts(items) -> dict[str, int]:
    return dict(sorted(Counter(items).items()))


def build_report(findings, file_errors, catalog: Catalog) -> Report:
    findings = tuple(findings)
    file_errors = tuple(file_errors)
    summary = {
        "findings": len(findings),
        "file_errors": len(file_errors),
        "by_rule": _counts(f.rule_id for f in findings),
        "by_category": _counts(f.category for f in findings),
        "by_tag": _counts(f.tag for f in findings),
        "by_confidence": _counts(f.confidence for f in findings),
    }
    return Report(findings, file_errors, summary, catalog.version)


def _plural(count: int, noun: str) -> str:
    return f"{count} {noun}" + ("" if count == 1 else "s")


def render_text(report: Report, color: bool = False) -> str:
    lines: list[str] = []
    for finding in report.findings:
        rule_id = finding.rule_id
        if color:
            tint = _COLORS.get(finding.confidence, "")
            rule_id = f"{tint}{rule_id}{_RESET}" if tint else rule_id
        message = finding.message
        if finding.cell is not None:
            message = f"{message} (cell {finding.cell})"
        lines.append(
            f"{finding.path}:{finding.line}:{finding.column}  {rule_id}  "
            f"[{finding.category}/{finding.tag}/{finding.confidence}]  {message}"
        )
        if finding.suggestion:
            lines.append(f"  fix: {finding.suggestion}")
    if lines:
        lines.append("")
    count_line = _plural(report.summary["findings"], "finding")
    if report.summary["file_errors"]:
        count_line += f", {_plural(report.summary['file_errors'], 'file error')}"
    lines.append(count_line)
    if report.summary["findings"]:
        for label, key in (
            ("rule", "by_rule"),
            ("category", "by_category"),
            ("tag", "by_tag"),
            ("confidence", "by_confidence"),
        ):
            pairs = ", ".join(f"{k} {v}" for k, v in report.summary[key].items())
            lines.append(f"  by {label}: {pairs}")
    return "\n".join(lines) + "\n"


def _finding_payload(finding: Finding) -> dict:
    return {
        "rule_id": finding.rule_id,
        "name": finding.name,
        "tag": finding.tag,
        "category": finding.category,
        "confidence": finding.confidence,
        "path": finding.path,
        "cell": finding.cell,
        "line": finding.line,
        "column": finding.column,
        "end_line": finding.end_line,
        "end_column": finding.end_column,
        "message": finding.message,
        "practice_ids": list(finding.practice_ids),
        "suggestion": finding.suggestion,
    }


def _error_payload(error: FileError) -> dict:
    return {
        "path": error.path,
        "message": error.message,
        "line": error.span.start_line if error.span else None,
    }


def render_json(report: Report) -> bytes:
    doc = {
        "version": report.version,
        "findings": [_finding_payload(f) for f in report.findings],
        "file_errors": [_error_payload(e) for e in report.file_errors],
        "summary": report.summary,
    }
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


def render_sarif(report: Report, catalog: Catalog) -> bytes:
    rules = []
    rule_index: dict[str, int] = {}
    for position, rule in enumerate(catalog.rules):
        rule_index[rule.id] = position
        help_text = "\n".join(
            f"{catalog.practice(pid).name}: {catalog.practice(pid).summary}"
            for pid in rule.practices
        )
        rules.append(
            {
                "id": rule.id,
                "name": rule.name,
                "shortDescription": {"text": rule.name},
                "fullDescription": {"text": rule.trigger},
                "help": {"text": help_text},
                "defaultConfiguration": {"level": _LEVELS[rule.confidence.value]},
                "properties": {
                    "category": rule.category.value,
                    "tag": rule.tag.value,
                    "practices": list(rule.practices),
                },
            }
        )
    results = []
    for finding in report.findings:
        result = {
            "ruleId": finding.rule_id,
            "level": _LEVELS.get(finding.confidence, "warning"),
            "message": {"text": finding.message},
            "locations": [
                {
                    "physicalLocation": {
                        "artifactLocation": {"uri": finding.path},
                        "region": {
                            "startLine": finding.line,
                            "startColumn": finding.column,
                            "endLine": finding.end_line,
                            "endColumn": finding.end_column,
                        },
                    }
                }
            ],
        }
        if finding.rule_id in rule_index:
            result["ruleIndex"] = rule_index[finding.rule_id]
        if finding.cell is not None:
            result["properties"] = {"cell": finding.cell}
        results.append(result)
    doc = {
        "$schema": "https://json.schemastore.org/sarif-2.1.0.json",
        "version": "2.1.0",
        "runs": [
            {
                "tool": {
                    "driver": {
                        "name": "leaklint",
                        "version": report.version,
                        "rules": rules,
                    }
                },
                "results": results,
            }
        ],
    }
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


def render_stats(catalog: Catalog, side: str) -> str:
    rows = category_distribution(catalog, side)
    total = sum(row.count for row in rows)
    width = max(len(row.category) for row in rows)
    lines = [f"Category distribution ({side} side, {total} rules)"]
    for row in rows:
        lines.append(f"  {row.category:<{width}}  {row.count:>3}  {row.percent:>3}%")
    if side == "keras":
        lines.append(
            "  note: computed over the pinned 6-rule keras set; the same"
            " percentages are quoted elsewhere for a 5-rule count, so each"
            " per-category count carries a one-rule tolerance."
        )
    return "\n".join(lines) + "\n"


def write_stats_outputs(catalog: Catalog, side: str, directory) -> tuple[str, str]:
    """Write <side>_category_distribution.csv and .png; returns both paths."""
    rows = category_distribution(catalog, side)
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    csv_path = target / f"{side}_category_distribution.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["category", "count", "percent"])
        for row in rows:
            writer.writerow([row.category, row.count, row.percent])

    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    png_path = target / f"{side}_category_distribution.png"
    figure, axis = plt.subplots(figsize=(7.0, 4.0))
    bars = axis.bar([row.category for row in rows], [row.count for row in rows])
    axis.bar_label(bars, labels=[f"{row.percent}%" for row in rows])
    axis.set_ylabel("rules")
    axis.set_title(f"{side} category distribution")
    plt.setp(axis.get_xticklabels(), rotation=20, ha="right")
    figure.tight_layout()
    figure.savefig(png_path)
    plt.close(figure)
    return str(csv_path), str(png_path)
