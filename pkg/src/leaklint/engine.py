"""Per-file analysis orchestration: checkers, suppressions, deterministic order.

Runs the six rule checkers for whichever frameworks a file imports, applies
suppression comments, and merges findings into a stable order so repeated
runs (parallel or sequential) emit identical output.
"""

from __future__ import annotations

import io
import re
import tokenize
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import rules_pytorch, rules_tfkeras
from ._model import FileError, Finding
from .catalog import (
    CONFIDENCE_RANK,
    Catalog,
    Confidence,
    FrameworkTag,
)
from .facts import build_facts
from .frontend import (
    IoError,
    MalformedNotebook,
    ParseError,
    SourceUnit,
    Span,
    _LineIndex,
    build_alias_map,
    load_source,
    parse_source,
)

META_RULE_ID = "META-01"
_FRAMEWORK_CHOICES = ("all", "pytorch", "tensorflow", "keras")
_SUPPRESS = re.compile(r"#\s*leaklint:\s*(ignore-file|ignore)\b(?:\[([^\]]*)\])?")

DEFAULT_THRESHOLDS = {
    "batch_size_threshold": 1024,
    "constant_size_threshold": 4096,
}


class ConfigInvalid(Exception):
    """Raised when a lint configuration violates its schema."""


@dataclass(frozen=True)
class LintConfig:
    """Rule selection and tuning knobs shared by the CLI and the engine."""

    select: tuple[str, ...] = ()
    ignore: tuple[str, ...] = ()
    min_confidence: str = "low"
    framework: str = "all"
    thresholds: dict = field(default_factory=dict)
    enable: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        overlap = set(self.select) & set(self.ignore)
        if overlap:
            raise ConfigInvalid(f"select and ignore overlap: {sorted(overlap)}")
        if self.min_confidence not in ("high", "medium", "low"):
            raise ConfigInvalid(f"invalid min_confidence: {self.min_confidence!r}")
        if self.framework not in _FRAMEWORK_CHOICES:
            raise ConfigInvalid(f"invalid framework: {self.framework!r}")
        for key, value in self.thresholds.items():
            if key not in DEFAULT_THRESHOLDS:
                raise ConfigInvalid(f"unknown threshold: {key!r}")
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ConfigInvalid(f"threshold {key!r} must be a positive integer")

    def resolved_thresholds(self) -> dict:
        merged = dict(DEFAULT_THRESHOLDS)
        merged.update(self.thresholds)
        return merged


@dataclass(frozen=True)
class Suppression:
    line: int
    rule_ids: frozenset[str]

    def covers(self, finding: Finding) -> bool:
        if finding.span.start_line not in (self.line, self.line + 1):
            return False
        return not self.rule_ids or finding.rule_id in self.rule_ids


def enabled_rule_ids(catalog: Catalog, config: LintConfig) -> frozenset[str]:
    """Rule ids that survive selection, ignore, confidence, and framework flags."""
    minimum = CONFIDENCE_RANK[Confidence(config.min_confidence)]
    selected = set()
    for rule in catalog.rules:
        if config.select:
            if rule.id not in config.select:
                continue
        elif not rule.default_enabled and rule.id not in config.enable:
            continue
        if rule.id in config.ignore:
            continue
        if CONFIDENCE_RANK[Confidence(rule.confidence)] < minimum:
            continue
        if config.framework != "all" and config.framework not in rule.frameworks:
            continue
        selected.add(rule.id)
    return frozenset(selected)


def _parse_suppressions(
    unit: SourceUnit, catalog: Catalog
) -> tuple[bool, list[Suppression], list[tuple[int, int, str]]]:
    """Returns (whole file ignored, line suppressions, unknown-id sites)."""
    suppressions: list[Suppression] = []
    unknown: list[tuple[int, int, str]] = []
    file_ignored = False
    try:
        tokens = list(tokenize.generate_tokens(io.StringIO(unit.text).readline))
    except (tokenize.TokenError, IndentationError, SyntaxError):
        return False, [], []
    for token in tokens:
        if token.type != tokenize.COMMENT:
            continue
        match = _SUPPRESS.search(token.string)
        if match is None:
            continue
        line = token.start[0]
        if match.group(1) == "ignore-file":
            if line <= 5:
                file_ignored = True
            continue
        raw_ids = match.group(2)
        if raw_ids is None or not raw_ids.strip():
            suppressions.append(Suppression(line, frozenset()))
            continue
        ids = set()
        for piece in raw_ids.split(","):
            rule_id = piece.strip().upper()
            if not rule_id:
                continue
            if catalog.has_rule(rule_id) or rule_id == META_RULE_ID:
                ids.add(rule_id)
            else:
                column = token.start[1] + 1
                unknown.append((line, column, rule_id))
        if ids:
            suppressions.append(Suppression(line, frozenset(ids)))
    return file_ignored, suppressions, unknown


def _meta_finding(unit: SourceUnit, line: int, column: int, bad_id: str) -> Finding:
    index = _LineIndex(unit.text)
    line_text = index.lines[line - 1] if line - 1 < len(index.lines) else ""
    start = index.offset(line, column)
    end = index.offset(line, len(line_text) + 1)
    span = Span(line, column, line, len(line_text) + 1, start, end)
    cell = unit.cell_of_line(line)
    display_line = line - cell.start_line + 1 if cell else line
    return Finding(
        rule_id=META_RULE_ID,
        name="Unknown Suppressed Rule",
        path=unit.path,
        span=span,
        cell=cell.index if cell else None,
        line=display_line,
        column=column,
        end_line=display_line,
        end_column=len(line_text) + 1,
        message=f"suppression names unknown rule id '{bad_id}'",
        category="Meta",
        tag=FrameworkTag.GENERAL.value,
        confidence=Confidence.HIGH.value,
        practice_ids=(),
        suggestion="",
    )


def analyze_file(
    unit: SourceUnit, catalog: Catalog, config: LintConfig
) -> list[Finding] | FileError:
    """All surviving findings for one unit, or a FileError when it cannot parse."""
    try:
        tree = parse_source(unit)
    except ParseError as exc:
        return FileError(unit.path, str(exc), exc.span)
    facts = build_facts(tree, build_alias_map(tree))
    enabled_global = enabled_rule_ids(catalog, config)
    enabled = {
        rule_id
        for rule_id in enabled_global
        if catalog.rule(rule_id).frameworks & facts.frameworks
    }
    thresholds = config.resolved_thresholds()

    findings: list[Finding] = []
    if "pytorch" in facts.frameworks:
        findings += rules_pytorch.check_gradient_and_graph(facts, enabled)
        findings += rules_pytorch.check_loops_and_pipeline(facts, enabled, thresholds)
        findings += rules_pytorch.check_references_and_memory(facts, enabled)
    if facts.frameworks & {"tensorflow", "keras", "sklearn"}:
        findings += rules_tfkeras.check_sessions_and_resources(facts, enabled)
        findings += rules_tfkeras.check_graph_and_api(facts, enabled, thresholds)
        findings += rules_tfkeras.check_pipeline_and_env(facts, enabled, thresholds)

    file_ignored, suppressions, unknown = _parse_suppressions(unit, catalog)
    if file_ignored:
        return []
    if META_RULE_ID not in config.ignore:
        for line, column, bad_id in unknown:
            findings.append(_meta_finding(unit, line, column, bad_id))
    findings = [
        finding
        for finding in findings
        if not any(s.covers(finding) for s in suppressions)
    ]
    findings.sort(key=Finding.sort_key)
    return findings


def _collect_files(paths) -> tuple[list[str], list[FileError]]:
    files: list[str] = []
    errors: list[FileError] = []
    seen: set[str] = set()
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            for candidate in sorted(path.rglob("*")):
                if candidate.suffix not in (".py", ".ipynb") or not candidate.is_file():
                    continue
                relative = candidate.relative_to(path)
                if any(part.startswith(".") for part in relative.parts[:-1]):
                    continue
                text = str(candidate)
                if text not in seen:
                    seen.add(text)
                    files.append(text)
        elif path.is_file():
            text = str(path)
            if text not in seen:
                seen.add(text)
                files.append(text)
        else:
            errors.append(FileError(str(path), "no such file or directory"))
    return files, errors


def analyze_paths(
    paths, catalog: Catalog, config: LintConfig, workers: int | None = None
) -> tuple[list[Finding], list[FileError]]:
    """Analyze files and directories; returns (findings, file errors), both sorted."""
    files, errors = _collect_files(paths)

    def run(path: str) -> list[Finding] | FileError:
        try:
            unit = load_source(path)
        except (IoError, MalformedNotebook) as exc:
            return FileError(path, str(exc))
        return analyze_file(unit, catalog, config)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, files))
    else:
        results = [run(path) for path in files]

    findings: list[Finding] = []
    for result in results:
        if isinstance(result, FileError):
            errors.append(result)
        else:
            findings.extend(result)
    findings.sort(key=Finding.sort_key)
    errors.sort(key=lambda e: e.path)
    return findings, errors
