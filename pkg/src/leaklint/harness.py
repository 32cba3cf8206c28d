"""Fixture-corpus runner.

Fixtures carry `# expect[ID]` annotations naming the findings they must
produce; files without annotations are negatives and must stay clean. The
runner compares annotations against engine output and scores each rule.
"""

from __future__ import annotations

import io
import re
import tokenize
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path

from ._model import FileError
from .catalog import Catalog, load_catalog
from .engine import LintConfig, analyze_file
from .frontend import FrontendError, SourceUnit, load_source

_EXPECT = re.compile(r"#\s*expect\[([^\]]+)\]")


class UnknownExpectedRule(Exception):
    """An expectation names a rule id missing from the catalog."""


@dataclass(frozen=True)
class Expectation:
    rule_id: str
    line: int
    path: str


@dataclass(frozen=True)
class RuleScore:
    tp: int = 0
    fn: int = 0
    fp: int = 0


@dataclass(frozen=True)
class CorpusReport:
    per_rule: dict[str, RuleScore]
    mismatches: tuple[str, ...]
    passed: bool
    files: int
    expectations: int


def parse_expectations(unit: SourceUnit, catalog: Catalog | None = None) -> list[Expectation]:
    """Expectations in one unit; trailing comments bind to their own line,
    standalone comments to the nearest following non-comment line."""
    if catalog is None:
        catalog = load_catalog()
    lines = unit.text.split("\n")
    try:
        tokens = list(tokenize.generate_tokens(io.StringIO(unit.text).readline))
    except (tokenize.TokenError, IndentationError, SyntaxError):
        return []
    expectations: list[Expectation] = []
    for token in tokens:
        if token.type != tokenize.COMMENT:
            continue
        match = _EXPECT.search(token.string)
        if match is None:
            continue
        row = token.start[0]
        before = lines[row - 1][: token.start[1]]
        if before.strip():
            target = row
        else:
            target = row
            for later in range(row + 1, len(lines) + 1):
                text = lines[later - 1].strip()
                if not text or text.startswith("#"):
                    continue
                target = later
                break
        for piece in match.group(1).split(","):
            rule_id = piece.strip().upper()
            if not rule_id:
                continue
            if not catalog.has_rule(rule_id):
                raise UnknownExpectedRule(
                    f"{unit.path}:{row}: expectation names unknown rule {rule_id}"
                )
            expectations.append(Expectation(rule_id, target, unit.path))
    return expectations


def _force_enable_all(catalog: Catalog, config: LintConfig) -> LintConfig:
    disabled = {rule.id for rule in catalog.rules if not rule.default_enabled}
    enable = tuple(sorted(set(config.enable) | disabled))
    return replace(config, enable=enable)


def run_corpus(directory, catalog: Catalog, config: LintConfig) -> CorpusReport:
    """Score every fixture under directory; pass means zero FN and zero FP."""
    root = Path(directory)
    files = sorted(
        path
        for path in root.rglob("*")
        if path.suffix in (".py", ".ipynb") and path.is_file()
    )
    config = _force_enable_all(catalog, config)
    scores: dict[str, list[int]] = {}
    mismatches: list[str] = []
    total_expectations = 0
    broken = False

    def score(rule_id: str) -> list[int]:
        return scores.setdefault(rule_id, [0, 0, 0])

    for path in files:
        try:
            unit = load_source(str(path))
        except FrontendError as exc:
            mismatches.append(f"{path}: unreadable fixture: {exc}")
            broken = True
            continue
        expectations = parse_expectations(unit, catalog)
        total_expectations += len(expectations)
        result = analyze_file(unit, catalog, config)
        if isinstance(result, FileError):
            mismatches.append(f"{path}: fixture does not parse: {result.message}")
            broken = True
            continue
        expected = Counter((e.rule_id, e.path, e.line) for e in expectations)
        actual = Counter((f.rule_id, f.path, f.span.start_line) for f in result)
        for key, count in sorted((expected & actual).items()):
            score(key[0])[0] += count
        for (rule_id, file_path, line), count in sorted((expected - actual).items()):
            score(rule_id)[1] += count
            for _ in range(count):
                mismatches.append(f"{file_path}:{line}: expected {rule_id}, not reported")
        for (rule_id, file_path, line), count in sorted((actual - expected).items()):
            score(rule_id)[2] += count
            for _ in range(count):
                mismatches.append(f"{file_path}:{line}: unexpected {rule_id}")

    per_rule = {
        rule_id: RuleScore(tp, fn, fp)
        for rule_id, (tp, fn, fp) in sorted(scores.items())
    }
    clean = not broken and all(s.fn == 0 and s.fp == 0 for s in per_rule.values())
    return CorpusReport(
        per_rule=per_rule,
        mismatches=tuple(mismatches),
        passed=clean,
        files=len(files),
        expectations=total_expectations,
    )


def format_report(report: CorpusReport) -> str:
    lines = [f"corpus: {report.files} files, {report.expectations} expectations"]
    for rule_id, score in report.per_rule.items():
        lines.append(f"  {rule_id}  tp={score.tp}  fn={score.fn}  fp={score.fp}")
    for mismatch in report.mismatches:
        lines.append(f"  mismatch: {mismatch}")
    lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines) + "\n"
