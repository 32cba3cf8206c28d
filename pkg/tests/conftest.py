"""Shared fixtures for the leaklint test suite."""

from __future__ import annotations

import re
import textwrap

import pytest

from leaklint import FileError, LintConfig, analyze_file, load_catalog, load_source

ACCEPTANCE_LABELS = {
    1: "catalog counts",
    2: "pytorch category distribution",
    3: "tensorflow category distribution",
    4: "keras category distribution",
    5: "agreement utilities",
    6: "corpus soundness",
    7: "determinism",
    8: "output contracts",
    9: "performance",
    10: "suppression",
}

_CRITERION = re.compile(r"test_criterion_(\d+)")


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture
def lint(tmp_path, catalog):
    """Write a source snippet to disk, analyze it, and return the findings."""

    def run(source, *, name="sample.py", config=None):
        path = tmp_path / name
        path.write_text(textwrap.dedent(source), encoding="utf-8")
        unit = load_source(str(path))
        result = analyze_file(unit, catalog, config or LintConfig())
        assert not isinstance(result, FileError), result.message
        return result

    return run


@pytest.fixture
def lint_ids(lint):
    """Like ``lint`` but reduced to a sorted list of (rule_id, line) pairs."""

    def run(source, *, name="sample.py", config=None):
        findings = lint(source, name=name, config=config)
        return sorted((f.rule_id, f.line) for f in findings)

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results: dict[int, str] = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            match = _CRITERION.search(nodeid)
            if not match:
                continue
            number = int(match.group(1))
            if outcome == "passed" and report.when != "call":
                continue
            verdict = "PASS" if outcome == "passed" else "FAIL"
            if results.get(number) != "FAIL":
                results[number] = verdict
    if not results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(results):
        label = ACCEPTANCE_LABELS.get(number, "")
        terminalreporter.write_line(
            f"criterion {number:>2}: {results[number]} — {label}"
        )
