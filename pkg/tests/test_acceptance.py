"""Acceptance gate: one test per shipped guarantee.

Each test here is a numbered criterion; the terminal summary hook in
conftest.py prints one PASS/FAIL line per criterion at the end of a run.
"""

from __future__ import annotations

import json
import math
import random
import time
from collections import Counter
from pathlib import Path

import jsonschema
import pytest

from leaklint import (
    FileError,
    LintConfig,
    analyze_file,
    category_distribution,
    cohen_kappa,
    load_catalog,
    load_source,
    observed_agreement,
)
from leaklint.engine import analyze_paths
from leaklint.harness import run_corpus
from leaklint.output import build_report, render_json, render_sarif, render_stats, render_text

REPO = Path(__file__).resolve().parent.parent
CORPUS = REPO / "corpus"
SCHEMA = Path(__file__).resolve().parent / "data" / "sarif-2.1.0-subset.schema.json"

ALL_ON = LintConfig(enable=("PT-22", "TK-14"))


def rule_dirs():
    return sorted(
        [d for side in ("pytorch", "tfkeras") for d in (CORPUS / side).iterdir() if d.is_dir()],
        key=lambda d: d.name,
    )


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


@pytest.fixture(scope="module")
def big_corpus(tmp_path_factory):
    """100 analyzable files totalling ~20k lines, assembled from the fixtures."""
    root = tmp_path_factory.mktemp("bigcorpus")
    texts = [path.read_text(encoding="utf-8") for path in sorted(CORPUS.rglob("*.py"))]
    total = 0
    for index in range(100):
        text = texts[index % len(texts)]
        reps = math.ceil(200 / max(text.count("\n"), 1))
        body = text * reps
        total += body.count("\n")
        (root / f"file_{index:03}.py").write_text(body, encoding="utf-8")
    assert 20_000 <= total <= 30_000
    return root


def test_criterion_01_catalog_counts(catalog):
    assert len(catalog.rules) == 46
    pytorch = [r for r in catalog.rules if r.id.startswith("PT-")]
    tfkeras = [r for r in catalog.rules if r.id.startswith("TK-")]
    assert len(pytorch) == 30
    assert len(tfkeras) == 16
    assert Counter(r.tag for r in pytorch) == {"G": 21, "P": 9}
    assert Counter(r.tag for r in tfkeras) == {"G": 7, "T": 4, "K": 1, "TK": 4}
    assert len(catalog.practices) == 50
    assert Counter(p.id[0] for p in catalog.practices) == {"P": 30, "T": 15, "K": 5}
    assert all(rule.practices for rule in catalog.rules)
    covered = {pid for rule in catalog.rules for pid in rule.practices}
    assert covered == {practice.id for practice in catalog.practices}


def test_criterion_02_pytorch_distribution_exact(catalog):
    rows = [tuple(row) for row in category_distribution(catalog, "pytorch")]
    assert rows == [
        ("ResourceManagement", 16, 53),
        ("GraphAndGradient", 8, 27),
        ("TrainingPipeline", 4, 13),
        ("LoopLifecycle", 2, 7),
    ]


def test_criterion_03_tensorflow_distribution_within_one_point(catalog):
    rows = {row.category: row for row in category_distribution(catalog, "tensorflow")}
    assert {name: row.count for name, row in rows.items()} == {
        "ResourceManagement": 6,
        "FrameworkAbstraction": 2,
        "GraphManagement": 2,
        "TrainingPipeline": 2,
    }
    reference_percents = {
        "ResourceManagement": 50,
        "TrainingPipeline": 16,
        "GraphManagement": 17,
        "FrameworkAbstraction": 17,
    }
    for name, expected in reference_percents.items():
        assert abs(rows[name].percent - expected) <= 1, name


def test_criterion_04_keras_distribution_within_one_rule(catalog):
    assert catalog.keras_side == ("TK-01", "TK-03", "TK-13", "TK-14", "TK-15", "TK-16")
    rows = {row.category: row.count for row in category_distribution(catalog, "keras")}
    assert sum(rows.values()) == 6
    reference_counts = {
        "TrainingPipeline": 2,
        "EnvironmentConfig": 2,
        "ResourceManagement": 1,
        "FrameworkAbstraction": 1,
    }
    for name, expected in reference_counts.items():
        assert abs(rows.get(name, 0) - expected) <= 1, name
    # The deviation (a 5-rule reference tally vs the pinned 6-rule set) is
    # documented in the rendered report itself.
    assert "one-rule tolerance" in render_stats(catalog, "keras")


def test_criterion_05_agreement_utilities():
    rng = random.Random(5)
    labels = ["smell", "clean", "unsure"]
    for _ in range(20):
        length = rng.randint(1, 60)
        vector = [rng.choice(labels) for _ in range(length)]
        assert cohen_kappa(vector, vector) == 1.0

    first = ["yes"] * 23 + ["no"] * 23
    second = list(first)
    for index in (3, 11, 27, 41):
        second[index] = "no" if second[index] == "yes" else "yes"
    agreement = observed_agreement(first, second)
    assert abs(agreement - 0.913) <= 0.001

    rng = random.Random(1000)
    for _ in range(1000):
        length = rng.randint(2, 30)
        a = [rng.choice(labels) for _ in range(length)]
        b = [rng.choice(labels) for _ in range(length)]
        kappa = cohen_kappa(a, b)
        assert -1.0 - 1e-12 <= kappa <= 1.0 + 1e-12

    rng = random.Random(55)
    for _ in range(200):
        length = rng.randint(2, 25)
        a = [rng.choice(labels) for _ in range(length)]
        b = [rng.choice(labels) for _ in range(length)]
        added = rng.choice(labels)
        before = cohen_kappa(a, b)
        after = cohen_kappa(a + [added], b + [added])
        assert after >= before - 1e-9

    assert cohen_kappa(["a", "b"], ["b", "a"]) == -1.0
    assert cohen_kappa(["a", "b", "a"], ["b", "a", "a"]) > -1.0


def test_criterion_06_corpus_soundness(catalog):
    fixtures = [
        path for path in CORPUS.rglob("*") if path.suffix in (".py", ".ipynb") and path.is_file()
    ]
    assert len(fixtures) >= 92
    directories = rule_dirs()
    assert {d.name for d in directories} == {rule.id for rule in catalog.rules}
    for directory in directories:
        assert list(directory.glob("pos*")), directory.name
        assert list(directory.glob("neg*")), directory.name
    started = time.perf_counter()
    report = run_corpus(CORPUS, catalog, LintConfig())
    elapsed = time.perf_counter() - started
    assert report.passed, report.mismatches
    assert all(score.tp >= 1 for score in report.per_rule.values())
    assert all(score.fn == 0 and score.fp == 0 for score in report.per_rule.values())
    assert elapsed < 5.0


def test_criterion_07_determinism(catalog, big_corpus):
    def one_run(workers):
        findings, errors = analyze_paths([str(big_corpus)], catalog, LintConfig(), workers=workers)
        report = build_report(findings, errors, catalog)
        return render_text(report), render_json(report), render_sarif(report, catalog)

    first = one_run(workers=1)
    second = one_run(workers=1)
    assert first[0] == second[0]
    assert first[1] == second[1]
    assert first[2] == second[2]
    parallel = one_run(workers=4)
    assert parallel == first


def test_criterion_08_output_contracts(catalog):
    findings, errors = analyze_paths([str(CORPUS)], catalog, ALL_ON)
    report = build_report(findings, errors, catalog)
    assert findings, "corpus should produce findings"

    blob = render_json(report)
    document = json.loads(blob)
    rerendered = (json.dumps(document, indent=2, sort_keys=True) + "\n").encode("utf-8")
    assert rerendered == blob

    sarif = json.loads(render_sarif(report, catalog))
    with open(SCHEMA, encoding="utf-8") as handle:
        schema = json.load(handle)
    jsonschema.validate(sarif, schema)
    driver = sarif["runs"][0]["tool"]["driver"]
    assert len(driver["rules"]) == 46


def test_criterion_09_performance(catalog, big_corpus):
    started = time.perf_counter()
    findings, errors = analyze_paths([str(big_corpus)], catalog, LintConfig(), workers=1)
    elapsed = time.perf_counter() - started
    assert not errors
    assert findings
    assert elapsed < 2.0, f"single-threaded run took {elapsed:.2f}s"


def _marked_copy(path, lines_to_mark, rule_id, destination):
    """Copy a fixture with `# leaklint: ignore[rule_id]` appended on the
    given flattened lines; notebook lines are mapped back through cell spans."""
    suffix = f"  # leaklint: ignore[{rule_id}]"
    if path.suffix == ".py":
        lines = path.read_text(encoding="utf-8").split("\n")
        for line in lines_to_mark:
            lines[line - 1] += suffix
        destination.write_text("\n".join(lines), encoding="utf-8")
        return
    unit = load_source(str(path))
    notebook = json.loads(path.read_text(encoding="utf-8"))
    for line in lines_to_mark:
        span = next(s for s in unit.cell_spans if s.start_line <= line <= s.end_line)
        cell = notebook["cells"][span.index]
        source = cell["source"]
        relative = line - span.start_line
        if isinstance(source, str):
            cell_lines = source.split("\n")
            cell_lines[relative] += suffix
            cell["source"] = "\n".join(cell_lines)
        else:
            ending = "\n" if source[relative].endswith("\n") else ""
            source[relative] = source[relative].rstrip("\n") + suffix + ending
    destination.write_text(json.dumps(notebook), encoding="utf-8")


def test_criterion_10_suppression(catalog, tmp_path):
    for directory in rule_dirs():
        rule_id = directory.name
        for fixture in sorted(directory.glob("pos*")):
            unit = load_source(str(fixture))
            baseline = analyze_file(unit, catalog, ALL_ON)
            assert not isinstance(baseline, FileError)
            own = [f for f in baseline if f.rule_id == rule_id]
            others = Counter((f.rule_id, f.span.start_line) for f in baseline if f.rule_id != rule_id)
            assert own, f"{fixture} no longer triggers {rule_id}"

            marked = tmp_path / f"{rule_id}_{fixture.name}"
            _marked_copy(fixture, {f.span.start_line for f in own}, rule_id, marked)
            result = analyze_file(load_source(str(marked)), catalog, ALL_ON)
            assert not isinstance(result, FileError)
            assert not [f for f in result if f.rule_id == rule_id], rule_id
            remaining = Counter(
                (f.rule_id, f.span.start_line) for f in result if f.rule_id != rule_id
            )
            assert remaining == others, rule_id
