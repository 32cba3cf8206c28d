"""Engine orchestration: config, rule enabling, suppression, file handling."""

from __future__ import annotations

import json
import textwrap

import pytest

from leaklint import (
    ConfigInvalid,
    FileError,
    LintConfig,
    analyze_file,
    analyze_paths,
    enabled_rule_ids,
    load_source,
)

HOOK_SNIPPET = """\
import torch

def attach(module, fn):
    module.register_forward_hook(fn)
"""


def run_file(tmp_path, catalog, text, *, name="sample.py", config=None):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text), encoding="utf-8")
    result = analyze_file(load_source(str(path)), catalog, config or LintConfig())
    assert not isinstance(result, FileError), result.message
    return result


class TestLintConfigValidation:
    def test_defaults(self):
        config = LintConfig()
        assert config.min_confidence == "low"
        assert config.framework == "all"

    def test_select_ignore_overlap_rejected(self):
        with pytest.raises(ConfigInvalid):
            LintConfig(select=("PT-07",), ignore=("PT-07",))

    def test_bad_confidence_rejected(self):
        with pytest.raises(ConfigInvalid):
            LintConfig(min_confidence="severe")

    def test_bad_framework_rejected(self):
        with pytest.raises(ConfigInvalid):
            LintConfig(framework="mxnet")

    def test_unknown_threshold_key_rejected(self):
        with pytest.raises(ConfigInvalid):
            LintConfig(thresholds={"mystery": 3})

    def test_non_positive_threshold_rejected(self):
        with pytest.raises(ConfigInvalid):
            LintConfig(thresholds={"batch_size_threshold": 0})

    def test_known_thresholds_accepted(self):
        config = LintConfig(
            thresholds={"batch_size_threshold": 64, "constant_size_threshold": 10}
        )
        resolved = config.resolved_thresholds()
        assert resolved["batch_size_threshold"] == 64
        assert resolved["constant_size_threshold"] == 10


class TestEnabledRuleIds:
    def test_default_excludes_opt_in_rules(self, catalog):
        enabled = enabled_rule_ids(catalog, LintConfig())
        assert len(enabled) == 44
        assert "PT-22" not in enabled
        assert "TK-14" not in enabled

    def test_enable_adds_opt_in_rules(self, catalog):
        enabled = enabled_rule_ids(catalog, LintConfig(enable=("PT-22", "TK-14")))
        assert len(enabled) == 46

    def test_select_is_exclusive(self, catalog):
        enabled = enabled_rule_ids(catalog, LintConfig(select=("PT-07", "TK-07")))
        assert enabled == {"PT-07", "TK-07"}

    def test_select_can_reach_opt_in_rules(self, catalog):
        enabled = enabled_rule_ids(catalog, LintConfig(select=("PT-22",)))
        assert enabled == {"PT-22"}

    def test_ignore_always_wins(self, catalog):
        enabled = enabled_rule_ids(catalog, LintConfig(ignore=("PT-07",)))
        assert "PT-07" not in enabled
        assert len(enabled) == 43

    def test_min_confidence_filters(self, catalog):
        high_only = enabled_rule_ids(catalog, LintConfig(min_confidence="high"))
        high_rules = {r.id for r in catalog.rules if r.confidence.value == "high"}
        assert high_only <= high_rules
        medium_up = enabled_rule_ids(catalog, LintConfig(min_confidence="medium"))
        assert high_only < medium_up

    def test_framework_restriction(self, catalog):
        torch_only = enabled_rule_ids(catalog, LintConfig(framework="pytorch"))
        assert torch_only == {
            r.id
            for r in catalog.rules
            if r.id.startswith("PT-") and r.default_enabled
        }
        keras_only = enabled_rule_ids(catalog, LintConfig(framework="keras"))
        assert keras_only == {
            r.id
            for r in catalog.rules
            if "keras" in r.frameworks and r.default_enabled
        }
        assert "TK-07" not in keras_only  # TensorFlow-specific rule
        assert "TK-15" in keras_only  # Keras-specific rule


class TestSuppression:
    def test_same_line_comment(self, tmp_path, catalog):
        text = HOOK_SNIPPET.replace(
            "module.register_forward_hook(fn)",
            "module.register_forward_hook(fn)  # leaklint: ignore[PT-07]",
        )
        assert run_file(tmp_path, catalog, text) == []

    def test_line_above_comment(self, tmp_path, catalog):
        text = HOOK_SNIPPET.replace(
            "    module.register_forward_hook(fn)",
            "    # leaklint: ignore[PT-07]\n    module.register_forward_hook(fn)",
        )
        assert run_file(tmp_path, catalog, text) == []

    def test_bare_ignore_suppresses_everything_on_the_line(self, tmp_path, catalog):
        text = HOOK_SNIPPET.replace(
            "module.register_forward_hook(fn)",
            "module.register_forward_hook(fn)  # leaklint: ignore",
        )
        assert run_file(tmp_path, catalog, text) == []

    def test_other_rule_id_does_not_suppress(self, tmp_path, catalog):
        text = HOOK_SNIPPET.replace(
            "module.register_forward_hook(fn)",
            "module.register_forward_hook(fn)  # leaklint: ignore[PT-01]",
        )
        findings = run_file(tmp_path, catalog, text)
        assert [f.rule_id for f in findings] == ["PT-07"]

    def test_ignore_file_in_first_five_lines(self, tmp_path, catalog):
        text = "# leaklint: ignore-file\n" + HOOK_SNIPPET
        assert run_file(tmp_path, catalog, text) == []

    def test_ignore_file_after_line_five_has_no_effect(self, tmp_path, catalog):
        text = HOOK_SNIPPET + "\n\n\n# leaklint: ignore-file\n"
        findings = run_file(tmp_path, catalog, text)
        assert [f.rule_id for f in findings] == ["PT-07"]

    def test_unknown_id_reports_meta_finding(self, tmp_path, catalog):
        text = HOOK_SNIPPET.replace(
            "module.register_forward_hook(fn)",
            "module.register_forward_hook(fn)  # leaklint: ignore[PT-07,PT-99]",
        )
        findings = run_file(tmp_path, catalog, text)
        assert [f.rule_id for f in findings] == ["META-01"]
        assert "PT-99" in findings[0].message
        assert findings[0].category == "Meta"
        assert findings[0].practice_ids == ()

    def test_meta_finding_can_be_silenced_by_config(self, tmp_path, catalog):
        text = HOOK_SNIPPET.replace(
            "module.register_forward_hook(fn)",
            "module.register_forward_hook(fn)  # leaklint: ignore[PT-07,PT-99]",
        )
        config = LintConfig(ignore=("META-01",))
        assert run_file(tmp_path, catalog, text, config=config) == []

    def test_suppression_comment_in_notebook(self, tmp_path, catalog):
        doc = {
            "cells": [
                {"cell_type": "code", "source": "import torch"},
                {
                    "cell_type": "code",
                    "source": "weights = torch.randn(9, 9)  # leaklint: ignore[PT-12]",
                },
            ],
            "nbformat": 4,
        }
        path = tmp_path / "nb.ipynb"
        path.write_text(json.dumps(doc), encoding="utf-8")
        result = analyze_file(load_source(str(path)), catalog, LintConfig())
        assert result == []


class TestAnalyzeFile:
    def test_findings_are_sorted_by_position_then_rule(self, tmp_path, catalog):
        findings = run_file(
            tmp_path,
            catalog,
            """
            import itertools

            import torch

            def train(model, optimizer, loader):
                for batch in itertools.cycle(loader):
                    loss = model(batch).sum()
                    loss.backward()
                    optimizer.step()
            """,
        )
        keys = [(f.path, f.span.start_line, f.span.start_col, f.rule_id) for f in findings]
        assert keys == sorted(keys)
        ids = [f.rule_id for f in findings]
        assert ids == ["PT-03", "PT-10", "PT-04"]

    def test_syntax_error_becomes_file_error(self, tmp_path, catalog):
        path = tmp_path / "broken.py"
        path.write_text("def f(:\n", encoding="utf-8")
        result = analyze_file(load_source(str(path)), catalog, LintConfig())
        assert isinstance(result, FileError)
        assert result.span is not None

    def test_config_framework_gates_sides(self, tmp_path, catalog):
        text = """
        import tensorflow as tf
        import torch

        def attach(module, fn):
            module.register_forward_hook(fn)

        sess = tf.compat.v1.Session()
        out = sess.run(tf.constant(1))
        """
        torch_only = run_file(
            tmp_path, catalog, text, config=LintConfig(framework="pytorch")
        )
        assert {f.rule_id for f in torch_only} == {"PT-07"}
        tf_only = run_file(
            tmp_path, catalog, text, config=LintConfig(framework="tensorflow")
        )
        assert {f.rule_id for f in tf_only} == {"TK-07"}


class TestAnalyzePaths:
    def setup_tree(self, tmp_path):
        (tmp_path / "pkg").mkdir()
        (tmp_path / "pkg" / "a.py").write_text(HOOK_SNIPPET, encoding="utf-8")
        (tmp_path / "pkg" / "b.py").write_text("import torch\n", encoding="utf-8")
        (tmp_path / "pkg" / ".hidden").mkdir()
        (tmp_path / "pkg" / ".hidden" / "c.py").write_text(
            HOOK_SNIPPET, encoding="utf-8"
        )
        (tmp_path / "pkg" / "notes.txt").write_text("not python", encoding="utf-8")
        return tmp_path / "pkg"

    def test_directory_walk_filters_hidden_and_non_python(self, tmp_path, catalog):
        root = self.setup_tree(tmp_path)
        findings, errors = analyze_paths([str(root)], catalog, LintConfig())
        assert errors == []
        assert [f.rule_id for f in findings] == ["PT-07"]
        assert findings[0].path.endswith("a.py")

    def test_missing_path_is_a_file_error(self, tmp_path, catalog):
        findings, errors = analyze_paths(
            [str(tmp_path / "nope.py")], catalog, LintConfig()
        )
        assert findings == []
        assert len(errors) == 1
        assert "no such file" in errors[0].message

    def test_broken_file_does_not_stop_the_run(self, tmp_path, catalog):
        good = tmp_path / "good.py"
        good.write_text(HOOK_SNIPPET, encoding="utf-8")
        bad = tmp_path / "bad.py"
        bad.write_text("def broken(:\n", encoding="utf-8")
        findings, errors = analyze_paths(
            [str(good), str(bad)], catalog, LintConfig()
        )
        assert [f.rule_id for f in findings] == ["PT-07"]
        assert [e.path for e in errors] == [str(bad)]

    def test_parallel_matches_sequential(self, catalog):
        corpus = str((__import__("pathlib").Path(__file__).parent.parent / "corpus"))
        config = LintConfig(enable=("PT-22", "TK-14"))
        seq = analyze_paths([corpus], catalog, config, workers=1)
        par = analyze_paths([corpus], catalog, config, workers=4)
        assert seq == par

    def test_duplicate_inputs_are_deduped(self, tmp_path, catalog):
        path = tmp_path / "a.py"
        path.write_text(HOOK_SNIPPET, encoding="utf-8")
        findings, errors = analyze_paths(
            [str(path), str(path), str(tmp_path)], catalog, LintConfig()
        )
        assert errors == []
        assert [f.rule_id for f in findings] == ["PT-07"]
