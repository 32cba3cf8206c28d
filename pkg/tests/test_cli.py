"""Command-line behavior: subcommands, exit codes, config layering."""

from __future__ import annotations

import json
import textwrap
from pathlib import Path

import pytest

from leaklint import main

CLEAN = "import torch\n\n\ndef helper(x):\n    return x\n"

HOOKY = """\
import torch

def attach(module, fn):
    module.register_forward_hook(fn)
"""

LOW_CONFIDENCE = """\
import tensorflow as tf

a = tf.ones((4, 4))
for step in range(100):
    a = tf.matmul(a, a)
"""


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    monkeypatch.delenv("LEAKLINT_CONFIG", raising=False)
    monkeypatch.delenv("NO_COLOR", raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def run_cli(capsys, monkeypatch):
    def run(*argv, env=None, cwd=None):
        if cwd is not None:
            monkeypatch.chdir(cwd)
        for key, value in (env or {}).items():
            monkeypatch.setenv(key, value)
        code = main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(textwrap.dedent(text), encoding="utf-8")
        return str(path)

    return _write


class TestCheck:
    def test_clean_file_exits_zero(self, run_cli, write):
        code, out, err = run_cli("check", write("clean.py", CLEAN))
        assert code == 0
        assert "0 findings" in out
        assert err == ""

    def test_findings_exit_one(self, run_cli, write):
        code, out, _ = run_cli("check", write("hooky.py", HOOKY))
        assert code == 1
        assert "PT-07" in out
        assert "hooky.py:4:5" in out

    def test_missing_input_exits_one_with_stderr(self, run_cli, tmp_path):
        code, out, err = run_cli("check", str(tmp_path / "absent.py"))
        assert code == 1
        assert "absent.py" in err
        assert "no such file" in err

    def test_json_format(self, run_cli, write):
        code, out, _ = run_cli("check", write("hooky.py", HOOKY), "--format", "json")
        assert code == 1
        doc = json.loads(out)
        assert doc["findings"][0]["rule_id"] == "PT-07"

    def test_sarif_format(self, run_cli, write):
        code, out, _ = run_cli("check", write("hooky.py", HOOKY), "--format", "sarif")
        assert code == 1
        doc = json.loads(out)
        assert doc["version"] == "2.1.0"
        assert len(doc["runs"][0]["tool"]["driver"]["rules"]) == 46

    def test_no_ansi_when_not_a_tty(self, run_cli, write):
        _, out, _ = run_cli("check", write("hooky.py", HOOKY))
        assert "\x1b[" not in out

    def test_ignore_rule_id(self, run_cli, write):
        code, out, _ = run_cli("check", write("hooky.py", HOOKY), "--ignore", "PT-07")
        assert code == 0
        assert "0 findings" in out

    def test_select_category_name_case_insensitive(self, run_cli, write):
        path = write("hooky.py", HOOKY)
        code, out, _ = run_cli("check", path, "--select", "resourcemanagement")
        assert code == 1
        assert "PT-07" in out
        code, out, _ = run_cli("check", path, "--select", "LoopLifecycle")
        assert code == 0

    def test_select_tag_token(self, run_cli, write):
        path = write("hooky.py", HOOKY)
        code, out, _ = run_cli("check", path, "--select", "G")
        assert code == 1
        code, out, _ = run_cli("check", path, "--select", "P")
        assert code == 0

    def test_unknown_select_token_exits_two(self, run_cli, write):
        code, _, err = run_cli("check", write("c.py", CLEAN), "--select", "bogus")
        assert code == 2
        assert "bogus" in err

    def test_min_confidence_filter(self, run_cli, write):
        path = write("low.py", LOW_CONFIDENCE)
        code, out, _ = run_cli("check", path)
        assert code == 1
        assert "TK-06" in out
        code, out, _ = run_cli("check", path, "--min-confidence", "medium")
        assert code == 0

    def test_framework_flag_gates_sides(self, run_cli, write):
        path = write("low.py", LOW_CONFIDENCE)
        code, _, _ = run_cli("check", path, "--framework", "pytorch")
        assert code == 0
        code, _, _ = run_cli("check", path, "--framework", "tensorflow")
        assert code == 1

    def test_enable_and_threshold_flags(self, run_cli, write):
        path = write(
            "big.py",
            """\
            import torch
            from torch.utils.data import DataLoader

            loader = DataLoader([], batch_size=512)
            """,
        )
        code, _, _ = run_cli("check", path, "--enable", "PT-22")
        assert code == 0
        code, out, _ = run_cli(
            "check", path, "--enable", "PT-22",
            "--threshold", "batch_size_threshold=256",
        )
        assert code == 1
        assert "PT-22" in out

    def test_malformed_threshold_exits_two(self, run_cli, write):
        code, _, err = run_cli(
            "check", write("c.py", CLEAN), "--threshold", "batch_size_threshold=big"
        )
        assert code == 2
        assert "threshold" in err

    def test_directory_input(self, run_cli, write, tmp_path):
        write("proj/a.py", HOOKY)
        write("proj/b.py", CLEAN)
        code, out, _ = run_cli("check", str(tmp_path / "proj"))
        assert code == 1
        assert "a.py" in out


class TestConfigFile:
    def test_discovered_upward_from_cwd(self, run_cli, write, tmp_path):
        write(".leaklint.json", json.dumps({"ignore": ["PT-07"]}))
        path = write("sub/hooky.py", HOOKY)
        code, out, _ = run_cli("check", path, cwd=tmp_path / "sub")
        assert code == 0
        assert "0 findings" in out

    def test_env_variable_points_at_config(self, run_cli, write, tmp_path):
        config = write("elsewhere/cfg.json", json.dumps({"ignore": ["PT-07"]}))
        path = write("hooky.py", HOOKY)
        code, _, _ = run_cli("check", path, env={"LEAKLINT_CONFIG": config})
        assert code == 0

    def test_explicit_config_flag(self, run_cli, write):
        config = write("cfg.json", json.dumps({"ignore": ["PT-07"]}))
        path = write("hooky.py", HOOKY)
        code, _, _ = run_cli("check", path, "--config", config)
        assert code == 0

    def test_flags_override_file_values(self, run_cli, write):
        config = write("cfg.json", json.dumps({"min_confidence": "medium"}))
        path = write("low.py", LOW_CONFIDENCE)
        code, _, _ = run_cli("check", path, "--config", config)
        assert code == 0
        code, out, _ = run_cli(
            "check", path, "--config", config, "--min-confidence", "low"
        )
        assert code == 1
        assert "TK-06" in out

    def test_select_ignore_conflict_exits_two(self, run_cli, write):
        config = write(
            "cfg.json", json.dumps({"select": ["PT-07"], "ignore": ["PT-07"]})
        )
        code, _, err = run_cli("check", write("c.py", CLEAN), "--config", config)
        assert code == 2
        assert "error:" in err

    def test_unknown_config_key_exits_two(self, run_cli, write):
        config = write("cfg.json", json.dumps({"rules": ["PT-07"]}))
        code, _, err = run_cli("check", write("c.py", CLEAN), "--config", config)
        assert code == 2

    def test_invalid_json_config_exits_two(self, run_cli, write):
        config = write("cfg.json", "{oops")
        code, _, err = run_cli("check", write("c.py", CLEAN), "--config", config)
        assert code == 2

    def test_missing_explicit_config_exits_two(self, run_cli, write, tmp_path):
        code, _, err = run_cli(
            "check", write("c.py", CLEAN), "--config", str(tmp_path / "nope.json")
        )
        assert code == 2


class TestExplain:
    def test_known_rule(self, run_cli):
        code, out, _ = run_cli("explain", "PT-02")
        assert code == 0
        assert "Clear Graph" in out

    def test_unknown_rule_exits_two(self, run_cli):
        code, _, err = run_cli("explain", "PT-99")
        assert code == 2
        assert "PT-99" in err


class TestListRules:
    def test_lists_all_rules_with_default_off_markers(self, run_cli):
        code, out, _ = run_cli("list-rules")
        assert code == 0
        lines = [line for line in out.splitlines() if line.strip()]
        rule_lines = [l for l in lines if l.lstrip().startswith(("PT-", "TK-"))]
        assert len(rule_lines) == 46
        assert any("PT-22" in l and "default off" in l for l in rule_lines)
        assert any("TK-14" in l and "default off" in l for l in rule_lines)


class TestStats:
    def test_table_on_stdout(self, run_cli):
        code, out, _ = run_cli("stats", "--side", "pytorch")
        assert code == 0
        assert "ResourceManagement" in out
        assert "53%" in out

    def test_report_dir_writes_artifacts(self, run_cli, tmp_path):
        report_dir = tmp_path / "report"
        code, out, _ = run_cli(
            "stats", "--side", "keras", "--report-dir", str(report_dir)
        )
        assert code == 0
        csv_path = report_dir / "keras_category_distribution.csv"
        png_path = report_dir / "keras_category_distribution.png"
        assert csv_path.exists()
        assert png_path.exists()

    def test_unknown_side_exits_two(self, run_cli):
        code, _, _ = run_cli("stats", "--side", "mxnet")
        assert code == 2


class TestCorpus:
    def test_shipped_corpus_passes(self, run_cli):
        corpus = Path(__file__).resolve().parent.parent / "corpus"
        code, out, _ = run_cli("corpus", str(corpus))
        assert code == 0
        assert "PASS" in out


class TestUsage:
    def test_no_arguments_exits_two(self, run_cli):
        code, _, err = run_cli()
        assert code == 2

    def test_unknown_subcommand_exits_two(self, run_cli):
        code, _, _ = run_cli("frobnicate")
        assert code == 2
