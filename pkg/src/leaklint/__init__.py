"""leaklint: a static linter for resource-leak smells in ML code.

Detects 46 leak-prone coding patterns across PyTorch, TensorFlow, and
Keras sources (scripts and notebooks), labels each finding with a
root-cause category and a framework-specificity tag, and pairs it with
matching best-practice remediations.
"""

from __future__ import annotations

from ._model import FileError, Finding
from .catalog import (
    BestPractice,
    Catalog,
    CatalogError,
    CatalogInvalid,
    Category,
    Confidence,
    EmptyInput,
    FrameworkTag,
    LengthMismatch,
    RuleSpec,
    UnknownRule,
    category_distribution,
    cohen_kappa,
    explain,
    load_catalog,
    observed_agreement,
)
from .cli import main
from .engine import ConfigInvalid, LintConfig, analyze_file, analyze_paths, enabled_rule_ids
from .frontend import (
    FrontendError,
    IoError,
    MalformedNotebook,
    ParseError,
    SourceUnit,
    Span,
    load_source,
    parse_source,
)
from .harness import CorpusReport, Expectation, UnknownExpectedRule, parse_expectations, run_corpus
from .output import (
    Report,
    build_report,
    render_json,
    render_sarif,
    render_stats,
    render_text,
    write_stats_outputs,
)

__version__ = "0.1.0"

__all__ = [
    "BestPractice",
    "Catalog",
    "CatalogError",
    "CatalogInvalid",
    "Category",
    "Confidence",
    "ConfigInvalid",
    "CorpusReport",
    "EmptyInput",
    "Expectation",
    "FileError",
    "Finding",
    "FrameworkTag",
    "FrontendError",
    "IoError",
    "LengthMismatch",
    "LintConfig",
    "MalformedNotebook",
    "ParseError",
    "Report",
    "RuleSpec",
    "SourceUnit",
    "Span",
    "UnknownExpectedRule",
    "UnknownRule",
    "analyze_file",
    "analyze_paths",
    "build_report",
    "category_distribution",
    "cohen_kappa",
    "enabled_rule_ids",
    "explain",
    "load_catalog",
    "load_source",
    "main",
    "observed_agreement",
    "parse_expectations",
    "parse_source",
    "render_json",
    "render_sarif",
    "render_stats",
    "render_text",
    "run_corpus",
    "write_stats_outputs",
    "__version__",
]
