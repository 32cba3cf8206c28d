"""Finding and file-error records shared by the rule checkers and the engine."""

from __future__ import annotations

import ast
from dataclasses import dataclass

from .catalog import RuleSpec, practice_names
from .facts import FileFacts
from .frontend import NOTEBOOK, Span


@dataclass(frozen=True)
class Finding:
    """One reported smell occurrence.

    line/column are cell-relative when cell is set (notebook units) and
    absolute otherwise; span always holds flattened-unit coordinates.
    """

    rule_id: str
    name: str
    path: str
    span: Span
    cell: int | None
    line: int
    column: int
    end_line: int
    end_column: int
    message: str
    category: str
    tag: str
    confidence: str
    practice_ids: tuple[str, ...]
    suggestion: str

    def sort_key(self) -> tuple:
        return (self.path, self.span.start_line, self.span.start_col, self.rule_id)


@dataclass(frozen=True)
class FileError:
    """A file that could not be read, decoded, or parsed."""

    path: str
    message: str
    span: Span | None = None


def _display_coordinates(facts: FileFacts, span: Span) -> tuple[int | None, int, int, int, int]:
    unit = facts.tree.unit
    if unit.kind != NOTEBOOK:
        return None, span.start_line, span.start_col, span.end_line, span.end_col
    cell = unit.cell_of_line(span.start_line)
    if cell is None:
        return None, span.start_line, span.start_col, span.end_line, span.end_col
    offset = cell.start_line - 1
    return (
        cell.index,
        span.start_line - offset,
        span.start_col,
        max(span.end_line - offset, 1),
        span.end_col,
    )


def make_finding(
    rule: RuleSpec,
    facts: FileFacts,
    node: ast.AST,
    message: str | None = None,
) -> Finding:
    span = facts.tree.span_of(node)
    cell, line, column, end_line, end_column = _display_coordinates(facts, span)
    return Finding(
        rule_id=rule.id,
        name=rule.name,
        path=facts.unit_path,
        span=span,
        cell=cell,
        line=line,
        column=column,
        end_line=end_line,
        end_column=end_column,
        message=message if message is not None else rule.message,
        category=rule.category.value,
        tag=rule.tag.value,
        confidence=rule.confidence.value,
        practice_ids=tuple(rule.practices),
        suggestion=practice_names(rule.practices),
    )
