"""Source loading, parsing, and import-alias resolution.

Scripts are read as-is. Notebooks are flattened to one virtual module:
code cells joined by single newlines, with a cell-span table mapping
flattened lines back to cell indexes. Spans carry 1-based line/column
positions plus character offsets that slice the unit text exactly.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass
from typing import Iterator, NamedTuple

SCRIPT = "script"
NOTEBOOK = "notebook"

_MAGIC_CHARS = ("%", "!")


class FrontendError(Exception):
    """Base class for source loading and parsing failures."""


class IoError(FrontendError):
    """A source file could not be read or decoded."""


class MalformedNotebook(FrontendError):
    """A notebook is not valid JSON or lacks a usable cell list."""


@dataclass(frozen=True)
class Span:
    """Source region: 1-based line/column endpoints, character offsets."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int
    start_offset: int
    end_offset: int

    def contains(self, other: "Span") -> bool:
        return self.start_offset <= other.start_offset and other.end_offset <= self.end_offset


class ParseError(FrontendError):
    """Source text that does not parse under the configured grammar."""

    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.span = span


class CellSpan(NamedTuple):
    """Line range occupied by one notebook code cell in the flattened text."""

    index: int
    start_line: int
    end_line: int


@dataclass(frozen=True)
class SourceUnit:
    """One analyzable unit: a script or a flattened notebook."""

    path: str
    kind: str
    text: str
    cell_spans: tuple[CellSpan, ...] = ()

    def cell_of_line(self, line: int) -> CellSpan | None:
        for span in self.cell_spans:
            if span.start_line <= line <= span.end_line:
                return span
        return None


def _neutralize_magics(cell_text: str) -> str:
    """Turn IPython magic and shell-escape lines into comments.

    The replacement swaps one character, so line and column positions in
    the flattened text are unchanged.
    """
    lines = cell_text.split("\n")
    out = []
    for line in lines:
        stripped = line.lstrip()
        if stripped.startswith(_MAGIC_CHARS):
            cut = len(line) - len(stripped)
            line = line[:cut] + "#" + line[cut + 1 :]
        out.append(line)
    return "\n".join(out)


def _flatten_notebook(path: str, raw: str) -> SourceUnit:
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedNotebook(f"{path}: not valid notebook JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("cells"), list):
        raise MalformedNotebook(f"{path}: notebook JSON has no cell list")

    texts: list[str] = []
    spans: list[CellSpan] = []
    next_line = 1
    for index, cell in enumerate(doc["cells"]):
        if not isinstance(cell, dict) or cell.get("cell_type") != "code":
            continue
        source = cell.get("source", "")
        if isinstance(source, list):
            cell_text = "".join(str(part) for part in source)
        else:
            cell_text = str(source)
        cell_text = _neutralize_magics(cell_text.rstrip("\n"))
        n_lines = cell_text.count("\n") + 1
        texts.append(cell_text)
        spans.append(CellSpan(index, next_line, next_line + n_lines - 1))
        next_line += n_lines
    return SourceUnit(path=path, kind=NOTEBOOK, text="\n".join(texts), cell_spans=tuple(spans))


def load_source(path: str) -> SourceUnit:
    """Read a .py or .ipynb file into a SourceUnit."""
    try:
        with open(path, "rb") as handle:
            raw = handle.read().decode("utf-8")
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise IoError(f"{path}: not valid UTF-8: {exc}") from exc
    if str(path).endswith(".ipynb"):
        return _flatten_notebook(str(path), raw)
    return SourceUnit(path=str(path), kind=SCRIPT, text=raw)


class _LineIndex:
    """Maps (line, ast byte column) positions to character columns/offsets."""

    def __init__(self, text: str):
        self.lines = text.split("\n")
        starts = [0]
        for line in self.lines[:-1]:
            starts.append(starts[-1] + len(line) + 1)
        self.line_starts = starts
        self.text_len = len(text)

    def char_col(self, line: int, byte_col: int) -> int:
        """0-based character column for a 0-based utf-8 byte column."""
        src = self.lines[line - 1]
        if src.isascii():
            return byte_col
        return len(src.encode("utf-8")[:byte_col].decode("utf-8"))

    def offset(self, line: int, char_col: int) -> int:
        return self.line_starts[line - 1] + char_col


@dataclass(frozen=True)
class SyntaxTree:
    """Parsed module plus span bookkeeping for its source unit."""

    unit: SourceUnit
    root: ast.Module
    _index: _LineIndex

    def span_of(self, node: ast.AST) -> Span:
        if node is self.root:
            n_lines = len(self._index.lines)
            return Span(1, 1, n_lines, len(self._index.lines[-1]) + 1, 0, self._index.text_len)
        start_col = self._index.char_col(node.lineno, node.col_offset)
        end_line = node.end_lineno if node.end_lineno is not None else node.lineno
        end_byte = node.end_col_offset if node.end_col_offset is not None else node.col_offset
        end_col = self._index.char_col(end_line, end_byte)
        return Span(
            start_line=node.lineno,
            start_col=start_col + 1,
            end_line=end_line,
            end_col=end_col + 1,
            start_offset=self._index.offset(node.lineno, start_col),
            end_offset=self._index.offset(end_line, end_col),
        )

    def source_of(self, node: ast.AST) -> str:
        span = self.span_of(node)
        return self.unit.text[span.start_offset : span.end_offset]

    def walk(self) -> Iterator[ast.AST]:
        return ast.walk(self.root)


def parse_source(unit: SourceUnit, grammar_version: tuple[int, int] | None = None) -> SyntaxTree:
    """Parse a unit under the given grammar, raising ParseError on failure."""
    try:
        root = ast.parse(unit.text, filename=unit.path, feature_version=grammar_version)
    except SyntaxError as exc:
        line = exc.lineno or 1
        col = exc.offset or 1
        end_line = getattr(exc, "end_lineno", None) or line
        end_col = getattr(exc, "end_offset", None) or col
        index = _LineIndex(unit.text)
        line = min(line, len(index.lines))
        end_line = min(end_line, len(index.lines))
        span = Span(
            line,
            col,
            end_line,
            max(end_col, col),
            index.offset(line, min(col - 1, len(index.lines[line - 1]))),
            index.offset(end_line, min(max(end_col, col) - 1, len(index.lines[end_line - 1]))),
        )
        raise ParseError(f"{unit.path}:{line}:{col}: {exc.msg}", span) from exc
    return SyntaxTree(unit=unit, root=root, _index=_LineIndex(unit.text))


class _Binding(NamedTuple):
    position: tuple[int, int]
    local: str
    canonical: str


@dataclass(frozen=True)
class AliasMap:
    """Import bindings from local names to canonical dotted names.

    `bindings` holds the last binding of each local name. Position-aware
    lookups resolve shadowing: the latest binding at or before a use wins.
    Star imports are recorded as wildcard modules; an unbound name may
    then resolve through the most recent wildcard module.
    """

    bindings: dict[str, str]
    wildcard_modules: tuple[str, ...]
    timeline: tuple[_Binding, ...]
    wildcard_timeline: tuple[tuple[tuple[int, int], str], ...]

    def resolve(self, name: str, position: tuple[int, int] | None = None) -> str | None:
        if position is None:
            return self.bindings.get(name)
        best: str | None = None
        for entry in self.timeline:
            if entry.local == name and entry.position <= position:
                best = entry.canonical
        return best

    def wildcard_for(self, position: tuple[int, int] | None = None) -> str | None:
        if not self.wildcard_timeline:
            return None
        if position is None:
            return self.wildcard_timeline[-1][1]
        best: str | None = None
        for pos, module in self.wildcard_timeline:
            if pos <= position:
                best = module
        return best


def build_alias_map(tree: SyntaxTree) -> AliasMap:
    """Collect import bindings in source order across the whole unit."""
    timeline: list[_Binding] = []
    wildcards: list[tuple[tuple[int, int], str]] = []
    for node in tree.walk():
        if isinstance(node, ast.Import):
            position = (node.lineno, node.col_offset)
            for alias in node.names:
                if alias.asname:
                    timeline.append(_Binding(position, alias.asname, alias.name))
                else:
                    head = alias.name.split(".")[0]
                    timeline.append(_Binding(position, head, head))
        elif isinstance(node, ast.ImportFrom):
            position = (node.lineno, node.col_offset)
            module = ("." * node.level) + (node.module or "")
            for alias in node.names:
                if alias.name == "*":
                    wildcards.append((position, module))
                    continue
                local = alias.asname or alias.name
                canonical = f"{module}.{alias.name}" if module else alias.name
                timeline.append(_Binding(position, local, canonical))
    timeline.sort(key=lambda entry: entry.position)
    wildcards.sort(key=lambda entry: entry[0])
    bindings = {entry.local: entry.canonical for entry in timeline}
    return AliasMap(
        bindings=bindings,
        wildcard_modules=tuple(module for _, module in wildcards),
        timeline=tuple(timeline),
        wildcard_timeline=tuple(wildcards),
    )


def dotted_segments(expr: ast.AST) -> list[str] | None:
    """Flatten a Name/Attribute chain to segments, or None if not dotted."""
    if isinstance(expr, ast.Call):
        return dotted_segments(expr.func)
    parts: list[str] = []
    node = expr
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if not isinstance(node, ast.Name):
        return None
    parts.append(node.id)
    parts.reverse()
    return parts


def dotted_text(expr: ast.AST) -> str | None:
    segments = dotted_segments(expr)
    return ".".join(segments) if segments else None


def qualify(expr: ast.AST, aliases: AliasMap) -> str | None:
    """Resolve a dotted expression to its canonical name, or None if unbound.

    The leftmost segment goes through the alias map; trailing segments are
    kept verbatim. Unbound heads fall back to the nearest preceding star
    import when one exists.
    """
    segments = dotted_segments(expr)
    if not segments:
        return None
    position = None
    if hasattr(expr, "lineno"):
        position = (expr.lineno, expr.col_offset)
    head = aliases.resolve(segments[0], position)
    if head is None:
        module = aliases.wildcard_for(position)
        if module is None:
            return None
        head = f"{module}.{segments[0]}"
    return ".".join([head] + segments[1:])
