"""Per-file semantic facts extracted in one traversal.

Rules never walk raw syntax themselves: they query these indexes of
loops, functions, classes, calls, assignments, deletes, and with-blocks,
each annotated with its enclosing contexts. Comprehensions are not
loops. Framework detection comes from import roots only.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field, replace

from .frontend import AliasMap, Span, SyntaxTree, dotted_text, qualify

PYTORCH = "pytorch"
TENSORFLOW = "tensorflow"
KERAS = "keras"
SKLEARN = "sklearn"

FORWARD_METHOD = "forward_method"
AUTOGRAD_FORWARD = "autograd_forward"
AUTOGRAD_BACKWARD = "autograd_backward"
INFERENCE = "inference"
TRAINING = "training"
PLAIN = "plain"

_INFERENCE_WORDS = frozenset({"predict", "infer", "inference", "eval", "evaluate", "test", "validate"})
_GRAD_DISABLED_QNAMES = frozenset({"torch.no_grad", "torch.inference_mode"})


@dataclass(frozen=True)
class Context:
    """Lexical position of a fact: innermost function/class, loop and with stacks."""

    function_index: int | None = None
    class_index: int | None = None
    loop_indexes: tuple[int, ...] = ()
    with_indexes: tuple[int, ...] = ()

    @property
    def in_loop(self) -> bool:
        return bool(self.loop_indexes)


@dataclass(frozen=True)
class LoopInfo:
    node: ast.For | ast.While | ast.AsyncFor
    kind: str
    span: Span
    body_span: Span
    context: Context
    is_training: bool = False
    is_unbounded: bool = False


@dataclass(frozen=True)
class FunctionInfo:
    node: ast.FunctionDef | ast.AsyncFunctionDef
    name: str
    span: Span
    context: Context
    class_index: int | None
    decorator_qnames: tuple[str, ...]
    params: tuple[str, ...]
    kind: str = PLAIN


@dataclass(frozen=True)
class ClassInfo:
    node: ast.ClassDef
    name: str
    span: Span
    context: Context
    base_names: tuple[str, ...]
    is_module_subclass: bool = False
    is_autograd_function: bool = False


@dataclass(frozen=True)
class CallInfo:
    node: ast.Call
    span: Span
    context: Context
    callee_text: str | None
    qname: str | None
    final_segment: str | None
    receiver_text: str | None
    receiver_qname: str | None
    keywords: dict[str, ast.expr] = field(default_factory=dict)


@dataclass(frozen=True)
class AssignInfo:
    node: ast.Assign | ast.AugAssign | ast.AnnAssign
    span: Span
    context: Context
    kind: str
    targets: tuple[ast.expr, ...]
    value: ast.expr | None
    target_names: tuple[str, ...]
    target_texts: tuple[str, ...]


@dataclass(frozen=True)
class DeleteInfo:
    node: ast.Delete
    span: Span
    context: Context
    target_texts: tuple[str, ...]


@dataclass(frozen=True)
class WithInfo:
    node: ast.With | ast.AsyncWith
    span: Span
    body_span: Span
    context: Context
    item_qnames: tuple[str | None, ...]
    item_texts: tuple[str | None, ...]


@dataclass(frozen=True)
class FileFacts:
    """All semantic facts for one source unit."""

    unit_path: str
    unit_kind: str
    tree: SyntaxTree
    aliases: AliasMap
    frameworks: frozenset[str]
    loops: tuple[LoopInfo, ...]
    functions: tuple[FunctionInfo, ...]
    classes: tuple[ClassInfo, ...]
    calls: tuple[CallInfo, ...]
    assignments: tuple[AssignInfo, ...]
    deletes: tuple[DeleteInfo, ...]
    with_blocks: tuple[WithInfo, ...]
    grad_disabled_spans: tuple[Span, ...]

    def qname(self, expr: ast.AST) -> str | None:
        return qualify(expr, self.aliases)

    def calls_in_span(self, span: Span) -> list[CallInfo]:
        return [call for call in self.calls if span.contains(call.span)]

    def calls_in_loop(self, loop_index: int) -> list[CallInfo]:
        return [call for call in self.calls if loop_index in call.context.loop_indexes]

    def assignments_in_loop(self, loop_index: int) -> list[AssignInfo]:
        return [a for a in self.assignments if loop_index in a.context.loop_indexes]

    def deletes_in_loop(self, loop_index: int) -> list[DeleteInfo]:
        return [d for d in self.deletes if loop_index in d.context.loop_indexes]

    def bound_call_qnames(self, function_index: int | None) -> dict[str, str]:
        """Plain names assigned from a call in one scope, name to callee qname."""
        out: dict[str, str] = {}
        for info in self.assignments:
            if info.context.function_index != function_index:
                continue
            if not isinstance(info.value, ast.Call):
                continue
            qname = self.qname(info.value.func)
            if qname is None:
                continue
            for name in info.target_names:
                out[name] = qname
        return out


def match_words(name: str, words: frozenset[str]) -> bool:
    """True when any identifier word, split on non-alphanumerics, is in words."""
    return any(piece in words for piece in re.split(r"[^a-z0-9]+", name.lower()) if piece)


def is_backward_call(call: CallInfo) -> bool:
    return call.final_segment == "backward"


def is_optimizer_step(call: CallInfo) -> bool:
    if call.final_segment != "step":
        return False
    receiver = call.receiver_text or ""
    if "optim" in receiver.lower():
        return True
    return bool(call.receiver_qname and call.receiver_qname.startswith("torch.optim"))


def grad_disabled(node: ast.AST, facts: FileFacts) -> bool:
    """True when node sits in a no-grad with-block or no-grad-decorated function."""
    span = facts.tree.span_of(node)
    return any(region.contains(span) for region in facts.grad_disabled_spans)


def classify_function(info: FunctionInfo, facts: FileFacts) -> str:
    """Assign exactly one function kind from name, class bases, and body calls."""
    cls = facts.classes[info.class_index] if info.class_index is not None else None
    if cls is not None and cls.is_autograd_function and info.name == "forward":
        return AUTOGRAD_FORWARD
    if cls is not None and cls.is_autograd_function and info.name == "backward":
        return AUTOGRAD_BACKWARD
    if cls is not None and cls.is_module_subclass and info.name == "forward":
        return FORWARD_METHOD
    body_calls = facts.calls_in_span(info.span)
    has_backward = any(is_backward_call(call) for call in body_calls)
    if match_words(info.name, _INFERENCE_WORDS) and not has_backward:
        return INFERENCE
    if has_backward or any(is_optimizer_step(call) for call in body_calls):
        return TRAINING
    return PLAIN


def _plain_target_names(target: ast.expr) -> list[str]:
    if isinstance(target, ast.Name):
        return [target.id]
    if isinstance(target, (ast.Tuple, ast.List)):
        names: list[str] = []
        for element in target.elts:
            names.extend(_plain_target_names(element))
        return names
    if isinstance(target, ast.Starred):
        return _plain_target_names(target.value)
    return []


class _Collector(ast.NodeVisitor):
    def __init__(self, tree: SyntaxTree, aliases: AliasMap):
        self.tree = tree
        self.aliases = aliases
        self.loops: list[dict] = []
        self.functions: list[dict] = []
        self.classes: list[dict] = []
        self.calls: list[CallInfo] = []
        self.assignments: list[AssignInfo] = []
        self.deletes: list[DeleteInfo] = []
        self.withs: list[WithInfo] = []
        self._loop_stack: list[int] = []
        self._func_stack: list[int] = []
        self._class_stack: list[int] = []
        self._with_stack: list[int] = []

    def _context(self) -> Context:
        return Context(
            function_index=self._func_stack[-1] if self._func_stack else None,
            class_index=self._class_stack[-1] if self._class_stack else None,
            loop_indexes=tuple(self._loop_stack),
            with_indexes=tuple(self._with_stack),
        )

    def _block_span(self, body: list[ast.stmt], orelse: list[ast.stmt]) -> Span:
        first = self.tree.span_of(body[0])
        last_stmt = orelse[-1] if orelse else body[-1]
        last = self.tree.span_of(last_stmt)
        return Span(
            first.start_line, first.start_col, last.end_line, last.end_col,
            first.start_offset, last.end_offset,
        )

    def _visit_loop(self, node: ast.For | ast.While | ast.AsyncFor, kind: str) -> None:
        index = len(self.loops)
        self.loops.append(
            {
                "node": node,
                "kind": kind,
                "span": self.tree.span_of(node),
                "body_span": self._block_span(node.body, node.orelse),
                "context": self._context(),
            }
        )
        if isinstance(node, (ast.For, ast.AsyncFor)):
            self.visit(node.target)
            self.visit(node.iter)
            self._loop_stack.append(index)
        else:
            self._loop_stack.append(index)
            self.visit(node.test)
        for stmt in node.body + node.orelse:
            self.visit(stmt)
        self._loop_stack.pop()

    def visit_For(self, node: ast.For) -> None:
        self._visit_loop(node, "for")

    def visit_AsyncFor(self, node: ast.AsyncFor) -> None:
        self._visit_loop(node, "for")

    def visit_While(self, node: ast.While) -> None:
        self._visit_loop(node, "while")

    def _visit_function(self, node: ast.FunctionDef | ast.AsyncFunctionDef) -> None:
        for decorator in node.decorator_list:
            self.visit(decorator)
        index = len(self.functions)
        args = node.args
        params = [arg.arg for arg in args.posonlyargs + args.args + args.kwonlyargs]
        if args.vararg:
            params.append(args.vararg.arg)
        if args.kwarg:
            params.append(args.kwarg.arg)
        decorators = tuple(
            qualify(d, self.aliases) or dotted_text(d) or "" for d in node.decorator_list
        )
        self.functions.append(
            {
                "node": node,
                "name": node.name,
                "span": self.tree.span_of(node),
                "context": self._context(),
                "class_index": self._class_stack[-1] if self._class_stack else None,
                "decorator_qnames": decorators,
                "params": tuple(params),
            }
        )
        for default in args.defaults + [d for d in args.kw_defaults if d is not None]:
            self.visit(default)
        self._func_stack.append(index)
        for stmt in node.body:
            self.visit(stmt)
        self._func_stack.pop()

    def visit_FunctionDef(self, node: ast.FunctionDef) -> None:
        self._visit_function(node)

    def visit_AsyncFunctionDef(self, node: ast.AsyncFunctionDef) -> None:
        self._visit_function(node)

    def visit_ClassDef(self, node: ast.ClassDef) -> None:
        for decorator in node.decorator_list:
            self.visit(decorator)
        base_names = []
        for base in node.bases:
            base_names.append(qualify(base, self.aliases) or dotted_text(base) or "")
        index = len(self.classes)
        self.classes.append(
            {
                "node": node,
                "name": node.name,
                "span": self.tree.span_of(node),
                "context": self._context(),
                "base_names": tuple(base_names),
            }
        )
        for base in node.bases + node.keywords:
            self.visit(base)
        self._class_stack.append(index)
        for stmt in node.body:
            self.visit(stmt)
        self._class_stack.pop()

    def visit_Call(self, node: ast.Call) -> None:
        callee_text = dotted_text(node.func)
        final = callee_text.rsplit(".", 1)[-1] if callee_text else None
        receiver_text = None
        receiver_qname = None
        if isinstance(node.func, ast.Attribute):
            receiver_text = dotted_text(node.func.value)
            if receiver_text is not None:
                receiver_qname = qualify(node.func.value, self.aliases)
        keywords = {kw.arg: kw.value for kw in node.keywords if kw.arg is not None}
        self.calls.append(
            CallInfo(
                node=node,
                span=self.tree.span_of(node),
                context=self._context(),
                callee_text=callee_text,
                qname=qualify(node.func, self.aliases) if callee_text else None,
                final_segment=final,
                receiver_text=receiver_text,
                receiver_qname=receiver_qname,
                keywords=keywords,
            )
        )
        self.generic_visit(node)

    def _record_assign(
        self,
        node: ast.Assign | ast.AugAssign | ast.AnnAssign,
        kind: str,
        targets: tuple[ast.expr, ...],
        value: ast.expr | None,
    ) -> None:
        names: list[str] = []
        texts: list[str] = []
        for target in targets:
            names.extend(_plain_target_names(target))
            text = dotted_text(target)
            if text is None and isinstance(target, ast.Subscript):
                text = dotted_text(target.value)
            if text is not None:
                texts.append(text)
        self.assignments.append(
            AssignInfo(
                node=node,
                span=self.tree.span_of(node),
                context=self._context(),
                kind=kind,
                targets=targets,
                value=value,
                target_names=tuple(names),
                target_texts=tuple(texts),
            )
        )
        self.generic_visit(node)

    def visit_Assign(self, node: ast.Assign) -> None:
        self._record_assign(node, "assign", tuple(node.targets), node.value)

    def visit_AugAssign(self, node: ast.AugAssign) -> None:
        self._record_assign(node, "aug", (node.target,), node.value)

    def visit_AnnAssign(self, node: ast.AnnAssign) -> None:
        self._record_assign(node, "ann", (node.target,), node.value)

    def visit_Delete(self, node: ast.Delete) -> None:
        texts = []
        for target in node.targets:
            text = dotted_text(target)
            if text is None and isinstance(target, ast.Subscript):
                text = dotted_text(target.value)
            texts.append(text or "")
        self.deletes.append(
            DeleteInfo(
                node=node,
                span=self.tree.span_of(node),
                context=self._context(),
                target_texts=tuple(texts),
            )
        )
        self.generic_visit(node)

    def _visit_with(self, node: ast.With | ast.AsyncWith) -> None:
        item_qnames = []
        item_texts = []
        for item in node.items:
            expr = item.context_expr
            target = expr.func if isinstance(expr, ast.Call) else expr
            item_qnames.append(qualify(target, self.aliases))
            item_texts.append(dotted_text(target))
        index = len(self.withs)
        self.withs.append(
            WithInfo(
                node=node,
                span=self.tree.span_of(node),
                body_span=self._block_span(node.body, []),
                context=self._context(),
                item_qnames=tuple(item_qnames),
                item_texts=tuple(item_texts),
            )
        )
        for item in node.items:
            self.visit(item.context_expr)
            if item.optional_vars is not None:
                self.visit(item.optional_vars)
        self._with_stack.append(index)
        for stmt in node.body:
            self.visit(stmt)
        self._with_stack.pop()

    def visit_With(self, node: ast.With) -> None:
        self._visit_with(node)

    def visit_AsyncWith(self, node: ast.AsyncWith) -> None:
        self._visit_with(node)


def _detect_frameworks(aliases: AliasMap) -> frozenset[str]:
    found: set[str] = set()
    canonicals = list(aliases.bindings.values()) + list(aliases.wildcard_modules)
    for canonical in canonicals:
        root = canonical.split(".")[0]
        if root == "torch":
            found.add(PYTORCH)
        elif root == "tensorflow":
            found.add(TENSORFLOW)
            if canonical == "tensorflow.keras" or canonical.startswith("tensorflow.keras."):
                found.add(KERAS)
        elif root == "keras":
            found.add(KERAS)
        elif root == "sklearn":
            found.add(SKLEARN)
    return frozenset(found)


def _is_module_base(name: str) -> bool:
    return name.endswith(".nn.Module") or name.split(".")[-1] == "Module"


def _is_autograd_base(name: str) -> bool:
    if name.endswith("autograd.Function"):
        return True
    return name.split(".")[-1] == "Function" and name.startswith("torch.")


def build_facts(tree: SyntaxTree, aliases: AliasMap) -> FileFacts:
    """Build the full fact set for one parsed unit. Pure and deterministic."""
    collector = _Collector(tree, aliases)
    collector.visit(tree.root)

    classes = tuple(
        ClassInfo(
            node=raw["node"],
            name=raw["name"],
            span=raw["span"],
            context=raw["context"],
            base_names=raw["base_names"],
            is_module_subclass=any(_is_module_base(b) for b in raw["base_names"]),
            is_autograd_function=any(_is_autograd_base(b) for b in raw["base_names"]),
        )
        for raw in collector.classes
    )

    grad_spans: list[Span] = []
    for info in collector.withs:
        if any(q in _GRAD_DISABLED_QNAMES for q in info.item_qnames if q):
            grad_spans.append(info.body_span)

    partial = FileFacts(
        unit_path=tree.unit.path,
        unit_kind=tree.unit.kind,
        tree=tree,
        aliases=aliases,
        frameworks=_detect_frameworks(aliases),
        loops=(),
        functions=(),
        classes=classes,
        calls=tuple(collector.calls),
        assignments=tuple(collector.assignments),
        deletes=tuple(collector.deletes),
        with_blocks=tuple(collector.withs),
        grad_disabled_spans=tuple(grad_spans),
    )

    functions = []
    for raw in collector.functions:
        info = FunctionInfo(
            node=raw["node"],
            name=raw["name"],
            span=raw["span"],
            context=raw["context"],
            class_index=raw["class_index"],
            decorator_qnames=raw["decorator_qnames"],
            params=raw["params"],
        )
        functions.append(info)
    staged = replace(partial, functions=tuple(functions))
    classified = []
    for info in functions:
        classified.append(replace(info, kind=classify_function(info, staged)))
        if any(q in _GRAD_DISABLED_QNAMES for q in info.decorator_qnames):
            grad_spans.append(info.span)

    loops = []
    for index, raw in enumerate(collector.loops):
        node = raw["node"]
        is_unbounded = False
        if raw["kind"] == "while":
            test = node.test
            is_unbounded = isinstance(test, ast.Constant) and test.value is True
        elif isinstance(node.iter, ast.Call):
            is_unbounded = qualify(node.iter.func, aliases) == "itertools.cycle"
        body_calls = [c for c in collector.calls if index in c.context.loop_indexes]
        is_training = any(is_backward_call(c) or is_optimizer_step(c) for c in body_calls)
        loops.append(
            LoopInfo(
                node=node,
                kind=raw["kind"],
                span=raw["span"],
                body_span=raw["body_span"],
                context=raw["context"],
                is_training=is_training,
                is_unbounded=is_unbounded,
            )
        )

    return FileFacts(
        unit_path=tree.unit.path,
        unit_kind=tree.unit.kind,
        tree=tree,
        aliases=aliases,
        frameworks=partial.frameworks,
        loops=tuple(loops),
        functions=tuple(classified),
        classes=classes,
        calls=partial.calls,
        assignments=partial.assignments,
        deletes=partial.deletes,
        with_blocks=partial.with_blocks,
        grad_disabled_spans=tuple(grad_spans),
    )
