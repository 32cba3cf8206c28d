"""TensorFlow/Keras-side rules: registry and checkers.

Three checkers partition the 16 rules: session/resource lifetimes, graph
construction and API misuse, and pipeline/environment configuration. The
module also pins which rules each framework-side distribution counts.
"""

from __future__ import annotations

import ast
import re

from ._model import Finding, make_finding
from .catalog import Category, Confidence, FrameworkTag, RuleSpec
from .facts import FileFacts

_G = FrameworkTag.GENERAL
_T = FrameworkTag.TENSORFLOW
_K = FrameworkTag.KERAS
_TK = FrameworkTag.TF_KERAS
_RM = Category.RESOURCE_MANAGEMENT
_TP = Category.TRAINING_PIPELINE
_GM = Category.GRAPH_MANAGEMENT
_FA = Category.FRAMEWORK_ABSTRACTION
_ENV = Category.ENVIRONMENT_CONFIG
_HI = Confidence.HIGH
_ME = Confidence.MEDIUM
_LO = Confidence.LOW
_TF = frozenset({"tensorflow"})
_KS = frozenset({"keras"})
_BOTH = frozenset({"tensorflow", "keras"})

DEFAULT_THRESHOLDS = {"batch_size_threshold": 1024, "constant_size_threshold": 4096}

_LAYER_NAMES = frozenset({
    "Dense", "Conv1D", "Conv2D", "Conv3D", "LSTM", "GRU", "Dropout", "Flatten",
    "Embedding", "BatchNormalization", "MaxPooling1D", "MaxPooling2D",
    "AveragePooling2D", "Input", "SimpleRNN", "Activation",
})
_MODEL_BUILDERS = frozenset({"Sequential", "Model", "load_model"})
_TF_PRIMITIVES = frozenset({
    "reshape", "multiply", "matmul", "add", "concat", "subtract", "divide",
    "stack", "transpose", "expand_dims", "squeeze", "cast", "reduce_mean",
    "reduce_sum", "tensordot", "einsum",
})
_TENSOR_PRODUCERS = frozenset({
    "constant", "ones", "zeros", "fill", "range", "convert_to_tensor", "cast",
    "reshape", "matmul", "multiply", "add", "subtract", "divide", "concat",
    "stack", "transpose", "tensordot", "einsum", "one_hot",
})
_GRAPH_BUILDERS = frozenset({
    "constant", "Variable", "add", "matmul", "multiply", "subtract", "divide",
    "concat", "placeholder", "get_variable",
})
_DATASET_TRANSFORMS = frozenset({
    "batch", "map", "shuffle", "prefetch", "take", "repeat", "cache",
    "window", "skip", "unbatch", "filter",
})
_SHAPE_LITERAL_BUILDERS = frozenset({"zeros", "ones", "fill"})
_MODEL_WORDS = ("generator", "discriminator", "model")
_ENV_KEYS = frozenset({"LD_LIBRARY_PATH", "LD_CONFIG_PATH", "PATH", "CUDA_HOME"})
_CUDA_VERSION = re.compile(r"cuda[-_/ ]?(\d+(?:\.\d+)*)", re.IGNORECASE)


def _rule_table() -> tuple[RuleSpec, ...]:
    return (
        RuleSpec("TK-01", "Unclosed Resource Leak", _TK, _RM, _ME, _BOTH,
                 ("T01", "T02", "T03", "T04", "K01"),
                 "inside a loop, a model/layer/variable construction, compile/fit call, or open() binds a resource with no clear_session, close, with-block, or del in the same loop body",
                 "'{name}' is created every iteration and never released in the loop body"),
        RuleSpec("TK-02", "Primitive API Leakage", _TK, _FA, _ME, _BOTH, ("T05",),
                 "a low-level tensorflow op is used as a layer in a functional-model expression or Sequential list outside a Layer subclass",
                 "low-level op '{name}' is wired into a model graph outside a Layer subclass"),
        RuleSpec("TK-03", "Lambda Layer Complexity", _TK, _FA, _ME, _BOTH, ("T06",),
                 "a Lambda layer wraps a named function containing a loop or three or more calls, or is constructed inside a loop",
                 "Lambda layer wraps non-trivial logic; define a Layer subclass instead"),
        RuleSpec("TK-04", "Session Pile-Up", _T, _RM, _HI, _TF, ("T07",),
                 "a model-building call (in-file model class, Sequential, Model, load_model) runs inside a loop with no clear_session() in the loop body",
                 "model is built every iteration without clear_session(); graph state piles up"),
        RuleSpec("TK-05", "Dataset-Iterator Retention", _G, _TP, _HI, _BOTH, ("T08",),
                 "predict() is called inside a loop on a name bound from a tensorflow.data dataset construction or transformation",
                 "predict() on dataset '{name}' inside a loop builds a fresh iterator per call"),
        RuleSpec("TK-06", "Unreleased Tensor Reference", _G, _RM, _LO, _BOTH, ("T09",),
                 "inside a loop, a variable is reassigned from a tensor-producing call with no delete of the prior value between assignments",
                 "'{name}' is rebound to a new tensor each iteration while the old one lingers"),
        RuleSpec("TK-07", "Unclosed Session", _T, _RM, _HI, _TF, ("T10", "T11"),
                 "a Session or InteractiveSession result is bound to a name with no close() on that name in the file and no with-block",
                 "session '{name}' is never closed; use close() or a with-block"),
        RuleSpec("TK-08", "Image Buffer Accumulation", _G, _RM, _ME, _BOTH, ("T04",),
                 "a function whose name contains augment appends call results to a collection defined outside the loop and never clears it",
                 "augmentation buffer '{name}' grows without being cleared"),
        RuleSpec("TK-09", "Unbounded Graph Expansion", _T, _GM, _HI, _TF, ("T12",),
                 "a graph-building call runs inside a loop in a graph-mode file with no per-iteration Graph() or as_default() scoping",
                 "graph op is added every iteration; the default graph grows without bound"),
        RuleSpec("TK-10", "Graph-Constant Bottleneck", _T, _GM, _ME, _TF, ("T13",),
                 "constant() embeds a name bound from a file-loading call, or a literal larger than the configured size threshold",
                 "large data is embedded into the graph as a constant; feed or initialize it instead"),
        RuleSpec("TK-11", "GPU Released Memory Failure", _G, _RM, _ME, _BOTH, ("T14",),
                 "a model-named variable is deleted, or a fit-calling function ends, with neither clear_session() nor gc.collect() after the model use",
                 "releasing '{name}' without clear_session() or gc.collect() leaves GPU memory held"),
        RuleSpec("TK-12", "Shape Mismatch Leak", _G, _TP, _LO, _BOTH, ("T15",),
                 "binary arithmetic between two names whose literal-constructed shapes have different ranks, with no reshape on either",
                 "operands '{a}' and '{b}' have ranks {ra} and {rb}; broadcasting here retains extra buffers"),
        RuleSpec("TK-13", "Improper Model Reuse", _G, _RM, _ME, _BOTH, ("K02",),
                 "two or more distinct model-named variables are rebuilt or re-compiled in the same loop without clear_session between them",
                 "'{name}' is rebuilt alongside another model without clear_session() between them"),
        RuleSpec("TK-14", "Minibatch Mismatch", _G, _TP, _LO, _BOTH, ("K03",),
                 "fit/predict/evaluate passes batch_size at or above the configured threshold",
                 "batch_size={n} meets or exceeds the configured threshold ({t})",
                 default_enabled=False),
        RuleSpec("TK-15", "Library Path Mismatch", _K, _ENV, _LO, _KS, ("K04",),
                 "two process-environment assignments for CUDA-related keys reference different CUDA version substrings",
                 "environment points at CUDA {a} and CUDA {b} at the same time"),
        RuleSpec("TK-16", "Unnecessary Parallelism", _TK, _TP, _HI,
                 frozenset({"tensorflow", "keras", "sklearn"}), ("K05",),
                 "GridSearchCV is called with n_jobs=-1",
                 "GridSearchCV(n_jobs=-1) forks the whole process per worker; set n_jobs=1"),
    )


RULES: tuple[RuleSpec, ...] = _rule_table()
RULES_BY_ID = {rule.id: rule for rule in RULES}

TENSORFLOW_LISTED: tuple[str, ...] = tuple(f"TK-{i:02d}" for i in range(1, 13))
KERAS_LISTED: tuple[str, ...] = ("TK-01", "TK-03", "TK-13", "TK-14", "TK-15", "TK-16")


def _root(qname: str | None) -> str | None:
    return qname.split(".")[0] if qname else None


def _tf_rooted(qname: str | None) -> bool:
    return _root(qname) == "tensorflow"


def _final(node: ast.expr) -> str | None:
    if isinstance(node, ast.Call):
        node = node.func
    if isinstance(node, ast.Attribute):
        return node.attr
    if isinstance(node, ast.Name):
        return node.id
    return None


def _kw(call_node: ast.Call, name: str) -> ast.expr | None:
    for kw in call_node.keywords:
        if kw.arg == name:
            return kw.value
    return None


def _kw_int(call_node: ast.Call, name: str) -> int | None:
    value = _kw(call_node, name)
    if isinstance(value, ast.Constant) and isinstance(value.value, int) and not isinstance(value.value, bool):
        return value.value
    return None


def _dedupe(findings: list[Finding]) -> list[Finding]:
    seen: set[tuple] = set()
    out = []
    for finding in findings:
        key = (finding.rule_id, finding.span.start_offset, finding.span.end_offset)
        if key not in seen:
            seen.add(key)
            out.append(finding)
    return out


def _assigned_names_by_value(facts: FileFacts) -> dict[int, tuple[str, ...]]:
    return {
        id(a.value): a.target_names
        for a in facts.assignments
        if a.value is not None and a.target_names
    }


def _with_item_ids(facts: FileFacts) -> set[int]:
    return {
        id(item.context_expr)
        for block in facts.with_blocks
        for item in block.node.items
    }


def _is_model_name(name: str) -> bool:
    lowered = name.lower()
    return any(word in lowered for word in _MODEL_WORDS)


def _keras_model_classes(facts: FileFacts) -> set[str]:
    names = set()
    for cls in facts.classes:
        for base in cls.base_names:
            if base.endswith("Model") and ("keras" in base or base == "Model"):
                names.add(cls.name)
    return names


def _is_model_building(facts: FileFacts, call) -> bool:
    if call.final_segment in _MODEL_BUILDERS:
        root = _root(call.qname)
        if root in ("tensorflow", "keras") or call.qname is None:
            return True
    func = call.node.func
    return isinstance(func, ast.Name) and func.id in _keras_model_classes(facts)


def _is_layer_ctor(call) -> bool:
    qname = call.qname or ""
    if ".layers." in qname and _root(qname) in ("tensorflow", "keras"):
        return call.final_segment != "Lambda"
    return (
        call.final_segment in _LAYER_NAMES
        and _root(qname) in ("tensorflow", "keras")
    )


def _is_variable_ctor(call) -> bool:
    if call.final_segment == "get_variable" and _tf_rooted(call.qname):
        return True
    return call.final_segment == "Variable" and _tf_rooted(call.qname)


def _clear_session_calls(calls) -> list:
    return [c for c in calls if c.final_segment == "clear_session"]


def _gc_or_clear(call) -> bool:
    return call.final_segment == "clear_session" or call.qname == "gc.collect"


# -- sessions and resources checker --------------------------------------------


def check_sessions_and_resources(facts: FileFacts, enabled: set[str]) -> list[Finding]:
    findings: list[Finding] = []
    stored = _assigned_names_by_value(facts)
    with_items = _with_item_ids(facts)

    if "TK-01" in enabled:
        for call in facts.calls:
            if not call.context.in_loop or id(call.node) in with_items:
                continue
            name = None
            resource = False
            if _is_model_building(facts, call) or _is_layer_ctor(call) or _is_variable_ctor(call):
                resource = True
            elif call.final_segment in ("compile", "fit") and call.receiver_text:
                resource = True
                name = call.receiver_text
            elif call.callee_text == "open":
                resource = True
            if not resource:
                continue
            if name is None:
                bound = stored.get(id(call.node), ())
                name = bound[0] if bound else None
            loop_index = call.context.loop_indexes[-1]
            body = facts.calls_in_loop(loop_index)
            if _clear_session_calls(body):
                continue
            if name is not None:
                closed = any(
                    c.final_segment == "close" and c.receiver_text == name for c in body
                )
                deleted = any(
                    name in d.target_texts for d in facts.deletes_in_loop(loop_index)
                )
                if closed or deleted:
                    continue
            label = name or call.callee_text or "resource"
            message = RULES_BY_ID["TK-01"].message.format(name=label)
            findings.append(make_finding(RULES_BY_ID["TK-01"], facts, call.node, message))

    if "TK-04" in enabled:
        for call in facts.calls:
            if not call.context.in_loop or not _is_model_building(facts, call):
                continue
            loop_index = call.context.loop_indexes[-1]
            if not _clear_session_calls(facts.calls_in_loop(loop_index)):
                findings.append(make_finding(RULES_BY_ID["TK-04"], facts, call.node))

    if "TK-06" in enabled:
        for assign in facts.assignments:
            if not assign.context.in_loop or assign.kind != "assign":
                continue
            if not isinstance(assign.value, ast.Call):
                continue
            if len(assign.targets) != 1 or not isinstance(assign.targets[0], ast.Name):
                continue
            qname = facts.qname(assign.value.func)
            producer = _tf_rooted(qname) and (
                qname.split(".")[-1] in _TENSOR_PRODUCERS
                or qname.startswith("tensorflow.random.")
            )
            if not producer:
                continue
            name = assign.targets[0].id
            loop_index = assign.context.loop_indexes[-1]
            released = any(
                name in d.target_texts for d in facts.deletes_in_loop(loop_index)
            ) or any(
                c.final_segment == "dispose" and c.receiver_text == name
                for c in facts.calls_in_loop(loop_index)
            )
            if not released:
                message = RULES_BY_ID["TK-06"].message.format(name=name)
                findings.append(make_finding(RULES_BY_ID["TK-06"], facts, assign.node, message))

    if "TK-07" in enabled:
        closed = {
            c.receiver_text
            for c in facts.calls
            if c.final_segment == "close" and c.receiver_text
        }
        for call in facts.calls:
            if call.final_segment not in ("Session", "InteractiveSession"):
                continue
            if not _tf_rooted(call.qname):
                continue
            if id(call.node) in with_items:
                continue
            bound = stored.get(id(call.node), ())
            if not bound:
                continue
            if any(name in closed for name in bound):
                continue
            message = RULES_BY_ID["TK-07"].message.format(name=bound[0])
            findings.append(make_finding(RULES_BY_ID["TK-07"], facts, call.node, message))

    if "TK-08" in enabled:
        for fn in facts.functions:
            if "augment" not in fn.name.lower():
                continue
            cleared = {
                c.receiver_text
                for c in facts.calls
                if c.final_segment == "clear" and fn.span.contains(c.span) and c.receiver_text
            }
            for call in facts.calls:
                if (
                    call.final_segment != "append"
                    or not call.context.in_loop
                    or not fn.span.contains(call.span)
                    or not call.receiver_text
                    or "." in call.receiver_text
                    or not call.node.args
                    or not isinstance(call.node.args[0], ast.Call)
                ):
                    continue
                loop_index = call.context.loop_indexes[-1]
                assigned_in_loop = {
                    name
                    for a in facts.assignments_in_loop(loop_index)
                    for name in a.target_names
                }
                if call.receiver_text in assigned_in_loop or call.receiver_text in cleared:
                    continue
                message = RULES_BY_ID["TK-08"].message.format(name=call.receiver_text)
                findings.append(make_finding(RULES_BY_ID["TK-08"], facts, call.node, message))

    if "TK-11" in enabled:
        model_bound: dict[int | None, set[str]] = {}
        for assign in facts.assignments:
            if isinstance(assign.value, ast.Call):
                info_call_final = _final(assign.value)
                if info_call_final in _MODEL_BUILDERS:
                    model_bound.setdefault(assign.context.function_index, set()).update(
                        assign.target_names
                    )
        cleanup_calls = [c for c in facts.calls if _gc_or_clear(c)]
        for delete in facts.deletes:
            scope = delete.context.function_index
            for name in delete.target_texts:
                if "." in name:
                    continue
                modelish = _is_model_name(name) or name in model_bound.get(scope, set())
                if not modelish:
                    continue
                followed = any(
                    c.context.function_index == scope
                    and c.span.start_offset > delete.span.end_offset
                    for c in cleanup_calls
                )
                if not followed:
                    message = RULES_BY_ID["TK-11"].message.format(name=name)
                    findings.append(make_finding(RULES_BY_ID["TK-11"], facts, delete.node, message))
        for fn_index, fn in enumerate(facts.functions):
            fits = [
                c
                for c in facts.calls
                if c.final_segment == "fit"
                and c.context.function_index == fn_index
                and c.receiver_text
            ]
            if not fits:
                continue
            last_fit = max(fits, key=lambda c: c.span.start_offset)
            followed = any(
                fn.span.contains(c.span) and c.span.start_offset > last_fit.span.end_offset
                for c in cleanup_calls
            )
            if not followed:
                message = RULES_BY_ID["TK-11"].message.format(name=last_fit.receiver_text)
                findings.append(make_finding(RULES_BY_ID["TK-11"], facts, last_fit.node, message))

    if "TK-13" in enabled:
        for loop_index, loop in enumerate(facts.loops):
            events: list[tuple[int, str, ast.AST]] = []
            for assign in facts.assignments_in_loop(loop_index):
                if assign.kind != "assign" or not isinstance(assign.value, ast.Call):
                    continue
                for name in assign.target_names:
                    if _is_model_name(name):
                        events.append((assign.span.start_offset, name, assign.node))
            for call in facts.calls_in_loop(loop_index):
                if (
                    call.final_segment == "compile"
                    and call.receiver_text
                    and _is_model_name(call.receiver_text)
                ):
                    events.append((call.span.start_offset, call.receiver_text, call.node))
            events.sort(key=lambda e: e[0])
            clears = [
                c.span.start_offset
                for c in _clear_session_calls(facts.calls_in_loop(loop_index))
            ]
            for (off_a, name_a, _), (off_b, name_b, node_b) in zip(events, events[1:]):
                if name_a == name_b:
                    continue
                if any(off_a < off < off_b for off in clears):
                    continue
                message = RULES_BY_ID["TK-13"].message.format(name=name_b)
                findings.append(make_finding(RULES_BY_ID["TK-13"], facts, node_b, message))
                break

    return _dedupe(findings)


# -- graph and api checker ------------------------------------------------------


def check_graph_and_api(
    facts: FileFacts, enabled: set[str], thresholds: dict | None = None
) -> list[Finding]:
    findings: list[Finding] = []
    limits = dict(DEFAULT_THRESHOLDS)
    if thresholds:
        limits.update(thresholds)

    if "TK-02" in enabled:
        layer_class_indexes = {
            i
            for i, cls in enumerate(facts.classes)
            if any(base.endswith("Layer") for base in cls.base_names)
        }

        def _is_primitive(call) -> bool:
            qname = call.qname or ""
            return (
                _tf_rooted(qname)
                and ".keras." not in qname
                and qname.split(".")[-1] in _TF_PRIMITIVES
            )

        for call in facts.calls:
            if call.final_segment != "Sequential":
                continue
            if not call.node.args or not isinstance(call.node.args[0], (ast.List, ast.Tuple)):
                continue
            for element in call.node.args[0].elts:
                if isinstance(element, ast.Call):
                    inner = next(
                        (c for c in facts.calls if c.node is element), None
                    )
                    if inner is not None and _is_primitive(inner):
                        message = RULES_BY_ID["TK-02"].message.format(name=inner.callee_text)
                        findings.append(make_finding(RULES_BY_ID["TK-02"], facts, element, message))
        keras_bound: dict[int | None, set[str]] = {}
        for assign in facts.assignments:
            if isinstance(assign.value, ast.Call):
                qname = facts.qname(assign.value.func) or ""
                if "keras" in qname:
                    keras_bound.setdefault(assign.context.function_index, set()).update(
                        assign.target_names
                    )
        for call in facts.calls:
            if not _is_primitive(call):
                continue
            if call.context.class_index in layer_class_indexes:
                continue
            scope = call.context.function_index
            bound = keras_bound.get(scope, set()) | keras_bound.get(None, set())
            arg_names = {
                n.id
                for arg in call.node.args
                for n in ast.walk(arg)
                if isinstance(n, ast.Name)
            }
            if arg_names & bound:
                message = RULES_BY_ID["TK-02"].message.format(name=call.callee_text)
                findings.append(make_finding(RULES_BY_ID["TK-02"], facts, call.node, message))

    if "TK-03" in enabled:
        named_functions = {fn.name: fn for fn in facts.functions}
        for call in facts.calls:
            if call.final_segment != "Lambda":
                continue
            root = _root(call.qname)
            if root not in ("tensorflow", "keras"):
                continue
            if call.context.in_loop:
                findings.append(make_finding(RULES_BY_ID["TK-03"], facts, call.node))
                continue
            if not call.node.args or not isinstance(call.node.args[0], ast.Name):
                continue
            fn = named_functions.get(call.node.args[0].id)
            if fn is None:
                continue
            has_loop = any(fn.span.contains(loop.span) for loop in facts.loops)
            call_count = sum(
                1 for node in ast.walk(fn.node) if isinstance(node, ast.Call)
            )
            if has_loop or call_count >= 3:
                findings.append(make_finding(RULES_BY_ID["TK-03"], facts, call.node))

    if "TK-09" in enabled:
        graph_mode = any(
            (call.qname and "compat.v1" in call.qname)
            or (call.final_segment in ("Session", "InteractiveSession") and _tf_rooted(call.qname))
            or (call.final_segment == "placeholder" and _tf_rooted(call.qname))
            for call in facts.calls
        )
        if graph_mode:
            for call in facts.calls:
                if not call.context.in_loop:
                    continue
                if not (_tf_rooted(call.qname) and call.final_segment in _GRAPH_BUILDERS):
                    continue
                loop_index = call.context.loop_indexes[-1]
                scoped = any(
                    (c.final_segment == "Graph" and _tf_rooted(c.qname))
                    or c.final_segment == "as_default"
                    for c in facts.calls_in_loop(loop_index)
                )
                if not scoped:
                    findings.append(make_finding(RULES_BY_ID["TK-09"], facts, call.node))

    if "TK-10" in enabled:
        limit = limits.get("constant_size_threshold", 4096)
        loaded: dict[int | None, set[str]] = {}
        for assign in facts.assignments:
            if not isinstance(assign.value, ast.Call):
                continue
            final = _final(assign.value)
            if final is None:
                continue
            lowered = final.lower()
            if "load" in lowered or "read" in lowered or final == "open":
                loaded.setdefault(assign.context.function_index, set()).update(
                    assign.target_names
                )
        for call in facts.calls:
            if call.final_segment != "constant" or not _tf_rooted(call.qname):
                continue
            if not call.node.args:
                continue
            arg = call.node.args[0]
            scope = call.context.function_index
            names = loaded.get(scope, set()) | loaded.get(None, set())
            if isinstance(arg, ast.Name) and arg.id in names:
                findings.append(make_finding(RULES_BY_ID["TK-10"], facts, call.node))
            elif isinstance(arg, (ast.List, ast.Tuple, ast.Constant)):
                text = facts.tree.source_of(arg)
                if len(text) > limit:
                    findings.append(make_finding(RULES_BY_ID["TK-10"], facts, call.node))

    if "TK-12" in enabled:
        ranks: dict[str, int] = {}
        for assign in facts.assignments:
            if assign.kind != "assign" or not isinstance(assign.value, ast.Call):
                continue
            qname = facts.qname(assign.value.func) or ""
            final = qname.split(".")[-1]
            shapeish = _tf_rooted(qname) and (
                final in _SHAPE_LITERAL_BUILDERS or qname.startswith("tensorflow.random.")
            )
            if not shapeish or not assign.value.args:
                continue
            shape = assign.value.args[0]
            if isinstance(shape, (ast.List, ast.Tuple)):
                for name in assign.target_names:
                    ranks[name] = len(shape.elts)
        reshaped: set[str] = set()
        for call in facts.calls:
            if call.final_segment == "reshape":
                for node in ast.walk(call.node):
                    if isinstance(node, ast.Name):
                        reshaped.add(node.id)
        for node in facts.tree.walk():
            if not isinstance(node, ast.BinOp):
                continue
            if not isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
                continue
            left, right = node.left, node.right
            if not (isinstance(left, ast.Name) and isinstance(right, ast.Name)):
                continue
            if left.id not in ranks or right.id not in ranks:
                continue
            if ranks[left.id] == ranks[right.id]:
                continue
            if left.id in reshaped or right.id in reshaped:
                continue
            message = RULES_BY_ID["TK-12"].message.format(
                a=left.id, b=right.id, ra=ranks[left.id], rb=ranks[right.id]
            )
            findings.append(make_finding(RULES_BY_ID["TK-12"], facts, node, message))

    return _dedupe(findings)


# -- pipeline and environment checker -------------------------------------------


def check_pipeline_and_env(
    facts: FileFacts, enabled: set[str], thresholds: dict | None = None
) -> list[Finding]:
    findings: list[Finding] = []
    limits = dict(DEFAULT_THRESHOLDS)
    if thresholds:
        limits.update(thresholds)

    if "TK-05" in enabled:
        dataset_names: set[str] = set()
        for assign in sorted(facts.assignments, key=lambda a: a.span.start_offset):
            if assign.value is None or not assign.target_names:
                continue
            derived = False
            for node in ast.walk(assign.value):
                if not isinstance(node, ast.Call):
                    continue
                qname = facts.qname(node.func) or ""
                if qname.startswith("tensorflow.data"):
                    derived = True
                if (
                    isinstance(node.func, ast.Attribute)
                    and node.func.attr in _DATASET_TRANSFORMS
                    and isinstance(node.func.value, ast.Name)
                    and node.func.value.id in dataset_names
                ):
                    derived = True
            if derived:
                dataset_names.update(assign.target_names)
        for call in facts.calls:
            if call.final_segment != "predict" or not call.context.in_loop:
                continue
            if not call.node.args or not isinstance(call.node.args[0], ast.Name):
                continue
            name = call.node.args[0].id
            if name in dataset_names:
                message = RULES_BY_ID["TK-05"].message.format(name=name)
                findings.append(make_finding(RULES_BY_ID["TK-05"], facts, call.node, message))

    if "TK-14" in enabled:
        limit = limits.get("batch_size_threshold", 1024)
        for call in facts.calls:
            if call.final_segment not in ("fit", "predict", "evaluate"):
                continue
            size = _kw_int(call.node, "batch_size")
            if size is not None and size >= limit:
                message = RULES_BY_ID["TK-14"].message.format(n=size, t=limit)
                findings.append(make_finding(RULES_BY_ID["TK-14"], facts, call.node, message))

    if "TK-15" in enabled:
        entries: list[tuple[str, ast.AST]] = []
        for assign in facts.assignments:
            if assign.kind != "assign":
                continue
            for target in assign.targets:
                if not isinstance(target, ast.Subscript):
                    continue
                base = facts.qname(target.value) or ""
                env_map = base in ("os.environ", "environ") or (
                    isinstance(target.value, ast.Attribute)
                    and target.value.attr == "environ"
                )
                if not env_map:
                    continue
                key = target.slice
                if not (isinstance(key, ast.Constant) and key.value in _ENV_KEYS):
                    continue
                pieces = [
                    n.value
                    for n in ast.walk(assign.value)
                    if isinstance(n, ast.Constant) and isinstance(n.value, str)
                ] if assign.value is not None else []
                match = _CUDA_VERSION.search(" ".join(pieces))
                if match:
                    entries.append((match.group(1), assign.node))
        entries_seen: list[tuple[str, ast.AST]] = []
        for version, node in entries:
            clash = next(
                (v for v, _ in entries_seen if v != version), None
            )
            if clash is not None:
                message = RULES_BY_ID["TK-15"].message.format(a=clash, b=version)
                findings.append(make_finding(RULES_BY_ID["TK-15"], facts, node, message))
                break
            entries_seen.append((version, node))

    if "TK-16" in enabled:
        for call in facts.calls:
            if call.final_segment != "GridSearchCV":
                continue
            value = _kw(call.node, "n_jobs")
            minus_one = (
                isinstance(value, ast.UnaryOp)
                and isinstance(value.op, ast.USub)
                and isinstance(value.operand, ast.Constant)
                and value.operand.value == 1
            )
            if minus_one:
                findings.append(make_finding(RULES_BY_ID["TK-16"], facts, call.node))

    return _dedupe(findings)
