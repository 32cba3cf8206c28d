"""PyTorch-side rules: registry and checkers.

Three checkers partition the 30 rules: gradient/graph handling, loop and
pipeline hygiene, and reference/memory retention. Each checker only runs
the rule ids it is handed, so selection and framework gating stay in the
engine.
"""

from __future__ import annotations

import ast
import re

from ._model import Finding, make_finding
from .catalog import Category, Confidence, FrameworkTag, RuleSpec
from .facts import (
    AUTOGRAD_BACKWARD,
    AUTOGRAD_FORWARD,
    FORWARD_METHOD,
    INFERENCE,
    TRAINING,
    FileFacts,
    grad_disabled,
    is_backward_call,
)

_G = FrameworkTag.GENERAL
_P = FrameworkTag.PYTORCH
_RM = Category.RESOURCE_MANAGEMENT
_GG = Category.GRAPH_AND_GRADIENT
_TP = Category.TRAINING_PIPELINE
_LL = Category.LOOP_LIFECYCLE
_HI = Confidence.HIGH
_ME = Confidence.MEDIUM
_LO = Confidence.LOW
_FW = frozenset({"pytorch"})

DEFAULT_THRESHOLDS = {"batch_size_threshold": 1024}

_DETACH_SEGMENTS = frozenset({"detach", "item", "cpu", "numpy", "tolist"})
_REDUCTIONS = frozenset({"sum", "mean", "max", "min", "prod"})
_HOOK_PATTERN = re.compile(r"^register_\w*hook$")
_RUNNING_STATS = frozenset({"running_mean", "running_var", "running_covar"})
_CTX_BUILTINS = frozenset({"saved_tensors", "needs_input_grad"})


def _rule_table() -> tuple[RuleSpec, ...]:
    return (
        RuleSpec("PT-01", "Unreleased GPU Memory", _G, _RM, _LO, _FW, ("P07", "P18"),
                 "a call result is stored into a cache-named subscript or attribute inside a loop or forward method, and the cache is never cleared in the file",
                 "cache '{name}' is written in a loop or forward pass and never cleared"),
        RuleSpec("PT-02", "Graph Retention After Backward Pass", _P, _GG, _HI, _FW, ("P21",),
                 "backward(retain_graph=True) outside any loop with no later backward call in the same function",
                 "backward(retain_graph=True) with no later backward call keeps the whole graph alive"),
        RuleSpec("PT-03", "Unbounded Loop", _G, _LL, _HI, _FW, ("P26",),
                 "a for-loop iterates over itertools.cycle(...)",
                 "loop iterates itertools.cycle and never terminates on its own"),
        RuleSpec("PT-04", "Accumulating Gradients in Loop", _G, _GG, _ME, _FW, ("P29",),
                 "a training loop calls backward() but never zeroes gradients in its body",
                 "training loop calls backward() without zeroing gradients first"),
        RuleSpec("PT-05", "Unnecessary Gradient Tracking", _G, _GG, _ME, _FW, ("P01", "P24"),
                 "an inference function calls a model-like callable with gradients enabled and no requires_grad=False assignment",
                 "model call '{name}' in an inference function runs with gradient tracking enabled"),
        RuleSpec("PT-06", "Release Memory Failure", _G, _RM, _LO, _FW, ("P04", "P07"),
                 "a loop in an inference function appends raw call results to a collection without detach/cpu/item",
                 "inference loop appends raw call results; detach them or move them off the device"),
        RuleSpec("PT-07", "Unreleased Hook Memory", _G, _RM, _HI, _FW, ("P02",),
                 "a register_*hook result is discarded, or stored in a name whose remove() is never called in the file",
                 "hook is registered but its handle is never removed"),
        RuleSpec("PT-08", "Redundant DataLoader Instantiation", _P, _TP, _HI, _FW, ("P03",),
                 "a DataLoader is constructed inside a loop, or configured with persistent_workers=True while num_workers=0",
                 "DataLoader is rebuilt inside a loop"),
        RuleSpec("PT-09", "Unreleased Tensor/Model References", _G, _RM, _ME, _FW, ("P04",),
                 "inside a training loop, a name on which backward() is called is accumulated or appended without detach()/item()",
                 "tensor '{name}' carrying the backward graph is accumulated without detach() or item()"),
        RuleSpec("PT-10", "Zippered or Cycled DataLoader", _P, _TP, _HI, _FW, ("P05",),
                 "a for-loop iterates zip(...) or cycle(...) over loader-named arguments",
                 "loop iterates {fn}() over a data loader, which pins worker iterators"),
        RuleSpec("PT-11", "Tensor Over-Concatenation", _G, _RM, _HI, _FW, ("P06",),
                 "torch.cat or torch.stack inside a loop assigns back onto one of its own arguments",
                 "{fn} grows '{name}' every iteration; collect parts and concatenate once"),
        RuleSpec("PT-12", "Unreleased Shell References", _G, _RM, _LO, _FW, ("P08",),
                 "a notebook's top-level binding of a tensor or model is never deleted nor reassigned in a later cell",
                 "top-level binding '{name}' holds a tensor or model and is never released in a later cell"),
        RuleSpec("PT-13", "Improper Tensor Retention", _P, _RM, _ME, _FW, ("P09", "P17"),
                 "an autograd forward stores an argument-derived value on ctx or an external map instead of save_for_backward",
                 "forward stores '{name}' directly instead of using ctx.save_for_backward()"),
        RuleSpec("PT-14", "Dead Debug Code", _G, _RM, _HI, _FW, ("P10",),
                 "detect_anomaly or set_detect_anomaly is enabled with a truthy argument at top level or in a training function",
                 "anomaly detection is enabled outside debugging and retains extra graph state"),
        RuleSpec("PT-15", "Unnecessary Dim Retention", _G, _RM, _LO, _FW, ("P11",),
                 "a reduction with keepdim=True has squeeze() applied within the next two statements",
                 "reduction keeps the dimension only for squeeze() to drop it immediately"),
        RuleSpec("PT-16", "Circular Buffer References", _G, _RM, _LO, _FW, ("P12",),
                 "an object stored on self points back at self (self.<a>.<b> = self)",
                 "'self.{name} = self' creates a reference cycle that delays collection"),
        RuleSpec("PT-17", "Accumulated Object References", _P, _RM, _HI, _FW, ("P13",),
                 "an autograd Function defines forward/backward without @staticmethod, or calls self.save_for_backward",
                 "autograd Function keeps per-instance state; forward and backward must be static"),
        RuleSpec("PT-18", "Inefficient GPU Matrix Ops", _G, _RM, _LO, _FW, ("P14",),
                 "torch.mm/matmul/bmm inside a loop accumulates into a loop-carried variable",
                 "matrix product accumulates on the GPU every iteration"),
        RuleSpec("PT-19", "Lingering References", _G, _RM, _ME, _FW, ("P15",),
                 "a tensor expression is appended into a memory/buffer/replay collection without cpu()/numpy()/detach()",
                 "tensor is appended to '{name}' without moving it off the graph or device"),
        RuleSpec("PT-20", "Forward-Pass Tensor Stored as Class Attribute", _G, _RM, _HI, _FW, ("P16",),
                 "a forward method stores a parameter-derived expression on self without register_buffer/register_parameter",
                 "forward stores activation on 'self.{name}'; use a local variable instead"),
        RuleSpec("PT-21", "Missing Gradient Tensors", _P, _GG, _ME, _FW, ("P17",),
                 "an autograd backward reads a custom ctx attribute, which save_for_backward never provides",
                 "backward reads 'ctx.{name}', which save_for_backward never provides"),
        RuleSpec("PT-22", "Oversized Batch Handling", _G, _TP, _LO, _FW, ("P19",),
                 "a DataLoader-like constructor passes batch_size at or above the configured threshold",
                 "batch_size={n} meets or exceeds the configured threshold ({t})",
                 default_enabled=False),
        RuleSpec("PT-23", "Uncleared Gradients", _P, _GG, _HI, _FW, ("P20", "P21"),
                 "backward(retain_graph=True) lexically inside a loop",
                 "backward(retain_graph=True) inside a loop retains every iteration's graph"),
        RuleSpec("PT-24", "Nested Second Derivative Calls", _P, _GG, _HI, _FW, ("P22",),
                 "nested torch.autograd.grad calls without create_graph=True on the inner call",
                 "nested torch.autograd.grad without create_graph=True on the inner call"),
        RuleSpec("PT-25", "Improper Gradient Use in Normalization Layers", _P, _GG, _HI, _FW, ("P23",),
                 "a running statistic on self is assigned from a non-detached expression outside a grad-disabled region",
                 "running statistic 'self.{name}' is updated from a non-detached expression"),
        RuleSpec("PT-26", "Mishandling Training Gradient", _G, _GG, _ME, _FW, ("P24",),
                 "a receiver is called after its .eval() call in the same function with gradients still enabled",
                 "'{name}' is called after eval() with gradients still enabled"),
        RuleSpec("PT-27", "Using del Without Freeing Memory", _G, _RM, _LO, _FW, ("P25",),
                 "del of a torch-call-bound name with no torch.cuda.empty_cache() later in the same scope",
                 "del '{name}' alone does not return CUDA memory; call torch.cuda.empty_cache()"),
        RuleSpec("PT-28", "Repeated Group Creation Inside Loop", _G, _LL, _HI, _FW, ("P27",),
                 "torch.distributed.new_group or init_process_group is called inside a loop",
                 "process group is created inside a loop"),
        RuleSpec("PT-29", "Encoder-Decoder Inside Training Loop", _G, _TP, _HI, _FW, ("P28",),
                 "a model (in-file nn.Module subclass or torch.nn constructor) is instantiated inside a training loop",
                 "model '{name}' is constructed inside the training loop"),
        RuleSpec("PT-30", "Tracing Inside Loop Without Cleanup", _G, _RM, _ME, _FW, ("P30",),
                 "torch.jit.trace or torch.jit.script is called inside a loop",
                 "torch.jit tracing inside a loop compiles and caches every iteration"),
    )


RULES: tuple[RuleSpec, ...] = _rule_table()
RULES_BY_ID = {rule.id: rule for rule in RULES}


def _torch_rooted(qname: str | None) -> bool:
    return qname is not None and (qname == "torch" or qname.startswith("torch."))


def _kw_is_true(call, name: str) -> bool:
    value = call.keywords.get(name)
    return isinstance(value, ast.Constant) and value.value is True


def _kw_int(call, name: str) -> int | None:
    value = call.keywords.get(name)
    if isinstance(value, ast.Constant) and isinstance(value.value, int) and not isinstance(value.value, bool):
        return value.value
    return None


def _names_in(node: ast.AST) -> set[str]:
    return {n.id for n in ast.walk(node) if isinstance(n, ast.Name)}


def _raw_name_nodes(expr: ast.AST, names: set[str]) -> list[ast.Name]:
    """Name nodes from `names` not wrapped by a detach-style method call."""
    safe_ids: set[int] = set()
    for node in ast.walk(expr):
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Attribute)
            and node.func.attr in _DETACH_SEGMENTS
            and isinstance(node.func.value, ast.Name)
        ):
            safe_ids.add(id(node.func.value))
    return [
        node
        for node in ast.walk(expr)
        if isinstance(node, ast.Name) and node.id in names and id(node) not in safe_ids
    ]


def _function_of_kind(facts: FileFacts, index: int | None, kind: str) -> bool:
    return index is not None and facts.functions[index].kind == kind


def _dedupe(findings: list[Finding]) -> list[Finding]:
    seen: set[tuple] = set()
    out = []
    for finding in findings:
        key = (finding.rule_id, finding.span.start_offset, finding.span.end_offset)
        if key not in seen:
            seen.add(key)
            out.append(finding)
    return out


def _expr_statement_value_ids(facts: FileFacts) -> set[int]:
    return {id(node.value) for node in facts.tree.walk() if isinstance(node, ast.Expr)}


def _iter_blocks(root: ast.AST):
    for node in ast.walk(root):
        for attr in ("body", "orelse", "finalbody"):
            block = getattr(node, attr, None)
            if isinstance(block, list) and block and isinstance(block[0], ast.stmt):
                yield block


# -- gradient and graph checker ----------------------------------------------


def check_gradient_and_graph(facts: FileFacts, enabled: set[str]) -> list[Finding]:
    findings: list[Finding] = []

    if "PT-02" in enabled or "PT-23" in enabled:
        backward_calls = [c for c in facts.calls if is_backward_call(c)]
        for call in backward_calls:
            if not _kw_is_true(call, "retain_graph"):
                continue
            if call.context.in_loop:
                if "PT-23" in enabled:
                    findings.append(make_finding(RULES_BY_ID["PT-23"], facts, call.node))
                continue
            if "PT-02" not in enabled:
                continue
            scope = call.context.function_index
            later = any(
                other is not call
                and is_backward_call(other)
                and other.context.function_index == scope
                and other.span.start_offset > call.span.end_offset
                for other in backward_calls
            )
            if not later:
                findings.append(make_finding(RULES_BY_ID["PT-02"], facts, call.node))

    if "PT-04" in enabled:
        for call in facts.calls:
            if not is_backward_call(call) or not call.context.in_loop:
                continue
            training_loops = [
                i for i in call.context.loop_indexes if facts.loops[i].is_training
            ]
            if not training_loops:
                continue
            innermost = training_loops[-1]
            body = facts.calls_in_loop(innermost)
            if not any(_is_zero_grad(c) for c in body):
                findings.append(make_finding(RULES_BY_ID["PT-04"], facts, call.node))

    pt26_spans: set[tuple[int, int]] = set()
    if "PT-26" in enabled or "PT-05" in enabled:
        eval_calls = [
            c for c in facts.calls if c.final_segment == "eval" and c.receiver_text
        ]
        for call in facts.calls:
            if call.callee_text is None:
                continue
            scope = call.context.function_index
            was_evaled = any(
                e.receiver_text == call.callee_text
                and e.context.function_index == scope
                and e.span.end_offset <= call.span.start_offset
                for e in eval_calls
            )
            if was_evaled and not grad_disabled(call.node, facts):
                pt26_spans.add((call.span.start_offset, call.span.end_offset))
                if "PT-26" in enabled:
                    message = RULES_BY_ID["PT-26"].message.format(name=call.callee_text)
                    findings.append(make_finding(RULES_BY_ID["PT-26"], facts, call.node, message))

    if "PT-05" in enabled:
        eval_receivers = {
            c.receiver_text for c in facts.calls if c.final_segment == "eval" and c.receiver_text
        }
        for fn_index, fn in enumerate(facts.functions):
            if fn.kind != INFERENCE:
                continue
            freezes_grads = any(
                fn.span.contains(a.span)
                and any(
                    isinstance(t, ast.Attribute) and t.attr == "requires_grad"
                    for t in a.targets
                )
                and isinstance(a.value, ast.Constant)
                and a.value.value is False
                for a in facts.assignments
            )
            if freezes_grads:
                continue
            for call in facts.calls:
                if not fn.span.contains(call.span) or call.callee_text is None:
                    continue
                final = (call.final_segment or "").lower()
                model_like = (
                    "model" in final or "net" in final or call.callee_text in eval_receivers
                )
                if not model_like:
                    continue
                if grad_disabled(call.node, facts):
                    continue
                key = (call.span.start_offset, call.span.end_offset)
                if key in pt26_spans:
                    continue
                message = RULES_BY_ID["PT-05"].message.format(name=call.callee_text)
                findings.append(make_finding(RULES_BY_ID["PT-05"], facts, call.node, message))

    if "PT-21" in enabled:
        for fn in facts.functions:
            if fn.kind != AUTOGRAD_BACKWARD:
                continue
            ctx_name = fn.params[0] if fn.params else "ctx"
            callee_ids = {
                id(node.func)
                for node in ast.walk(fn.node)
                if isinstance(node, ast.Call) and isinstance(node.func, ast.Attribute)
            }
            for node in ast.walk(fn.node):
                if (
                    isinstance(node, ast.Attribute)
                    and isinstance(node.ctx, ast.Load)
                    and isinstance(node.value, ast.Name)
                    and node.value.id == ctx_name
                    and node.attr not in _CTX_BUILTINS
                    and id(node) not in callee_ids
                ):
                    message = RULES_BY_ID["PT-21"].message.format(name=node.attr)
                    findings.append(make_finding(RULES_BY_ID["PT-21"], facts, node, message))

    if "PT-24" in enabled:
        grad_calls = [c for c in facts.calls if c.qname == "torch.autograd.grad"]
        for call in grad_calls:
            inner = [
                n
                for n in ast.walk(call.node)
                if isinstance(n, ast.Call)
                and n is not call.node
                and facts.qname(n.func) == "torch.autograd.grad"
            ]
            if any(not _node_kw_is_true(n, "create_graph") for n in inner):
                findings.append(make_finding(RULES_BY_ID["PT-24"], facts, call.node))
        grad_bindings: dict[tuple, list] = {}
        for assign in facts.assignments:
            if isinstance(assign.value, ast.Call) and facts.qname(assign.value.func) == "torch.autograd.grad":
                scope = assign.context.function_index
                grad_bindings.setdefault(scope, []).append(assign)
        for call in grad_calls:
            scope = call.context.function_index
            used = _names_in(call.node)
            used.discard((call.callee_text or "").split(".")[0])
            for assign in grad_bindings.get(scope, ()):
                if assign.span.end_offset > call.span.start_offset:
                    continue
                if _node_kw_is_true(assign.value, "create_graph"):
                    continue
                if set(assign.target_names) & used:
                    findings.append(make_finding(RULES_BY_ID["PT-24"], facts, call.node))
                    break

    if "PT-25" in enabled:
        for assign in facts.assignments:
            if assign.kind not in ("assign", "aug"):
                continue
            stat = None
            for target in assign.targets:
                if (
                    isinstance(target, ast.Attribute)
                    and target.attr in _RUNNING_STATS
                    and isinstance(target.value, ast.Name)
                    and target.value.id == "self"
                ):
                    stat = target.attr
            if stat is None or assign.value is None:
                continue
            detached = (
                isinstance(assign.value, ast.Call)
                and isinstance(assign.value.func, ast.Attribute)
                and assign.value.func.attr == "detach"
            )
            if detached or grad_disabled(assign.node, facts):
                continue
            message = RULES_BY_ID["PT-25"].message.format(name=stat)
            findings.append(make_finding(RULES_BY_ID["PT-25"], facts, assign.node, message))

    return _dedupe(findings)


def _is_zero_grad(call) -> bool:
    segment = (call.final_segment or "").lower()
    return "zero_grad" in segment or ("zero" in segment and "grad" in segment)


def _node_kw_is_true(call_node: ast.Call, name: str) -> bool:
    for kw in call_node.keywords:
        if kw.arg == name and isinstance(kw.value, ast.Constant) and kw.value.value is True:
            return True
    return False


# -- loop and pipeline checker ------------------------------------------------


def _is_dataloader_call(call) -> bool:
    if call.qname == "torch.utils.data.DataLoader":
        return True
    return call.final_segment == "DataLoader" and _torch_rooted(call.qname)


def check_loops_and_pipeline(
    facts: FileFacts, enabled: set[str], thresholds: dict | None = None
) -> list[Finding]:
    findings: list[Finding] = []
    limits = dict(DEFAULT_THRESHOLDS)
    if thresholds:
        limits.update(thresholds)

    for loop in facts.loops:
        if loop.kind != "for":
            continue
        iter_node = loop.node.iter
        if not isinstance(iter_node, ast.Call):
            continue
        qname = facts.qname(iter_node.func)
        final = None
        if isinstance(iter_node.func, ast.Name):
            final = iter_node.func.id
        elif isinstance(iter_node.func, ast.Attribute):
            final = iter_node.func.attr
        if "PT-03" in enabled and qname == "itertools.cycle":
            findings.append(make_finding(RULES_BY_ID["PT-03"], facts, iter_node))
        if "PT-10" in enabled and final in ("zip", "cycle"):
            loaderish = any(
                "loader" in name.lower()
                for arg in iter_node.args
                for name in _names_in(arg)
            )
            if loaderish:
                message = RULES_BY_ID["PT-10"].message.format(fn=final)
                findings.append(make_finding(RULES_BY_ID["PT-10"], facts, iter_node, message))

    if "PT-08" in enabled:
        for call in facts.calls:
            if not _is_dataloader_call(call):
                continue
            if call.context.in_loop:
                findings.append(make_finding(RULES_BY_ID["PT-08"], facts, call.node))
            elif _kw_is_true(call, "persistent_workers") and _kw_int(call, "num_workers") == 0:
                message = "DataLoader sets persistent_workers=True with num_workers=0, so workers never persist"
                findings.append(make_finding(RULES_BY_ID["PT-08"], facts, call.node, message))

    if "PT-22" in enabled:
        limit = limits.get("batch_size_threshold", 1024)
        for call in facts.calls:
            if call.final_segment != "DataLoader" and call.qname != "torch.utils.data.DataLoader":
                continue
            size = _kw_int(call, "batch_size")
            if size is not None and size >= limit:
                message = RULES_BY_ID["PT-22"].message.format(n=size, t=limit)
                findings.append(make_finding(RULES_BY_ID["PT-22"], facts, call.node, message))

    if "PT-28" in enabled:
        for call in facts.calls:
            if call.context.in_loop and call.qname in (
                "torch.distributed.new_group",
                "torch.distributed.init_process_group",
            ):
                findings.append(make_finding(RULES_BY_ID["PT-28"], facts, call.node))

    if "PT-30" in enabled:
        for call in facts.calls:
            if call.context.in_loop and call.qname in ("torch.jit.trace", "torch.jit.script"):
                findings.append(make_finding(RULES_BY_ID["PT-30"], facts, call.node))

    if "PT-11" in enabled or "PT-18" in enabled:
        for assign in facts.assignments:
            if not assign.context.in_loop or assign.value is None:
                continue
            carried = set(assign.target_names)
            for node in ast.walk(assign.value):
                if not isinstance(node, ast.Call):
                    continue
                qname = facts.qname(node.func)
                arg_names = set()
                for arg in node.args:
                    arg_names |= _names_in(arg)
                if (
                    "PT-11" in enabled
                    and qname in ("torch.cat", "torch.stack")
                    and (carried & arg_names)
                ):
                    name = sorted(carried & arg_names)[0]
                    message = RULES_BY_ID["PT-11"].message.format(fn=qname, name=name)
                    findings.append(make_finding(RULES_BY_ID["PT-11"], facts, node, message))
                if (
                    "PT-18" in enabled
                    and qname in ("torch.mm", "torch.matmul", "torch.bmm")
                    and (assign.kind == "aug" or (carried & arg_names))
                ):
                    findings.append(make_finding(RULES_BY_ID["PT-18"], facts, node))

    if "PT-29" in enabled:
        module_classes = {
            cls.name for cls in facts.classes if cls.is_module_subclass
        }
        for loop_index, loop in enumerate(facts.loops):
            if not loop.is_training:
                continue
            for assign in facts.assignments_in_loop(loop_index):
                if assign.kind != "assign" or not isinstance(assign.value, ast.Call):
                    continue
                if len(assign.target_names) != 1 or len(assign.targets) != 1:
                    continue
                if not isinstance(assign.targets[0], ast.Name):
                    continue
                callee = assign.value.func
                qname = facts.qname(callee)
                in_file = (
                    isinstance(callee, ast.Name) and callee.id in module_classes
                )
                if in_file or (qname is not None and qname.startswith("torch.nn.")):
                    message = RULES_BY_ID["PT-29"].message.format(name=assign.target_names[0])
                    findings.append(make_finding(RULES_BY_ID["PT-29"], facts, assign.node, message))

    return _dedupe(findings)


# -- references and memory checker --------------------------------------------


def check_references_and_memory(facts: FileFacts, enabled: set[str]) -> list[Finding]:
    findings: list[Finding] = []

    if "PT-01" in enabled:
        clearers = {
            call.receiver_text
            for call in facts.calls
            if call.final_segment in ("clear", "pop", "popitem") and call.receiver_text
        }
        deleted = {text for d in facts.deletes for text in d.target_texts}
        for assign in facts.assignments:
            if assign.kind != "assign" or not isinstance(assign.value, ast.Call):
                continue
            in_forward = _function_of_kind(facts, assign.context.function_index, FORWARD_METHOD)
            if not assign.context.in_loop and not in_forward:
                continue
            for target, text in zip(assign.targets, assign.target_texts or ()):
                if "cache" not in text.lower():
                    continue
                if not isinstance(target, (ast.Subscript, ast.Attribute)):
                    continue
                if text in clearers or text in deleted:
                    continue
                message = RULES_BY_ID["PT-01"].message.format(name=text)
                findings.append(make_finding(RULES_BY_ID["PT-01"], facts, assign.node, message))

    if "PT-06" in enabled:
        for fn in facts.functions:
            if fn.kind != INFERENCE:
                continue
            for call in facts.calls:
                if (
                    call.final_segment == "append"
                    and call.context.in_loop
                    and fn.span.contains(call.span)
                    and call.node.args
                    and isinstance(call.node.args[0], ast.Call)
                ):
                    arg = call.node.args[0]
                    final = arg.func.attr if isinstance(arg.func, ast.Attribute) else None
                    if final not in _DETACH_SEGMENTS:
                        findings.append(make_finding(RULES_BY_ID["PT-06"], facts, call.node))

    if "PT-07" in enabled:
        removed = {
            call.receiver_text
            for call in facts.calls
            if call.final_segment == "remove" and call.receiver_text
        }
        discarded = _expr_statement_value_ids(facts)
        stored: dict[int, tuple[str, ...]] = {}
        for assign in facts.assignments:
            if assign.value is not None:
                stored[id(assign.value)] = tuple(assign.target_texts) or tuple(assign.target_names)
        for call in facts.calls:
            if not call.final_segment or not _HOOK_PATTERN.match(call.final_segment):
                continue
            if id(call.node) in stored:
                names = stored[id(call.node)]
                if names and all(name in removed for name in names):
                    continue
                findings.append(make_finding(RULES_BY_ID["PT-07"], facts, call.node))
            elif id(call.node) in discarded:
                findings.append(make_finding(RULES_BY_ID["PT-07"], facts, call.node))

    if "PT-09" in enabled:
        for loop_index, loop in enumerate(facts.loops):
            if not loop.is_training:
                continue
            backward_names = {
                call.receiver_text
                for call in facts.calls_in_loop(loop_index)
                if is_backward_call(call) and call.receiver_text and "." not in call.receiver_text
            }
            if not backward_names:
                continue
            for assign in facts.assignments_in_loop(loop_index):
                if assign.kind != "aug" or assign.value is None:
                    continue
                raw = _raw_name_nodes(assign.value, backward_names)
                if raw:
                    message = RULES_BY_ID["PT-09"].message.format(name=raw[0].id)
                    findings.append(make_finding(RULES_BY_ID["PT-09"], facts, assign.node, message))
            for call in facts.calls_in_loop(loop_index):
                if call.final_segment != "append" or not call.node.args:
                    continue
                raw = _raw_name_nodes(call.node.args[0], backward_names)
                if raw:
                    message = RULES_BY_ID["PT-09"].message.format(name=raw[0].id)
                    findings.append(make_finding(RULES_BY_ID["PT-09"], facts, call.node, message))

    if "PT-12" in enabled and facts.unit_kind == "notebook":
        findings.extend(_check_shell_references(facts))

    if "PT-13" in enabled:
        for fn in facts.functions:
            if fn.kind != AUTOGRAD_FORWARD:
                continue
            ctx_name = fn.params[0] if fn.params else "ctx"
            params = set(fn.params[1:])
            local_names: set[str] = set()
            fn_assigns = sorted(
                (a for a in facts.assignments if fn.span.contains(a.span)),
                key=lambda a: a.span.start_offset,
            )
            for assign in fn_assigns:
                if assign.value is None:
                    local_names.update(assign.target_names)
                    continue
                mentions_param = bool(_names_in(assign.value) & params)
                for target in assign.targets:
                    if (
                        isinstance(target, ast.Attribute)
                        and isinstance(target.value, ast.Name)
                        and target.value.id == ctx_name
                        and mentions_param
                    ):
                        message = RULES_BY_ID["PT-13"].message.format(name=f"{ctx_name}.{target.attr}")
                        findings.append(make_finding(RULES_BY_ID["PT-13"], facts, assign.node, message))
                    elif (
                        isinstance(target, ast.Subscript)
                        and isinstance(target.value, ast.Name)
                        and target.value.id not in params
                        and target.value.id != ctx_name
                        and target.value.id not in local_names
                        and mentions_param
                    ):
                        message = RULES_BY_ID["PT-13"].message.format(name=target.value.id)
                        findings.append(make_finding(RULES_BY_ID["PT-13"], facts, assign.node, message))
                local_names.update(assign.target_names)

    if "PT-14" in enabled:
        for call in facts.calls:
            if call.qname not in (
                "torch.autograd.detect_anomaly",
                "torch.autograd.set_detect_anomaly",
            ):
                continue
            if not call.node.args:
                continue
            first = call.node.args[0]
            if not (isinstance(first, ast.Constant) and bool(first.value)):
                continue
            scope = call.context.function_index
            if scope is None or facts.functions[scope].kind == TRAINING:
                findings.append(make_finding(RULES_BY_ID["PT-14"], facts, call.node))

    if "PT-15" in enabled:
        findings.extend(_check_dim_retention(facts))

    if "PT-16" in enabled:
        for assign in facts.assignments:
            if assign.kind != "assign" or not isinstance(assign.value, ast.Name):
                continue
            if assign.value.id != "self" or assign.context.class_index is None:
                continue
            for target in assign.targets:
                if (
                    isinstance(target, ast.Attribute)
                    and isinstance(target.value, ast.Attribute)
                    and isinstance(target.value.value, ast.Name)
                    and target.value.value.id == "self"
                ):
                    name = f"{target.value.attr}.{target.attr}"
                    message = RULES_BY_ID["PT-16"].message.format(name=name)
                    findings.append(make_finding(RULES_BY_ID["PT-16"], facts, assign.node, message))

    if "PT-17" in enabled:
        autograd_indexes = {
            i for i, cls in enumerate(facts.classes) if cls.is_autograd_function
        }
        for fn in facts.functions:
            if fn.class_index in autograd_indexes and fn.name in ("forward", "backward"):
                if "staticmethod" not in fn.decorator_qnames:
                    message = f"autograd Function method '{fn.name}' is not a @staticmethod"
                    findings.append(make_finding(RULES_BY_ID["PT-17"], facts, fn.node, message))
        for call in facts.calls:
            if (
                call.callee_text == "self.save_for_backward"
                and call.context.class_index in autograd_indexes
            ):
                message = "self.save_for_backward accumulates state on the Function instance"
                findings.append(make_finding(RULES_BY_ID["PT-17"], facts, call.node, message))

    if "PT-19" in enabled:
        for call in facts.calls:
            if call.final_segment not in ("append", "add") or not call.receiver_text:
                continue
            receiver = call.receiver_text.lower()
            if not any(word in receiver for word in ("memory", "buffer", "replay")):
                continue
            if not call.node.args:
                continue
            arg = call.node.args[0]
            torch_bound = facts.bound_call_qnames(call.context.function_index)
            tensor_typed = False
            if isinstance(arg, ast.Call):
                final = arg.func.attr if isinstance(arg.func, ast.Attribute) else None
                if final in _DETACH_SEGMENTS:
                    continue
                tensor_typed = _is_torch_root(facts.qname(arg.func))
            elif isinstance(arg, ast.Name):
                tensor_typed = _is_torch_root(torch_bound.get(arg.id))
            if tensor_typed:
                message = RULES_BY_ID["PT-19"].message.format(name=call.receiver_text)
                findings.append(make_finding(RULES_BY_ID["PT-19"], facts, call.node, message))

    if "PT-20" in enabled:
        for fn in facts.functions:
            if fn.kind != FORWARD_METHOD:
                continue
            params = set(fn.params[1:])
            registered = _registered_attribute_names(facts, fn.class_index)
            for assign in facts.assignments:
                if not fn.span.contains(assign.span) or assign.value is None:
                    continue
                if not (_names_in(assign.value) & params):
                    continue
                for target in assign.targets:
                    if (
                        isinstance(target, ast.Attribute)
                        and isinstance(target.value, ast.Name)
                        and target.value.id == "self"
                        and target.attr not in registered
                    ):
                        message = RULES_BY_ID["PT-20"].message.format(name=target.attr)
                        findings.append(make_finding(RULES_BY_ID["PT-20"], facts, assign.node, message))

    if "PT-27" in enabled:
        for delete in facts.deletes:
            scope = delete.context.function_index
            bound = facts.bound_call_qnames(scope)
            for name in delete.target_texts:
                if "." in name or not _is_torch_root(bound.get(name)):
                    continue
                released = any(
                    call.qname == "torch.cuda.empty_cache"
                    and call.context.function_index == scope
                    and call.span.start_offset > delete.span.end_offset
                    for call in facts.calls
                )
                if not released:
                    message = RULES_BY_ID["PT-27"].message.format(name=name)
                    findings.append(make_finding(RULES_BY_ID["PT-27"], facts, delete.node, message))

    return _dedupe(findings)


def _is_torch_root(qname: str | None) -> bool:
    return qname is not None and qname.split(".")[0] == "torch"


def _registered_attribute_names(facts: FileFacts, class_index: int | None) -> set[str]:
    if class_index is None:
        return set()
    span = facts.classes[class_index].span
    names: set[str] = set()
    for call in facts.calls:
        if (
            call.final_segment in ("register_buffer", "register_parameter")
            and call.receiver_text == "self"
            and span.contains(call.span)
            and call.node.args
            and isinstance(call.node.args[0], ast.Constant)
            and isinstance(call.node.args[0].value, str)
        ):
            names.add(call.node.args[0].value)
    return names


def _check_dim_retention(facts: FileFacts) -> list[Finding]:
    findings: list[Finding] = []
    rule = RULES_BY_ID["PT-15"]

    def _is_keepdim_reduction(node: ast.AST) -> bool:
        if not isinstance(node, ast.Call):
            return False
        final = None
        if isinstance(node.func, ast.Attribute):
            final = node.func.attr
        elif isinstance(node.func, ast.Name):
            final = node.func.id
        if final not in _REDUCTIONS:
            return False
        if not (isinstance(node.func, ast.Attribute) or _is_torch_root(facts.qname(node.func))):
            return False
        return _node_kw_is_true(node, "keepdim")

    for call in facts.calls:
        if (
            call.final_segment == "squeeze"
            and isinstance(call.node.func, ast.Attribute)
            and _is_keepdim_reduction(call.node.func.value)
        ):
            findings.append(make_finding(rule, facts, call.node.func.value))

    for block in _iter_blocks(facts.tree.root):
        for index, stmt in enumerate(block):
            if not isinstance(stmt, ast.Assign) or not _is_keepdim_reduction(stmt.value):
                continue
            if len(stmt.targets) != 1 or not isinstance(stmt.targets[0], ast.Name):
                continue
            name = stmt.targets[0].id
            for later in block[index + 1 : index + 3]:
                squeezed = any(
                    isinstance(node, ast.Call)
                    and isinstance(node.func, ast.Attribute)
                    and node.func.attr == "squeeze"
                    and isinstance(node.func.value, ast.Name)
                    and node.func.value.id == name
                    for node in ast.walk(later)
                )
                if squeezed:
                    findings.append(make_finding(rule, facts, stmt.value))
                    break
    return findings


def _check_shell_references(facts: FileFacts) -> list[Finding]:
    findings: list[Finding] = []
    rule = RULES_BY_ID["PT-12"]
    unit = facts.tree.unit
    module_classes = {cls.name for cls in facts.classes if cls.is_module_subclass}
    deleted = {text for d in facts.deletes for text in d.target_texts}
    lines = unit.text.split("\n")

    def _xdel_released(name: str) -> bool:
        pattern = re.compile(rf"^\s*[#%]\s*xdel\s+{re.escape(name)}\b")
        return any(pattern.match(line) for line in lines)

    for assign in facts.assignments:
        context = assign.context
        if context.function_index is not None or context.class_index is not None or context.in_loop:
            continue
        if assign.kind != "assign" or not isinstance(assign.value, ast.Call):
            continue
        if len(assign.targets) != 1 or not isinstance(assign.targets[0], ast.Name):
            continue
        name = assign.targets[0].id
        qname = facts.qname(assign.value.func)
        producer = _is_torch_root(qname) or (
            isinstance(assign.value.func, ast.Name) and assign.value.func.id in module_classes
        )
        if not producer:
            continue
        if name in deleted or _xdel_released(name):
            continue
        cell = unit.cell_of_line(assign.span.start_line)
        cell_index = cell.index if cell else -1
        reassigned_later = False
        for other in facts.assignments:
            if other.node is assign.node or name not in other.target_names:
                continue
            other_cell = unit.cell_of_line(other.span.start_line)
            if other_cell is not None and other_cell.index > cell_index:
                reassigned_later = True
                break
        if reassigned_later:
            continue
        message = rule.message.format(name=name)
        findings.append(make_finding(rule, facts, assign.node, message))
    return findings
