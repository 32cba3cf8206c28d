"""Immutable catalog: rule metadata, best practices, and agreement metrics.

The catalog binds 46 rules (30 PyTorch, 16 TensorFlow/Keras) to 50
remediation practices in a bipartite cover: every rule lists at least
one practice and every practice is listed by at least one rule.
load_catalog validates every count invariant and fails loudly.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, NamedTuple, Sequence


class CatalogError(Exception):
    """Base class for catalog construction and lookup failures."""


class CatalogInvalid(CatalogError):
    """The assembled catalog violates a count or linkage invariant."""


class UnknownRule(CatalogError):
    """A rule id that does not exist in the catalog."""


class LengthMismatch(CatalogError):
    """Two label vectors of different lengths."""


class EmptyInput(CatalogError):
    """An empty label vector where at least one label is required."""


class Category(str, enum.Enum):
    """Root-cause category of a smell."""

    RESOURCE_MANAGEMENT = "ResourceManagement"
    GRAPH_AND_GRADIENT = "GraphAndGradient"
    TRAINING_PIPELINE = "TrainingPipeline"
    LOOP_LIFECYCLE = "LoopLifecycle"
    GRAPH_MANAGEMENT = "GraphManagement"
    FRAMEWORK_ABSTRACTION = "FrameworkAbstraction"
    ENVIRONMENT_CONFIG = "EnvironmentConfig"


class FrameworkTag(str, enum.Enum):
    """Framework specificity of a smell."""

    GENERAL = "G"
    PYTORCH = "P"
    TENSORFLOW = "T"
    KERAS = "K"
    TF_KERAS = "TK"


TAG_LABELS = {
    FrameworkTag.GENERAL: "general",
    FrameworkTag.PYTORCH: "PyTorch-specific",
    FrameworkTag.TENSORFLOW: "TensorFlow-specific",
    FrameworkTag.KERAS: "Keras-specific",
    FrameworkTag.TF_KERAS: "shared TensorFlow/Keras",
}


class Confidence(str, enum.Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


CONFIDENCE_RANK = {Confidence.HIGH: 2, Confidence.MEDIUM: 1, Confidence.LOW: 0}


@dataclass(frozen=True)
class BestPractice:
    """One recommended remediation, keyed by id (P01..P30, T01..T15, K01..K05)."""

    id: str
    name: str
    framework: str
    summary: str


@dataclass(frozen=True)
class RuleSpec:
    """Static metadata for one detection rule."""

    id: str
    name: str
    tag: FrameworkTag
    category: Category
    confidence: Confidence
    frameworks: frozenset[str]
    practices: tuple[str, ...]
    trigger: str
    message: str
    default_enabled: bool = True


_P = "pytorch"
_T = "tensorflow"
_K = "keras"

PRACTICES: tuple[BestPractice, ...] = (
    BestPractice("P01", "Context Manager Usage", _P,
                 "Wrap inference code in a torch.no_grad() context so autograd records no history for it."),
    BestPractice("P02", "Unregister Hooks and Avoid Self-References", _P,
                 "Keep the handle returned by hook registration and call remove() when done; avoid stashing hook state on the module itself."),
    BestPractice("P03", "Optimize DataLoader Workers and Persistence for Efficiency", _P,
                 "Build the DataLoader once, give it a positive num_workers, and only set persistent_workers=True when workers exist."),
    BestPractice("P04", "Proper Tensor Detachment", _P,
                 "Call detach() or item() on tensors before storing them beyond the step so the autograd graph can be freed."),
    BestPractice("P05", "Avoiding Zipping or Cycling the DataLoader", _P,
                 "Iterate the loader directly; zip() and cycle() wrappers pin worker iterators and keep batches alive."),
    BestPractice("P06", "Use In-Place Tensor Operations", _P,
                 "Write results into a preallocated buffer (for example index_copy_ or add_) instead of growing a tensor with cat or stack each iteration."),
    BestPractice("P07", "Explicit GPU Memory Release", _P,
                 "Drop references to finished tensors and call torch.cuda.empty_cache() so the allocator returns device memory."),
    BestPractice("P08", "Proper Memory Release", _P,
                 "In interactive shells, delete finished variables with del or the %xdel magic so the kernel stops pinning their memory."),
    BestPractice("P09", "Store Intermediate Tensors Explicitly During Backward Pass", _P,
                 "Pass tensors the backward pass needs through ctx.save_for_backward instead of ad-hoc object state."),
    BestPractice("P10", "Removing Debug Artifacts", _P,
                 "Strip anomaly detection and other debug toggles from production training code; they retain extra graph state."),
    BestPractice("P11", "Dimension Squeezing", _P,
                 "Do not reduce with keepdim=True only to squeeze the result; request the reduced shape directly."),
    BestPractice("P12", "Breaking Reference Cycles", _P,
                 "Use weak references or explicit teardown instead of child objects pointing back at their owner."),
    BestPractice("P13", "Static Methods to Avoid Object Accumulation", _P,
                 "Declare autograd Function forward and backward as @staticmethod and carry state on ctx, not on the instance."),
    BestPractice("P14", "Offload Non-Critical Operations to CPU", _P,
                 "Run bookkeeping matrix math on CPU copies so large GPU buffers are not retained across iterations."),
    BestPractice("P15", "Use NumPy to Prevent Tensor Retention", _P,
                 "Convert tensors headed for long-lived buffers to numpy arrays (after cpu()) so no graph references survive."),
    BestPractice("P16", "Local Variable Usage", _P,
                 "Keep forward-pass intermediates in local variables; attributes on the module outlive the call."),
    BestPractice("P17", "Proper Tensor Management with ctx.save_for_backward()", _P,
                 "Save tensors with ctx.save_for_backward in forward and read ctx.saved_tensors in backward; do not hang attributes off ctx."),
    BestPractice("P18", "Manual Cache Release", _P,
                 "Clear grown caches explicitly (clear() plus torch.cuda.empty_cache()) at phase boundaries."),
    BestPractice("P19", "Batch Adjustment and Sequence Optimization", _P,
                 "Size batches to device memory and prefer gradient accumulation or shorter sequences over oversized batches."),
    BestPractice("P20", "Fine-Tune Gradients with torch.autograd.grad", _P,
                 "Compute exactly the gradients you need with torch.autograd.grad instead of retaining the whole graph across backward calls."),
    BestPractice("P21", "Clear Graph and Backpropagate Immediately", _P,
                 "Call backward as soon as the loss is ready and let the graph free; only pass retain_graph=True when a second backward follows."),
    BestPractice("P22", "Avoid Nested grad() Calls", _P,
                 "For second derivatives, set create_graph=True on the inner grad call rather than nesting plain grad calls."),
    BestPractice("P23", "Gradient Detachment for Running Stats", _P,
                 "Update running statistics from detached values or under no_grad so the stats never join the autograd graph."),
    BestPractice("P24", "Disable Gradients During Inference", _P,
                 "Switch the model to eval() and run prediction under no_grad or inference_mode."),
    BestPractice("P25", "Proper Memory Release", _P,
                 "Follow del of a large CUDA tensor with torch.cuda.empty_cache() so the freed block leaves the allocator pool."),
    BestPractice("P26", "Avoid Infinite Loops", _P,
                 "Give loops explicit exit conditions; never train over itertools.cycle without a bound."),
    BestPractice("P27", "Initialize Groups Outside the Loop and Reuse Them", _P,
                 "Create distributed process groups once before the loop and reuse the handles inside it."),
    BestPractice("P28", "Avoid Reinitializing Encoder and Decoder Inside Training Loop", _P,
                 "Construct encoder and decoder models once outside the training loop and reuse them across epochs."),
    BestPractice("P29", "Clear Gradients at Training Loop Start", _P,
                 "Call optimizer.zero_grad() at the start of every iteration, before backward."),
    BestPractice("P30", "Subprocess-Based Isolation", _P,
                 "Run leak-prone steps such as repeated jit tracing in a subprocess so all memory is reclaimed on exit."),
    BestPractice("T01", "Avoid Training Inside a Loop", _T,
                 "Hoist repeated build-and-train cycles out of loops, or isolate each cycle's resources before the next begins."),
    BestPractice("T02", "Optimized TensorFlow Function Usage", _T,
                 "Prefer vectorized or tf.function-compiled operations over per-iteration Python-level graph edits."),
    BestPractice("T03", "Loop Exit Condition Enforcement", _T,
                 "Bound loops that create tensors or models to a known iteration count with an enforced exit condition."),
    BestPractice("T04", "Resource Reuse and Memory Clearing", _T,
                 "Reuse buffers across iterations and clear accumulating collections when a phase completes."),
    BestPractice("T05", "TensorFlow Operation Encapsulation", _T,
                 "Wrap raw TensorFlow ops used as model steps inside Layer subclasses so Keras can track and free them."),
    BestPractice("T06", "Replace Lambda with Custom Layers", _T,
                 "Implement multi-step or stateful logic as a custom Layer subclass; encapsulate custom operations in subclasses instead of Lambda wrappers."),
    BestPractice("T07", "Avoid Model Recreation in Loops", _T,
                 "Build the model once outside the loop; when per-iteration rebuilds are required, clear the session each time."),
    BestPractice("T08", "Efficient Iterator Management", _T,
                 "Iterate a tf.data pipeline once per pass; do not feed the whole Dataset to predict() inside a loop."),
    BestPractice("T09", "Manual Tensor Disposal", _T,
                 "Delete large tensors when finished so their backing memory can be freed before the next iteration."),
    BestPractice("T10", "Session and Resource Cleanup", _T,
                 "Close sessions explicitly with close() as soon as their work is done."),
    BestPractice("T11", "Context Manager Resource Control", _T,
                 "Create sessions in a with block so every exit path closes them."),
    BestPractice("T12", "Graph Isolation and Optimization", _T,
                 "Scope per-iteration graph building inside its own Graph().as_default() block, or move op creation out of the loop."),
    BestPractice("T13", "Use Placeholders for Large Data", _T,
                 "Feed large arrays through placeholders or input pipelines instead of embedding them as graph constants."),
    BestPractice("T14", "Explicit GPU Memory Cleanup", _T,
                 "After releasing a model, call clear_session() and collect garbage so device memory actually returns."),
    BestPractice("T15", "Preemptive Tensor Reshaping", _T,
                 "Reshape operands to matching ranks before arithmetic so broadcasting does not materialize oversized temporaries."),
    BestPractice("K01", "Session Reset and Checkpointing", _K,
                 "Periodically reset the backend session during long experiment loops and reload weights from checkpoints."),
    BestPractice("K02", "Resource Reset and Cleanup", _K,
                 "Call clear_session() between rebuilds of multiple models so stale graphs do not pile up."),
    BestPractice("K03", "Adjusting Batch Size", _K,
                 "Choose fit/predict batch sizes that fit device memory; oversized minibatches exhaust it outright."),
    BestPractice("K04", "Consistent Environment Configuration", _K,
                 "Point every CUDA-related environment variable at one toolkit version; mixed paths load mismatched libraries."),
    BestPractice("K05", "GridSearchCV Parallelism Control", _K,
                 "Control fan-out by setting n_jobs=1 for GPU-backed estimators; parallel workers multiply GPU memory use."),
)

_PRACTICE_INDEX = {practice.id: practice for practice in PRACTICES}


@dataclass(frozen=True)
class Catalog:
    """Validated, immutable rule and practice registry."""

    rules: tuple[RuleSpec, ...]
    practices: tuple[BestPractice, ...]
    tensorflow_side: tuple[str, ...]
    keras_side: tuple[str, ...]
    version: str

    def rule(self, rule_id: str) -> RuleSpec:
        for rule in self.rules:
            if rule.id == rule_id:
                return rule
        raise UnknownRule(f"unknown rule id: {rule_id}")

    def practice(self, practice_id: str) -> BestPractice:
        practice = _PRACTICE_INDEX.get(practice_id)
        if practice is None:
            raise UnknownRule(f"unknown practice id: {practice_id}")
        return practice

    def rule_ids(self) -> tuple[str, ...]:
        return tuple(rule.id for rule in self.rules)

    def has_rule(self, rule_id: str) -> bool:
        return any(rule.id == rule_id for rule in self.rules)


def practice_names(practice_ids: Sequence[str]) -> str:
    return ", ".join(_PRACTICE_INDEX[pid].name for pid in practice_ids)


_EXPECTED = {
    "total_rules": 46,
    "pt_rules": 30,
    "tk_rules": 16,
    "pt_tags": {FrameworkTag.GENERAL: 21, FrameworkTag.PYTORCH: 9},
    "tk_tags": {
        FrameworkTag.GENERAL: 7,
        FrameworkTag.TENSORFLOW: 4,
        FrameworkTag.KERAS: 1,
        FrameworkTag.TF_KERAS: 4,
    },
    "practices": 50,
    "practice_split": {"P": 30, "T": 15, "K": 5},
}


def _validate(rules: Sequence[RuleSpec]) -> None:
    ids = [rule.id for rule in rules]
    if len(ids) != len(set(ids)):
        raise CatalogInvalid("duplicate rule ids")
    if len(rules) != _EXPECTED["total_rules"]:
        raise CatalogInvalid(f"expected 46 rules, found {len(rules)}")
    pt = [rule for rule in rules if rule.id.startswith("PT-")]
    tk = [rule for rule in rules if rule.id.startswith("TK-")]
    if len(pt) != _EXPECTED["pt_rules"] or len(tk) != _EXPECTED["tk_rules"]:
        raise CatalogInvalid(f"side split is {len(pt)}/{len(tk)}, expected 30/16")
    pt_tags = Counter(rule.tag for rule in pt)
    if dict(pt_tags) != _EXPECTED["pt_tags"]:
        raise CatalogInvalid(f"PyTorch tag split {dict(pt_tags)} is wrong")
    tk_tags = Counter(rule.tag for rule in tk)
    if dict(tk_tags) != _EXPECTED["tk_tags"]:
        raise CatalogInvalid(f"TensorFlow/Keras tag split {dict(tk_tags)} is wrong")
    if len(PRACTICES) != _EXPECTED["practices"]:
        raise CatalogInvalid(f"expected 50 practices, found {len(PRACTICES)}")
    split = Counter(practice.id[0] for practice in PRACTICES)
    if dict(split) != _EXPECTED["practice_split"]:
        raise CatalogInvalid(f"practice split {dict(split)} is wrong")
    referenced: set[str] = set()
    for rule in rules:
        if not rule.practices:
            raise CatalogInvalid(f"{rule.id} lists no practices")
        if not rule.message or not rule.trigger:
            raise CatalogInvalid(f"{rule.id} lacks a message or trigger")
        for pid in rule.practices:
            if pid not in _PRACTICE_INDEX:
                raise CatalogInvalid(f"{rule.id} references unknown practice {pid}")
            referenced.add(pid)
    unreferenced = set(_PRACTICE_INDEX) - referenced
    if unreferenced:
        raise CatalogInvalid(f"practices never referenced by any rule: {sorted(unreferenced)}")


def load_catalog() -> Catalog:
    """Assemble and validate the catalog. Raises CatalogInvalid on violation."""
    from . import rules_pytorch, rules_tfkeras

    rules = tuple(rules_pytorch.RULES) + tuple(rules_tfkeras.RULES)
    _validate(rules)
    return Catalog(
        rules=rules,
        practices=PRACTICES,
        tensorflow_side=tuple(rules_tfkeras.TENSORFLOW_LISTED),
        keras_side=tuple(rules_tfkeras.KERAS_LISTED),
        version="0.1.0",
    )


class DistributionRow(NamedTuple):
    category: str
    count: int
    percent: int


def category_distribution(catalog: Catalog, side: str) -> list[DistributionRow]:
    """Category counts and round-half-up percentages for one framework side.

    Rows are ordered by descending count, then category name.
    """
    if side == "pytorch":
        rules = [rule for rule in catalog.rules if rule.id.startswith("PT-")]
    elif side == "tensorflow":
        rules = [catalog.rule(rule_id) for rule_id in catalog.tensorflow_side]
    elif side == "keras":
        rules = [catalog.rule(rule_id) for rule_id in catalog.keras_side]
    else:
        raise ValueError(f"unknown side: {side!r} (expected pytorch, tensorflow, or keras)")
    total = len(rules)
    counts = Counter(rule.category.value for rule in rules)
    rows = [
        DistributionRow(category, count, (200 * count + total) // (2 * total))
        for category, count in counts.items()
    ]
    rows.sort(key=lambda row: (-row.count, row.category))
    return rows


def observed_agreement(labels_a: Sequence[Hashable], labels_b: Sequence[Hashable]) -> float:
    """Fraction of positions where the two label vectors agree."""
    if len(labels_a) != len(labels_b):
        raise LengthMismatch(f"label vectors differ in length: {len(labels_a)} vs {len(labels_b)}")
    if not labels_a:
        raise EmptyInput("label vectors are empty")
    return sum(a == b for a, b in zip(labels_a, labels_b)) / len(labels_a)


def cohen_kappa(labels_a: Sequence[Hashable], labels_b: Sequence[Hashable]) -> float:
    """Cohen's kappa between two label vectors.

    kappa = (p_o - p_e) / (1 - p_e) with p_e from the raters' marginals.
    Perfect observed agreement returns exactly 1.0, including the
    degenerate case where expected agreement is also 1.
    """
    p_o = observed_agreement(labels_a, labels_b)
    if p_o == 1.0:
        return 1.0
    n = len(labels_a)
    counts_a = Counter(labels_a)
    counts_b = Counter(labels_b)
    p_e = sum((counts_a[label] / n) * (counts_b.get(label, 0) / n) for label in counts_a)
    return (p_o - p_e) / (1 - p_e)


def explain(catalog: Catalog, rule_id: str) -> str:
    """Human-readable rule description with its matched practices."""
    rule = catalog.rule(rule_id)
    lines = [
        f"{rule.id}  {rule.name}",
        f"category: {rule.category.value}",
        f"tag: {rule.tag.value} ({TAG_LABELS[rule.tag]})",
        f"confidence: {rule.confidence.value}",
        f"enabled by default: {'yes' if rule.default_enabled else 'no'}",
        f"applies to: {', '.join(sorted(rule.frameworks))}",
        f"trigger: {rule.trigger}",
        "fix:",
    ]
    for pid in rule.practices:
        practice = catalog.practice(pid)
        lines.append(f"  {pid}  {practice.name}")
        lines.append(f"       {practice.summary}")
    return "\n".join(lines)
