"""Prompt construction, demonstration selection, parsing and evaluation.

Everything here is deterministic: the same task instance, selector and
config always render byte-identical prompts.  Providers (embeddings,
chat) are pluggable; fixtures stand in for external models in tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Protocol, Sequence

import numpy as np

from .errors import RevkitError, VerdictParseError
from .similarity import EmbeddingProvider, cosine

# --- task definitions -------------------------------------------------------

INTENT_LABELS = ("Grammar", "Clarity", "Fact/Evidence", "Claim", "Other")
INTENT_AD_LABELS = ("Fact/Evidence", "Claim", "Other")
YES_NO_LABELS = ("yes", "no")

UNPARSED = "unparsed"

SYSTEM_INTENT = (
    "You are a helpful, respectful and honest revision analysis assistant. "
    "You will read two versions of texts. Your task is to analyze the revision "
    "intent behind the difference between the two texts. The intent can be one "
    "of the following labels: fix grammar (Grammar), improve clarity (Clarity), "
    "change claim or statement (Claim), change factual information "
    "(Fact/Evidence). Grammar and Clarity are more about surface language "
    "improvements, while Fact/Evidence and Claim are more about meaning "
    "changes. If none of the above labels are relevant, please answer with "
    "'Other'."
)

TASK_INTENT = (
    "Read the following old and new texts. What is the intent of the revision? "
    "Please answer with one of the labels: Grammar, Clarity, Claim, "
    "Fact/Evidence and Other. Please always answer with the template and fill "
    "the template with your answer without additional texts: "
    "LABEL:<your answer> REASON:<your answer>."
)

SYSTEM_INTENT_AD = (
    "You are a helpful, respectful and honest revision analysis assistant. "
    "You will read a text that was added to or deleted from a document during "
    "revision. Your task is to analyze the intent behind the edit. The intent "
    "can be one of the following labels: change claim or statement (Claim), "
    "change factual information (Fact/Evidence). If none of the above labels "
    "are relevant, please answer with 'Other'."
)

TASK_INTENT_AD = (
    "Read the following text. What is the intent of the edit? Please answer "
    "with one of the labels: Claim, Fact/Evidence and Other. Please always "
    "answer with the template and fill the template with your answer without "
    "additional texts: LABEL:<your answer> REASON:<your answer>."
)

SYSTEM_ALIGNMENT = (
    "You are a helpful, respectful and honest revision analysis assistant. "
    "You will read two texts from two versions of a document. Your task is to "
    "decide whether the two texts constitute a revision pair, that is, whether "
    "the new text is a revised version of the old text. Please answer with "
    "'yes' or 'no'."
)

TASK_ALIGNMENT = (
    "Read the following old and new texts. Do the two texts constitute a "
    "revision pair? Please answer with one of the labels: yes and no. Please "
    "always answer with the template and fill the template with your answer "
    "without additional texts: LABEL:<your answer> REASON:<your answer>."
)

SYSTEM_REQUEST = (
    "You are a helpful, respectful and honest revision analysis assistant. "
    "You will read a sentence from a peer review. Your task is to decide "
    "whether the sentence requests an edit to the reviewed document, "
    "explicitly or implicitly, or points out a weakness that could instigate "
    "revisions. Please answer with 'yes' or 'no'."
)

TASK_REQUEST = (
    "Read the following review sentence. Could the sentence instigate "
    "revisions to the document? Please answer with one of the labels: yes and "
    "no. Please always answer with the template and fill the template with "
    "your answer without additional texts: "
    "LABEL:<your answer> REASON:<your answer>."
)

SYSTEM_SUMMARY = (
    "You are a helpful, respectful and honest revision analysis assistant. "
    "You will read a complete list of sentence edits made to a document, each "
    "with its edit action and intent labels and the title of the section it "
    "occurs in. Your task is to write a coherent textual summary of the "
    "document edits."
)


@dataclass(frozen=True)
class ParseSchema:
    """Expected answer shape: the admissible labels plus alias spellings."""

    name: str
    labels: tuple[str, ...]

    def canonical(self, raw: str) -> Optional[str]:
        token = "".join(c for c in raw.lower() if c.isalnum())
        for label in self.labels:
            if token == "".join(c for c in label.lower() if c.isalnum()):
                return label
        return None


SCHEMA_INTENT = ParseSchema("intent", INTENT_LABELS)
SCHEMA_INTENT_AD = ParseSchema("intent_ad", INTENT_AD_LABELS)
SCHEMA_YES_NO = ParseSchema("yes_no", YES_NO_LABELS)
SCHEMA_FREE_TEXT = ParseSchema("free_text", ())


@dataclass(frozen=True)
class PromptBundle:
    system: str
    demonstrations: tuple[str, ...]
    task: str
    parse_template: ParseSchema

    @property
    def text(self) -> str:
        parts = [self.system, *self.demonstrations, self.task]
        return "\n\n".join(parts)

    def token_estimate(self) -> int:
        return len(self.text.split())


@dataclass(frozen=True)
class ChatMetadata:
    model: str
    max_tokens: Optional[int] = None


class ChatProvider(Protocol):
    metadata: ChatMetadata

    def complete(self, bundle: PromptBundle) -> str: ...


@dataclass(frozen=True)
class PromptConfig:
    rationale_order: Optional[str] = "LR"  # "LR", "RL" or None
    max_tokens: Optional[int] = None

    def __post_init__(self):
        if self.rationale_order not in ("LR", "RL", None):
            raise RevkitError(f"unknown rationale order: {self.rationale_order}")


class PromptBudgetError(RevkitError):
    """Prompt exceeds the token budget; drop this many demonstrations."""

    def __init__(self, demos_to_drop: int):
        super().__init__(
            f"prompt over token budget; drop {demos_to_drop} demonstration(s)"
        )
        self.demos_to_drop = demos_to_drop


# --- demonstrations ---------------------------------------------------------


@dataclass(frozen=True)
class DemoItem:
    """One labeled training item usable as an in-context demonstration."""

    new_text: str
    old_text: Optional[str]
    label: str
    rationale: Optional[str] = None
    new_section: str = ""
    old_section: str = ""


@dataclass(frozen=True)
class DemoSelector:
    method: str  # "cat", "diff", "loc" or "def"
    n: int
    pool: tuple[DemoItem, ...] = ()
    static: tuple[DemoItem, ...] = ()
    ordering: str = "def_then_dyn"  # or "dyn_then_def"
    rationale_order: Optional[str] = "LR"

    def __post_init__(self):
        if self.method not in ("cat", "diff", "loc", "def"):
            raise RevkitError(f"unknown selection method: {self.method}")
        if self.n < 0:
            raise RevkitError("demo count must be >= 0")
        if self.ordering not in ("def_then_dyn", "dyn_then_def"):
            raise RevkitError(f"unknown ordering: {self.ordering}")
        if self.method == "def" and not self.static:
            raise RevkitError("def method requires a static example set")


@dataclass(frozen=True)
class SelectionResult:
    demos: tuple[DemoItem, ...]
    diff_fallback: bool = False


def _item_vector(
    item: DemoItem, method: str, embedder: EmbeddingProvider
) -> np.ndarray:
    if method == "loc":
        parts = [s for s in (item.new_section, item.old_section) if s]
        if not parts:
            return embedder.embed("")
        return np.concatenate([embedder.embed(p) for p in parts])
    if item.old_text is None:
        return embedder.embed(item.new_text)
    if method == "cat":
        return np.concatenate(
            [embedder.embed(item.new_text), embedder.embed(item.old_text)]
        )
    return embedder.embed(item.new_text) - embedder.embed(item.old_text)


def select_demos(
    selector: DemoSelector, test_item: DemoItem, embedder: EmbeddingProvider
) -> SelectionResult:
    """Rank the pool for one test item and return the ordered demonstrations.

    Dynamic methods sort by cosine similarity (ties broken by pool index);
    a zero difference vector falls back to concatenation for that item.
    Static examples are concatenated with the dynamic ones according to
    ``selector.ordering``.
    """
    if selector.method == "def":
        return SelectionResult(selector.static)

    if not selector.pool:
        raise RevkitError("dynamic selection requires a non-empty pool")

    method = selector.method
    fallback = False
    test_vec = _item_vector(test_item, method, embedder)
    if method == "diff" and not np.any(test_vec):
        method = "cat"
        fallback = True
        test_vec = _item_vector(test_item, method, embedder)

    scored = []
    for index, item in enumerate(selector.pool):
        vec = _item_vector(item, method, embedder)
        scored.append((-cosine(test_vec, vec), index, item))
    scored.sort(key=lambda t: (t[0], t[1]))
    dynamic = tuple(item for _, _, item in scored[: selector.n])

    if selector.static:
        if selector.ordering == "def_then_dyn":
            demos = selector.static + dynamic
        else:
            demos = dynamic + selector.static
    else:
        demos = dynamic
    return SelectionResult(demos, fallback)


def load_default_demos(task: str) -> tuple[DemoItem, ...]:
    """Bundled static example sets: intent5, intent3, alignment2, request2."""
    name = {
        "intent": "intent5",
        "intent_ad": "intent3",
        "alignment": "alignment2",
        "request": "request2",
    }.get(task)
    if name is None:
        raise RevkitError(f"no default demos for task: {task}")
    payload = json.loads(
        resources.files("revkit").joinpath(f"data/demos/{name}.json").read_text()
    )
    return tuple(
        DemoItem(
            new_text=item["new_text"],
            old_text=item.get("old_text"),
            label=item["label"],
            rationale=item.get("rationale"),
            new_section=item.get("new_section", ""),
            old_section=item.get("old_section", ""),
        )
        for item in payload
    )


# --- rendering --------------------------------------------------------------


def _instance_lines(new_text: str, old_text: Optional[str], task: str) -> list[str]:
    if task == "request":
        return [f"The review sentence is: {new_text}"]
    if old_text is None:
        return [f"The text is: {new_text}"]
    return [f"The old text is: {old_text}", f"The new text is: {new_text}"]


def _render_demo(item: DemoItem, task: str, rationale_order: Optional[str]) -> str:
    lines = _instance_lines(item.new_text, item.old_text, task)
    label_line = f"LABEL: {item.label}"
    if rationale_order is None or item.rationale is None:
        lines.append(label_line)
    else:
        reason_line = f"REASON: {item.rationale}"
        if rationale_order == "RL":
            lines.extend([reason_line, label_line])
        else:
            lines.extend([label_line, reason_line])
    return "\n".join(lines)


def _check_budget(bundle: PromptBundle, cfg: PromptConfig) -> PromptBundle:
    if cfg.max_tokens is None or bundle.token_estimate() <= cfg.max_tokens:
        return bundle
    demos = list(bundle.demonstrations)
    dropped = 0
    while demos:
        demos.pop()
        dropped += 1
        trimmed = PromptBundle(
            bundle.system, tuple(demos), bundle.task, bundle.parse_template
        )
        if trimmed.token_estimate() <= cfg.max_tokens:
            raise PromptBudgetError(dropped)
    raise PromptBudgetError(len(bundle.demonstrations))


def _build(
    system: str,
    task_instruction: str,
    instance_lines: list[str],
    demos: Sequence[DemoItem],
    task: str,
    schema: ParseSchema,
    cfg: PromptConfig,
) -> PromptBundle:
    rendered = tuple(_render_demo(d, task, cfg.rationale_order) for d in demos)
    task_text = "\n".join([task_instruction, *instance_lines])
    bundle = PromptBundle(system, rendered, task_text, schema)
    return _check_budget(bundle, cfg)


def build_intent_prompt(
    pair: tuple[str, Optional[str]],
    demos: Sequence[DemoItem],
    cfg: PromptConfig = PromptConfig(),
) -> PromptBundle:
    """Intent classification prompt for (new_text, old_text).

    Additions and deletions (old_text None) use the three-label variant.
    """
    new_text, old_text = pair
    if old_text is None:
        return _build(
            SYSTEM_INTENT_AD,
            TASK_INTENT_AD,
            _instance_lines(new_text, None, "intent_ad"),
            demos,
            "intent_ad",
            SCHEMA_INTENT_AD,
            cfg,
        )
    return _build(
        SYSTEM_INTENT,
        TASK_INTENT,
        _instance_lines(new_text, old_text, "intent"),
        demos,
        "intent",
        SCHEMA_INTENT,
        cfg,
    )


def build_alignment_prompt(
    pair: tuple[str, str],
    demos: Sequence[DemoItem],
    cfg: PromptConfig = PromptConfig(),
) -> PromptBundle:
    """Yes/no revision-pair verdict prompt for (new_text, old_text)."""
    new_text, old_text = pair
    return _build(
        SYSTEM_ALIGNMENT,
        TASK_ALIGNMENT,
        _instance_lines(new_text, old_text, "alignment"),
        demos,
        "alignment",
        SCHEMA_YES_NO,
        cfg,
    )


def build_request_prompt(
    review_sentence: str,
    demos: Sequence[DemoItem],
    cfg: PromptConfig = PromptConfig(),
) -> PromptBundle:
    """Yes/no edit-request verdict prompt for one review sentence."""
    return _build(
        SYSTEM_REQUEST,
        TASK_REQUEST,
        _instance_lines(review_sentence, None, "request"),
        demos,
        "request",
        SCHEMA_YES_NO,
        cfg,
    )


@dataclass(frozen=True)
class SummaryPlan:
    """Zero-shot summarization prompts, chunked by section when oversized."""

    chunks: tuple[PromptBundle, ...]

    @property
    def needs_merge(self) -> bool:
        return len(self.chunks) > 1


def _render_edit_record(record: dict, number: int) -> str:
    parts = [f"{number}. Section: {record.get('section', '')}"]
    parts.append(f"Action: {record['action']}")
    parts.append(f"Intent: {record['intent']}")
    if record.get("old_text"):
        parts.append(f"Old text: {record['old_text']}")
    if record.get("new_text"):
        parts.append(f"New text: {record['new_text']}")
    return " | ".join(parts)


def _summary_bundle(records: Sequence[dict]) -> PromptBundle:
    lines = [_render_edit_record(r, i + 1) for i, r in enumerate(records)]
    task = "\n".join(
        [
            "The document edits are:",
            *lines,
            "Please write a coherent textual summary of the document edits.",
        ]
    )
    return PromptBundle(SYSTEM_SUMMARY, (), task, SCHEMA_FREE_TEXT)


def build_summary_prompt(
    edit_records: Sequence[dict], cfg: PromptConfig = PromptConfig()
) -> SummaryPlan:
    """One prompt listing every edit, or per-section chunks when over budget.

    Each record carries old_text / new_text / action / intent / section.
    """
    if not edit_records:
        raise RevkitError("no edits to summarize")
    single = _summary_bundle(edit_records)
    if cfg.max_tokens is None or single.token_estimate() <= cfg.max_tokens:
        return SummaryPlan((single,))

    by_section: dict[str, list[dict]] = {}
    for record in edit_records:
        by_section.setdefault(record.get("section", ""), []).append(record)
    chunks: list[PromptBundle] = []
    pending: list[dict] = []
    for records in by_section.values():
        candidate = pending + records
        if pending and _summary_bundle(candidate).token_estimate() > cfg.max_tokens:
            chunks.append(_summary_bundle(pending))
            pending = list(records)
        else:
            pending = candidate
    if pending:
        chunks.append(_summary_bundle(pending))
    return SummaryPlan(tuple(chunks))


def build_summary_merge_prompt(partial_summaries: Sequence[str]) -> PromptBundle:
    """Merge pass over per-chunk summaries."""
    lines = [f"{i + 1}. {s}" for i, s in enumerate(partial_summaries)]
    task = "\n".join(
        [
            "The following are partial summaries of edits to different parts "
            "of one document:",
            *lines,
            "Please merge them into one coherent textual summary of the "
            "document edits.",
        ]
    )
    return PromptBundle(SYSTEM_SUMMARY, (), task, SCHEMA_FREE_TEXT)


# --- parsing ----------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    label: str
    reason: str


def parse_verdict(text: str, schema: ParseSchema) -> Verdict:
    """Extract LABEL and REASON from a model response.

    Leading and trailing chatter is tolerated; the label match is
    case-insensitive and normalizes separators ("fact/evidence",
    "Fact Evidence", ...).  Missing or unknown labels raise a typed error
    carrying the raw text.
    """
    import re

    match = re.search(
        r"LABEL\s*:\s*(?P<label>.+?)\s*(?:REASON\s*:\s*(?P<reason>.*))?\s*$",
        text,
        re.IGNORECASE | re.DOTALL,
    )
    if not match:
        raise VerdictParseError("no LABEL found in response", raw=text)
    label_raw = match.group("label").strip()
    # the label may share its line with trailing chatter
    label_raw = label_raw.splitlines()[0].strip()
    label = schema.canonical(label_raw)
    if label is None:
        raise VerdictParseError(f"unknown label: {label_raw!r}", raw=text)
    return Verdict(label, (match.group("reason") or "").strip())


def render_verdict(label: str, reason: str) -> str:
    return f"LABEL: {label} REASON: {reason}"


def majority_label(ranked_demos: Sequence[DemoItem]) -> str:
    """Majority vote over selected demonstrations.

    Ties go to the label of the highest-ranked (earliest) member.
    """
    if not ranked_demos:
        raise RevkitError("no demonstrations to vote over")
    counts: dict[str, int] = {}
    for item in ranked_demos:
        counts[item.label] = counts.get(item.label, 0) + 1
    best = max(counts.values())
    for item in ranked_demos:
        if counts[item.label] == best:
            return item.label
    raise AssertionError("unreachable")  # pragma: no cover


# --- evaluation -------------------------------------------------------------


@dataclass(frozen=True)
class EvalResult:
    labels: tuple[str, ...]
    accuracy: float
    macro_f1: float
    per_label: dict[str, dict[str, float]]
    confusion: np.ndarray = field(compare=False)  # row-normalized %, rows=gold
    confusion_columns: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_label": self.per_label,
            "confusion_columns": list(self.confusion_columns),
            "confusion": self.confusion.tolist(),
        }


def evaluate(
    predictions: Sequence[Optional[str]],
    gold: Sequence[str],
    labels: Sequence[str],
) -> EvalResult:
    """Accuracy, per-label P/R/F1, macro-F1 and a row-normalized confusion.

    A prediction of None or an unknown label is scored as the reserved
    "unparsed" class (always wrong).  Rows are gold labels and sum to 100%.
    """
    if not predictions or len(predictions) != len(gold):
        raise RevkitError("predictions and gold must be equal-length, non-empty")
    label_list = list(labels)
    for value in gold:
        if value not in label_list:
            raise RevkitError(f"gold label outside label set: {value!r}")
    columns = label_list + [UNPARSED]
    col_index = {lab: i for i, lab in enumerate(columns)}
    row_index = {lab: i for i, lab in enumerate(label_list)}

    counts = np.zeros((len(label_list), len(columns)))
    for pred, gold_label in zip(predictions, gold):
        pred_label = pred if pred in col_index else UNPARSED
        counts[row_index[gold_label], col_index[pred_label]] += 1

    total = counts.sum()
    correct = sum(counts[row_index[lab], col_index[lab]] for lab in label_list)
    accuracy = correct / total

    per_label: dict[str, dict[str, float]] = {}
    f1_values = []
    for lab in label_list:
        tp = counts[row_index[lab], col_index[lab]]
        fp = counts[:, col_index[lab]].sum() - tp
        fn = counts[row_index[lab], :].sum() - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_label[lab] = {
            "precision": float(precision),
            "recall": float(recall),
            "f1": float(f1),
        }
        f1_values.append(f1)

    row_sums = counts.sum(axis=1, keepdims=True)
    safe = np.where(row_sums == 0, 1.0, row_sums)
    confusion = counts / safe * 100.0

    return EvalResult(
        labels=tuple(label_list),
        accuracy=float(accuracy),
        macro_f1=float(np.mean(f1_values)),
        per_label=per_label,
        confusion=confusion,
        confusion_columns=tuple(columns),
    )
