"""Command-line entry points.

Exit codes: 0 on success, 1 on domain errors (bad data, failed
validation), 2 on usage errors.  With ``--json`` domain errors are
emitted as a one-line JSON object on stderr instead of plain text.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .alignment import AlignConfig, prealign, two_stage_align
from .analytics import compute_report
from .corpus import (
    build_alignment_dataset,
    build_request_dataset,
    load_corpus,
    load_document,
    load_edits_jsonl,
    load_manifest,
    save_document,
    save_edits_jsonl,
)
from .errors import RevkitError
from .llm import (
    PromptConfig,
    build_alignment_prompt,
    build_intent_prompt,
    build_request_prompt,
    evaluate,
    load_default_demos,
)
from .segmentation import REGISTRY, get_segmenters, is_segmented, segment_document
from .similarity import TrigramEmbedder, measures_by_name


def _handle_errors(fn):
    """Map domain errors to exit code 1, honoring the --json flag."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        as_json = kwargs.get("as_json", False)
        try:
            return fn(*args, **kwargs)
        except RevkitError as exc:
            if as_json:
                payload = {"error": type(exc).__name__, "message": str(exc)}
                click.echo(json.dumps(payload), err=True)
            else:
                click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _json_option(fn):
    return click.option(
        "--json", "as_json", is_flag=True, help="Machine-readable errors on stderr."
    )(fn)


@click.group()
def main():
    """Document revision analysis toolkit."""


@main.command()
@click.option("--doc", "doc_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option(
    "--segmenters",
    default="default,aggressive",
    show_default=True,
    help="Comma-separated segmenter names tried in order.",
)
@_json_option
@_handle_errors
def segment(doc_path, out_path, segmenters, as_json):
    """Attach sentence nodes to a document file."""
    names = [n.strip() for n in segmenters.split(",") if n.strip()]
    unknown = [n for n in names if n not in REGISTRY]
    if unknown:
        raise click.UsageError(f"unknown segmenter(s): {', '.join(unknown)}")
    graph = load_document(doc_path)
    graph = segment_document(graph, get_segmenters(names))
    save_document(graph, out_path)
    click.echo(f"segmented {len(graph.sentences())} sentences -> {out_path}")


@main.command()
@click.option("--old", "old_path", required=True, type=click.Path(exists=True))
@click.option("--new", "new_path", required=True, type=click.Path(exists=True))
@click.option("--t0", default=40.0, show_default=True, type=float)
@click.option("--t1", default=85.0, show_default=True, type=float)
@click.option(
    "--measures",
    default="lev,fuzzy,sem",
    show_default=True,
    help="Comma-separated similarity measure names.",
)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option(
    "--two-stage",
    "two_stage",
    is_flag=True,
    help="Run the verdict stage on leftover add/delete pairs.",
)
@_json_option
@_handle_errors
def align(old_path, new_path, t0, t1, measures, out_path, two_stage, as_json):
    """Align two document versions into sentence-level candidate edits."""
    names = [n.strip() for n in measures.split(",") if n.strip()]
    cfg = AlignConfig(t0=t0, t1=t1, measures=measures_by_name(names))
    old = load_document(old_path)
    new = load_document(new_path)
    segs = get_segmenters(["default", "aggressive"])
    if not is_segmented(old):
        old = segment_document(old, segs)
    if not is_segmented(new):
        new = segment_document(new, segs)
    if two_stage:
        result = two_stage_align(old, new, cfg)
        edits = result.edits
        for warning in result.warnings:
            click.echo(f"warning: {warning}", err=True)
    else:
        edits = prealign(old, new, cfg)
    save_edits_jsonl(edits, out_path)
    click.echo(f"wrote {len(edits)} edits -> {out_path}")


@main.command()
@click.option("--old", "old_path", required=True, type=click.Path(exists=True))
@click.option("--new", "new_path", required=True, type=click.Path(exists=True))
@click.option("--edits", "edits_path", required=True, type=click.Path(exists=True))
@click.option("--bins", default=10, show_default=True, type=int)
@click.option("--out", "out_path", type=click.Path(), default=None)
@_json_option
@_handle_errors
def analyze(old_path, new_path, edits_path, bins, out_path, as_json):
    """Compute the per-pair analytics report."""
    old = load_document(old_path)
    new = load_document(new_path)
    edits = load_edits_jsonl(edits_path)
    report = compute_report(edits, old, new, bins=bins).to_dict()
    text = json.dumps(report, indent=2)
    if out_path:
        Path(out_path).write_text(text)
        click.echo(f"wrote report -> {out_path}")
    else:
        click.echo(text)


@main.command()
@click.option(
    "--task",
    required=True,
    type=click.Choice(["intent", "alignment", "request"]),
)
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@_json_option
@_handle_errors
def dataset(task, manifest_path, seed, out_path, as_json):
    """Build a labeled train/test dataset from an annotated corpus."""
    pairs = load_corpus(load_manifest(manifest_path))
    if task == "alignment":
        split = build_alignment_dataset(pairs, TrigramEmbedder(), seed)
    elif task == "request":
        split = build_request_dataset(pairs, seed)
    else:
        samples_by_doc = {}
        for pair in pairs:
            rows = []
            for edit in pair.edits:
                for intent in sorted(edit.intents, key=lambda i: i.value):
                    rows.append(
                        {
                            "pair_id": pair.pair_id,
                            "edit_id": edit.id,
                            "action": edit.action.value,
                            "intent": intent.value,
                        }
                    )
            if rows:
                samples_by_doc[pair.pair_id] = rows
        from .corpus import split_documents

        doc_split = split_documents(sorted(samples_by_doc), seed)
        split_dict = {
            "train": [r for d in doc_split.train for r in samples_by_doc[d]],
            "test": [r for d in doc_split.test for r in samples_by_doc[d]],
        }
        Path(out_path).write_text(json.dumps(split_dict, indent=2))
        click.echo(
            f"wrote {len(split_dict['train'])} train / "
            f"{len(split_dict['test'])} test rows -> {out_path}"
        )
        return
    payload = {
        "train": [s.__dict__ for s in split.train],
        "test": [s.__dict__ for s in split.test],
    }
    Path(out_path).write_text(json.dumps(payload, indent=2))
    click.echo(
        f"wrote {len(split.train)} train / {len(split.test)} test samples -> {out_path}"
    )


@main.command()
@click.option(
    "--task",
    required=True,
    type=click.Choice(["intent", "alignment", "request"]),
)
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True),
    help='JSON instance: {"new_text": ..., "old_text": ...} (old_text optional).',
)
@click.option(
    "--rationale-order",
    type=click.Choice(["LR", "RL", "none"]),
    default="LR",
    show_default=True,
)
@click.option("--out", "out_path", type=click.Path(), default=None)
@_json_option
@_handle_errors
def prompts(task, input_path, rationale_order, out_path, as_json):
    """Render a deterministic prompt for one instance."""
    instance = json.loads(Path(input_path).read_text())
    new_text = instance.get("new_text", "")
    old_text = instance.get("old_text")
    cfg = PromptConfig(
        rationale_order=None if rationale_order == "none" else rationale_order
    )
    if task == "intent":
        demo_task = "intent" if old_text is not None else "intent_ad"
        demos = load_default_demos(demo_task)
        bundle = build_intent_prompt((new_text, old_text), demos, cfg)
    elif task == "alignment":
        demos = load_default_demos("alignment")
        bundle = build_alignment_prompt((new_text, old_text or ""), demos, cfg)
    else:
        demos = load_default_demos("request")
        bundle = build_request_prompt(new_text, demos, cfg)
    if out_path:
        Path(out_path).write_text(bundle.text)
        click.echo(f"wrote prompt ({bundle.token_estimate} tokens) -> {out_path}")
    else:
        click.echo(bundle.text)


@main.command(name="eval")
@click.option(
    "--predictions",
    "pred_path",
    required=True,
    type=click.Path(exists=True),
    help='JSONL lines: {"predicted": ..., "gold": ...}.',
)
@click.option("--labels", required=True, help="Comma-separated label set.")
@click.option("--out", "out_path", type=click.Path(), default=None)
@_json_option
@_handle_errors
def eval_cmd(pred_path, labels, out_path, as_json):
    """Score predictions against gold labels."""
    label_list = [l.strip() for l in labels.split(",") if l.strip()]
    predicted, gold = [], []
    with open(pred_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            predicted.append(row.get("predicted"))
            gold.append(row["gold"])
    result = evaluate(predicted, gold, label_list).to_dict()
    text = json.dumps(result, indent=2)
    if out_path:
        Path(out_path).write_text(text)
        click.echo(f"wrote evaluation -> {out_path}")
    else:
        click.echo(text)


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option(
    "--journal-dir",
    "journal_dir",
    type=click.Path(),
    default=None,
    help="Directory for correction journals (default: alongside the manifest).",
)
@click.option("--static", "static_dir", type=click.Path(exists=True), default=None)
@_json_option
@_handle_errors
def serve(manifest_path, host, port, journal_dir, static_dir, as_json):
    """Serve the review API (and optionally a built UI) over HTTP."""
    import uvicorn

    from .service import create_app

    manifest = load_manifest(manifest_path)
    if journal_dir is None:
        journal_dir = Path(manifest_path).parent / "journal"
    app = create_app(manifest, journal_dir, static_dir)
    uvicorn.run(app, host=host, port=port)


__all__ = ["main"]
