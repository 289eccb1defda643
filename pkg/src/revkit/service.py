"""HTTP JSON service backing the review UI and programmatic clients.

Writes use optimistic concurrency: each correction batch names the
revision it was based on; a mismatch returns 409 with the current state.
Accepted batches are appended to a per-pair JSONL journal (fsynced)
before the in-memory state advances, so a crashed server replays to the
identical edit set and revision counter.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .alignment import AlignConfig, prealign
from .analytics import compute_report
from .corpus import CorpusManifest, LoadedPair, load_pair
from .editgraph import apply_corrections
from .errors import AnalyticsError, CorrectionError
from .model import Edit, edit_to_dict, graph_to_dict, validate_edit
from .segmentation import get_segmenters, is_segmented, segment_document


@dataclass
class PairSession:
    """Mutable per-pair state: current edit set, revision, journal."""

    pair: LoadedPair
    journal_path: Path
    edits: list[Edit] = field(default_factory=list)
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def snapshot(self) -> dict:
        return {
            "pair_id": self.pair.pair_id,
            "revision": self.revision,
            "edits": [edit_to_dict(e) for e in self.edits],
        }


def _prepare_pair(pair: LoadedPair) -> LoadedPair:
    segmenters = get_segmenters(["default", "aggressive"])
    old = pair.old if is_segmented(pair.old) else segment_document(pair.old, segmenters)
    new = pair.new if is_segmented(pair.new) else segment_document(pair.new, segmenters)
    return LoadedPair(
        pair.pair_id, old, new, pair.edits, pair.reviews, pair.requests, pair.links
    )


class PairStore:
    """All sessions of one served manifest, with journal replay on start."""

    def __init__(self, manifest: CorpusManifest, journal_dir: Path):
        self.journal_dir = Path(journal_dir)
        self.journal_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, PairSession] = {}
        for entry in manifest.entries:
            pair = _prepare_pair(load_pair(entry))
            session = PairSession(
                pair, self.journal_dir / f"{pair.pair_id}.jsonl"
            )
            session.edits = (
                list(pair.edits) if pair.edits else prealign(pair.old, pair.new, AlignConfig())
            )
            self._replay(session)
            self.sessions[pair.pair_id] = session

    def _replay(self, session: PairSession) -> None:
        if not session.journal_path.exists():
            return
        with open(session.journal_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                session.edits = apply_corrections(
                    session.edits, record["ops"], session.pair.old, session.pair.new
                )
                session.revision = record["revision"]

    def get(self, pair_id: str) -> Optional[PairSession]:
        return self.sessions.get(pair_id)

    def apply(self, session: PairSession, expected_revision: int, ops: list) -> dict:
        """Apply one correction batch; returns a response description."""
        with session.lock:
            if expected_revision != session.revision:
                return {
                    "status": 409,
                    "body": {
                        "error": "stale revision",
                        **session.snapshot(),
                    },
                }
            try:
                new_edits = apply_corrections(
                    session.edits, ops, session.pair.old, session.pair.new
                )
            except CorrectionError as exc:
                return {
                    "status": 422,
                    "body": {"error": str(exc), "position": exc.position},
                }
            for edit in new_edits:
                violations = validate_edit(edit, session.pair.old, session.pair.new)
                if violations:
                    return {
                        "status": 422,
                        "body": {
                            "error": f"resulting edit {edit.id} invalid: "
                            + "; ".join(violations)
                        },
                    }
            record = {"revision": session.revision + 1, "ops": ops}
            with open(session.journal_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            session.edits = new_edits
            session.revision += 1
            return {"status": 200, "body": session.snapshot()}


def create_app(
    manifest: CorpusManifest,
    journal_dir,
    static_dir=None,
) -> FastAPI:
    store = PairStore(manifest, Path(journal_dir))
    app = FastAPI(title="revkit review service")
    app.state.store = store

    @app.get("/pairs")
    def list_pairs():
        return [
            {"pair_id": pid, "revision": s.revision}
            for pid, s in sorted(store.sessions.items())
        ]

    @app.get("/pairs/{pair_id}")
    def get_pair(pair_id: str):
        session = store.get(pair_id)
        if session is None:
            return JSONResponse({"error": "unknown pair"}, status_code=404)
        body = session.snapshot()
        body["old"] = graph_to_dict(session.pair.old)
        body["new"] = graph_to_dict(session.pair.new)
        body["old_nodes"] = [
            {"id": n.id, "granularity": n.granularity.value, "text": n.text,
             "parent": n.parent, "ordinal": n.ordinal}
            for n in session.pair.old.nodes
        ]
        body["new_nodes"] = [
            {"id": n.id, "granularity": n.granularity.value, "text": n.text,
             "parent": n.parent, "ordinal": n.ordinal}
            for n in session.pair.new.nodes
        ]
        return body

    @app.post("/pairs/{pair_id}/corrections")
    def post_corrections(pair_id: str, payload: dict):
        session = store.get(pair_id)
        if session is None:
            return JSONResponse({"error": "unknown pair"}, status_code=404)
        expected = payload.get("expected_revision")
        ops = payload.get("ops")
        if not isinstance(expected, int) or not isinstance(ops, list):
            return JSONResponse(
                {"error": "body must carry expected_revision (int) and ops (list)"},
                status_code=422,
            )
        outcome = store.apply(session, expected, ops)
        return JSONResponse(outcome["body"], status_code=outcome["status"])

    @app.post("/pairs/{pair_id}/labels")
    def post_labels(pair_id: str, payload: dict):
        session = store.get(pair_id)
        if session is None:
            return JSONResponse({"error": "unknown pair"}, status_code=404)
        expected = payload.get("expected_revision")
        edit_id = payload.get("edit_id")
        if not isinstance(expected, int) or not isinstance(edit_id, str):
            return JSONResponse(
                {"error": "body must carry expected_revision (int) and edit_id"},
                status_code=422,
            )
        ops = [
            {
                "op": "set_intent",
                "edit_id": edit_id,
                "intents": payload.get("intents", []),
            }
        ]
        outcome = store.apply(session, expected, ops)
        return JSONResponse(outcome["body"], status_code=outcome["status"])

    @app.get("/pairs/{pair_id}/analytics")
    def get_analytics(pair_id: str):
        session = store.get(pair_id)
        if session is None:
            return JSONResponse({"error": "unknown pair"}, status_code=404)
        try:
            report = compute_report(
                session.edits,
                session.pair.old,
                session.pair.new,
                session.pair.requests,
                session.pair.links,
            )
        except AnalyticsError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        return report.to_dict()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app
