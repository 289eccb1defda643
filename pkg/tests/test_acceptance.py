"""Acceptance suite: one test (and one printed pass/fail line) per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines live.
The corpus-dependent checks at the bottom skip when no ingested dataset
is available (set REVKIT_DATASET_DIR to point at one).
"""

import json
import os
import random
import threading
import time
from pathlib import Path

import numpy as np
import pytest

from revkit.alignment import AlignConfig, generate_alignment_negatives, prealign
from revkit.analytics import (
    crest_factor,
    edit_ratio,
    krippendorff_alpha,
    label_distribution,
    positional_distribution,
    semantic_edit_ratio,
)
from revkit.corpus import (
    LoadedPair,
    find_dataset,
    load_corpus,
    load_manifest,
    save_document,
    save_edits_jsonl,
    split_documents,
)
from revkit.editgraph import apply_corrections, build_edit, derive_action
from revkit.errors import DocumentError
from revkit.llm import (
    INTENT_LABELS,
    SCHEMA_INTENT,
    evaluate,
    parse_verdict,
    render_verdict,
)
from revkit.model import EditAction, EditIntent
from revkit.similarity import TrigramEmbedder, lev_similarity

from conftest import make_doc_from_sentences, random_sentence
from test_alignment import oracle_prealign, summarize
from test_analytics import oracle_alpha


def check(name):
    """Context manager printing one pass/fail line for a criterion."""

    class _Check:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            print(f"[{'FAIL' if exc_type else 'PASS'}] {name}")
            return False

    return _Check()


_WORDS = "net fit arc map rig bay elm oak fox hem ice jet kit log".split()


def _short_sentence(rng, n=None):
    k = n or rng.randint(3, 6)
    return " ".join(rng.choice(_WORDS) for _ in range(k)).capitalize() + "."


def _random_pair(rng, max_sentences=40):
    n_old = rng.randint(1, rng.randint(1, max_sentences))
    old_sents = [_short_sentence(rng) for _ in range(n_old)]
    n_new = rng.randint(1, rng.randint(1, max_sentences))
    new_sents = []
    for _ in range(n_new):
        roll = rng.random()
        if roll < 0.4:
            new_sents.append(rng.choice(old_sents))
        elif roll < 0.7:
            base = rng.choice(old_sents)
            new_sents.append(base[:-1] + " " + rng.choice(_WORDS) + ".")
        else:
            new_sents.append(_short_sentence(rng))

    def to_doc(version, sents):
        n_paras = rng.randint(1, 3)
        cuts = sorted(rng.sample(range(1, len(sents)), min(n_paras - 1, len(sents) - 1))) if len(sents) > 1 else []
        paras, prev = [], 0
        for cut in cuts + [len(sents)]:
            if cut > prev:
                paras.append(sents[prev:cut])
            prev = cut
        return make_doc_from_sentences(version, paras)

    return to_doc("old", old_sents), to_doc("new", new_sents)


def test_crest_factor_reference():
    with check("crest factor: reference vector 3.95, uniform 1.0, < 1 ms"):
        counts = [0] * 10 + [2, 12] + [0] * 4
        assert crest_factor(counts) == pytest.approx(3.95, abs=0.01)
        assert crest_factor([5] * 8) == 1.0
        crest_factor(counts)  # warm
        start = time.perf_counter()
        crest_factor(counts)
        assert time.perf_counter() - start < 0.001


def test_prealign_oracle_equivalence():
    with check("pre-alignment equals reference oracle on 1000 random pairs < 60 s"):
        rng = random.Random(2024)
        start = time.perf_counter()
        for _ in range(1000):
            old, new = _random_pair(rng)
            got = summarize(prealign(old, new))
            want = oracle_prealign(old, new)
            assert got == (sorted(want[0]), sorted(want[1]), sorted(want[2]))
        assert time.perf_counter() - start < 60.0


def test_synthetic_alignment_recall():
    with check("synthetic recall >= 0.99, zero cross-paragraph misalignments < 30 s"):
        rng = random.Random(7)
        start = time.perf_counter()
        total = hits = 0
        for _ in range(60):
            n = rng.randint(3, 15)
            old_sents = [random_sentence(rng, rng.randint(6, 12)) for _ in range(n)]
            new_sents = []
            for s in old_sents:
                words = s[:-1].split()
                i = rng.randrange(len(words))
                words[i] = words[i] + "s"  # single-character perturbation
                perturbed = " ".join(words) + "."
                assert lev_similarity(perturbed, s) >= 90
                new_sents.append(perturbed)
            old = make_doc_from_sentences("old", [old_sents])
            new = make_doc_from_sentences("new", [new_sents])
            pairs = {
                (ns.id, os_.id)
                for ns, os_ in zip(new.sentences(), old.sentences())
            }
            found = {
                (next(iter(e.new_nodes)), next(iter(e.old_nodes)))
                for e in prealign(old, new)
                if e.action == EditAction.MODIFY
            }
            total += len(pairs)
            hits += len(pairs & found)
        assert hits / total >= 0.99

        # repeated-content fixtures: identical boilerplate in every
        # paragraph must never pull an alignment across paragraphs
        for _ in range(20):
            boiler = random_sentence(rng, 8)
            paras_old, paras_new = [], []
            for p in range(3):
                unique = random_sentence(rng, 9)
                words = unique[:-1].split()
                words[rng.randrange(len(words))] += "s"
                paras_old.append([boiler, unique])
                paras_new.append([boiler, " ".join(words) + "."])
            old = make_doc_from_sentences("old", paras_old)
            new = make_doc_from_sentences("new", paras_new)
            for e in prealign(old, new):
                for n_id in e.new_nodes:
                    for o_id in e.old_nodes:
                        assert new.paragraph_index(n_id) == old.paragraph_index(o_id)
        assert time.perf_counter() - start < 30.0


def test_action_derivation_and_correction_roundtrips():
    with check("action table brute-forced (m,n <= 5); 500 correction round-trips"):
        for m in range(6):
            for n in range(6):
                if m == 0 and n == 0:
                    with pytest.raises(DocumentError):
                        derive_action(n, m)
                    continue
                got = derive_action(n, m)
                want = (
                    EditAction.ADD if m == 0
                    else EditAction.DELETE if n == 0
                    else EditAction.MODIFY if (n, m) == (1, 1)
                    else EditAction.MERGE if n == 1
                    else EditAction.SPLIT if m == 1
                    else EditAction.FUSION
                )
                assert got == want

        rng = random.Random(31)
        for _ in range(500):
            old, new = _random_pair(rng, max_sentences=8)
            edits = prealign(old, new)
            existing = {pair for e in edits for pair in e.links()}
            links = []
            for _ in range(rng.randint(1, 4)):
                pair = (rng.choice(new.sentences()).id, rng.choice(old.sentences()).id)
                if pair in existing:
                    continue  # removing a preexisting link would not round-trip
                links.append({"new_node": pair[0], "old_node": pair[1]})
            if not links:
                continue
            ops = [{"op": "add_link", **l} for l in links]
            ops += [{"op": "remove_link", **l} for l in reversed(links)]
            # removing a link twice is an error; dedupe keeps the sequence legal
            seen = set()
            legal = []
            for op in ops:
                key = (op["op"], op["new_node"], op["old_node"])
                if op["op"] == "remove_link" and key in seen:
                    continue
                seen.add(key)
                legal.append(op)
            assert apply_corrections(edits, legal, old, new) == list(edits)


def test_krippendorff_alpha_criteria():
    with check("alpha: perfect -> 1.0; 200 random matrices within 1e-9; sign test"):
        assert krippendorff_alpha([["a", "a"], ["b", "b"]]) == 1.0
        rng = random.Random(101)
        done = 0
        while done < 200:
            data = [
                [rng.choice("xyz") if rng.random() > 0.25 else None for _ in range(rng.randint(2, 4))]
                for _ in range(rng.randint(2, 10))
            ]
            if all(sum(v is not None for v in row) < 2 for row in data):
                continue
            assert abs(krippendorff_alpha(data) - oracle_alpha(data)) < 1e-9
            done += 1
        assert krippendorff_alpha([["a", "b"]] * 12) < 0


def test_analytics_identities():
    with check("semantic ratio <= edit ratio (1000 sets); sums 1 +/- 1e-9; binning"):
        rng = random.Random(55)
        old = make_doc_from_sentences("old", [[_short_sentence(rng) for _ in range(8)]])
        new = make_doc_from_sentences("new", [[_short_sentence(rng) for _ in range(8)]])
        for _ in range(1000):
            k = rng.randint(1, 8)
            edits = [
                build_edit(
                    [new.sentences()[i].id],
                    [old.sentences()[i].id],
                    old,
                    new,
                    intents=rng.choice([[], [rng.choice(list(EditIntent))]]),
                )
                for i in rng.sample(range(8), k)
            ]
            assert semantic_edit_ratio(edits, old) <= edit_ratio(edits, old) + 1e-12
            dist = label_distribution(edits)
            for table in (dist["action"], dist["intent"], dist["action_intent"]):
                if table:
                    assert abs(sum(table.values()) - 1.0) <= 1e-9

        # hand-placed binning fixture: sentences 0, 4, 7 of 8 into 4 bins
        edits = [
            build_edit([new.sentences()[i].id], [old.sentences()[i].id], old, new)
            for i in (0, 4, 7)
        ]
        hist = positional_distribution(edits, new, old, bins=4)
        assert hist.by_action["modify"] == [1, 0, 1, 1]


def test_prompt_and_evaluation_criteria():
    with check("golden prompts byte-exact; parse round-trips; confusion; random 0.20"):
        # byte-exact renderings are asserted per-file in the prompt module
        # tests; re-run them here so this criterion stands on its own
        import test_llm

        test_llm.test_intent_prompt_matches_golden("intent_def_LR", "LR")
        test_llm.test_intent_prompt_matches_golden("intent_def_RL", "RL")
        test_llm.test_intent_ad_prompt_matches_golden()
        test_llm.test_alignment_prompt_matches_golden()
        test_llm.test_request_prompt_matches_golden()
        for ordering in ("def_then_dyn", "dyn_then_def"):
            test_llm.test_mixed_selection_matches_golden(ordering)

        for label in INTENT_LABELS:
            assert parse_verdict(render_verdict(label, "r"), SCHEMA_INTENT).label == label

        gold = ["a", "a", "a", "b", "b", "c"]
        pred = ["a", "b", None, "b", "b", "a"]
        result = evaluate(pred, gold, ["a", "b", "c"])
        expected = np.array(
            [[100 / 3, 100 / 3, 0.0, 100 / 3], [0.0, 100.0, 0.0, 0.0], [100.0, 0.0, 0.0, 0.0]]
        )
        assert np.allclose(result.confusion, expected)

        rng = random.Random(4096)
        labels = list(INTENT_LABELS)
        gold = [rng.choice(labels) for _ in range(10_000)]
        pred = [rng.choice(labels) for _ in range(10_000)]
        assert evaluate(pred, gold, labels).accuracy == pytest.approx(0.20, abs=0.03)


def test_split_determinism_and_negative_collisions():
    with check("seeded 20/80 splits deterministic; negatives never collide (1000)"):
        rng = random.Random(77)
        embedder = TrigramEmbedder()
        for trial in range(1000):
            ids = [f"doc{i}" for i in range(rng.randint(5, 30))]
            seed = rng.randint(0, 10_000)
            a = split_documents(ids, seed)
            assert a == split_documents(ids, seed)
            assert len(a.train) == int(len(ids) * 0.2)
            assert set(a.train).isdisjoint(a.test)

            if trial % 20 == 0:
                n = rng.randint(2, 6)
                old = make_doc_from_sentences(
                    "old", [[_short_sentence(rng, 6) for _ in range(n)]]
                )
                new_sents = [
                    s.text[:-1] + " more." for s in old.sentences()
                ]
                new = make_doc_from_sentences("new", [new_sents])
                edits = [
                    build_edit([ns.id], [os_.id], old, new)
                    for ns, os_ in zip(new.sentences(), old.sentences())
                ]
                positives = {
                    (next(iter(e.new_nodes)), next(iter(e.old_nodes))) for e in edits
                }
                for pair in generate_alignment_negatives(edits, old, new, embedder):
                    assert pair not in positives


def test_service_durability(tmp_path):
    with check("service: kill-and-replay identical; race -> one 200, one 409"):
        from fastapi.testclient import TestClient

        from revkit.service import create_app

        old = make_doc_from_sentences(
            "old", [["Alpha original sentence one here.", "Beta original sentence two here."]],
            doc_id="p1",
        )
        new = make_doc_from_sentences(
            "new", [["Alpha revised sentence one here.", "Beta original sentence two here."]],
            doc_id="p1",
        )
        (tmp_path / "p1").mkdir()
        save_document(old, tmp_path / "p1" / "old.json")
        save_document(new, tmp_path / "p1" / "new.json")
        save_edits_jsonl(prealign(old, new), tmp_path / "p1" / "edits.jsonl")
        (tmp_path / "manifest.json").write_text(
            json.dumps(
                {"entries": [{"pair_id": "p1", "old_path": "p1/old.json",
                              "new_path": "p1/new.json",
                              "annotation_path": "p1/edits.jsonl"}]}
            )
        )
        manifest = load_manifest(tmp_path / "manifest.json")
        client = TestClient(create_app(manifest, tmp_path / "journal"))
        edit_id = client.get("/pairs/p1").json()["edits"][0]["id"]
        assert client.post(
            "/pairs/p1/corrections",
            json={"expected_revision": 0,
                  "ops": [{"op": "set_intent", "edit_id": edit_id, "intents": ["claim"]}]},
        ).status_code == 200
        before = client.get("/pairs/p1").json()

        replayed = TestClient(create_app(manifest, tmp_path / "journal"))
        assert replayed.get("/pairs/p1").json() == before

        statuses = []

        def race():
            resp = replayed.post(
                "/pairs/p1/corrections", json={"expected_revision": 1, "ops": []}
            )
            statuses.append(resp.status_code)

        threads = [threading.Thread(target=race) for _ in range(2)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(statuses) == [200, 409]


# --- corpus-dependent criteria ---------------------------------------------

_DATASET_ROOT = os.environ.get(
    "REVKIT_DATASET_DIR", str(Path(__file__).resolve().parent.parent / "dataset")
)
_MANIFEST = find_dataset(_DATASET_ROOT)

needs_dataset = pytest.mark.skipif(
    _MANIFEST is None,
    reason=f"no ingested dataset at {_DATASET_ROOT} (set REVKIT_DATASET_DIR)",
)


@needs_dataset
def test_dataset_edit_ratios():
    with check("dataset: mean edit ratio 18.45% +/- 0.1 pp, semantic 11.18% +/- 0.1 pp"):
        pairs = load_corpus(_MANIFEST)
        ratios = [edit_ratio(p.edits, p.old) for p in pairs]
        semantic = [semantic_edit_ratio(p.edits, p.old) for p in pairs]
        assert np.mean(ratios) * 100 == pytest.approx(18.45, abs=0.1)
        assert np.mean(semantic) * 100 == pytest.approx(11.18, abs=0.1)


@needs_dataset
def test_dataset_modify_proportion():
    with check("dataset: Modify proportion 54.54% +/- 0.1 pp"):
        pairs = load_corpus(_MANIFEST)
        edits = [e for p in pairs for e in p.edits]
        dist = label_distribution(edits)
        assert dist["action"].get("modify", 0.0) * 100 == pytest.approx(54.54, abs=0.1)


@needs_dataset
def test_dataset_labeling_agreement():
    with check("dataset: labeling agreement alpha 0.78 +/- 0.01"):
        path = Path(_DATASET_ROOT) / "intent_annotations.json"
        if not path.exists():
            pytest.skip("dataset has no released multi-annotator labels")
        matrix = json.loads(path.read_text())
        assert krippendorff_alpha(matrix) == pytest.approx(0.78, abs=0.01)
