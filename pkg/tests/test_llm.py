"""Prompt rendering (golden files), demo selection, parsing, evaluation."""

import random
from pathlib import Path

import numpy as np
import pytest

from revkit.errors import RevkitError, VerdictParseError
from revkit.llm import (
    INTENT_LABELS,
    SCHEMA_INTENT,
    SCHEMA_INTENT_AD,
    SCHEMA_YES_NO,
    UNPARSED,
    DemoItem,
    DemoSelector,
    PromptBudgetError,
    PromptConfig,
    build_alignment_prompt,
    build_intent_prompt,
    build_request_prompt,
    build_summary_merge_prompt,
    build_summary_prompt,
    evaluate,
    load_default_demos,
    majority_label,
    parse_verdict,
    render_verdict,
    select_demos,
)
from revkit.similarity import FixtureEmbedder, TrigramEmbedder

GOLDEN = Path(__file__).parent / "golden"

NEW = "The proposed method achieves state-of-the-art results on both benchmarks."
OLD = "The proposed method achieves strong results on one benchmark."

POOL = (
    DemoItem(
        "We report additional ablations in the appendix.",
        "We report ablations in the appendix.",
        "Fact/Evidence",
        "The new text adds information about additional experiments, thus the label is Fact/Evidence.",
        new_section="Experiments",
        old_section="Experiments",
    ),
    DemoItem(
        "Our approach is clearly superior to prior work.",
        "Our approach compares favorably to prior work.",
        "Claim",
        "The new text strengthens the stated position, thus the label is Claim.",
        new_section="Introduction",
        old_section="Introduction",
    ),
)


def _golden(name: str) -> str:
    return (GOLDEN / f"{name}.txt").read_text()


# --- golden renderings ------------------------------------------------------


@pytest.mark.parametrize(
    "name,order",
    [("intent_def_LR", "LR"), ("intent_def_RL", "RL"), ("intent_def_none", None)],
)
def test_intent_prompt_matches_golden(name, order):
    bundle = build_intent_prompt((NEW, OLD), load_default_demos("intent"), PromptConfig(order))
    assert bundle.text + "\n" == _golden(name)


def test_intent_ad_prompt_matches_golden():
    bundle = build_intent_prompt(
        ("A fresh appendix discusses limitations.", None),
        load_default_demos("intent_ad"),
        PromptConfig("LR"),
    )
    assert bundle.text + "\n" == _golden("intent_ad_def_LR")
    assert bundle.parse_template is SCHEMA_INTENT_AD


def test_alignment_prompt_matches_golden():
    bundle = build_alignment_prompt((NEW, OLD), load_default_demos("alignment"), PromptConfig("LR"))
    assert bundle.text + "\n" == _golden("alignment_def_LR")
    assert bundle.parse_template is SCHEMA_YES_NO


def test_request_prompt_matches_golden():
    bundle = build_request_prompt(
        "Please add a comparison with stronger baselines.",
        load_default_demos("request"),
        PromptConfig("LR"),
    )
    assert bundle.text + "\n" == _golden("request_def_LR")


@pytest.mark.parametrize("ordering", ["def_then_dyn", "dyn_then_def"])
def test_mixed_selection_matches_golden(ordering):
    sel = DemoSelector(
        "cat", 2, pool=POOL, static=load_default_demos("intent")[:1], ordering=ordering
    )
    demos = select_demos(sel, DemoItem(NEW, OLD, ""), TrigramEmbedder()).demos
    bundle = build_intent_prompt((NEW, OLD), demos, PromptConfig("LR"))
    assert bundle.text + "\n" == _golden(f"intent_cat_{ordering}_LR")


def test_prompts_are_deterministic():
    a = build_intent_prompt((NEW, OLD), load_default_demos("intent"))
    b = build_intent_prompt((NEW, OLD), load_default_demos("intent"))
    assert a == b and a.text == b.text


# --- demo selection ---------------------------------------------------------


def test_def_selection_returns_static_verbatim():
    static = load_default_demos("intent")
    sel = DemoSelector("def", 5, static=static)
    result = select_demos(sel, DemoItem(NEW, OLD, ""), TrigramEmbedder())
    assert result.demos == static
    assert not result.diff_fallback


def test_def_requires_static():
    with pytest.raises(RevkitError, match="static"):
        DemoSelector("def", 3)


def test_unknown_method_and_ordering_rejected():
    with pytest.raises(RevkitError, match="method"):
        DemoSelector("best", 1, pool=POOL)
    with pytest.raises(RevkitError, match="ordering"):
        DemoSelector("cat", 1, pool=POOL, ordering="shuffled")


def test_dynamic_selection_ranks_by_similarity():
    sel = DemoSelector("cat", 1, pool=POOL)
    # the test item reuses the Claim demo's text, so that demo must rank first
    test = DemoItem(POOL[1].new_text, POOL[1].old_text, "")
    result = select_demos(sel, test, TrigramEmbedder())
    assert result.demos == (POOL[1],)


def test_dynamic_selection_tie_breaks_by_pool_index():
    emb = FixtureEmbedder((("a", (1.0, 0.0)), ("b", (1.0, 0.0)), ("t", (1.0, 0.0))))
    pool = (DemoItem("a", None, "X"), DemoItem("b", None, "Y"))
    sel = DemoSelector("cat", 1, pool=pool)
    result = select_demos(sel, DemoItem("t", None, ""), emb)
    assert result.demos == (pool[0],)


def test_diff_zero_vector_falls_back_to_cat():
    sel = DemoSelector("diff", 1, pool=POOL)
    # identical new and old text -> zero difference vector
    result = select_demos(sel, DemoItem("Same text.", "Same text.", ""), TrigramEmbedder())
    assert result.diff_fallback
    assert len(result.demos) == 1


def test_loc_selection_uses_sections():
    emb = TrigramEmbedder()
    sel = DemoSelector("loc", 1, pool=POOL)
    test = DemoItem("Unrelated words.", "Unrelated words.", "",
                    new_section="Introduction", old_section="Introduction")
    result = select_demos(sel, test, emb)
    assert result.demos == (POOL[1],)  # the Introduction demo


def test_dynamic_selection_requires_pool():
    with pytest.raises(RevkitError, match="pool"):
        select_demos(DemoSelector("cat", 1), DemoItem("x", None, ""), TrigramEmbedder())


def test_default_demo_sets_have_expected_sizes():
    assert len(load_default_demos("intent")) == 5
    assert len(load_default_demos("intent_ad")) == 3
    assert len(load_default_demos("alignment")) == 2
    assert len(load_default_demos("request")) == 2
    with pytest.raises(RevkitError, match="no default demos"):
        load_default_demos("translation")


def test_intent_ad_demos_have_no_old_text():
    assert all(d.old_text is None for d in load_default_demos("intent_ad"))


# --- budget -----------------------------------------------------------------


def test_budget_error_reports_drop_count():
    demos = load_default_demos("intent")
    small = build_intent_prompt((NEW, OLD), demos[:1]).token_estimate()
    full = build_intent_prompt((NEW, OLD), demos).token_estimate()
    budget = (small + full) // 2
    with pytest.raises(PromptBudgetError) as err:
        build_intent_prompt((NEW, OLD), demos, PromptConfig(max_tokens=budget))
    assert 1 <= err.value.demos_to_drop <= len(demos)
    # dropping the suggested number fits
    kept = demos[: len(demos) - err.value.demos_to_drop]
    assert build_intent_prompt((NEW, OLD), kept, PromptConfig(max_tokens=budget)).token_estimate() <= budget


def test_budget_large_enough_is_noop():
    bundle = build_intent_prompt((NEW, OLD), load_default_demos("intent"), PromptConfig(max_tokens=10_000))
    assert bundle.demonstrations


# --- summaries --------------------------------------------------------------


def _records(n, sections=("Intro", "Method")):
    return [
        {
            "section": sections[i % len(sections)],
            "action": "modify",
            "intent": "clarity",
            "old_text": f"Old sentence {i} with several words in it.",
            "new_text": f"New sentence {i} with several words in it.",
        }
        for i in range(n)
    ]


def test_summary_single_prompt():
    plan = build_summary_prompt(_records(3))
    assert not plan.needs_merge
    text = plan.chunks[0].text
    assert "1. Section: Intro" in text and "3. Section: Intro" in text


def test_summary_chunks_when_over_budget():
    records = _records(40)
    single = build_summary_prompt(records).chunks[0].token_estimate()
    plan = build_summary_prompt(records, PromptConfig(max_tokens=single // 2))
    assert plan.needs_merge
    # every record appears in exactly one chunk
    total = sum(chunk.text.count("Old text:") for chunk in plan.chunks)
    assert total == len(records)
    merge = build_summary_merge_prompt(["Part one.", "Part two."])
    assert "1. Part one." in merge.text


def test_summary_requires_edits():
    with pytest.raises(RevkitError, match="no edits"):
        build_summary_prompt([])


# --- parsing ----------------------------------------------------------------


@pytest.mark.parametrize(
    "text,label,reason",
    [
        ("LABEL: Grammar REASON: typo fixed", "Grammar", "typo fixed"),
        ("LABEL: Grammar\nREASON: typo fixed", "Grammar", "typo fixed"),
        ("label:grammar", "Grammar", ""),
        ("Sure! LABEL: fact/evidence REASON: numbers changed.", "Fact/Evidence", "numbers changed."),
        ("LABEL: Fact Evidence", "Fact/Evidence", ""),
        ("LABEL: CLARITY  \n", "Clarity", ""),
    ],
)
def test_parse_verdict_variants(text, label, reason):
    verdict = parse_verdict(text, SCHEMA_INTENT)
    assert verdict.label == label
    assert verdict.reason == reason


def test_parse_verdict_yes_no():
    assert parse_verdict("LABEL: YES", SCHEMA_YES_NO).label == "yes"
    assert parse_verdict("LABEL: No REASON: unrelated", SCHEMA_YES_NO).label == "no"


def test_parse_verdict_errors_carry_raw_text():
    with pytest.raises(VerdictParseError, match="no LABEL") as err:
        parse_verdict("I think it's a grammar fix.", SCHEMA_INTENT)
    assert err.value.raw == "I think it's a grammar fix."
    with pytest.raises(VerdictParseError, match="unknown label"):
        parse_verdict("LABEL: Vibes", SCHEMA_INTENT)


def test_render_parse_roundtrip():
    for label in INTENT_LABELS:
        rendered = render_verdict(label, "some reason")
        verdict = parse_verdict(rendered, SCHEMA_INTENT)
        assert verdict.label == label
        assert verdict.reason == "some reason"


def test_majority_label():
    demos = (
        DemoItem("a", None, "Claim"),
        DemoItem("b", None, "Other"),
        DemoItem("c", None, "Claim"),
    )
    assert majority_label(demos) == "Claim"
    tied = (DemoItem("a", None, "Other"), DemoItem("b", None, "Claim"))
    assert majority_label(tied) == "Other"  # tie -> earliest ranked
    with pytest.raises(RevkitError):
        majority_label(())


# --- evaluation -------------------------------------------------------------


def test_evaluate_hand_computed_confusion():
    gold = ["a", "a", "a", "b", "b", "c"]
    pred = ["a", "b", None, "b", "b", "a"]
    result = evaluate(pred, gold, ["a", "b", "c"])
    assert result.accuracy == pytest.approx(3 / 6)
    assert result.confusion_columns == ("a", "b", "c", UNPARSED)
    expected = np.array(
        [
            [100 / 3, 100 / 3, 0.0, 100 / 3],
            [0.0, 100.0, 0.0, 0.0],
            [100.0, 0.0, 0.0, 0.0],
        ]
    )
    assert np.allclose(result.confusion, expected)
    assert result.per_label["b"]["recall"] == pytest.approx(1.0)
    assert result.per_label["b"]["precision"] == pytest.approx(2 / 3)
    assert result.per_label["c"]["f1"] == 0.0
    # rows sum to 100
    assert np.allclose(result.confusion.sum(axis=1), 100.0)


def test_evaluate_unparsed_never_counts_as_correct():
    result = evaluate([None, "mystery"], ["a", "b"], ["a", "b"])
    assert result.accuracy == 0.0
    assert result.confusion[0, -1] == 100.0


def test_evaluate_input_validation():
    with pytest.raises(RevkitError):
        evaluate([], [], ["a"])
    with pytest.raises(RevkitError):
        evaluate(["a"], ["a", "b"], ["a", "b"])
    with pytest.raises(RevkitError, match="outside label set"):
        evaluate(["a"], ["z"], ["a", "b"])


def test_evaluate_random_uniform_accuracy():
    rng = random.Random(99)
    labels = list(INTENT_LABELS)
    gold = [rng.choice(labels) for _ in range(10_000)]
    pred = [rng.choice(labels) for _ in range(10_000)]
    result = evaluate(pred, gold, labels)
    assert result.accuracy == pytest.approx(0.2, abs=0.03)


def test_evaluate_to_dict_roundtrips_json():
    import json

    result = evaluate(["a", "b"], ["a", "b"], ["a", "b"])
    payload = json.loads(json.dumps(result.to_dict()))
    assert payload["accuracy"] == 1.0
    assert payload["confusion"][0][0] == 100.0
