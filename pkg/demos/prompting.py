"""Render deterministic labeling prompts and parse model replies.

Run with: python3 demos/prompting.py
"""

from revkit import (
    DemoSelector,
    PromptConfig,
    TrigramEmbedder,
    build_intent_prompt,
    load_default_demos,
    parse_verdict,
    select_demos,
)
from revkit.llm import SCHEMA_INTENT, DemoItem

NEW = "The survey covered 150 participants across four institutions."
OLD = "The survey covered 120 participants."


def main():
    # static demonstrations, label-then-reason rationale order
    demos = load_default_demos("intent")
    bundle = build_intent_prompt((NEW, OLD), demos, PromptConfig("LR"))
    print("=== rendered prompt (first 400 chars) ===")
    print(bundle.text[:400], "...")
    print("estimated tokens:", bundle.token_estimate())

    # dynamic selection: rank a labeled pool by similarity to the test item
    pool = demos
    selector = DemoSelector("cat", 2, pool=pool)
    result = select_demos(selector, DemoItem(NEW, OLD, ""), TrigramEmbedder())
    print("top ranked demonstration label:", result.demos[0].label)

    # parse a (possibly messy) model reply into a typed verdict
    reply = "Sure!\nLABEL: fact/evidence REASON: the participant count changed."
    verdict = parse_verdict(reply, SCHEMA_INTENT)
    print("parsed:", verdict)


if __name__ == "__main__":
    main()
