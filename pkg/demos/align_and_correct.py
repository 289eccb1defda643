"""Walk through the core loop: segment, align, correct, re-inspect.

Run with: python3 demos/align_and_correct.py
"""

from revkit import (
    AlignConfig,
    apply_corrections,
    build_document,
    get_segmenters,
    prealign,
    segment_document,
)

OLD = {
    "doc_id": "demo",
    "version": "old",
    "sections": [
        {
            "title": "Introduction",
            "paragraphs": [
                {
                    "text": "We study how authors revise their documents over time."
                    " Our method aligns the sentences of two versions."
                    " Results are reported in Section 4."
                }
            ],
        }
    ],
}

NEW = {
    "doc_id": "demo",
    "version": "new",
    "sections": [
        {
            "title": "Introduction",
            "paragraphs": [
                {
                    "text": "We study how authors revise their documents over years."
                    " Our method aligns the sentences of two versions."
                    " An ablation study was added to the appendix."
                }
            ],
        }
    ],
}


def main():
    segmenters = get_segmenters(["default", "aggressive"])
    old = segment_document(build_document(OLD), segmenters)
    new = segment_document(build_document(NEW), segmenters)

    print("Automatic alignment:")
    edits = prealign(old, new, AlignConfig())
    for edit in edits:
        news = [new.node(n).text for n in sorted(edit.new_nodes)]
        olds = [old.node(n).text for n in sorted(edit.old_nodes)]
        print(f"  {edit.action.value:8s} new={news} old={olds}")

    # A reviewer decides the "added" appendix sentence actually replaces the
    # deleted pointer to Section 4, and labels the first modification.
    add = next(e for e in edits if e.action.value == "add")
    delete = next(e for e in edits if e.action.value == "delete")
    modify = next(e for e in edits if e.action.value == "modify")
    corrected = apply_corrections(
        edits,
        [
            {
                "op": "add_link",
                "new_node": next(iter(add.new_nodes)),
                "old_node": next(iter(delete.old_nodes)),
            },
            {"op": "set_intent", "edit_id": modify.id, "intents": ["clarity"]},
        ],
        old,
        new,
    )

    print("After human correction:")
    for edit in corrected:
        intents = sorted(i.value for i in edit.intents)
        print(
            f"  {edit.action.value:8s} provenance={edit.provenance.value:12s}"
            f" intents={intents}"
        )


if __name__ == "__main__":
    main()
