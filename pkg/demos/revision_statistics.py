"""Compute revision statistics for a synthetic document pair.

Run with: python3 demos/revision_statistics.py
"""

import json
import random

from revkit import compute_report, crest_factor, prealign
from revkit.model import graph_from_dict


def synthetic_pair(seed=0):
    """A three-section pair where most edits cluster in the middle section."""
    rng = random.Random(seed)
    words = "model data loss figure method result table metric".split()

    def sentence():
        return " ".join(rng.choice(words) for _ in range(7)).capitalize() + "."

    sections_old, sections_new = [], []
    for s in range(3):
        sents = [sentence() for _ in range(6)]
        revised = list(sents)
        if s == 1:  # concentrate edits in the middle section
            for i in range(4):
                revised[i] = revised[i][:-1] + " revised."
        sections_old.append(sents)
        sections_new.append(revised)

    def doc(version, sections):
        return graph_from_dict(
            {
                "doc_id": "demo",
                "version": version,
                "sections": [
                    {
                        "title": f"Section {i}",
                        "paragraphs": [
                            {
                                "text": " ".join(sents),
                                "sentences": [{"text": t} for t in sents],
                            }
                        ],
                    }
                    for i, sents in enumerate(sections)
                ],
            }
        )

    return doc("old", sections_old), doc("new", sections_new)


def main():
    old, new = synthetic_pair()
    edits = prealign(old, new)
    report = compute_report(edits, old, new)

    print(f"edit ratio:            {report.edit_ratio:.3f}")
    print(f"crest factor (section): {report.cf_section:.2f}  (1.0 = evenly spread)")
    print("positions (modify):    ", report.positional_histogram.by_action["modify"])

    # the crest factor of an evenly spread vector is exactly 1
    print(f"uniform reference:      {crest_factor([3, 3, 3, 3]):.2f}")

    print("full report as JSON:")
    print(json.dumps(report.to_dict(), indent=2)[:400], "...")


if __name__ == "__main__":
    main()
