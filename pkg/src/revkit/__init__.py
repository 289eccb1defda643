"""Toolkit for analyzing document revisions at sentence granularity.

Builds tree-structured document graphs, segments paragraphs into
sentences, aligns two versions into an edit graph, supports human
correction and intent labeling, computes revision statistics, and
renders deterministic prompts for model-assisted labeling.
"""

from .alignment import (
    AlignConfig,
    SimilarityTensor,
    TwoStageResult,
    compute_tensor,
    generate_alignment_negatives,
    location_distance,
    prealign,
    two_stage_align,
)
from .analytics import (
    AnalyticsReport,
    PositionalHistogram,
    compute_report,
    crest_factor,
    edit_counts_by_container,
    edit_ratio,
    krippendorff_alpha,
    label_distribution,
    positional_distribution,
    request_impact,
    semantic_edit_ratio,
    summary_metrics,
)
from .corpus import (
    AlignmentSample,
    CorpusManifest,
    LoadedPair,
    ManifestEntry,
    RequestSample,
    Split,
    build_alignment_dataset,
    build_request_dataset,
    find_dataset,
    load_corpus,
    load_document,
    load_edits_jsonl,
    load_manifest,
    load_pair,
    save_document,
    save_edits_jsonl,
    split_documents,
    split_intent_dataset,
)
from .editgraph import apply_corrections, build_edit, derive_action, lift_edits
from .errors import (
    AlignmentError,
    AnalyticsError,
    CorrectionError,
    DocumentError,
    ProviderError,
    RevkitError,
    SchemaError,
    SegmentationError,
    VerdictParseError,
)
from .llm import (
    DemoItem,
    DemoSelector,
    EvalResult,
    PromptBundle,
    PromptConfig,
    Verdict,
    build_alignment_prompt,
    build_intent_prompt,
    build_request_prompt,
    build_summary_prompt,
    evaluate,
    load_default_demos,
    parse_verdict,
    select_demos,
)
from .model import (
    ContentSublabel,
    CrossLink,
    CrossLinkKind,
    DocumentGraph,
    Edit,
    EditAction,
    EditIntent,
    Granularity,
    Provenance,
    RequestKind,
    ReviewRequest,
    TextNode,
    Version,
    build_document,
    edit_from_dict,
    edit_to_dict,
    graph_from_dict,
    graph_to_dict,
    validate_edit,
)
from .segmentation import (
    Segmenter,
    aggressive_segmenter,
    default_segmenter,
    get_segmenters,
    is_segmented,
    segment_document,
    segment_paragraph,
)
from .similarity import (
    EmbeddingProvider,
    FixtureEmbedder,
    TrigramEmbedder,
    default_measures,
    fuzzy_similarity,
    lev_similarity,
    levenshtein_distance,
    sem_similarity,
)

__version__ = "0.1.0"
