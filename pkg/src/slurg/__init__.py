"""slurg: span-level understanding of rhetorical games.

Toolkit for span-level fallacy annotation of forum comments: a nested
inline tag codec, Jaccard inter-annotator agreement, strict/relaxed span
F1, deterministic dataset splits, corpus statistics, an LLM gateway for
annotation and synthetic generation, and a human review service.
"""

from .spans import (
    AnnotatedSample,
    Corpus,
    CorpusError,
    CREDIBILITY,
    EMOTIONAL,
    FallacyLabel,
    LOGICAL,
    Source,
    Span,
    Tier1,
    Tier2,
    Violation,
    read_jsonl_records,
    sample_from_record,
    sample_to_record,
    span_sort_key,
    spans_cross,
    tier1_of,
    validate_sample,
    write_jsonl,
)
from .tag_codec import (
    InvalidSample,
    MalformedMarkup,
    ParseReport,
    Repair,
    Strictness,
    extract_labeled_blocks,
    parse_tagged,
    render_tagged,
)
from .agreement import (
    AgreementReport,
    LengthMismatch,
    NoSharedSamples,
    PairScore,
    TextMismatch,
    interval_iou,
    jaccard_iou,
    label_mask,
    pairwise_agreement,
    sample_agreement_means,
    select_gold,
)
from .span_eval import (
    EvalReport,
    JoinFailure,
    PRF,
    evaluate_split,
    greedy_match,
    relaxed_f1,
    reports_to_csv,
    strict_f1,
)
from .dataset_ops import (
    IngestResult,
    IoFailure,
    NotEnoughSamples,
    STANDARD_SPLITS,
    SchemaViolation,
    Split,
    SplitSpec,
    filter_min_length,
    ingest,
    make_split,
    sample_annotation_batch,
)
from .corpus_stats import (
    HapaxReport,
    StatsReport,
    TokenizerConfig,
    compute_stats,
    hapax_ratio,
    token_frequencies,
    tokenize,
    vocab_diversity,
)
from .prompts import (
    ANNOTATION_PARAMS,
    GENERATION_PARAMS,
    GenerationRequest,
    PromptBundle,
    SamplingParams,
    build_annotation_prompt,
    build_generation_prompt,
)
from .llm_gateway import (
    AuditLog,
    CannedTransport,
    ConfigError,
    EchoGoldTransport,
    GatewayConfig,
    HttpTransport,
    TransportFailure,
    TransportSpec,
    annotate_batch,
    build_request_body,
    generate_batch,
    sample_fallacy_lists,
)
from .review_service import (
    LikertScore,
    OutOfScale,
    ReviewStore,
    ReviewTask,
    TaskKind,
    TextDrift,
    UnknownTask,
    create_app,
)

__version__ = "0.1.0"
