"""Multilingual knowledge graph completion and enhancement toolkit.

Builds an immutable multilingual graph store from flat files, verbalizes
relational and textual queries into a text-to-text format, orchestrates
generation backends, links generated surfaces back to entity IDs,
consolidates predictions across languages, and reports ranking and
name-quality metrics.
"""

from .backends import (
    Backend,
    GenerationCandidate,
    GenerationRequest,
    OracleBackend,
    ProtocolError,
    RemoteBackend,
    StaticBackend,
    TransportError,
    generate,
)
from .dataset import (
    ContaminationFilter,
    MixConfig,
    TrainingRecord,
    build_kgc,
    build_kge,
    default_directions,
    filter_contamination,
    mix,
)
from .ensemble import EnsembleEntry, EnsembleResult, LanguageSlate, ensemble
from .evaluation import ALL, EvalReport, run_kgc_eval, run_kge_eval
from .linking import LinkedCandidate, LinkResult, desc_sim, link
from .metrics import (
    RankOutcome,
    SetScore,
    corpus_bleu,
    coverage_score,
    hits_at_k,
    mrr,
    precision_task_score,
    rank_of_gold,
)
from .store import (
    DEFAULT_LANGUAGES,
    BenchmarkRecord,
    Entity,
    KnowledgeGraph,
    Lexicalization,
    Relation,
    Tier,
    Triplet,
    read_benchmark,
)
from .textnorm import normalize, tokenize
from .verbalize import (
    TargetSurface,
    TaskKind,
    TaskTuple,
    parse_output,
    render_surface,
    serialize_input,
    serialize_target,
)

__version__ = "0.1.0"
