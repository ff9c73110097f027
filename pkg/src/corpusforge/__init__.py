"""corpusforge: build, quality-gate, and compose synthetic speech corpora."""

from .composer import (
    HYBRID_PRESETS,
    CompositionError,
    Pairing,
    PairingPlan,
    Recipe,
    compose_hybrid,
    plan_pairings,
    verify_nesting,
)
from .manifest import (
    GenerationAttempt,
    GenerationError,
    GenerationRecord,
    Manifest,
    ManifestError,
    Utterance,
    VoiceCatalog,
    VoiceChoice,
    read_manifest,
    total_hours,
    write_manifest,
)
from .quality_gates import (
    DURATION_BOUND_PRESETS,
    DurationFilterConfig,
    GvConfig,
    GvRunResult,
    duration_ratio_gate,
    generate_verified,
    run_gv_pipeline,
)
from .report import EvalPair, WerTable, corpus_summary, evaluate, gv_report
from .selection import (
    FinetuneSelectionConfig,
    VoiceSelectionConfig,
    select_finetune_subset,
    select_reference_voices,
)
from .textgen import PromptSchedule, parse_dialogue, run_textgen, schedule_messages
from .textnorm import NormalizedText, normalize
from .wer import WerBreakdown, wer

__version__ = "0.1.0"
