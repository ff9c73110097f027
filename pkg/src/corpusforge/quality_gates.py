"""Quality gates for synthetic speech: duration-ratio screening and the
generate-verify-regenerate loop.

The generate-verify loop synthesizes an utterance, has the verifier ASR
transcribe it, and accepts at the first attempt whose WER against the input
text is at or under the threshold, up to a hard attempt cap. Transport
failures are a separate outcome from quality rejection: only the network
retry budget (inside the backend clients) absorbs them, so the attempt cap
measures generation quality alone.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .backends import AsrBackend, AsrRequest, BackendError, TtsBackend, TtsRequest
from .composer import PairingPlan, validate_pairing_plan
from .manifest import (
    GenerationAttempt,
    GenerationError,
    GenerationRecord,
    Manifest,
    Utterance,
    VoiceCatalog,
)
from .textnorm import normalize
from .wer import wer


class QualityGateError(ValueError):
    """Invalid configuration or inputs for a quality gate."""


# Ratio bound presets evaluated for the synthetic/reference duration screen.
DURATION_BOUND_PRESETS: dict[str, tuple[float, float]] = {
    "wide": (0.5, 1.5),
    "medium": (0.7, 1.5),
    "narrow": (0.8, 1.2),
}


@dataclass(frozen=True)
class DurationFilterConfig:
    lower_bound: float
    upper_bound: float

    def __post_init__(self) -> None:
        if not 0 < self.lower_bound < self.upper_bound:
            raise QualityGateError(
                f"duration bounds require 0 < lower < upper, got "
                f"({self.lower_bound}, {self.upper_bound})"
            )

    @classmethod
    def from_preset(cls, name: str) -> "DurationFilterConfig":
        try:
            lower, upper = DURATION_BOUND_PRESETS[name]
        except KeyError:
            raise QualityGateError(
                f"unknown duration preset {name!r}; known: {sorted(DURATION_BOUND_PRESETS)}"
            ) from None
        return cls(lower_bound=lower, upper_bound=upper)


@dataclass(frozen=True)
class GateDecision:
    accepted: bool
    ratio: float


def duration_ratio_gate(
    synth_duration_s: float, ref_duration_s: float, cfg: DurationFilterConfig
) -> GateDecision:
    """Accept iff synth/ref lies inside [lower, upper]; the ratio is always reported."""
    if synth_duration_s <= 0 or ref_duration_s <= 0:
        raise QualityGateError(
            f"durations must be > 0, got synth={synth_duration_s}, ref={ref_duration_s}"
        )
    ratio = synth_duration_s / ref_duration_s
    return GateDecision(cfg.lower_bound <= ratio <= cfg.upper_bound, ratio)


@dataclass(frozen=True)
class GvConfig:
    """Generate-verify settings; threshold 0 demands exact transcripts."""

    wer_threshold: float = 0.20
    max_attempts: int = 10
    temperature: float = 0.65
    seed: int = 0

    def __post_init__(self) -> None:
        if self.wer_threshold < 0:
            raise QualityGateError(f"wer_threshold must be >= 0, got {self.wer_threshold}")
        if self.max_attempts < 1:
            raise QualityGateError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if not self.temperature > 0:
            raise QualityGateError(f"temperature must be > 0, got {self.temperature}")


def generate_verified(
    u: Utterance,
    voice: Utterance,
    cfg: GvConfig,
    tts: TtsBackend,
    verifier: AsrBackend,
) -> GenerationRecord:
    """Run the generate-verify loop for one utterance and record every attempt.

    Stops at the first attempt whose WER is <= the threshold; after
    ``max_attempts`` failures the record is rejected with ``chosen_attempt``
    pointing at the lowest-WER attempt (earliest on ties). Backend errors
    propagate to the caller; they are not quality attempts.
    """
    ref_tokens = normalize(u.text)
    attempts: list[GenerationAttempt] = []
    for k in range(1, cfg.max_attempts + 1):
        req = TtsRequest(
            text=u.text,
            reference_audio=voice.audio_ref,
            temperature=cfg.temperature,
            request_id=f"{u.id}|a{k}|s{cfg.seed}",
        )
        synth = tts.synthesize(req)
        transcript = verifier.transcribe(AsrRequest(audio=synth.audio)).transcript
        breakdown = wer(ref_tokens, normalize(transcript))
        attempts.append(
            GenerationAttempt(
                attempt_index=k,
                transcript=transcript,
                wer=breakdown.wer,
                audio_ref=synth.audio,
                duration_s=synth.duration_s,
            )
        )
        if breakdown.wer <= cfg.wer_threshold:
            return GenerationRecord(
                utterance_id=u.id, attempts=tuple(attempts), accepted=True, chosen_attempt=k
            )
    best = min(attempts, key=lambda a: (a.wer, a.attempt_index))
    return GenerationRecord(
        utterance_id=u.id,
        attempts=tuple(attempts),
        accepted=False,
        chosen_attempt=best.attempt_index,
    )


def synthetic_utterance_id(text_id: str, voice_speaker_id: str) -> str:
    """Id of the synthetic utterance produced for one plan pair."""
    return f"{text_id}--{voice_speaker_id}"


def source_text_id(synthetic_id: str) -> str:
    """Invert synthetic_utterance_id; returns the input unchanged if unsplit."""
    head, sep, _ = synthetic_id.rpartition("--")
    return head if sep else synthetic_id


@dataclass(frozen=True)
class GvRunResult:
    """Per-batch outcome: accepted manifest plus the full audit trail."""

    manifest: Manifest
    records: tuple[GenerationRecord, ...]
    errors: tuple[GenerationError, ...]

    @property
    def accepted_count(self) -> int:
        return sum(1 for r in self.records if r.accepted)

    @property
    def rejected_count(self) -> int:
        return sum(1 for r in self.records if not r.accepted)

    @property
    def errored_count(self) -> int:
        return len(self.errors)


def run_gv_pipeline(
    texts: Manifest,
    catalog: VoiceCatalog,
    pairing: PairingPlan,
    cfg: GvConfig,
    tts: TtsBackend,
    verifier: AsrBackend,
    *,
    workers: int = 1,
    keep_rejected: bool = False,
) -> GvRunResult:
    """Run the generate-verify loop over a pairing plan under a worker pool.

    Per-pair loops are independent; outputs are canonicalized by utterance
    id so results do not depend on scheduling. Backend errors are captured
    per pair without aborting the batch.
    """
    if workers < 1:
        raise QualityGateError(f"workers must be >= 1, got {workers}")
    validate_pairing_plan(pairing, texts, catalog)
    texts_by_id = texts.by_id()

    def one(pair) -> tuple[GenerationRecord | None, GenerationError | None]:
        t = texts_by_id[pair.text_id]
        voice = catalog.voices[pair.voice_speaker_id].utterance
        shadow = replace(t, id=synthetic_utterance_id(t.id, pair.voice_speaker_id))
        try:
            return generate_verified(shadow, voice, cfg, tts, verifier), None
        except BackendError as exc:
            return None, GenerationError(utterance_id=shadow.id, error=str(exc))

    if workers == 1:
        outcomes = [one(pair) for pair in pairing.pairs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, pairing.pairs))

    records: list[GenerationRecord] = []
    errors: list[GenerationError] = []
    out_entries: list[Utterance] = []
    by_record_id = {
        synthetic_utterance_id(p.text_id, p.voice_speaker_id): p for p in pairing.pairs
    }
    for record, error in outcomes:
        if error is not None:
            errors.append(error)
            continue
        assert record is not None
        records.append(record)
        if not record.accepted and not keep_rejected:
            continue
        pair = by_record_id[record.utterance_id]
        t = texts_by_id[pair.text_id]
        chosen = record.chosen
        out_entries.append(
            Utterance(
                id=record.utterance_id,
                speaker_id=pair.voice_speaker_id,
                gender=t.gender,
                split=t.split,
                text=t.text,
                audio_ref=chosen.audio_ref,
                duration_s=chosen.duration_s,
                origin="synthetic",
            )
        )

    out_entries.sort(key=lambda u: u.id)
    records.sort(key=lambda r: r.utterance_id)
    errors.sort(key=lambda e: e.utterance_id)
    name = f"{texts.name}-synthetic" if texts.name else "synthetic"
    return GvRunResult(
        manifest=Manifest(tuple(out_entries), name=name),
        records=tuple(records),
        errors=tuple(errors),
    )
