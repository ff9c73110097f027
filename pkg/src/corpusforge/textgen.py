"""LLM-driven dialogue generation with a rotating prompt schedule.

One batch is one LLM call. The base prompt is always the system message;
from batch 1 on, the five sub-prompts rotate as the user message, one per
batch, replacing (not stacking on) the previous one. Parsed dialogue turns
become train-split utterances with freshly assigned synthetic speakers:
labels emitted by the model are never trusted as identities.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .backends import LlmBackend, LlmMessage, LlmRequest
from .manifest import Manifest, Utterance, utterance_from_json
from .textnorm import normalize, normalized_char_length

logger = logging.getLogger(__name__)

# Speaking-rate used to estimate durations of not-yet-synthesized text,
# mirroring the mock TTS model; realized durations overwrite after synthesis.
CHARS_PER_SECOND = 15.0

SUB_PROMPT_COUNT = 5


class TextgenError(ValueError):
    """Text generation cannot proceed (bad schedule, unusable backend output)."""


@dataclass(frozen=True)
class PromptSchedule:
    """Base prompt plus five rotating sub-prompts and generation targets."""

    base_prompt: str
    sub_prompts: tuple[str, ...]
    batch_size: int = 4
    target_utterances: int = 50_000

    def __post_init__(self) -> None:
        object.__setattr__(self, "sub_prompts", tuple(self.sub_prompts))
        if len(self.sub_prompts) != SUB_PROMPT_COUNT:
            raise TextgenError(
                f"schedule needs exactly {SUB_PROMPT_COUNT} sub-prompts, "
                f"got {len(self.sub_prompts)}"
            )
        if self.batch_size < 1:
            raise TextgenError("batch_size must be >= 1")
        if self.target_utterances < 0:
            raise TextgenError("target_utterances must be >= 0")
        if not self.base_prompt.strip():
            raise TextgenError("base prompt must be non-empty")


_SUB_PROMPT_FILES = (
    "sub1_continuation.txt",
    "sub2_development_of_facts.txt",
    "sub3_familiar_language.txt",
    "sub4_short_answers.txt",
    "sub5_unrelated_topics.txt",
)


def load_prompt_schedule(
    prompts_dir: str | Path | None = None,
    *,
    batch_size: int = 4,
    target_utterances: int = 50_000,
) -> PromptSchedule:
    """Load prompt texts from a directory, defaulting to the packaged files."""
    if prompts_dir is None:
        root = resources.files("corpusforge").joinpath("prompts")
    else:
        root = Path(prompts_dir)
        if not root.is_dir():
            raise TextgenError(f"prompt directory not found: {root}")
    base = root.joinpath("base.txt").read_text(encoding="utf-8")
    subs = tuple(
        root.joinpath(name).read_text(encoding="utf-8") for name in _SUB_PROMPT_FILES
    )
    return PromptSchedule(
        base_prompt=base,
        sub_prompts=subs,
        batch_size=batch_size,
        target_utterances=target_utterances,
    )


def schedule_messages(batch_index: int, sched: PromptSchedule) -> LlmRequest:
    """Messages for one batch: base only at 0, then base plus cycling sub-prompt."""
    if batch_index < 0:
        raise TextgenError(f"batch_index must be >= 0, got {batch_index}")
    messages = [LlmMessage(role="system", content=sched.base_prompt)]
    if batch_index >= 1:
        sub = sched.sub_prompts[(batch_index - 1) % SUB_PROMPT_COUNT]
        messages.append(LlmMessage(role="user", content=sub))
    return LlmRequest(
        messages=tuple(messages), request_id=f"textgen-batch-{batch_index:06d}"
    )


@dataclass(frozen=True)
class DialogueTurn:
    speaker_label: str
    text: str


# A turn opens with 1-4 capitalized name tokens, then a colon. Lines that
# don't open a turn continue the previous one.
_LABEL_TOKEN = r"[A-ZÀ-ÖØ-Þ][\w'’\-.]*"
_TURN_RE = re.compile(
    rf"^\s*(?:\*\*)?({_LABEL_TOKEN}(?:\s+{_LABEL_TOKEN}){{0,3}})\s*(?:\*\*)?\s*:\s*(.*)$"
)


def _clean_turn_text(parts: list[str]) -> str:
    text = " ".join(p for p in parts if p)
    text = text.replace("«", " ").replace("»", " ")
    text = text.strip().strip('"').strip("“”")
    return " ".join(text.split())


def parse_dialogue(raw: str) -> list[DialogueTurn]:
    """Split generated dialogue into labeled turns; tolerant, never raises.

    Guillemets and wrapping quotes are removed; unlabeled lines attach to
    the previous turn; turns empty after normalization are dropped.
    Totally unparseable input yields an empty list plus a logged diagnostic.
    """
    pending: list[tuple[str, list[str]]] = []
    orphans = 0
    for line in raw.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        match = _TURN_RE.match(stripped)
        if match:
            pending.append((match.group(1), [match.group(2)]))
        elif pending:
            pending[-1][1].append(stripped)
        else:
            orphans += 1
    if orphans:
        logger.warning("parse_dialogue: %d line(s) before any speaker label", orphans)
    turns: list[DialogueTurn] = []
    for label, parts in pending:
        text = _clean_turn_text(parts)
        if normalize(text):
            turns.append(DialogueTurn(speaker_label=label, text=text))
    return turns


def _estimated_duration_s(text: str) -> float:
    return max(1, normalized_char_length(text)) / CHARS_PER_SECOND


def _read_checkpoint(path: Path) -> tuple[int, int, list[Utterance]]:
    raw = json.loads(path.read_text(encoding="utf-8"))
    entries = [
        utterance_from_json(item, where=f"{path}: entry {i}")
        for i, item in enumerate(raw["entries"])
    ]
    return int(raw["next_batch"]), int(raw["speaker_count"]), entries


def _write_checkpoint(
    path: Path, next_batch: int, speaker_count: int, entries: list[Utterance]
) -> None:
    payload = {
        "next_batch": next_batch,
        "speaker_count": speaker_count,
        "entries": [u.to_json_dict() for u in entries],
    }
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")
    tmp.replace(path)


def run_textgen(
    sched: PromptSchedule,
    llm: LlmBackend,
    *,
    seed: int = 0,
    checkpoint_path: str | Path | None = None,
    name: str = "generated-text",
) -> Manifest:
    """Request batches until the utterance target is met; checkpoint per batch.

    Each distinct label within a batch gets the next synthetic speaker id,
    genders alternating, split fixed to train. Durations are estimated from
    text length so hour-based recipes can consume the output pre-synthesis.
    A mid-run crash resumes at the last completed batch and reproduces the
    uninterrupted result for the same backend and seed.
    """
    ckpt = Path(checkpoint_path) if checkpoint_path is not None else None
    entries: list[Utterance] = []
    speaker_count = 0
    batch = 0
    if ckpt is not None and ckpt.exists():
        batch, speaker_count, entries = _read_checkpoint(ckpt)

    # A backend emitting nothing parseable must not spin forever.
    max_batches = 10 * (sched.target_utterances // sched.batch_size + 1) + 50
    while len(entries) < sched.target_utterances:
        if batch >= max_batches:
            raise TextgenError(
                f"gave up after {batch} batches with {len(entries)} of "
                f"{sched.target_utterances} utterances; backend output unusable?"
            )
        req = schedule_messages(batch, sched)
        req = replace(req, request_id=f"textgen-s{seed}-b{batch:06d}")
        response = llm.generate_text(req)
        turns = parse_dialogue(response.content)

        label_speakers: dict[str, tuple[str, str]] = {}
        for turn_index, turn in enumerate(turns):
            if len(entries) >= sched.target_utterances:
                break
            if turn.speaker_label not in label_speakers:
                speaker_id = f"genspk{speaker_count:05d}"
                gender = "F" if speaker_count % 2 == 0 else "M"
                label_speakers[turn.speaker_label] = (speaker_id, gender)
                speaker_count += 1
            speaker_id, gender = label_speakers[turn.speaker_label]
            uid = f"gen-{batch:06d}-{turn_index:03d}"
            entries.append(
                Utterance(
                    id=uid,
                    speaker_id=speaker_id,
                    gender=gender,
                    split="train",
                    text=turn.text,
                    audio_ref=f"pending://{uid}",
                    duration_s=_estimated_duration_s(turn.text),
                    origin="generated_text",
                )
            )
        batch += 1
        if ckpt is not None:
            _write_checkpoint(ckpt, batch, speaker_count, entries)

    return Manifest(tuple(entries), name=name)
