"""Core corpus data model and JSONL serialization.

A manifest file is the contract between every pipeline stage: one JSON
object per line, UTF-8, LF line endings, fixed key order, no trailing
whitespace. The same conventions carry voice catalogs and generation
records. See README for the field-by-field schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

GENDERS = ("F", "M")
SPLITS = ("train", "dev", "test")
ORIGINS = ("real", "synthetic", "generated_text")


class ManifestError(ValueError):
    """A manifest, catalog, or record violates its invariants."""


@dataclass(frozen=True)
class Utterance:
    """One transcribed audio segment, the atom of every manifest."""

    id: str
    speaker_id: str
    gender: str
    split: str
    text: str
    audio_ref: str
    duration_s: float
    origin: str = "real"
    utmos: float | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ManifestError("utterance id must be a non-empty string")
        tag = f"utterance {self.id!r}"
        if not self.speaker_id:
            raise ManifestError(f"{tag}: speaker_id must be non-empty")
        if self.gender not in GENDERS:
            raise ManifestError(f"{tag}: gender must be one of {GENDERS}, got {self.gender!r}")
        if self.split not in SPLITS:
            raise ManifestError(f"{tag}: split must be one of {SPLITS}, got {self.split!r}")
        if not self.text.strip():
            raise ManifestError(f"{tag}: text must be non-empty after whitespace trim")
        if not isinstance(self.duration_s, (int, float)) or not self.duration_s > 0:
            raise ManifestError(f"{tag}: duration_s must be > 0, got {self.duration_s!r}")
        if self.origin not in ORIGINS:
            raise ManifestError(f"{tag}: origin must be one of {ORIGINS}, got {self.origin!r}")
        if self.utmos is not None and not (1.0 <= self.utmos <= 5.0):
            raise ManifestError(f"{tag}: utmos must lie in [1, 5], got {self.utmos!r}")

    def to_json_dict(self) -> dict:
        out = {
            "id": self.id,
            "speaker_id": self.speaker_id,
            "gender": self.gender,
            "split": self.split,
            "text": self.text,
            "audio_ref": self.audio_ref,
            "duration_s": self.duration_s,
            "origin": self.origin,
        }
        if self.utmos is not None:
            out["utmos"] = self.utmos
        return out


_REQUIRED_KEYS = ("id", "speaker_id", "gender", "split", "text", "audio_ref", "duration_s", "origin")
_ALL_KEYS = frozenset(_REQUIRED_KEYS) | {"utmos"}


def utterance_from_json(raw: Mapping, *, where: str = "record") -> Utterance:
    """Build an Utterance from a parsed JSON object, naming missing/unknown fields."""
    if not isinstance(raw, Mapping):
        raise ManifestError(f"{where}: expected a JSON object, got {type(raw).__name__}")
    for key in _REQUIRED_KEYS:
        if key not in raw:
            raise ManifestError(f"{where}: missing field {key!r}")
    unknown = set(raw) - _ALL_KEYS
    if unknown:
        raise ManifestError(f"{where}: unknown field(s) {sorted(unknown)}")
    try:
        duration = float(raw["duration_s"])
    except (TypeError, ValueError):
        raise ManifestError(f"{where}: duration_s must be a number, got {raw['duration_s']!r}") from None
    utmos = raw.get("utmos")
    if utmos is not None:
        try:
            utmos = float(utmos)
        except (TypeError, ValueError):
            raise ManifestError(f"{where}: utmos must be a number, got {utmos!r}") from None
    try:
        return Utterance(
            id=str(raw["id"]),
            speaker_id=str(raw["speaker_id"]),
            gender=str(raw["gender"]),
            split=str(raw["split"]),
            text=str(raw["text"]),
            audio_ref=str(raw["audio_ref"]),
            duration_s=duration,
            origin=str(raw["origin"]),
            utmos=utmos,
        )
    except ManifestError as exc:
        raise ManifestError(f"{where}: {exc}") from None


@dataclass(frozen=True)
class Manifest:
    """Ordered utterance collection with integrity invariants.

    ``name`` is a display label (taken from the file stem on read) and is
    excluded from equality so serialization round-trips compare on content.
    """

    entries: tuple[Utterance, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        seen: set[str] = set()
        for u in self.entries:
            if u.id in seen:
                raise ManifestError(f"duplicate utterance id {u.id!r}")
            seen.add(u.id)
        split_speakers: dict[str, set[str]] = {s: set() for s in SPLITS}
        for u in self.entries:
            split_speakers[u.split].add(u.speaker_id)
        for i, a in enumerate(SPLITS):
            for b in SPLITS[i + 1 :]:
                overlap = split_speakers[a] & split_speakers[b]
                if overlap:
                    spk = sorted(overlap)[0]
                    raise ManifestError(
                        f"speaker {spk!r} appears in both {a!r} and {b!r} splits"
                    )

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Utterance]:
        return iter(self.entries)

    def speakers(self) -> set[str]:
        return {u.speaker_id for u in self.entries}

    def by_id(self) -> dict[str, Utterance]:
        return {u.id: u for u in self.entries}

    def total_hours(self) -> float:
        return total_hours(self)


def total_hours(m: Manifest) -> float:
    """Total speech duration of a manifest in hours."""
    return sum(u.duration_s for u in m.entries) / 3600.0


def read_manifest(path: str | Path) -> Manifest:
    """Read a JSONL manifest, validating every record and the manifest invariants."""
    path = Path(path)
    entries: list[Utterance] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                raise ManifestError(f"{path}: line {lineno}: blank line in manifest")
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}: line {lineno}: invalid JSON: {exc.msg}") from None
            entries.append(utterance_from_json(raw, where=f"{path}: line {lineno}"))
    return Manifest(entries=tuple(entries), name=path.stem)


def write_manifest(m: Manifest, path: str | Path) -> None:
    """Write a manifest as JSONL; ``read_manifest(write_manifest(m)) == m``."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for u in m.entries:
            fh.write(json.dumps(u.to_json_dict(), ensure_ascii=False))
            fh.write("\n")


@dataclass(frozen=True)
class VoiceChoice:
    """A speaker's cloning reference; fallback marks a constraint miss."""

    utterance: Utterance
    fallback: bool


@dataclass(frozen=True)
class VoiceCatalog:
    """speaker_id -> single reference utterance used for voice cloning."""

    voices: dict[str, VoiceChoice]

    def __post_init__(self) -> None:
        for speaker_id, choice in self.voices.items():
            if choice.utterance.speaker_id != speaker_id:
                raise ManifestError(
                    f"voice catalog entry {speaker_id!r} holds an utterance of "
                    f"speaker {choice.utterance.speaker_id!r}"
                )
        object.__setattr__(
            self, "voices", {k: self.voices[k] for k in sorted(self.voices)}
        )

    def __len__(self) -> int:
        return len(self.voices)

    def speakers(self) -> set[str]:
        return set(self.voices)

    def fallback_count(self) -> int:
        return sum(1 for c in self.voices.values() if c.fallback)


def read_voice_catalog(path: str | Path) -> VoiceCatalog:
    path = Path(path)
    voices: dict[str, VoiceChoice] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            where = f"{path}: line {lineno}"
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{where}: invalid JSON: {exc.msg}") from None
            for key in ("speaker_id", "fallback", "utterance"):
                if key not in raw:
                    raise ManifestError(f"{where}: missing field {key!r}")
            speaker_id = str(raw["speaker_id"])
            if speaker_id in voices:
                raise ManifestError(f"{where}: duplicate speaker {speaker_id!r}")
            voices[speaker_id] = VoiceChoice(
                utterance=utterance_from_json(raw["utterance"], where=where),
                fallback=bool(raw["fallback"]),
            )
    return VoiceCatalog(voices=voices)


def write_voice_catalog(catalog: VoiceCatalog, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for speaker_id, choice in catalog.voices.items():
            record = {
                "speaker_id": speaker_id,
                "fallback": choice.fallback,
                "utterance": choice.utterance.to_json_dict(),
            }
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


@dataclass(frozen=True)
class GenerationAttempt:
    """One synthesize-transcribe-score round for an utterance."""

    attempt_index: int
    transcript: str
    wer: float
    audio_ref: str
    duration_s: float

    def __post_init__(self) -> None:
        if self.attempt_index < 1:
            raise ManifestError(f"attempt_index must be >= 1, got {self.attempt_index}")
        if self.wer < 0:
            raise ManifestError(f"attempt wer must be >= 0, got {self.wer}")

    def to_json_dict(self) -> dict:
        return {
            "attempt_index": self.attempt_index,
            "transcript": self.transcript,
            "wer": self.wer,
            "audio_ref": self.audio_ref,
            "duration_s": self.duration_s,
        }


@dataclass(frozen=True)
class GenerationRecord:
    """Full trace of the generate-verify loop for one utterance.

    ``chosen_attempt`` is the 1-based attempt number; for accepted records it
    is the first attempt under the threshold, for rejected ones the best.
    """

    utterance_id: str
    attempts: tuple[GenerationAttempt, ...]
    accepted: bool
    chosen_attempt: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "attempts", tuple(self.attempts))
        tag = f"record {self.utterance_id!r}"
        if not self.attempts:
            raise ManifestError(f"{tag}: at least one attempt required")
        for pos, att in enumerate(self.attempts, start=1):
            if att.attempt_index != pos:
                raise ManifestError(
                    f"{tag}: attempt {pos} carries attempt_index {att.attempt_index}"
                )
        if not 1 <= self.chosen_attempt <= len(self.attempts):
            raise ManifestError(
                f"{tag}: chosen_attempt {self.chosen_attempt} outside 1..{len(self.attempts)}"
            )
        if self.accepted and self.chosen_attempt != len(self.attempts):
            raise ManifestError(f"{tag}: accepted record has attempts after the chosen one")

    @property
    def chosen(self) -> GenerationAttempt:
        return self.attempts[self.chosen_attempt - 1]

    def to_json_dict(self) -> dict:
        return {
            "utterance_id": self.utterance_id,
            "attempts": [a.to_json_dict() for a in self.attempts],
            "accepted": self.accepted,
            "chosen_attempt": self.chosen_attempt,
        }


@dataclass(frozen=True)
class GenerationError:
    """Backend transport failure for one utterance, distinct from quality rejection."""

    utterance_id: str
    error: str

    def to_json_dict(self) -> dict:
        return {"utterance_id": self.utterance_id, "error": self.error}


def _attempt_from_json(raw: Mapping, where: str) -> GenerationAttempt:
    for key in ("attempt_index", "transcript", "wer", "audio_ref", "duration_s"):
        if key not in raw:
            raise ManifestError(f"{where}: attempt missing field {key!r}")
    return GenerationAttempt(
        attempt_index=int(raw["attempt_index"]),
        transcript=str(raw["transcript"]),
        wer=float(raw["wer"]),
        audio_ref=str(raw["audio_ref"]),
        duration_s=float(raw["duration_s"]),
    )


def read_generation_log(
    path: str | Path,
) -> tuple[list[GenerationRecord], list[GenerationError]]:
    """Read a records file, separating quality records from transport errors."""
    path = Path(path)
    records: list[GenerationRecord] = []
    errors: list[GenerationError] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            where = f"{path}: line {lineno}"
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{where}: invalid JSON: {exc.msg}") from None
            if "error" in raw:
                errors.append(GenerationError(str(raw["utterance_id"]), str(raw["error"])))
                continue
            for key in ("utterance_id", "attempts", "accepted", "chosen_attempt"):
                if key not in raw:
                    raise ManifestError(f"{where}: missing field {key!r}")
            records.append(
                GenerationRecord(
                    utterance_id=str(raw["utterance_id"]),
                    attempts=tuple(
                        _attempt_from_json(a, where) for a in raw["attempts"]
                    ),
                    accepted=bool(raw["accepted"]),
                    chosen_attempt=int(raw["chosen_attempt"]),
                )
            )
    return records, errors


def write_generation_log(
    records: Iterable[GenerationRecord],
    errors: Iterable[GenerationError],
    path: str | Path,
) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json_dict(), ensure_ascii=False))
            fh.write("\n")
        for err in errors:
            fh.write(json.dumps(err.to_json_dict(), ensure_ascii=False))
            fh.write("\n")
