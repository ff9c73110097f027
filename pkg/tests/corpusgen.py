"""Seeded synthetic corpus builders shared across the test suite."""

from __future__ import annotations

import random

from corpusforge.manifest import Manifest, Utterance

WORDS = (
    "le", "la", "commission", "juge", "processus", "nomination", "témoin",
    "québec", "oui", "non", "exact", "transparent", "critère", "sélection",
    "rapport", "document", "monsieur", "madame", "président", "réponse",
    "article", "loi", "ville", "comité", "question",
)


def make_text(rng: random.Random, n_words: int | None = None) -> str:
    n = n_words if n_words is not None else rng.randint(3, 12)
    return " ".join(rng.choice(WORDS) for _ in range(n))


def make_corpus(
    *,
    n_speakers: int = 10,
    utts_per_speaker: int = 10,
    seed: int = 0,
    split: str = "train",
    dur_lo: float = 2.0,
    dur_hi: float = 20.0,
    name: str = "fixture",
    speaker_prefix: str | None = None,
) -> Manifest:
    """Single-split corpus with alternating speaker genders."""
    rng = random.Random(seed)
    prefix = speaker_prefix if speaker_prefix is not None else name
    entries = []
    for s in range(n_speakers):
        speaker = f"{prefix}-spk{s:03d}"
        gender = "F" if s % 2 == 0 else "M"
        for k in range(utts_per_speaker):
            uid = f"{prefix}-u{s:03d}-{k:03d}"
            entries.append(
                Utterance(
                    id=uid,
                    speaker_id=speaker,
                    gender=gender,
                    split=split,
                    text=make_text(rng),
                    audio_ref=f"audio://{uid}",
                    duration_s=round(rng.uniform(dur_lo, dur_hi), 3),
                )
            )
    return Manifest(tuple(entries), name=name)


def make_split_corpus(
    *,
    speakers_per_split: dict[str, int],
    utts_per_speaker: int = 10,
    seed: int = 0,
    dur_lo: float = 2.0,
    dur_hi: float = 20.0,
    name: str = "fixture",
) -> Manifest:
    """Multi-split corpus; speaker sets are disjoint across splits."""
    rng = random.Random(seed)
    entries = []
    for split, n_speakers in speakers_per_split.items():
        for s in range(n_speakers):
            speaker = f"{name}-{split}-spk{s:03d}"
            gender = "F" if s % 2 == 0 else "M"
            for k in range(utts_per_speaker):
                uid = f"{name}-{split}-u{s:03d}-{k:03d}"
                entries.append(
                    Utterance(
                        id=uid,
                        speaker_id=speaker,
                        gender=gender,
                        split=split,
                        text=make_text(rng),
                        audio_ref=f"audio://{uid}",
                        duration_s=round(rng.uniform(dur_lo, dur_hi), 3),
                    )
                )
    return Manifest(tuple(entries), name=name)
