"""Seeded selection procedures: finetuning subsets and per-speaker reference voices."""

from __future__ import annotations

import random
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass

from .manifest import Manifest, Utterance, VoiceCatalog, VoiceChoice
from .textnorm import normalized_char_length


class SelectionError(ValueError):
    """A selection procedure received an unusable configuration or corpus."""


@dataclass(frozen=True)
class FinetuneSelectionConfig:
    """Subset selection: duration window, per-bin rate trimming, hour target."""

    target_hours: float = 12.0
    min_duration_s: float = 5.0
    max_duration_s: float = 15.0
    rate_trim_fraction: float = 0.10
    duration_bin_width_s: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.rate_trim_fraction < 0.5:
            raise SelectionError(
                f"rate_trim_fraction must lie in [0, 0.5), got {self.rate_trim_fraction}"
            )
        if not self.min_duration_s < self.max_duration_s:
            raise SelectionError("duration range requires min < max")
        if self.duration_bin_width_s <= 0:
            raise SelectionError("duration_bin_width_s must be > 0")
        if self.target_hours < 0:
            raise SelectionError("target_hours must be >= 0")


@dataclass(frozen=True)
class VoiceSelectionConfig:
    """Reference-voice constraints: duration window and text-length percentile band."""

    min_duration_s: float = 8.0
    max_duration_s: float = 12.0
    percentile_lo: float = 10.0
    percentile_hi: float = 90.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.percentile_lo < self.percentile_hi <= 100:
            raise SelectionError("percentile band requires 0 <= lo < hi <= 100")
        if not self.min_duration_s < self.max_duration_s:
            raise SelectionError("duration range requires min < max")


@dataclass(frozen=True)
class FinetuneSelection:
    """Selected subset plus a warning flag when the pool ran dry early."""

    manifest: Manifest
    exhausted: bool

    @property
    def hours(self) -> float:
        return self.manifest.total_hours()


def _trim_rate_outliers(
    survivors: list[Utterance], cfg: FinetuneSelectionConfig
) -> list[Utterance]:
    """Drop the shortest/longest text-length tails within each duration bin."""
    bins: dict[int, list[Utterance]] = defaultdict(list)
    for u in survivors:
        bins[int(u.duration_s // cfg.duration_bin_width_s)].append(u)
    kept_ids: set[str] = set()
    for key in sorted(bins):
        group = sorted(bins[key], key=lambda u: (normalized_char_length(u.text), u.id))
        k = int(len(group) * cfg.rate_trim_fraction)
        for u in group[k : len(group) - k]:
            kept_ids.add(u.id)
    return [u for u in survivors if u.id in kept_ids]


def select_finetune_subset(m: Manifest, cfg: FinetuneSelectionConfig) -> FinetuneSelection:
    """Pick a duration-windowed, rate-trimmed subset by fair speaker rotation.

    Utterances outside [min, max] seconds are dropped, then within each
    duration bin the bottom and top ``rate_trim_fraction`` of the
    text-length distribution. Speakers are visited round-robin in seeded
    random order, one seeded draw per speaker per pass, until the hour
    target is met or every pool is empty. Output preserves selection order.
    """
    survivors = [
        u for u in m.entries if cfg.min_duration_s <= u.duration_s <= cfg.max_duration_s
    ]
    survivors = _trim_rate_outliers(survivors, cfg)

    pools: dict[str, list[Utterance]] = defaultdict(list)
    for u in survivors:
        pools[u.speaker_id].append(u)
    rng = random.Random(cfg.seed)
    speakers = sorted(pools)
    rng.shuffle(speakers)

    selected: list[Utterance] = []
    total_h = 0.0
    while total_h < cfg.target_hours:
        took_any = False
        for speaker in speakers:
            if total_h >= cfg.target_hours:
                break
            pool = pools[speaker]
            if not pool:
                continue
            u = pool.pop(rng.randrange(len(pool)))
            selected.append(u)
            total_h += u.duration_s / 3600.0
            took_any = True
        if not took_any:
            break
    exhausted = total_h < cfg.target_hours
    name = f"{m.name}-finetune" if m.name else "finetune"
    return FinetuneSelection(Manifest(tuple(selected), name=name), exhausted=exhausted)


def _text_length_percentile(lengths_sorted: list[int], length: int) -> float:
    """Nearest-rank percentile of a text length over the whole corpus."""
    return 100.0 * bisect_right(lengths_sorted, length) / len(lengths_sorted)


def _violation_score(duration: float, pct: float, cfg: VoiceSelectionConfig) -> float:
    """Unitless distance from the acceptance window; 0 inside it."""
    dur_term = max(
        0.0,
        (cfg.min_duration_s - duration) / cfg.min_duration_s,
        (duration - cfg.max_duration_s) / cfg.max_duration_s,
    )
    pct_term = max(
        0.0,
        (cfg.percentile_lo - pct) / 100.0,
        (pct - cfg.percentile_hi) / 100.0,
    )
    return dur_term + pct_term


def select_reference_voices(m: Manifest, cfg: VoiceSelectionConfig) -> VoiceCatalog:
    """Pick one cloning reference per speaker, falling back to the least-bad fit.

    A candidate must sit inside the duration window and inside the
    [lo, hi] percentile band of the corpus-wide text-length distribution.
    One candidate is drawn per speaker with the seeded generator; a speaker
    with no candidate gets the utterance with the lowest violation score
    (ties broken by utterance id) and its fallback flag set.
    """
    by_speaker: dict[str, list[Utterance]] = defaultdict(list)
    for u in m.entries:
        by_speaker[u.speaker_id].append(u)

    lengths_sorted = sorted(normalized_char_length(u.text) for u in m.entries)
    pct: dict[str, float] = {
        u.id: _text_length_percentile(lengths_sorted, normalized_char_length(u.text))
        for u in m.entries
    }

    rng = random.Random(cfg.seed)
    voices: dict[str, VoiceChoice] = {}
    for speaker in sorted(by_speaker):
        utts = by_speaker[speaker]
        if not utts:
            raise SelectionError(f"speaker {speaker!r} has no utterances")
        candidates = [
            u
            for u in utts
            if cfg.min_duration_s <= u.duration_s <= cfg.max_duration_s
            and cfg.percentile_lo <= pct[u.id] <= cfg.percentile_hi
        ]
        if candidates:
            voices[speaker] = VoiceChoice(rng.choice(candidates), fallback=False)
        else:
            best = min(
                utts, key=lambda u: (_violation_score(u.duration_s, pct[u.id], cfg), u.id)
            )
            voices[speaker] = VoiceChoice(best, fallback=True)
    return VoiceCatalog(voices=voices)
