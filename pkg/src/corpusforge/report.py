"""Evaluation tables, corpus summaries, and generation-audit statistics.

WER cells pool edit and reference-word counts before dividing, so overall
figures are count-weighted aggregates of their gender cells, never means of
cell rates. Rendered tables use one-decimal percentages and fixed ordering;
machine-readable dicts are emitted alongside.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .manifest import GENDERS, SPLITS, GenerationRecord, Manifest
from .textnorm import normalize
from .wer import wer


class ReportError(ValueError):
    """Report inputs do not resolve against the evaluation manifest."""


@dataclass(frozen=True)
class EvalPair:
    """Reference/hypothesis texts for one utterance of the eval manifest."""

    utterance_id: str
    ref_text: str
    hyp_text: str


@dataclass(frozen=True)
class CellCounts:
    """Pooled edit counts for one table cell."""

    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    ref_len: int = 0
    n_utterances: int = 0

    @property
    def edits(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        return self.edits / max(self.ref_len, 1)

    @property
    def wer_pct(self) -> float:
        return 100.0 * self.wer

    def merged(self, other: "CellCounts") -> "CellCounts":
        return CellCounts(
            substitutions=self.substitutions + other.substitutions,
            deletions=self.deletions + other.deletions,
            insertions=self.insertions + other.insertions,
            ref_len=self.ref_len + other.ref_len,
            n_utterances=self.n_utterances + other.n_utterances,
        )


@dataclass(frozen=True)
class WerTable:
    """(split, gender) cells plus per-split pooled overall counts."""

    cells: dict[tuple[str, str], CellCounts]
    overall: dict[str, CellCounts]


def evaluate(pairs: Sequence[EvalPair], m: Manifest) -> WerTable:
    """Pool per-cell WER over (split, gender); every pair id must resolve."""
    by_id = m.by_id()
    cells: dict[tuple[str, str], CellCounts] = defaultdict(CellCounts)
    for pair in pairs:
        u = by_id.get(pair.utterance_id)
        if u is None:
            raise ReportError(f"eval pair references unknown utterance {pair.utterance_id!r}")
        b = wer(normalize(pair.ref_text), normalize(pair.hyp_text))
        add = CellCounts(
            substitutions=b.substitutions,
            deletions=b.deletions,
            insertions=b.insertions,
            ref_len=b.ref_len,
            n_utterances=1,
        )
        cells[(u.split, u.gender)] = cells[(u.split, u.gender)].merged(add)
    overall: dict[str, CellCounts] = {}
    for (split, _gender), counts in cells.items():
        overall[split] = overall.get(split, CellCounts()).merged(counts)
    return WerTable(cells=dict(cells), overall=overall)


def render_wer_table(table: WerTable) -> str:
    """Fixed-layout text table: dev/test columns split by gender, then overall."""
    columns = [
        (split, gender)
        for split in ("dev", "test")
        for gender in GENDERS
        if (split, gender) in table.cells
    ]
    if not columns:
        columns = [(s, g) for s in ("dev", "test") for g in GENDERS]
    lines = []
    header = "        " + "".join(f"{f'{s}_{g}':>9}" for s, g in columns)
    lines.append(header)
    row = "%WER    "
    for key in columns:
        counts = table.cells.get(key)
        row += f"{counts.wer_pct:9.1f}" if counts is not None else f"{'-':>9}"
    lines.append(row)
    lines.append("")
    splits = [s for s in ("dev", "test", "train") if s in table.overall]
    lines.append("overall " + "".join(f"{s:>9}" for s in splits))
    lines.append(
        "%WER    " + "".join(f"{table.overall[s].wer_pct:9.1f}" for s in splits)
    )
    return "\n".join(lines) + "\n"


def wer_table_to_dict(table: WerTable) -> dict:
    def cell_dict(c: CellCounts) -> dict:
        return {
            "wer_pct": round(c.wer_pct, 4),
            "substitutions": c.substitutions,
            "deletions": c.deletions,
            "insertions": c.insertions,
            "ref_len": c.ref_len,
            "n_utterances": c.n_utterances,
        }

    return {
        "cells": {
            f"{split}_{gender}": cell_dict(counts)
            for (split, gender), counts in sorted(table.cells.items())
        },
        "overall": {
            split: cell_dict(counts) for split, counts in sorted(table.overall.items())
        },
    }


@dataclass(frozen=True)
class SplitSummary:
    hours: float = 0.0
    n_utterances: int = 0
    n_words: int = 0
    n_speakers: int = 0
    pct_female_speakers: float = 0.0
    pct_female_duration: float = 0.0


def corpus_summary(m: Manifest) -> dict[str, SplitSummary]:
    """Per-split hours, counts, and gender shares; absent splits report zeros."""
    out: dict[str, SplitSummary] = {}
    for split in SPLITS:
        entries = [u for u in m.entries if u.split == split]
        duration = sum(u.duration_s for u in entries)
        words = sum(len(normalize(u.text)) for u in entries)
        speaker_gender: dict[str, str] = {}
        for u in entries:
            speaker_gender.setdefault(u.speaker_id, u.gender)
        n_speakers = len(speaker_gender)
        n_female = sum(1 for g in speaker_gender.values() if g == "F")
        female_duration = sum(u.duration_s for u in entries if u.gender == "F")
        out[split] = SplitSummary(
            hours=duration / 3600.0,
            n_utterances=len(entries),
            n_words=words,
            n_speakers=n_speakers,
            pct_female_speakers=100.0 * n_female / n_speakers if n_speakers else 0.0,
            pct_female_duration=100.0 * female_duration / duration if duration else 0.0,
        )
    return out


_SUMMARY_ORDER = ("dev", "test", "train")


def render_corpus_summary(summary: dict[str, SplitSummary], name: str = "") -> str:
    lines = []
    title = f"Corpus summary: {name}" if name else "Corpus summary"
    lines.append(title)
    lines.append(
        f"{'Split':<7}{'Dur. (h)':>10}{'N. utt.':>10}{'N. words':>10}"
        f"{'N. spk':>8}{'Fem. spk (%)':>14}{'Fem. dur (%)':>14}"
    )
    for split in _SUMMARY_ORDER:
        s = summary[split]
        lines.append(
            f"{split:<7}{s.hours:>10.1f}{s.n_utterances:>10}{s.n_words:>10}"
            f"{s.n_speakers:>8}{s.pct_female_speakers:>14.1f}{s.pct_female_duration:>14.1f}"
        )
    return "\n".join(lines) + "\n"


def corpus_summary_to_dict(summary: dict[str, SplitSummary]) -> dict:
    return {
        split: {
            "hours": round(s.hours, 4),
            "n_utterances": s.n_utterances,
            "n_words": s.n_words,
            "n_speakers": s.n_speakers,
            "pct_female_speakers": round(s.pct_female_speakers, 4),
            "pct_female_duration": round(s.pct_female_duration, 4),
        }
        for split, s in sorted(summary.items())
    }


@dataclass(frozen=True)
class WerSpread:
    minimum: float
    mean: float
    maximum: float


def _spread(values: list[float]) -> WerSpread | None:
    if not values:
        return None
    return WerSpread(min(values), sum(values) / len(values), max(values))


@dataclass(frozen=True)
class GvStats:
    """Audit view of a generate-verify run."""

    n_records: int
    n_accepted: int
    n_rejected: int
    acceptance_rate: float
    attempts_histogram: dict[int, int]
    accepted_wer: WerSpread | None
    rejected_wer: WerSpread | None


def gv_report(records: Iterable[GenerationRecord]) -> GvStats:
    """Acceptance rate, attempts histogram, and WER spread of chosen attempts."""
    records = list(records)
    histogram: Counter[int] = Counter(len(r.attempts) for r in records)
    accepted = [r for r in records if r.accepted]
    rejected = [r for r in records if not r.accepted]
    max_bucket = max(histogram) if histogram else 1
    return GvStats(
        n_records=len(records),
        n_accepted=len(accepted),
        n_rejected=len(rejected),
        acceptance_rate=len(accepted) / len(records) if records else 0.0,
        attempts_histogram={k: histogram.get(k, 0) for k in range(1, max_bucket + 1)},
        accepted_wer=_spread([r.chosen.wer for r in accepted]),
        rejected_wer=_spread([r.chosen.wer for r in rejected]),
    )


def render_gv_report(stats: GvStats) -> str:
    lines = [
        f"records: {stats.n_records}  accepted: {stats.n_accepted}  "
        f"rejected: {stats.n_rejected}  acceptance: {stats.acceptance_rate:.4f}",
        "attempts histogram:",
    ]
    for k in sorted(stats.attempts_histogram):
        lines.append(f"  {k:>3}: {stats.attempts_histogram[k]}")
    for label, spread in (("accepted", stats.accepted_wer), ("rejected", stats.rejected_wer)):
        if spread is None:
            lines.append(f"{label} WER: n/a")
        else:
            lines.append(
                f"{label} WER: min {spread.minimum:.3f}  mean {spread.mean:.3f}  "
                f"max {spread.maximum:.3f}"
            )
    return "\n".join(lines) + "\n"


def gv_stats_to_dict(stats: GvStats) -> dict:
    def spread_dict(s: WerSpread | None) -> dict | None:
        if s is None:
            return None
        return {"min": s.minimum, "mean": s.mean, "max": s.maximum}

    return {
        "n_records": stats.n_records,
        "n_accepted": stats.n_accepted,
        "n_rejected": stats.n_rejected,
        "acceptance_rate": stats.acceptance_rate,
        "attempts_histogram": {str(k): v for k, v in sorted(stats.attempts_histogram.items())},
        "accepted_wer": spread_dict(stats.accepted_wer),
        "rejected_wer": spread_dict(stats.rejected_wer),
    }
