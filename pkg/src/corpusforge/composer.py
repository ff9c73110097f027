"""Dataset composition: constrained pairing plans, hybrid mixes, nesting checks."""

from __future__ import annotations

import json
import random
from collections import defaultdict, deque
from dataclasses import dataclass
from pathlib import Path

from .manifest import Manifest, Utterance, VoiceCatalog, total_hours
from .seeding import derive_seed


class CompositionError(ValueError):
    """A pairing plan or recipe cannot be satisfied by its sources."""


@dataclass(frozen=True)
class Pairing:
    """One text utterance paired with one cloning voice."""

    text_id: str
    voice_speaker_id: str


@dataclass(frozen=True)
class PairingPlan:
    """Unique (text, voice) pairs drawn under gender/split constraints."""

    pairs: tuple[Pairing, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(self.pairs))
        seen: set[tuple[str, str]] = set()
        for p in self.pairs:
            key = (p.text_id, p.voice_speaker_id)
            if key in seen:
                raise CompositionError(f"duplicate pairing {key}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.pairs)


def validate_pairing_plan(plan: PairingPlan, texts: Manifest, catalog: VoiceCatalog) -> None:
    """Check every pair resolves and matches gender and split; raise otherwise."""
    texts_by_id = texts.by_id()
    for p in plan.pairs:
        t = texts_by_id.get(p.text_id)
        if t is None:
            raise CompositionError(f"pairing references unknown text {p.text_id!r}")
        choice = catalog.voices.get(p.voice_speaker_id)
        if choice is None:
            raise CompositionError(
                f"pairing references unknown voice speaker {p.voice_speaker_id!r}"
            )
        v = choice.utterance
        if v.gender != t.gender:
            raise CompositionError(
                f"pairing ({p.text_id!r}, {p.voice_speaker_id!r}) mismatches gender: "
                f"text {t.gender} vs voice {v.gender}"
            )
        if v.split != t.split:
            raise CompositionError(
                f"pairing ({p.text_id!r}, {p.voice_speaker_id!r}) mismatches split: "
                f"text {t.split} vs voice {v.split}"
            )


def plan_pairings(
    texts: Manifest, catalog: VoiceCatalog, target_hours: float, seed: int
) -> PairingPlan:
    """Draw unique text/voice pairs until the reference-duration budget is met.

    Texts are drawn uniformly with replacement; the voice uniformly among
    catalog speakers of the same (gender, split) cell. Duplicate pairs are
    redrawn. Hour accounting uses the source text's reference duration,
    since planning precedes generation. The first pair crossing the target
    is included.
    """
    cell_voices: dict[tuple[str, str], list[str]] = defaultdict(list)
    for speaker_id, choice in catalog.voices.items():
        u = choice.utterance
        cell_voices[(u.gender, u.split)].append(speaker_id)
    for speakers in cell_voices.values():
        speakers.sort()

    text_list = list(texts.entries)
    cell_texts: dict[tuple[str, str], int] = defaultdict(int)
    for t in text_list:
        cell = (t.gender, t.split)
        if not cell_voices.get(cell):
            raise CompositionError(
                f"no catalog voice for cell gender={cell[0]} split={cell[1]}"
            )
        cell_texts[cell] += 1
    total_possible = sum(
        n_texts * len(cell_voices[cell]) for cell, n_texts in cell_texts.items()
    )

    rng = random.Random(seed)
    used: set[tuple[str, str]] = set()
    pairs: list[Pairing] = []
    cum_hours = 0.0
    while cum_hours < target_hours:
        if len(used) == total_possible:
            raise CompositionError(
                f"all {total_possible} text/voice pairs used before reaching "
                f"{target_hours} h (planned {cum_hours:.2f} h)"
            )
        while True:
            t = text_list[rng.randrange(len(text_list))]
            voices = cell_voices[(t.gender, t.split)]
            s = voices[rng.randrange(len(voices))]
            if (t.id, s) not in used:
                break
        used.add((t.id, s))
        pairs.append(Pairing(text_id=t.id, voice_speaker_id=s))
        cum_hours += t.duration_s / 3600.0
    plan = PairingPlan(pairs=tuple(pairs), seed=seed)
    validate_pairing_plan(plan, texts, catalog)
    return plan


def planned_hours(plan: PairingPlan, texts: Manifest) -> float:
    """Reference-duration total of a plan, in hours."""
    by_id = texts.by_id()
    return sum(by_id[p.text_id].duration_s for p in plan.pairs) / 3600.0


_PLAN_META_KIND = "pairing_plan"


def write_pairing_plan(plan: PairingPlan, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps({"kind": _PLAN_META_KIND, "seed": plan.seed}))
        fh.write("\n")
        for p in plan.pairs:
            fh.write(json.dumps({"text_id": p.text_id, "voice_speaker_id": p.voice_speaker_id}))
            fh.write("\n")


def read_pairing_plan(path: str | Path) -> PairingPlan:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CompositionError(f"{path}: empty pairing plan file")
    meta = json.loads(lines[0])
    if meta.get("kind") != _PLAN_META_KIND:
        raise CompositionError(f"{path}: first line is not a pairing-plan header")
    pairs = []
    for lineno, line in enumerate(lines[1:], start=2):
        raw = json.loads(line)
        try:
            pairs.append(Pairing(str(raw["text_id"]), str(raw["voice_speaker_id"])))
        except KeyError as exc:
            raise CompositionError(f"{path}: line {lineno}: missing field {exc}") from None
    return PairingPlan(pairs=tuple(pairs), seed=int(meta.get("seed", 0)))


@dataclass(frozen=True)
class Recipe:
    """Declarative hybrid dataset: hour targets per component plus sources."""

    name: str
    synth_hours: float
    real_hours: float
    synth_source: str = ""
    real_source: str = ""
    seed: int = 0

    def __post_init__(self) -> None:
        if self.synth_hours < 0 or self.real_hours < 0:
            raise CompositionError("recipe hour targets must be >= 0")
        if self.synth_hours + self.real_hours <= 0:
            raise CompositionError("recipe must request a positive total duration")


# (synthetic hours, real hours) mixes reported for the 360 h and Charb-scale runs.
HYBRID_PRESETS: dict[str, tuple[float, float]] = {
    "mix-350-10": (350.0, 10.0),
    "mix-330-30": (330.0, 30.0),
    "mix-300-60": (300.0, 60.0),
    "mix-710-10": (710.0, 10.0),
    "mix-710-60": (710.0, 60.0),
}


def load_recipe(path: str | Path) -> Recipe:
    path = Path(path)
    raw = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise CompositionError(f"{path}: recipe must be a JSON object")
    if "preset" in raw:
        preset = str(raw["preset"])
        if preset not in HYBRID_PRESETS:
            raise CompositionError(
                f"{path}: unknown preset {preset!r}; known: {sorted(HYBRID_PRESETS)}"
            )
        synth_h, real_h = HYBRID_PRESETS[preset]
        raw.setdefault("name", preset)
        raw.setdefault("synth_hours", synth_h)
        raw.setdefault("real_hours", real_h)
    try:
        return Recipe(
            name=str(raw["name"]),
            synth_hours=float(raw["synth_hours"]),
            real_hours=float(raw["real_hours"]),
            synth_source=str(raw.get("synth_source", "")),
            real_source=str(raw.get("real_source", "")),
            seed=int(raw.get("seed", 0)),
        )
    except KeyError as exc:
        raise CompositionError(f"{path}: recipe missing field {exc}") from None


def _round_robin_hours(
    m: Manifest, target_hours: float, rng: random.Random, component: str
) -> list[Utterance]:
    """Consume seeded per-speaker queues one utterance per pass until the target.

    The consumption sequence depends only on (manifest, rng state), never on
    the target, so smaller targets select a strict prefix of larger ones.
    """
    if target_hours <= 0:
        return []
    available = total_hours(m)
    if available < target_hours:
        raise CompositionError(
            f"{component} component needs {target_hours} h but source has "
            f"{available:.3f} h (short {target_hours - available:.3f} h)"
        )
    grouped: dict[str, list[Utterance]] = defaultdict(list)
    for u in m.entries:
        grouped[u.speaker_id].append(u)
    speakers = sorted(grouped)
    rng.shuffle(speakers)
    queues: dict[str, deque[Utterance]] = {}
    for s in speakers:
        q = grouped[s]
        rng.shuffle(q)
        queues[s] = deque(q)

    selected: list[Utterance] = []
    cum_hours = 0.0
    while cum_hours < target_hours:
        took_any = False
        for s in speakers:
            if cum_hours >= target_hours:
                break
            q = queues[s]
            if not q:
                continue
            u = q.popleft()
            selected.append(u)
            cum_hours += u.duration_s / 3600.0
            took_any = True
        if not took_any:
            break
    return selected


def compose_hybrid(recipe: Recipe, synth: Manifest, real: Manifest) -> Manifest:
    """Compose a hybrid corpus by independent seeded round-robin per component.

    Component seeds derive from the recipe seed alone, so recipes differing
    only in hour targets share consumption order and nest by construction.
    """
    synth_rng = random.Random(derive_seed(recipe.seed, "synthetic-component"))
    real_rng = random.Random(derive_seed(recipe.seed, "real-component"))
    synth_sel = _round_robin_hours(synth, recipe.synth_hours, synth_rng, "synthetic")
    real_sel = _round_robin_hours(real, recipe.real_hours, real_rng, "real")
    return Manifest(tuple(synth_sel + real_sel), name=recipe.name)


def verify_nesting(smaller: Manifest, larger: Manifest) -> bool:
    """True iff smaller's id set is a strict subset of larger's."""
    a = {u.id for u in smaller.entries}
    b = {u.id for u in larger.entries}
    return a <= b and a != b
