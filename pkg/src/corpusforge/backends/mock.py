"""Deterministic mock backends so the full pipeline runs GPU-free.

Mock audio is a self-describing locator embedding the synthesized text, so
the mock verifier can "transcribe" without touching real audio. All mocks
are stateless per request: identical request plus identical mock seed gives
an identical response regardless of scheduling.
"""

from __future__ import annotations

import base64
import json
import random

from ..seeding import derive_seed
from ..textnorm import normalized_char_length
from .base import (
    AsrRequest,
    AsrResponse,
    LlmRequest,
    LlmResponse,
    SchemaError,
    TtsRequest,
    TtsResponse,
    validate_asr_request,
    validate_llm_request,
    validate_tts_request,
)

_MOCK_AUDIO_PREFIX = "mock-audio:"

# Lowercase alphabetic junk survives normalization and never collides with
# real fixture vocabulary, so each planted corruption stays an edit.
_JUNK_WORDS = ("xqz", "vvk", "zzj", "qjx")


def encode_mock_audio(text: str, request_id: str, duration_s: float) -> str:
    payload = {"text": text, "request_id": request_id, "duration_s": duration_s}
    blob = base64.urlsafe_b64encode(
        json.dumps(payload, ensure_ascii=False).encode("utf-8")
    ).decode("ascii")
    return _MOCK_AUDIO_PREFIX + blob


def decode_mock_audio(locator: str) -> dict:
    if not locator.startswith(_MOCK_AUDIO_PREFIX):
        raise SchemaError(f"not a mock audio locator: {locator[:40]!r}")
    try:
        raw = base64.urlsafe_b64decode(locator[len(_MOCK_AUDIO_PREFIX) :].encode("ascii"))
        payload = json.loads(raw.decode("utf-8"))
    except Exception as exc:
        raise SchemaError(f"corrupt mock audio locator: {exc}") from None
    return payload


class MockTts:
    """Closed-form duration model: len(normalized text) / rate, optional jitter."""

    def __init__(self, *, rate_chars_per_s: float = 15.0, jitter: float = 0.0, seed: int = 0):
        if rate_chars_per_s <= 0:
            raise ValueError("rate_chars_per_s must be > 0")
        if not 0 <= jitter < 1:
            raise ValueError("jitter must lie in [0, 1)")
        self.rate_chars_per_s = rate_chars_per_s
        self.jitter = jitter
        self.seed = seed

    def synthesize(self, req: TtsRequest) -> TtsResponse:
        validate_tts_request(req)
        chars = max(1, normalized_char_length(req.text))
        factor = 1.0
        if self.jitter:
            rng = random.Random(derive_seed(self.seed, "tts", req.request_id, req.text))
            factor = 1.0 + self.jitter * rng.uniform(-1.0, 1.0)
        duration = chars / self.rate_chars_per_s * factor
        return TtsResponse(
            audio=encode_mock_audio(req.text, req.request_id, duration),
            duration_s=duration,
        )


class MockAsr:
    """Mock verifier: echo, silence, or seeded corruption of the embedded text.

    With ``fail_prob`` set, each request is a Bernoulli trial: echo on
    success, one guaranteed word substitution on failure. Otherwise the
    per-word i.i.d. substitute/delete/insert rates apply, making expected
    WER analytically predictable.
    """

    def __init__(
        self,
        *,
        mode: str = "echo",
        fail_prob: float = 0.0,
        substitute_rate: float = 0.0,
        delete_rate: float = 0.0,
        insert_rate: float = 0.0,
        seed: int = 0,
    ):
        if mode not in ("echo", "silence", "corrupt"):
            raise ValueError(f"unknown mock ASR mode {mode!r}")
        for name, rate in (
            ("fail_prob", fail_prob),
            ("substitute_rate", substitute_rate),
            ("delete_rate", delete_rate),
            ("insert_rate", insert_rate),
        ):
            if not 0 <= rate <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {rate}")
        self.mode = mode
        self.fail_prob = fail_prob
        self.substitute_rate = substitute_rate
        self.delete_rate = delete_rate
        self.insert_rate = insert_rate
        self.seed = seed

    def transcribe(self, req: AsrRequest) -> AsrResponse:
        validate_asr_request(req)
        payload = decode_mock_audio(req.audio)
        text = str(payload.get("text", ""))
        if self.mode == "silence":
            return AsrResponse(transcript="")
        if self.mode == "echo":
            return AsrResponse(transcript=text)
        rng = random.Random(derive_seed(self.seed, "asr", req.audio))
        if self.fail_prob > 0:
            if rng.random() >= self.fail_prob:
                return AsrResponse(transcript=text)
            words = text.split() or ["-"]
            idx = rng.randrange(len(words))
            words[idx] = rng.choice(_JUNK_WORDS)
            return AsrResponse(transcript=" ".join(words))
        out: list[str] = []
        for word in text.split():
            if self.delete_rate and rng.random() < self.delete_rate:
                continue
            if self.substitute_rate and rng.random() < self.substitute_rate:
                word = rng.choice(_JUNK_WORDS)
            out.append(word)
            if self.insert_rate and rng.random() < self.insert_rate:
                out.append(rng.choice(_JUNK_WORDS))
        return AsrResponse(transcript=" ".join(out))


_MOCK_SPEAKER_NAMES = (
    "Président",
    "Madame Dubois",
    "Monsieur Lavoie",
    "Maître Fortin",
    "Madame Gagnon",
    "Monsieur Roy",
)

_MOCK_PHRASES = (
    "Je crois que le processus doit rester transparent et rigoureux.",
    "Pouvez-vous préciser la date exacte de cette rencontre ?",
    "Le comité a déposé son rapport en deux mille douze.",
    "Cette nomination a suivi toutes les étapes prévues par la loi.",
    "Nous avons entendu plusieurs témoins sur cette question précise.",
    "Il faudrait vérifier les documents transmis au greffe.",
    "La recommandation venait du comité de sélection indépendant.",
    "Je n'ai jamais reçu d'appel à ce sujet.",
)

_MOCK_SHORT_PHRASES = (
    "C'est exact.",
    "Oui, tout à fait.",
    "Non.",
    "Je ne sais pas.",
    "Bien sûr.",
    "Absolument pas.",
)

# Unique marker of the short-answers sub-prompt; the base prompt never says it.
_SHORT_ANSWERS_MARKER = "échanges rapides"


class MockLlm:
    """Emits fixed-format dialogue turns drawn from a seeded phrase bank."""

    def __init__(self, *, turns_per_call: int = 4, seed: int = 0):
        if turns_per_call < 1:
            raise ValueError("turns_per_call must be >= 1")
        self.turns_per_call = turns_per_call
        self.seed = seed

    def generate_text(self, req: LlmRequest) -> LlmResponse:
        validate_llm_request(req)
        key = derive_seed(
            self.seed, "llm", req.request_id, *(f"{m.role}:{m.content}" for m in req.messages)
        )
        rng = random.Random(key)
        short = any(
            m.role == "user" and _SHORT_ANSWERS_MARKER in m.content for m in req.messages
        )
        bank = _MOCK_SHORT_PHRASES if short else _MOCK_PHRASES
        lines = []
        for _ in range(self.turns_per_call):
            name = rng.choice(_MOCK_SPEAKER_NAMES)
            lines.append(f"{name} : «{rng.choice(bank)}»")
        return LlmResponse(content="\n".join(lines))
