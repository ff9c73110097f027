"""Wire types, error taxonomy, and protocols for the three model services."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

LLM_ROLES = ("system", "user", "assistant")


class BackendError(Exception):
    """Base class for backend failures."""


class TransportError(BackendError):
    """Network-level failure; retryable within the client's retry budget."""


class SchemaError(BackendError):
    """The service answered, but the payload violates the wire contract."""


@dataclass(frozen=True)
class TtsRequest:
    text: str
    reference_audio: str
    temperature: float
    request_id: str = ""


@dataclass(frozen=True)
class TtsResponse:
    audio: str
    duration_s: float


@dataclass(frozen=True)
class AsrRequest:
    audio: str


@dataclass(frozen=True)
class AsrResponse:
    transcript: str


@dataclass(frozen=True)
class LlmMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in LLM_ROLES:
            raise ValueError(f"message role must be one of {LLM_ROLES}, got {self.role!r}")


@dataclass(frozen=True)
class LlmRequest:
    messages: tuple[LlmMessage, ...]
    request_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "messages", tuple(self.messages))


@dataclass(frozen=True)
class LlmResponse:
    content: str


def validate_tts_request(req: TtsRequest) -> None:
    """Client-side precondition check; rejected requests never hit the wire."""
    if not req.text.strip():
        raise ValueError("TTS request text must be non-empty")
    if not req.reference_audio:
        raise ValueError("TTS request needs a reference_audio locator")
    if not req.temperature > 0:
        raise ValueError(f"TTS temperature must be > 0, got {req.temperature}")


def validate_asr_request(req: AsrRequest) -> None:
    if not req.audio:
        raise ValueError("ASR request needs an audio locator")


def validate_llm_request(req: LlmRequest) -> None:
    if not req.messages:
        raise ValueError("LLM request needs at least one message")


@runtime_checkable
class TtsBackend(Protocol):
    def synthesize(self, req: TtsRequest) -> TtsResponse: ...


@runtime_checkable
class AsrBackend(Protocol):
    def transcribe(self, req: AsrRequest) -> AsrResponse: ...


@runtime_checkable
class LlmBackend(Protocol):
    def generate_text(self, req: LlmRequest) -> LlmResponse: ...
