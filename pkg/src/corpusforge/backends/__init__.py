"""Backend clients and mocks, plus spec-string factories used by the CLI.

A backend spec is either a service URL (``http://host:port``) or a mock
spec of the form ``mock`` / ``mock:<params>`` where params are
comma-separated ``key=value`` items; a leading bare word names the mock
mode (ASR only), e.g. ``mock:corrupt,fail_prob=0.5``. When the spec is
omitted the per-service environment variable supplies the URL.
"""

from __future__ import annotations

import os

from .base import (
    AsrBackend,
    AsrRequest,
    AsrResponse,
    BackendError,
    LlmBackend,
    LlmMessage,
    LlmRequest,
    LlmResponse,
    SchemaError,
    TransportError,
    TtsBackend,
    TtsRequest,
    TtsResponse,
    validate_asr_request,
    validate_llm_request,
    validate_tts_request,
)
from .http import HttpAsrClient, HttpLlmClient, HttpTtsClient
from .mock import MockAsr, MockLlm, MockTts, decode_mock_audio, encode_mock_audio

ENV_TTS_URL = "CORPUSFORGE_TTS_URL"
ENV_ASR_URL = "CORPUSFORGE_ASR_URL"
ENV_LLM_URL = "CORPUSFORGE_LLM_URL"

__all__ = [
    "AsrBackend",
    "AsrRequest",
    "AsrResponse",
    "BackendError",
    "ENV_ASR_URL",
    "ENV_LLM_URL",
    "ENV_TTS_URL",
    "HttpAsrClient",
    "HttpLlmClient",
    "HttpTtsClient",
    "LlmBackend",
    "LlmMessage",
    "LlmRequest",
    "LlmResponse",
    "MockAsr",
    "MockLlm",
    "MockTts",
    "SchemaError",
    "TransportError",
    "TtsBackend",
    "TtsRequest",
    "TtsResponse",
    "asr_backend_from_spec",
    "decode_mock_audio",
    "encode_mock_audio",
    "llm_backend_from_spec",
    "tts_backend_from_spec",
    "validate_asr_request",
    "validate_llm_request",
    "validate_tts_request",
]


def _parse_mock_params(spec: str) -> tuple[str | None, dict[str, float | int | str]]:
    """Split ``mock:<params>`` into an optional bare mode and key=value params."""
    rest = spec[len("mock") :].lstrip(":")
    mode: str | None = None
    params: dict[str, float | int | str] = {}
    if not rest:
        return mode, params
    for item in rest.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            if mode is not None:
                raise ValueError(f"backend spec {spec!r}: two bare modes")
            mode = item
            continue
        key, value = item.split("=", 1)
        key = key.strip()
        value = value.strip()
        try:
            params[key] = int(value)
        except ValueError:
            try:
                params[key] = float(value)
            except ValueError:
                params[key] = value
    return mode, params


def _resolve(spec: str | None, env_var: str, service: str) -> str:
    spec = spec or os.environ.get(env_var, "")
    if not spec:
        raise ValueError(
            f"no {service} backend configured: pass a spec or set {env_var}"
        )
    return spec


def _is_url(spec: str) -> bool:
    return spec.startswith(("http://", "https://"))


def tts_backend_from_spec(spec: str | None = None, *, seed: int = 0) -> TtsBackend:
    spec = _resolve(spec, ENV_TTS_URL, "TTS")
    if _is_url(spec):
        return HttpTtsClient(spec)
    if spec.startswith("mock"):
        mode, params = _parse_mock_params(spec)
        if mode is not None:
            raise ValueError(f"TTS mock takes no bare mode, got {mode!r}")
        return MockTts(
            rate_chars_per_s=float(params.pop("rate", 15.0)),
            jitter=float(params.pop("jitter", 0.0)),
            seed=int(params.pop("seed", seed)),
        )
    raise ValueError(f"unrecognized TTS backend spec {spec!r}")


def asr_backend_from_spec(spec: str | None = None, *, seed: int = 0) -> AsrBackend:
    spec = _resolve(spec, ENV_ASR_URL, "ASR")
    if _is_url(spec):
        return HttpAsrClient(spec)
    if spec.startswith("mock"):
        mode, params = _parse_mock_params(spec)
        return MockAsr(
            mode=mode or "echo",
            fail_prob=float(params.pop("fail_prob", 0.0)),
            substitute_rate=float(params.pop("sub", 0.0)),
            delete_rate=float(params.pop("del", 0.0)),
            insert_rate=float(params.pop("ins", 0.0)),
            seed=int(params.pop("seed", seed)),
        )
    raise ValueError(f"unrecognized ASR backend spec {spec!r}")


def llm_backend_from_spec(spec: str | None = None, *, seed: int = 0) -> LlmBackend:
    spec = _resolve(spec, ENV_LLM_URL, "LLM")
    if _is_url(spec):
        return HttpLlmClient(spec)
    if spec.startswith("mock"):
        mode, params = _parse_mock_params(spec)
        if mode is not None:
            raise ValueError(f"LLM mock takes no bare mode, got {mode!r}")
        return MockLlm(
            turns_per_call=int(params.pop("turns", 4)),
            seed=int(params.pop("seed", seed)),
        )
    raise ValueError(f"unrecognized LLM backend spec {spec!r}")
