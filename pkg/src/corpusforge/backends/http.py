"""HTTP/1.1 JSON clients for external TTS, ASR, and LLM model servers.

Endpoints are POST /synthesize, /transcribe, /generate with the JSON bodies
documented in the README. Transport failures (connection errors, timeouts,
5xx) are retried with exponential backoff inside a bounded budget; any
answered-but-invalid payload surfaces immediately as SchemaError.
"""

from __future__ import annotations

import threading
import time

import requests

from .base import (
    AsrRequest,
    AsrResponse,
    LlmRequest,
    LlmResponse,
    SchemaError,
    TransportError,
    TtsRequest,
    TtsResponse,
    validate_asr_request,
    validate_llm_request,
    validate_tts_request,
)


class _JsonHttpClient:
    """POST-JSON plumbing: retry budget, backoff, bounded in-flight window."""

    def __init__(
        self,
        base_url: str,
        *,
        session: requests.Session | None = None,
        max_retries: int = 3,
        backoff_s: float = 0.25,
        max_in_flight: int = 8,
        timeout_s: float = 60.0,
    ):
        if max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        self._base_url = base_url.rstrip("/")
        self._session = session if session is not None else requests.Session()
        self._max_retries = max_retries
        self._backoff_s = backoff_s
        self._timeout_s = timeout_s
        self._window = threading.BoundedSemaphore(max_in_flight)

    def _post(self, path: str, payload: dict) -> dict:
        url = self._base_url + path
        last_error: TransportError | None = None
        for attempt in range(self._max_retries + 1):
            if attempt:
                time.sleep(self._backoff_s * (2 ** (attempt - 1)))
            with self._window:
                try:
                    resp = self._session.post(url, json=payload, timeout=self._timeout_s)
                except requests.RequestException as exc:
                    last_error = TransportError(f"POST {url}: {exc}")
                    continue
            if resp.status_code >= 500:
                last_error = TransportError(f"POST {url}: HTTP {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise SchemaError(f"POST {url}: HTTP {resp.status_code}")
            try:
                body = resp.json()
            except ValueError:
                raise SchemaError(f"POST {url}: response body is not JSON") from None
            if not isinstance(body, dict):
                raise SchemaError(f"POST {url}: response must be a JSON object")
            return body
        assert last_error is not None
        raise last_error


def _require_str(body: dict, key: str, where: str, *, allow_empty: bool = False) -> str:
    value = body.get(key)
    if not isinstance(value, str) or (not allow_empty and not value):
        raise SchemaError(f"{where}: field {key!r} must be a non-empty string")
    return value


def _require_positive_number(body: dict, key: str, where: str) -> float:
    value = body.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise SchemaError(f"{where}: field {key!r} must be a number > 0")
    return float(value)


class HttpTtsClient(_JsonHttpClient):
    def synthesize(self, req: TtsRequest) -> TtsResponse:
        validate_tts_request(req)
        body = self._post(
            "/synthesize",
            {
                "text": req.text,
                "reference_audio": req.reference_audio,
                "temperature": req.temperature,
                "request_id": req.request_id,
            },
        )
        return TtsResponse(
            audio=_require_str(body, "audio", "/synthesize"),
            duration_s=_require_positive_number(body, "duration_s", "/synthesize"),
        )


class HttpAsrClient(_JsonHttpClient):
    def transcribe(self, req: AsrRequest) -> AsrResponse:
        validate_asr_request(req)
        body = self._post("/transcribe", {"audio": req.audio})
        # Empty transcripts are legal: the verifier may hear silence.
        return AsrResponse(
            transcript=_require_str(body, "transcript", "/transcribe", allow_empty=True)
        )


class HttpLlmClient(_JsonHttpClient):
    def generate_text(self, req: LlmRequest) -> LlmResponse:
        validate_llm_request(req)
        body = self._post(
            "/generate",
            {
                "messages": [{"role": m.role, "content": m.content} for m in req.messages],
                "request_id": req.request_id,
            },
        )
        return LlmResponse(content=_require_str(body, "content", "/generate"))
