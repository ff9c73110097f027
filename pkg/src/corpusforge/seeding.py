"""Deterministic seed derivation shared by every pipeline stage."""

from __future__ import annotations

import hashlib


def derive_seed(*parts: object) -> int:
    """Derive a 64-bit seed from the given parts via a stable hash.

    Unlike builtin ``hash``, the result is identical across processes and
    platforms, so one root seed reproduces every stage exactly.
    """
    blob = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")
