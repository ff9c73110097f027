"""Text normalization applied to TTS input text and verifier transcripts alike."""

from __future__ import annotations

import unicodedata

NormalizedText = tuple[str, ...]

# Typographic apostrophe folds to ASCII so elision survives either spelling.
_APOSTROPHES = frozenset({"'", "’"})


def normalize(raw: str) -> NormalizedText:
    """Lowercase, NFC-normalize, and tokenize text for WER comparison.

    Punctuation becomes whitespace except apostrophes and hyphens interior
    to a word, so French elision and compounds survive ("l'avocat",
    "peut-être"). Digits pass through unchanged. Empty input gives ().
    """
    text = unicodedata.normalize("NFC", raw).lower()
    chars: list[str] = []
    for ch in text:
        if ch in _APOSTROPHES:
            chars.append("'")
        elif ch == "-" or ch.isalnum():
            chars.append(ch)
        else:
            chars.append(" ")
    tokens: list[str] = []
    for piece in "".join(chars).split():
        piece = piece.strip("'-")
        if piece:
            tokens.append(piece)
    return tuple(tokens)


def normalized_char_length(raw: str) -> int:
    """Character count of the space-joined normalized tokens."""
    tokens = normalize(raw)
    if not tokens:
        return 0
    return sum(len(t) for t in tokens) + len(tokens) - 1
