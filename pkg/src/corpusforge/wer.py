"""Exact word error rate with a deterministic edit-operation breakdown."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class WerBreakdown:
    """Edit counts of a minimal alignment; wer = (S+D+I)/max(ref_len, 1)."""

    substitutions: int
    deletions: int
    insertions: int
    ref_len: int

    @property
    def edits(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        return self.edits / max(self.ref_len, 1)


def wer(ref: Sequence[str], hyp: Sequence[str]) -> WerBreakdown:
    """Minimal-edit alignment of hyp against ref with unit costs.

    Tie-breaking is fixed: the backtrace prefers the diagonal (match or
    substitution) over deletion, and deletion over insertion, so equal-cost
    alignments always yield the same breakdown (a swap counts as two
    substitutions, never a deletion plus an insertion). An empty ref makes
    every hyp token an insertion, so wer equals the insertion count.
    """
    n, m = len(ref), len(hyp)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dp[i][0] = i
    for j in range(1, m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        ri = ref[i - 1]
        row = dp[i]
        prev = dp[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ri == hyp[j - 1] else 1
            best = prev[j - 1] + cost
            up = prev[j] + 1
            if up < best:
                best = up
            left = row[j - 1] + 1
            if left < best:
                best = left
            row[j] = best

    subs = dels = ins = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            if dp[i][j] == dp[i - 1][j - 1] + cost:
                subs += cost
                i -= 1
                j -= 1
                continue
        if i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            dels += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return WerBreakdown(substitutions=subs, deletions=dels, insertions=ins, ref_len=n)
