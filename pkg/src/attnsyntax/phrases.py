"""Harden attention matrices, detect balusters, and weight candidate phrases.

The pipeline per head: keep only the maximal weight on each attention row
(hardening), find maximal runs of consecutive output rows that share their
argmax column (balusters), and emit the run's full span as a candidate
phrase weighted by the run's mean retained attention.  Per sentence, the
weights of identical spans from different heads are summed, then rescaled
so that phrases of each length average to weight 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .attn_io import AttentionDump, Span
from .masks import Head, HeadMask


@dataclass(frozen=True)
class HardenedMatrix:
    """Per output row: the 1-based argmax column and the retained maximum."""

    argmax_col: np.ndarray  # (N,) int64
    weight: np.ndarray  # (N,) float64

    def __post_init__(self) -> None:
        cols = np.asarray(self.argmax_col, dtype=np.int64)
        weight = np.asarray(self.weight, dtype=np.float64)
        if cols.shape != weight.shape or cols.ndim != 1:
            raise ValueError("argmax_col and weight must be equal-length vectors")
        cols.setflags(write=False)
        weight.setflags(write=False)
        object.__setattr__(self, "argmax_col", cols)
        object.__setattr__(self, "weight", weight)

    @property
    def n(self) -> int:
        return int(self.argmax_col.shape[0])

    def to_matrix(self) -> np.ndarray:
        """Dense NxN matrix with the single retained weight per row."""
        out = np.zeros((self.n, self.n))
        out[np.arange(self.n), self.argmax_col - 1] = self.weight
        return out


def harden(matrix: np.ndarray) -> HardenedMatrix:
    """Keep each row's maximal weight, zeroing the rest; ties go leftmost."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    cols = m.argmax(axis=1)  # first occurrence = leftmost tie-break
    weight = m[np.arange(m.shape[0]), cols]
    return HardenedMatrix(cols + 1, weight)


@dataclass(frozen=True)
class Baluster:
    """A maximal run of >= 2 consecutive rows attending to one column."""

    head: Head
    span: Span  # 1-based inclusive output rows (a, b), b >= a + 1
    target_col: int
    mean_weight: float

    @property
    def length(self) -> int:
        return self.span[1] - self.span[0] + 1


def find_balusters(hardened: HardenedMatrix, head: Head) -> list[Baluster]:
    """Maximal same-column runs of length >= 2, in row order."""
    cols = hardened.argmax_col
    weight = hardened.weight
    n = hardened.n
    out: list[Baluster] = []
    start = 0
    for i in range(1, n + 1):
        if i < n and cols[i] == cols[start]:
            continue
        if i - start >= 2:
            out.append(
                Baluster(
                    head=head,
                    span=(start + 1, i),
                    target_col=int(cols[start]),
                    mean_weight=float(weight[start:i].mean()),
                )
            )
        start = i
    return out


@dataclass(frozen=True)
class PhraseTable:
    """Per-sentence map from spans to (raw, equalized) weights; absent = 0."""

    sentence_id: str
    entries: Mapping[Span, tuple[float, float]]

    @classmethod
    def empty(cls, sentence_id: str) -> "PhraseTable":
        return cls(sentence_id, {})

    def spans(self) -> list[Span]:
        return sorted(self.entries)

    def weight(self, a: int, b: int) -> float:
        entry = self.entries.get((a, b))
        return entry[1] if entry is not None else 0.0

    def raw_weight(self, a: int, b: int) -> float:
        entry = self.entries.get((a, b))
        return entry[0] if entry is not None else 0.0

    def __len__(self) -> int:
        return len(self.entries)


def equalize(raw: Mapping[Span, float]) -> dict[Span, float]:
    """Rescale weights so the mean over each represented length equals 1."""
    by_length: dict[int, list[Span]] = {}
    for (a, b) in raw:
        by_length.setdefault(b - a + 1, []).append((a, b))
    equalized: dict[Span, float] = {}
    for spans in by_length.values():
        total = sum(raw[s] for s in spans)
        for s in spans:
            equalized[s] = raw[s] * len(spans) / total
    return equalized


def build_phrase_table(dump: AttentionDump, mask: HeadMask) -> PhraseTable:
    """Sum baluster weights over the masked heads and equalize per length.

    Heads are visited in sorted order so the floating-point sums do not
    depend on how the mask was assembled.
    """
    if not mask.heads:
        raise ValueError("empty head mask")
    raw: dict[Span, float] = {}
    for layer, head in mask.sorted_heads():
        hardened = harden(dump.matrix(layer, head))
        for baluster in find_balusters(hardened, (layer, head)):
            if baluster.mean_weight > 0.0:
                raw[baluster.span] = raw.get(baluster.span, 0.0) + baluster.mean_weight
    equalized = equalize(raw)
    entries = {span: (raw[span], equalized[span]) for span in sorted(raw)}
    return PhraseTable(dump.sentence_id, entries)
