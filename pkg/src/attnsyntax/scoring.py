"""Consistency-based precision/recall between extracted and reference trees.

A span e is consistent with a span set P when it crosses no p in P, i.e.
for every p: disjoint, or p inside e, or e inside p.  Precision counts the
extracted tree's spans consistent with the reference span set; recall
counts the reference spans consistent with the extracted span set.  Counts
are pooled over sentences before dividing (micro-average).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .attn_io import Span
from .errors import AlignmentError
from .treebank import ConstituencyTree
from .trees import SpanTree


class CountingPolicy(enum.Enum):
    """Which spans are counted: all of them, or only the informative ones
    (length-1 spans and the full-sentence span are consistent by
    construction and excluded under NONTRIVIAL, the default)."""

    ALL = "all"
    NONTRIVIAL = "nontrivial"

    @classmethod
    def from_name(cls, name: str) -> "CountingPolicy":
        for policy in cls:
            if policy.value == name:
                return policy
        raise ValueError(f"unknown counting policy {name!r}")


def crosses(e: Span, p: Span) -> bool:
    """True when the spans overlap without one containing the other."""
    (a1, b1), (a2, b2) = e, p
    overlap = a1 <= b2 and a2 <= b1
    nested = (a1 <= a2 and b2 <= b1) or (a2 <= a1 and b1 <= b2)
    return overlap and not nested


def is_consistent(e: Span, phrase_spans: Iterable[Span]) -> bool:
    return not any(crosses(e, p) for p in phrase_spans)


@dataclass(frozen=True)
class EvalReport:
    """Pooled consistency counts with derived precision/recall/F1."""

    extracted_phrases_total: int = 0
    extracted_consistent: int = 0
    gold_phrases_total: int = 0
    gold_consistent: int = 0

    @property
    def precision(self) -> float:
        # an empty claim set is vacuously correct
        if self.extracted_phrases_total == 0:
            return 1.0
        return self.extracted_consistent / self.extracted_phrases_total

    @property
    def recall(self) -> float:
        if self.gold_phrases_total == 0:
            return 1.0
        return self.gold_consistent / self.gold_phrases_total

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        if p + r == 0.0:
            return 0.0
        return 2.0 * p * r / (p + r)

    def merged(self, other: "EvalReport") -> "EvalReport":
        return EvalReport(
            self.extracted_phrases_total + other.extracted_phrases_total,
            self.extracted_consistent + other.extracted_consistent,
            self.gold_phrases_total + other.gold_phrases_total,
            self.gold_consistent + other.gold_consistent,
        )

    @staticmethod
    def aggregate(reports: Iterable["EvalReport"]) -> "EvalReport":
        total = EvalReport()
        for report in reports:
            total = total.merged(report)
        return total


def _countable(spans: Iterable[Span], n: int, counting: CountingPolicy) -> list[Span]:
    if counting is CountingPolicy.ALL:
        return list(spans)
    return [s for s in spans if s[1] > s[0] and s != (1, n)]


def score_spans(
    extracted_spans: Iterable[Span],
    gold_spans: Iterable[Span],
    n: int,
    counting: CountingPolicy = CountingPolicy.NONTRIVIAL,
) -> EvalReport:
    """Score two span sets over the same 1..n index space.

    Crossing is always checked against the full span set of the other side;
    the counting policy only filters which spans are counted.
    """
    extracted = set(extracted_spans)
    gold = set(gold_spans)
    countable_extracted = _countable(extracted, n, counting)
    countable_gold = _countable(gold, n, counting)
    return EvalReport(
        extracted_phrases_total=len(countable_extracted),
        extracted_consistent=sum(1 for e in countable_extracted if is_consistent(e, gold)),
        gold_phrases_total=len(countable_gold),
        gold_consistent=sum(1 for p in countable_gold if is_consistent(p, extracted)),
    )


def score(
    extracted: SpanTree,
    gold: ConstituencyTree,
    counting: CountingPolicy = CountingPolicy.NONTRIVIAL,
) -> EvalReport:
    """Per-sentence report for an extracted tree against a reference tree."""
    n = extracted.span[1] - extracted.span[0] + 1
    if extracted.span[0] != 1:
        raise AlignmentError(f"extracted tree must start at position 1, got {extracted.span}")
    if gold.n != n:
        raise AlignmentError(
            f"extracted tree covers {n} subwords but the reference tree has {gold.n}"
        )
    return score_spans(extracted.spans(), gold.spans(), n, counting)
