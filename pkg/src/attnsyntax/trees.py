"""Binary span trees: CKY extraction, balanced baselines, bracketed I/O.

The chart recursion scores a span (a, b) as the best split k of

    s[a,b] = max_k (s[a,k] + s[k+1,b] + w[a,k] + w[k+1,b]) / 4

with s[a,a] = 1 and w taken from the phrase table (0 for absent spans).
Averaging keeps subtree scores on one scale regardless of span size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .attn_io import AttentionDump, Span
from .errors import TreeParseError
from .masks import HeadMask
from .phrases import PhraseTable, build_phrase_table


@dataclass(frozen=True)
class SpanTree:
    """Strictly binary tree over 1-based inclusive subword spans."""

    span: Span
    left: "SpanTree | None" = None
    right: "SpanTree | None" = None

    def __post_init__(self) -> None:
        a, b = self.span
        if (self.left is None) != (self.right is None):
            raise ValueError("a node needs either two children or none")
        if self.left is None:
            if a != b:
                raise ValueError(f"leaf span ({a},{b}) must be a single position")
        else:
            assert self.right is not None
            if (
                self.left.span[0] != a
                or self.right.span[1] != b
                or self.left.span[1] + 1 != self.right.span[0]
            ):
                raise ValueError(
                    f"children {self.left.span} + {self.right.span} "
                    f"do not partition ({a},{b})"
                )

    @staticmethod
    def leaf(i: int) -> "SpanTree":
        return SpanTree((i, i))

    @staticmethod
    def node(left: "SpanTree", right: "SpanTree") -> "SpanTree":
        return SpanTree((left.span[0], right.span[1]), left, right)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def n(self) -> int:
        return self.span[1] - self.span[0] + 1

    def spans(self) -> frozenset[Span]:
        """Spans of all nodes, leaves included."""
        out: set[Span] = set()
        stack = [self]
        while stack:
            node = stack.pop()
            out.add(node.span)
            if node.left is not None:
                stack.append(node.left)
                stack.append(node.right)
        return frozenset(out)

    def to_bracketed(self, tokens: Sequence[str]) -> str:
        """Render with leaves replaced by tokens; parens inside tokens are escaped."""
        if len(tokens) < self.span[1]:
            raise ValueError(
                f"need {self.span[1]} tokens to render span {self.span}, got {len(tokens)}"
            )
        if self.is_leaf:
            return _escape_token(tokens[self.span[0] - 1])
        assert self.left is not None and self.right is not None
        return f"({self.left.to_bracketed(tokens)} {self.right.to_bracketed(tokens)})"


def _escape_token(token: str) -> str:
    return token.replace("(", "-LRB-").replace(")", "-RRB-")


def _unescape_token(token: str) -> str:
    return token.replace("-LRB-", "(").replace("-RRB-", ")")


def parse_span_tree(line: str) -> tuple[SpanTree, tuple[str, ...]]:
    """Parse one bracketed, unlabeled, strictly binary tree line.

    Returns the tree over 1-based leaf positions plus the leaf tokens.
    """
    tokens: list[str] = []
    items = line.replace("(", " ( ").replace(")", " ) ").split()
    if not items:
        raise TreeParseError("empty tree line")
    pos = 0

    def parse() -> SpanTree:
        nonlocal pos
        if pos >= len(items):
            raise TreeParseError("unexpected end of line inside a tree")
        item = items[pos]
        if item == ")":
            raise TreeParseError(f"unexpected ')' at item {pos + 1}")
        if item != "(":
            pos += 1
            tokens.append(_unescape_token(item))
            return SpanTree.leaf(len(tokens))
        pos += 1
        children = []
        while pos < len(items) and items[pos] != ")":
            children.append(parse())
        if pos >= len(items):
            raise TreeParseError("unbalanced '(': end of line before ')'")
        pos += 1
        if len(children) != 2:
            raise TreeParseError(
                f"extracted trees must be strictly binary, found a node "
                f"with {len(children)} children"
            )
        return SpanTree.node(children[0], children[1])

    tree = parse()
    if pos != len(items):
        raise TreeParseError(f"trailing content after tree at item {pos + 1}")
    return tree, tuple(tokens)


@dataclass(frozen=True)
class Chart:
    """Filled CKY tables: scores for all spans, best splits for b > a."""

    scores: np.ndarray  # (n+1, n+1); scores[a, b] valid for 1 <= a <= b <= n
    splits: np.ndarray  # (n+1, n+1) int64; splits[a, b] valid for b > a
    n: int

    def tree(self, a: int = 1, b: int | None = None) -> SpanTree:
        if b is None:
            b = self.n
        if a == b:
            return SpanTree.leaf(a)
        k = int(self.splits[a, b])
        return SpanTree.node(self.tree(a, k), self.tree(k + 1, b))


def cky_chart(table: PhraseTable, n: int) -> Chart:
    """Fill the chart bottom-up.

    Ties between splits prefer the larger k (the larger left subtree), so a
    sentence with no phrase weights at all comes out as the left-branching
    chain.
    """
    if n < 1:
        raise ValueError(f"sentence length must be >= 1, got {n}")
    weights = np.zeros((n + 1, n + 1))
    for a, b in table.spans():
        if not (1 <= a <= b <= n):
            raise ValueError(f"phrase span ({a},{b}) outside sentence 1..{n}")
        weights[a, b] = table.weight(a, b)
    scores = np.zeros((n + 1, n + 1))
    splits = np.zeros((n + 1, n + 1), dtype=np.int64)
    for i in range(1, n + 1):
        scores[i, i] = 1.0
    for length in range(2, n + 1):
        for a in range(1, n - length + 2):
            b = a + length - 1
            ks = np.arange(a, b)
            candidates = scores[a, a:b] + scores[ks + 1, b] + weights[a, a:b] + weights[ks + 1, b]
            best = candidates.size - 1 - int(np.argmax(candidates[::-1]))
            scores[a, b] = candidates[best] / 4.0
            splits[a, b] = a + best
    scores.setflags(write=False)
    splits.setflags(write=False)
    return Chart(scores, splits, n)


def cky_parse(table: PhraseTable, n: int) -> SpanTree:
    """The highest-scoring binary tree over 1..n for this phrase table."""
    return cky_chart(table, n).tree()


def lbal_tree(n: int) -> SpanTree:
    """Left-aligned balanced tree: pair adjacent units left to right each
    round; a trailing odd unit survives to the next round."""
    if n < 1:
        raise ValueError(f"sentence length must be >= 1, got {n}")
    units = [SpanTree.leaf(i) for i in range(1, n + 1)]
    while len(units) > 1:
        merged = []
        i = 0
        while i + 1 < len(units):
            merged.append(SpanTree.node(units[i], units[i + 1]))
            i += 2
        if i < len(units):
            merged.append(units[i])
        units = merged
    return units[0]


def rbal_tree(n: int) -> SpanTree:
    """Right-aligned balanced tree: pair adjacent units right to left each
    round; a leading odd unit survives to the next round."""
    if n < 1:
        raise ValueError(f"sentence length must be >= 1, got {n}")
    units = [SpanTree.leaf(i) for i in range(1, n + 1)]
    while len(units) > 1:
        merged = []
        i = len(units)
        while i - 2 >= 0:
            merged.append(SpanTree.node(units[i - 2], units[i - 1]))
            i -= 2
        if i == 1:
            merged.append(units[0])
        units = merged[::-1]
    return units[0]


def extract_tree(dump: AttentionDump, mask: HeadMask) -> SpanTree:
    """End-to-end extraction for one sentence: phrase table, then CKY."""
    return cky_parse(build_phrase_table(dump, mask), dump.n)
