"""Load, validate and write per-sentence attention dumps.

A dump file is UTF-8 JSON lines: one record per sentence, corpus order
preserved.  Record schema (arrays are 0-based, row-major)::

    {"id": "s1",
     "subwords": ["vin@@", "e-@@", "growers", "suffer", "EOS"],
     "attn": [layer][head][row][col]}   # floats in [0, 1]

Rows of every matrix are softmax outputs over input states and must sum to
1 within ``ROW_SUM_TOLERANCE``.  Subwords use the trailing-``@@``
continuation convention and the final token must be the EOS symbol.

Everything this package reports back to callers (word spans, phrase spans,
layer/head ids) is 1-based inclusive; only the raw arrays stay 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DumpParseError, DumpValidationError, SegmentationError

Span = tuple[int, int]

CONTINUATION = "@@"
DEFAULT_EOS = "EOS"
ROW_SUM_TOLERANCE = 1e-3
DEFAULT_MAX_RECORD_BYTES = 64 * 1024 * 1024


@dataclass(frozen=True)
class AttentionDump:
    """One sentence's subwords plus all layers x heads of NxN attention."""

    sentence_id: str
    subwords: tuple[str, ...]
    matrices: np.ndarray  # float64, shape (layers, heads, N, N), read-only

    def __post_init__(self) -> None:
        object.__setattr__(self, "subwords", tuple(self.subwords))
        matrices = np.asarray(self.matrices, dtype=np.float64)
        matrices.setflags(write=False)
        object.__setattr__(self, "matrices", matrices)
        if matrices.ndim != 4:
            raise DumpValidationError(
                f"sentence {self.sentence_id!r}: attn must be nested "
                f"[layer][head][row][col], got {matrices.ndim} dimensions"
            )
        layers, heads, rows, cols = matrices.shape
        if layers < 1 or heads < 1:
            raise DumpValidationError(
                f"sentence {self.sentence_id!r}: needs at least one layer and one head"
            )
        n = len(self.subwords)
        if rows != n or cols != n:
            raise DumpValidationError(
                f"sentence {self.sentence_id!r}: {n} subwords but "
                f"{rows}x{cols} attention matrices"
            )

    @property
    def n(self) -> int:
        return len(self.subwords)

    @property
    def layers(self) -> int:
        return int(self.matrices.shape[0])

    @property
    def heads(self) -> int:
        return int(self.matrices.shape[1])

    def matrix(self, layer: int, head: int) -> np.ndarray:
        """Return the NxN matrix for a 1-based (layer, head) pair."""
        if not (1 <= layer <= self.layers and 1 <= head <= self.heads):
            raise ValueError(
                f"head ({layer},{head}) outside universe "
                f"1..{self.layers} x 1..{self.heads}"
            )
        return self.matrices[layer - 1, head - 1]

    def validate(self, eos: str = DEFAULT_EOS) -> None:
        """Check the content invariants the loader enforces on every record."""
        sid = self.sentence_id
        if self.n < 1:
            raise DumpValidationError(f"sentence {sid!r}: no subwords")
        for token in self.subwords:
            if not token or token.split() != [token]:
                raise DumpValidationError(
                    f"sentence {sid!r}: subword {token!r} is empty or contains whitespace"
                )
        if self.subwords[-1] != eos:
            raise DumpValidationError(
                f"sentence {sid!r}: final subword must be the EOS token {eos!r}, "
                f"got {self.subwords[-1]!r}"
            )
        m = self.matrices
        if not np.all(np.isfinite(m)):
            raise DumpValidationError(f"sentence {sid!r}: non-finite attention weight")
        if m.min() < 0.0 or m.max() > 1.0:
            raise DumpValidationError(
                f"sentence {sid!r}: attention weights must lie in [0, 1]"
            )
        sums = m.sum(axis=3)
        bad = np.argwhere(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE)
        if bad.size:
            layer, head, row = (int(v) + 1 for v in bad[0])
            raise DumpValidationError(
                f"sentence {sid!r}, layer {layer}, head {head}, row {row}: "
                f"row sums to {sums[tuple(bad[0])]:.6f}, expected 1 "
                f"within {ROW_SUM_TOLERANCE}"
            )


@dataclass(frozen=True)
class SubwordMap:
    """Word spans over subword positions 1..N-1 plus the EOS position N."""

    word_spans: tuple[Span, ...]
    eos_index: int


def word_groups(subwords: Sequence[str], eos: str = DEFAULT_EOS) -> list[Span]:
    """Group subword positions 1..N-1 into contiguous word spans.

    A token ending in ``@@`` continues the current word; the final token is
    the EOS symbol and belongs to no word.  Raises SegmentationError when
    the token right before EOS still carries the continuation marker.
    """
    n = len(subwords)
    spans: list[Span] = []
    start: int | None = None
    for i, token in enumerate(subwords[: n - 1], start=1):
        if start is None:
            start = i
        if token.endswith(CONTINUATION):
            if i == n - 1:
                raise SegmentationError(
                    f"continuation marker on the last token before {eos!r}: {token!r}"
                )
            continue
        spans.append((start, i))
        start = None
    return spans


def subword_map(dump: AttentionDump, eos: str = DEFAULT_EOS) -> SubwordMap:
    """Word spans and EOS position of a validated dump."""
    return SubwordMap(tuple(word_groups(dump.subwords, eos=eos)), dump.n)


def _dump_from_record(record: object, lineno: int, eos: str) -> AttentionDump:
    if not isinstance(record, dict):
        raise DumpParseError(f"line {lineno}: record is not an object")
    for key in ("id", "subwords", "attn"):
        if key not in record:
            raise DumpParseError(f"line {lineno}: missing key {key!r}")
    sentence_id = record["id"]
    subwords = record["subwords"]
    if not isinstance(sentence_id, str):
        raise DumpParseError(f"line {lineno}: 'id' must be a string")
    if not isinstance(subwords, list) or not all(isinstance(s, str) for s in subwords):
        raise DumpParseError(f"line {lineno}: 'subwords' must be a list of strings")
    try:
        matrices = np.asarray(record["attn"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DumpParseError(f"line {lineno}: 'attn' is not a rectangular numeric array: {exc}") from exc
    dump = AttentionDump(sentence_id, tuple(subwords), matrices)
    dump.validate(eos=eos)
    return dump


def load_dump(
    path,
    eos: str = DEFAULT_EOS,
    max_record_bytes: int = DEFAULT_MAX_RECORD_BYTES,
) -> list[AttentionDump]:
    """Read a dump file, returning fully validated dumps in file order."""
    dumps: list[AttentionDump] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            if len(line) > max_record_bytes:
                raise DumpParseError(
                    f"line {lineno}: record exceeds {max_record_bytes} bytes"
                )
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DumpParseError(f"line {lineno}: {exc}") from exc
            dumps.append(_dump_from_record(record, lineno, eos))
    return dumps


def dump_record(dump: AttentionDump) -> str:
    """Serialize one dump as a single JSON line (floats round-trip exactly)."""
    payload = {
        "id": dump.sentence_id,
        "subwords": list(dump.subwords),
        "attn": dump.matrices.tolist(),
    }
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def write_dump(dumps: Iterable[AttentionDump], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for dump in dumps:
            fh.write(dump_record(dump))
            fh.write("\n")
