"""Greedy search over head subsets maximizing extracted-tree precision.

Addition starts from the empty set and adds the head that maximizes the
dev-set objective at each step until every head is in; ablation starts
from the full set and removes heads one by one down to a single head.
The best mask is the highest-scoring step encountered, earliest on ties.
Candidate ties within a step go to the lowest (layer, head) pair, so a
trace is a pure function of its inputs.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .attn_io import AttentionDump
from .masks import Head, HeadMask
from .phrases import PhraseTable, build_phrase_table
from .scoring import CountingPolicy, EvalReport, score
from .treebank import ConstituencyTree
from .trees import cky_parse

log = logging.getLogger(__name__)

OBJECTIVES = ("precision", "f1")


@dataclass(frozen=True)
class SelectionStep:
    step: int
    head: Head  # the head toggled at this step
    mask_size: int
    score: float


@dataclass(frozen=True)
class SelectionTrace:
    strategy: str  # "addition" | "ablation"
    universe: tuple[int, int]
    objective: str
    initial_mask_size: int
    initial_score: float
    steps: tuple[SelectionStep, ...]
    evaluations: int  # dev-set evaluations performed, O((L*H)^2)

    def mask_at(self, step: int) -> HeadMask:
        """The mask in effect after the given 1-based step (0 = initial)."""
        if not 0 <= step <= len(self.steps):
            raise ValueError(f"step {step} outside 0..{len(self.steps)}")
        toggled = {s.head for s in self.steps[:step]}
        if self.strategy == "addition":
            return HeadMask(frozenset(toggled), self.universe)
        full = HeadMask.all_heads(*self.universe)
        return HeadMask(full.heads - toggled, self.universe)

    @property
    def best_step(self) -> SelectionStep | None:
        best = None
        for step in self.steps:
            if best is None or step.score > best.score:
                best = step
        return best

    @property
    def best_score(self) -> float:
        best = self.best_step
        return self.initial_score if best is None else best.score

    @property
    def best_mask(self) -> HeadMask:
        best = self.best_step
        return self.mask_at(0 if best is None else best.step)

    def to_text(self) -> str:
        sign = "+" if self.strategy == "addition" else "-"
        lines = [
            f"strategy: {self.strategy}",
            f"universe: layers={self.universe[0]} heads={self.universe[1]}",
            f"objective: {self.objective}",
            f"evaluations: {self.evaluations}",
            f"initial: size={self.initial_mask_size} {self.objective}={self.initial_score:.6f}",
        ]
        for step in self.steps:
            lines.append(
                f"step {step.step:03d}: {sign}{step.head[0]}:{step.head[1]} "
                f"size={step.mask_size} {self.objective}={step.score:.6f}"
            )
        lines.append(
            f"best: size={len(self.best_mask)} {self.objective}={self.best_score:.6f} "
            f"heads={self.best_mask.to_spec()}"
        )
        return "\n".join(lines) + "\n"


def _check_dev_set(
    dumps: Sequence[AttentionDump],
    golds: Sequence[ConstituencyTree],
    universe: tuple[int, int] | None,
) -> tuple[int, int]:
    if not dumps:
        raise ValueError("empty dev set")
    if len(dumps) != len(golds):
        raise ValueError(f"{len(dumps)} dumps but {len(golds)} reference trees")
    if universe is None:
        universe = (dumps[0].layers, dumps[0].heads)
    for dump in dumps:
        if (dump.layers, dump.heads) != universe:
            raise ValueError(
                f"sentence {dump.sentence_id!r} has universe "
                f"({dump.layers},{dump.heads}), expected {universe}"
            )
    return universe


def _dev_score(
    dumps: Sequence[AttentionDump],
    golds: Sequence[ConstituencyTree],
    heads: frozenset[Head],
    universe: tuple[int, int],
    objective: str,
    counting: CountingPolicy,
) -> float:
    reports = []
    for dump, gold in zip(dumps, golds):
        if heads:
            table = build_phrase_table(dump, HeadMask(heads, universe))
        else:
            # the all-weights-zero parse (left-branching by tie-break)
            table = PhraseTable.empty(dump.sentence_id)
        reports.append(score(cky_parse(table, dump.n), gold, counting))
    total = EvalReport.aggregate(reports)
    return total.precision if objective == "precision" else total.f1


def _greedy(
    strategy: str,
    dumps: Sequence[AttentionDump],
    golds: Sequence[ConstituencyTree],
    universe: tuple[int, int] | None,
    objective: str,
    counting: CountingPolicy,
) -> SelectionTrace:
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    universe = _check_dev_set(dumps, golds, universe)
    layers, heads = universe
    all_pairs = sorted((l, h) for l in range(1, layers + 1) for h in range(1, heads + 1))

    adding = strategy == "addition"
    current: set[Head] = set() if adding else set(all_pairs)
    evaluations = 1
    initial_score = _dev_score(dumps, golds, frozenset(current), universe, objective, counting)
    n_steps = len(all_pairs) if adding else len(all_pairs) - 1

    steps: list[SelectionStep] = []
    for step in range(1, n_steps + 1):
        candidates = sorted(set(all_pairs) - current if adding else current)
        best: tuple[float, Head] | None = None
        for head in candidates:
            trial = current | {head} if adding else current - {head}
            value = _dev_score(dumps, golds, frozenset(trial), universe, objective, counting)
            evaluations += 1
            if best is None or value > best[0]:  # ties keep the lowest pair
                best = (value, head)
        assert best is not None
        value, head = best
        if adding:
            current.add(head)
        else:
            current.remove(head)
        steps.append(SelectionStep(step, head, len(current), value))
        log.info("%s step %d: %s%s -> %s=%.6f", strategy, step,
                 "+" if adding else "-", head, objective, value)

    return SelectionTrace(
        strategy=strategy,
        universe=universe,
        objective=objective,
        initial_mask_size=0 if adding else len(all_pairs),
        initial_score=initial_score,
        steps=tuple(steps),
        evaluations=evaluations,
    )


def greedy_addition(
    dumps: Sequence[AttentionDump],
    golds: Sequence[ConstituencyTree],
    universe: tuple[int, int] | None = None,
    objective: str = "precision",
    counting: CountingPolicy = CountingPolicy.NONTRIVIAL,
) -> SelectionTrace:
    """Empty mask to full mask, one precision-maximizing head at a time."""
    return _greedy("addition", dumps, golds, universe, objective, counting)


def greedy_ablation(
    dumps: Sequence[AttentionDump],
    golds: Sequence[ConstituencyTree],
    universe: tuple[int, int] | None = None,
    objective: str = "precision",
    counting: CountingPolicy = CountingPolicy.NONTRIVIAL,
) -> SelectionTrace:
    """Full mask down to a single head, removing the best head to drop."""
    return _greedy("ablation", dumps, golds, universe, objective, counting)


def layer_distribution(mask: HeadMask) -> dict[int, float]:
    """Fraction of selected heads per layer, over all layers in the universe."""
    if not mask.heads:
        raise ValueError("empty head mask")
    counts = Counter(layer for layer, _ in mask.heads)
    total = len(mask.heads)
    return {layer: counts.get(layer, 0) / total for layer in range(1, mask.universe[0] + 1)}
