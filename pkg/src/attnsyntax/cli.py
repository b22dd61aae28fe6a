"""Command-line entry point: extract, eval, baseline, select-heads, render.

All subcommands are deterministic given their inputs and flags (the
``rand.attn`` baseline via ``--seed``), and independent of ``--jobs``.
Output files are written atomically: on failure no partial file remains.
Set ``ATTNSYNTAX_LOG=debug|info|warning`` to control verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

from .attn_io import AttentionDump, load_dump, word_groups
from .errors import AlignmentError, AttnSyntaxError
from .masks import HeadMask
from .phrases import build_phrase_table
from .scoring import CountingPolicy, EvalReport, score
from .selection import greedy_ablation, greedy_addition, layer_distribution
from .synth import random_attention_baseline
from .treebank import gold_tree_for_dump, postprocess, raw_leaves, read_bracketed
from .render import image_name, render_head, sidecar_text
from .trees import cky_parse, extract_tree, lbal_tree, parse_span_tree, rbal_tree

log = logging.getLogger(__name__)

T = TypeVar("T")
U = TypeVar("U")


def _setup_logging() -> None:
    name = os.environ.get("ATTNSYNTAX_LOG", "warning").upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _parallel_map(fn: Callable[[T], U], items: Sequence[T], jobs: int) -> list[U]:
    """Apply fn to items, preserving input order regardless of worker count."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".attnsyntax-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


# --- extract ---------------------------------------------------------------


def _extract_one(dump: AttentionDump, heads_spec: str) -> tuple[str, dict]:
    mask = HeadMask.from_spec(heads_spec, dump.layers, dump.heads)
    table = build_phrase_table(dump, mask)
    tree = cky_parse(table, dump.n)
    record = {
        "id": dump.sentence_id,
        "phrases": [
            {"span": [a, b], "raw": table.raw_weight(a, b), "equalized": table.weight(a, b)}
            for a, b in table.spans()
        ],
    }
    return tree.to_bracketed(dump.subwords), record


def _cmd_extract(args: argparse.Namespace) -> int:
    dumps = load_dump(args.dump)

    def worker(dump: AttentionDump):
        try:
            return _extract_one(dump, args.heads), None
        except (AttnSyntaxError, ValueError) as exc:
            return None, exc

    results = _parallel_map(worker, dumps, args.jobs)
    lines: list[str] = []
    records: list[dict] = []
    failed = 0
    for dump, (result, error) in zip(dumps, results):
        if error is not None:
            failed += 1
            print(f"error: sentence {dump.sentence_id!r}: {error}", file=sys.stderr)
            if not args.keep_going:
                return 1
            lines.append("")
            records.append({"id": dump.sentence_id, "error": str(error)})
        else:
            line, record = result
            lines.append(line)
            records.append(record)
    _write_text(args.out, "".join(line + "\n" for line in lines))
    if args.emit_phrases:
        _write_text(
            args.emit_phrases,
            "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records),
        )
    return 1 if failed else 0


# --- eval ------------------------------------------------------------------


def _score_line(index: int, extracted_line: str, gold_line: str,
                counting: CountingPolicy) -> EvalReport:
    try:
        tree, tokens = parse_span_tree(extracted_line)
        raw = read_bracketed(gold_line)
        groups = word_groups(tokens, eos=tokens[-1])
        words = raw_leaves(raw)
        if len(words) != len(groups):
            raise AlignmentError(
                f"reference tree has {len(words)} words but the extracted "
                f"leaves form {len(groups)}"
            )
        segmentation = [list(tokens[a - 1 : b]) for a, b in groups]
        gold = postprocess(raw, segmentation, eos=tokens[-1])
        return score(tree, gold, counting)
    except AttnSyntaxError as exc:
        raise type(exc)(f"sentence {index}: {exc}") from exc


def _percent(value: float) -> str:
    return f"{100.0 * value:.1f}%"


def _eval_text(total: EvalReport, n_sentences: int,
               per_sentence: list[EvalReport] | None,
               counting: CountingPolicy) -> str:
    lines = [f"counting: {counting.value}"]
    if per_sentence is not None:
        for i, report in enumerate(per_sentence, start=1):
            lines.append(
                f"sentence {i}: precision={report.extracted_consistent}/"
                f"{report.extracted_phrases_total} recall={report.gold_consistent}/"
                f"{report.gold_phrases_total} f1={_percent(report.f1)}"
            )
    lines += [
        f"sentences: {n_sentences}",
        f"extracted_phrases_total: {total.extracted_phrases_total}",
        f"extracted_consistent: {total.extracted_consistent}",
        f"gold_phrases_total: {total.gold_phrases_total}",
        f"gold_consistent: {total.gold_consistent}",
        f"precision: {_percent(total.precision)} "
        f"({total.extracted_consistent}/{total.extracted_phrases_total})",
        f"recall: {_percent(total.recall)} "
        f"({total.gold_consistent}/{total.gold_phrases_total})",
        f"f1: {_percent(total.f1)}",
    ]
    return "\n".join(lines) + "\n"


def evaluate_files(extracted_path: str, gold_path: str,
                   counting: CountingPolicy = CountingPolicy.NONTRIVIAL,
                   jobs: int = 1) -> tuple[EvalReport, list[EvalReport]]:
    """Score an extracted-trees file against a reference-trees file."""
    extracted_lines = _read_lines(extracted_path)
    gold_lines = _read_lines(gold_path)
    if len(extracted_lines) != len(gold_lines):
        raise AlignmentError(
            f"{extracted_path} has {len(extracted_lines)} lines but "
            f"{gold_path} has {len(gold_lines)}"
        )
    reports = _parallel_map(
        lambda pair: _score_line(pair[0], pair[1][0], pair[1][1], counting),
        list(enumerate(zip(extracted_lines, gold_lines), start=1)),
        jobs,
    )
    return EvalReport.aggregate(reports), reports


def _cmd_eval(args: argparse.Namespace) -> int:
    counting = CountingPolicy.from_name(args.counting)
    total, reports = evaluate_files(args.extracted, args.gold, counting, args.jobs)
    text = _eval_text(total, len(reports), reports if args.per_sentence else None, counting)
    _write_text(args.out, text)
    return 0


# --- baseline ----------------------------------------------------------------


def _cmd_baseline(args: argparse.Namespace) -> int:
    dumps = load_dump(args.dump)

    def worker(pair: tuple[int, AttentionDump]) -> str:
        index, dump = pair
        if args.kind == "lbal":
            tree = lbal_tree(dump.n)
        elif args.kind == "rbal":
            tree = rbal_tree(dump.n)
        else:  # rand.attn: fresh seeded matrices of the same shape
            random = random_attention_baseline(
                [args.seed, index],
                dump.n,
                dump.layers,
                dump.heads,
                sentence_id=dump.sentence_id,
                subwords=dump.subwords,
                eos=dump.subwords[-1],
            )
            mask = HeadMask.from_spec(args.heads, random.layers, random.heads)
            tree = extract_tree(random, mask)
        return tree.to_bracketed(dump.subwords)

    lines = _parallel_map(worker, list(enumerate(dumps)), args.jobs)
    _write_text(args.out, "".join(line + "\n" for line in lines))
    return 0


# --- select-heads ------------------------------------------------------------


def _cmd_select_heads(args: argparse.Namespace) -> int:
    counting = CountingPolicy.from_name(args.counting)
    dumps = load_dump(args.dump)[: args.dev_size]
    gold_lines = _read_lines(args.gold)
    if len(gold_lines) < len(dumps):
        raise AlignmentError(
            f"{args.gold} has {len(gold_lines)} lines, need at least {len(dumps)}"
        )
    golds = [
        gold_tree_for_dump(read_bracketed(line), dump)
        for dump, line in zip(dumps, gold_lines)
    ]
    search = greedy_addition if args.strategy == "add" else greedy_ablation
    trace = search(dumps, golds, objective=args.objective, counting=counting)
    distribution = layer_distribution(trace.best_mask)
    text = (
        trace.to_text()
        + f"best-mask: {trace.best_mask.to_spec()}\n"
        + "layer-distribution: "
        + " ".join(f"{100 * distribution[layer]:.0f}%" for layer in sorted(distribution))
        + "\n"
    )
    _write_text(args.out, text)
    return 0


# --- render ------------------------------------------------------------------


def _cmd_render(args: argparse.Namespace) -> int:
    if args.all == (args.layer is not None or args.head is not None):
        raise ValueError("use either --all or both --layer and --head")
    if not args.all and (args.layer is None or args.head is None):
        raise ValueError("--layer and --head go together")
    dumps = load_dump(args.dump)
    by_id = {dump.sentence_id: dump for dump in dumps}
    if args.sentence not in by_id:
        known = ", ".join(sorted(by_id)[:10])
        raise ValueError(f"sentence id {args.sentence!r} not in dump (have: {known})")
    dump = by_id[args.sentence]
    if args.all:
        pairs = [
            (layer, head)
            for layer in range(1, dump.layers + 1)
            for head in range(1, dump.heads + 1)
        ]
    else:
        pairs = [(args.layer, args.head)]
    os.makedirs(args.out_dir, exist_ok=True)

    def worker(pair: tuple[int, int]) -> str:
        layer, head = pair
        stem = image_name(dump.sentence_id, layer, head, hardened=args.hardened)
        data = render_head(dump, layer, head, hardened=args.hardened)
        with open(os.path.join(args.out_dir, stem + ".pgm"), "wb") as fh:
            fh.write(data)
        with open(
            os.path.join(args.out_dir, stem + ".txt"), "w", encoding="utf-8"
        ) as fh:
            fh.write(sidecar_text(dump.subwords))
        return stem

    stems = _parallel_map(worker, pairs, args.jobs)
    log.info("wrote %d heatmaps to %s", len(stems), args.out_dir)
    return 0


# --- parser ------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attnsyntax",
        description="Extract constituency trees from encoder self-attention "
        "matrices and score them against reference parses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, dump: bool = True) -> None:
        if dump:
            p.add_argument("--dump", required=True, help="attention dump file (JSON lines)")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--jobs", type=int, default=1, help="worker threads")

    p = sub.add_parser("extract", help="extract one bracketed tree per sentence")
    add_common(p)
    p.add_argument("--heads", default="all", help="'all' or comma list layer:head (1-based)")
    p.add_argument("--emit-phrases", default=None, metavar="PATH",
                   help="also write the phrase tables as JSON lines")
    p.add_argument("--keep-going", action="store_true",
                   help="on a per-sentence error, emit an empty line and continue")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("eval", help="score extracted trees against reference parses")
    p.add_argument("--extracted", required=True, help="extracted trees, one per line")
    p.add_argument("--gold", required=True, help="reference trees, one per line")
    p.add_argument("--counting", choices=["all", "nontrivial"], default="nontrivial")
    p.add_argument("--per-sentence", action="store_true")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("baseline", help="uninformed baseline trees for a dump")
    add_common(p)
    p.add_argument("--kind", choices=["lbal", "rbal", "rand.attn"], required=True)
    p.add_argument("--seed", type=int, default=0, help="seed for rand.attn")
    p.add_argument("--heads", default="all", help="head mask for rand.attn extraction")
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("select-heads", help="greedy head subset search on a dev set")
    add_common(p)
    p.add_argument("--gold", required=True)
    p.add_argument("--strategy", choices=["add", "ablate"], required=True)
    p.add_argument("--dev-size", type=int, default=100)
    p.add_argument("--objective", choices=["precision", "f1"], default="precision")
    p.add_argument("--counting", choices=["all", "nontrivial"], default="nontrivial")
    p.set_defaults(func=_cmd_select_heads)

    p = sub.add_parser("render", help="write attention heatmaps as P5 graymaps")
    p.add_argument("--dump", required=True)
    p.add_argument("--sentence", required=True, help="sentence id to render")
    p.add_argument("--layer", type=int, default=None)
    p.add_argument("--head", type=int, default=None)
    p.add_argument("--all", action="store_true", help="render every layer x head")
    p.add_argument("--hardened", action="store_true",
                   help="render the per-row-maximum matrix instead")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AttnSyntaxError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
