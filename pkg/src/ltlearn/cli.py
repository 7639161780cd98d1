"""Command-line interface: learn, generate, verify, oracle, bench."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import random
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .formula import FormulaSyntaxError, UnsupportedOperatorError, parse_formula, print_formula
from .learner import LearnerConfig, LearnResult, learn
from .oracle import OracleGuardError, minimal_separating_size
from .samplegen import InfeasibleSampleError, StateLimitError, WordCounter, gen_trailer
from .semantics import error_rates, evaluate, is_separating, sat_mask
from .traces import Alphabet, AlphabetMismatchError, Sample, SampleParseError, Trace, load_sample, serialize_sample

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_SOLUTION = 2
EXIT_NOT_SEPARATING = 3

REPORT_SCHEMA = 1
CSV_COLUMNS = [
    "file", "n_pos", "n_neg", "max_length", "time_to_first_s", "time_to_best_s", "total_time_s",
    "timed_out", "formula", "size", "missed_pos_rate", "accepted_neg_rate", "error",
]

INPUT_ERRORS = (
    OSError, SampleParseError, FormulaSyntaxError, UnsupportedOperatorError,
    AlphabetMismatchError, InfeasibleSampleError, StateLimitError, OracleGuardError, ValueError,
)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _ms(x: float | None) -> float | None:
    return None if x is None else round(x, 3)


def _epsilon(text: str) -> float:
    eps = float(text)
    if not 0 <= eps < 1:
        raise argparse.ArgumentTypeError("epsilon must lie in [0, 1)")
    return eps


def _lengths(text: str) -> list[int]:
    lo, sep, hi = text.replace("..", "-").partition("-")
    lo_i = int(lo)
    hi_i = int(hi) if sep else lo_i
    if lo_i < 1 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"bad length range {text!r}")
    return list(range(lo_i, hi_i + 1))


def report(result: LearnResult, sample_path: str, epsilon: float) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "sample": sample_path,
        "formula": result.text,
        "size": result.size,
        "time_to_first_s": _ms(result.time_to_first),
        "time_to_best_s": _ms(result.time_to_best),
        "total_time_s": _ms(result.total_time),
        "timed_out": result.timed_out,
        "epsilon": epsilon,
        "missed_pos_rate": result.missed_pos_rate,
        "accepted_neg_rate": result.accepted_neg_rate,
        "emissions": [
            {"t_s": _ms(e.elapsed), "size": e.size, "formula": print_formula(e.formula)}
            for e in result.emissions
        ],
    }


def _config(args) -> LearnerConfig:
    return LearnerConfig(
        epsilon=args.epsilon,
        timeout=args.timeout,
        max_length=args.max_length,
        max_width=args.max_width,
    )


# -- subcommands ---------------------------------------------------------------

def cmd_learn(args) -> int:
    sample = load_sample(args.sample)

    def emit(elapsed, formula, size):
        print(f"[t={elapsed:.3f}s] size={size} {print_formula(formula)}", flush=True)

    result = learn(sample, _config(args), emit if args.emit_intermediate else None)
    text = json.dumps(report(result, args.sample, args.epsilon), indent=2)
    if args.json:
        Path(args.json).write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK if result.formula is not None else EXIT_NO_SOLUTION


def cmd_generate(args) -> int:
    formula = parse_formula(args.formula)
    lengths = args.lengths or [args.length]
    if lengths == [None]:
        raise ValueError("give --length or --lengths")
    alphabet = Alphabet(tuple(p.strip() for p in args.props.split(","))) if args.props else None
    rng = random.Random(args.seed)
    k = len(lengths)
    pos, neg = [], []
    counter = WordCounter(formula, alphabet)
    for i, length in enumerate(lengths):
        # spread the demand evenly; earlier lengths take the remainder
        n_pos = args.num_pos // k + (i < args.num_pos % k)
        n_neg = args.num_neg // k + (i < args.num_neg % k)
        pos += counter.draw(n_pos, length, True, rng)
        neg += counter.draw(n_neg, length, False, rng)
    a = counter.alphabet
    sample = Sample(a, tuple(Trace(w, a) for w in pos), tuple(Trace(w, a) for w in neg))
    span = str(lengths[0]) if k == 1 else f"{lengths[0]}..{lengths[-1]}"
    text = serialize_sample(sample, trailer=gen_trailer(formula, span, args.seed))
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"wrote {len(pos)} positive and {len(neg)} negative traces to {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    sample = load_sample(args.sample)
    formula = parse_formula(args.formula)
    print(f"{'label':<6}{'index':>6}  result")
    for label, traces in (("P", sample.positives), ("N", sample.negatives)):
        for i, t in enumerate(traces, start=1):
            print(f"{label:<6}{i:>6}  {'sat' if evaluate(formula, t) else 'unsat'}")
    mask = sat_mask(formula, sample)
    missed, accepted = error_rates(mask)
    print(f"missed positives: {missed:.4f}")
    print(f"accepted negatives: {accepted:.4f}")
    if is_separating(mask, args.epsilon):
        print("SEPARATING")
        return EXIT_OK
    print("NOT SEPARATING")
    return EXIT_NOT_SEPARATING


def cmd_oracle(args) -> int:
    sample = load_sample(args.sample)
    found = minimal_separating_size(sample, args.max_size, args.epsilon, force=args.force)
    if found is None:
        print(f"none <= {args.max_size}")
    else:
        size, witness = found
        print(f"size {size}: {print_formula(witness)}")
    return EXIT_OK


def _bench_one(job) -> dict:
    path, timeout, epsilon, max_length, max_width = job
    row = dict.fromkeys(CSV_COLUMNS, "")
    row["file"] = str(path)
    try:
        sample = load_sample(path)
        cfg = LearnerConfig(epsilon=epsilon, timeout=timeout, max_length=max_length, max_width=max_width)
        r = learn(sample, cfg)
    except INPUT_ERRORS as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(
        n_pos=len(sample.positives), n_neg=len(sample.negatives), max_length=sample.length,
        time_to_first_s=_ms(r.time_to_first), time_to_best_s=_ms(r.time_to_best),
        total_time_s=_ms(r.total_time), timed_out=r.timed_out, formula=r.text or "",
        size=r.size if r.size is not None else "",
        missed_pos_rate=r.missed_pos_rate if r.missed_pos_rate is not None else "",
        accepted_neg_rate=r.accepted_neg_rate if r.accepted_neg_rate is not None else "",
    )
    return {k: ("" if v is None else v) for k, v in row.items()}


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("SCARLET_THREADS", "1")))
    except ValueError:
        return 1


def cmd_bench(args) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        raise OSError(f"not a readable directory: {directory}")
    files = sorted(directory.glob(args.pattern))
    jobs = [(f, args.timeout, args.epsilon, args.max_length, args.max_width) for f in files]
    workers = min(_workers(), max(1, len(jobs)))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    with open(args.csv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    solved = [r for r in rows if r["size"] != ""]
    print(f"{len(rows)} samples, {len(solved)} solved, "
          f"{sum(1 for r in rows if r['error'])} unreadable")
    if solved:
        print(f"mean size: {statistics.mean(int(r['size']) for r in solved):.2f}")
        print(f"mean total time: {statistics.mean(float(r['total_time_s']) for r in solved):.3f}s")
    return EXIT_OK


# -- wiring --------------------------------------------------------------------

def _learner_flags(p: argparse.ArgumentParser, timeout: float) -> None:
    p.add_argument("--timeout", type=float, default=timeout, help="seconds (default %(default)s)")
    p.add_argument("--epsilon", type=_epsilon, default=0.0, help="tolerated error rate per side")
    p.add_argument("--max-length", type=int, default=6, help="directed formula length cap")
    p.add_argument("--max-width", type=int, default=3, help="partial symbol width cap")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ltlearn", description="Learn LTL formulas from labelled finite traces.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("learn", help="learn a separating formula")
    p.add_argument("--sample", required=True)
    _learner_flags(p, 900.0)
    p.add_argument("--emit-intermediate", action="store_true", help="print each improvement as found")
    p.add_argument("--json", help="also write the report to this file")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("generate", help="generate a sample from a formula")
    p.add_argument("--formula", required=True)
    p.add_argument("--length", type=int)
    p.add_argument("--lengths", type=_lengths, help="range such as 8..15; demand is split evenly")
    p.add_argument("--num-pos", type=int, required=True)
    p.add_argument("--num-neg", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--props", help="comma-separated alphabet (default: atoms of the formula)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check a formula against a sample")
    p.add_argument("--sample", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--epsilon", type=_epsilon, default=0.0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force minimal separating size")
    p.add_argument("--sample", required=True)
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--epsilon", type=_epsilon, default=0.0)
    p.add_argument("--force", action="store_true", help="skip the input size guard")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="learn on every sample in a directory, write CSV")
    p.add_argument("--dir", required=True)
    p.add_argument("--csv", required=True)
    p.add_argument("--pattern", default="*.trace", help="file glob (default %(default)s)")
    _learner_flags(p, 900.0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
