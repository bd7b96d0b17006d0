"""Command-line interface: vectorize, train, classify, sample, report,
verify-table2.

Exit codes: 0 success, 1 domain error, 2 usage error. Reports go to
stdout, diagnostics to stderr. JSON output is sorted-key for golden-file
diffing; plain output prints numbers with 4 decimals.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .aoi import fixation_report, vectorize
from .classify import decide
from .errors import CursorHmmError
from .hmm import sample as hmm_sample
from .training import TrainingConfig, baum_welch

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cursor-hmm",
        description="Mouse-trace symbolization and HMM task inference toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vectorize", help="turn a cursor trace into a symbol sequence")
    p.add_argument("--trace", required=True)
    p.add_argument("--layout", required=True)
    p.add_argument("--ds", type=float, default=10.0, help="resampling interval in ms")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="fit an HMM on a directory of sequence files")
    p.add_argument("--init", required=True, help="starting model file")
    p.add_argument("--data", required=True, help="directory of sequence files")
    p.add_argument("--out", required=True, help="trained model output file")
    p.add_argument("--freeze-pi", action="store_true")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--prob-floor", type=float, default=1e-6)

    p = sub.add_parser("classify", help="pick the most likely task for a sequence")
    p.add_argument("--models", required=True, help="directory of per-task model files")
    p.add_argument("--seq", required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sample", help="draw a synthetic sequence from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="fixation-rate table for sequences")
    p.add_argument("--seq", help="single sequence file")
    p.add_argument("--aggregate", help="directory of sequence files; prints mean rates")
    p.add_argument("--layout", required=True)
    p.add_argument("--json", action="store_true")

    sub.add_parser(
        "verify-table2",
        help="re-derive the bundled published decisions from their scores",
    )
    return parser


def _cmd_vectorize(args) -> int:
    layout = io.load_layout(args.layout)
    try:
        trace = io.load_trace(args.trace)
    except CursorHmmError as exc:
        if "no samples" in str(exc):
            raise UsageError(str(exc)) from exc
        raise
    seq = vectorize(trace, layout, args.ds)
    io.save_sequence(seq, layout.alphabet, args.out)
    counts = np.bincount(seq.symbols, minlength=layout.n_symbols)
    print(f"T = {len(seq)}")
    for name, count in zip(layout.alphabet, counts):
        print(f"{name}  {count}")
    return EXIT_OK


def _cmd_train(args) -> int:
    model0 = io.load_model(args.init)
    files = sorted(p for p in Path(args.data).iterdir() if p.is_file())
    if not files:
        raise CursorHmmError(f"{args.data}: no sequence files found")
    sequences = [io.load_sequence(p, model0.symbol_names) for p in files]
    config = TrainingConfig(
        max_iters=args.max_iters,
        ll_tolerance=args.tol,
        prob_floor=args.prob_floor,
        freeze_pi=args.freeze_pi,
    )
    model, trace = baum_welch(model0, sequences, config)
    io.save_model(
        model,
        args.out,
        metadata={"trained_from": str(args.init), "n_sequences": len(sequences)},
    )
    trace_path = str(args.out) + ".trace.json"
    io.save_report(
        {
            "log_likelihoods": trace.log_likelihoods,
            "iterations_run": trace.iterations_run,
            "converged": trace.converged,
        },
        trace_path,
    )
    print(f"trained on {len(sequences)} sequences")
    print(f"iterations: {trace.iterations_run}  converged: {trace.converged}")
    print(f"log-likelihood: {trace.log_likelihoods[0]:.4f} -> {trace.log_likelihoods[-1]:.4f}")
    print(f"trace written to {trace_path}")
    return EXIT_OK


def _cmd_classify(args) -> int:
    registry = io.load_registry(args.models)
    seq = io.load_sequence(args.seq, registry.symbol_names)
    from .classify import classify as _classify

    report = _classify(registry, seq)
    if args.json:
        print(json.dumps(report.to_jsonable(), indent=2, sort_keys=True))
    else:
        print(report.to_table())
    return EXIT_OK


def _cmd_sample(args) -> int:
    model = io.load_model(args.model)
    _, seq = hmm_sample(model, args.length, args.seed)
    io.save_sequence(seq, model.symbol_names, args.out)
    print(f"wrote {len(seq)} symbols to {args.out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    if bool(args.seq) == bool(args.aggregate):
        raise UsageError("report needs exactly one of --seq or --aggregate")
    layout = io.load_layout(args.layout)
    if args.seq:
        seqs = [io.load_sequence(args.seq, layout.alphabet)]
    else:
        files = sorted(p for p in Path(args.aggregate).iterdir() if p.is_file())
        if not files:
            raise CursorHmmError(f"{args.aggregate}: no sequence files found")
        seqs = [io.load_sequence(p, layout.alphabet) for p in files]
    rates = np.mean([fixation_report(s, layout) for s in seqs], axis=0)
    if args.json:
        print(json.dumps(
            {name: rate for name, rate in zip(layout.alphabet, rates)},
            indent=2, sort_keys=True,
        ))
    else:
        for name, rate in zip(layout.alphabet, rates):
            print(f"{name}  {rate:.4f}")
    return EXIT_OK


def _cmd_verify_table2(args) -> int:
    rows = io.load_table2()
    failures = 0
    print("task  recomputed  printed  margin      status")
    for row in rows:
        winner, margin, _ = decide(row.scores)
        ok = winner == row.decision
        failures += 0 if ok else 1
        print(
            f"{row.task_id:<5} {winner:<10} {row.decision:<8} "
            f"{margin:>9.4f}  {'ok' if ok else 'MISMATCH'}"
        )
    print(f"{len(rows) - failures}/{len(rows)} decisions reproduced")
    return EXIT_OK if failures == 0 else EXIT_DOMAIN_ERROR


_HANDLERS = {
    "vectorize": _cmd_vectorize,
    "train": _cmd_train,
    "classify": _cmd_classify,
    "sample": _cmd_sample,
    "report": _cmd_report,
    "verify-table2": _cmd_verify_table2,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE_ERROR
    except (CursorHmmError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN_ERROR


if __name__ == "__main__":
    sys.exit(main())
