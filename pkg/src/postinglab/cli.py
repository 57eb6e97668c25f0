"""Command-line workbench.

Subcommands: gen-source, build-table, parse, analytic, efficiency, sweep.
Stochastic commands require explicit seeds, every run echoes its resolved
configuration to stderr, and output files are written atomically. Exit codes:
0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ._io import atomic_write_text
from .analytics import analytic_list_size, kgram_efficiency, rle_efficiency
from .bits import hamming_weight, validate_bits
from .codes import parse_code_spec
from .experiments import (
    ConfigError,
    SWEEP_COLUMNS,
    derive_seed,
    SOURCE_DOMAIN,
    estimate_efficiency,
    load_sweep_config,
    rows_to_csv,
    sweep,
)
from .queries import QueryModel, covering_cost, parse_law_spec, parse_query
from .sources import SourceSpec, sample_source
from .tables import PostingTable, build_posting_table, retrieve_matches


class UsageError(Exception):
    pass


def _banner(command: str, settings: dict) -> None:
    resolved = " ".join(f"{k}={v}" for k, v in settings.items())
    print(f"# {command} {resolved}", file=sys.stderr)


def _load_code(args) -> object:
    try:
        return parse_code_spec(args.code, seed=getattr(args, "code_seed", None))
    except (ValueError, OSError) as exc:
        raise UsageError(f"bad --code: {exc}") from None


def _build_query_model(args) -> QueryModel:
    try:
        if args.query_kind == "iid":
            if not args.length_law:
                raise UsageError("--length-law is required for iid queries")
            return QueryModel.iid_bits(args.q, parse_law_spec(args.length_law))
        if not args.run_law:
            raise UsageError("--run-law is required for runlength queries")
        return QueryModel.run_structured(args.q, parse_law_spec(args.run_law))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cmd_gen_source(args) -> int:
    try:
        spec = SourceSpec(p=args.p, n=args.n, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _banner("gen-source", {"p": spec.p, "n": spec.n, "seed": spec.seed, "out": args.out})
    source = sample_source(spec)
    atomic_write_text(args.out, source.bits + "\n")
    return 0


def _read_source_file(path: str):
    from .sources import SourceSequence

    try:
        bits = validate_bits(Path(path).read_text(encoding="ascii").strip())
    except OSError as exc:
        raise UsageError(f"cannot read source file: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"bad source file: {exc}") from None
    if not bits:
        raise UsageError("source file is empty")
    spec = SourceSpec(p=0.5, n=len(bits), seed=0)  # placeholder stats for file input
    return SourceSequence(bits, spec)


def _cmd_build_table(args) -> int:
    code = _load_code(args)
    source = _read_source_file(args.source_file)
    _banner(
        "build-table",
        {
            "code": args.code,
            "source_file": args.source_file,
            "n": len(source),
            "circular": not args.flat,
            "out": args.out,
        },
    )
    if not code.complete:
        raise UsageError("table building requires a complete code")
    table = build_posting_table(code, source, circular=not args.flat)
    table.dump(args.out)
    return 0


def _cmd_parse(args) -> int:
    code = _load_code(args)
    try:
        query = validate_bits(args.query)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not query:
        raise UsageError("--query must be nonempty")
    if not code.complete:
        raise UsageError("parsing requires a complete code")
    _banner("parse", {"code": args.code, "query": query, "table": args.table})
    parsing = parse_query(code, query)
    body = " ".join(f"{word}@{off}" for word, off in parsing.body) or "(empty)"
    print(f"query: {query}")
    print(f"body: {body}")
    if parsing.tail_offset is None:
        print("tail: (none)")
    else:
        print(f"tail: {parsing.tail}@{parsing.tail_offset}")
        print(f"tail_codewords: {','.join(parsing.tail_codewords)}")
    print(f"codeword_count: {parsing.codeword_count}")
    if args.table:
        try:
            table = PostingTable.load(args.table, code)
        except (OSError, ValueError) as exc:
            raise UsageError(f"bad --table: {exc}") from None
        print(f"cost_bits: {covering_cost(table, parsing):.12g}")
        matches = retrieve_matches(table, parsing)
        print(f"matches: {','.join(str(int(m)) for m in matches)}")
    return 0


def _cmd_analytic(args) -> int:
    code = _load_code(args)
    if not 0.0 < args.p < 1.0:
        raise UsageError("--p must lie strictly between 0 and 1")
    _banner("analytic", {"code": args.code, "p": args.p, "n": args.n, "q": args.q})
    if not code.complete:
        raise UsageError("analytic sizes are defined for complete codes")
    sizes = analytic_list_size(code, args.p, args.n if args.n else 1.0)
    header = "codeword,length,weight,frequency"
    if args.n:
        header += ",expected_size"
    print(header)
    for word in code.codewords:
        freq = sizes[word] / (args.n if args.n else 1.0)
        row = f"{word},{len(word)},{hamming_weight(word)},{freq:.12g}"
        if args.n:
            row += f",{sizes[word]:.12g}"
        print(row)
    if args.q is not None:
        if code.kind == "kgram":
            if not args.length_law:
                raise UsageError("--length-law is required for kgram predictions")
            formula = kgram_efficiency(
                args.p, args.q, code.max_len, parse_law_spec(args.length_law)
            )
        elif code.kind == "rle":
            if not args.run_law:
                raise UsageError("--run-law is required for rle predictions")
            formula = rle_efficiency(args.p, args.q, code.size, parse_law_spec(args.run_law))
        else:
            raise UsageError("efficiency predictions exist for kgram and rle codes only")
        print()
        print("quantity,value")
        print(f"dominant,{formula.dominant:.12g}")
        print(f"correction,{formula.correction:.12g}")
        for name, value in formula.alternates.items():
            print(f"{name},{value:.12g}")
        if args.n:
            print(f"value_at_n,{formula.value_at(args.n):.12g}")
    return 0


def _cmd_efficiency(args) -> int:
    code = _load_code(args)
    model = _build_query_model(args)
    if args.mode == "empirical" and args.source_seed is None:
        raise UsageError("--source-seed is required in empirical mode")
    source_seed = args.source_seed if args.source_seed is not None else 0
    try:
        spec = SourceSpec(p=args.p, n=args.n, seed=source_seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _banner(
        "efficiency",
        {
            "code": args.code,
            "p": args.p,
            "q": args.q,
            "n": args.n,
            "trials": args.trials,
            "mode": args.mode,
            "accounting": args.accounting,
            "seed": args.seed,
            "source_seed": source_seed,
            "workers": args.workers,
        },
    )
    try:
        est = estimate_efficiency(
            code,
            spec,
            model,
            args.trials,
            args.mode,
            args.seed,
            accounting=args.accounting,
            workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    row = {
        "code_type": code.kind,
        "M": code.size,
        "k_or_maxlen": code.max_len,
        "N": args.n,
        "p": args.p,
        "q": args.q,
        "trials": est.trials,
        "eta_mean": est.eta_mean,
        "eta_stderr": est.eta_stderr,
        "infinite_cost_trials": est.infinite_cost_trials,
        "seed": args.seed,
        "mode": est.mode,
        "accounting": est.accounting,
    }
    print(rows_to_csv([row]), end="")
    if not est.defined:
        print("# warning: every trial had infinite cost; estimate undefined", file=sys.stderr)
    return 0


def _cmd_sweep(args) -> int:
    config = load_sweep_config(args.config)
    out = args.out if args.out else config.out
    if out is None:
        raise UsageError("no output path: set 'out' in the config or pass --out")
    _banner(
        "sweep",
        {
            "config": args.config,
            "out": out,
            "workers": args.workers,
            "seed": config.seed,
            "cells": len(config.codes) * len(config.pq) * len(config.n_values),
        },
    )
    sweep(config, out, workers=args.workers)
    return 0


def _add_code_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--code",
        required=True,
        help="code spec: kgram:<k> | rle:<m> | random:<m>,<max_len> | file:<path>",
    )
    parser.add_argument(
        "--code-seed",
        type=int,
        default=None,
        help="seed for random:<m>,<max_len> code specs",
    )


def _add_query_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--query-kind", choices=("iid", "runlength"), default="iid")
    parser.add_argument("--length-law", help="fixed:<v> or tgeom:<p>,<max>")
    parser.add_argument("--run-law", help="fixed:<v> or tgeom:<p>,<max>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="postinglab",
        description="Posting-table string matching workbench over random binary sources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen-source", help="write a Bernoulli bit source to a file")
    p_gen.add_argument("--p", type=float, required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=_cmd_gen_source)

    p_build = sub.add_parser("build-table", help="build a posting table from a source file")
    _add_code_arguments(p_build)
    p_build.add_argument("--source-file", required=True)
    p_build.add_argument("--out", required=True)
    p_build.add_argument(
        "--flat",
        action="store_true",
        help="drop positions whose codeword crosses the sequence end",
    )
    p_build.set_defaults(func=_cmd_build_table)

    p_parse = sub.add_parser("parse", help="parse a query and optionally retrieve matches")
    _add_code_arguments(p_parse)
    p_parse.add_argument("--query", required=True)
    p_parse.add_argument("--table", help="posting table dump to cost and retrieve against")
    p_parse.set_defaults(func=_cmd_parse)

    p_analytic = sub.add_parser("analytic", help="print expected sizes and predictions")
    _add_code_arguments(p_analytic)
    p_analytic.add_argument("--p", type=float, required=True)
    p_analytic.add_argument("--n", type=int, default=None)
    p_analytic.add_argument("--q", type=float, default=None)
    p_analytic.add_argument("--length-law", help="fixed:<v> or tgeom:<p>,<max>")
    p_analytic.add_argument("--run-law", help="fixed:<v> or tgeom:<p>,<max>")
    p_analytic.set_defaults(func=_cmd_analytic)

    p_eff = sub.add_parser("efficiency", help="Monte Carlo efficiency estimate")
    _add_code_arguments(p_eff)
    p_eff.add_argument("--p", type=float, required=True)
    p_eff.add_argument("--q", type=float, required=True)
    p_eff.add_argument("--n", type=int, required=True)
    p_eff.add_argument("--trials", type=int, required=True)
    p_eff.add_argument("--seed", type=int, required=True)
    p_eff.add_argument("--mode", choices=("empirical", "analytic_table"), default="analytic_table")
    p_eff.add_argument("--accounting", choices=("per_codeword", "per_run"), default="per_codeword")
    p_eff.add_argument("--source-seed", type=int, default=None)
    p_eff.add_argument("--workers", type=int, default=1)
    _add_query_arguments(p_eff)
    p_eff.set_defaults(func=_cmd_efficiency)

    p_sweep = sub.add_parser("sweep", help="run a config-driven grid and write a CSV")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure after validation
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
