"""Command-line front door: validate corpora, query, benchmark, serve.

The query subcommand goes through the same QueryState/QuerySpec path as
the HTTP service, so counts printed here always equal total_hits from
the /query endpoint for the same request.
"""

from __future__ import annotations

import argparse
import os
import resource
import shlex
import statistics
import sys
import time

from . import engine, server, tsv
from .deql import LabelFilter, ValueFilter
from .errors import RelSearchError
from .ingest import ManifestEntry, load_manifest, load_manifest_entry
from .model import Dataset
from .service import DatasetRegistry
from .state import QueryState, to_spec


def _add_data_args(p: argparse.ArgumentParser):
    p.add_argument("--manifest", default=None,
                   help="dataset manifest (env RELSEARCH_MANIFEST)")
    p.add_argument("--data-root", default=None,
                   help="base directory for relative manifest paths "
                        "(env RELSEARCH_DATA_ROOT)")


def _add_filter_args(p: argparse.ArgumentParser):
    p.add_argument("--label", default=None, help="DISRPT label filter")
    p.add_argument("--orig-label", default=None,
                   help="original (framework) label filter")
    p.add_argument("--direction", default=None, choices=["1>2", "1<2"])
    p.add_argument("--signal-type", default=None)
    p.add_argument("--signal-subtype", default=None)
    p.add_argument("--any-signal", action="store_true",
                   help="only relations carrying at least one signal")
    p.add_argument("--negate-label", action="store_true")
    p.add_argument("--negate-orig-label", action="store_true")
    p.add_argument("--negate-direction", action="store_true")
    p.add_argument("--negate-signal-type", action="store_true")
    p.add_argument("--negate-signal-subtype", action="store_true")
    p.add_argument("--negate-any-signal", action="store_true",
                   help="only relations with no signals at all")
    p.add_argument("--exact", action="store_true",
                   help="patterns must match a contiguous token run")
    p.add_argument("--include-context", action="store_true",
                   help="operator-free queries also search context tokens")
    p.add_argument("--case-sensitive", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relsearch",
        description="Search and statistics over discourse relation corpora "
                    "in the DISRPT format.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="ingest strictly and report")
    _add_data_args(p_val)
    p_val.add_argument("--rels", default=None, help=".rels file (with --conllu)")
    p_val.add_argument("--conllu", default=None, help=".conllu file")
    p_val.add_argument("--id", default="dataset", help="dataset id for --rels")

    p_query = sub.add_parser("query", help="run a query, print hits")
    _add_data_args(p_query)
    p_query.add_argument("dataset")
    p_query.add_argument("query", nargs="?", default="",
                         help="query text; empty = filters only")
    _add_filter_args(p_query)
    p_query.add_argument("--count-only", action="store_true",
                         help="print the bare hit count")
    p_query.add_argument("--tsv", default=None,
                         help="write the concordance as TSV ('-' = stdout)")
    p_query.add_argument("--limit", type=int, default=20,
                         help="concordance lines to print (0 = all)")

    p_bench = sub.add_parser("bench", help="time queries from a file")
    _add_data_args(p_bench)
    p_bench.add_argument("dataset")
    p_bench.add_argument("queries", help="file with one query per line "
                                         "(flags allowed, # comments)")
    p_bench.add_argument("--repetitions", type=int, default=10)

    p_serve = sub.add_parser("serve", help="start the local HTTP service")
    _add_data_args(p_serve)
    p_serve.add_argument("--port", type=int, default=None,
                         help=f"port (env RELSEARCH_PORT, default "
                              f"{server.DEFAULT_PORT})")
    p_serve.add_argument("--host", default=None,
                         help="bind address (default loopback; set to "
                              "0.0.0.0 to expose)")
    p_serve.add_argument("--static-dir", default=None,
                         help="UI build directory to serve at /")
    return parser


def _manifest_path(args) -> str | None:
    return args.manifest or os.environ.get(server.ENV_MANIFEST)


def _data_root(args) -> str | None:
    return args.data_root or os.environ.get(server.ENV_DATA_ROOT)


def _registry(args) -> DatasetRegistry:
    path = _manifest_path(args)
    if not path:
        raise RelSearchError("no manifest given (--manifest or "
                             f"{server.ENV_MANIFEST})")
    return DatasetRegistry(load_manifest(path, data_root=_data_root(args)))


def args_to_state(args, dataset_id: str, query: str) -> QueryState:
    label = None
    if args.label is not None and args.orig_label is not None:
        raise RelSearchError("--label and --orig-label are exclusive; "
                             "pick one label column")
    if args.label is not None:
        label = LabelFilter(args.label, args.negate_label, "disrpt")
    elif args.orig_label is not None:
        label = LabelFilter(args.orig_label, args.negate_orig_label, "orig")
    any_signal = None
    if args.negate_any_signal:
        any_signal = False
    elif args.any_signal:
        any_signal = True
    return QueryState(
        dataset_id=dataset_id,
        query=query,
        exact=args.exact,
        include_context=args.include_context,
        case_sensitive=args.case_sensitive,
        label=label,
        direction=(ValueFilter(args.direction, args.negate_direction)
                   if args.direction else None),
        signal_type=(ValueFilter(args.signal_type, args.negate_signal_type)
                     if args.signal_type else None),
        signal_subtype=(ValueFilter(args.signal_subtype,
                                    args.negate_signal_subtype)
                        if args.signal_subtype else None),
        any_signal=any_signal,
    )


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args) -> int:
    entries: list[ManifestEntry]
    if args.rels or args.conllu:
        if not (args.rels and args.conllu):
            print("validate: --rels and --conllu go together",
                  file=sys.stderr)
            return 2
        entries = [ManifestEntry(args.id, args.rels, args.conllu, {})]
    else:
        path = _manifest_path(args)
        if not path:
            print("validate: no manifest or file pair given", file=sys.stderr)
            return 2
        entries = load_manifest(path, data_root=_data_root(args))

    failures = 0
    for entry in entries:
        try:
            ds = load_manifest_entry(entry, strict=True)
        except (RelSearchError, OSError) as exc:
            print(f"{entry.dataset_id}: ERROR {exc}", file=sys.stderr)
            failures += 1
            continue
        print(f"{entry.dataset_id}: {len(ds.doc_ids)} documents, "
              f"{ds.sentence_count} sentences, {ds.token_count} tokens, "
              f"{len(ds.relations)} relations"
              + ("" if ds.has_signals else " (no signal column)"))
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# query


def _concordance_line(ds: Dataset, match: engine.Match) -> str:
    """Window text with argument brackets, *match* and {signal} marks."""
    rel = match.relation
    roles = engine.role_map(rel)
    sigs = engine.signal_map(rel)
    positions = sorted(set(roles) | set(sigs))
    hit = set(match.positions)
    toks = ds.tokens[rel.doc_id]
    opens: dict[int, list[str]] = {}
    closes: dict[int, list[str]] = {}
    for name, span in (("1", rel.arg1), ("2", rel.arg2)):
        for a, b in span.ranges:
            opens.setdefault(a, []).append(f"[{name}:")
            closes.setdefault(b, []).insert(0, "]")
    parts: list[str] = []
    prev = None
    for pos in positions:
        if prev is not None and pos != prev + 1:
            parts.append("(...)")
        parts.extend(opens.get(pos, []))
        word = toks[pos].form
        if pos in hit:
            word = f"*{word}*"
        if pos in sigs:
            word = f"{word}{{{sigs[pos].sig_type}}}"
        parts.append(word)
        parts.extend(closes.get(pos, []))
        prev = pos
    return " ".join(parts)


def cmd_query(args) -> int:
    registry = _registry(args)
    loaded = registry.get(args.dataset)
    ds = loaded.dataset
    state = args_to_state(args, args.dataset, args.query)
    spec = to_spec(state, ds.upos_vocab, ds.deprel_vocab)
    t0 = time.perf_counter()
    if args.count_only and not args.tsv:
        n = engine.count(spec, ds)
        print(n)
        return 0
    matches = engine.evaluate(spec, ds)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    if args.tsv:
        text = tsv.concordance_tsv(matches, ds)
        if args.tsv == "-":
            sys.stdout.write(text)
        else:
            with open(args.tsv, "w", encoding="utf-8") as fh:
                fh.write(text)
    if args.count_only:
        print(len(matches))
        return 0
    print(f"{len(matches)} hits in {elapsed_ms:.1f} ms "
          f"({ds.dataset_id}, load {loaded.load_seconds:.3f}s)")
    shown = matches if args.limit == 0 else matches[:args.limit]
    for m in shown:
        rel = m.relation
        print(f"{rel.rel_id}\t{rel.disrpt_label}\t{rel.direction.label}"
              f"\t{rel.doc_id}")
        print(f"  {_concordance_line(ds, m)}")
    if len(shown) < len(matches):
        print(f"... {len(matches) - len(shown)} more (use --limit 0 or --tsv)")
    return 0


# ---------------------------------------------------------------------------
# bench


def _bench_line_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bench-line", add_help=False)
    _add_filter_args(p)
    p.add_argument("pattern", nargs="*")
    return p


def _peak_rss_kb() -> int:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss


def cmd_bench(args) -> int:
    with open(args.queries, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]

    rss_before = _peak_rss_kb()
    registry = _registry(args)
    loaded = registry.get(args.dataset)
    ds = loaded.dataset
    print(f"load: {loaded.load_seconds:.3f}s  "
          f"({ds.token_count} tokens, {len(ds.relations)} relations, "
          f"{len(ds.doc_ids)} documents)")

    line_parser = _bench_line_parser()
    reps = max(1, args.repetitions)
    failures = 0
    for line in lines:
        try:
            line_args = line_parser.parse_args(shlex.split(line))
            query_text = " ".join(line_args.pattern)
            state = args_to_state(line_args, args.dataset, query_text)
            spec = to_spec(state, ds.upos_vocab, ds.deprel_vocab)
            hits = engine.count(spec, ds)
            times = []
            for _ in range(reps):
                t0 = time.perf_counter()
                engine.count(spec, ds)
                times.append((time.perf_counter() - t0) * 1000.0)
            print(f"{statistics.median(times):9.3f} ms  {hits:8d} hits  "
                  f"{line}")
        except (RelSearchError, SystemExit) as exc:
            failures += 1
            print(f"    error  {line}  ({exc})", file=sys.stderr)
    delta_mb = (_peak_rss_kb() - rss_before) / 1024.0
    print(f"peak memory delta: {delta_mb:.1f} MiB "
          f"(median of {reps} repetitions per query)")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# serve


def cmd_serve(args) -> int:
    path = _manifest_path(args)
    if not path:
        print("serve: no manifest given", file=sys.stderr)
        return 2
    server.serve(path, host=args.host, port=args.port,
                 data_root=_data_root(args), static_dir=args.static_dir)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "query":
            return cmd_query(args)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "serve":
            return cmd_serve(args)
    except RelSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
