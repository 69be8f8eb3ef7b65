"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data/validation error. Text
reports go to stdout, structured output to paths named by flags, and
diagnostics to stderr. Every scoring run echoes its effective
parameters (plus a config hash and the toolkit version) to stderr and
into the output file header, so results are attributable. Environment
variables are never consulted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from coorank import __version__
from coorank.coordination import CoordParams
from coorank.corpus_io import (
    CLEANING_POLICIES,
    DROP_NO_ANSWER,
    load_corpus,
    load_run,
    load_scores,
    write_corpus,
    write_run,
    write_scores,
)
from coorank.errors import DataError
from coorank.evaluation import (
    diff_runs,
    evaluate,
    render_diff_table,
    render_eval_table,
    render_position_table,
)
from coorank.reranker import RerankConfig, rerank_corpus
from coorank.synth import SynthSpec, generate, write_plant_log
from coorank.textnorm import FilterLists, load_filter_file, normalize
from coorank.tuner import TuneSpec, tune
from coorank.vocab_stats import build_stats, common_words, load_stats, save_stats


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _config_hash(params: dict) -> str:
    canonical = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def _header_lines(command: str, params: dict) -> list[str]:
    lines = [f"coorank {__version__} {command}",
             f"config_hash={_config_hash(params)}"]
    lines += [f"{key}={params[key]}" for key in sorted(params)]
    return lines


def _echo_header(lines: list[str]) -> None:
    for line in lines:
        print(f"# {line}", file=sys.stderr)


def _merge_config(args) -> RerankConfig:
    """Defaults, then config-file values, then explicit flags."""
    merged = RerankConfig().to_mapping()
    if args.config:
        path = Path(args.config)
        try:
            with open(path, encoding="utf-8") as handle:
                from_file = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid config file ({exc.msg})") from None
        if not isinstance(from_file, dict):
            raise DataError(f"{path}: config file must be a JSON object")
        unknown = sorted(set(from_file) - set(merged))
        if unknown:
            raise DataError(f"{path}: unknown config key {unknown[0]!r}")
        merged.update(from_file)
    for key in RerankConfig().to_mapping():
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    try:
        return RerankConfig.from_mapping(merged)
    except (TypeError, ValueError) as exc:
        raise DataError(f"invalid configuration: {exc}") from None


def _base_filters(args) -> FilterLists:
    filters = FilterLists.bundled()
    replacements = {}
    for field in ("stopwords", "interjections", "number_words"):
        path = getattr(args, field, None)
        if path is not None:
            replacements[field] = load_filter_file(path)
    if replacements:
        from dataclasses import replace

        filters = replace(filters, **replacements)
    return filters


def _add_filter_flags(parser) -> None:
    parser.add_argument("--stopwords", metavar="FILE",
                        help="override the bundled stopword list")
    parser.add_argument("--interjections", metavar="FILE",
                        help="override the bundled interjection list")
    parser.add_argument("--number-words", dest="number_words", metavar="FILE",
                        help="override the bundled number-word list")


def _add_config_flags(parser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="JSON config file with reranking parameters")
    parser.add_argument("--w-g", dest="w_g", type=float)
    parser.add_argument("--w-coor", dest="w_coor", type=float)
    parser.add_argument("--k", dest="k", type=float)
    parser.add_argument("--bypass-threshold", dest="bypass_threshold",
                        type=float)
    parser.add_argument("--top-n", dest="top_n", type=int)
    parser.add_argument("--common-cutoff", dest="common_cutoff", type=int)


def _load_clean_corpus(path: str, policy: str, lenient: bool):
    dialogues, report = load_corpus(path, policy=policy, strict=not lenient)
    if report.total_dropped:
        detail = ", ".join(
            f"{reason}={count}" for reason, count in sorted(
                report.dropped.items()
            )
        )
        print(f"# cleaned corpus: kept={report.kept} dropped "
              f"({detail})", file=sys.stderr)
    return dialogues


def _cmd_normalize(args) -> int:
    source = open(args.infile, encoding="utf-8") if args.infile else sys.stdin
    sink = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for line in source:
            print(" ".join(normalize(line)), file=sink)
    finally:
        if args.infile:
            source.close()
        if args.out:
            sink.close()
    return 0


def _load_extra_candidates(path: str) -> dict[str, list[str]]:
    extras: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t", 1)
            if len(parts) != 2:
                raise DataError(
                    f"{path}:{lineno}: expected dialogue_id<TAB>text"
                )
            extras.setdefault(parts[0], []).append(parts[1])
    return extras


def _cmd_build_stats(args) -> int:
    dialogues = _load_clean_corpus(args.corpus, args.policy, args.lenient)
    extras = _load_extra_candidates(args.extra_candidates) \
        if args.extra_candidates else None
    stats = build_stats(dialogues, extras)
    save_stats(stats, args.out)
    print(f"# stats: {len(stats.count_total)} markers, "
          f"{stats.total_tokens} tokens", file=sys.stderr)
    return 0


def _cmd_rerank(args) -> int:
    cfg = _merge_config(args)
    params = dict(cfg.to_mapping(), policy=args.policy)
    header = _header_lines("rerank", params)
    _echo_header(header)

    dialogues = _load_clean_corpus(args.corpus, args.policy, args.lenient)
    scores = load_scores(args.scores, dialogues)
    stats = load_stats(args.stats)
    filters = _base_filters(args).with_common_words(
        common_words(stats, cfg.common_cutoff)
    )
    explain: list | None = [] if args.explain else None
    run = rerank_corpus(dialogues, scores, stats, filters, cfg,
                        explain=explain, threads=args.threads)
    write_run(run, args.out, header_lines=header)
    if args.explain:
        with open(args.explain, "w", encoding="utf-8") as handle:
            for did, cid, marker, value in explain or []:
                handle.write(f"{did}\t{cid}\t{marker}\t{value:.6f}\n")
    return 0


def _parse_ks(raw: str) -> list[int]:
    try:
        ks = [int(part) for part in raw.split(",") if part]
    except ValueError:
        raise UsageError(f"--ks must be comma-separated integers, got {raw!r}")
    if not ks or any(k < 1 for k in ks):
        raise UsageError("--ks must contain positive integers")
    return ks


def _cmd_evaluate(args) -> int:
    ks = _parse_ks(args.ks)
    dialogues = _load_clean_corpus(args.corpus, args.policy, args.lenient)
    run = load_run(args.run)
    report = evaluate(run, dialogues, ks=ks)
    print(render_eval_table([(args.label, report)]), end="")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(report.to_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")
    return 0


def _cmd_analyze(args) -> int:
    cfg = _merge_config(args)
    ks = _parse_ks(args.ks)
    dialogues = _load_clean_corpus(args.corpus, args.policy, args.lenient)
    baseline = load_run(args.baseline)
    reranked = load_run(args.rerank)
    stats = load_stats(args.stats)
    filters = _base_filters(args).with_common_words(
        common_words(stats, cfg.common_cutoff)
    )
    base_report = evaluate(baseline, dialogues, ks=ks)
    rerank_report = evaluate(reranked, dialogues, ks=ks)
    diff = diff_runs(baseline, reranked, dialogues, stats, filters,
                     CoordParams(k=cfg.k))
    labelled = [("baseline", base_report), ("rerank", rerank_report)]
    print(render_eval_table(labelled), end="")
    print()
    print(render_position_table(labelled), end="")
    print()
    print(render_diff_table(diff), end="")
    if args.out:
        payload = {
            "baseline": base_report.to_dict(),
            "rerank": rerank_report.to_dict(),
            "diff": diff.to_dict(),
        }
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
    return 0


def _cmd_tune(args) -> int:
    spec = TuneSpec.from_file(args.grid) if args.grid else TuneSpec()
    dialogues = _load_clean_corpus(args.dev_corpus, args.policy, args.lenient)
    scores = load_scores(args.dev_scores, dialogues)
    stats = load_stats(args.stats)
    filters = _base_filters(args)
    best, trace = tune(dialogues, scores, stats, filters, spec)
    best_point = next(p for p in trace if p.config == best)
    print(f"# tuned {len(trace)} grid points; best dev R@1="
          f"{best_point.r1:.2f} MRR={100 * best_point.mrr:.2f}",
          file=sys.stderr)
    with open(args.out, "w", encoding="utf-8") as handle:
        json.dump(best.to_mapping(), handle, indent=2, sort_keys=True)
        handle.write("\n")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as handle:
            handle.write("# w_g\tw_coor\tk\tbypass_threshold\tcommon_cutoff"
                         "\ttop_n\tr1\tmrr\n")
            for point in trace:
                c = point.config
                handle.write(
                    f"{c.w_g}\t{c.w_coor}\t{c.k}\t{c.bypass_threshold}"
                    f"\t{c.common_cutoff}\t{c.top_n}"
                    f"\t{point.r1:.4f}\t{point.mrr:.6f}\n"
                )
    return 0


def _cmd_synth(args) -> int:
    spec = SynthSpec.from_file(args.spec) if args.spec else SynthSpec()
    if args.seed is not None:
        from dataclasses import replace

        spec = replace(spec, seed=args.seed)
    dialogues, scores, log = generate(spec)
    write_corpus(dialogues, args.out_corpus)
    write_scores(scores, args.out_scores)
    if args.out_log:
        write_plant_log(log, spec, args.out_log)
    print(f"# synthesized {len(dialogues)} dialogues "
          f"({sum(r.planted for r in log)} planted)", file=sys.stderr)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="coorank",
        description="Rerank N-best dialogue response candidates by "
                    "lexical coordination with the context.",
    )
    parser.add_argument("--version", action="version",
                        version=f"coorank {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--policy", choices=CLEANING_POLICIES,
                        default=DROP_NO_ANSWER,
                        help="corpus cleaning policy (default: %(default)s)")
    common.add_argument("--lenient", action="store_true",
                        help="collect malformed records instead of failing")

    p = sub.add_parser("normalize", help="normalize text to marker tokens")
    p.add_argument("--in", dest="infile", metavar="FILE",
                   help="input text file (default: stdin)")
    p.add_argument("--out", metavar="FILE",
                   help="output file (default: stdout)")
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("build-stats", parents=[common],
                       help="build marker statistics from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--extra-candidates", dest="extra_candidates",
                   metavar="FILE",
                   help="TSV dialogue_id<TAB>text with extra response texts")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build_stats)

    p = sub.add_parser("rerank", parents=[common],
                       help="rerank a corpus against first-pass scores")
    p.add_argument("--corpus", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--explain", metavar="FILE",
                   help="write per-candidate contributing markers as TSV")
    p.add_argument("--threads", type=int, default=1)
    _add_config_flags(p)
    _add_filter_flags(p)
    p.set_defaults(func=_cmd_rerank)

    p = sub.add_parser("evaluate", parents=[common],
                       help="score a run against its corpus")
    p.add_argument("--run", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--ks", default="1,10",
                   help="comma-separated recall cutoffs (default: 1,10)")
    p.add_argument("--label", default="run",
                   help="column label in the text report")
    p.add_argument("--out", metavar="FILE", help="write JSON report")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("analyze", parents=[common],
                       help="compare a baseline run against a reranked run")
    p.add_argument("--baseline", required=True)
    p.add_argument("--rerank", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--ks", default="1,10")
    p.add_argument("--out", metavar="FILE", help="write JSON report")
    _add_config_flags(p)
    _add_filter_flags(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("tune", parents=[common],
                       help="grid-search parameters on a dev split")
    p.add_argument("--dev-corpus", dest="dev_corpus", required=True)
    p.add_argument("--dev-scores", dest="dev_scores", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--grid", metavar="FILE",
                   help="JSON grid spec (default: built-in grid)")
    p.add_argument("--out", required=True,
                   help="write the best config as JSON")
    p.add_argument("--trace", metavar="FILE",
                   help="write all grid points as TSV")
    _add_filter_flags(p)
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("synth",
                       help="generate a seeded synthetic corpus")
    p.add_argument("--spec", metavar="FILE", help="JSON generator spec")
    p.add_argument("--seed", type=int, help="override the spec seed")
    p.add_argument("--out-corpus", dest="out_corpus", required=True)
    p.add_argument("--out-scores", dest="out_scores", required=True)
    p.add_argument("--out-log", dest="out_log", metavar="FILE")
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_usage(sys.stderr)
            print("coorank: a subcommand is required (see --help)",
                  file=sys.stderr)
            return 1
        return args.func(args)
    except UsageError as exc:
        print(f"coorank: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"coorank: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
