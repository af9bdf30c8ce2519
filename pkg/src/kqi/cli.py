"""``kqi`` command-line entry point.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
import tomli

from . import analysis, engine, graph, simulate, vein
from .errors import KQIError

DEFAULT_SEED = 7


class UsageError(Exception):
    pass


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {path}")
    return p


def _fraction(text: str) -> float:
    x = float(text)
    if not 0 < x <= 1:
        raise argparse.ArgumentTypeError("expected a number in (0, 1]")
    return x


def _emit(text: str, out) -> None:
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _prepare(args):
    """Load, optionally snapshot, augment and decay; returns ``(graph, kqi_table)``."""
    g = graph.load_graph(args.edges, getattr(args, "nodes", None))
    if args.year is not None:
        g = graph.snapshot_at(g, graph.SnapshotSpec(args.year))
    g = graph.augment_super_root(g, root_in_weight=not args.exclude_root_weight)
    if args.decay:
        real = g.real_nodes()
        ref = args.year
        if ref is None:
            graph.require_years(g)
            ref = int(np.max(g.years[real])) if len(real) else 0
        g = graph.apply_decay(g, graph.DecaySpec(args.decay, ref))
    return g, engine.kqi_all(g, engine.compute_volumes(g))


def cmd_kqi(args) -> None:
    _, kt = _prepare(args)
    _emit(kt.to_json() if args.format == "json" else kt.to_csv(), args.out)


def cmd_rank(args) -> None:
    g, kt = _prepare(args)
    agg = engine.aggregate_kqi(g, kt, args.by, first_author=args.first_author)
    if args.format == "json":
        rows = agg.ranked()[: args.top] if args.top else agg.ranked()
        text = json.dumps(
            {"kind": agg.kind, "skipped": agg.skipped,
             "rows": [{"key": k, "kqi_sum": s, "paper_count": c} for k, s, c in rows]},
            indent=1,
        )
    else:
        text = agg.to_csv(top=args.top)
    _emit(text, args.out)


def cmd_vein(args) -> None:
    g, kt = _prepare(args)
    if args.select_file is not None:
        ids = [
            line.strip() for line in args.select_file.read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
        cfg = vein.VeinConfig(ids=ids, max_depth=args.max_depth, complete_level=args.complete_level)
    else:
        cfg = vein.VeinConfig(
            top_fraction=args.select_top, max_depth=args.max_depth, complete_level=args.complete_level
        )
    v = vein.extract_vein(g, kt, cfg)
    labels = None
    if args.label_kqi:
        labels = {n: f"{n}\\nKQI={kt[n]:.4g}" for n in v.nodes}
    _emit(vein.export_dot(v, labels), args.dot)
    if args.csv is not None:
        _emit(v.to_csv(), args.csv)
    print(f"covered_kqi_share={v.covered_kqi_share:.6f}", file=sys.stderr)


def cmd_growth(args) -> None:
    g = graph.load_graph(args.edges, args.nodes)
    graph.require_years(g)
    years = g.years[g.real_nodes()]
    start = args.start if args.start is not None else int(years.min())
    end = args.end if args.end is not None else int(years.max())
    decay = graph.DecaySpec(args.decay, end) if args.decay else None
    series = analysis.growth_series(g, range(start, end + 1), decay, workers=args.threads)
    report = analysis.detect_boom(
        series, rss_critical=args.rss_critical, scale=args.scale, increments=args.increments
    )
    payload = {
        "series": json.loads(series.to_json()),
        "boom": json.loads(report.to_json()),
    }
    _emit(json.dumps(payload, indent=1) + "\n", args.out)
    if args.csv is not None:
        _emit(series.to_csv(), args.csv)


def _schedule(args) -> simulate.ArrivalSchedule:
    m, n, T = args.m, args.size, args.steps
    if args.schedule == "standard":
        initial = args.initial if args.initial is not None else max(1.0, n / 100)
        return simulate.ArrivalSchedule.standard_sized(m, n, T, initial)
    if args.schedule == "power":
        p = m + 2
        return simulate.ArrivalSchedule.power(n / math.fsum(t**p for t in range(1, T + 1)), p)
    if args.schedule == "exponential":
        return simulate.ArrivalSchedule.exponential(
            n / math.fsum(math.exp(0.5 * t) for t in range(1, T + 1)), 0.5
        )
    if args.schedule == "constant":
        return simulate.ArrivalSchedule.constant(n / T)
    if args.schedule == "inverse":
        return simulate.ArrivalSchedule.inverse(n / math.fsum(1 / t for t in range(1, T + 1)))
    raise UsageError(f"unknown schedule {args.schedule!r}")


def cmd_simulate(args) -> None:
    cfg = simulate.BaConfig(args.m, _schedule(args), args.seed, args.steps, args.kernel)
    g = simulate.generate_ba(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    graph.write_graph(g, out / "edges.tsv", out / "nodes.tsv")
    ts, totals = simulate.total_kqi_series(g, cfg.steps)
    lines = ["step,n,total_kqi"]
    counts = np.cumsum(cfg.schedule.counts(cfg.steps))
    lines += [f"{t},{c},{k!r}" for t, c, k in zip(ts.tolist(), counts.tolist(), totals.tolist())]
    (out / "growth.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    summary = {
        "m": args.m, "schedule": args.schedule, "steps": args.steps, "seed": args.seed,
        "kernel": args.kernel, "n_nodes": g.n_nodes, "n_edges": g.n_edges,
    }
    if cfg.steps >= 3:
        fit = analysis.fit_linear(ts, totals)
        summary["fit"] = {"slope": fit.slope, "intercept": fit.intercept, "rss": fit.rss, "r2": fit.r2}
        summary["quadratic_coefficient"] = analysis.quadratic_coefficient(ts, totals)
    (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n", encoding="utf-8")


def cmd_percolate(args) -> None:
    g = graph.load_graph(args.edges, args.nodes)
    frac, rounds = simulate.bootstrap_percolation(
        g, simulate.ActivationConfig(args.a, args.seed_fraction, args.seed)
    )
    payload = {
        "active_fraction": frac, "rounds": rounds, "a": args.a,
        "seed_fraction": args.seed_fraction, "seed": args.seed, "n": g.n_nodes,
    }
    _emit(json.dumps(payload, indent=1) + "\n", args.out)


def cmd_compare(args) -> None:
    g, kt = _prepare(args)
    scores = kt.as_dict()
    payload = {"n": len(scores)}
    if len(scores) >= 3:
        pr = analysis.pagerank(g, damping=args.damping)
        payload["spearman"] = analysis.rank_correlation(scores, pr)
        payload["spearman_citations"] = analysis.rank_correlation(
            scores, analysis.citation_counts(g)
        )
    else:
        payload["spearman"] = 0.0
    if "author" in g.groups:
        agg = engine.aggregate_kqi(g, kt, "author")
        h = analysis.group_h_index(g, "author")
        sums = {k: s for k, (s, _) in agg.scores.items()}
        if len(sums) >= 3:
            payload["spearman_author_h_index"] = analysis.rank_correlation(sums, h)
    _emit(json.dumps(payload, indent=1) + "\n", args.out)


def _graph_args(p, nodes_required=False):
    p.add_argument("edges", type=_existing, help="edge file: citing<TAB>cited[<TAB>weight]")
    if nodes_required:
        p.add_argument("nodes", type=_existing, help="node file: id<TAB>year<TAB>kind=keys...")
    else:
        p.add_argument("--nodes", type=_existing, help="node file: id<TAB>year<TAB>kind=keys...")


def _kqi_args(p):
    p.add_argument("--decay", type=float, default=0.0, help="citation ageing rate lambda")
    p.add_argument("--year", type=int, help="snapshot cutoff and decay reference year")
    p.add_argument("--exclude-root-weight", action="store_true",
                   help="leave super-root edges out of W")
    p.add_argument("--out", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kqi", description="Knowledge quantification on citation DAGs.")
    parser.add_argument("--config", type=_existing, help="TOML file with option defaults")
    parser.add_argument("--threads", type=int, default=int(os.environ.get("KQI_THREADS", "1")))
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = sub.choices

    p = sub.add_parser("kqi", help="per-paper KQI table")
    _graph_args(p)
    _kqi_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_kqi)

    p = sub.add_parser("rank", help="aggregate KQI by author, affiliation, country or discipline")
    _graph_args(p, nodes_required=True)
    _kqi_args(p)
    p.add_argument("--by", choices=graph.GROUP_KINDS, default="author")
    p.add_argument("--first-author", action="store_true", help="credit only the first key per paper")
    p.add_argument("--top", type=int, help="keep the first N rows")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("vein", help="extract a knowledge vein as DOT")
    _graph_args(p)
    _kqi_args(p)
    sel = p.add_mutually_exclusive_group(required=True)
    sel.add_argument("--select-top", type=_fraction, help="top fraction of papers by KQI")
    sel.add_argument("--select-file", type=_existing, help="file listing one paper id per line")
    p.add_argument("--max-depth", type=int, default=vein.DEFAULT_MAX_DEPTH)
    p.add_argument("--complete-level", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--label-kqi", action="store_true", help="label nodes with their KQI")
    p.add_argument("--dot", help="DOT output path (default stdout)")
    p.add_argument("--csv", help="also write the edge list as CSV")
    p.set_defaults(func=cmd_vein)

    p = sub.add_parser("growth", help="yearly total KQI with boom detection")
    _graph_args(p, nodes_required=True)
    p.add_argument("--start", type=int)
    p.add_argument("--end", type=int)
    p.add_argument("--decay", type=float, default=0.0)
    p.add_argument("--rss-critical", type=float, default=9.0)
    p.add_argument("--scale", choices=("minmax100", "none"), default="minmax100")
    p.add_argument("--increments", action="store_true", help="fit yearly increments, not totals")
    p.add_argument("--out", help="JSON output path (default stdout)")
    p.add_argument("--csv", help="also write year,total_kqi,n,m as CSV")
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("simulate", help="grow a preferential-attachment citation network")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--schedule", choices=("standard", "power", "exponential", "constant", "inverse"),
                   default="standard")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--size", type=int, default=10_000, help="approximate final paper count")
    p.add_argument("--initial", type=float, help="papers at step 1 (standard schedule)")
    p.add_argument("--kernel", choices=("total", "in"), default="total")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("percolate", help="bootstrap percolation on a citation graph")
    _graph_args(p)
    p.add_argument("--a", type=int, default=1, help="active neighbours needed to activate")
    p.add_argument("--seed-fraction", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_percolate)

    p = sub.add_parser("compare", help="rank correlation of KQI with PageRank and citations")
    _graph_args(p)
    _kqi_args(p)
    p.add_argument("--damping", type=float, default=0.85)
    p.set_defaults(func=cmd_compare)
    return parser


def _apply_config(parser, argv) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    try:
        data = tomli.loads(args.config.read_text(encoding="utf-8"))
    except tomli.TOMLDecodeError as exc:
        parser.error(f"bad config file: {exc}")
    sub = parser.subcommands[args.command]
    # top-level keys and a table named after the subcommand both apply
    values = {k: v for k, v in data.items() if not isinstance(v, dict)}
    values.update(data.get(args.command, {}))
    known = {a.dest for a in sub._actions if a.option_strings} - {"help"} | {"threads"}
    for key in values:
        dest = key.replace("-", "_")
        if dest not in known:
            parser.error(f"unknown config key {key!r} for command {args.command!r}")
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in values.items()})
    if "threads" in values:
        parser.set_defaults(threads=values["threads"])
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"kqi: usage error: {exc}", file=sys.stderr)
        return 2
    except (KQIError, ValueError, KeyError, OSError) as exc:
        print(f"kqi: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
