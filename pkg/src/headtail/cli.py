"""Command-line front end.

Exit status is 0 on success, 1 on a usage or parameter error and 2 when an
input cannot be read or parsed.  Reports are JSON with sorted keys; wall time
is left out unless ``--timing`` is given, so repeated invocations write
identical bytes.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
import time
import warnings

from . import __version__
from .baselines import head_sample, hh_to_tail_ccdh, hybrid_estimate, make_summary, scale_head_sample
from .experiments import (
    SweepSpec,
    exact_ccdh,
    ordering_study,
    step_plot_rows,
    summarize_cells,
    sweep,
    write_lines_tsv,
    write_profile_tsv,
    write_records_csv,
    write_scatter_tsv,
)
from .histogram import Ccdh, CcdhParseError, TrivialHistogramError, read_ccdh_tsv, write_ccdh_tsv
from .rh import ks_statistic, rh_distance
from .sketch import TAIL_READS, EstimateConfig, HeadTailSketch
from .stream import EdgeListParseError, SyntheticSpec, generate, parse_edgelist, reorder, write_edgelist
from .tgmath import ROUNDING

ORDER_NAMES = {
    "asis": "as_is",
    "random": "random",
    "deg-desc": "edgelist_degree_desc",
    "deg-asc": "edgelist_degree_asc",
    "node-random": "edgelist_random",
}

DESK_PH = (0.005, 0.01, 0.025, 0.05, 0.1)
DESK_PT = (0.01, 0.04, 0.08)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- io helpers ---------------------------------------------------------------

@contextlib.contextmanager
def _text_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


@contextlib.contextmanager
def _bytes_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout.buffer
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            yield fh


def _read_ccdh(path) -> Ccdh:
    with open(path, encoding="utf-8") as fh:
        return read_ccdh_tsv(fh)


def _write_json(obj, path) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    with _text_out(path) as fh:
        fh.write(text)


def _probs(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


# -- commands -----------------------------------------------------------------

def cmd_headtail_run(args) -> dict:
    stream = parse_edgelist(args.input)
    config = EstimateConfig(args.threshold_constant, args.clamp, args.rounding, args.tail_read)
    t0 = time.perf_counter()
    sk = HeadTailSketch(p_h=args.ph, p_t=args.pt, seed=args.seed,
                        threshold_constant=args.threshold_constant, rounding=args.rounding,
                        tail_read=args.tail_read).fit(stream)
    res = sk.estimate(config)
    wall = (time.perf_counter() - t0) * 1000.0
    hs, ts = sk.storage()
    report = {
        "ph": args.ph, "pt": args.pt, "seed": args.seed, "edges": sk.n_edges_,
        "d_thr": res.d_thr, "head_size": hs, "tail_size": ts, "storage": hs + ts,
    }
    truth = None
    if args.truth:
        truth = _read_ccdh(args.truth)
    elif args.exact:
        truth = exact_ccdh(stream)
    if truth is not None:
        report["rh_distance"] = rh_distance(res.nhat, truth, args.tolerance).distance
        report["ks"] = ks_statistic(res.nhat, truth)
    if args.timing:
        report["wall_time_ms"] = wall
    with _text_out(args.output) as fh:
        write_ccdh_tsv(res.nhat, fh)
    if args.report:
        _write_json(report, args.report)
    _say(args, f"d_thr={res.d_thr} |S_h|={hs} |S_t|={ts}"
         + (f" rh={report['rh_distance']:.4f}" if truth is not None else ""))
    return report


def cmd_headtail_sweep(args) -> dict:
    if args.ph_grid or args.pt_grid:
        spec = SweepSpec(args.ph_grid or list(DESK_PH), args.pt_grid or list(DESK_PT),
                         args.runs, args.seed)
    elif args.preset == "desk":
        spec = SweepSpec(DESK_PH, DESK_PT, args.runs, args.seed)
    else:
        spec = SweepSpec.full_preset(args.seed)
    stream = parse_edgelist(args.input).materialize()
    truth = _read_ccdh(args.truth) if args.truth else exact_ccdh(stream)
    config = EstimateConfig(args.threshold_constant)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        records = sweep(stream, spec, config, truth, args.tolerance, args.workers)
    with _text_out(args.out_csv) as fh:
        write_records_csv(records, fh, timing=args.timing)
    if args.scatter:
        with _text_out(args.scatter) as fh:
            write_scatter_tsv(records, fh)
    if args.lines:
        with _text_out(args.lines) as fh:
            write_lines_tsv(records, fh)
    cells = summarize_cells(records)
    _say(args, f"{len(records)} runs over {len(cells)} cells")
    return {"runs": len(records), "cells": cells}


def cmd_rh_compare(args) -> dict:
    a, b = _read_ccdh(args.a), _read_ccdh(args.b)
    rep = rh_distance(a, b, args.tolerance, args.profile_eps)
    report = {"distance": rep.distance, "tolerance": args.tolerance,
              "ks": ks_statistic(a, b) if args.ks else None, "profile_path": None}
    if args.profile_eps is not None:
        with _text_out(args.profile_out) as fh:
            fh.write("degree\tdelta\n")
            for d, x in rep.delta_profile.items():
                fh.write(f"{d}\t{x!r}\n")
        report["profile_path"] = args.profile_out
    _write_json(report, None)
    return report


def cmd_baseline_run(args) -> dict:
    stream = parse_edgelist(args.input)
    if args.kind == "head":
        if args.ph is None:
            raise ValueError("--kind head needs --ph")
        sample = head_sample(stream, args.ph, args.seed)
        est = scale_head_sample(sample, args.ph)
        report = {"kind": "head", "ph": args.ph, "seed": args.seed, "storage": len(sample)}
    else:
        if args.capacity is None:
            raise ValueError(f"--kind {args.kind} needs --capacity")
        summary = make_summary(args.kind, args.capacity).fit(stream)
        est = hh_to_tail_ccdh(summary)
        report = {"kind": summary.kind, "capacity": args.capacity, "storage": summary.storage(),
                  "peak_entries": summary.peak_entries_, "items": summary.items_processed_}
    with _text_out(args.output) as fh:
        write_ccdh_tsv(est, fh)
    _say(args, f"{report['kind']}: storage={report['storage']}")
    return report


def cmd_baseline_hybrid(args) -> dict:
    head, tail, truth = _read_ccdh(args.head), _read_ccdh(args.tail), _read_ccdh(args.truth)
    hy = hybrid_estimate(head, tail, truth, args.tolerance)
    with _text_out(args.output) as fh:
        write_ccdh_tsv(hy.nhat, fh)
    _say(args, f"d_thr={hy.d_thr} rh={hy.rh:.4f}")
    return {"d_thr": hy.d_thr, "rh_distance": hy.rh}


def cmd_stream_gen(args) -> dict:
    spec = SyntheticSpec(args.family, n=args.n, edges=args.edges, exponent=args.exponent,
                         avg_degree=args.avg_degree, seed=args.seed)
    stream = generate(spec)
    with _bytes_out(args.out) as fh:
        write_edgelist(stream, fh)
    return {"family": args.family, "edges": len(stream), "seed": args.seed}


def cmd_stream_reorder(args) -> dict:
    ordering = ORDER_NAMES[args.order]
    stream = reorder(parse_edgelist(args.input), ordering, args.seed)
    with _bytes_out(args.out) as fh:
        write_edgelist(stream, fh)
    return {"ordering": ordering, "edges": len(stream), "seed": args.seed}


def cmd_profile(args) -> dict:
    est, truth = _read_ccdh(args.estimate), _read_ccdh(args.truth)
    with _text_out(args.output) as fh:
        prof = write_profile_tsv(est, truth, fh, args.eps)
    peak = max(prof, key=prof.get)
    return {"eps": args.eps, "max_delta": prof[peak], "argmax_degree": peak}


def cmd_ordering_study(args) -> dict:
    stream = parse_edgelist(args.input)
    truth = _read_ccdh(args.truth) if args.truth else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        study = ordering_study(stream, args.ph, args.pt, args.seed, args.order_seed,
                               EstimateConfig(args.threshold_constant), truth, args.tolerance)
    with _text_out(args.output) as fh:
        fh.write("ordering\trh_distance\tstorage\n")
        for name, rh, s in study.rows:
            fh.write(f"{name}\t{rh!r}\t{s}\n")
    _say(args, f"mean={study.mean:.4f} std={study.std:.4f} head_invariant={study.head_invariant}")
    return study.to_dict()


def cmd_step_plot(args) -> dict:
    rows = step_plot_rows(args.k, args.pt, args.x_min, args.x_max, args.points)
    with _text_out(args.output) as fh:
        fh.write("x\tvalue" + ("\texact" if args.pt is not None else "") + "\n")
        for row in rows:
            fh.write("\t".join(repr(v) for v in row) + "\n")
    return {"k": args.k, "pt": args.pt, "points": len(rows)}


# -- parser -------------------------------------------------------------------

def _globals(p, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=d if suppress else 0, help="random seed (default 0)")
    p.add_argument("--quiet", action="store_true", default=d if suppress else False,
                   help="no progress messages or warnings on stderr")
    p.add_argument("--json-report", metavar="PATH", default=d, help="write a JSON summary here")


def _estimate_flags(p) -> None:
    p.add_argument("--threshold-constant", type=float, default=50.0)
    p.add_argument("--tolerance", type=float, default=1e-4, help="RH bisection tolerance")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    _globals(common, suppress=True)

    root = _Parser(prog="degdist", description="Streaming degree-distribution estimation.")
    root.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _globals(root, suppress=False)
    top = root.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def leaf(sub, name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    # headtail
    ht = top.add_parser("headtail", help="run the head/tail sketch").add_subparsers(
        dest="action", required=True, metavar="ACTION")
    p = leaf(ht, "run", cmd_headtail_run, "one pass over an edge list")
    p.add_argument("--input", required=True, help="edge list path, '-' for standard input")
    p.add_argument("--ph", type=float, default=0.01)
    p.add_argument("--pt", type=float, default=0.04)
    _estimate_flags(p)
    p.add_argument("--rounding", choices=ROUNDING, default="ceil")
    p.add_argument("--tail-read", choices=TAIL_READS, default="shift")
    p.add_argument("--clamp", action="store_true", help="force the estimate to be non-increasing")
    p.add_argument("--output", help="ccdh TSV (default standard output)")
    p.add_argument("--report", help="JSON run report")
    p.add_argument("--truth", help="truth ccdh TSV; adds RH and KS to the report")
    p.add_argument("--exact", action="store_true",
                   help="compute the truth in a second pass over the input")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")

    p = leaf(ht, "sweep", cmd_headtail_sweep, "grid of (p_h, p_t) runs")
    p.add_argument("--input", required=True)
    p.add_argument("--preset", choices=("full", "desk"), default="full")
    p.add_argument("--ph-grid", type=_probs)
    p.add_argument("--pt-grid", type=_probs)
    p.add_argument("--runs", type=int, default=5)
    _estimate_flags(p)
    p.add_argument("--truth", help="truth ccdh TSV (default: computed from the input)")
    p.add_argument("--out-csv", help="per-run records (default standard output)")
    p.add_argument("--scatter", help="(storage, RH) TSV")
    p.add_argument("--lines", help="per-cell median TSV")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true")

    # rh
    rh = top.add_parser("rh", help="distances between ccdhs").add_subparsers(
        dest="action", required=True, metavar="ACTION")
    p = leaf(rh, "compare", cmd_rh_compare, "RH distance of two ccdh TSVs")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--profile-eps", type=float)
    p.add_argument("--profile-out", default="delta_profile.tsv")
    p.add_argument("--ks", action="store_true", help="also report the KS statistic")

    # baseline
    bl = top.add_parser("baseline", help="heavy-hitter and head-only baselines").add_subparsers(
        dest="action", required=True, metavar="ACTION")
    p = leaf(bl, "run", cmd_baseline_run, "one baseline pass")
    p.add_argument("--kind", required=True, choices=("frequent", "lossy", "spacesaving", "head"))
    p.add_argument("--capacity", type=int)
    p.add_argument("--ph", type=float)
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p = leaf(bl, "hybrid", cmd_baseline_hybrid, "best splice of a head and a tail estimate")
    p.add_argument("--head", required=True)
    p.add_argument("--tail", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--output")
    p.add_argument("--tolerance", type=float, default=1e-4)

    # stream
    st = top.add_parser("stream", help="generate and reorder edge lists").add_subparsers(
        dest="action", required=True, metavar="ACTION")
    p = leaf(st, "gen", cmd_stream_gen, "synthetic edge list")
    p.add_argument("--family", required=True, choices=("clique", "star", "matching", "chung_lu"))
    p.add_argument("--n", type=int)
    p.add_argument("--edges", type=int)
    p.add_argument("--exponent", type=float, default=2.5)
    p.add_argument("--avg-degree", type=float, default=20.0)
    p.add_argument("--out")
    p = leaf(st, "reorder", cmd_stream_reorder, "permute an edge list")
    p.add_argument("--order", required=True, choices=tuple(ORDER_NAMES))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")

    p = leaf(top, "profile", cmd_profile, "per-degree delta profile")
    p.add_argument("--estimate", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--output")

    p = leaf(top, "ordering-study", cmd_ordering_study, "RH under six stream orderings")
    p.add_argument("--input", required=True)
    p.add_argument("--ph", type=float, default=0.01)
    p.add_argument("--pt", type=float, default=0.04)
    p.add_argument("--order-seed", type=int, default=0)
    _estimate_flags(p)
    p.add_argument("--truth")
    p.add_argument("--output")

    p = leaf(top, "step-plot", cmd_step_plot, "tail-cdf step curve data")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--pt", type=float)
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--output")
    return root


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            if args.quiet:
                warnings.simplefilter("ignore")
            report = args.func(args)
    except (EdgeListParseError, CcdhParseError, TrivialHistogramError, OSError) as exc:
        print(f"degdist: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"degdist: error: {exc}", file=sys.stderr)
        return 1
    if args.json_report:
        _write_json(report, args.json_report)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
