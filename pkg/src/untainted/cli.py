"""Command-line entry point: ``untainted <subcommand> ...``."""
from __future__ import annotations

import argparse
import io
import sys
import time

import numba
import numpy as np

from . import __version__
from .channels import CLAMP, SNR_MODES
from .graph import degree_histogram, read_alist
from .puncturing import (
    RNG_NAME,
    default_threads,
    random_puncture,
    read_pattern,
    untainted_puncture,
    write_pattern,
)
from .recovery import bec_tree_erasure, build_recovery_tree, classify_recovery
from .sim import ExperimentConfig, apply_overrides, fer_csv, parse_config, run_fer, table1_stats


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"usage: {message}")


def _metadata(command: str, **extra) -> str:
    items = {
        "tool": f"untainted {__version__}",
        "numpy": np.__version__,
        "numba": numba.__version__,
        "rng": RNG_NAME,
        "command": command,
        "llr_sign": "positive favors 0",
        "tie_decision": "llr<=0 -> bit 1",
        "clamp": repr(CLAMP),
    }
    items.update({k: str(v) for k, v in extra.items()})
    return "".join(f"# {k}: {v}\n" for k, v in items.items())


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads(args) -> int:
    return args.threads if args.threads is not None else default_threads()


def cmd_info(args) -> int:
    g = read_alist(args.graph)
    sdeg = degree_histogram([len(a) for a in g.symbol_adj])
    cdeg = degree_histogram([len(a) for a in g.check_adj])
    buf = io.StringIO()
    buf.write(_metadata("info", graph=args.graph))
    buf.write("key,value\n")
    buf.write(f"n,{g.n}\nm,{g.m}\nedges,{g.num_edges}\ndesign_rate,{g.design_rate:.6f}\n")
    for d, cnt in sdeg.items():
        buf.write(f"symbol_degree_{d},{cnt}\n")
    for d, cnt in cdeg.items():
        buf.write(f"check_degree_{d},{cnt}\n")
    _emit(buf.getvalue(), args.output)
    return 0


def cmd_puncture(args) -> int:
    g = read_alist(args.graph)
    if args.criterion == "random":
        if args.max_p is None:
            raise CliError("random criterion needs --max-p (the number of punctured symbols)")
        pat = random_puncture(g, args.max_p, args.seed)
    else:
        pat = untainted_puncture(g, args.seed, args.max_p, args.criterion)
    meta = _metadata("puncture", graph=args.graph, seed=args.seed, criterion=pat.criterion, p=pat.p)
    if args.output:
        write_pattern(pat, args.output)
        sys.stdout.write(meta)
    else:
        sys.stdout.write(meta + pat.dumps())
    return 0


def _load_pair(args):
    g = read_alist(args.graph)
    pat = read_pattern(args.pattern)
    if pat.n != g.n:
        raise CliError(f"pattern is for n={pat.n}, graph has n={g.n}")
    return g, pat


def cmd_classify(args) -> int:
    g, pat = _load_pair(args)
    cls = classify_recovery(g, pat, args.max_steps)
    buf = io.StringIO()
    buf.write(_metadata("classify", graph=args.graph, pattern=args.pattern, max_steps=args.max_steps))
    buf.write("symbol,step\n")
    for v in sorted(pat.order):
        buf.write(f"{v},{int(cls.step[v])}\n")
    _emit(buf.getvalue(), args.output)
    return 0


def _tree_for(g, pat, v, max_steps):
    cls = classify_recovery(g, pat, max_steps)
    if v not in pat.order:
        raise CliError(f"symbol {v} is not punctured")
    if cls.step[v] < 1:
        raise CliError(f"symbol {v} is unrecoverable")
    return build_recovery_tree(g, cls, v), cls


def cmd_tree(args) -> int:
    g, pat = _load_pair(args)
    tree, cls = _tree_for(g, pat, args.symbol, args.max_steps)
    meta = _metadata("tree", graph=args.graph, pattern=args.pattern, symbol=args.symbol,
                     step=int(cls.step[args.symbol]), nodes=tree.size,
                     locally_tree_like=tree.locally_tree_like)
    _emit(meta + tree.dump(args.format), args.output)
    return 0


def cmd_bec_tree(args) -> int:
    g, pat = _load_pair(args)
    alphas = [float(a) for a in args.alpha.split(",") if a.strip()]
    cls = classify_recovery(g, pat, args.max_steps)
    symbols = [args.symbol] if args.symbol is not None else sorted(pat.order)
    buf = io.StringIO()
    buf.write(_metadata("bec-tree", graph=args.graph, pattern=args.pattern, alphas=args.alpha))
    buf.write("symbol,step,alpha,eps_root,pe,locally_tree_like\n")
    for v in symbols:
        if v not in pat.order:
            raise CliError(f"symbol {v} is not punctured")
        if cls.step[v] < 1:
            for a in alphas:
                buf.write(f"{v},-1,{a:g},,,\n")
            continue
        tree = build_recovery_tree(g, cls, v)
        for a in alphas:
            eps, pe = bec_tree_erasure(tree, a)
            buf.write(f"{v},{int(cls.step[v])},{a:g},{eps:.12e},{pe:.12e},{int(tree.locally_tree_like)}\n")
    _emit(buf.getvalue(), args.output)
    return 0


def cmd_fer(args) -> int:
    cfg = ExperimentConfig()
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config(fh.read(), cfg)
    apply_overrides(cfg, {
        "graph": args.graph,
        "pattern": args.pattern,
        "pi": args.pi,
        "channels": args.channels,
        "seeds": args.seeds,
        "max_iter": args.max_iter,
        "early_stop": False if args.no_early_stop else None,
        "clamp": args.clamp,
        "min_errors": args.min_errors,
        "max_frames": args.max_frames,
        "block": args.block,
        "snr_mode": args.snr_mode,
        "timing": True if args.timing else None,
    })
    if not cfg.graph:
        raise CliError("no graph given (config key 'graph' or --graph)")
    t0 = time.perf_counter()
    run = run_fer(cfg, threads=_threads(args))
    meta = _metadata(
        "fer",
        graph=cfg.graph,
        pattern=cfg.pattern,
        pi=cfg.pi,
        seeds=" ".join(map(str, cfg.seeds)),
        p_per_seed=" ".join(f"{s}:{run.patterns[s].p}" for s in cfg.seeds),
        channels=" ".join(cfg.channels),
        max_iter=cfg.max_iter,
        early_stop=cfg.early_stop,
        stop_rule=f"{cfg.min_errors} frame errors or {cfg.max_frames} frames, checked every {cfg.block}",
        frame_error="any bit differs from the all-zero word",
        snr_convention=cfg.snr_mode,
        frame_streams="(seed, point index, block index)",
        clamp=repr(cfg.clamp),
    )
    body = meta + fer_csv(run)
    if cfg.timing:
        body += f"# wall_seconds: {time.perf_counter() - t0:.3f}\n"
    _emit(body, args.output)
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(meta + fer_csv(run, summary=True))
    return 0


def cmd_pstats(args) -> int:
    graphs = [(path, read_alist(path)) for path in args.graphs]
    rows = table1_stats(graphs, args.runs, args.base_seed, args.criterion, _threads(args))
    buf = io.StringIO()
    buf.write(_metadata("pstats", runs=args.runs, base_seed=args.base_seed, criterion=args.criterion,
                        run_seeds="base_seed + run index"))
    buf.write("code,p_min,p_max\n")
    for r in rows:
        buf.write(f"{r.code},{r.p_min},{r.p_max}\n")
    if args.histogram:
        buf.write("code,p,count\n")
        for r in rows:
            for p, cnt in r.stats.histogram.items():
                buf.write(f"{r.code},{p},{cnt}\n")
    _emit(buf.getvalue(), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: $UNTAINTED_THREADS or CPU count)")
    common.add_argument("-o", "--output", help="write CSV/text here instead of stdout")

    p = _Parser(prog="untainted", description="Untainted puncturing of LDPC codes.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("info", parents=[common], help="graph size and degree histograms")
    s.add_argument("graph")
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("puncture", parents=[common], help="generate a puncturing pattern")
    s.add_argument("graph")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-p", type=int, default=None)
    s.add_argument("--criterion", choices=["full-N2", "lowest-degree", "random"], default="full-N2")
    s.set_defaults(func=cmd_puncture)

    for name, func, hlp in (("classify", cmd_classify, "recovery step of each punctured symbol"),
                            ("tree", cmd_tree, "dump the recovery tree of a punctured symbol"),
                            ("bec-tree", cmd_bec_tree, "exact BEC recovery error on recovery trees")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("graph")
        s.add_argument("pattern")
        s.add_argument("--max-steps", type=int, default=200)
        if name == "tree":
            s.add_argument("--symbol", type=int, required=True)
            s.add_argument("--format", choices=["text", "dot"], default="text")
        if name == "bec-tree":
            s.add_argument("--symbol", type=int, default=None)
            s.add_argument("--alpha", required=True, help="comma-separated erasure probabilities")
        s.set_defaults(func=func)

    s = sub.add_parser("fer", parents=[common], help="Monte-Carlo FER sweep")
    s.add_argument("--config")
    s.add_argument("--graph")
    s.add_argument("--pattern", help="none | untainted | untainted-lowest | random | file:PATH")
    s.add_argument("--pi")
    s.add_argument("--channels", help="e.g. 'bec:0.30,bec:0.35' or 'bsc:0.04:0.07:0.01'")
    s.add_argument("--seeds", help="e.g. '1,2,3'")
    s.add_argument("--max-iter", type=int)
    s.add_argument("--no-early-stop", action="store_true")
    s.add_argument("--clamp", type=float)
    s.add_argument("--min-errors", type=int)
    s.add_argument("--max-frames", type=int)
    s.add_argument("--block", type=int)
    s.add_argument("--snr-mode", choices=SNR_MODES)
    s.add_argument("--timing", action="store_true", help="fill the seconds column")
    s.add_argument("--summary", help="write per-seed rows with the median seed marked")
    s.set_defaults(func=cmd_fer)

    s = sub.add_parser("pstats", parents=[common], help="p_min/p_max over repeated untainted runs")
    s.add_argument("graphs", nargs="+")
    s.add_argument("--runs", type=int, default=5000)
    s.add_argument("--base-seed", type=int, default=0)
    s.add_argument("--criterion", choices=["full-N2", "lowest-degree"], default="full-N2")
    s.add_argument("--histogram", action="store_true")
    s.set_defaults(func=cmd_pstats)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "threads", None) is not None and args.threads < 1:
            raise CliError("--threads must be >= 1")
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: file-not-found: {exc.filename}", file=sys.stderr)
        return 1
    except (ValueError, IndexError) as exc:
        print(f"error: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
