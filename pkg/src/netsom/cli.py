"""Command-line interface: netsom <generate|metrics|categorize|simulate|render|run>.

Exit codes: 0 success, 2 configuration/usage error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .pipeline import ConfigError, PipelineError


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 5x5, got {text!r}")


def _parse_times(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"times must be comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netsom",
        description="Generate growth-model networks, categorize nodes on a "
                    "self-organizing map, simulate epidemics and games, and "
                    "render per-category figures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a growth-model network as an edge list")
    p.add_argument("--model", choices=("hk", "cnn"), required=True)
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--m", type=int, default=4, help="edges per arriving node (hk)")
    p.add_argument("--pt", type=float, default=0.9, help="triad-formation probability (hk)")
    p.add_argument("--u", type=float, default=0.75, help="conversion probability (cnn)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("metrics", help="compute per-node features to CSV")
    p.add_argument("edges")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("categorize", help="train the SOM and assign nodes to cells")
    p.add_argument("features")
    p.add_argument("--grid", type=_parse_grid, default=(5, 5), metavar="WxH")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log-features", default="",
                   help="comma-separated feature names to log10(1+x)-scale first")
    p.add_argument("-o", "--out-prefix", default=None)

    p = sub.add_parser("simulate", help="run a simulation over an assigned graph")
    sim = p.add_subparsers(dest="sim", required=True)

    ps = sim.add_parser("sir", help="asynchronous SIR epidemic")
    ps.add_argument("edges")
    ps.add_argument("assignment")
    ps.add_argument("--lambda", dest="lam", type=float, default=0.2)
    ps.add_argument("--mu", type=float, default=1.0)
    ps.add_argument("--dt", type=float, default=0.01)
    ps.add_argument("--initial", type=int, default=10)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--snapshot-every", type=float, default=0.5)
    ps.add_argument("-o", "--output", default=None)

    pd = sim.add_parser("spd", help="spatial prisoner's dilemma")
    pd.add_argument("edges")
    pd.add_argument("assignment")
    pd.add_argument("--T", "--temptation", dest="T", type=float, default=1.5)
    pd.add_argument("--eps", type=float, default=0.0)
    pd.add_argument("--seed", type=int, default=0)
    pd.add_argument("--max-rounds", type=int, default=100)
    pd.add_argument("--tie", choices=("min_id", "random"), default="min_id")
    pd.add_argument("-o", "--output", default=None)

    p = sub.add_parser("render", help="render SVG figures from CSV artifacts")
    ren = p.add_subparsers(dest="what", required=True)

    ph = ren.add_parser("heatmap", help="per-component cell heat maps")
    ph.add_argument("cells")
    ph.add_argument("-o", "--output", required=True)

    pp = ren.add_parser("pies", help="pie lattice for one snapshot")
    pp.add_argument("trace")
    pp.add_argument("--t", type=float, required=True)
    pp.add_argument("--radius", choices=("fixed", "population"), default="fixed")
    pp.add_argument("-o", "--output", required=True)

    pt = ren.add_parser("timeline", help="pie lattices for several snapshots")
    pt.add_argument("trace")
    pt.add_argument("--times", type=_parse_times, default=None)
    pt.add_argument("--radius", choices=("fixed", "population"), default="fixed")
    pt.add_argument("-o", "--output", required=True)

    p = sub.add_parser("run", help="full pipeline from a JSON config")
    p.add_argument("config")
    p.add_argument("-o", "--outdir", default=None)
    p.add_argument("--runs", type=int, default=1,
                   help="ensemble of independent seeded runs (NETSOM_THREADS caps workers)")

    return parser


def _default_output(path: str, old_suffix: str, new_suffix: str) -> Path:
    name = Path(path).name
    stem = name[:-len(old_suffix)] if name.endswith(old_suffix) else Path(name).stem
    return Path(path).with_name(stem + new_suffix)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except PipelineError as exc:
        print(f"netsom: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"netsom: config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"netsom: {exc}", file=sys.stderr)
        return 3


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "generate":
        graph = pipeline.stage_generate(
            args.output, model=args.model, n=args.n, m=args.m, p_t=args.pt,
            u=args.u, seed=args.seed)
        print(f"wrote {args.output}: n={graph.n} edges={graph.num_edges} "
              f"<k>={graph.mean_degree:.3f}")
        return 0

    if args.command == "metrics":
        out = args.output or _default_output(args.edges, ".edges", ".features.csv")
        pipeline.stage_metrics(args.edges, out)
        print(f"wrote {out}")
        return 0

    if args.command == "categorize":
        prefix = args.out_prefix
        if prefix is None:
            prefix = str(_default_output(args.features, ".features.csv", ""))
        names = tuple(s.strip() for s in args.log_features.split(",") if s.strip())
        width, height = args.grid
        grid, _, _ = pipeline.stage_categorize(
            args.features, prefix, width=width, height=height,
            epochs=args.epochs, seed=args.seed, log_features=names)
        print(f"wrote {prefix}.assign.csv {prefix}.cells.csv {prefix}.som.json "
              f"(qe {grid.qe_initial:.4f} -> {grid.qe_final:.4f})")
        return 0

    if args.command == "simulate":
        if args.sim == "sir":
            out = args.output or _default_output(args.edges, ".edges", ".sir.csv")
            trace = pipeline.stage_simulate_sir(
                args.edges, args.assignment, out, lam=args.lam, mu=args.mu,
                dt=args.dt, n_initial=args.initial, seed=args.seed,
                snapshot_every=args.snapshot_every)
            print(f"wrote {out}: terminal t={trace.terminal_time:g}")
        else:
            out = args.output or _default_output(args.edges, ".edges", ".spd.csv")
            trace = pipeline.stage_simulate_spd(
                args.edges, args.assignment, out, T=args.T, eps=args.eps,
                seed=args.seed, max_rounds=args.max_rounds, tie=args.tie)
            print(f"wrote {out}: rounds={int(trace.terminal_time)}")
        return 0

    if args.command == "render":
        if args.what == "heatmap":
            pipeline.stage_render_heatmap(args.cells, args.output)
        elif args.what == "pies":
            pipeline.stage_render_pies(args.trace, args.output, args.t,
                                       radius_mode=args.radius)
        else:
            pipeline.stage_render_timeline(args.trace, args.output, args.times,
                                           radius_mode=args.radius)
        print(f"wrote {args.output}")
        return 0

    if args.command == "run":
        try:
            config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        outdir = args.outdir or config.get("outdir") or "netsom_report"
        if args.runs > 1:
            pipeline.run_ensemble(config, outdir, args.runs)
        else:
            pipeline.full_run(config, outdir)
        print(f"report in {outdir}")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
