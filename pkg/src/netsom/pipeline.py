"""Pipeline stages: generate -> metrics -> categorize -> simulate -> render.

Every stage writes its artifact plus a sidecar ``<artifact>.meta.json``
recording parameters, the derived seed, and content hashes of inputs and
output, so any figure can be audited back to the graph that produced it.
Stages re-run independently from persisted intermediates; a consumed
artifact whose bytes no longer match its recorded hash is rejected as stale.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from . import __version__
from .generators import generate_cnn, generate_hk
from .graph import Graph, load_edge_list, save_edge_list
from .metrics import (FEATURE_NAMES, NodeFeatures, compute_all,
                      read_features_csv, write_features_csv)
from .render import render_heatmaps, render_pie_lattice, render_timeline
from .simtrace import SimTrace, read_trace_csv, write_trace_csv
from .sir import run_sir
from .som import (apply_log_columns, assign_nodes, cell_stats,
                  normalize_features, read_assignment_csv,
                  read_cell_stats_csv, save_som_json, train_som,
                  write_assignment_csv, write_cell_stats_csv)
from .spd import run_spd

# deterministic master-seed split: stage seed = first word of
# SeedSequence([master, code]); ensemble run i uses SeedSequence([master, 9, i])
STAGE_CODES = {"generate": 1, "categorize": 2, "sir": 3, "spd": 4}

DEFAULT_CONFIG: dict = {
    "seed": 0,
    "generate": {"model": "hk", "n": 10000, "m": 4, "p_t": 0.9, "u": 0.75},
    "som": {"width": 5, "height": 5, "epochs": 20, "log_features": []},
    "sir": {"lambda": 0.2, "mu": 1.0, "dt": 0.01, "initial": 10,
            "snapshot_every": 0.5},
    "spd": {"T": 1.5, "eps": 0.0, "max_rounds": 100, "tie": "min_id"},
    "render": {"times": None, "radius_mode": "fixed"},
}


class PipelineError(RuntimeError):
    """A stage failed; carries the stage name for exit reporting."""

    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


class ConfigError(ValueError):
    pass


def derive_seed(master: int, *key: int) -> int:
    """Stage seed derived from the master seed and an integer key path."""
    ss = np.random.SeedSequence([int(master), *[int(k) for k in key]])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_meta(artifact: Path, stage: str, params: dict,
                seed: int | None, inputs: dict[str, Path],
                result: dict | None = None) -> None:
    doc = {
        "tool": "netsom",
        "version": __version__,
        "stage": stage,
        "artifact": artifact.name,
        "params": params,
        "seed": seed,
        "inputs": {name: sha256_file(p) for name, p in sorted(inputs.items())},
        "output_sha256": sha256_file(artifact),
    }
    if result is not None:
        doc["result"] = result
    meta_path = artifact.with_name(artifact.name + ".meta.json")
    meta_path.write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")


def check_fresh(path: str | Path) -> None:
    """Reject an input whose bytes no longer match its recorded hash."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"missing input: {path}")
    meta_path = path.with_name(path.name + ".meta.json")
    if not meta_path.exists():
        return  # hand-made input; nothing recorded to check against
    recorded = json.loads(meta_path.read_text(encoding="utf-8")).get("output_sha256")
    if recorded is not None and recorded != sha256_file(path):
        raise ValueError(f"stale input: {path} does not match its recorded hash")


# ---------------------------------------------------------------------------
# stages


def stage_generate(out_path: str | Path, model: str = "hk", n: int = 10000,
                   m: int = 4, p_t: float = 0.9, u: float = 0.75,
                   seed: int = 0) -> Graph:
    out_path = Path(out_path)
    if model == "hk":
        graph = generate_hk(n, m=m, p_t=p_t, seed=seed)
        params = {"model": model, "n": n, "m": m, "p_t": p_t}
    elif model == "cnn":
        graph = generate_cnn(n, u=u, seed=seed)
        params = {"model": model, "n": n, "u": u}
    else:
        raise ValueError(f"unknown model {model!r} (expected 'hk' or 'cnn')")
    save_edge_list(graph, out_path)
    _write_meta(out_path, "generate", params, seed, {},
                result={"edges": graph.num_edges,
                        "mean_degree": graph.mean_degree})
    return graph


def stage_metrics(edges_path: str | Path, out_path: str | Path) -> NodeFeatures:
    edges_path, out_path = Path(edges_path), Path(out_path)
    check_fresh(edges_path)
    graph = load_edge_list(edges_path)
    features = compute_all(graph)
    write_features_csv(features, out_path)
    _write_meta(out_path, "metrics", {}, None, {edges_path.name: edges_path})
    return features


def stage_categorize(features_path: str | Path, out_prefix: str | Path,
                     width: int = 5, height: int = 5, epochs: int = 20,
                     seed: int = 0, log_features: tuple[str, ...] = ()):
    """Normalize, train the lattice, assign nodes, and write the three
    artifacts: <prefix>.assign.csv, <prefix>.cells.csv, <prefix>.som.json."""
    features_path = Path(features_path)
    check_fresh(features_path)
    features = read_features_csv(features_path)
    mat = features.as_matrix()
    if log_features:
        cols = []
        for name in log_features:
            if name not in FEATURE_NAMES:
                raise ValueError(f"unknown feature {name!r} in log_features")
            cols.append(FEATURE_NAMES.index(name))
        mat = apply_log_columns(mat, tuple(cols))
    normalized, norm_params = normalize_features(mat)
    grid = train_som(normalized, width=width, height=height, epochs=epochs,
                     seed=seed, norm_params=norm_params)
    assignment = assign_nodes(grid, normalized)
    stats = cell_stats(assignment, features, feature_names=FEATURE_NAMES)

    prefix = Path(out_prefix)
    assign_path = prefix.with_name(prefix.name + ".assign.csv")
    cells_path = prefix.with_name(prefix.name + ".cells.csv")
    som_path = prefix.with_name(prefix.name + ".som.json")
    write_assignment_csv(assignment, assign_path)
    write_cell_stats_csv(stats, cells_path)
    save_som_json(grid, som_path)
    params = {"width": width, "height": height, "epochs": epochs,
              "log_features": list(log_features)}
    inputs = {features_path.name: features_path}
    result = {"qe_initial": grid.qe_initial, "qe_final": grid.qe_final}
    for p in (assign_path, cells_path, som_path):
        _write_meta(p, "categorize", params, seed, inputs, result=result)
    return grid, assignment, stats


def stage_simulate_sir(edges_path: str | Path, assign_path: str | Path,
                       out_path: str | Path, lam: float = 0.2, mu: float = 1.0,
                       dt: float = 0.01, n_initial: int = 10, seed: int = 0,
                       snapshot_every: float = 0.5) -> SimTrace:
    edges_path, assign_path = Path(edges_path), Path(assign_path)
    out_path = Path(out_path)
    check_fresh(edges_path)
    check_fresh(assign_path)
    graph = load_edge_list(edges_path)
    assignment = read_assignment_csv(assign_path)
    trace = run_sir(graph, assignment, lam=lam, mu=mu, dt=dt,
                    n_initial=n_initial, seed=seed,
                    snapshot_every=snapshot_every)
    write_trace_csv(trace, out_path)
    params = {"lambda": lam, "mu": mu, "dt": dt, "initial": n_initial,
              "snapshot_every": snapshot_every}
    _write_meta(out_path, "simulate-sir", params, seed,
                {edges_path.name: edges_path, assign_path.name: assign_path},
                result={"terminal_t": trace.terminal_time})
    return trace


def stage_simulate_spd(edges_path: str | Path, assign_path: str | Path,
                       out_path: str | Path, T: float = 1.5, eps: float = 0.0,
                       seed: int = 0, max_rounds: int = 100,
                       tie: str = "min_id") -> SimTrace:
    edges_path, assign_path = Path(edges_path), Path(assign_path)
    out_path = Path(out_path)
    check_fresh(edges_path)
    check_fresh(assign_path)
    graph = load_edge_list(edges_path)
    assignment = read_assignment_csv(assign_path)
    trace = run_spd(graph, assignment, T=T, eps=eps, seed=seed,
                    max_rounds=max_rounds, tie=tie)
    write_trace_csv(trace, out_path)
    rounds = int(trace.terminal_time)
    params = {"T": T, "eps": eps, "max_rounds": max_rounds, "tie": tie}
    _write_meta(out_path, "simulate-spd", params, seed,
                {edges_path.name: edges_path, assign_path.name: assign_path},
                result={"rounds": rounds, "fixed_point": rounds < max_rounds})
    return trace


def stage_render_heatmap(cells_path: str | Path, out_path: str | Path) -> None:
    cells_path, out_path = Path(cells_path), Path(out_path)
    check_fresh(cells_path)
    stats = read_cell_stats_csv(cells_path)
    out_path.write_text(render_heatmaps(stats), encoding="utf-8")
    _write_meta(out_path, "render-heatmap", {}, None, {cells_path.name: cells_path})


def stage_render_pies(trace_path: str | Path, out_path: str | Path, t: float,
                      radius_mode: str = "fixed") -> None:
    trace_path, out_path = Path(trace_path), Path(out_path)
    check_fresh(trace_path)
    trace = read_trace_csv(trace_path)
    idx = trace.nearest_index(t)
    svg = render_pie_lattice(trace.counts[idx], trace.width, trace.height,
                             trace.state_names, t=trace.times[idx],
                             radius_mode=radius_mode,
                             time_label=trace.time_label)
    out_path.write_text(svg, encoding="utf-8")
    _write_meta(out_path, "render-pies", {"t": t, "radius_mode": radius_mode},
                None, {trace_path.name: trace_path})


def stage_render_timeline(trace_path: str | Path, out_path: str | Path,
                          times: list[float] | None,
                          radius_mode: str = "fixed") -> None:
    trace_path, out_path = Path(trace_path), Path(out_path)
    check_fresh(trace_path)
    trace = read_trace_csv(trace_path)
    if times is None:
        times = default_timeline_times(trace)
    svg = render_timeline(trace, times, radius_mode=radius_mode)
    out_path.write_text(svg, encoding="utf-8")
    _write_meta(out_path, "render-timeline",
                {"times": times, "radius_mode": radius_mode}, None,
                {trace_path.name: trace_path})


def default_timeline_times(trace: SimTrace, panels: int = 6) -> list[float]:
    """Evenly spaced snapshot times from start to terminal, at most ``panels``."""
    if len(trace.times) <= panels:
        return list(trace.times)
    idx = np.linspace(0, len(trace.times) - 1, panels).round().astype(int)
    return [trace.times[i] for i in sorted(set(int(i) for i in idx))]


# ---------------------------------------------------------------------------
# full pipeline


def resolve_config(config: dict) -> dict:
    """Overlay user config onto the defaults; unknown keys are errors."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    known_top = set(DEFAULT_CONFIG) | {"outdir"}
    unknown = set(config) - known_top
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    resolved = {"seed": config.get("seed", DEFAULT_CONFIG["seed"])}
    if not isinstance(resolved["seed"], int):
        raise ConfigError("seed must be an integer")
    for section in ("generate", "som", "sir", "spd", "render"):
        user = config.get(section, {})
        if user is False:
            resolved[section] = False
            continue
        if not isinstance(user, dict):
            raise ConfigError(f"section {section!r} must be an object or false")
        defaults = DEFAULT_CONFIG[section]
        bad = set(user) - set(defaults)
        if bad:
            raise ConfigError(f"unknown keys in {section!r}: {sorted(bad)}")
        resolved[section] = {**defaults, **user}
    # running neither simulation is allowed only by explicit "sir": false,
    # "spd": false; absent sections mean "run with defaults"
    return resolved


def full_run(config: dict, outdir: str | Path, echo=print) -> dict:
    """Run every stage under one master seed; returns the summary dict.

    The report directory holds all intermediates, figures, metadata, the
    resolved config, and summary.json.
    """
    cfg = resolve_config(config)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    master = cfg["seed"]
    (outdir / "config.json").write_text(
        json.dumps(cfg, sort_keys=True, indent=2) + "\n", encoding="utf-8")

    summary: dict = {"seed": master, "config": cfg, "artifacts": []}

    def record(path: Path) -> Path:
        summary["artifacts"].append(path.name)
        return path

    model = cfg["generate"]["model"]

    def _stage(name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:  # noqa: BLE001 - rewrap with the stage label
            raise PipelineError(name, f"stage {name} failed: {exc}") from exc

    g = cfg["generate"]
    edges = record(outdir / f"{model}.edges")
    graph = _stage("generate", stage_generate, edges, model=model, n=g["n"],
                   m=g["m"], p_t=g["p_t"], u=g["u"],
                   seed=derive_seed(master, STAGE_CODES["generate"]))
    echo(f"generate: {edges.name} n={graph.n} edges={graph.num_edges} "
         f"<k>={graph.mean_degree:.3f}")
    summary["graph"] = {"model": model, "n": graph.n,
                        "edges": graph.num_edges,
                        "mean_degree": graph.mean_degree}

    features_path = record(outdir / "features.csv")
    _stage("metrics", stage_metrics, edges, features_path)
    echo(f"metrics: {features_path.name}")

    s = cfg["som"]
    prefix = outdir / model
    grid, assignment, stats = _stage(
        "categorize", stage_categorize, features_path, prefix,
        width=s["width"], height=s["height"], epochs=s["epochs"],
        seed=derive_seed(master, STAGE_CODES["categorize"]),
        log_features=tuple(s["log_features"]))
    for suffix in (".assign.csv", ".cells.csv", ".som.json"):
        record(outdir / (model + suffix))
    echo(f"categorize: grid {s['width']}x{s['height']}, "
         f"qe {grid.qe_initial:.4f} -> {grid.qe_final:.4f}")
    summary["cells"] = {
        "width": stats.width, "height": stats.height,
        "counts": stats.counts.tolist(),
        "means": {name: [None if np.isnan(v) else v
                         for v in stats.means[:, j]]
                  for j, name in enumerate(stats.feature_names)},
    }

    assign_path = outdir / f"{model}.assign.csv"
    cells_path = outdir / f"{model}.cells.csv"
    render_cfg = cfg["render"] if cfg["render"] is not False else None

    if cfg["sir"] is not False:
        p = cfg["sir"]
        trace_path = record(outdir / "sir_trace.csv")
        trace = _stage("simulate-sir", stage_simulate_sir, edges, assign_path,
                       trace_path, lam=p["lambda"], mu=p["mu"], dt=p["dt"],
                       n_initial=p["initial"],
                       seed=derive_seed(master, STAGE_CODES["sir"]),
                       snapshot_every=p["snapshot_every"])
        totals = trace.counts[-1].sum(axis=1)
        summary["sir"] = {
            "terminal_t": trace.terminal_time,
            "terminal_counts": {"S": int(totals[0]), "I": int(totals[1]),
                                "R": int(totals[2])},
            "terminal_R_fraction": float(totals[2]) / graph.n,
        }
        echo(f"simulate sir: terminal t={trace.terminal_time:g} "
             f"R={int(totals[2])}/{graph.n}")
        if render_cfg is not None:
            tl = record(outdir / "timeline_sir.svg")
            _stage("render", stage_render_timeline, trace_path, tl,
                   render_cfg["times"], render_cfg["radius_mode"])
            term = trace.terminal_time
            pies = record(outdir / f"pies_sir_{term:g}.svg")
            _stage("render", stage_render_pies, trace_path, pies, term,
                   render_cfg["radius_mode"])

    if cfg["spd"] is not False:
        p = cfg["spd"]
        trace_path = record(outdir / "spd_trace.csv")
        trace = _stage("simulate-spd", stage_simulate_spd, edges, assign_path,
                       trace_path, T=p["T"], eps=p["eps"],
                       seed=derive_seed(master, STAGE_CODES["spd"]),
                       max_rounds=p["max_rounds"], tie=p["tie"])
        totals = trace.counts[-1].sum(axis=1)
        summary["spd"] = {
            "rounds": int(trace.terminal_time),
            "fixed_point": int(trace.terminal_time) < p["max_rounds"],
            "final_counts": {"C": int(totals[0]), "D": int(totals[1])},
            "final_cooperator_fraction": float(totals[0]) / graph.n,
        }
        echo(f"simulate spd: rounds={int(trace.terminal_time)} "
             f"C={int(totals[0])}/{graph.n}")
        if render_cfg is not None:
            tl = record(outdir / "timeline_spd.svg")
            _stage("render", stage_render_timeline, trace_path, tl,
                   render_cfg["times"], render_cfg["radius_mode"])
            term = trace.terminal_time
            pies = record(outdir / f"pies_spd_{term:g}.svg")
            _stage("render", stage_render_pies, trace_path, pies, term,
                   render_cfg["radius_mode"])

    if render_cfg is not None:
        hm = record(outdir / f"heatmap_{model}.svg")
        _stage("render", stage_render_heatmap, cells_path, hm)
        echo(f"render: {hm.name}")

    summary["artifacts"] = sorted(summary["artifacts"])
    (outdir / "summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return summary


def run_ensemble(config: dict, outdir: str | Path, runs: int,
                 echo=print) -> list[dict]:
    """Independent seeded full runs in run_<i> subdirectories.

    Run i derives its master seed from the config seed and i, so ensembles
    are reproducible and order-independent. NETSOM_THREADS caps parallelism.
    """
    cfg = resolve_config(config)
    outdir = Path(outdir)
    workers = _worker_count(runs)
    jobs = []
    for i in range(runs):
        sub = dict(config)
        sub["seed"] = derive_seed(cfg["seed"], 9, i)
        jobs.append((sub, outdir / f"run_{i:03d}"))
    if workers <= 1:
        return [full_run(sub, path, echo=echo) for sub, path in jobs]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_quiet_full_run, sub, str(path))
                   for sub, path in jobs]
        results = [f.result() for f in futures]
    for i, r in enumerate(results):
        echo(f"run_{i:03d}: done (seed {r['seed']})")
    return results


def _quiet_full_run(config: dict, outdir: str) -> dict:
    return full_run(config, outdir, echo=lambda *_: None)


def _worker_count(runs: int) -> int:
    cap = os.environ.get("NETSOM_THREADS")
    if cap is not None:
        return max(1, min(runs, int(cap)))
    return max(1, min(runs, os.cpu_count() or 1))
