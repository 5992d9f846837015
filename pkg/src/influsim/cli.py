"""Command line interface: graph ingestion, generation, and experiments.

Every run command writes its artifacts plus a manifest that pins the
resolved configuration, the graph descriptor, the master seed, and the
tool version, which is enough to reproduce the outputs byte for byte
(the manifest's own duration field aside). Flag precedence is CLI over
JSON config over built-in defaults.

Exit codes: 0 success, 1 operational failure (missing or malformed
inputs, infeasible experiments), 2 usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Optional

from influsim import __version__
from influsim import experiments
from influsim.graph import (
    SocialGraph,
    generate_small_world,
    load_edge_list,
    load_graph_npz,
    save_graph_npz,
)
from influsim.population import ScenarioConfig
from influsim.seeding import derive_rng

__all__ = ["build_parser", "main"]

_EXPERIMENTS = ("validate-individual", "validate-sets", "situational", "sweep")


class _ConfigError(Exception):
    """Configuration could not be resolved; message lists every problem."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="influsim",
        description="Influencer-campaign simulation on social graphs.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser(
        "ingest", help="load a whitespace edge list and report graph stats"
    )
    ingest.add_argument("--edges", required=True, help="edge list file (src dst per line)")
    ingest.add_argument(
        "--orientation",
        choices=("as-is", "reversed"),
        default="as-is",
        help="interpret each line as (broadcaster follower) or the reverse",
    )
    ingest.add_argument("--seed", type=int, default=0, help="seed for edge weights")
    ingest.add_argument("--out", help="save the loaded graph as .npz")
    ingest.set_defaults(func=_cmd_ingest)

    gen = sub.add_parser("generate", help="generate a small-world graph")
    gen.add_argument("--n", type=int, required=True, help="vertex count")
    gen.add_argument("--k", type=int, required=True, help="ring-lattice neighbours per vertex (even)")
    gen.add_argument("--p", type=float, required=True, help="rewiring probability")
    gen.add_argument(
        "--orientation",
        choices=("both-directions", "random-single"),
        default="both-directions",
        help="emit each undirected edge twice or once with random direction",
    )
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output .npz path")
    gen.set_defaults(func=_cmd_generate)

    run = sub.add_parser("run", help="run an experiment family")
    run_sub = run.add_subparsers(dest="experiment", required=True)
    for name in _EXPERIMENTS:
        sp = run_sub.add_parser(name)
        sp.add_argument("--graph", required=True, help="graph .npz from ingest/generate")
        sp.add_argument("--config", help="scenario config JSON")
        sp.add_argument("--seed", type=int, help="master seed override")
        sp.add_argument("--trials", type=int, help="trials per scenario override")
        sp.add_argument("--omega", type=float, help="willingness fraction override")
        sp.add_argument("--mu", type=float, help="mean interest override")
        sp.add_argument("--rho", type=float, help="hiring budget override")
        sp.add_argument(
            "--jobs",
            type=int,
            default=os.cpu_count() or 1,
            help="worker processes (default: all cores)",
        )
        sp.add_argument("--out-dir", default=".", help="artifact directory")
        sp.set_defaults(func=_cmd_run, experiment=name)
    return parser


def _resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise _ConfigError(f"cannot read config {args.config}: {exc}") from exc
        try:
            cfg = ScenarioConfig.from_json(text)
        except (ValueError, json.JSONDecodeError) as exc:
            raise _ConfigError(f"invalid config {args.config}: {exc}") from exc
    else:
        cfg = ScenarioConfig()
    try:
        return cfg.with_overrides(
            mu=args.mu,
            omega=args.omega,
            rho=args.rho,
            trials=args.trials,
            master_seed=args.seed,
        )
    except ValueError as exc:
        raise _ConfigError(f"invalid flag overrides: {exc}") from exc


def _load_graph(path: str) -> SocialGraph:
    if not Path(path).exists():
        raise FileNotFoundError(f"graph file not found: {path}")
    try:
        return load_graph_npz(path)
    except Exception as exc:
        raise ValueError(
            f"{path} is not a saved graph archive; produce one with "
            f"'influsim ingest --out' or 'influsim generate --out' ({exc})"
        ) from exc


def _manifest(
    command: str,
    config: ScenarioConfig,
    graph_path: str,
    graph: SocialGraph,
    outputs: list[str],
    duration: float,
) -> dict:
    return {
        "command": command,
        "config": config.to_dict(),
        "graph": {
            "path": str(graph_path),
            "vertex_count": graph.vertex_count,
            "edge_count": graph.edge_count,
            "max_outdegree": graph.max_outdegree,
        },
        "master_seed": config.master_seed,
        "version": __version__,
        "outputs": outputs,
        "duration_seconds": duration,
    }


def _write_json(path: Path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_ingest(args: argparse.Namespace) -> int:
    rng = derive_rng(args.seed, "ingest", "edge-weights")
    graph = load_edge_list(args.edges, orientation=args.orientation, rng=rng)
    if args.out:
        save_graph_npz(graph, args.out)
    print(graph.stats().to_json())
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    rng = derive_rng(args.seed, "generate", args.n, args.k)
    try:
        graph = generate_small_world(
            args.n, args.k, args.p, orientation=args.orientation, rng=rng
        )
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc
    save_graph_npz(graph, args.out)
    print(graph.stats().to_json())
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    graph = _load_graph(args.graph)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    outputs: list[str] = []

    if args.experiment == "validate-individual":
        result = experiments.run_individual_validation(graph, config, jobs=args.jobs)
        csv_path = out_dir / "individual.csv"
        experiments.write_individual_csv(result, csv_path)
        seeds_path = out_dir / "seeds.json"
        _write_json(seeds_path, {str(r.tier): r.member for r in result.tiers})
        outputs = [str(csv_path), str(seeds_path)]
    elif args.experiment == "validate-sets":
        result = experiments.run_set_validation(graph, config, jobs=args.jobs)
        csv_path = out_dir / "sets.csv"
        experiments.write_sets_csv(result, csv_path)
        seeds_path = out_dir / "seeds.json"
        _write_json(
            seeds_path,
            {str(r.tier): json.loads(r.seed_set.to_json()) for r in result.tiers},
        )
        outputs = [str(csv_path), str(seeds_path)]
    elif args.experiment == "situational":
        result = experiments.run_situational(graph, config, jobs=args.jobs)
        csv_path = out_dir / "metrics.csv"
        experiments.write_situational_csv(result, csv_path)
        seeds_path = out_dir / "seeds.json"
        payload = {}
        for row in result.tiers:
            if row.seed_set is None:
                payload[str(row.tier)] = {"skipped": row.skipped_reason}
            else:
                payload[str(row.tier)] = json.loads(row.seed_set.to_json())
        _write_json(seeds_path, payload)
        outputs = [str(csv_path), str(seeds_path)]
    else:
        grid = experiments.run_sweep(graph, config, jobs=args.jobs)
        csv_path = out_dir / "sweep.csv"
        experiments.write_sweep_csv(grid, csv_path)
        outputs = [str(csv_path)]

    duration = time.monotonic() - started
    manifest = _manifest(
        f"run {args.experiment}", config, args.graph, graph, outputs, duration
    )
    manifest_path = out_dir / "manifest.json"
    _write_json(manifest_path, manifest)
    print(json.dumps({"outputs": outputs, "manifest": str(manifest_path)}))
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
