"""
Command-line front end.

Subcommands:
    gen-graph   sample a strongly connected digraph and write its edge list
    run         run one trial (trace, CSV row, state dump, verification)
    sweep       run many trials (per-trial CSV, statistics, histogram)
    bounds      evaluate the closed-form bounds
    verify      check a recorded trace against the graph it ran on

Exit codes: 0 ok, 2 invalid configuration, 3 graph not strongly connected,
4 trial did not halt (or deadlocked), 5 verification findings.
"""
import argparse
import csv
import json
import sys
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence

from loguru import logger
from pydantic import ValidationError

from ..analysis.bounds import (
    BoundInputs,
    election_multi_leader_probability,
    evaluate_all,
    leader_success_binomial,
    leader_success_lower_bound,
)
from ..analysis.stats import aggregate_trials, empirical_quantile, multi_leader_curve
from ..engine.results import CSV_HEADER, TrialResult
from ..engine.rng import RNG_KINDS
from ..engine.sweep import build_graph, run_single_trial, run_sweep, trial_seed
from ..engine.trace import RoundTrace
from ..engine.verify import ground_truth_verify, trial_from_trace
from ..graph.digraph import GraphError, NotStronglyConnectedError, diameter, is_strongly_connected
from ..graph.edgelist import load_edge_list, save_edge_list, write_edge_list
from ..protocol.node import Trigger, VoteSource
from ..utils.config import Config, Mode, SimConfig
from ..utils.helpers import format_decimal, parse_int_list, write_csv, write_json
from ..utils.logger import setup_logging

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONNECTED = 3
EXIT_NOT_HALTED = 4
EXIT_VERIFY = 5

DEFAULT_CONFIG = "config/config.yaml"
STEP_QUANTILES = (0.5, 0.81, 0.95)


class ConfigError(ValueError):
    """Invalid flag or configuration value."""


def _add_sim_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=[m.value for m in Mode], help="protocol to run")
    parser.add_argument("--n", type=int, help="number of nodes of a generated graph")
    parser.add_argument("--edge-prob", type=float, help="edge probability of a generated graph")
    parser.add_argument("--graph", help="edge-list file (overrides --n / --edge-prob)")
    parser.add_argument("--target-diameter", type=int, help="keep only generated graphs with this diameter")
    parser.add_argument("--max-resamples", type=int, help="resample cap of the graph generator")
    parser.add_argument("--d-prime", help="diameter upper bound D' (integer or 'auto')")
    parser.add_argument("--uv", type=int, help="leader election rounds U_v")
    parser.add_argument("--eta-max", type=int, help="largest election draw")
    parser.add_argument("--trigger", choices=[t.value for t in Trigger], help="transmit condition")
    parser.add_argument("--vote", choices=[v.value for v in VoteSource], help="vote source")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--max-steps", type=int, help="step budget")
    parser.add_argument("--trials", type=int, help="number of trials")
    parser.add_argument("--leader", type=int, help="fixed leader node (1-based); skips the election")
    parser.add_argument("--values", help="initial values for mode 'average' (comma separated)")
    parser.add_argument("--rng", choices=RNG_KINDS, default="seeded", help="protocol random source")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for every subcommand."""
    parser = argparse.ArgumentParser(
        prog="qcount",
        description="Quantized average-degree and network-size computation on directed graphs",
    )
    parser.add_argument("--config", help=f"YAML config (default {DEFAULT_CONFIG} when present)")
    parser.add_argument("--log-level", help="console and file log level")
    parser.add_argument("--log-file", help="log file path ('' disables the file sink)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-graph", help="sample a strongly connected digraph")
    _add_sim_flags(gen)
    gen.add_argument("--out", help="edge-list output file (stdout when omitted)")

    run = sub.add_parser("run", help="run one trial")
    _add_sim_flags(run)
    run.add_argument("--out", help="one-row CSV output (stdout when omitted)")
    run.add_argument("--trace", help="round trace output (line-delimited JSON)")
    run.add_argument("--state-dump", help="per-round per-node state CSV")
    run.add_argument("--result-json", help="full trial result as JSON")

    sweep = sub.add_parser("sweep", help="run many trials")
    _add_sim_flags(sweep)
    sweep.add_argument("--workers", type=int, help="worker processes")
    sweep.add_argument("--out", help="per-trial CSV output (stdout when omitted)")
    sweep.add_argument("--stats", help="statistics JSON output")
    sweep.add_argument("--histogram", help="histogram CSV output")
    sweep.add_argument("--curve", help="multi-leader trials per election round CSV (leader-election mode)")
    sweep.add_argument("--bin-width", type=int, help="histogram bin width in rounds")
    sweep.add_argument("--allow-failures", action="store_true", default=None,
                       help="exit 0 even when some trials are incorrect")

    bounds = sub.add_parser("bounds", help="evaluate the closed-form bounds")
    bounds.add_argument("--n", type=int, required=True, help="number of nodes")
    bounds.add_argument("--dmax", type=int, help="largest out-degree")
    bounds.add_argument("--diam", type=int, help="diameter D")
    bounds.add_argument("--d-prime", type=int, help="D' (defaults to D)")
    bounds.add_argument("--p0", default="0.81", help="target probability for k0")
    bounds.add_argument("--uv", type=int, help="leader election rounds")
    bounds.add_argument("--levels", type=int, help="election levels M = eta_max + 1")
    bounds.add_argument("--election-curve", action="store_true",
                        help="also print the exact multi-leader probability per election round")

    verify = sub.add_parser("verify", help="check a recorded trace")
    verify.add_argument("--graph", required=True, help="edge-list file the trace ran on")
    verify.add_argument("--trace", required=True, help="round trace file")
    return parser


def _load_config(path: Optional[str]) -> Config:
    if path:
        return Config.load_from_yaml(path)
    try:
        return Config.load_from_yaml(DEFAULT_CONFIG)
    except FileNotFoundError:
        return Config()


def _sim_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    simple = {
        "mode": "mode",
        "n": "n",
        "edge_prob": "edge_prob",
        "graph": "graph_file",
        "target_diameter": "target_diameter",
        "max_resamples": "max_resamples",
        "uv": "u_v",
        "eta_max": "eta_max",
        "trigger": "trigger",
        "vote": "vote",
        "seed": "master_seed",
        "max_steps": "max_steps",
        "trials": "trials",
    }
    for flag, key in simple.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value

    d_prime = getattr(args, "d_prime", None)
    if d_prime is not None:
        if d_prime == "auto":
            overrides["d_prime_auto"] = True
        else:
            try:
                overrides["d_prime"] = int(d_prime)
            except ValueError:
                raise ConfigError(f"--d-prime must be an integer or 'auto', got {d_prime!r}") from None
            overrides["d_prime_auto"] = False

    leader = getattr(args, "leader", None)
    if leader is not None:
        if leader < 1:
            raise ConfigError(f"--leader is 1-based, got {leader}")
        overrides["fixed_leader"] = leader - 1

    values = getattr(args, "values", None)
    if values is not None:
        overrides["initial_values"] = parse_int_list(values)
    return overrides


def build_sim_config(config: Config, args: argparse.Namespace, **extra) -> SimConfig:
    """
    Effective simulation config: YAML values overridden by flags.

    Raises:
        ConfigError: On an invalid flag
        ValidationError: On an invalid combination of values
    """
    data = config.simulation.model_dump()
    data.update(_sim_overrides(args))
    data.update(extra)
    return SimConfig(**data)


def _print_effective(cfg: SimConfig, stream=None, **extra) -> None:
    payload = cfg.model_dump(mode="json")
    payload.update(extra)
    print(json.dumps(payload, sort_keys=True), file=stream or sys.stdout)
    logger.info(f"Effective config: {json.dumps(payload, sort_keys=True)}")


def _emit_csv(path: Optional[str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    if path:
        count = write_csv(path, header, rows)
        logger.info(f"Wrote {count} row(s) to {path}")
        return
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])


def _write_state_dump(path: str, result: TrialResult) -> None:
    rows = []
    for round_, snapshot in result.states or []:
        for node, (y, z) in enumerate(snapshot):
            rows.append((round_, node + 1, y, z, format_decimal(Fraction(y, z)) if z else ""))
    write_csv(path, ["round", "node", "y", "z", "q"], rows)


def cmd_gen_graph(args: argparse.Namespace, config: Config) -> int:
    """Sample a graph with the configured generator and write its edge list."""
    cfg = build_sim_config(config, args, graph_file=None)
    seed = trial_seed(cfg.master_seed, 0)
    # stdout carries the edge list when no --out is given
    _print_effective(cfg, stream=sys.stdout if args.out else sys.stderr, trial_seed=seed)
    graph, rejected = build_graph(cfg, seed)
    if args.out:
        save_edge_list(graph, args.out)
    else:
        sys.stdout.write(write_edge_list(graph))
    logger.info(
        f"Generated digraph: n={graph.node_count} m={graph.edge_count} D={diameter(graph)} "
        f"dmax={graph.max_out_degree} resamples={graph.resamples} rejected_by_diameter={rejected}"
    )
    return EXIT_OK


def cmd_run(args: argparse.Namespace, config: Config) -> int:
    """Run one trial; write trace, CSV row, state dump and verify the outcome."""
    cfg = build_sim_config(
        config,
        args,
        trials=1,
        capture_trace=bool(args.trace) or config.simulation.capture_trace,
        capture_states=bool(args.state_dump) or config.simulation.capture_states,
    )
    seed = trial_seed(cfg.master_seed, 0)
    # stdout carries the CSV row when no --out is given
    _print_effective(cfg, stream=sys.stdout if args.out else sys.stderr, trial_seed=seed, rng=args.rng)

    graph, _ = build_graph(cfg, seed)
    result, _ = run_single_trial(cfg, 0, graph, args.rng)
    report = ground_truth_verify(graph, result, result.trace)

    _emit_csv(args.out, CSV_HEADER, [result.to_row()])
    if args.trace and result.trace is not None:
        result.trace.write(args.trace)
        logger.info(f"Trace written to {args.trace} ({len(result.trace)} events)")
    if args.state_dump:
        _write_state_dump(args.state_dump, result)
    if args.result_json:
        payload = result.to_dict()
        payload["findings"] = report.messages()
        write_json(args.result_json, payload)

    if not result.halted:
        for message in report.messages():
            print(message, file=sys.stderr)
        return EXIT_NOT_HALTED
    if not report.ok:
        for message in report.messages():
            print(message, file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: Config) -> int:
    """Run ``trials`` trials and write per-trial rows and statistics."""
    cfg = build_sim_config(config, args)
    workers = args.workers if args.workers is not None else config.sweep.workers
    bin_width = args.bin_width if args.bin_width is not None else config.sweep.bin_width
    allow_failures = args.allow_failures if args.allow_failures is not None else config.sweep.allow_failures
    if workers < 1 or bin_width < 1:
        raise ConfigError("--workers and --bin-width must be >= 1")
    _print_effective(cfg, stream=sys.stdout if args.out else sys.stderr,
                     workers=workers, bin_width=bin_width, rng=args.rng)

    graph = load_edge_list(cfg.graph_file) if cfg.graph_file else None
    if graph is not None and not is_strongly_connected(graph):
        raise NotStronglyConnectedError(f"{cfg.graph_file} is not strongly connected")
    outcome = run_sweep(cfg, workers, graph, args.rng)
    results = outcome.results

    _emit_csv(args.out, CSV_HEADER, (r.to_row() for r in results))

    stats_payload: Dict[str, Any] = {
        "trials": len(results),
        "rejected_graphs": outcome.rejected,
        "incorrect": len(outcome.failures),
    }
    try:
        stats = aggregate_trials(results, bin_width)
        stats_payload.update(stats.to_dict())
        steps = [r.steps for r in results if r.steps is not None]
        stats_payload["quantiles"] = {str(q): empirical_quantile(steps, q) for q in STEP_QUANTILES}
    except ValueError as e:
        logger.warning(f"No statistics: {e}")
        stats = None
    if cfg.mode == Mode.LEADER_ELECTION:
        curve = multi_leader_curve(results)
        stats_payload["multi_leader_by_round"] = curve
        if args.curve:
            write_csv(args.curve, ["election_round", "multi_leader_trials"],
                      [(i + 1, c) for i, c in enumerate(curve)])
    if args.stats:
        write_json(args.stats, stats_payload)
    if args.histogram and stats is not None:
        write_csv(args.histogram, ["lo", "hi", "count"], stats.histogram)
    if stats is not None:
        logger.info(f"Sweep stats: mean={stats.mean:.2f} min={stats.min} max={stats.max} count={stats.count}")

    if allow_failures:
        return EXIT_OK
    if any(not r.halted for r in results):
        return EXIT_NOT_HALTED
    if outcome.failures:
        return EXIT_VERIFY
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    """Print every bound the given flags allow; exit 2 if one is inapplicable."""
    lines: List[str] = []
    inapplicable = False

    if args.dmax is not None or args.diam is not None:
        if args.dmax is None or args.diam is None:
            raise ConfigError("--dmax and --diam go together")
        inputs = BoundInputs(
            n=args.n,
            d_max_out=args.dmax,
            diam=args.diam,
            d_prime=args.d_prime,
            p0=args.p0,
            u_v=args.uv or 20,
            m_levels=args.levels or 256,
        )
        for item in evaluate_all(inputs)[:3]:
            lines.append(item.to_text())
            inapplicable |= not item.applicable

    if args.uv is not None or args.levels is not None:
        u_v = args.uv if args.uv is not None else 20
        levels = args.levels if args.levels is not None else 256
        for item in (leader_success_lower_bound(u_v, args.n, levels), leader_success_binomial(u_v, args.n, levels)):
            lines.append(item.to_text())
            inapplicable |= not item.applicable
        if args.election_curve:
            for index, p in enumerate(election_multi_leader_probability(args.n, levels, u_v), start=1):
                lines.append(f"multi_leader_after_round {index}: {format_decimal(p)}")

    if not lines:
        raise ConfigError("bounds needs --dmax/--diam and/or --uv/--levels")
    for line in lines:
        print(line)
    if inapplicable:
        print("one or more bounds are inapplicable for these inputs", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Rebuild a trial from its trace and run the ground-truth checks."""
    graph = load_edge_list(args.graph)
    trace = RoundTrace.load(args.trace)
    result = trial_from_trace(graph, trace)
    report = ground_truth_verify(graph, result, trace)
    if report.ok:
        print(f"ok: {result.mode.value} n={result.n} halted={result.steps_halted}")
        return EXIT_OK
    for message in report.messages():
        print(message)
    return EXIT_VERIFY


def main(argv: Optional[Sequence[str]] = None) -> int:
    """CLI entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = _load_config(args.config)
    except (FileNotFoundError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    log_file = config.logging.file if args.log_file is None else (args.log_file or None)
    setup_logging(
        log_file=log_file,
        level=args.log_level or config.logging.level,
        rotation=config.logging.rotation,
        retention=config.logging.retention,
    )

    try:
        if args.command == "gen-graph":
            return cmd_gen_graph(args, config)
        if args.command == "run":
            return cmd_run(args, config)
        if args.command == "sweep":
            return cmd_sweep(args, config)
        if args.command == "bounds":
            return cmd_bounds(args)
        return cmd_verify(args)
    except NotStronglyConnectedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_CONNECTED
    except (ConfigError, ValidationError, GraphError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
