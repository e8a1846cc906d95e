"""
Multi-trial sweeps with deterministic per-trial seeds.
"""
import concurrent.futures
import random
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from loguru import logger

from ..graph.digraph import Digraph, generate_random_digraph, generate_with_diameter
from ..graph.edgelist import load_edge_list
from ..utils.config import SimConfig
from .results import TrialResult
from .rng import make_rng, mix_seed
from .runner import run_trial


@dataclass
class SweepOutcome:
    """Results of a sweep in trial-index order."""
    results: List[TrialResult] = field(default_factory=list)
    rejected: int = 0  # generated graphs dropped by the diameter filter

    @property
    def failures(self) -> List[TrialResult]:
        return [r for r in self.results if not r.correct]


def trial_seed(master_seed: int, index: int) -> int:
    """Seed of trial ``index``; the graph and protocol streams derive from it."""
    return mix_seed(master_seed, index)


def build_graph(cfg: SimConfig, seed: int) -> Tuple[Digraph, int]:
    """
    Load ``cfg.graph_file`` or sample a fresh strongly connected digraph.

    Returns:
        Tuple of (digraph, graphs rejected by the diameter filter)
    """
    if cfg.graph_file:
        return load_edge_list(cfg.graph_file), 0
    graph_rng = random.Random(mix_seed(seed, 0))
    if cfg.target_diameter is not None:
        return generate_with_diameter(cfg.n, cfg.edge_prob, graph_rng, cfg.target_diameter, cfg.max_resamples)
    return generate_random_digraph(cfg.n, cfg.edge_prob, graph_rng, cfg.max_resamples), 0


def run_single_trial(
    cfg: SimConfig,
    index: int,
    graph: Optional[Digraph] = None,
    rng_kind: str = "seeded",
) -> Tuple[TrialResult, int]:
    """
    Run trial ``index`` of a sweep.

    Args:
        cfg: Simulation config
        index: Trial index (0-based)
        graph: Graph shared by every trial; a fresh graph is built when None
        rng_kind: Protocol random source (``seeded`` or ``stub-selfloop``)

    Returns:
        Tuple of (trial result, graphs rejected by the diameter filter)
    """
    seed = trial_seed(cfg.master_seed, index)
    rejected = 0
    if graph is None:
        graph, rejected = build_graph(cfg, seed)
    rng = make_rng(rng_kind, mix_seed(seed, 1))
    result = run_trial(graph, cfg, rng)
    result.trial = index
    result.seed = seed
    return result, rejected


def _trial_task(args) -> Tuple[TrialResult, int]:
    cfg, index, graph, rng_kind = args
    return run_single_trial(cfg, index, graph, rng_kind)


def run_sweep(
    cfg: SimConfig,
    workers: int = 1,
    graph: Optional[Digraph] = None,
    rng_kind: str = "seeded",
) -> SweepOutcome:
    """
    Run ``cfg.trials`` independent trials, in a process pool when ``workers > 1``.

    Results come back in trial-index order whatever the worker count.
    """
    tasks = [(cfg, index, graph, rng_kind) for index in range(cfg.trials)]
    outcome = SweepOutcome()

    if workers > 1 and cfg.trials > 1:
        chunksize = max(1, cfg.trials // (workers * 8))
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            pairs = list(executor.map(_trial_task, tasks, chunksize=chunksize))
    else:
        pairs = [_trial_task(task) for task in tasks]

    for result, rejected in pairs:
        outcome.results.append(result)
        outcome.rejected += rejected

    failed = len(outcome.failures)
    logger.info(
        f"Sweep finished: {len(outcome.results)} trials of {cfg.mode.value}, "
        f"{failed} incorrect, {outcome.rejected} graphs rejected by the diameter filter"
    )
    return outcome
