"""
Round scheduler, mode orchestration, sweeps and verification.
"""
from .rng import SeededRNG, SelfLoopStubRNG, ConstantDrawRNG, make_rng, mix_seed, splitmix64, RNG_KINDS
from .trace import RoundTrace, TraceEvent
from .results import TrialResult, ElectionOutcome, CSV_HEADER
from .world import World, make_nodes, step_round
from .runner import (
    check_d_prime,
    run_leader_election,
    run_quantized_average,
    run_average_degree,
    run_network_size,
    run_election_trial,
    run_trial,
)
from .sweep import SweepOutcome, build_graph, run_single_trial, run_sweep, trial_seed
from .verify import Finding, VerificationReport, ReplayResult, replay_trace, ground_truth_verify, trial_from_trace

__all__ = [
    'SeededRNG',
    'SelfLoopStubRNG',
    'ConstantDrawRNG',
    'make_rng',
    'mix_seed',
    'splitmix64',
    'RNG_KINDS',
    'RoundTrace',
    'TraceEvent',
    'TrialResult',
    'ElectionOutcome',
    'CSV_HEADER',
    'World',
    'make_nodes',
    'step_round',
    'check_d_prime',
    'run_leader_election',
    'run_quantized_average',
    'run_average_degree',
    'run_network_size',
    'run_election_trial',
    'run_trial',
    'SweepOutcome',
    'build_graph',
    'run_single_trial',
    'run_sweep',
    'trial_seed',
    'Finding',
    'VerificationReport',
    'ReplayResult',
    'replay_trace',
    'ground_truth_verify',
    'trial_from_trace',
]
