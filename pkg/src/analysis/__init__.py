"""
Closed-form bounds and trial statistics.
"""
from .bounds import (
    BoundInputs,
    BoundResult,
    K0Result,
    lemma1_bound,
    lemma2_bound,
    theorem2_k0,
    leader_success_lower_bound,
    leader_success_binomial,
    max_tie_distribution,
    election_multi_leader_probability,
    evaluate_all,
)
from .stats import TrialStats, aggregate_trials, empirical_quantile, multi_leader_curve

__all__ = [
    'BoundInputs',
    'BoundResult',
    'K0Result',
    'lemma1_bound',
    'lemma2_bound',
    'theorem2_k0',
    'leader_success_lower_bound',
    'leader_success_binomial',
    'max_tie_distribution',
    'election_multi_leader_probability',
    'evaluate_all',
    'TrialStats',
    'aggregate_trials',
    'empirical_quantile',
    'multi_leader_curve',
]
