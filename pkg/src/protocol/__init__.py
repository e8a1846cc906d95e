"""
Per-node protocol rules: exact ratios, messages and state transitions.
"""
from .ratio import Ratio
from .messages import MassMessage, VoteMessage, LeaderValue, Message
from .node import (
    ProtocolError,
    Trigger,
    VoteSource,
    RandomSource,
    TargetDistribution,
    NodeState,
    assign_probabilities,
    init_quantized_average,
    init_average_degree,
    init_network_size,
    merge_received,
    update_state_and_transmit,
    inject_correction,
    vote_reset,
    vote_merge,
    stop_check,
    leader_round_reset,
    leader_max_step,
    leader_round_conclude,
)

__all__ = [
    'Ratio',
    'MassMessage',
    'VoteMessage',
    'LeaderValue',
    'Message',
    'ProtocolError',
    'Trigger',
    'VoteSource',
    'RandomSource',
    'TargetDistribution',
    'NodeState',
    'assign_probabilities',
    'init_quantized_average',
    'init_average_degree',
    'init_network_size',
    'merge_received',
    'update_state_and_transmit',
    'inject_correction',
    'vote_reset',
    'vote_merge',
    'stop_check',
    'leader_round_reset',
    'leader_max_step',
    'leader_round_conclude',
]
