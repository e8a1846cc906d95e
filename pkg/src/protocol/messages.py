"""
Messages exchanged between nodes in one synchronous round.
"""
from dataclasses import dataclass
from typing import Union

from .ratio import Ratio


@dataclass(frozen=True)
class MassMessage:
    """Mass pair ``(y, z)`` forwarded to one out-neighbor (or to the sender itself)."""
    y: int
    z: int


@dataclass(frozen=True)
class VoteMessage:
    """Voting pair broadcast to every out-neighbor; both values travel as integer pairs."""
    max_pair: Ratio
    min_pair: Ratio


@dataclass(frozen=True)
class LeaderValue:
    """Current election maximum ``M'`` of a node (-1 for a follower)."""
    v: int


Message = Union[MassMessage, VoteMessage, LeaderValue]
