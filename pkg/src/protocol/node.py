"""
Per-node state machine for quantized averaging, min/max voting and leader election.

Every operation acts on one NodeState plus explicit inputs. Operations update
the node in place and return it, so the engine can run them node by node
between barrier-synchronised message exchanges.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Protocol, Sequence, Tuple

from .messages import LeaderValue, MassMessage, VoteMessage
from .ratio import Ratio


class ProtocolError(ValueError):
    """Impossible protocol input (e.g. a node with no out-neighbors)."""


class Trigger(str, Enum):
    """Condition under which a node stamps its state and forwards its mass."""
    GEQ1 = "geq1"  # z >= 1
    GT1 = "gt1"  # z > 1, may freeze every token


class VoteSource(str, Enum):
    """What a node votes on at the start of a voting cycle."""
    RATIO = "ratio"  # y^s / z^s
    NUMERATOR = "numerator"  # y^s / 1


class RandomSource(Protocol):
    """Draws used by the protocol; the engine supplies seeded or stub implementations."""

    def random(self) -> float: ...

    def randint(self, a: int, b: int) -> int: ...


@dataclass(frozen=True)
class TargetDistribution:
    """Uniform choice over the out-neighbors (ascending) followed by the node itself."""
    node: int
    targets: Tuple[int, ...]

    @property
    def probability(self) -> Fraction:
        return Fraction(1, len(self.targets))

    def probabilities(self) -> List[Tuple[int, Fraction]]:
        p = self.probability
        return [(t, p) for t in self.targets]

    def choose(self, u: float) -> int:
        """Inverse-CDF pick for one uniform draw ``u`` in [0, 1)."""
        index = int(u * len(self.targets))
        if index >= len(self.targets):
            index = len(self.targets) - 1
        return self.targets[index]


@dataclass
class NodeState:
    """Mass, state, voting and election variables of one node."""
    node: int
    targets: TargetDistribution
    mass_y: int = 0
    mass_z: int = 0
    state_y: int = 0
    state_z: int = 1
    vote_min: Ratio = field(default_factory=lambda: Ratio(0, 1))
    vote_max: Ratio = field(default_factory=lambda: Ratio(0, 1))
    leader_flag: bool = True
    eta: int = -1
    leader_max: int = -1
    halted: bool = False

    @property
    def state_q(self) -> Ratio:
        return Ratio(self.state_y, self.state_z)

    @property
    def out_degree(self) -> int:
        return len(self.targets.targets) - 1

    def vote_message(self) -> VoteMessage:
        return VoteMessage(max_pair=self.vote_max, min_pair=self.vote_min)

    def leader_value(self) -> LeaderValue:
        return LeaderValue(self.leader_max)


def assign_probabilities(node: int, out_degree: int, targets: Sequence[int]) -> TargetDistribution:
    """
    Give every out-neighbor and the node itself probability ``1 / (1 + D+)``.

    Args:
        node: Node id (appended as the last target)
        out_degree: Number of out-neighbors
        targets: Out-neighbor ids

    Returns:
        TargetDistribution with ``1 + out_degree`` equally likely targets

    Raises:
        ProtocolError: If the node has no out-neighbors or the degree does not match
    """
    if out_degree < 1:
        raise ProtocolError(f"Node {node} has out-degree {out_degree}; a strongly connected digraph has none")
    if out_degree != len(targets):
        raise ProtocolError(f"Node {node}: out_degree {out_degree} != {len(targets)} targets")
    if node in targets:
        raise ProtocolError(f"Node {node} lists itself as an out-neighbor")
    return TargetDistribution(node=node, targets=tuple(sorted(targets)) + (node,))


def init_quantized_average(
    node: int,
    targets: TargetDistribution,
    initial_value: int,
    rng: RandomSource,
) -> Tuple[NodeState, MassMessage, int]:
    """
    Initialise a node holding an integer value and send its mass right away.

    The state is ``(initial_value, 1)``; the mass ``(initial_value, 1)`` leaves
    immediately towards one randomly chosen target and the held mass is zero.

    Returns:
        Tuple of (node state, outgoing mass, chosen target)
    """
    state = NodeState(node=node, targets=targets, state_y=initial_value, state_z=1)
    message = MassMessage(initial_value, 1)
    target = targets.choose(rng.random())
    return state, message, target


def init_average_degree(
    node: int,
    targets: TargetDistribution,
    rng: RandomSource,
) -> Tuple[NodeState, MassMessage, int]:
    """Initialisation for average-degree computation: the initial value is ``D+_j``."""
    out_degree = len(targets.targets) - 1
    return init_quantized_average(node, targets, out_degree, rng)


def init_network_size(node: int, targets: TargetDistribution, is_leader: bool) -> NodeState:
    """Leader starts with mass ``(1, 1)``, followers with ``(0, 1)``; state copies the mass."""
    y = 1 if is_leader else 0
    return NodeState(
        node=node,
        targets=targets,
        mass_y=y,
        mass_z=1,
        state_y=y,
        state_z=1,
        leader_flag=is_leader,
    )


def merge_received(node: NodeState, delivered: Iterable[MassMessage]) -> NodeState:
    """Add every delivered mass to the held mass."""
    for message in delivered:
        node.mass_y += message.y
        node.mass_z += message.z
    return node


def update_state_and_transmit(
    node: NodeState,
    trigger: Trigger,
    rng: RandomSource,
    corrections: bool = False,
) -> Optional[Tuple[int, MassMessage]]:
    """
    Stamp the state from the held mass and forward the mass when the trigger holds.

    Under ``geq1`` the condition is ``z >= 1``; under ``gt1`` it is ``z > 1``
    and a lone unit mass is kept. With ``corrections`` a mass with ``y != 0``
    and ``z == 0`` is also forwarded, without touching the state.

    Returns:
        ``(target, message)`` when a transmission happens, otherwise None
    """
    y, z = node.mass_y, node.mass_z
    if trigger == Trigger.GEQ1:
        stamp = z >= 1
    else:
        stamp = z > 1
    forward = stamp or (corrections and z == 0 and y != 0)
    if not forward:
        return None

    if stamp:
        node.state_y = y
        node.state_z = z
    target = node.targets.choose(rng.random())
    node.mass_y = 0
    node.mass_z = 0
    return target, MassMessage(y, z)


def inject_correction(node: NodeState) -> NodeState:
    """Add the correction mass ``(-1, 0)`` that cancels a provisional leader unit."""
    node.mass_y -= 1
    return node


def vote_reset(node: NodeState, source: VoteSource) -> NodeState:
    """Start a voting cycle from the current state."""
    if source == VoteSource.RATIO:
        value = Ratio(node.state_y, node.state_z)
    else:
        value = Ratio(node.state_y, 1)
    node.vote_min = value
    node.vote_max = value
    return node


def vote_merge(node: NodeState, received: Iterable[VoteMessage]) -> NodeState:
    """Keep the exact max and min over the node's own and the received votes."""
    vote_max = node.vote_max
    vote_min = node.vote_min
    for message in received:
        if message.max_pair > vote_max:
            vote_max = message.max_pair
        if message.min_pair < vote_min:
            vote_min = message.min_pair
    node.vote_max = vote_max
    node.vote_min = vote_min
    return node


def stop_check(node: NodeState) -> bool:
    """Halt the node when its max and min votes are equal rationals."""
    if node.vote_max == node.vote_min:
        node.halted = True
    return node.halted


def leader_round_reset(node: NodeState, eta_max: int, rng: RandomSource) -> NodeState:
    """
    Draw a fresh election value for a node still flagged as leader.

    Raises:
        ProtocolError: If ``eta_max < 1``
    """
    if eta_max < 1:
        raise ProtocolError(f"eta_max must be >= 1, got {eta_max}")
    if node.leader_flag:
        node.eta = rng.randint(0, eta_max)
    else:
        node.eta = -1
    node.leader_max = node.eta
    return node


def leader_max_step(node: NodeState, received: Iterable[LeaderValue]) -> NodeState:
    """One max-consensus step over the election values."""
    best = node.leader_max
    for message in received:
        if message.v > best:
            best = message.v
    node.leader_max = best
    return node


def leader_round_conclude(node: NodeState) -> NodeState:
    """Clear the leader flag unless the node drew the maximum it has seen."""
    if node.leader_max != node.eta:
        node.leader_flag = False
    return node
