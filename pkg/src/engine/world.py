"""
Synchronous round scheduler.

One call to ``step_round`` runs round ``k`` for every node, in this order:

    election   (when active) reset at a cycle start, one max exchange,
               conclude at a cycle end (demoted leaders may inject a correction)
    1          vote reset at a cycle start
    2-4        vote exchange with in-neighbors and min/max merge
    5          delivery of the masses sent in round k-1
    6          state stamp and mass transmission (ascending node id)
    7          stop check at a cycle end

Masses sent in phase 6 are delivered in phase 5 of the next round; votes
are exchanged and merged within the round.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from ..graph.digraph import Digraph
from ..protocol.messages import MassMessage
from ..protocol.node import (
    NodeState,
    RandomSource,
    Trigger,
    VoteSource,
    assign_probabilities,
    inject_correction,
    leader_max_step,
    leader_round_conclude,
    leader_round_reset,
    merge_received,
    stop_check,
    update_state_and_transmit,
    vote_merge,
    vote_reset,
)
from ..utils.helpers import format_ratio
from .trace import RoundTrace


@dataclass
class World:
    """Everything one trial needs between rounds."""
    graph: Digraph
    nodes: List[NodeState]
    rng: RandomSource
    d_prime: int
    trigger: Trigger = Trigger.GEQ1
    vote_source: VoteSource = VoteSource.RATIO
    corrections: bool = False
    round: int = 0

    # election sub-protocol runs on rounds election_start..election_end (0 = off)
    election_start: int = 0
    election_end: int = 0
    eta_max: List[int] = field(default_factory=list)
    leaders_by_round: List[int] = field(default_factory=list)
    corrections_injected: int = 0

    # averaging iteration starts at mass_start; stop checks from stop_from (None = never)
    mass_start: Optional[int] = None
    stop_from: Optional[int] = None
    in_flight: List[Tuple[int, MassMessage]] = field(default_factory=list)
    last_send_round: int = -1
    last_check_round: int = -1
    halt_rounds: List[Optional[int]] = field(default_factory=list)

    trace: RoundTrace = field(default_factory=lambda: RoundTrace(enabled=False))
    states: Optional[List[Tuple[int, List[Tuple[int, int]]]]] = None

    def __post_init__(self):
        if not self.halt_rounds:
            self.halt_rounds = [None] * self.graph.node_count

    @property
    def all_halted(self) -> bool:
        return all(node.halted for node in self.nodes)

    @property
    def leader_count(self) -> int:
        return sum(1 for node in self.nodes if node.leader_flag)

    def election_active(self, k: int) -> bool:
        return self.election_start > 0 and self.election_start <= k <= self.election_end

    def mass_active(self, k: int) -> bool:
        return self.mass_start is not None and k >= self.mass_start

    def is_frozen(self) -> bool:
        """No mass in flight and no transmission since before the current vote cycle."""
        return (
            not self.in_flight
            and self.last_send_round <= self.round - self.d_prime
            and self.round > self.election_end
        )

    def snapshot(self) -> List[Tuple[int, int]]:
        return [(node.state_y, node.state_z) for node in self.nodes]


def make_nodes(g: Digraph) -> List[NodeState]:
    """Fresh node states with their target distributions."""
    nodes = []
    for j in range(g.node_count):
        targets = assign_probabilities(j, g.out_degree(j), g.out_neighbors[j])
        nodes.append(NodeState(node=j, targets=targets))
    return nodes


def step_round(world: World) -> World:
    """Run one synchronous round and return the (updated) world."""
    k = world.round + 1
    world.round = k

    if world.election_active(k):
        _election_phase(world, k)
    if world.mass_active(k):
        _mass_phase(world, k)
    if world.states is not None:
        world.states.append((k, world.snapshot()))
    return world


def _election_phase(world: World, k: int) -> None:
    d = world.d_prime
    local = k - world.election_start + 1
    nodes = world.nodes
    in_neighbors = world.graph.in_neighbors

    if (local - 1) % d == 0:
        for node in nodes:
            leader_round_reset(node, world.eta_max[node.node], world.rng)

    values = [node.leader_value() for node in nodes]
    for node in nodes:
        leader_max_step(node, [values[i] for i in in_neighbors[node.node]])

    if local % d == 0:
        for node in nodes:
            was_leader = node.leader_flag
            leader_round_conclude(node)
            if was_leader and not node.leader_flag and world.corrections:
                inject_correction(node)
                world.corrections_injected += 1
                world.trace.record(k, "correction", node=node.node)
        leaders = [node.node for node in nodes if node.leader_flag]
        world.leaders_by_round.append(len(leaders))
        world.trace.record(k, "election", leaders=leaders)


def _mass_phase(world: World, k: int) -> None:
    d = world.d_prime
    local = k - world.mass_start + 1
    nodes = world.nodes
    in_neighbors = world.graph.in_neighbors
    trace = world.trace
    voting = world.stop_from is not None

    # phases 1-4
    if voting:
        if (local - 1) % d == 0:
            for node in nodes:
                if not node.halted:
                    vote_reset(node, world.vote_source)
        votes = [None if node.halted else node.vote_message() for node in nodes]
        for node in nodes:
            if not node.halted:
                vote_merge(node, [votes[i] for i in in_neighbors[node.node] if votes[i] is not None])

    # phase 5; halted nodes keep whatever reaches them
    delivered, world.in_flight = world.in_flight, []
    for dst, message in delivered:
        merge_received(nodes[dst], (message,))

    # phase 6
    for node in nodes:
        if node.halted:
            continue
        before = (node.state_y, node.state_z)
        sent = update_state_and_transmit(node, world.trigger, world.rng, world.corrections)
        if (node.state_y, node.state_z) != before:
            trace.record(k, "state", node=node.node, y=node.state_y, z=node.state_z)
        if sent is not None:
            target, message = sent
            world.in_flight.append((target, message))
            trace.record(k, "send", src=node.node, dst=target, y=message.y, z=message.z)
    if world.in_flight:
        world.last_send_round = k

    # phase 7
    if voting and local % d == 0 and k >= world.stop_from:
        world.last_check_round = k
        for node in nodes:
            if node.halted:
                continue
            trace.record(
                k, "vote", node=node.node,
                min=format_ratio(*node.vote_min.as_pair()), max=format_ratio(*node.vote_max.as_pair()),
            )
            if stop_check(node):
                world.halt_rounds[node.node] = k
                trace.record(k, "halt", node=node.node)
