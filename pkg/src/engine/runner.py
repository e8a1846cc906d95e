"""
Trial runner: mode orchestration on top of the round scheduler.
"""
from typing import Callable, List, Optional, Sequence, Tuple

from loguru import logger

from ..graph.digraph import Digraph, NotStronglyConnectedError, degree_sequence, diameter, is_strongly_connected
from ..protocol.node import (
    NodeState,
    RandomSource,
    init_network_size,
    init_quantized_average,
)
from ..utils.config import Mode, SimConfig
from .results import ElectionOutcome, TrialResult
from .trace import RoundTrace
from .world import World, make_nodes, step_round


def check_d_prime(diam: int, d_prime: int) -> Tuple[bool, str]:
    """
    Check that D' is an upper bound of the diameter.

    Returns:
        Tuple of (ok, message)
    """
    if d_prime < diam:
        return False, f"d_prime {d_prime} < diameter {diam}; nodes may stop before agreement"
    return True, f"d_prime {d_prime} >= diameter {diam}"


def _resolve(g: Digraph, cfg: SimConfig) -> Tuple[int, SimConfig, List[str]]:
    """Diameter, effective config and setup warnings for a run on ``g``."""
    if not is_strongly_connected(g):
        raise NotStronglyConnectedError(f"Graph with {g.node_count} nodes is not strongly connected")
    diam = diameter(g)
    if cfg.d_prime_auto and cfg.d_prime != diam:
        cfg = cfg.model_copy(update={"d_prime": diam})

    warnings = []
    ok, msg = check_d_prime(diam, cfg.d_prime)
    if not ok:
        logger.warning(msg)
        warnings.append(msg)
    if cfg.fixed_leader is not None and cfg.fixed_leader >= g.node_count:
        raise ValueError(f"fixed_leader {cfg.fixed_leader} is out of range for {g.node_count} nodes")
    return diam, cfg, warnings


def _new_trace(cfg: SimConfig, n: int, trace: Optional[RoundTrace]) -> RoundTrace:
    if trace is None:
        trace = RoundTrace(enabled=cfg.capture_trace)
    trace.record(
        0,
        "config",
        mode=cfg.mode.value,
        n=n,
        d_prime=cfg.d_prime,
        trigger=cfg.trigger.value,
        vote=cfg.vote.value,
    )
    return trace


def _ratio_target(values: Sequence[int]) -> Callable[[World], bool]:
    total, n = sum(values), len(values)

    def reached(world: World) -> bool:
        return all(node.state_y * n == total * node.state_z for node in world.nodes)

    return reached


def _size_target(n: int) -> Callable[[World], bool]:
    def reached(world: World) -> bool:
        return all(node.state_z == n for node in world.nodes)

    return reached


def _drive(
    world: World,
    max_steps: int,
    reached: Callable[[World], bool],
    stopping: bool = True,
) -> Tuple[Optional[int], bool]:
    """
    Step the world until it halts, deadlocks or hits ``max_steps``.

    ``reached`` is evaluated at the end of every round; the reported
    convergence round is the start of the last stretch where it held.

    Returns:
        Tuple of (steps_converged, deadlocked)
    """
    converged = world.round if reached(world) else None
    while world.round < max_steps:
        step_round(world)
        if reached(world):
            if converged is None:
                converged = world.round
        else:
            converged = None

        if stopping:
            if world.all_halted:
                break
            if world.last_check_round == world.round and world.is_frozen():
                logger.warning(f"Deadlock at round {world.round}: stop check failed with frozen states")
                return converged, True
        else:
            if converged is not None:
                break
            if not world.in_flight and world.round > world.election_end:
                logger.warning(f"Deadlock at round {world.round}: no mass left in flight")
                return converged, True
    return converged, False


def run_leader_election(
    g: Digraph,
    cfg: SimConfig,
    rng: RandomSource,
    trace: Optional[RoundTrace] = None,
) -> ElectionOutcome:
    """
    Randomized max-consensus leader election over ``u_v`` rounds of ``d_prime`` steps.

    Every node starts flagged. At the start of each round flagged nodes draw
    a value in ``[0, eta_max]``, the maximum spreads for ``d_prime`` steps and
    nodes that did not draw it clear their flag. At least one node stays flagged.
    """
    nodes = make_nodes(g)
    rounds = cfg.u_v * cfg.d_prime
    world = World(
        graph=g,
        nodes=nodes,
        rng=rng,
        d_prime=cfg.d_prime,
        election_start=1,
        election_end=rounds,
        eta_max=[cfg.eta_max_for(j) for j in range(g.node_count)],
        trace=trace if trace is not None else RoundTrace(enabled=False),
    )
    for _ in range(rounds):
        step_round(world)

    flags = [node.leader_flag for node in world.nodes]
    outcome = ElectionOutcome(
        flags=flags,
        leader_count=sum(flags),
        leaders_by_round=list(world.leaders_by_round),
        rounds=rounds,
    )
    logger.debug(f"Election finished after {rounds} rounds with {outcome.leader_count} leader(s)")
    return outcome


def run_quantized_average(
    g: Digraph,
    values: Sequence[int],
    cfg: SimConfig,
    rng: RandomSource,
    trace: Optional[RoundTrace] = None,
) -> TrialResult:
    """
    Exact quantized average consensus of integer values with distributed stopping.

    Every node sends its initial mass ``(value, 1)`` at round 0; from round 1
    the rounds follow the scheduler's phase order and all nodes halt at the
    first vote-cycle boundary where the min and max votes agree.
    """
    diam, cfg, warnings = _resolve(g, cfg)
    n = g.node_count
    if len(values) != n:
        raise ValueError(f"Expected {n} initial values, got {len(values)}")

    trace = _new_trace(cfg, n, trace)
    world = World(
        graph=g,
        nodes=[],
        rng=rng,
        d_prime=cfg.d_prime,
        trigger=cfg.trigger,
        vote_source=cfg.vote,
        mass_start=1,
        stop_from=cfg.d_prime,
        trace=trace,
        states=[] if cfg.capture_states else None,
    )
    for node in make_nodes(g):
        state, message, target = init_quantized_average(node.node, node.targets, values[node.node], rng)
        world.nodes.append(state)
        world.in_flight.append((target, message))
        trace.record(0, "init", node=node.node, y=message.y, z=message.z, sy=state.state_y, sz=state.state_z)
        trace.record(0, "send", src=node.node, dst=target, y=message.y, z=message.z)
    world.last_send_round = 0
    if world.states is not None:
        world.states.append((0, world.snapshot()))

    converged, deadlocked = _drive(world, cfg.resolved_max_steps(n), _ratio_target(values))
    result = _result(world, cfg, diam, converged, deadlocked, stopping=True)
    result.initial_values = list(values)
    result.correct = _ratio_target(values)(world)
    result.violations.extend(warnings)
    _finish(result, world.round)
    return result


def run_average_degree(
    g: Digraph,
    cfg: SimConfig,
    rng: RandomSource,
    trace: Optional[RoundTrace] = None,
) -> TrialResult:
    """Average out-degree: the quantized average with initial values ``D+_j``."""
    values = list(degree_sequence(g))
    return run_quantized_average(g, values, cfg.model_copy(update={"mode": Mode.AVG_DEGREE}), rng, trace)


def _size_world(
    g: Digraph,
    cfg: SimConfig,
    rng: RandomSource,
    leaders: Sequence[bool],
    start_round: int,
    trace: RoundTrace,
    stopping: bool = True,
) -> World:
    """Size iteration starting after round ``start_round`` with the given leader flags."""
    nodes: List[NodeState] = []
    for node in make_nodes(g):
        state = init_network_size(node.node, node.targets, leaders[node.node])
        nodes.append(state)
        trace.record(start_round, "init", node=node.node, y=state.mass_y, z=state.mass_z,
                     sy=state.state_y, sz=state.state_z)
    world = World(
        graph=g,
        nodes=nodes,
        rng=rng,
        d_prime=cfg.d_prime,
        trigger=cfg.trigger,
        vote_source=cfg.vote,
        round=start_round,
        mass_start=start_round + 1,
        stop_from=start_round + cfg.d_prime if stopping else None,
        trace=trace,
        states=[] if cfg.capture_states else None,
    )
    if world.states is not None:
        world.states.append((start_round, world.snapshot()))
    return world


def _fixed_or_elected(
    g: Digraph,
    cfg: SimConfig,
    rng: RandomSource,
    trace: RoundTrace,
) -> Tuple[List[bool], Optional[ElectionOutcome]]:
    if cfg.fixed_leader is not None:
        flags = [j == cfg.fixed_leader for j in range(g.node_count)]
        return flags, None
    outcome = run_leader_election(g, cfg, rng, trace)
    if outcome.leader_count > 1:
        logger.warning(f"Election ended with {outcome.leader_count} leaders")
    return outcome.flags, outcome


def run_network_size(
    g: Digraph,
    cfg: SimConfig,
    rng: RandomSource,
    trace: Optional[RoundTrace] = None,
) -> TrialResult:
    """
    Network size computation in one of the four size modes.

    size-seq runs the election for ``u_v * d_prime`` rounds and then the size
    iteration with the elected leader; size-par-oracle runs both from round 1
    (the iteration uses the eventual winner) and reports
    ``max(u_v * d_prime, halt)``; size-par-correction starts every node with
    ``(1, 1)`` and cancels demoted leaders with ``(-1, 0)`` masses;
    size-anonymous starts every node with ``(0, 1)`` and has no stopping.
    """
    diam, cfg, warnings = _resolve(g, cfg)
    if not cfg.mode.is_size:
        raise ValueError(f"run_network_size does not handle mode {cfg.mode.value}")
    n = g.node_count
    trace = _new_trace(cfg, n, trace)
    max_steps = cfg.resolved_max_steps(n)
    election_rounds = cfg.u_v * cfg.d_prime
    election: Optional[ElectionOutcome] = None

    if cfg.mode == Mode.SIZE_SEQ:
        flags, election = _fixed_or_elected(g, cfg, rng, trace)
        start = election_rounds if election is not None else 0
        world = _size_world(g, cfg, rng, flags, start, trace)
        converged, deadlocked = _drive(world, max_steps, _size_target(n))
        result = _result(world, cfg, diam, converged, deadlocked, stopping=True)
        result.leader_count = sum(flags)

    elif cfg.mode == Mode.SIZE_PAR_ORACLE:
        flags, election = _fixed_or_elected(g, cfg, rng, trace)
        world = _size_world(g, cfg, rng, flags, 0, trace)
        converged, deadlocked = _drive(world, max_steps, _size_target(n))
        result = _result(world, cfg, diam, converged, deadlocked, stopping=True)
        result.leader_count = sum(flags)
        if election is not None and result.steps_halted is not None:
            result.steps_halted = max(election_rounds, result.steps_halted)

    elif cfg.mode == Mode.SIZE_PAR_CORRECTION:
        world = _size_world(g, cfg, rng, [True] * n, 0, trace)
        world.corrections = True
        world.election_start = 1
        world.election_end = election_rounds
        world.eta_max = [cfg.eta_max_for(j) for j in range(n)]
        world.stop_from = election_rounds + cfg.d_prime
        converged, deadlocked = _drive(world, max_steps, _size_target(n))
        result = _result(world, cfg, diam, converged, deadlocked, stopping=True)
        result.leader_count = world.leader_count
        result.leaders_by_round = list(world.leaders_by_round)

    else:
        world = _size_world(g, cfg, rng, [False] * n, 0, trace, stopping=False)
        converged, deadlocked = _drive(world, max_steps, _size_target(n), stopping=False)
        result = _result(world, cfg, diam, converged, deadlocked, stopping=False)

    if election is not None:
        result.leaders_by_round = list(election.leaders_by_round)
    result.correct = all(z == n for _, z in result.finals)
    result.violations.extend(warnings)
    _finish(result, world.round)
    return result


def _result(
    world: World,
    cfg: SimConfig,
    diam: int,
    converged: Optional[int],
    deadlocked: bool,
    stopping: bool,
) -> TrialResult:
    g = world.graph
    if stopping:
        halted = world.all_halted
        steps_halted = max(r for r in world.halt_rounds if r is not None) if halted else None
    else:
        halted = converged is not None and not deadlocked
        steps_halted = None
    return TrialResult(
        mode=cfg.mode,
        n=g.node_count,
        m_edges=g.edge_count,
        diameter=diam,
        d_prime=cfg.d_prime,
        steps_converged=converged,
        steps_halted=steps_halted,
        finals=world.snapshot(),
        halt_rounds=list(world.halt_rounds),
        correct=False,
        leader_count=0,
        deadlocked=deadlocked,
        halted=halted,
        last_send_round=world.last_send_round,
        trace=world.trace if world.trace.enabled else None,
        states=world.states,
    )


def _finish(result: TrialResult, round_: int) -> None:
    if result.trace is not None:
        _record_end(result.trace, round_, result)
    if result.halted:
        logger.info(
            f"{result.mode.value}: n={result.n} D={result.diameter} d_prime={result.d_prime} "
            f"converged={result.steps_converged} halted={result.steps_halted} correct={result.correct}"
        )
    elif result.deadlocked:
        logger.warning(f"{result.mode.value}: deadlocked, last transmission at round {result.last_send_round}")
    else:
        logger.warning(f"{result.mode.value}: did not halt within the step budget")


def run_election_trial(
    g: Digraph,
    cfg: SimConfig,
    rng: RandomSource,
    trace: Optional[RoundTrace] = None,
) -> TrialResult:
    """Leader election on its own, reported as a trial.

    ``steps_converged`` is the first election round boundary after which a
    single leader was left; finals hold ``(flag, 1)`` per node.
    """
    diam, cfg, warnings = _resolve(g, cfg)
    trace = _new_trace(cfg, g.node_count, trace)
    outcome = run_leader_election(g, cfg, rng, trace)

    converged = None
    for index, count in enumerate(outcome.leaders_by_round):
        if count == 1:
            converged = (index + 1) * cfg.d_prime
            break
    result = TrialResult(
        mode=cfg.mode,
        n=g.node_count,
        m_edges=g.edge_count,
        diameter=diam,
        d_prime=cfg.d_prime,
        steps_converged=converged,
        steps_halted=outcome.rounds,
        finals=[(int(flag), 1) for flag in outcome.flags],
        halt_rounds=[outcome.rounds] * g.node_count,
        correct=outcome.leader_count >= 1,
        leader_count=outcome.leader_count,
        deadlocked=False,
        halted=True,
        leaders_by_round=list(outcome.leaders_by_round),
        trace=trace if trace.enabled else None,
    )
    if result.trace is not None:
        _record_end(result.trace, outcome.rounds, result)
    result.violations.extend(warnings)
    logger.info(f"leader-election: n={result.n} leaders={outcome.leader_count} rounds={outcome.rounds}")
    return result


def run_trial(
    g: Digraph,
    cfg: SimConfig,
    rng: RandomSource,
    trace: Optional[RoundTrace] = None,
) -> TrialResult:
    """Run one trial of ``cfg.mode`` on ``g``."""
    if cfg.mode == Mode.AVG_DEGREE:
        return run_average_degree(g, cfg, rng, trace)
    if cfg.mode == Mode.AVERAGE:
        return run_quantized_average(g, cfg.initial_values or [], cfg, rng, trace)
    if cfg.mode == Mode.LEADER_ELECTION:
        return run_election_trial(g, cfg, rng, trace)
    return run_network_size(g, cfg, rng, trace)


def _record_end(trace: RoundTrace, round_: int, result: TrialResult) -> None:
    trace.record(
        round_,
        "end",
        halted=result.halted,
        deadlocked=result.deadlocked,
        steps_converged=result.steps_converged,
        steps_halted=result.steps_halted,
        leader_count=result.leader_count,
        last_send_round=result.last_send_round,
    )
