"""
Ground-truth verification of finished trials and trace replay.

The verifier never raises; every problem becomes a Finding with the round
(and node, when there is one) where it was seen.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from loguru import logger

from ..graph.digraph import Digraph, degree_sequence, diameter
from ..utils.config import Mode
from ..utils.helpers import parse_ratio
from .results import TrialResult
from .trace import MASS_KINDS, RoundTrace

# modes whose first stop check is one vote cycle after the iteration starts
_PROMPT_STOP_MODES = frozenset({Mode.AVG_DEGREE, Mode.AVERAGE, Mode.SIZE_SEQ})


@dataclass
class Finding:
    """A single violation."""
    round: int
    node: Optional[int]
    message: str

    def __str__(self):
        where = f"round {self.round}"
        if self.node is not None:
            where += f", node {self.node}"
        return f"[{where}] {self.message}"


@dataclass
class VerificationReport:
    """All findings for one trial; empty means the trial checks out."""
    findings: List[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, round_: int, node: Optional[int], message: str) -> None:
        self.findings.append(Finding(round_, node, message))

    def messages(self) -> List[str]:
        return [str(f) for f in self.findings]


@dataclass
class ReplayResult:
    """What a trace says happened, rebuilt event by event."""
    n: int
    mode: Optional[str]
    trigger: Optional[str]
    d_prime: Optional[int]
    finals: List[Tuple[int, int]]
    halt_rounds: List[Optional[int]]
    token_counts: Dict[int, int] = field(default_factory=dict)
    corrections: int = 0
    initial_masses: List[Tuple[int, int]] = field(default_factory=list)
    end: Dict[str, Any] = field(default_factory=dict)
    findings: List[Finding] = field(default_factory=list)


def replay_trace(trace: RoundTrace, n: Optional[int] = None) -> ReplayResult:
    """
    Rebuild held masses, states and halts from a trace.

    Sends of round ``r`` are delivered at round ``r + 1``. At the end of every
    traced round the held plus in-flight mass must equal the initial mass
    minus one ``(1, 0)`` per correction, every send must carry exactly
    the mass its sender held, and a node that halts must have voted with
    equal min and max in that round.

    Args:
        trace: Recorded trace (must start with a ``config`` event unless ``n`` is given)
        n: Node count override

    Returns:
        ReplayResult with finals, halting rounds, token counts and findings
    """
    config = next(iter(trace.of_kind("config")), None)
    if config is not None:
        n = config.fields.get("n", n)
    if n is None:
        raise ValueError("Trace has no config event and no node count was given")

    replay = ReplayResult(
        n=n,
        mode=config.fields.get("mode") if config else None,
        trigger=config.fields.get("trigger") if config else None,
        d_prime=config.fields.get("d_prime") if config else None,
        finals=[(0, 1)] * n,
        halt_rounds=[None] * n,
    )
    held = [[0, 0] for _ in range(n)]
    base = [0, 0]
    outgoing: List[Tuple[int, int, int]] = []
    current: Optional[int] = None
    started = False

    def close_round(r: int) -> None:
        total_y = sum(h[0] for h in held) + sum(y for _, y, _ in outgoing)
        total_z = sum(h[1] for h in held) + sum(z for _, _, z in outgoing)
        expected = (base[0] - replay.corrections, base[1])
        if (total_y, total_z) != expected:
            replay.findings.append(Finding(
                r, None, f"mass not conserved: total ({total_y}, {total_z}) != expected {expected}"
            ))
        tokens = sum(1 for h in held if h[0] or h[1]) + len(outgoing)
        replay.token_counts[r] = tokens

    votes: Dict[int, Tuple[int, str, str]] = {}

    for event in trace.events:
        if event.kind == "end":
            replay.end = dict(event.fields)
            continue
        if event.kind == "vote":
            votes[event.fields["node"]] = (event.round, event.fields["min"], event.fields["max"])
            continue
        if event.kind not in MASS_KINDS:
            continue
        r = event.round
        if current is None or r > current:
            if current is not None and started:
                close_round(current)
            for dst, y, z in outgoing:
                held[dst][0] += y
                held[dst][1] += z
            outgoing = []
            current = r

        f = event.fields
        if event.kind == "init":
            node = f["node"]
            held[node] = [f["y"], f["z"]]
            base[0] += f["y"]
            base[1] += f["z"]
            replay.initial_masses.append((f["y"], f["z"]))
            replay.finals[node] = (f["sy"], f["sz"])
            started = True
        elif event.kind == "correction":
            held[f["node"]][0] -= 1
            replay.corrections += 1
        elif event.kind == "state":
            node = f["node"]
            if (f["y"], f["z"]) != tuple(held[node]):
                replay.findings.append(Finding(
                    r, node, f"state ({f['y']}, {f['z']}) does not match held mass {tuple(held[node])}"
                ))
            replay.finals[node] = (f["y"], f["z"])
        elif event.kind == "send":
            src = f["src"]
            if (f["y"], f["z"]) != tuple(held[src]):
                replay.findings.append(Finding(
                    r, src, f"sent ({f['y']}, {f['z']}) but held {tuple(held[src])}"
                ))
            held[src] = [0, 0]
            outgoing.append((f["dst"], f["y"], f["z"]))
        elif event.kind == "halt":
            node = f["node"]
            replay.halt_rounds[node] = r
            vote = votes.get(node)
            if vote is not None and vote[0] == r:
                low, high = Fraction(*parse_ratio(vote[1])), Fraction(*parse_ratio(vote[2]))
                if low != high:
                    replay.findings.append(Finding(
                        r, node, f"halted with min vote {vote[1]} != max vote {vote[2]}"
                    ))

    if current is not None and started:
        close_round(current)
    return replay


def _expected_ratio(g: Digraph, result: TrialResult) -> Optional[Fraction]:
    if result.mode == Mode.AVG_DEGREE:
        return Fraction(sum(degree_sequence(g)), g.node_count)
    if result.mode == Mode.AVERAGE and result.initial_values:
        return Fraction(sum(result.initial_values), len(result.initial_values))
    return None


def ground_truth_verify(
    g: Digraph,
    result: TrialResult,
    trace: Optional[RoundTrace] = None,
) -> VerificationReport:
    """
    Check a finished trial against the exact answer.

    Checks the final value at every node, simultaneous halting on a multiple
    of ``d_prime``, and, given a trace, mass conservation at every round,
    send/state consistency, token-count monotonicity under ``geq1`` and
    agreement between the replayed and the reported finals.
    """
    report = VerificationReport()
    n = g.node_count
    last = result.steps_halted if result.steps_halted is not None else max(result.last_send_round, 0)

    if result.deadlocked:
        report.add(result.last_send_round, None,
                   f"no transmissions after round {result.last_send_round}, not converged")
    elif not result.halted:
        report.add(last, None, "did not halt within the step budget")

    if result.mode == Mode.LEADER_ELECTION:
        if result.leader_count < 1:
            report.add(last, None, "election ended without a leader")
    else:
        target = _expected_ratio(g, result)
        for node, (y, z) in enumerate(result.finals):
            if target is not None:
                if z <= 0 or Fraction(y, z) != target:
                    report.add(last, node, f"final {y}/{z} != {target.numerator}/{target.denominator}")
            elif z != n:
                report.add(last, node, f"final z {z} != network size {n}")

    stopping = result.mode not in (Mode.SIZE_ANONYMOUS, Mode.LEADER_ELECTION)
    if stopping:
        rounds = {r for r in result.halt_rounds if r is not None}
        if len(rounds) > 1:
            report.add(min(rounds), None, f"nodes halted on different rounds: {sorted(rounds)}")
        elif rounds and len([r for r in result.halt_rounds if r is None]) > 0:
            report.add(min(rounds), None, "some nodes halted while others kept running")
        for node, r in enumerate(result.halt_rounds):
            if r is not None and r % result.d_prime != 0:
                report.add(r, node, f"halted at round {r}, not a multiple of d_prime {result.d_prime}")

    if result.steps_halted is not None and result.steps_converged is not None:
        if result.steps_halted < result.steps_converged:
            report.add(result.steps_halted, None,
                       f"halted at {result.steps_halted} before converging at {result.steps_converged}")
        elif (result.mode in _PROMPT_STOP_MODES and result.d_prime >= result.diameter
              and result.steps_halted - result.steps_converged > 2 * result.d_prime):
            report.add(result.steps_halted, None,
                       f"halting lagged convergence by more than {2 * result.d_prime} rounds")

    if trace is not None and trace.enabled and len(trace):
        replay = replay_trace(trace, n)
        report.findings.extend(replay.findings)

        if replay.trigger == "geq1" and replay.corrections == 0:
            previous = None
            for r in sorted(replay.token_counts):
                count = replay.token_counts[r]
                if previous is not None and count > previous:
                    report.add(r, None, f"token count rose from {previous} to {count}")
                previous = count

        if result.mode != Mode.LEADER_ELECTION:
            for node in range(n):
                if replay.finals[node] != tuple(result.finals[node]):
                    report.add(last, node, f"replayed final {replay.finals[node]} != reported {result.finals[node]}")
            if replay.halt_rounds != list(result.halt_rounds):
                report.add(last, None, "replayed halting rounds differ from the reported ones")

    for finding in report.findings:
        logger.warning(f"Verification: {finding}")
    return report


def trial_from_trace(g: Digraph, trace: RoundTrace) -> TrialResult:
    """
    Rebuild a TrialResult from a recorded trace and the graph it ran on.

    Values the trace does not carry (halted, deadlocked, convergence round,
    leader count) come from its ``end`` event.
    """
    replay = replay_trace(trace, g.node_count)
    if replay.mode is None or replay.d_prime is None:
        raise ValueError("Trace has no config event")
    mode = Mode(replay.mode)
    end = replay.end
    halts = [r for r in replay.halt_rounds if r is not None]
    halted = end.get("halted", bool(halts) and len(halts) == g.node_count)

    initial_values = None
    if mode == Mode.AVERAGE:
        initial_values = [y for y, _ in replay.initial_masses]

    return TrialResult(
        mode=mode,
        n=g.node_count,
        m_edges=g.edge_count,
        diameter=diameter(g),
        d_prime=replay.d_prime,
        steps_converged=end.get("steps_converged"),
        steps_halted=end.get("steps_halted", max(halts) if halted and halts else None),
        finals=list(replay.finals),
        halt_rounds=list(replay.halt_rounds),
        correct=False,
        leader_count=end.get("leader_count", 0),
        deadlocked=end.get("deadlocked", False),
        halted=halted,
        last_send_round=end.get("last_send_round", -1),
        initial_values=initial_values,
        trace=trace,
    )
