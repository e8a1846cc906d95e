"""
Round trace: one structured event per line (JSON), replayable by the verifier.

Event kinds:
    config      mode, n, d_prime, trigger, vote (round 0)
    init        node, y, z (held mass), sy, sz (state)
    send        src, dst, y, z
    state       node, y, z (new state pair)
    correction  node (a (-1, 0) mass added to the node's held mass)
    vote        node, min, max (at stop checks)
    halt        node
    election    leaders (ids still flagged after a round of the election)
    end         halted, deadlocked, steps_converged, steps_halted, leader_count, last_send_round
"""
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List

from ..utils.helpers import ensure_parent_dir, read_text

MASS_KINDS = frozenset({"init", "send", "state", "correction", "halt"})


@dataclass
class TraceEvent:
    """A single traced event."""
    round: int
    kind: str
    fields: Dict[str, Any] = field(default_factory=dict)

    def to_line(self) -> str:
        payload = {"round": self.round, "kind": self.kind}
        payload.update(self.fields)
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_line(cls, line: str) -> "TraceEvent":
        payload = json.loads(line)
        round_ = payload.pop("round")
        kind = payload.pop("kind")
        return cls(round=round_, kind=kind, fields=payload)


class RoundTrace:
    """Ordered event log of one trial. A disabled trace records nothing."""

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self.events: List[TraceEvent] = []

    def record(self, round_: int, kind: str, **fields) -> None:
        if self.enabled:
            self.events.append(TraceEvent(round_, kind, fields))

    def of_kind(self, *kinds: str) -> List[TraceEvent]:
        return [e for e in self.events if e.kind in kinds]

    def to_lines(self) -> List[str]:
        return [e.to_line() for e in self.events]

    def write(self, path: str) -> None:
        """Write the trace as line-delimited JSON."""
        target = ensure_parent_dir(path)
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            for line in self.to_lines():
                f.write(line + "\n")

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "RoundTrace":
        trace = cls(enabled=True)
        for line in lines:
            if line.strip():
                trace.events.append(TraceEvent.from_line(line))
        return trace

    @classmethod
    def load(cls, path: str) -> "RoundTrace":
        text = read_text(path)
        if text is None:
            raise FileNotFoundError(f"Trace file not found: {path}")
        return cls.from_lines(text.splitlines())

    def __len__(self):
        return len(self.events)
