"""
Trial records and their CSV/JSON forms.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..utils.config import Mode
from .trace import RoundTrace

CSV_HEADER = [
    "trial",
    "seed",
    "n",
    "m_edges",
    "D",
    "d_prime",
    "mode",
    "steps_converged",
    "steps_halted",
    "correct",
    "leader_count",
    "deadlocked",
]


@dataclass
class ElectionOutcome:
    """Result of the randomized max-consensus leader election."""
    flags: List[bool]
    leader_count: int
    leaders_by_round: List[int]
    rounds: int

    @property
    def leaders(self) -> List[int]:
        return [j for j, flag in enumerate(self.flags) if flag]


@dataclass
class TrialResult:
    """Outcome of one trial.

    ``steps_converged`` is the first round at whose end every node held the
    target value; ``steps_halted`` is the round of the distributed stop (None
    when the trial did not halt or the mode has no stopping). ``halt_rounds``
    are the per-node halting rounds of the averaging iteration.

    ``halted`` means the run ended before ``max_steps``: by the distributed
    stop, or by oracle convergence in modes without stopping.
    """
    mode: Mode
    n: int
    m_edges: int
    diameter: int
    d_prime: int
    steps_converged: Optional[int]
    steps_halted: Optional[int]
    finals: List[Tuple[int, int]]
    halt_rounds: List[Optional[int]]
    correct: bool
    leader_count: int
    deadlocked: bool
    halted: bool
    last_send_round: int = -1
    leaders_by_round: List[int] = field(default_factory=list)
    initial_values: Optional[List[int]] = None
    trial: int = 0
    seed: int = 0
    violations: List[str] = field(default_factory=list)
    trace: Optional[RoundTrace] = field(default=None, repr=False, compare=False)
    states: Optional[List[Tuple[int, List[Tuple[int, int]]]]] = field(default=None, repr=False, compare=False)

    @property
    def steps(self) -> Optional[int]:
        """Step count used in statistics: halting round, else convergence round."""
        return self.steps_halted if self.steps_halted is not None else self.steps_converged

    def to_row(self) -> List[Any]:
        """Row values in CSV_HEADER order."""
        return [
            self.trial,
            self.seed,
            self.n,
            self.m_edges,
            self.diameter,
            self.d_prime,
            self.mode.value,
            self.steps_converged,
            self.steps_halted,
            str(self.correct).lower(),
            self.leader_count,
            str(self.deadlocked).lower(),
        ]

    def to_dict(self) -> Dict[str, Any]:
        """JSON-friendly summary (without trace and state dump)."""
        return {
            "trial": self.trial,
            "seed": self.seed,
            "mode": self.mode.value,
            "n": self.n,
            "m_edges": self.m_edges,
            "diameter": self.diameter,
            "d_prime": self.d_prime,
            "steps_converged": self.steps_converged,
            "steps_halted": self.steps_halted,
            "finals": [list(pair) for pair in self.finals],
            "halt_rounds": self.halt_rounds,
            "correct": self.correct,
            "leader_count": self.leader_count,
            "leaders_by_round": self.leaders_by_round,
            "deadlocked": self.deadlocked,
            "halted": self.halted,
            "last_send_round": self.last_send_round,
            "violations": self.violations,
        }
