"""
Closed-form probability and step bounds for token merging, distributed
stopping and randomized leader election.

Probabilities are exact ``Fraction`` values; the k0 evaluation works with
``Decimal`` logarithms at 60 digits. Nothing here clamps silently: a bound
above 1 is returned as is and flagged ``vacuous``, and a bound whose
preconditions fail comes back with ``applicable=False`` and a reason.
"""
from dataclasses import dataclass
from decimal import ROUND_CEILING, Decimal, localcontext
from fractions import Fraction
from math import comb
from typing import Any, Dict, List, Optional, Union

from ..utils.helpers import format_decimal

LOG_PRECISION = 60


@dataclass(frozen=True)
class BoundInputs:
    """Parameters shared by the bound evaluators.

    ``m_levels`` is the number of election values, ``eta_max + 1``.
    """
    n: int
    d_max_out: int
    diam: int
    d_prime: Optional[int] = None
    p0: Union[Fraction, float, str] = Fraction(81, 100)
    u_v: int = 20
    m_levels: int = 256

    def __post_init__(self):
        for name in ("n", "d_max_out", "diam", "u_v", "m_levels"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.d_prime is None:
            object.__setattr__(self, "d_prime", self.diam)
        elif self.d_prime < 1:
            raise ValueError(f"d_prime must be positive, got {self.d_prime}")
        p0 = Fraction(str(self.p0)) if isinstance(self.p0, (float, str)) else Fraction(self.p0)
        if not 0 < p0 < 1:
            raise ValueError(f"p0 must be in (0, 1), got {self.p0}")
        object.__setattr__(self, "p0", p0)


@dataclass
class BoundResult:
    """One evaluated bound, printable as a report line."""
    name: str
    inputs: Dict[str, Any]
    value: Optional[Fraction] = None
    applicable: bool = True
    vacuous: bool = False
    reason: str = ""

    @property
    def reported(self) -> Optional[Fraction]:
        """Value shown in reports; vacuous bounds are shown clamped to [0, 1]."""
        if self.value is None:
            return None
        return min(max(self.value, Fraction(0)), Fraction(1))

    def to_text(self) -> str:
        args = " ".join(f"{k}={v}" for k, v in self.inputs.items())
        if not self.applicable:
            return f"{self.name}: {args} -> inapplicable ({self.reason})"
        exact = f"{self.value.numerator}/{self.value.denominator}"
        line = f"{self.name}: {args} -> {exact} ~ {format_decimal(self.value)}"
        if self.vacuous:
            line += f" [vacuous, reported as {format_decimal(self.reported)}: {self.reason}]"
        return line


@dataclass
class K0Result:
    """Quantities of the k0 step bound."""
    inputs: Dict[str, Any]
    epsilon_prime: Optional[Decimal] = None
    tau_prime: Optional[int] = None
    epsilon_dprime: Optional[Decimal] = None
    tau_dprime: Optional[int] = None
    k0: Optional[int] = None
    applicable: bool = True
    reason: str = ""

    def to_text(self) -> str:
        args = " ".join(f"{k}={v}" for k, v in self.inputs.items())
        if not self.applicable:
            return f"theorem2_k0: {args} -> inapplicable ({self.reason})"
        eps = format_decimal(Fraction(self.epsilon_prime))
        return (
            f"theorem2_k0: {args} -> epsilon={eps} tau_prime={self.tau_prime} "
            f"tau_dprime={self.tau_dprime} k0={self.k0}"
        )


def lemma1_bound(inputs: BoundInputs) -> BoundResult:
    """Single token visits a given node within D steps: ``(1 + D+max)^-D``."""
    value = Fraction(1, (1 + inputs.d_max_out) ** inputs.diam)
    return BoundResult("lemma1", {"dmax": inputs.d_max_out, "D": inputs.diam}, value)


def lemma2_bound(inputs: BoundInputs) -> BoundResult:
    """Two tokens meet at some node within D steps: ``n * (1 + D+max)^-(2D)``."""
    value = Fraction(inputs.n, (1 + inputs.d_max_out) ** (2 * inputs.diam))
    result = BoundResult("lemma2", {"n": inputs.n, "dmax": inputs.d_max_out, "D": inputs.diam}, value)
    if value > 1:
        result.vacuous = True
        result.reason = "bound exceeds 1"
    return result


def _ln(value: Fraction) -> Decimal:
    return (Decimal(value.numerator) / Decimal(value.denominator)).ln()


def _ceil(value: Decimal) -> int:
    return int(value.to_integral_value(rounding=ROUND_CEILING))


def theorem2_k0(inputs: BoundInputs) -> K0Result:
    """
    Steps after which every node holds the exact answer with probability ``p0``.

    Uses the tight choice ``eps' = eps'' = 1 - p0^(1 / (2(n-1)))`` and
    ``k0 = (n-1) tau' D + (n-1) tau'' D + D'`` with
    ``tau' = ceil(ln eps' / ln(1 - lemma2))`` and
    ``tau'' = ceil(ln eps'' / ln(1 - lemma1))``.
    """
    n, diam = inputs.n, inputs.diam
    result = K0Result({"n": n, "dmax": inputs.d_max_out, "D": diam, "d_prime": inputs.d_prime,
                       "p0": str(inputs.p0)})
    if n < 2:
        result.applicable = False
        result.reason = "needs n >= 2"
        return result

    l1 = lemma1_bound(inputs).value
    l2 = lemma2_bound(inputs).value
    if l2 >= 1:
        result.applicable = False
        result.reason = f"lemma2 bound {l2} >= 1, log(1 - x) undefined"
        return result

    with localcontext() as ctx:
        ctx.prec = LOG_PRECISION
        eps = 1 - (_ln(inputs.p0) / (2 * (n - 1))).exp()
        log_eps = eps.ln()
        tau_prime = max(1, _ceil(log_eps / _ln(1 - l2)))
        tau_dprime = max(1, _ceil(log_eps / _ln(1 - l1)))

    result.epsilon_prime = eps
    result.epsilon_dprime = eps
    result.tau_prime = tau_prime
    result.tau_dprime = tau_dprime
    result.k0 = (n - 1) * tau_prime * diam + (n - 1) * tau_dprime * diam + inputs.d_prime
    return result


def leader_success_lower_bound(u_v: int, n: int, m_levels: int) -> BoundResult:
    """
    Lower bound on having a single leader after ``u_v`` election rounds.

    ``1 - (n-1) C(u_v, n-1) p^(n-1) (1-p)^(u_v-(n-1))`` with ``p = 1 - 1/M``,
    valid for ``u_v > 2(n-1)``.
    """
    result = BoundResult("leader_success", {"uv": u_v, "n": n, "levels": m_levels})
    if u_v <= 2 * (n - 1):
        result.applicable = False
        result.reason = f"needs u_v > 2(n-1) = {2 * (n - 1)}"
        return result
    if m_levels < 2:
        result.applicable = False
        result.reason = "needs at least 2 levels"
        return result

    p = 1 - Fraction(1, m_levels)
    k = n - 1
    result.value = 1 - k * comb(u_v, k) * p ** k * (1 - p) ** (u_v - k)
    if result.value < 0:
        result.vacuous = True
        result.reason = "bound is negative"
    return result


def leader_success_binomial(u_v: int, n: int, m_levels: int) -> BoundResult:
    """Binomial tail ``sum_{k>=n-1} C(u_v, k) p^k (1-p)^(u_v-k)``, ``p = 1 - 1/M``."""
    result = BoundResult("leader_binomial", {"uv": u_v, "n": n, "levels": m_levels})
    if u_v < n - 1 or m_levels < 2:
        result.applicable = False
        result.reason = "needs u_v >= n-1 and at least 2 levels"
        return result
    p = 1 - Fraction(1, m_levels)
    result.value = sum(
        (comb(u_v, k) * p ** k * (1 - p) ** (u_v - k) for k in range(n - 1, u_v + 1)),
        Fraction(0),
    )
    return result


def max_tie_distribution(n_active: int, m_levels: int) -> Dict[int, Fraction]:
    """
    Probability that exactly ``l`` of ``n_active`` uniform draws on ``M`` levels hit the maximum.

    Returns:
        Mapping ``l -> probability`` for ``l = 1..n_active``; the values sum to 1
    """
    if n_active < 1 or m_levels < 1:
        raise ValueError("n_active and m_levels must be positive")
    total = m_levels ** n_active
    dist = {}
    for ties in range(1, n_active + 1):
        below = sum(v ** (n_active - ties) for v in range(m_levels))
        dist[ties] = Fraction(comb(n_active, ties) * below, total)
    return dist


def election_multi_leader_probability(n: int, m_levels: int, rounds: int) -> List[Fraction]:
    """
    Exact probability that more than one node is still flagged after each election round.

    The number of flagged nodes after a round is the number of ties at the
    maximum among the flagged nodes' draws.
    """
    active = {n: Fraction(1)}
    cache: Dict[int, Dict[int, Fraction]] = {}
    curve = []
    for _ in range(rounds):
        nxt: Dict[int, Fraction] = {}
        for count, prob in active.items():
            if count not in cache:
                cache[count] = max_tie_distribution(count, m_levels)
            for ties, p in cache[count].items():
                nxt[ties] = nxt.get(ties, Fraction(0)) + prob * p
        active = nxt
        curve.append(sum((p for c, p in active.items() if c > 1), Fraction(0)))
    return curve


def evaluate_all(inputs: BoundInputs) -> List[Union[BoundResult, K0Result]]:
    """Every bound for one set of inputs, in report order."""
    return [
        lemma1_bound(inputs),
        lemma2_bound(inputs),
        theorem2_k0(inputs),
        leader_success_lower_bound(inputs.u_v, inputs.n, inputs.m_levels),
        leader_success_binomial(inputs.u_v, inputs.n, inputs.m_levels),
    ]
