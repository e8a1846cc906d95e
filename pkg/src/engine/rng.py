"""Deterministic random sources for reproducible trials.

Every trial gets its own seed ``mix_seed(master_seed, trial_index)``, so
trials can run in any order or in parallel and still draw the same numbers.
"""
import random

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# Largest float below 1.0; an inverse-CDF pick with it always lands on the last target (self).
_ALMOST_ONE = 1.0 - 2.0 ** -53

RNG_KINDS = ("seeded", "stub-selfloop")


def splitmix64(x: int) -> int:
    """SplitMix64 output function (one step from state ``x``)."""
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(seed: int, index: int) -> int:
    """Derive an independent 64-bit seed for stream ``index`` of ``seed``."""
    return splitmix64((seed & MASK64) ^ splitmix64(index & MASK64))


class SeededRNG:
    """Seeded PRNG wrapper around ``random.Random``."""

    def __init__(self, seed: int):
        self._seed = seed
        self._rng = random.Random(seed)

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def generator(self) -> random.Random:
        return self._rng

    def random(self) -> float:
        return self._rng.random()

    def randint(self, a: int, b: int) -> int:
        return self._rng.randint(a, b)


class SelfLoopStubRNG(SeededRNG):
    """Test hook: every transmission goes to the sender itself.

    Election draws stay seeded.
    """

    def random(self) -> float:
        return _ALMOST_ONE


class ConstantDrawRNG(SeededRNG):
    """Test hook: every election draw returns the same value (clamped to the range)."""

    def __init__(self, seed: int, value: int):
        super().__init__(seed)
        self._value = value

    def randint(self, a: int, b: int) -> int:
        return min(max(self._value, a), b)


def make_rng(kind: str, seed: int) -> SeededRNG:
    """Build a random source by name (``seeded`` or ``stub-selfloop``)."""
    if kind == "seeded":
        return SeededRNG(seed)
    if kind == "stub-selfloop":
        return SelfLoopStubRNG(seed)
    raise ValueError(f"Unknown rng kind: {kind} (expected one of {', '.join(RNG_KINDS)})")
