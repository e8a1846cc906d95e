"""
Exact rational pair compared by cross-multiplication.

Values are kept exactly as produced (``206/20`` stays ``206/20``); reduction is
only done for output. Python integers are unbounded, so cross products never
overflow.
"""
from fractions import Fraction


class Ratio:
    """Immutable integer pair ``numerator / denominator`` with ``denominator >= 1``."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: int, denominator: int = 1):
        if denominator < 1:
            raise ValueError(f"Ratio denominator must be >= 1, got {denominator}")
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    def __setattr__(self, name, value):
        raise AttributeError(f"Ratio is immutable; cannot set {name!r}")

    def __delattr__(self, name):
        raise AttributeError(f"Ratio is immutable; cannot delete {name!r}")

    def __reduce__(self):
        return (Ratio, (self.numerator, self.denominator))

    def as_pair(self) -> tuple:
        return (self.numerator, self.denominator)

    def reduced(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def _cross(self, other):
        return self.numerator * other.denominator, other.numerator * self.denominator

    def __eq__(self, other):
        if not isinstance(other, Ratio):
            return NotImplemented
        left, right = self._cross(other)
        return left == right

    def __ne__(self, other):
        if not isinstance(other, Ratio):
            return NotImplemented
        left, right = self._cross(other)
        return left != right

    def __lt__(self, other):
        if not isinstance(other, Ratio):
            return NotImplemented
        left, right = self._cross(other)
        return left < right

    def __le__(self, other):
        if not isinstance(other, Ratio):
            return NotImplemented
        left, right = self._cross(other)
        return left <= right

    def __gt__(self, other):
        if not isinstance(other, Ratio):
            return NotImplemented
        left, right = self._cross(other)
        return left > right

    def __ge__(self, other):
        if not isinstance(other, Ratio):
            return NotImplemented
        left, right = self._cross(other)
        return left >= right

    # equal ratios must hash alike whatever their representation
    def __hash__(self):
        return hash(self.reduced())

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"

    def __repr__(self):
        return f"Ratio({self.numerator}, {self.denominator})"
