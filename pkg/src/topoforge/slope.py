"""Surgery coefficients: normalized slopes p/q, the meridian 1/0, and the drilled marker."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

__all__ = ["Slope", "EMPTY", "INF", "slope_distance", "parse_slope"]


class Slope:
    """A slope p/q with gcd(|p|, q) = 1 and q >= 0, or the empty coefficient.

    1/0 is the unique slope with q = 0.  The empty coefficient marks a
    component that is drilled and left open.
    """

    __slots__ = ("p", "q", "empty")

    def __init__(self, p: int = 0, q: int = 1, *, empty: bool = False):
        if empty:
            self.p, self.q, self.empty = 0, 0, True
            return
        p, q = int(p), int(q)
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a slope")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        self.p, self.q, self.empty = p, q, False

    @classmethod
    def from_fraction(cls, f: Union[Fraction, int]) -> "Slope":
        f = Fraction(f)
        return cls(f.numerator, f.denominator)

    @property
    def is_inf(self) -> bool:
        return not self.empty and self.q == 0

    def as_fraction(self) -> Fraction:
        if self.empty or self.q == 0:
            raise ValueError(f"{self} is not a finite rational")
        return Fraction(self.p, self.q)

    def add_integer(self, n: int) -> "Slope":
        """r + n, with 1/0 absorbing integers and the empty coefficient fixed."""
        if self.empty or self.q == 0:
            return self
        return Slope(self.p + n * self.q, self.q)

    def twisted(self, t: int) -> "Slope":
        """Coefficient of the twisting component itself: 1/(t + 1/r)."""
        if self.empty:
            raise ValueError("cannot twist about a drilled component")
        # 1/(t + q/p) = p/(t p + q); p = 0 gives 0/q = 0, 1/0 gives 1/t.
        return Slope(self.p, t * self.p + self.q)

    def key(self):
        return ("empty",) if self.empty else (self.p, self.q)

    def __eq__(self, other) -> bool:
        return isinstance(other, Slope) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __str__(self) -> str:
        if self.empty:
            return "empty"
        if self.q == 0:
            return "inf"
        return f"{self.p}/{self.q}"

    def __repr__(self) -> str:
        return f"Slope({self})"


EMPTY = Slope(empty=True)
INF = Slope(1, 0)


def parse_slope(text: str) -> Slope:
    """Parse "p/q", an integer, "inf", "1/0" or "empty"."""
    s = text.strip().lower()
    if s in ("empty", "none", "∅"):
        return EMPTY
    if s in ("inf", "infinity"):
        return INF
    if "/" in s:
        p, q = s.split("/", 1)
        return Slope(int(p), int(q))
    return Slope(int(s), 1)


def slope_distance(r: Slope, s: Slope) -> float:
    """Minimal geometric intersection number |p s - q r|; infinite for the empty coefficient."""
    if r.empty or s.empty:
        return math.inf
    return abs(r.p * s.q - r.q * s.p)
