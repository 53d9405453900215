"""Exact coefficient fields: the rationals and prime fields F_p.

Elements are plain Python values: ``fractions.Fraction`` for Q and ints in
``range(p)`` for F_p.  A ``FieldSpec`` bundles the arithmetic so matrices
stay field-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SchemaError


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Rationals when ``p`` is None, otherwise the prime field F_p."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(None)

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(p)

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    @property
    def one(self):
        return 1 if self.p is not None else Fraction(1)

    def coerce(self, x):
        """Accept ints, Fractions and "a/b" strings; reduce into the field."""
        if isinstance(x, str):
            x = Fraction(x)
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator not a unit mod {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p is not None else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p is not None else a * b

    def neg(self, a):
        return (-a) % self.p if self.p is not None else -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is not None:
            return pow(a, -1, self.p)
        return Fraction(1) / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def elements(self):
        """All field elements, smallest first.  Finite fields only."""
        if self.p is None:
            raise ValueError("the rationals are not enumerable")
        return range(self.p)

    def to_json(self) -> str:
        return "q" if self.p is None else f"f{self.p}"

    @classmethod
    def from_json(cls, tag: str, pointer: str = "/field") -> "FieldSpec":
        if tag == "q":
            return cls.rationals()
        if tag.startswith("f"):
            try:
                p = int(tag[1:])
                return cls.prime(p)
            except ValueError:
                pass
        raise SchemaError(pointer, f"unknown field tag {tag!r}")

    def entry_to_json(self, x):
        if self.p is not None:
            return int(x)
        x = Fraction(x)
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
