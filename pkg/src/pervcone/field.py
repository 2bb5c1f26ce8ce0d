"""Prime fields GF(p) and the rationals.

Elements of GF(p) are plain ints in ``[0, p)``; rationals are
``gmpy2.mpq`` values, always in lowest terms.
"""

from __future__ import annotations

import random
from fractions import Fraction

from gmpy2 import mpq


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class Field:
    """A coefficient field identified by its characteristic (0 means Q)."""

    __slots__ = ("char",)

    def __init__(self, char: int):
        if char != 0 and not _is_prime(char):
            raise FieldError(f"characteristic {char} is neither 0 nor prime")
        self.char = int(char)

    def __eq__(self, other):
        return isinstance(other, Field) and other.char == self.char

    def __hash__(self):
        return hash(("Field", self.char))

    def __repr__(self):
        return "QQ" if self.char == 0 else f"GF({self.char})"

    @property
    def is_rational(self) -> bool:
        return self.char == 0

    @property
    def zero(self):
        return 0 if self.char else mpq(0)

    @property
    def one(self):
        return 1 if self.char else mpq(1)

    def __call__(self, x):
        """Coerce ``x`` (int, Fraction or "a/b" string) into canonical form."""
        if self.char:
            if isinstance(x, (Fraction, type(mpq(0)))):
                num = x.numerator % self.char
                den = x.denominator % self.char
                if den == 0:
                    raise FieldError(f"{x} has no image in GF({self.char})")
                return num * pow(den, -1, self.char) % self.char
            if isinstance(x, str):
                return self(Fraction(x))
            return int(x) % self.char
        if isinstance(x, str):
            return mpq(Fraction(x))
        return mpq(x)

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.char:
            return pow(int(x), -1, self.char)
        return 1 / x

    def random_element(self, rng: random.Random, nonzero: bool = False, height: int = 3):
        if self.char:
            lo = 1 if nonzero else 0
            return rng.randrange(lo, self.char)
        while True:
            x = mpq(rng.randint(-height, height))
            if x or not nonzero:
                return x

    def to_json(self, x):
        if self.char:
            return int(x)
        x = mpq(x)
        return f"{x.numerator}/{x.denominator}"

    def from_json(self, v):
        return self(v)

    def spec(self) -> dict:
        return {"char": self.char}


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)
