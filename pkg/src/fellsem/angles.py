"""Exact arithmetic on the unit circle.

An Angle stores a reduced rational p/q and represents exp(2*pi*i*p/q).
Products and conjugates of angles stay exact; mixing an Angle with an
ordinary complex number falls back to floating point.
"""

from __future__ import annotations

import cmath
from fractions import Fraction


class Angle:
    """A unit-modulus scalar exp(2*pi*i * frac) with frac a rational mod 1."""

    __slots__ = ("frac",)

    def __init__(self, frac=0):
        f = Fraction(frac)
        self.frac = f - (f // 1)

    @classmethod
    def parse(cls, text: str) -> "Angle":
        return cls(Fraction(text))

    def __mul__(self, other):
        if isinstance(other, Angle):
            return Angle(self.frac + other.frac)
        return self.value * other

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Angle):
            return Angle(self.frac - other.frac)
        return self.value / other

    def __pow__(self, n: int):
        return Angle(self.frac * n)

    def conj(self):
        return Angle(-self.frac)

    conjugate = conj

    def inverse(self):
        return Angle(-self.frac)

    @property
    def value(self) -> complex:
        if self.frac == 0:
            return 1 + 0j
        if 2 * self.frac == 1:
            return -1 + 0j
        if 4 * self.frac == 1:
            return 1j
        if 4 * self.frac == 3:
            return -1j
        return cmath.exp(2j * cmath.pi * float(self.frac))

    def __complex__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, Angle):
            return self.frac == other.frac
        if other == 1:
            return self.frac == 0
        if other == -1:
            return 2 * self.frac == 1
        return NotImplemented

    def __hash__(self):
        return hash(("Angle", self.frac))

    def __repr__(self):
        return f"Angle({self.frac})"

    def __str__(self):
        return str(self.frac)

    @property
    def is_one(self) -> bool:
        return self.frac == 0


ONE = Angle(0)


def as_angle(x) -> Angle:
    """Coerce x to an Angle; x may be an Angle, a Fraction/int, or 'p/q' text."""
    if isinstance(x, Angle):
        return x
    if isinstance(x, str):
        return Angle.parse(x)
    return Angle(x)


def as_complex(x) -> complex:
    return x.value if isinstance(x, Angle) else complex(x)


def scalar_mul(a, b):
    """Product of two circle scalars, exact when both are Angles."""
    if isinstance(a, Angle) and isinstance(b, Angle):
        return a * b
    return as_complex(a) * as_complex(b)


def scalar_conj(a):
    if isinstance(a, Angle):
        return a.conj()
    return complex(a).conjugate()
