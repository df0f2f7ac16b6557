"""Scalar helpers shared by the exact and floating-point backends.

Exact values are ``int``/``Fraction`` when real and rational,
:class:`GaussianRational` when they pick up a factor of ``i``, and sympy
numbers only when a surd such as ``sqrt(2)`` is unavoidable (ladder
operators, the Fock/Q-space map).  Float values are ``float``/``complex``.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction

import sympy

EXACT = "exact"
FLOAT = "float"
BACKENDS = (EXACT, FLOAT)


class BackendMismatch(TypeError):
    """Raised when exact and floating-point operands are combined."""


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    def _delegate(self, other):
        if isinstance(other, sympy.Basic):
            return to_sympy(self), other
        if isinstance(other, (float, complex)):
            return complex(self), other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is not None:
            return demote(GaussianRational(self.re + o.re, self.im + o.im))
        pair = self._delegate(other)
        if pair is None:
            return NotImplemented
        return normalize(pair[0] + pair[1])

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is not None:
            return demote(GaussianRational(self.re * o.re - self.im * o.im,
                                           self.re * o.im + self.im * o.re))
        pair = self._delegate(other)
        if pair is None:
            return NotImplemented
        return normalize(pair[0] * pair[1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is not None:
            d = o.re * o.re + o.im * o.im
            if d == 0:
                raise ZeroDivisionError("division by zero")
            return self * GaussianRational(o.re / d, -o.im / d)
        pair = self._delegate(other)
        if pair is None:
            return NotImplemented
        return normalize(pair[0] / pair[1])

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def __abs__(self):
        return abs(complex(self))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is not None:
            return self.re == o.re and self.im == o.im
        if isinstance(other, (float, complex)):
            return complex(self) == other
        if isinstance(other, sympy.Basic):
            return sympy.simplify(to_sympy(self) - other) == 0
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


I = GaussianRational(0, 1)


def demote(x):
    """Return the simplest exact type representing ``x``."""
    if isinstance(x, GaussianRational) and x.im == 0:
        return x.re
    return x


def to_sympy(x):
    if isinstance(x, GaussianRational):
        return sympy.Rational(x.re.numerator, x.re.denominator) + sympy.I * sympy.Rational(
            x.im.numerator, x.im.denominator)
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.sympify(x)


def normalize(x):
    """Canonicalize a scalar; sympy results are expanded and demoted."""
    if isinstance(x, sympy.Basic):
        x = sympy.expand(x)
        if x.is_Rational:
            return Fraction(int(x.p), int(x.q))
        re, im = x.as_real_imag()
        if re.is_Rational and im.is_Rational:
            return demote(GaussianRational(Fraction(int(re.p), int(re.q)),
                                           Fraction(int(im.p), int(im.q))))
        return x
    if isinstance(x, GaussianRational):
        return demote(x)
    return x


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, GaussianRational, sympy.Basic)) and not isinstance(x, bool)


def backend_of(x) -> str:
    return EXACT if is_exact(x) else FLOAT


def is_zero(x) -> bool:
    if isinstance(x, sympy.Basic):
        return sympy.expand(x) == 0
    return x == 0


def conj(x):
    if isinstance(x, (int, Fraction, float)):
        return x
    if isinstance(x, sympy.Basic):
        return normalize(sympy.conjugate(x))
    return x.conjugate()


def is_real(x) -> bool:
    if isinstance(x, (int, Fraction, float)):
        return True
    if isinstance(x, GaussianRational):
        return x.im == 0
    if isinstance(x, complex):
        return x.imag == 0
    if isinstance(x, sympy.Basic):
        return sympy.expand(sympy.im(x)) == 0
    raise TypeError(f"unsupported scalar {x!r}")


def to_float(x):
    """Float (or complex when the value is not real) image of a scalar."""
    if isinstance(x, (int, Fraction)):
        return float(x)
    if isinstance(x, float):
        return x
    c = complex(x)
    return c.real if c.imag == 0 else c


def to_exact(x):
    """Exact rational image of a float; complex floats become Gaussian rationals."""
    if is_exact(x):
        return x
    if isinstance(x, complex):
        return demote(GaussianRational(Fraction(x.real), Fraction(x.imag)))
    return Fraction(x)


def sqrt_of(q, backend: str):
    """Square root of a nonnegative rational in the requested backend."""
    if backend == FLOAT:
        return math.sqrt(q)
    q = Fraction(q)
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return sympy.sqrt(sympy.Rational(q.numerator, q.denominator))


def imag_unit(backend: str):
    return I if backend == EXACT else 1j


def cast(x, backend: str):
    if backend == FLOAT:
        return to_float(x)
    return to_exact(x)


def as_real_number(x):
    """Accept json/user input as a real scalar (int/Fraction kept exact)."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, Fraction, float)):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, numbers.Real):
        return float(x)
    raise TypeError(f"expected a real scalar, got {x!r}")
