"""Ladder and field operators on Wick polynomials, and the Fock <-> Q-space map.

Conventions: ``q_k = x_k`` and ``p_k = -i d/dx_k + i x_k``.  For
``f = g + J h`` with ``g, h`` in V,

    a(f)  = (d_g - i d_h) / sqrt(2)
    a*(f) = sqrt(2) (raise_g + i raise_h)
    Phi(f) = (a(f) + a*(f)) / sqrt(2)

where ``raise_k`` shifts ``:x_a:`` to ``:x_a x_k:``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .scalars import EXACT, FLOAT, imag_unit, normalize, sqrt_of
from .wick import (DirectionVector, MultiIndex, WickPolynomial,
                   directional_derivative, partial_derivative, raise_mode,
                   wick_product)


@dataclass(frozen=True)
class HVector:
    """``f = g + J h`` with ``g = v_part`` and ``h = jv_part`` in V."""

    v_part: DirectionVector = field(default_factory=DirectionVector)
    jv_part: DirectionVector = field(default_factory=DirectionVector)

    @classmethod
    def e(cls, k: int, c=1) -> "HVector":
        return cls(DirectionVector.e(k, c), DirectionVector())

    @classmethod
    def je(cls, k: int, c=1) -> "HVector":
        return cls(DirectionVector(), DirectionVector.e(k, c))

    def J(self) -> "HVector":
        # J(g + J h) = -h + J g
        return HVector(-self.jv_part, self.v_part)

    def __add__(self, other: "HVector") -> "HVector":
        return HVector(self.v_part + other.v_part, self.jv_part + other.jv_part)

    def __neg__(self):
        return HVector(-self.v_part, -self.jv_part)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "HVector":
        return HVector(self.v_part.scale(s), self.jv_part.scale(s))

    def norm_squared(self):
        return self.v_part.norm_squared() + self.jv_part.norm_squared()

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.v_part.support) | set(self.jv_part.support)))


def sigma(f: HVector, g: HVector):
    """Symplectic form with ``sigma(e_k, J e_l) = delta_kl``."""
    total = 0
    for k, c in f.v_part.items():
        total += c * g.jv_part.get(k)
    for k, c in f.jv_part.items():
        total -= c * g.v_part.get(k)
    return total


@dataclass(frozen=True)
class FockBasisVector:
    """Symmetrized tensor ``P_+(e_{k1} x ... x e_{kr})`` labelled by its multiset."""

    occupation: MultiIndex = MultiIndex()

    @classmethod
    def of(cls, modes) -> "FockBasisVector":
        return cls(MultiIndex.of(modes))

    @property
    def degree(self) -> int:
        return self.occupation.degree

    def norm_squared(self) -> Fraction:
        """``||P_+(e_{k1} x ... x e_{kr})||^2 = a! / r!``."""
        return Fraction(self.occupation.factorial_weight(), math.factorial(self.degree))


def _backend(F: WickPolynomial) -> str:
    return F.backend


def annihilate(f: HVector, F: WickPolynomial) -> WickPolynomial:
    b = _backend(F)
    r = sqrt_of(Fraction(1, 2), b)
    out = directional_derivative(F, f.v_part).scale(r)
    if f.jv_part:
        out = out - directional_derivative(F, f.jv_part).scale(imag_unit(b) * r)
    return out


def _raise(F: WickPolynomial, d: DirectionVector) -> WickPolynomial:
    out = WickPolynomial.zero(F.backend)
    for k, c in d.items():
        out = out + raise_mode(F, k).scale(c)
    return out


def create(f: HVector, F: WickPolynomial) -> WickPolynomial:
    b = _backend(F)
    r = sqrt_of(2, b)
    out = _raise(F, f.v_part).scale(r)
    if f.jv_part:
        out = out + _raise(F, f.jv_part).scale(imag_unit(b) * r)
    return out


def field_apply(f: HVector, F: WickPolynomial, cap: int | None = None) -> WickPolynomial:
    """``Phi(f)F = x(g)F + sum_k h_k (-i d_k F + i x_k F)``."""
    b = _backend(F)
    i = imag_unit(b)
    out = WickPolynomial.zero(b)
    for k, c in f.v_part.items():
        out = out + wick_product(WickPolynomial.var(k, b), F, cap).scale(c)
    for k, c in f.jv_part.items():
        p = wick_product(WickPolynomial.var(k, b), F, cap) - partial_derivative(F, k)
        out = out + p.scale(i * c)
    return out


def number_apply(F: WickPolynomial) -> WickPolynomial:
    return WickPolynomial({a: c * a.degree for a, c in F.items()}, F.backend)


def project_degree(F: WickPolynomial, n: int) -> WickPolynomial:
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return F.degree_part(n)


def _s_factor(r: int, backend: str):
    # (r!)^(-1/2) * 2^(r/2)
    return sqrt_of(Fraction(2 ** r, math.factorial(r)), backend)


def fock_to_qspace(v: FockBasisVector, backend: str = EXACT) -> WickPolynomial:
    """Image of a symmetrized basis tensor under S.

    ``S P_+(e_a) = sqrt(2^r / r!) :x_a:``.  Both sides have squared norm
    ``a!/r!`` so S is isometric on these vectors, including repeated modes.
    """
    return WickPolynomial({v.occupation: _s_factor(v.degree, backend)}, backend)


def qspace_to_fock(F: WickPolynomial) -> dict[FockBasisVector, object]:
    """Coefficients of ``F`` over the vectors ``P_+(e_a)``."""
    out = {}
    for a, c in F.items():
        inv = _s_factor(a.degree, F.backend)
        out[FockBasisVector(a)] = normalize(c / inv) if F.backend == EXACT else c / inv
    return out


def fock_expansion_to_qspace(coeffs: Mapping[FockBasisVector, object],
                             backend: str | None = None) -> WickPolynomial:
    total = {}
    for v, c in coeffs.items():
        b = backend or (FLOAT if isinstance(c, (float, complex)) else EXACT)
        total[v.occupation] = total.get(v.occupation, 0) + c * _s_factor(v.degree, b)
    return WickPolynomial(total, backend)
