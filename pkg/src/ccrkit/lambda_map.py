"""Finite-degree transformation maps and their CCR membership tests.

A :class:`LambdaMap` stores ``Lambda e_k`` (real constants) and
``Lambda J e_k`` (real Wick polynomials).  In the multiset storage of
:mod:`ccrkit.wick` the coefficient tensor reads

    lambda_{k, a} = (2**m / m!) <Lambda J e_k, :x_a:> = c^(k)_a * a! / m!

for ``|a| = m``, and the CCR condition is total symmetry of
``lambda_{k, a}`` under exchanging ``k`` with any element of ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Mapping

from . import config
from .fock import HVector, field_apply
from .scalars import EXACT, FLOAT, BackendMismatch, conj, is_real, normalize
from .tails import MissingTail, TailFamily, TailRule
from .wick import (MultiIndex, WickPolynomial,
                   monomial_inner_product, partial_derivative, wick_product)


class NonConstantVImage(ValueError):
    """``Lambda e_k`` must be a constant function."""


class NotCCR(ValueError):
    """The operation needs a map that passes :func:`validate_ccr`."""


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: dict | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


class LambdaMap:
    """Immutable transformation map of finite degree on finitely many modes."""

    __slots__ = ("v_images", "jv_images", "degree", "support", "tail", "backend")

    def __init__(self, v_images: Mapping | None = None, jv_images: Mapping | None = None,
                 degree: int | None = None, support=None, tail: TailFamily | None = None):
        v = {}
        for k, c in (v_images or {}).items():
            if isinstance(c, WickPolynomial):
                if not c.is_constant():
                    raise NonConstantVImage(f"Lambda e_{k} is not constant")
                c = c.constant_term()
            if not is_real(c):
                raise ValueError(f"Lambda e_{k} must be real")
            if c != 0:
                v[int(k)] = c
        jv = {}
        backends = set()
        for k, P in (jv_images or {}).items():
            if not isinstance(P, WickPolynomial):
                P = WickPolynomial.constant(P)
            if not P.is_real():
                raise ValueError(f"Lambda J e_{k} must have real coefficients")
            if P:
                jv[int(k)] = P
                backends.add(P.backend)
        if len(backends) > 1:
            raise BackendMismatch("jv images mix exact and float coefficients")
        self.backend = backends.pop() if backends else EXACT
        self.v_images = dict(sorted(v.items()))
        self.jv_images = dict(sorted(jv.items()))
        inferred = max((P.max_degree for P in jv.values()), default=0)
        if degree is not None:
            if inferred > degree:
                raise ValueError(f"images reach degree {inferred} > declared {degree}")
            if degree > 0 and inferred < degree:
                raise ValueError(f"declared degree {degree} has no witness term")
            inferred = degree
        self.degree = inferred
        modes = set(int(k) for k in (support or ()))
        modes |= set(v) | set(jv)
        for P in jv.values():
            modes |= set(P.modes)
        self.support = tuple(sorted(modes))
        self.tail = tail

    def v(self, k: int):
        return self.v_images.get(k, 0)

    def jv(self, k: int) -> WickPolynomial:
        return self.jv_images.get(k, WickPolynomial.zero(self.backend))

    def apply(self, f: HVector) -> WickPolynomial:
        """``Lambda f`` for ``f = g + J h``, extended real-linearly."""
        out = WickPolynomial.constant(sum((c * self.v(k) for k, c in f.v_part.items()), 0),
                                      self.backend)
        for k, c in f.jv_part.items():
            out = out + self.jv(k).scale(c)
        return out

    def is_zero(self) -> bool:
        return not self.v_images and not self.jv_images

    def __eq__(self, other):
        if not isinstance(other, LambdaMap):
            return NotImplemented
        return self.v_images == other.v_images and self.jv_images == other.jv_images

    def __repr__(self):
        return f"LambdaMap(degree={self.degree}, v={self.v_images}, jv={self.jv_images})"

    def to_json(self) -> dict:
        from .wick import _num_out
        return {"degree": self.degree,
                "v": [[k, _num_out(c)] for k, c in self.v_images.items()],
                "jv": [[k, P.to_json()] for k, P in self.jv_images.items()],
                "tail": None if self.tail is None else self.tail.to_json()}

    @classmethod
    def from_json(cls, d: Mapping, backend: str | None = None) -> "LambdaMap":
        from .scalars import as_real_number
        extra = set(d) - {"degree", "v", "jv", "tail", "support"}
        if extra:
            raise ValueError(f"lambda map: unknown fields {sorted(extra)}")
        v = {int(k): WickPolynomial.from_json(c, backend) if isinstance(c, Mapping)
             else as_real_number(c) for k, c in d.get("v", [])}
        jv = {int(k): WickPolynomial.from_json(P, backend) for k, P in d.get("jv", [])}
        tail = d.get("tail")
        return cls(v, jv, d.get("degree"), d.get("support"),
                   None if tail is None else TailFamily.from_json(tail))


# ---------------------------------------------------------------------------
# tensor view

@dataclass(frozen=True)
class SymmetricTensorView:
    """Order ``m+1`` totally symmetric tensor keyed by multisets."""

    order: int
    entries: Mapping[MultiIndex, object] = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries.get(MultiIndex.of(key), 0)

    def __len__(self):
        return len(self.entries)

    def to_json(self) -> dict:
        from .wick import _num_out
        return {"order": self.order,
                "entries": [[list(b.expanded()), _num_out(c)] for b, c in self.entries.items()]}


def _lam(c, a: MultiIndex):
    return normalize(c * Fraction(a.factorial_weight(), math.factorial(a.degree)))


def _ip(P: WickPolynomial, a: MultiIndex):
    return normalize(P.coefficient(a) * monomial_inner_product(a, a))


def validate_ccr(lam: LambdaMap) -> Verdict:
    for k, c in lam.v_images.items():
        if not is_real(c):
            return Verdict(False, {"condition": "real", "k": k}, "Lambda e_k is not real")
    for k, P in lam.jv_images.items():
        if not P.is_real():
            return Verdict(False, {"condition": "real", "k": k}, "Lambda J e_k is not real")
    for k in lam.support:
        P = lam.jv(k)
        for a, _ in P.items():
            if a.degree == 0:
                continue
            beta = a.add(k)
            for k2 in beta.modes:
                if k2 == k:
                    continue
                gamma = a.remove(k2)
                lhs = _ip(P, a)
                rhs = _ip(lam.jv(k2), gamma.add(k))
                if lhs != rhs:
                    return Verdict(False, {
                        "condition": "symmetry", "k": k, "alpha": list(a.expanded()),
                        "k_other": k2, "alpha_other": list(gamma.add(k).expanded()),
                        "lhs": lhs, "rhs": rhs},
                        f"<Lambda J e_{k}, {a}> != <Lambda J e_{k2}, {gamma.add(k)}>")
    return Verdict(True)


def curl_check(lam: LambdaMap, n: int | None = None) -> Verdict:
    """``d_j P_n Lambda J e_k == d_k P_n Lambda J e_j`` for all supported ``j < k``."""
    degrees = range(1, lam.degree + 1) if n is None else [n]
    for d in degrees:
        parts = {k: lam.jv(k).degree_part(d) for k in lam.support}
        for j, k in combinations_with_replacement(lam.support, 2):
            if j == k:
                continue
            lhs = partial_derivative(parts[k], j)
            rhs = partial_derivative(parts[j], k)
            if lhs != rhs:
                return Verdict(False, {"j": j, "k": k, "n": d, "lhs": lhs, "rhs": rhs},
                               f"d_{j} P_{d} Lambda J e_{k} != d_{k} P_{d} Lambda J e_{j}")
    return Verdict(True)


def assemble_tensor(lam: LambdaMap, m: int) -> SymmetricTensorView:
    v = validate_ccr(lam)
    if not v:
        raise NotCCR(v.detail)
    entries = {}
    for k in lam.support:
        for a, c in lam.jv(k).degree_part(m).items():
            entries[a.add(k)] = _lam(c, a)
    return SymmetricTensorView(m + 1, dict(sorted(entries.items())))


def reconstruct_images(tensors, backend: str = EXACT) -> dict[int, WickPolynomial]:
    """Invert :func:`assemble_tensor`: ``c^(k)_a = lambda_{k,a} m! / a!``."""
    acc: dict[int, dict] = {}
    for t in tensors:
        m = t.order - 1
        for beta, val in t.entries.items():
            for k in beta.modes:
                a = beta.remove(k)
                c = normalize(val * Fraction(math.factorial(m), a.factorial_weight()))
                row = acc.setdefault(k, {})
                row[a] = row.get(a, 0) + c
    return {k: WickPolynomial(row, backend) for k, row in sorted(acc.items())}


# ---------------------------------------------------------------------------
# decomposition

@dataclass(frozen=True)
class LambdaParts:
    """``coherent[k] = (Lambda e_k, P_0 Lambda J e_k)``; ``linear``/``higher`` are maps."""

    coherent: Mapping[int, tuple]
    linear: LambdaMap
    higher: LambdaMap

    def reconstruct(self) -> LambdaMap:
        modes = set(self.coherent) | set(self.linear.support) | set(self.higher.support)
        v = {k: self.coherent.get(k, (0, 0))[0] for k in modes}
        jv = {}
        for k in modes:
            const = self.coherent.get(k, (0, 0))[1]
            P = self.linear.jv(k) + self.higher.jv(k)
            jv[k] = P + const if const else P
        return LambdaMap(v, jv)


def decompose_parts(lam: LambdaMap) -> LambdaParts:
    coherent = {}
    for k in lam.support:
        pair = (lam.v(k), lam.jv(k).constant_term())
        if pair != (0, 0):
            coherent[k] = pair
    linear = LambdaMap({}, {k: P.degree_part(1) for k, P in lam.jv_images.items()},
                       support=lam.support)
    higher = LambdaMap({}, {k: WickPolynomial({a: c for a, c in P.items() if a.degree >= 2},
                                              P.backend)
                            for k, P in lam.jv_images.items()},
                       support=lam.support, tail=lam.tail)
    return LambdaParts(coherent, linear, higher)


def in_lq(lam: LambdaMap) -> bool:
    """True when every image has no degree 0 or 1 component."""
    return not lam.v_images and all(
        a.degree >= 2 for P in lam.jv_images.values() for a, _ in P.items())


# ---------------------------------------------------------------------------
# maximal domain

@dataclass(frozen=True)
class Containment:
    contained: bool | None
    value: object = None
    reason: str = ""

    def __bool__(self):
        return bool(self.contained)


def _defining_series(lam: LambdaMap, g) -> object:
    # sum over ordered (k1,...,km) of 2^m/m! |<Lambda J e_{k1}, :x(g) x_{k2}...x_{km}:>|^2
    total = Fraction(0)
    for k1 in lam.support:
        P = lam.jv(k1)
        gammas = {a.remove(j) for a, _ in P.items() if a.degree >= 1 for j in a.modes}
        for gamma in sorted(gammas):
            m = gamma.degree + 1
            ip = 0
            for j, gj in g.items():
                ip = ip + gj * _ip(P, gamma.add(j))
            if ip == 0:
                continue
            w = Fraction(2 ** m, math.factorial(m)) * gamma.orderings()
            total = total + w * normalize(conj(ip) * ip)
    return normalize(total)


def lambda_max_contains(lam: LambdaMap, f: HVector, tail: TailFamily | None = None,
                        f_tail: TailRule | None = None) -> Containment:
    """Membership of ``f`` in the maximal domain of ``Lambda`` restricted to JV.

    ``tail`` describes ``||Lambda J e_k||^2`` past the explicit modes (defaults
    to ``lam.tail``); ``f_tail`` describes the squared JV-coefficients of ``f``
    past its explicit support.
    """
    if not in_lq(lam):
        raise ValueError("lambda_max_contains expects a map with no degree 0/1 parts")
    tail = tail if tail is not None else lam.tail
    g = f.jv_part
    if f_tail is None or f_tail.is_zero():
        known = all(k in lam.support or tail is None or tail.rule.is_zero() for k in g.support)
        value = _defining_series(lam, g) if known else None
        return Containment(True, value, "finitely supported f: finite sum")
    if tail is None:
        raise MissingTail("an infinitely supported f needs tail metadata for Lambda")
    start = max([0, *g.support]) + 1
    f_sum = f_tail.tail_sum(f_tail.start or start)
    if not f_sum.convergent:
        return Containment(False, None, f"defining series diverges: {f_sum.reason}")
    _, l_sum = tail.total(max(lam.support, default=0))
    if l_sum.convergent:
        return Containment(True, None,
                           "square-summable f against square-summable image norms "
                           "(Cauchy-Schwarz bound)")
    return Containment(None, None, "image norms not summable; tail data cannot decide")


# ---------------------------------------------------------------------------
# standard form and transformed fields

@dataclass(frozen=True)
class StandardForm:
    basis: str
    tensors: tuple[SymmetricTensorView, ...]

    def to_json(self) -> dict:
        return {"basis": self.basis, "tensors": [t.to_json() for t in self.tensors]}


def standard_form(lam: LambdaMap) -> StandardForm:
    v = validate_ccr(lam)
    if not v:
        raise NotCCR(v.detail)
    if lam.v_images:
        raise ValueError("standard form needs Lambda e_k = 0; split coherent parts first")
    degrees = sorted({a.degree for P in lam.jv_images.values() for a, _ in P.items()})
    return StandardForm("identity", tuple(assemble_tensor(lam, m) for m in degrees))


def standard_form_field(sf: StandardForm, k: int, F: WickPolynomial,
                        cap: int | None = None) -> WickPolynomial:
    """``p_k F + sum lambda_{k k1..km} :q_k1...q_km: F`` rebuilt from the tensors."""
    images = reconstruct_images(sf.tensors, F.backend if F else EXACT)
    out = field_apply(HVector.je(k), F, cap)
    if k in images:
        out = out + wick_product(images[k], F, cap)
    return out


def transformed_field(lam: LambdaMap, f: HVector, F: WickPolynomial,
                      cap: int | None = None) -> WickPolynomial:
    """``Phi_Lambda(f) F = Phi(f) F + (Lambda f) F``."""
    lf = lam.apply(f)
    if F.backend == FLOAT and lf.backend == EXACT:
        lf = lf.to_float()
    return field_apply(f, F, cap) + wick_product(lf, F, cap)


# ---------------------------------------------------------------------------
# band structure

@dataclass(frozen=True)
class BandVerdict:
    ok: bool
    n: int
    m: int
    bound: int
    nonzero_blocks: tuple[int, ...]
    violations: tuple[int, ...]

    def __bool__(self):
        return self.ok


def _monomials(modes, max_degree):
    for r in range(max_degree + 1):
        for combo in combinations_with_replacement(modes, r):
            yield MultiIndex.of(combo)


def band_blocks(lam: LambdaMap, f: HVector, cap: int) -> dict[int, set[int]]:
    """``{m: {k : P_m Phi_Lambda(f) P_k != 0}}`` over inputs of degree <= cap."""
    modes = sorted(set(lam.support) | set(f.support)) or [1]
    wcap = max(config.degree_cap(), cap + lam.degree + 1)
    blocks: dict[int, set[int]] = {}
    for a in _monomials(modes, cap):
        out = transformed_field(lam, f, WickPolynomial({a: 1}, lam.backend), wcap)
        for b, _ in out.items():
            blocks.setdefault(b.degree, set()).add(a.degree)
    return blocks


def band_profile(lam: LambdaMap, f: HVector, m: int, cap: int,
                 blocks: dict[int, set[int]] | None = None) -> BandVerdict:
    """``P_m Phi_Lambda(f) P_k = 0`` for ``k > n + m + 1`` on degree <= cap."""
    n = max(lam.degree, 1)
    bound = n + m + 1
    if blocks is None:
        blocks = band_blocks(lam, f, cap)
    ks = tuple(sorted(blocks.get(m, ())))
    bad = tuple(k for k in ks if k > bound)
    return BandVerdict(not bad, n, m, bound, ks, bad)
