"""Sparse Wick-ordered polynomials over the product Gaussian measure.

Each coordinate ``x_k`` carries the measure ``pi**-0.5 * exp(-x**2) dx``, so
every mode has variance 1/2.  A polynomial is stored as a map from a
:class:`MultiIndex` (a multiset of 1-based mode labels) to its coefficient in
the Wick basis ``:x_{k1} ... x_{km}:``.  With this storage the basis is
orthogonal and

    <:x_a:, :x_b:> = delta_ab * a! / 2**|a|,      a! = prod_k (a_k)!

Products are expanded mode by mode with the Hermite linearization at
variance 1/2,

    :x^m: :x^n: = sum_j j! C(m,j) C(n,j) 2**-j :x^(m+n-2j):
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from typing import Iterable, Mapping

import numpy as np
from numpy.polynomial import hermite as _herm

from . import config
from .scalars import (EXACT, FLOAT, BackendMismatch, backend_of, cast, conj,
                      is_real, is_zero, normalize, to_float)


class DegreeCapExceeded(ValueError):
    """A product would exceed the configured Wick degree cap."""


class NodeBudgetExceeded(ValueError):
    """The quadrature oracle would need more nodes than allowed."""


class MultiIndex(tuple):
    """Multiset of mode labels, stored as sorted ``(mode, multiplicity)`` pairs.

    The empty index is the constant monomial.

    >>> MultiIndex.of([2, 1, 2])
    MultiIndex({1: 1, 2: 2})
    """

    __slots__ = ()

    def __new__(cls, pairs: Iterable[tuple[int, int]] = ()):
        acc: dict[int, int] = {}
        for k, m in pairs:
            k, m = int(k), int(m)
            if k < 1:
                raise ValueError(f"mode labels are 1-based, got {k}")
            if m < 0:
                raise ValueError(f"negative multiplicity for mode {k}")
            if m:
                acc[k] = acc.get(k, 0) + m
        return super().__new__(cls, tuple(sorted(acc.items())))

    @classmethod
    def of(cls, key) -> "MultiIndex":
        """Coerce a MultiIndex, a mode->multiplicity mapping or a list of modes."""
        if isinstance(key, MultiIndex):
            return key
        if isinstance(key, Mapping):
            return cls(key.items())
        if isinstance(key, int):
            return cls([(key, 1)])
        key = list(key)
        if key and isinstance(key[0], (tuple, list)):
            return cls(key)
        return cls((k, 1) for k in key)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self)

    @property
    def modes(self) -> tuple[int, ...]:
        """Distinct modes, ascending."""
        return tuple(k for k, _ in self)

    def expanded(self) -> tuple[int, ...]:
        """The multiset as an ascending tuple with repetitions."""
        return tuple(k for k, m in self for _ in range(m))

    def get(self, k: int) -> int:
        for mode, m in self:
            if mode == k:
                return m
        return 0

    def factorial_weight(self) -> int:
        """``a! = prod_k (a_k)!``."""
        out = 1
        for _, m in self:
            out *= math.factorial(m)
        return out

    def orderings(self) -> int:
        """Number of ordered tuples with this multiset, ``|a|! / a!``."""
        return math.factorial(self.degree) // self.factorial_weight()

    def add(self, k: int, n: int = 1) -> "MultiIndex":
        return MultiIndex(list(self) + [(k, n)])

    def remove(self, k: int, n: int = 1) -> "MultiIndex":
        d = dict(self)
        if d.get(k, 0) < n:
            raise ValueError(f"mode {k} has multiplicity {d.get(k, 0)} < {n}")
        d[k] -= n
        return MultiIndex(d.items())

    def __add__(self, other):
        if not isinstance(other, MultiIndex):
            return NotImplemented
        return MultiIndex(list(self) + list(other))

    def __repr__(self):
        return f"MultiIndex({dict(self)})"

    def __str__(self):
        if not self:
            return "1"
        return ":" + " ".join(f"x{k}" if m == 1 else f"x{k}^{m}" for k, m in self) + ":"

    def to_json(self):
        return [[k, m] for k, m in self]


class DirectionVector:
    """Finitely supported real vector ``sum_k c_k e_k`` in the subspace V."""

    __slots__ = ("_c",)

    def __init__(self, components: Mapping[int, object] | None = None):
        c = {}
        for k, v in (components or {}).items():
            k = int(k)
            if k < 1:
                raise ValueError(f"mode labels are 1-based, got {k}")
            if isinstance(v, complex) or not is_real(v):
                raise ValueError("direction components must be real")
            if not is_zero(v):
                c[k] = v
        self._c = dict(sorted(c.items()))

    @classmethod
    def e(cls, k: int, c=1) -> "DirectionVector":
        return cls({k: c})

    @property
    def components(self) -> dict[int, object]:
        return dict(self._c)

    def items(self):
        return self._c.items()

    def get(self, k: int, default=0):
        return self._c.get(k, default)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self._c)

    def norm_squared(self):
        return sum((v * v for v in self._c.values()), Fraction(0))

    def __add__(self, other: "DirectionVector") -> "DirectionVector":
        c = dict(self._c)
        for k, v in other.items():
            c[k] = c.get(k, 0) + v
        return DirectionVector(c)

    def __neg__(self):
        return DirectionVector({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "DirectionVector":
        return DirectionVector({k: s * v for k, v in self._c.items()})

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if not isinstance(other, DirectionVector):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(tuple(self._c.items()))

    def __repr__(self):
        return f"DirectionVector({self._c})"


class WickPolynomial:
    """Immutable finite sum ``sum_a c_a :x_a:``.

    ``backend`` is ``"exact"`` (rational / Gaussian-rational / surd
    coefficients) or ``"float"``.  It is inferred from the coefficients unless
    given, in which case coefficients are cast.
    """

    __slots__ = ("_terms", "backend", "_max_degree")

    def __init__(self, terms: Mapping | None = None, backend: str | None = None):
        raw = {}
        for key, c in (terms or {}).items():
            a = MultiIndex.of(key)
            raw[a] = raw.get(a, 0) + c
        if backend is None:
            backend = FLOAT if any(backend_of(c) == FLOAT for c in raw.values()) else EXACT
        if backend not in (EXACT, FLOAT):
            raise ValueError(f"unknown backend {backend!r}")
        clean = {}
        for a, c in raw.items():
            c = cast(normalize(c), backend)
            if not is_zero(c):
                clean[a] = c
        self._terms = dict(sorted(clean.items()))
        self.backend = backend
        self._max_degree = max((a.degree for a in self._terms), default=0)

    # construction helpers
    @classmethod
    def zero(cls, backend: str = EXACT) -> "WickPolynomial":
        return cls({}, backend)

    @classmethod
    def constant(cls, c, backend: str | None = None) -> "WickPolynomial":
        return cls({MultiIndex(): c}, backend)

    @classmethod
    def monomial(cls, c, modes, backend: str | None = None) -> "WickPolynomial":
        return cls({MultiIndex.of(modes): c}, backend)

    @classmethod
    def var(cls, k: int, backend: str = EXACT) -> "WickPolynomial":
        """The first-order Wick monomial ``:x_k: = x_k``."""
        return cls({MultiIndex([(k, 1)]): 1}, backend)

    # views
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, key):
        return self._terms.get(MultiIndex.of(key), 0)

    @property
    def max_degree(self) -> int:
        return self._max_degree

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(sorted({k for a in self._terms for k in a.modes}))

    def degree_in(self, k: int) -> int:
        return max((a.get(k) for a in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_real(self) -> bool:
        return all(is_real(c) for c in self._terms.values())

    def is_constant(self) -> bool:
        return all(a.degree == 0 for a in self._terms)

    def constant_term(self):
        return self._terms.get(MultiIndex(), 0)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    # arithmetic
    def _joint_backend(self, other: "WickPolynomial") -> str:
        if not self._terms:
            return other.backend
        if not other._terms:
            return self.backend
        if self.backend != other.backend:
            raise BackendMismatch(f"cannot combine {self.backend} and {other.backend} polynomials")
        return self.backend

    def __add__(self, other):
        if not isinstance(other, WickPolynomial):
            other = WickPolynomial.constant(other, self.backend if self._terms else None)
        backend = self._joint_backend(other)
        terms = dict(self._terms)
        for a, c in other._terms.items():
            terms[a] = terms.get(a, 0) + c
        return WickPolynomial(terms, backend)

    __radd__ = __add__

    def __neg__(self):
        return WickPolynomial({a: -c for a, c in self._terms.items()}, self.backend)

    def __sub__(self, other):
        if not isinstance(other, WickPolynomial):
            other = WickPolynomial.constant(other, self.backend if self._terms else None)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "WickPolynomial":
        backend = self.backend
        if backend_of(s) == FLOAT and self._terms and backend == EXACT:
            raise BackendMismatch("scaling an exact polynomial by a float")
        return WickPolynomial({a: s * c for a, c in self._terms.items()}, backend)

    def __mul__(self, other):
        if isinstance(other, WickPolynomial):
            return wick_product(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def conjugate(self) -> "WickPolynomial":
        return WickPolynomial({a: conj(c) for a, c in self._terms.items()}, self.backend)

    def degree_part(self, n: int) -> "WickPolynomial":
        return WickPolynomial({a: c for a, c in self._terms.items() if a.degree == n}, self.backend)

    def to_float(self) -> "WickPolynomial":
        return WickPolynomial({a: to_float(c) for a, c in self._terms.items()}, FLOAT)

    def to_exact(self) -> "WickPolynomial":
        return WickPolynomial(self._terms, EXACT)

    def __eq__(self, other):
        if isinstance(other, WickPolynomial):
            return self._terms == other._terms
        if not self._terms:
            return other == 0
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "WickPolynomial(0)"
        body = " + ".join(f"({c})*{a}" for a, c in self._terms.items())
        return f"WickPolynomial({body})"

    # serialization
    def to_json(self) -> dict:
        rows = []
        for a, c in self._terms.items():
            re, im = _split(c)
            rows.append({"modes": a.to_json(), "re": _num_out(re), "im": _num_out(im)})
        return {"terms": rows}

    @classmethod
    def from_json(cls, data: Mapping, backend: str | None = None) -> "WickPolynomial":
        if not isinstance(data, Mapping) or set(data) - {"terms"}:
            raise ValueError("a Wick polynomial is an object with a single 'terms' list")
        terms = {}
        for i, row in enumerate(data.get("terms", [])):
            extra = set(row) - {"modes", "re", "im"}
            if extra:
                raise ValueError(f"terms[{i}]: unknown fields {sorted(extra)}")
            a = MultiIndex(tuple(p) for p in row.get("modes", []))
            re = _num_in(row.get("re", 0))
            im = _num_in(row.get("im", 0))
            if is_zero(im):
                c = re
            else:
                from .scalars import imag_unit
                c = normalize(re + imag_unit(backend_of(im) if backend is None else backend) * im)
            terms[a] = terms.get(a, 0) + c
        return cls(terms, backend)


def _split(c):
    if isinstance(c, (int, Fraction, float)):
        return c, 0
    if hasattr(c, "re") and hasattr(c, "im"):
        return c.re, c.im
    if isinstance(c, complex):
        return c.real, c.imag
    import sympy
    re, im = sympy.expand(c).as_real_imag()
    return normalize(re), normalize(im)


def _num_out(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, float)):
        return x
    return str(x)


def _num_in(x):
    if isinstance(x, bool):
        raise ValueError("booleans are not coefficients")
    if isinstance(x, (int, float)):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            import sympy
            return normalize(sympy.sympify(x))
    raise ValueError(f"bad coefficient {x!r}")


# ---------------------------------------------------------------------------
# inner products

def monomial_inner_product(a, b) -> Fraction:
    """``<:x_a:, :x_b:> = delta_ab a! / 2**|a|``."""
    a, b = MultiIndex.of(a), MultiIndex.of(b)
    if a != b:
        return Fraction(0)
    return Fraction(a.factorial_weight(), 2 ** a.degree)


def _weight(a: MultiIndex, backend: str):
    w = Fraction(a.factorial_weight(), 2 ** a.degree)
    return float(w) if backend == FLOAT else w


def inner_product(F: WickPolynomial, G: WickPolynomial):
    """Inner product, conjugate-linear in ``F``."""
    backend = F._joint_backend(G)
    small, big = (F, G) if len(F) <= len(G) else (G, F)
    total = 0
    for a, c in small.items():
        d = big._terms.get(a)
        if d is None:
            continue
        cf, cg = (c, d) if small is F else (d, c)
        total = total + conj(cf) * cg * _weight(a, backend)
    total = normalize(total)
    return float(total) if backend == FLOAT and not isinstance(total, complex) else total


def norm_squared(F: WickPolynomial):
    total = 0
    for a, c in F.items():
        total = total + conj(c) * c * _weight(a, F.backend)
    total = normalize(total)
    if isinstance(total, complex):
        total = total.real
    return float(total) if F.backend == FLOAT else total


def extract_coefficient(F: WickPolynomial, a):
    """Recover ``c_a`` from ``<:x_a:, F> * 2**|a| / a!``."""
    a = MultiIndex.of(a)
    probe = WickPolynomial({a: 1}, F.backend)
    ip = inner_product(probe, F)
    scale = Fraction(2 ** a.degree, a.factorial_weight())
    return normalize(ip * (float(scale) if F.backend == FLOAT else scale))


# ---------------------------------------------------------------------------
# products and derivatives

@lru_cache(maxsize=None)
def _linearize(m: int, n: int) -> tuple[tuple[int, Fraction], ...]:
    return tuple((m + n - 2 * j,
                  Fraction(math.factorial(j) * math.comb(m, j) * math.comb(n, j), 2 ** j))
                 for j in range(min(m, n) + 1))


@lru_cache(maxsize=1 << 16)
def _monomial_product(a: MultiIndex, b: MultiIndex) -> tuple[tuple[MultiIndex, Fraction], ...]:
    da, db = dict(a), dict(b)
    fixed = [(k, m) for k, m in a if k not in db] + [(k, m) for k, m in b if k not in da]
    shared = [k for k in da if k in db]
    choices = [[(k, p, w) for p, w in _linearize(da[k], db[k])] for k in shared]
    out = []
    for pick in cartesian(*choices):
        w = Fraction(1)
        pairs = list(fixed)
        for k, p, wk in pick:
            w *= wk
            pairs.append((k, p))
        out.append((MultiIndex(pairs), w))
    return tuple(out)


def wick_product(F: WickPolynomial, G: WickPolynomial, cap: int | None = None) -> WickPolynomial:
    """Pointwise product of two Wick polynomials, re-expanded in the Wick basis."""
    backend = F._joint_backend(G)
    cap = config.degree_cap() if cap is None else cap
    if F and G and F.max_degree + G.max_degree > cap:
        raise DegreeCapExceeded(
            f"product degree {F.max_degree + G.max_degree} exceeds cap {cap}")
    acc: dict[MultiIndex, object] = {}
    as_float = backend == FLOAT
    for a, c in F.items():
        for b, d in G.items():
            cd = c * d
            for g, w in _monomial_product(a, b):
                acc[g] = acc.get(g, 0) + cd * (float(w) if as_float else w)
    return WickPolynomial(acc, backend)


def partial_derivative(F: WickPolynomial, k: int) -> WickPolynomial:
    """``d/dx_k``; on the Wick basis ``d :x_k^m: = m :x_k^(m-1):``."""
    out = {}
    for a, c in F.items():
        m = a.get(k)
        if m:
            out[a.remove(k)] = c * m
    return WickPolynomial(out, F.backend)


def raise_mode(F: WickPolynomial, k: int) -> WickPolynomial:
    """Shift every monomial up by one power of mode ``k`` (no lower-order terms)."""
    return WickPolynomial({a.add(k): c for a, c in F.items()}, F.backend)


def directional_derivative(F: WickPolynomial, f: DirectionVector) -> WickPolynomial:
    out = WickPolynomial.zero(F.backend)
    for k, c in f.items():
        out = out + partial_derivative(F, k).scale(c)
    return out


# ---------------------------------------------------------------------------
# Gauss-Hermite oracle

@lru_cache(maxsize=None)
def _gauss_hermite(n: int):
    x, w = _herm.hermgauss(n)
    return x, w / math.sqrt(math.pi)


def _wick_table(x: np.ndarray, top: int) -> np.ndarray:
    # :x^p: = H_p(x) / 2^p with physicists' Hermite H_p
    rows = []
    for p in range(top + 1):
        coef = np.zeros(p + 1)
        coef[p] = 1.0
        rows.append(_herm.hermval(x, coef) / 2.0 ** p)
    return np.array(rows)


def _evaluate_on_grid(F: WickPolynomial, modes, tables):
    shape = tuple(t.shape[1] for t in tables)
    dtype = complex if any(isinstance(to_float(c), complex) for _, c in F.items()) else float
    out = np.zeros(shape, dtype=dtype)
    for a, c in F.items():
        term = np.array(to_float(c), dtype=dtype)
        for axis, k in enumerate(modes):
            row = tables[axis][a.get(k)]
            term = np.multiply.outer(term, row) if term.ndim else term * row
        out = out + term
    return out


def quadrature_eval(F: WickPolynomial, G: WickPolynomial, nodes: int | None = None) -> float:
    """``integral conj(F) G dmu`` by tensor Gauss-Hermite quadrature.

    The node count per mode is the smallest that integrates the product
    exactly; ``nodes`` (default from config) bounds it.
    """
    budget = config.quadrature_nodes() if nodes is None else nodes
    modes = sorted(set(F.modes) | set(G.modes))
    tables, weights = [], []
    for k in modes:
        deg = F.degree_in(k) + G.degree_in(k)
        need = deg // 2 + 1
        if need > budget:
            raise NodeBudgetExceeded(f"mode {k} needs {need} nodes, budget is {budget}")
        x, w = _gauss_hermite(need)
        tables.append(_wick_table(x, max(F.degree_in(k), G.degree_in(k))))
        weights.append(w)
    fv = _evaluate_on_grid(F, modes, tables)
    gv = _evaluate_on_grid(G, modes, tables)
    integrand = np.conj(fv) * gv
    for w in reversed(weights):
        integrand = integrand @ w
    value = complex(integrand)
    return value.real if abs(value.imag) == 0 else value
