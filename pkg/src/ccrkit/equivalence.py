"""Hilbert-Schmidt summability classifiers for transformed representations.

Every verdict is a finite exact sum plus a tail decided by a
:class:`~ccrkit.tails.TailRule`.  Partial sums are reported as evidence only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .lambda_map import LambdaMap, decompose_parts, in_lq
from .scalars import normalize
from .symplectic import (QuasifreeSpec, _inv, induced_map, is_complex_structure,
                         is_exact_matrix, shale_index)
from .tails import MissingTail, TailFamily, TailRule
from .wick import _num_out, norm_squared

QUASI = "quasi_equivalent"
NOT_QUASI = "not_quasi_equivalent"


class NotComplexStructure(ValueError):
    pass


@dataclass(frozen=True)
class HSValue:
    """A nonnegative series: finite part plus tail, or divergent."""

    convergent: bool
    lower: object = 0
    upper: object = 0
    reason: str = ""
    partial_sums: tuple = ()

    @property
    def value(self):
        if not self.convergent:
            return "divergent"
        if self.lower == self.upper:
            return self.lower
        return {"lower": self.lower, "upper": self.upper}

    def __add__(self, other: "HSValue") -> "HSValue":
        if not (self.convergent and other.convergent):
            reason = self.reason if not self.convergent else other.reason
            return HSValue(False, reason=reason,
                           partial_sums=self.partial_sums + other.partial_sums)
        return HSValue(True, _add(self.lower, other.lower), _add(self.upper, other.upper),
                       "; ".join(dict.fromkeys(r for r in (self.reason, other.reason) if r)),
                       self.partial_sums + other.partial_sums)


def _add(a, b):
    s = a + b
    return normalize(s) if not isinstance(s, float) else float(s)


def _json_num(x):
    if isinstance(x, dict):
        return {k: _json_num(v) for k, v in x.items()}
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return _num_out(Fraction(x))
    if isinstance(x, float):
        return float(x) if math.isfinite(x) else "inf"
    return x


@dataclass(frozen=True)
class EquivalenceVerdict:
    verdict: str
    criterion: str
    hs: HSValue
    components: Mapping[str, HSValue] = field(default_factory=dict)

    @property
    def hs_value(self):
        return self.hs.value

    @property
    def evidence(self) -> tuple:
        return self.hs.partial_sums

    @property
    def quasi_equivalent(self) -> bool:
        return self.verdict == QUASI

    def __bool__(self):
        return self.quasi_equivalent

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "criterion": self.criterion,
               "hs_value": _json_num(self.hs_value),
               "evidence": [_json_num(x) for x in self.evidence]}
        if self.hs.reason:
            out["reason"] = self.hs.reason
        if self.components:
            out["components"] = {k: _json_num(v.value) for k, v in self.components.items()}
        return out


def _as_family(tail) -> TailFamily:
    if tail is None:
        return TailFamily.zero()
    if isinstance(tail, TailRule):
        return TailFamily({}, tail)
    return tail


def _partials(terms: Sequence) -> tuple:
    out, acc = [], Fraction(0)
    for t in terms:
        acc = _add(acc, t)
        out.append(acc)
    return tuple(out)


def _series(terms: Mapping[int, object], tail) -> HSValue:
    """Explicit ``terms`` by mode, then the family's extra explicit terms and rule."""
    fam = _as_family(tail)
    last = max(terms, default=0)
    start = fam.tail_start(last)
    explicit = dict(terms)
    for k, v in fam.explicit.items():
        if k not in explicit and k < start:
            explicit[k] = v
    ordered = [explicit[k] for k in sorted(explicit)]
    finite = Fraction(0)
    for v in ordered:
        finite = _add(finite, v)
    t = fam.rule.tail_sum(start)
    partials = _partials(ordered)
    if not t.convergent:
        return HSValue(False, reason=t.reason, partial_sums=partials)
    return HSValue(True, _add(finite, t.lower), _add(finite, t.upper), t.reason, partials)


def hs_norm(explicit, tail=None) -> HSValue:
    """Squared Hilbert-Schmidt norm of a finite block plus a tail.

    A 1-d ``explicit`` is a list of already-squared per-mode values (mode
    ``k`` at position ``k-1``); a 2-d one is a matrix whose squared entries
    are summed.
    """
    arr = np.asarray(explicit, dtype=object)
    if arr.ndim == 2:
        n = arr.shape[0] // 2 if arr.shape[0] % 2 == 0 else arr.shape[0]
        terms = {1: normalize(sum((x * x for x in arr.flat), Fraction(0)))}
        return _series(terms, _shift_tail(tail, max(n, 1)))
    return _series({k: v for k, v in enumerate(list(explicit), start=1)}, tail)


def classify_vs_fock(lam: LambdaMap, tail=None) -> EquivalenceVerdict:
    """``sum_k (Lambda e_k)^2 + ||Lambda J e_k||^2`` must converge."""
    tail = tail if tail is not None else lam.tail
    terms = {k: normalize(lam.v(k) ** 2 + norm_squared(lam.jv(k))) for k in lam.support}
    hs = _series(terms, tail)
    return EquivalenceVerdict(QUASI if hs.convergent else NOT_QUASI,
                              "equivalence.fock-hilbert-schmidt", hs)


def _l_vector(l_values: Mapping[int, Sequence], n: int):
    vec = [Fraction(0)] * (2 * n)
    for k, (a, b) in l_values.items():
        if not 1 <= k <= n:
            raise ValueError(f"mode {k} outside the {n}-mode metric")
        vec[k - 1] = a
        vec[n + k - 1] = b
    return vec


def _riesz_norm(vec, metric):
    if metric is None:
        return normalize(sum((x * x for x in vec), Fraction(0)))
    M = np.asarray(metric)
    if is_exact_matrix(M) and all(not isinstance(x, float) for x in vec):
        Mi = _inv(M)
        v = np.array(vec, dtype=object)
        return normalize(v @ Mi @ v)
    v = np.array([float(x) for x in vec])
    return float(v @ np.linalg.solve(np.asarray(M, dtype=float), v))


def classify_coherent_shift(l_values: Mapping[int, Sequence], base_metric=None,
                            tail=None) -> EquivalenceVerdict:
    """Bounded ``l`` for the base metric ``s'(u,v) = u^T M v``.

    The Riesz representer of ``l`` has squared norm ``L^T M^{-1} L``; with
    ``M = 1`` that is ``sum_k l(e_k)^2 + l(Je_k)^2``.  ``tail`` describes those
    per-mode sums beyond the listed modes and is required.
    """
    if tail is None:
        raise MissingTail("classify_coherent_shift needs a tail rule for l")
    n = max(l_values, default=0)
    if base_metric is not None:
        n = max(n, np.asarray(base_metric).shape[0] // 2)
    value = _riesz_norm(_l_vector(l_values, n), base_metric)
    hs = _series({1: value} if n else {}, _shift_tail(tail, n))
    return EquivalenceVerdict(QUASI if hs.convergent else NOT_QUASI,
                              "equivalence.coherent-boundedness", hs)


def _shift_tail(tail, n: int) -> TailFamily:
    # explicit block has been collapsed into one term; the rule keeps its own start
    fam = _as_family(tail)
    start = fam.tail_start(n)
    rule = fam.rule
    rule = TailRule(rule.kind, rule.c, rule.p, rule.summable, rule.value, start, rule.relation)
    extra = {k: v for k, v in fam.explicit.items() if k > n}
    return TailFamily(extra, rule)


def classify_vs_quasifree(lam: LambdaMap, tail, spec: QuasifreeSpec,
                          linear_tail=None, coherent_tail=None) -> EquivalenceVerdict:
    """Conjunction of the degree <= 1 comparison and the higher-part series.

    * coherent: ``(l_Lambda - l_spec)`` has finite norm in the metric
      ``T^T T`` (plus ``coherent_tail``)
    * linear: the relative map ``(1 + SJP) T^{-1}`` has finite Shale index
      (plus ``linear_tail``)
    * higher: ``sum_k ||(1 - P_0 - P_1) Lambda J e_k||^2`` plus ``tail``
    """
    if tail is None:
        raise MissingTail("classify_vs_quasifree needs a tail for the higher-degree series")
    n = spec.n
    if lam.support and max(lam.support) > n:
        raise ValueError(f"map touches mode {max(lam.support)} outside the {n}-mode spec")
    parts = decompose_parts(lam)
    T = spec.T

    l_lam = _l_vector(parts.coherent, n)
    diff = [a - b for a, b in zip(l_lam, spec.l)]
    metric = T.T @ T
    coh = _series({1: _riesz_norm(diff, metric)} if n else {}, _shift_tail(coherent_tail, n))

    S = np.empty((n, n), dtype=object)
    for k in range(1, n + 1):
        P = parts.linear.jv(k)
        for j in range(1, n + 1):
            S[j - 1, k - 1] = -P.coefficient([j])
    T_lam = np.asarray(induced_map(S), dtype=float) if n else np.zeros((0, 0))
    rel = T_lam @ np.linalg.inv(np.asarray(T, dtype=float)) if n else T_lam
    shale = shale_index(rel) if n else 0.0
    lin = _series({1: Fraction(0) if shale == 0 else shale} if n else {},
                  _shift_tail(linear_tail, n))

    higher_terms = {k: norm_squared(parts.higher.jv(k)) for k in lam.support}
    hi = _series(higher_terms, tail)

    total = coh + lin + hi
    criterion = ("equivalence.higher-order-hilbert-schmidt" if in_lq(lam)
                 else "equivalence.quasifree-hilbert-schmidt")
    return EquivalenceVerdict(QUASI if total.convergent else NOT_QUASI, criterion, total,
                              {"coherent": coh, "linear": lin, "higher": hi})


def fock_pair_equivalence(J_a, J_b, tail=None) -> EquivalenceVerdict:
    """``||J_a - J_b||_HS^2`` over the explicit block plus ``tail``."""
    for name, Jm in (("J_a", J_a), ("J_b", J_b)):
        v = is_complex_structure(Jm)
        if not v:
            raise NotComplexStructure(f"{name}: {v.detail}")
    Ja, Jb = np.asarray(J_a), np.asarray(J_b)
    if Ja.shape != Jb.shape:
        raise ValueError("complex structures of different dimension")
    D = Ja - Jb
    if D.dtype != object:
        D = D.astype(float)
    n = Ja.shape[0] // 2
    block = normalize(sum((x * x for x in D.flat), Fraction(0)))
    hs = _series({1: block}, _shift_tail(tail, n))
    return EquivalenceVerdict(QUASI if hs.convergent else NOT_QUASI, "equivalence.fock-pair", hs)


def per_mode_pair_structures(a_values: Sequence[float]):
    """Block-diagonal ``J`` and ``J'`` for ``M_k = diag(a_k, 1/a_k)`` per mode."""
    n = len(a_values)
    J = np.zeros((2 * n, 2 * n))
    Jp = np.zeros((2 * n, 2 * n))
    for i, a in enumerate(a_values):
        J[i, n + i], J[n + i, i] = -1.0, 1.0
        Jp[i, n + i], Jp[n + i, i] = -1.0 / a, a
    return J, Jp
