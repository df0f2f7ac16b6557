"""Analytic descriptors for infinite nonnegative series.

A :class:`TailFamily` records finitely many explicit terms ``a_k`` and a
:class:`TailRule` for every ``k`` past them.  Summability is decided from the
rule alone; partial sums are never extrapolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .scalars import as_real_number

ZERO = "zero"
POWER_LAW = "power_law"
CUSTOM = "custom"
EQ, LE, GE = "eq", "le", "ge"


class MissingTail(ValueError):
    """A verdict needs tail metadata that was not supplied."""


class InconclusiveTail(ValueError):
    """A one-sided power-law bound points the wrong way to decide summability."""


@dataclass(frozen=True)
class TailSum:
    """Result of summing a tail: ``convergent`` plus bounds when known."""

    convergent: bool
    lower: object = 0
    upper: object = 0
    reason: str = ""

    @property
    def exact(self) -> bool:
        return self.convergent and self.lower == self.upper


@dataclass(frozen=True)
class TailRule:
    """``a_k`` for ``k >= start``: zero, ``c * k**-p``, or a declared custom series.

    ``start=None`` means "right after the explicit terms".  A custom rule
    must say whether it is summable; ``value`` optionally gives its sum.
    ``relation`` lets a power law be an upper (``"le"``) or lower (``"ge"``)
    bound on the terms instead of their exact value.
    """

    kind: str = ZERO
    c: object = 0
    p: object = 0
    summable: bool | None = None
    value: object = None
    start: int | None = None
    relation: str = EQ

    def __post_init__(self):
        if self.kind not in (ZERO, POWER_LAW, CUSTOM):
            raise ValueError(f"unknown tail rule {self.kind!r}")
        if self.kind == POWER_LAW:
            if self.c < 0 or self.p <= 0:
                raise ValueError("power_law needs c >= 0 and p > 0")
        if self.relation not in (EQ, LE, GE):
            raise ValueError(f"unknown relation {self.relation!r}")
        if self.start is not None and self.start < 1:
            raise ValueError("tail start must be a positive mode index")

    @classmethod
    def zero(cls) -> "TailRule":
        return cls(ZERO)

    @classmethod
    def power_law(cls, c, p, start: int | None = None, relation: str = EQ) -> "TailRule":
        return cls(POWER_LAW, c=c, p=p, start=start, relation=relation)

    @classmethod
    def custom(cls, summable: bool | None, value=None, start: int | None = None) -> "TailRule":
        return cls(CUSTOM, summable=summable, value=value, start=start)

    def is_zero(self) -> bool:
        return self.kind == ZERO or (self.kind == POWER_LAW and self.c == 0
                                     and self.relation != GE)

    def term(self, k: int):
        if self.kind == POWER_LAW:
            return self.c * _pow(k, -self.p)
        if self.kind == ZERO:
            return 0
        raise ValueError("custom tails have no closed-form terms")

    def tail_sum(self, k0: int) -> TailSum:
        """Sum of ``a_k`` over ``k >= k0``."""
        if self.is_zero():
            return TailSum(True, 0, 0, "zero tail")
        if self.kind == CUSTOM:
            if self.summable is None:
                raise MissingTail("custom tail with unset summability flag")
            if not self.summable:
                return TailSum(False, reason="custom tail declared non-summable")
            v = self.value
            return TailSum(True, v if v is not None else 0, v if v is not None else math.inf,
                           "custom tail declared summable")
        p = self.p
        if p <= 1:
            if self.relation == LE:
                raise InconclusiveTail(f"an upper bound c*k^-{p} with p <= 1 does not decide")
            if self.c == 0:
                raise InconclusiveTail("a zero lower bound does not decide")
            return TailSum(False, reason=f"p-series with p = {p} <= 1 diverges")
        if self.relation == GE:
            raise InconclusiveTail(f"a lower bound c*k^-{p} with p > 1 does not decide")
        # integral test: int_{k0}^inf <= sum_{k>=k0} <= a_{k0} + int_{k0}^inf
        integral = self.c * _pow(k0, 1 - p) / (p - 1)
        lower = 0 if self.relation == LE else integral
        return TailSum(True, lower, self.term(k0) + integral,
                       f"p-series with p = {p} > 1 converges (integral bounds from k = {k0})")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == POWER_LAW:
            out.update(c=_num(self.c), p=_num(self.p))
            if self.relation != EQ:
                out["relation"] = self.relation
        if self.kind == CUSTOM:
            out["summable"] = self.summable
            if self.value is not None:
                out["value"] = _num(self.value)
        if self.start is not None:
            out["start"] = self.start
        return out

    @classmethod
    def from_json(cls, d: Mapping) -> "TailRule":
        allowed = {"kind", "c", "p", "summable", "value", "start", "relation"}
        extra = set(d) - allowed
        if extra:
            raise ValueError(f"tail rule: unknown fields {sorted(extra)}")
        kind = d.get("kind", ZERO)
        start = d.get("start")
        if kind == POWER_LAW:
            return cls.power_law(as_real_number(d["c"]), as_real_number(d["p"]), start,
                                 d.get("relation", EQ))
        if kind == CUSTOM:
            v = d.get("value")
            return cls.custom(d.get("summable"), None if v is None else as_real_number(v), start)
        return cls(kind, start=start)


@dataclass(frozen=True)
class TailFamily:
    """Explicit nonnegative terms on finitely many modes plus a tail rule."""

    explicit: Mapping[int, object] = field(default_factory=dict)
    rule: TailRule = field(default_factory=TailRule)

    def __post_init__(self):
        clean = {}
        for k, v in dict(self.explicit).items():
            if v < 0:
                raise ValueError(f"negative tail term at mode {k}")
            clean[int(k)] = v
        object.__setattr__(self, "explicit", dict(sorted(clean.items())))

    @classmethod
    def zero(cls) -> "TailFamily":
        return cls({}, TailRule.zero())

    @classmethod
    def power_law(cls, c, p, start: int | None = None, explicit=None,
                  relation: str = EQ) -> "TailFamily":
        return cls(explicit or {}, TailRule.power_law(c, p, start, relation))

    def tail_start(self, after: int = 0) -> int:
        """First mode governed by the rule."""
        if self.rule.start is not None:
            return self.rule.start
        return max([after, *self.explicit]) + 1

    def total(self, after: int = 0) -> tuple[object, TailSum]:
        """Explicit finite sum and the rule's tail sum."""
        start = self.tail_start(after)
        finite = sum((v for k, v in self.explicit.items() if k < start), Fraction(0))
        return finite, self.rule.tail_sum(start)

    def to_json(self) -> dict:
        return {"explicit": [[k, _num(v)] for k, v in self.explicit.items()],
                "rule": self.rule.to_json()}

    @classmethod
    def from_json(cls, d: Mapping) -> "TailFamily":
        extra = set(d) - {"explicit", "rule"}
        if extra:
            raise ValueError(f"tail family: unknown fields {sorted(extra)}")
        explicit = {int(k): as_real_number(v) for k, v in d.get("explicit", [])}
        return cls(explicit, TailRule.from_json(d.get("rule", {"kind": ZERO})))


def _pow(k: int, e):
    if isinstance(e, int) or (isinstance(e, Fraction) and e.denominator == 1):
        return Fraction(k) ** int(e)
    return float(k) ** float(e)


def _num(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x
