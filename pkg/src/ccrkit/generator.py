"""Unitary generators ``G`` with ``d_k G = Lambda J e_k`` and conjugation checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fock import HVector
from .lambda_map import (LambdaMap, SymmetricTensorView, Verdict, assemble_tensor,
                         validate_ccr, NotCCR)
from .scalars import EXACT, normalize
from .truncation import (TruncationScheme, truncate_field, truncate_multiplication,
                         weyl_matrix)
from .wick import MultiIndex, WickPolynomial, norm_squared, partial_derivative


class AsymmetricTensor(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorResult:
    G: WickPolynomial
    norm_G: object = None
    norm_F: object = None

    @property
    def norm_bound_ok(self) -> bool | None:
        if self.norm_F is None:
            return None
        return self.norm_G <= self.norm_F


def build_generator_symmetric(tensors, backend: str = EXACT) -> GeneratorResult:
    """``G = sum_beta lambda_beta * m!/beta! :x_beta:`` over order ``m+1`` tensors.

    For a symmetric tensor this is the primitive whose gradient is the map the
    tensor came from.
    """
    terms: dict[MultiIndex, object] = {}
    for t in tensors:
        if isinstance(t, SymmetricTensorView):
            order, entries = t.order, t.entries
        else:
            order, entries = t
            entries = {MultiIndex.of(b): v for b, v in dict(entries).items()}
        m = order - 1
        if m < 1:
            raise ValueError("generator tensors need order >= 2")
        for beta, val in entries.items():
            beta = MultiIndex.of(beta)
            if beta.degree != order:
                raise AsymmetricTensor(f"entry {beta} does not have order {order}")
            c = normalize(val * Fraction(math.factorial(m), beta.factorial_weight()))
            terms[beta] = terms.get(beta, 0) + c
    return GeneratorResult(WickPolynomial(terms, backend))


def build_generator_for(lam: LambdaMap) -> GeneratorResult:
    """Symmetric-construction generator for a CCR-valid map without degree 0 parts."""
    v = validate_ccr(lam)
    if not v:
        raise NotCCR(v.detail)
    if lam.v_images or any(P.constant_term() for P in lam.jv_images.values()):
        raise ValueError("constant parts have no Wick primitive of positive degree here")
    degrees = sorted({a.degree for P in lam.jv_images.values() for a, _ in P.items()})
    return build_generator_symmetric([assemble_tensor(lam, m) for m in degrees], lam.backend)


def build_generator_single_mode(F: WickPolynomial, distinguished: int) -> GeneratorResult:
    """``G = sum_n :x_d^{n+1}: G_n / (n+1)`` where ``F = sum_n :x_d^n: G_n``."""
    if not F.is_real():
        raise ValueError("the single-mode construction needs a real F")
    d = distinguished
    terms = {}
    for a, c in F.items():
        n = a.get(d)
        terms[a.add(d)] = normalize(c * Fraction(1, n + 1))
    G = WickPolynomial(terms, F.backend)
    return GeneratorResult(G, norm_squared(G), norm_squared(F))


def verify_gradient(G: WickPolynomial, lam: LambdaMap) -> Verdict:
    modes = sorted(set(lam.support) | set(G.modes))
    for k in modes:
        dG = partial_derivative(G, k)
        target = lam.jv(k)
        if dG != target:
            return Verdict(False, {"k": k, "dG": dG.to_json(), "image": target.to_json()},
                           f"d_{k} G != Lambda J e_{k}")
    return Verdict(True)


@dataclass(frozen=True)
class ResidualRow:
    cutoff: int
    probe: int
    residual: float

    def to_json(self) -> dict:
        return {"cutoff": self.cutoff, "probe": self.probe, "residual": self.residual}


def conjugation_residual(G: WickPolynomial, lam: LambdaMap, f: HVector,
                         scheme: TruncationScheme) -> float:
    """Probe-block max of ``e^{-iG} Phi(f) e^{iG} - Phi_Lambda(f)``.

    ``G`` and ``Lambda f`` are evaluated on the truncated position matrices
    so that multiplications commute exactly, as they do before truncation.
    """
    U = weyl_matrix(truncate_multiplication(G, scheme, compress=False)).matrix
    phi = truncate_field(f, scheme).matrix
    lf = lam.apply(f)
    phi_lam = phi + truncate_multiplication(lf, scheme, compress=False).matrix
    R = U.conj().T @ phi @ U - phi_lam
    p = scheme.probe_indices()
    return float(np.max(np.abs(R[np.ix_(p, p)])))


def conjugation_evidence(lam: LambdaMap, f: HVector, cutoffs, probe: int = 5,
                         G: WickPolynomial | None = None) -> list[ResidualRow]:
    """Residual table of the truncated conjugation identity, one row per cutoff."""
    if G is None:
        G = build_generator_for(lam).G if not lam.is_zero() else WickPolynomial.zero()
    modes = sorted(set(lam.support) | set(f.support) | set(G.modes)) or [1]
    rows = []
    for N in cutoffs:
        scheme = TruncationScheme(tuple(modes), int(N), probe)
        rows.append(ResidualRow(int(N), probe, conjugation_residual(G, lam, f, scheme)))
    return rows


def strictly_decreasing(rows) -> bool:
    vals = [r.residual for r in rows]
    return all(b < a for a, b in zip(vals, vals[1:]))
