"""Seeded random instances shared by the verification suites and the tests."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
from scipy.linalg import expm

from .lambda_map import LambdaMap, SymmetricTensorView, reconstruct_images
from .scalars import EXACT
from .symplectic import omega
from .wick import MultiIndex, WickPolynomial

DEFAULT_SEED = 20240917


def rng_for(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(DEFAULT_SEED if seed is None else seed)


def _rational(rng, bound: int = 5) -> Fraction:
    num = int(rng.integers(-bound, bound + 1))
    den = int(rng.integers(1, 4))
    return Fraction(num, den)


def random_wick_polynomial(rng, n_modes: int, max_degree: int, n_terms: int = 5,
                           min_degree: int = 0) -> WickPolynomial:
    """Real polynomial with small rational coefficients on modes ``1..n_modes``."""
    terms = {}
    for _ in range(n_terms):
        d = int(rng.integers(min_degree, max_degree + 1))
        modes = sorted(int(k) for k in rng.integers(1, n_modes + 1, size=d))
        terms[MultiIndex.of(modes)] = _rational(rng)
    return WickPolynomial(terms, EXACT)


def random_symmetric_tensor(rng, order: int, n_modes: int, density: float = 0.5
                            ) -> SymmetricTensorView:
    entries = {}
    for combo in combinations_with_replacement(range(1, n_modes + 1), order):
        if rng.random() < density:
            c = _rational(rng)
            if c:
                entries[MultiIndex.of(combo)] = c
    if not entries:
        combo = sorted(int(k) for k in rng.integers(1, n_modes + 1, size=order))
        entries[MultiIndex.of(combo)] = Fraction(1)
    return SymmetricTensorView(order, dict(sorted(entries.items())))


def random_ccr_lambda(rng, n_modes: int, max_order: int, min_order: int = 2
                      ) -> tuple[LambdaMap, list[SymmetricTensorView]]:
    """CCR-valid map built from random symmetric tensors of orders ``min..max``."""
    tensors = [random_symmetric_tensor(rng, o, n_modes)
               for o in range(min_order, max_order + 1)]
    return LambdaMap({}, reconstruct_images(tensors)), tensors


def mutate_transposition(lam: LambdaMap, rng) -> LambdaMap:
    """Perturb one tensor entry without touching its transposed partner.

    Adds ``delta :x_j x_a:`` to ``Lambda J e_k`` for ``j != k``; the entry
    ``lambda_{k, j a}`` changes while ``lambda_{j, k a}`` does not.
    """
    modes = list(lam.support) if len(lam.support) >= 2 else [1, 2]
    k, j = (int(x) for x in rng.choice(modes, size=2, replace=False))
    m = max(lam.degree, 1)
    rest = sorted(int(x) for x in rng.choice(modes, size=m - 1)) if m > 1 else []
    a = MultiIndex.of([j, *rest])
    delta = Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 3)))
    jv = dict(lam.jv_images)
    jv[k] = lam.jv(k) + WickPolynomial({a: delta})
    return LambdaMap(dict(lam.v_images), jv, support=lam.support)


def random_symplectic(rng, n: int, scale: float = 0.5) -> np.ndarray:
    """``expm(Omega H)`` for a random symmetric ``H``."""
    A = rng.normal(size=(2 * n, 2 * n))
    H = scale * (A + A.T) / 2
    return expm(omega(n) @ H)


def random_invertible(rng, n: int) -> np.ndarray:
    while True:
        A = rng.normal(size=(2 * n, 2 * n))
        if abs(np.linalg.det(A)) > 1e-3:
            return A


def random_compatible_metric(rng, n: int) -> np.ndarray:
    """``M = T^T T`` for a random symplectic ``T``; ``-Omega M`` is then a complex structure."""
    T = random_symplectic(rng, n)
    return T.T @ T
