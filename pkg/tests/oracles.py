"""Independent numeric oracles built straight from numpy's Hermite module.

Nothing here imports the Wick algebra's own evaluation code.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import numpy as np
from numpy.polynomial.hermite import hermgauss, hermval


def wick_monomial_1d(n: int, x: np.ndarray) -> np.ndarray:
    # :x^n: = H_n(x) / 2^n for the weight exp(-x^2)
    c = np.zeros(n + 1)
    c[n] = 1.0
    return hermval(x, c) / 2.0 ** n


def _grid(n_modes: int, nodes: int):
    x, w = hermgauss(nodes)
    w = w / math.sqrt(math.pi)
    pts = np.array(list(product(x, repeat=n_modes)))
    wts = np.array([math.prod(t) for t in product(w, repeat=n_modes)])
    return pts, wts


def evaluate(poly_terms: dict, modes: list[int], pts: np.ndarray) -> np.ndarray:
    """``poly_terms`` maps tuples of ``(mode, mult)`` to complex coefficients."""
    out = np.zeros(len(pts), dtype=complex)
    pos = {k: i for i, k in enumerate(modes)}
    for key, c in poly_terms.items():
        v = np.ones(len(pts))
        for k, m in key:
            v = v * wick_monomial_1d(m, pts[:, pos[k]])
        out += complex(c) * v
    return out


def terms_of(F) -> dict:
    return {tuple(a): complex(c) for a, c in F.items()}


def integrate(polys, modes: list[int], nodes: int) -> complex:
    """``E[prod polys]`` under the product Gaussian of variance 1/2."""
    pts, wts = _grid(len(modes), nodes)
    vals = np.ones(len(pts), dtype=complex)
    for p in polys:
        vals = vals * evaluate(terms_of(p), modes, pts)
    return complex(vals @ wts)


def coefficient_by_quadrature(product_of, alpha, modes, nodes) -> complex:
    """``c_alpha`` of the pointwise product of ``product_of`` via projection."""
    from ccrkit.wick import MultiIndex, WickPolynomial
    a = MultiIndex.of(alpha)
    probe = WickPolynomial({a: 1})
    weight = Fraction(math.prod(math.factorial(m) for _, m in a), 2 ** a.degree)
    return integrate([probe, *product_of], modes, nodes) / float(weight)
