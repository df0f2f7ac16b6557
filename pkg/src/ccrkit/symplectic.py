"""Finite-dimensional symplectic linear algebra in the ``q-then-p`` basis.

Coordinates are ``(e_1..e_n, Je_1..Je_n)``.  With

    Omega = [[0, I], [-I, 0]],   J = [[0, -I], [I, 0]]

``sigma(u, v) = u^T Omega v`` gives ``sigma(e_k, J e_l) = delta_kl`` and
``s(u, v) = -sigma(Ju, v) = u^T v``.  A second complex structure ``J'`` has
the metric ``s'(u, v) = -sigma(J'u, v) = u^T M v`` with ``M = Omega J'``.

Matrices are numpy arrays.  Arrays of dtype ``object`` holding ints or
Fractions are treated exactly; everything else uses float tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .lambda_map import LambdaMap, Verdict, validate_ccr
from .scalars import sqrt_of
from .wick import MultiIndex, WickPolynomial

BASIS = "q-then-p"
DEFAULT_TOL = 1e-10


class SingularMatrix(ValueError):
    pass


class NotPositive(ValueError):
    """``-J K`` is not positive symmetric, so the inputs are incompatible."""


class AsymmetricS(ValueError):
    pass


def is_exact_matrix(M) -> bool:
    M = np.asarray(M)
    return M.dtype == object


def exact(M) -> np.ndarray:
    """Object array of Fractions."""
    M = np.asarray(M, dtype=object)
    return np.vectorize(lambda x: Fraction(x), otypes=[object])(M)


def _half(M) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    if M.shape[0] % 2:
        raise ValueError(f"symplectic matrices have even dimension, got {M.shape[0]}")
    return M.shape[0] // 2


def omega(n: int, exact_: bool = False) -> np.ndarray:
    Z, I = np.zeros((n, n), dtype=int), np.eye(n, dtype=int)
    out = np.block([[Z, I], [-I, Z]])
    return exact(out) if exact_ else out.astype(float)


def standard_J(n: int, exact_: bool = False) -> np.ndarray:
    Z, I = np.zeros((n, n), dtype=int), np.eye(n, dtype=int)
    out = np.block([[Z, -I], [I, Z]])
    return exact(out) if exact_ else out.astype(float)


def _like(n: int, M, builder):
    return builder(n, is_exact_matrix(M))


def _inv(T) -> np.ndarray:
    if is_exact_matrix(T):
        import sympy
        S = sympy.Matrix(T.tolist())
        if S.det() == 0:
            raise SingularMatrix("matrix is singular")
        inv = S.inv()
        return np.array([[Fraction(int(x.p), int(x.q)) for x in row]
                         for row in inv.tolist()], dtype=object)
    T = np.asarray(T, dtype=float)
    if np.linalg.matrix_rank(T) < T.shape[0]:
        raise SingularMatrix("matrix is singular")
    return np.linalg.inv(T)


def _residual_verdict(R, scale, tol) -> Verdict:
    if R.dtype == object:
        ok = all(x == 0 for x in R.flat)
        return Verdict(ok, None if ok else {"residual": "nonzero (exact)"})
    r = float(np.max(np.abs(R), initial=0.0))
    ok = r <= tol * max(1.0, scale)
    return Verdict(ok, {"residual": r}, "" if ok else f"residual {r:.3g}")


def _scale(T) -> float:
    return float(np.max(np.abs(np.asarray(T, dtype=float)), initial=0.0)) ** 2


def is_symplectic(T, tol: float = DEFAULT_TOL) -> Verdict:
    """``T^T Omega T == Omega``."""
    n = _half(T)
    T = np.asarray(T)
    W = _like(n, T, omega)
    return _residual_verdict(T.T @ W @ T - W, _scale(T), tol)


def adjoint_symplectic_check(T, tol: float = DEFAULT_TOL) -> Verdict:
    """``-J T^{-1} J == T^T`` (equivalently ``T = -J T^{-1} J`` for symmetric T)."""
    n = _half(T)
    T = np.asarray(T)
    Jm = _like(n, T, standard_J)
    Ti = _inv(T)
    scale = max(_scale(T), _scale(Ti))
    return _residual_verdict(-(Jm @ Ti @ Jm) - T.T, scale, tol)


def is_complex_structure(Jp, tol: float = 1e-9) -> Verdict:
    """``J'^2 = -1``, ``J'`` symplectic and ``-sigma(J'f, f) > 0``."""
    n = _half(Jp)
    Jp = np.asarray(Jp)
    sq = _residual_verdict(Jp @ Jp + (exact(np.eye(2 * n, dtype=int)) if is_exact_matrix(Jp)
                                      else np.eye(2 * n)), 1.0, tol)
    if not sq:
        return Verdict(False, {"condition": "J'^2 = -1"}, "J' does not square to -1")
    if not is_symplectic(Jp, tol):
        return Verdict(False, {"condition": "symplectic"}, "J' does not preserve sigma")
    M = np.asarray(_like(n, Jp, omega) @ Jp, dtype=float)
    if np.max(np.abs(M - M.T)) > tol or np.linalg.eigvalsh((M + M.T) / 2).min() <= 0:
        return Verdict(False, {"condition": "positive"}, "-sigma(J'f, f) is not positive")
    return Verdict(True)


def metric_of(Jp) -> np.ndarray:
    """``M`` with ``s'(u, v) = u^T M v``."""
    n = _half(Jp)
    return _like(n, Jp, omega) @ np.asarray(Jp)


def complex_structure_of(M) -> np.ndarray:
    """``J' = -Omega M``, the inverse of :func:`metric_of`."""
    n = _half(M)
    return -(_like(n, M, omega) @ np.asarray(M))


def _sqrt_psd(A, tol: float):
    if is_exact_matrix(A):
        off = [A[i, j] for i in range(A.shape[0]) for j in range(A.shape[1]) if i != j]
        if all(x == 0 for x in off):
            diag = [A[i, i] for i in range(A.shape[0])]
            if any(d <= 0 for d in diag):
                raise NotPositive("-JK has a nonpositive eigenvalue")
            roots = [sqrt_of(d, "exact") for d in diag]
            if all(isinstance(r, Fraction) for r in roots):
                out = exact(np.zeros(A.shape, dtype=int))
                for i, r in enumerate(roots):
                    out[i, i] = r
                return out
        A = np.asarray(A, dtype=float)
    A = np.asarray(A, dtype=float)
    if np.max(np.abs(A - A.T), initial=0.0) > tol * max(1.0, np.abs(A).max()):
        raise NotPositive("-JK is not symmetric")
    w, V = np.linalg.eigh((A + A.T) / 2)
    if w.min() < 1e-12:
        raise NotPositive(f"-JK has eigenvalue {w.min():.3g} below 1e-12")
    return (V * np.sqrt(w)) @ V.T


def build_T_from_metric(M, Jp, tol: float = 1e-9) -> np.ndarray:
    """Principal square root ``T = (-J K)^{1/2}`` with ``K = J'``.

    Requires ``M = Omega J'``; the result satisfies ``T^T T = M``.
    """
    n = _half(M)
    M, Jp = np.asarray(M), np.asarray(Jp)
    check = _residual_verdict(metric_of(Jp) - M, _scale(M), tol)
    if not check:
        raise NotPositive("M and J' are not compatible (M != Omega J')")
    A = -(_like(n, Jp, standard_J) @ Jp)
    return _sqrt_psd(A, tol)


# ---------------------------------------------------------------------------
# quasifree states

@dataclass(frozen=True, eq=False)
class QuasifreeSpec:
    """Symplectic ``T`` and the linear form ``l`` (length ``2n``, q-then-p)."""

    T: np.ndarray
    l: np.ndarray = field(default=None)

    def __post_init__(self):
        T = np.asarray(self.T)
        n = _half(T)
        l = np.zeros(2 * n, dtype=T.dtype) if self.l is None else np.asarray(self.l)
        if l.shape != (2 * n,):
            raise ValueError(f"l must have length {2 * n}")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "l", l)
        v = is_symplectic(T)
        if not v:
            raise ValueError(f"T is not symplectic: {v.detail}")

    @property
    def n(self) -> int:
        return self.T.shape[0] // 2

    @classmethod
    def fock(cls, n: int, exact_: bool = True) -> "QuasifreeSpec":
        I = exact(np.eye(2 * n, dtype=int)) if exact_ else np.eye(2 * n)
        return cls(I)

    def to_json(self) -> dict:
        return {"basis": BASIS, "T": matrix_to_json(self.T), "l": _vec_json(self.l)}

    @classmethod
    def from_json(cls, d: Mapping) -> "QuasifreeSpec":
        extra = set(d) - {"basis", "T", "l"}
        if extra:
            raise ValueError(f"quasifree spec: unknown fields {sorted(extra)}")
        if d.get("basis", BASIS) != BASIS:
            raise ValueError(f"unsupported basis convention {d.get('basis')!r}")
        T = matrix_from_json(d["T"])
        l = d.get("l")
        return cls(T, None if l is None else matrix_from_json([l])[0])


def quasifree_char(spec: QuasifreeSpec, f) -> complex:
    """``exp(i l(f) - s(Tf, Tf) / 4)``."""
    f = np.asarray(f, dtype=float)
    Tf = np.asarray(spec.T, dtype=float) @ f
    return complex(np.exp(1j * float(np.asarray(spec.l, dtype=float) @ f) - float(Tf @ Tf) / 4))


# ---------------------------------------------------------------------------
# linear maps

def linear_lambda_from_S(S, l=None) -> LambdaMap:
    """Linear map ``Lambda f = x(S J P f) + l(f)``.

    ``P`` projects onto JV, so ``Lambda J e_k = -sum_j S_jk :x_j: + l(Je_k)``
    and ``Lambda e_k = l(e_k)``; the induced field map is
    ``[[I, -S], [0, I]]``.
    """
    S = np.asarray(S)
    n = S.shape[0]
    if S.shape != (n, n):
        raise ValueError("S must be square")
    for i in range(n):
        for j in range(n):
            if S[i, j] != S[j, i]:
                raise AsymmetricS(f"S is not symmetric at ({i + 1}, {j + 1})")
    S = np.vectorize(_py, otypes=[object])(S) if S.size else S
    l = [0] * (2 * n) if l is None else [_py(x) for x in l]
    if len(l) != 2 * n:
        raise ValueError(f"l must have length {2 * n}")
    v = {k: l[k - 1] for k in range(1, n + 1)}
    jv = {}
    for k in range(1, n + 1):
        terms = {MultiIndex(): l[n + k - 1]}
        for j in range(1, n + 1):
            terms[MultiIndex([(j, 1)])] = -S[j - 1, k - 1]
        jv[k] = WickPolynomial(terms)
    return LambdaMap(v, jv, support=range(1, n + 1))


def S_from_linear_lambda(lam: LambdaMap, n: int | None = None):
    """Inverse of :func:`linear_lambda_from_S`; returns ``(S, l)`` as object arrays."""
    if lam.degree > 1:
        raise ValueError(f"map has degree {lam.degree} > 1")
    v = validate_ccr(lam)
    if not v:
        raise ValueError(f"map fails the CCR condition: {v.detail}")
    n = n if n is not None else max(lam.support, default=0)
    S = np.empty((n, n), dtype=object)
    l = np.empty(2 * n, dtype=object)
    for k in range(1, n + 1):
        P = lam.jv(k)
        l[k - 1] = Fraction(lam.v(k))
        l[n + k - 1] = Fraction(P.constant_term())
        for j in range(1, n + 1):
            S[j - 1, k - 1] = Fraction(-P.coefficient([j]))
    return S, l


def _py(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def induced_map(S) -> np.ndarray:
    """``1 + S J P`` in q-then-p coordinates."""
    S = np.asarray(S)
    n = S.shape[0]
    I = np.eye(n, dtype=int)
    Z = np.zeros((n, n), dtype=int)
    if S.dtype == object:
        return np.block([[exact(I), -S], [exact(Z), exact(I)]])
    return np.block([[I, -S], [Z, I]]).astype(float)


# ---------------------------------------------------------------------------
# polar decomposition and Shale proxy

def polar_decompose(T):
    """``T = U A`` with ``A = (T^T T)^{1/2}`` and ``U^T U = 1`` via SVD."""
    T = np.asarray(T, dtype=float)
    W, s, Vt = np.linalg.svd(T, full_matrices=False)
    if s.size < T.shape[1] or s.min() <= 1e-12 * max(1.0, s.max()):
        raise SingularMatrix("polar decomposition needs full column rank")
    return W @ Vt, (Vt.T * s) @ Vt


def shale_index(T) -> float:
    """``||1 - (T^T T)^{1/2}||_HS^2``."""
    T = np.asarray(T, dtype=float)
    w = np.linalg.eigvalsh(T.T @ T)
    return float(np.sum((1.0 - np.sqrt(np.clip(w, 0.0, None))) ** 2))


# ---------------------------------------------------------------------------
# serialization

def _vec_json(v):
    from .wick import _num_out
    return [_num_out(x) if isinstance(x, Fraction) else (int(x) if isinstance(x, (int, np.integer))
                                                        else float(x)) for x in v]


def matrix_to_json(M) -> list:
    return [_vec_json(row) for row in np.asarray(M)]


def matrix_from_json(rows: Sequence) -> np.ndarray:
    from .scalars import as_real_number
    vals = [[as_real_number(x) for x in row] for row in rows]
    if all(not isinstance(x, float) for row in vals for x in row):
        return np.array([[Fraction(x) for x in row] for row in vals], dtype=object)
    return np.array(vals, dtype=float)
