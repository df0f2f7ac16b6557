"""Dense matrices of field, multiplication and Weyl operators on a truncated basis.

Each mode keeps the levels ``h_0 .. h_{N-1}`` with ``h_n = :x^n: / ||:x^n:||``.
On one mode

    <h_{n+1}| x |h_n> = sqrt((n+1)/2),     d h_n = sqrt(2n) h_{n-1}

and modes are combined with ``numpy.kron`` in ascending mode order, so the
flat index of a level tuple is its mixed-radix value.

Two precisions are available for Weyl operators: float64 eigendecomposition,
and an mpmath path that evaluates matrix elements of ``exp(i(a q + b p))`` by
Gauss-Hermite quadrature on the roots of ``h_N`` (this is exactly the
truncated ``exp(i a q)`` since the Jacobi matrix of ``q`` is diagonalized by
those nodes) combined with the phase ``e^{i theta (i-j)}`` that rotates ``q``
into ``a q + b p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as cartesian

import numpy as np

from .fock import HVector, sigma
from .wick import MultiIndex, WickPolynomial

MAX_ENTRIES = 10 ** 6


class UnsupportedMode(ValueError):
    """An operator touches a mode outside the truncation scheme."""


class TruncationTooSmall(ValueError):
    """The cutoff is too small for the requested degree or probe level."""


class NonHermitian(ValueError):
    pass


@dataclass(frozen=True)
class TruncationScheme:
    modes: tuple[int, ...]
    cutoff: int
    probe_level: int = 0

    def __post_init__(self):
        modes = tuple(sorted(set(int(k) for k in self.modes)))
        if not modes:
            raise ValueError("a truncation scheme needs at least one mode")
        object.__setattr__(self, "modes", modes)
        if self.cutoff < 1:
            raise ValueError("cutoff must be positive")
        if self.probe_level < 0 or 4 * self.probe_level > self.cutoff:
            raise TruncationTooSmall(
                f"probe level {self.probe_level} exceeds cutoff/4 = {self.cutoff / 4}")
        if self.dim ** 2 > MAX_ENTRIES:
            raise TruncationTooSmall(
                f"{self.dim}x{self.dim} matrices exceed the {MAX_ENTRIES} entry cap")

    @property
    def dim(self) -> int:
        return self.cutoff ** len(self.modes)

    def index(self, levels) -> int:
        out = 0
        for n in levels:
            out = out * self.cutoff + n
        return out

    def probe_states(self) -> list[tuple[int, ...]]:
        """Level tuples with total degree at most ``probe_level``, in index order."""
        rng = range(self.probe_level + 1)
        return [lv for lv in cartesian(rng, repeat=len(self.modes))
                if sum(lv) <= self.probe_level]

    def probe_indices(self) -> np.ndarray:
        return np.array([self.index(lv) for lv in self.probe_states()], dtype=int)

    def position(self, k: int) -> int:
        try:
            return self.modes.index(k)
        except ValueError:
            raise UnsupportedMode(f"mode {k} is not in the scheme {self.modes}") from None


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    matrix: np.ndarray
    scheme: TruncationScheme
    hermitian: bool | None = None

    def probe_block(self) -> np.ndarray:
        p = self.scheme.probe_indices()
        return self.matrix[np.ix_(p, p)]

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def to_json(self) -> dict:
        m = self.matrix
        return {"modes": list(self.scheme.modes), "cutoff": self.scheme.cutoff,
                "re": np.real(m).tolist(), "im": np.imag(m).tolist()}


# ---------------------------------------------------------------------------
# single-mode blocks

@lru_cache(maxsize=64)
def _q(N: int) -> np.ndarray:
    off = np.sqrt(np.arange(1, N) / 2.0)
    return np.diag(off, 1) + np.diag(off, -1)


@lru_cache(maxsize=64)
def _d(N: int) -> np.ndarray:
    return np.diag(np.sqrt(2.0 * np.arange(1, N)), 1)


def q_matrix(N: int) -> np.ndarray:
    return _q(N).copy()


def p_matrix(N: int) -> np.ndarray:
    """``p = -i d/dx + i x`` on ``h_0 .. h_{N-1}``."""
    return -1j * _d(N) + 1j * _q(N)


def _embed(scheme: TruncationScheme, k: int, block: np.ndarray) -> np.ndarray:
    pos = scheme.position(k)
    out = np.ones((1, 1))
    for i in range(len(scheme.modes)):
        out = np.kron(out, block if i == pos else np.eye(scheme.cutoff))
    return out


def truncate_field(f: HVector, scheme: TruncationScheme) -> TruncatedOperator:
    N = scheme.cutoff
    out = np.zeros((scheme.dim, scheme.dim), dtype=complex)
    for k, c in f.v_part.items():
        out += float(c) * _embed(scheme, k, _q(N))
    for k, c in f.jv_part.items():
        out += float(c) * _embed(scheme, k, p_matrix(N))
    return TruncatedOperator(out, scheme, True)


@lru_cache(maxsize=64)
def _wick_powers(N: int, top: int, compress: bool = True) -> tuple[np.ndarray, ...]:
    # :x^{n+1}: = x :x^n: - (n/2) :x^{n-1}: on N+top levels, then cut to N
    big = N + top if compress else N
    Q = _q(big)
    X = [np.eye(big)]
    if top >= 1:
        X.append(Q.copy())
    for n in range(1, top):
        X.append(Q @ X[n] - (n / 2.0) * X[n - 1])
    return tuple(x[:N, :N] for x in X)


def truncate_multiplication(F: WickPolynomial, scheme: TruncationScheme,
                            compress: bool = True) -> TruncatedOperator:
    """Multiplication by ``F`` on the truncated basis.

    With ``compress`` the Wick powers are built on ``N + deg`` levels before
    cutting, so every retained matrix element of ``P_N F P_N`` is exact.
    Without it, ``F`` is evaluated on the truncated position matrices
    themselves; these commute with each other and with ``truncate_field`` on
    V, at the price of edge rows that differ from the compression.
    """
    N = scheme.cutoff
    for k in F.modes:
        scheme.position(k)
    if F.max_degree >= N:
        raise TruncationTooSmall(f"degree {F.max_degree} needs cutoff > {F.max_degree}")
    powers = {k: _wick_powers(N, max(F.degree_in(k), 1), compress) for k in scheme.modes}
    complex_coeffs = not F.is_real()
    out = np.zeros((scheme.dim, scheme.dim), dtype=complex if complex_coeffs else float)
    for a, c in F.items():
        term = np.ones((1, 1))
        for k in scheme.modes:
            term = np.kron(term, powers[k][a.get(k)])
        out = out + complex(c) * term if complex_coeffs else out + float(c) * term
    return TruncatedOperator(out.astype(complex), scheme, not complex_coeffs)


def weyl_matrix(A: TruncatedOperator, tol: float = 1e-10) -> TruncatedOperator:
    """``exp(iA)`` for Hermitian ``A`` via ``numpy.linalg.eigh``."""
    M = A.matrix
    if np.max(np.abs(M - M.conj().T), initial=0.0) > tol:
        raise NonHermitian("weyl_matrix needs a Hermitian matrix")
    w, V = np.linalg.eigh((M + M.conj().T) / 2)
    return TruncatedOperator((V * np.exp(1j * w)) @ V.conj().T, A.scheme, False)


def vacuum_expectation(W: TruncatedOperator) -> complex:
    return complex(W.matrix[0, 0])


def weyl_field(f: HVector, scheme: TruncationScheme, t: float = 1.0) -> TruncatedOperator:
    return weyl_matrix(truncate_field(f.scale(t), scheme))


# ---------------------------------------------------------------------------
# high-precision single-mode Weyl blocks

def _mp():
    import mpmath
    return mpmath


@lru_cache(maxsize=16)
def _mp_nodes(N: int, dps: int):
    """Roots of ``h_N`` with Christoffel weights and ``h_0..h_{N-1}`` at each root."""
    from scipy.special import roots_hermite
    mp = _mp()
    with mp.workdps(dps):
        def herm(x):
            h = [mp.mpf(1), mp.sqrt(2) * x]
            for n in range(1, N):
                h.append((mp.sqrt(2) * x * h[n] - mp.sqrt(n) * h[n - 1]) / mp.sqrt(n + 1))
            return h

        tol = mp.mpf(10) ** (-dps + 5)
        out = []
        x0, _ = roots_hermite(N)
        for guess in x0:
            x = mp.mpf(float(guess))
            for _ in range(100):
                h = herm(x)
                dx = h[N] / (mp.sqrt(2 * N) * h[N - 1])
                x -= dx
                if abs(dx) < tol:
                    break
            h = herm(x)[:N]
            w = 1 / mp.fsum(v * v for v in h)
            out.append((x, w, h))
        return tuple(out)


def _mp_weyl_block(N: int, a, b, rows, cols, dps: int):
    """Entries of the truncated ``exp(i(a q + b p))`` on ``rows x cols``."""
    mp = _mp()
    nodes = _mp_nodes(N, dps)
    with mp.workdps(dps):
        a, b = mp.mpf(a), mp.mpf(b)
        r = mp.sqrt(a * a + b * b)
        th = mp.atan2(b, a)
        phases = [mp.expj(r * x) * w for x, w, _ in nodes]
        M = mp.matrix(len(rows), len(cols))
        for ii, i in enumerate(rows):
            for jj, j in enumerate(cols):
                s = mp.fsum(ph * h[i] * h[j] for ph, (_, _, h) in zip(phases, nodes))
                M[ii, jj] = s * mp.expj(th * (i - j))
        return M


def _mode_coeffs(f: HVector, k: int) -> tuple[float, float]:
    return f.v_part.get(k, 0), f.jv_part.get(k, 0)


def _weyl_residual_mp(f: HVector, g: HVector, t, s, scheme: TruncationScheme, dps: int) -> float:
    mp = _mp()
    N, P = scheme.cutoff, scheme.probe_level
    for k in set(f.support) | set(g.support):
        scheme.position(k)
    lo, full = list(range(P + 1)), list(range(N))
    with mp.workdps(dps):
        t, s = mp.mpf(t), mp.mpf(s)
        lhs_modes, rhs_modes = [], []
        for k in scheme.modes:
            fa, fb = _mode_coeffs(f, k)
            ga, gb = _mode_coeffs(g, k)
            A = _mp_weyl_block(N, t * fa, t * fb, lo, full, dps)
            B = _mp_weyl_block(N, s * ga, s * gb, full, lo, dps)
            lhs_modes.append(A * B)
            rhs_modes.append(_mp_weyl_block(N, t * fa + s * ga, t * fb + s * gb, lo, lo, dps))
        phase = mp.expj(-t * s * mp.mpf(sigma(f, g)) / 2)
        worst = mp.mpf(0)
        for lv in scheme.probe_states():
            for lw in scheme.probe_states():
                L = mp.mpf(1)
                R = phase
                for pos, (i, j) in enumerate(zip(lv, lw)):
                    L *= lhs_modes[pos][i, j]
                    R *= rhs_modes[pos][i, j]
                worst = max(worst, abs(L - R))
        return float(worst)


def verify_weyl_relation(f: HVector, g: HVector, t: float, s: float,
                         scheme: TruncationScheme, dps: int | None = None) -> float:
    """Max probe-block entry of ``W(tf)W(sg) - e^{-i t s sigma(f,g)/2} W(tf+sg)``.

    ``dps=None`` uses float64; an integer selects the mpmath path with that
    many digits.
    """
    if dps is not None:
        return _weyl_residual_mp(f, g, t, s, scheme, dps)
    Wf = weyl_field(f, scheme, t).matrix
    Wg = weyl_field(g, scheme, s).matrix
    Wfg = weyl_matrix(truncate_field(f.scale(t) + g.scale(s), scheme)).matrix
    phase = np.exp(-1j * t * s * float(sigma(f, g)) / 2)
    p = scheme.probe_indices()
    R = (Wf @ Wg)[np.ix_(p, p)] - phase * Wfg[np.ix_(p, p)]
    return float(np.max(np.abs(R)))


def commutator_interior(A: TruncatedOperator, B: TruncatedOperator, expected: complex) -> float:
    """Max entry of ``[A,B] - expected`` on single-mode indices below ``N-1``."""
    C = A.matrix @ B.matrix - B.matrix @ A.matrix
    N = A.scheme.cutoff
    keep = [i for i, lv in enumerate(cartesian(range(N), repeat=len(A.scheme.modes)))
            if max(lv) < N - 1]
    block = C[np.ix_(keep, keep)] - expected * np.eye(len(keep))
    return float(np.max(np.abs(block)))


def normalized_level(n: int) -> float:
    """``||:x^n:||`` so that ``h_n = :x^n: / normalized_level(n)``."""
    return math.sqrt(math.factorial(n) / 2.0 ** n)


def probe_matrix_from_polynomial_action(op, scheme: TruncationScheme) -> np.ndarray:
    """Probe block of an operator given by its action on Wick polynomials.

    ``op`` maps a WickPolynomial to a WickPolynomial; used to cross-check the
    dense matrices against the exact algebra.
    """
    states = scheme.probe_states()
    out = np.zeros((len(states), len(states)), dtype=complex)
    for jj, lw in enumerate(states):
        alpha = MultiIndex(zip(scheme.modes, lw))
        norm_in = math.prod(normalized_level(n) for n in lw)
        image = op(WickPolynomial({alpha: 1}))
        for ii, lv in enumerate(states):
            beta = MultiIndex(zip(scheme.modes, lv))
            norm_out = math.prod(normalized_level(n) for n in lv)
            out[ii, jj] = complex(image.coefficient(beta)) * norm_out / norm_in
    return out
