import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ccrkit.scalars import EXACT, FLOAT, I
from ccrkit.wick import (DegreeCapExceeded, DirectionVector, MultiIndex, NodeBudgetExceeded,
                         WickPolynomial, directional_derivative, extract_coefficient,
                         inner_product, monomial_inner_product, norm_squared,
                         partial_derivative, quadrature_eval, wick_product)

from oracles import coefficient_by_quadrature, integrate
from strategies import complex_wick_polys, wick_polys

x1 = WickPolynomial.var(1)
x2 = WickPolynomial.var(2)


def mono(*modes, c=1):
    return WickPolynomial.monomial(c, modes)


# -- multi-indices ------------------------------------------------------------

def test_multi_index_is_canonical():
    assert MultiIndex.of([2, 1, 2]) == MultiIndex.of({1: 1, 2: 2})
    assert MultiIndex.of([2, 1, 2]).degree == 3
    assert MultiIndex.of([]) == MultiIndex()
    assert MultiIndex.of({1: 0, 2: 1}) == MultiIndex.of([2])


def test_multi_index_rejects_bad_modes():
    with pytest.raises(ValueError):
        MultiIndex.of([0])


def test_direction_vector_norm():
    f = DirectionVector({1: Fraction(1, 2), 3: 2})
    assert f.norm_squared() == Fraction(17, 4)


# -- inner products (frozen values) ---------------------------------------------

@pytest.mark.parametrize("a, b, expected", [
    ([1], [1], Fraction(1, 2)),
    ([1, 1], [1, 1], Fraction(1, 2)),
    ([1, 2], [1, 1], 0),
    ([1, 2], [1, 2], Fraction(1, 4)),
])
def test_monomial_inner_product(a, b, expected):
    assert monomial_inner_product(MultiIndex.of(a), MultiIndex.of(b)) == expected


def test_monomial_inner_product_matches_quadrature():
    for a in ([1], [1, 1], [1, 2], [1, 1, 2], [2, 2, 2]):
        F = mono(*a)
        assert integrate([F, F], [1, 2], 8).real == pytest.approx(
            float(monomial_inner_product(MultiIndex.of(a), MultiIndex.of(a))), abs=1e-12)


def test_inner_product_examples():
    assert inner_product(x1 + x2, x1) == Fraction(1, 2)
    assert inner_product(WickPolynomial.zero(), x1 + mono(1, 2)) == 0
    assert inner_product(mono(1, 1, c=2), mono(1, 1, c=3)) == 3


def test_inner_product_is_conjugate_linear_in_first_slot():
    F = x1.scale(I)
    assert inner_product(F, x1) == -I * Fraction(1, 2)
    assert inner_product(x1, F) == I * Fraction(1, 2)


def test_inner_product_backend_mismatch():
    from ccrkit.scalars import BackendMismatch
    with pytest.raises(BackendMismatch):
        inner_product(x1, x1.to_float())


@pytest.mark.parametrize("F, expected", [
    (x1, Fraction(1, 2)),
    (mono(1, 1, 2), Fraction(1, 4)),
    (WickPolynomial.constant(1), 1),
])
def test_norm_squared_examples(F, expected):
    assert norm_squared(F) == expected


@given(wick_polys(max_modes=4, max_degree=4))
def test_norm_identity(F):
    assert norm_squared(F) == inner_product(F, F)
    assert float(norm_squared(F)) == pytest.approx(quadrature_eval(F, F), abs=1e-9, rel=1e-9)


@given(complex_wick_polys(), complex_wick_polys())
def test_inner_product_hermitian_symmetry(F, G):
    from ccrkit.scalars import conj
    assert inner_product(F, G) == conj(inner_product(G, F))


# -- coefficient extraction -----------------------------------------------------

def test_extract_coefficient_examples():
    F = mono(1, 2, c=5)
    assert extract_coefficient(F, [1, 2]) == 5
    assert extract_coefficient(F, [1, 1]) == 0


@given(wick_polys())
def test_extract_coefficient_reads_back_every_term(F):
    for a, c in F.items():
        assert extract_coefficient(F, a) == c


@given(wick_polys(max_modes=2, max_degree=3))
def test_extract_coefficient_matches_quadrature(F):
    for a, c in F.items():
        q = coefficient_by_quadrature([F], a, [1, 2], 6)
        assert q.real == pytest.approx(float(c), abs=1e-9)


# -- products ------------------------------------------------------------------

def test_wick_product_examples():
    assert wick_product(x1, x2) == mono(1, 2)
    assert wick_product(x1, x1) == mono(1, 1) + Fraction(1, 2)
    assert wick_product(mono(1, 1), x1) == mono(1, 1, 1) + x1


def test_wick_product_degree_cap():
    with pytest.raises(DegreeCapExceeded):
        wick_product(mono(1, 1, 1), mono(1, 1, 1), cap=5)


@given(wick_polys(max_modes=3, max_degree=3, max_terms=3),
       wick_polys(max_modes=3, max_degree=3, max_terms=3))
def test_wick_product_matches_quadrature(F, G):
    P = wick_product(F, G)
    modes = sorted(set(F.modes) | set(G.modes)) or [1]
    for a, c in P.items():
        q = coefficient_by_quadrature([F, G], a, modes, 7)
        assert q.real == pytest.approx(float(c), abs=1e-8)
    # nothing outside the support
    assert integrate([F, G], modes, 7).real == pytest.approx(float(P.constant_term()), abs=1e-8)


@given(wick_polys(max_degree=2, max_terms=3), wick_polys(max_degree=2, max_terms=3),
       wick_polys(max_degree=2, max_terms=3))
def test_wick_product_ring_laws(F, G, H):
    assert wick_product(F, G) == wick_product(G, F)
    assert wick_product(wick_product(F, G), H) == wick_product(F, wick_product(G, H))
    assert wick_product(F, G + H) == wick_product(F, G) + wick_product(F, H)


@given(wick_polys(), wick_polys())
def test_expectation_of_product_is_inner_product(F, G):
    assert wick_product(F, G).constant_term() == inner_product(F, G)


# -- derivatives ---------------------------------------------------------------

def test_partial_derivative_examples():
    assert partial_derivative(mono(1, 1, 1), 1) == mono(1, 1, c=3)
    assert partial_derivative(mono(1, 2), 1) == x2
    assert partial_derivative(mono(2, 2), 1) == WickPolynomial.zero()


def test_directional_derivative_examples():
    assert directional_derivative(mono(1, 1), DirectionVector({1: 2})) == x1.scale(4)
    assert directional_derivative(mono(1, 2), DirectionVector({1: 1, 2: 1})) == x1 + x2


@given(wick_polys(), st.dictionaries(st.integers(1, 3), st.integers(-3, 3), max_size=3))
def test_directional_derivative_is_linear_combination(F, coeffs):
    expected = WickPolynomial.zero()
    for k, c in coeffs.items():
        expected = expected + partial_derivative(F, k).scale(c)
    assert directional_derivative(F, DirectionVector(coeffs)) == expected


@given(wick_polys(max_degree=3, max_terms=3), wick_polys(max_degree=3, max_terms=3),
       st.integers(1, 3))
def test_leibniz_rule(F, G, k):
    lhs = partial_derivative(wick_product(F, G), k)
    rhs = wick_product(partial_derivative(F, k), G) + wick_product(F, partial_derivative(G, k))
    assert lhs == rhs


# -- quadrature oracle -----------------------------------------------------------

def test_quadrature_examples():
    one = WickPolynomial.constant(1)
    assert quadrature_eval(x1, x1) == pytest.approx(0.5, abs=1e-12)
    assert quadrature_eval(one, one) == pytest.approx(1.0, abs=1e-12)
    assert quadrature_eval(mono(1, 1), one) == pytest.approx(0.0, abs=1e-12)


def test_quadrature_node_budget():
    with pytest.raises(NodeBudgetExceeded):
        quadrature_eval(mono(*[1] * 10), mono(*[1] * 10), nodes=4)


def test_node_budget_env_override(monkeypatch):
    monkeypatch.setenv("CCRKIT_QUADRATURE_NODES", "3")
    with pytest.raises(NodeBudgetExceeded):
        quadrature_eval(mono(1, 1, 1, 1), mono(1, 1, 1, 1))


def test_degree_cap_env_override(monkeypatch):
    monkeypatch.setenv("CCRKIT_DEGREE_CAP", "3")
    with pytest.raises(DegreeCapExceeded):
        wick_product(mono(1, 1), mono(2, 2))


# -- representation ----------------------------------------------------------------

def test_zero_coefficients_are_dropped():
    F = WickPolynomial({MultiIndex.of([1]): 0, MultiIndex.of([2]): 1})
    assert list(F.terms) == [MultiIndex.of([2])]
    assert (x1 - x1) == WickPolynomial.zero()


def test_backends():
    assert x1.backend == EXACT
    assert x1.to_float().backend == FLOAT
    assert x1.to_float().to_exact() == x1


def test_exact_polynomial_rejects_float_scaling():
    from ccrkit.scalars import BackendMismatch
    with pytest.raises(BackendMismatch):
        x1.scale(0.5)


@given(complex_wick_polys())
def test_json_roundtrip(F):
    doc = json.loads(json.dumps(F.to_json()))
    assert WickPolynomial.from_json(doc) == F


def test_json_shape():
    assert mono(1, 1, 2, c=Fraction(1, 2)).to_json() == {
        "terms": [{"modes": [[1, 2], [2, 1]], "re": "1/2", "im": 0}]}
