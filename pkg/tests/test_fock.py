from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from ccrkit.fock import (FockBasisVector, HVector, annihilate, create, field_apply,
                         fock_expansion_to_qspace, fock_to_qspace, number_apply,
                         project_degree, qspace_to_fock, sigma)
from ccrkit.scalars import I
from ccrkit.wick import WickPolynomial, inner_product, norm_squared, wick_product

from strategies import complex_wick_polys, wick_polys

x1 = WickPolynomial.var(1)
x2 = WickPolynomial.var(2)
one = WickPolynomial.constant(1)
SQRT2 = sympy.sqrt(2)


def mono(*modes, c=1):
    return WickPolynomial.monomial(c, modes)


def basis(n=3):
    out = []
    for k in range(1, n + 1):
        out += [HVector.e(k), HVector.je(k)]
    return out


def test_hvector_structure():
    f = HVector.e(1, 2) + HVector.je(2, 3)
    assert f.norm_squared() == 13
    assert f.J() == HVector.e(2, -3) + HVector.je(1, 2)
    assert f.J().J() == f.scale(-1)


def test_sigma_on_basis():
    assert sigma(HVector.e(1), HVector.je(1)) == 1
    assert sigma(HVector.je(1), HVector.e(1)) == -1
    assert sigma(HVector.e(1), HVector.je(2)) == 0
    assert sigma(HVector.e(1), HVector.e(2)) == 0


# -- ladder operators ------------------------------------------------------------

def test_annihilate_examples():
    assert annihilate(HVector.e(1), mono(1, 1)) == x1.scale(SQRT2)
    assert annihilate(HVector.e(1), one) == WickPolynomial.zero()
    assert annihilate(HVector.je(1), x1) == WickPolynomial.constant(-I / SQRT2)


def test_create_examples():
    assert create(HVector.e(1), one) == x1.scale(SQRT2)
    assert create(HVector.e(2), x1) == mono(1, 2).scale(SQRT2)


def test_ladder_reduction_for_je():
    F = mono(1, 1, 2) + x1
    assert annihilate(HVector.je(1), F) == annihilate(HVector.e(1), F).scale(-I)


@given(wick_polys(), st.integers(1, 3))
def test_vacuum_is_annihilated(F, k):
    assert annihilate(HVector.e(k), one) == WickPolynomial.zero()
    assert annihilate(HVector.je(k), one) == WickPolynomial.zero()


@given(complex_wick_polys(), complex_wick_polys(),
       st.sampled_from([HVector.e(1), HVector.e(2), HVector.je(1), HVector.e(1) + HVector.je(2)]))
def test_create_is_adjoint_of_annihilate(F, G, f):
    assert inner_product(create(f, F), G) == inner_product(F, annihilate(f, G))


# -- fields ------------------------------------------------------------------------

def test_field_examples():
    assert field_apply(HVector.e(1), one) == x1
    assert field_apply(HVector.je(1), one) == x1.scale(I)


@given(complex_wick_polys(max_modes=2, max_degree=3))
def test_field_is_ladder_sum(F):
    for f in basis(2):
        lhs = field_apply(f, F)
        rhs = (annihilate(f, F) + create(f, F)).scale(1 / SQRT2)
        assert lhs == rhs


@given(wick_polys(max_modes=3, max_degree=4))
def test_ccr_on_polynomials(F):
    fs = basis(3)
    for f in fs:
        for g in fs:
            lhs = field_apply(f, field_apply(g, F)) - field_apply(g, field_apply(f, F))
            assert lhs == F.scale(I * sigma(f, g))


@given(complex_wick_polys(), complex_wick_polys(), st.sampled_from(basis(2)))
def test_field_is_symmetric(F, G, f):
    assert inner_product(field_apply(f, F), G) == inner_product(F, field_apply(f, G))


# -- number operator and projections -------------------------------------------------

def test_number_examples():
    assert number_apply(mono(1, 2)) == mono(1, 2, c=2)
    assert number_apply(one) == WickPolynomial.zero()


@given(wick_polys(), wick_polys())
def test_number_is_linear(F, G):
    assert number_apply(F + G) == number_apply(F) + number_apply(G)


@given(complex_wick_polys(max_modes=2))
def test_number_is_sum_of_ladder_products(F):
    total = WickPolynomial.zero()
    for k in (1, 2):
        total = total + create(HVector.e(k), annihilate(HVector.e(k), F))
    assert total == number_apply(F)


def test_projection_examples():
    assert project_degree(x1 + mono(1, 2), 2) == mono(1, 2)
    c = Fraction(3, 2)
    assert project_degree(x1 + c, 0) == WickPolynomial.constant(c)


@given(wick_polys(max_degree=4))
def test_projections_are_complete(F):
    total = WickPolynomial.zero()
    for n in range(F.max_degree + 1):
        total = total + project_degree(F, n)
    assert total == F


# -- the S map ------------------------------------------------------------------------

def test_fock_to_qspace_examples():
    assert fock_to_qspace(FockBasisVector.of([])) == one
    assert fock_to_qspace(FockBasisVector.of([1])) == x1.scale(SQRT2)
    assert fock_to_qspace(FockBasisVector.of([1, 2])) == mono(1, 2).scale(SQRT2)


@pytest.mark.parametrize("modes", [[], [1], [1, 2], [1, 1], [1, 1, 1], [1, 1, 2], [2, 3, 3, 3]])
def test_s_map_is_isometric(modes):
    # symmetrized tensors of repeated modes have norm^2 = a!/r!; S preserves it
    v = FockBasisVector.of(modes)
    assert norm_squared(fock_to_qspace(v)) == v.norm_squared()


def test_qspace_to_fock_examples():
    assert qspace_to_fock(x1.scale(SQRT2)) == {FockBasisVector.of([1]): 1}
    assert qspace_to_fock(one) == {FockBasisVector.of([]): 1}


@given(complex_wick_polys(max_modes=3, max_degree=3))
def test_fock_roundtrip(F):
    assert fock_expansion_to_qspace(qspace_to_fock(F)) == F


def test_fock_image_of_creation():
    # a*(e_1) Omega = e_1 in Fock space maps to S e_1
    assert create(HVector.e(1), one) == fock_to_qspace(FockBasisVector.of([1]))


def test_wick_square_is_field_square_minus_half():
    assert field_apply(HVector.e(1), x1) - Fraction(1, 2) == mono(1, 1)
    assert wick_product(x1, x1) == field_apply(HVector.e(1), x1)
