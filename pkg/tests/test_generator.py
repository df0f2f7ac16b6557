from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ccrkit.fock import HVector
from ccrkit.generator import (AsymmetricTensor, build_generator_for,
                              build_generator_single_mode, build_generator_symmetric,
                              conjugation_evidence, conjugation_residual, strictly_decreasing,
                              verify_gradient)
from ccrkit.lambda_map import LambdaMap, NotCCR, SymmetricTensorView
from ccrkit.truncation import TruncationScheme, TruncationTooSmall
from ccrkit.wick import MultiIndex, WickPolynomial, partial_derivative

from strategies import ccr_maps, wick_polys

x1 = WickPolynomial.var(1)


def mono(*modes, c=1):
    return WickPolynomial.monomial(c, modes)


CUBIC = LambdaMap({}, {1: mono(1, 1)})


def test_symmetric_builder_examples():
    G = build_generator_symmetric([SymmetricTensorView(3, {MultiIndex.of([1, 1, 1]): 1})]).G
    assert G == mono(1, 1, 1, c=Fraction(1, 3))
    assert partial_derivative(G, 1) == mono(1, 1)
    G = build_generator_symmetric([SymmetricTensorView(3, {MultiIndex.of([1, 2, 2]): 1})]).G
    assert G == mono(1, 2, 2)
    assert partial_derivative(G, 1) == mono(2, 2)
    assert partial_derivative(G, 2) == mono(1, 2, c=2)
    assert build_generator_symmetric([]).G == WickPolynomial.zero()


def test_symmetric_builder_rejects_wrong_order():
    with pytest.raises(AsymmetricTensor):
        build_generator_symmetric([SymmetricTensorView(3, {MultiIndex.of([1, 2]): 1})])


def test_builder_for_map_requires_ccr():
    with pytest.raises(NotCCR):
        build_generator_for(LambdaMap({}, {1: mono(2, 2)}))


@given(ccr_maps(max_modes=4, max_order=4))
def test_gradient_of_symmetric_builder(lam):
    G = build_generator_for(lam).G
    assert verify_gradient(G, lam)
    assert G.max_degree == lam.degree + 1


@given(wick_polys(max_modes=3, max_degree=3), st.integers(1, 3))
def test_single_mode_builder(F, d):
    res = build_generator_single_mode(F, d)
    assert partial_derivative(res.G, d) == F
    assert res.norm_G <= res.norm_F
    assert res.norm_bound_ok
    # canonical primitive: every term carries mode d
    assert all(a.get(d) >= 1 for a, _ in res.G.items())


def test_single_mode_examples():
    assert build_generator_single_mode(mono(1, 1), 1).G == mono(1, 1, 1, c=Fraction(1, 3))
    assert build_generator_single_mode(mono(2, 2), 1).G == mono(1, 2, 2)
    assert build_generator_single_mode(WickPolynomial.zero(), 1).G == WickPolynomial.zero()


def test_verify_gradient_failures():
    G = mono(1, 1, 1, c=Fraction(1, 3))
    assert not verify_gradient(G, LambdaMap({}, {2: mono(1, 1)}))
    assert not verify_gradient(G + x1, CUBIC)
    assert verify_gradient(G, CUBIC)


# -- truncated conjugation ------------------------------------------------------

def test_conjugation_zero_map():
    rows = conjugation_evidence(LambdaMap(), HVector.je(1), [20, 40], probe=5)
    assert all(r.residual == 0 for r in rows)


def test_conjugation_f_in_v_commutes():
    for N in (20, 40, 80):
        scheme = TruncationScheme((1,), N, 5)
        r = conjugation_residual(mono(1, 1, 1, c=Fraction(1, 3)), CUBIC, HVector.e(1), scheme)
        assert r < 1e-10


def test_conjugation_quadratic_generator_converges_fast():
    # G = :x^2:/2 gives Lambda J e_1 = :x_1:, a shear; the truncated identity is sharp
    lam = LambdaMap({}, {1: x1})
    rows = conjugation_evidence(lam, HVector.je(1), [20, 40], probe=3)
    assert rows[-1].residual < 1e-8


def test_conjugation_cubic_trend():
    rows = conjugation_evidence(CUBIC, HVector.je(1), [20, 40, 80], probe=5)
    assert strictly_decreasing(rows)
    assert [r.cutoff for r in rows] == [20, 40, 80]
    assert rows[0].to_json() == {"cutoff": 20, "probe": 5, "residual": rows[0].residual}


def test_conjugation_cutoff_too_small():
    with pytest.raises(TruncationTooSmall):
        conjugation_evidence(CUBIC, HVector.je(1), [12], probe=5)


def test_strictly_decreasing():
    from ccrkit.generator import ResidualRow
    assert strictly_decreasing([ResidualRow(1, 1, 3.0), ResidualRow(2, 1, 1.0)])
    assert not strictly_decreasing([ResidualRow(1, 1, 1.0), ResidualRow(2, 1, 1.0)])


def test_conjugation_cubic_reaches_1e3_beyond_80():
    # e^{iG} h_5 carries momenta ~ x^2 out to |x| ~ 5, which needs N of a few hundred
    rows = conjugation_evidence(CUBIC, HVector.je(1), [160, 320, 640], probe=5)
    assert strictly_decreasing(rows)
    assert rows[0].residual > 1e-3 > rows[1].residual
    assert rows[2].residual < 1e-6
