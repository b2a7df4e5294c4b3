from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from superwp.combinatorics import MultiIndex, multi_indices_up_to_weight
from superwp.correlator import UndefinedCorrelator
from superwp.volumes import (VolumePolynomial, evaluate, higher_volume, normalized_volume,
                             rescale_to_normalized, super_volume, point_recursion_residual,
                             kappa_only_residual, volume_polynomial)

import oracles

GN = [(g, n) for g in range(1, 5) for n in range(0, 4) if (g, n) != (1, 0)]


def test_rendered_examples():
    assert normalized_volume(1, 1).render() == "1/8"
    assert normalized_volume(2, 1).render() == "9/128 + 3/128*L1^2"
    assert volume_polynomial(2, 1).render() == "9/64*pi^2 + 3/256*L1^2"
    assert super_volume(2, 1).render() == "9/256*pi^2 + 3/1024*L1^2"
    assert str(volume_polynomial(1, 1)) == "1/8"
    assert VolumePolynomial(2).render() == "0"


def test_frozen_normalized_volumes():
    assert normalized_volume(3, 0).render() == "111/2048"
    assert normalized_volume(4, 0).render() == "15031/32768"
    assert normalized_volume(2, 2).render() == "9/32 + 9/128*L2^2 + 9/128*L1^2"
    assert normalized_volume(3, 1).render() == "681/2048 + 63/512*L1^2 + 15/2048*L1^4"


@pytest.mark.parametrize("g,n", GN)
def test_normalized_volume_matches_oracle(g, n):
    v = normalized_volume(g, n)
    want = oracles.normalized_volume(g, n)
    got = {tuple(e // 2 for e in exps): c for (pp, exps), c in v.terms.items()}
    assert all(pp == 0 for pp, _ in v.terms)
    assert got == want


@pytest.mark.parametrize("g,n", GN)
def test_normalization_consistency(g, n):
    assert rescale_to_normalized(volume_polynomial(g, n), g) == normalized_volume(g, n)
    v = normalized_volume(g, n)
    assert v.pi_free() and v.is_symmetric()


def test_undefined_and_evaluation():
    with pytest.raises(UndefinedCorrelator):
        volume_polynomial(1, 0)
    with pytest.raises(UndefinedCorrelator):
        normalized_volume(1, 0)
    # V_{2,1}(L) at L = 2: 9/64 pi^2 + 3/256 * 4
    assert evaluate(volume_polynomial(2, 1), [2]) == [(0, Fraction(3, 64)), (2, Fraction(9, 64))]


def test_polynomial_arithmetic():
    p = normalized_volume(2, 1)
    assert (p - p).is_zero()
    assert p + p == p.scale(2)
    assert -p == p.scale(-1)
    q = p.times_variable(1)
    assert q.coefficient((1,)) == Fraction(9, 128)
    assert q.coefficient((3,)) == Fraction(3, 128)
    assert not VolumePolynomial(2, {(0, (2, 0)): Fraction(1)}).is_symmetric()


def test_higher_volume_examples():
    assert higher_volume(2, 0, MultiIndex((1,))) == Fraction(3, 128)
    assert higher_volume(2, 1, MultiIndex((1,))) == Fraction(9, 128)
    assert higher_volume(3, 0, {2: 1}) == Fraction(15, 1024)


def test_point_recursion_residual():
    for g in range(1, 6):
        for n in range(0, 4):
            if (g, n) == (1, 0):
                continue
            for b in multi_indices_up_to_weight(g - 1):
                if b.size <= 3:
                    assert point_recursion_residual(g, n, b) == 0


def test_kappa_only_recursion_variants():
    cases = [(g, b) for g in range(2, 5) for b in multi_indices_up_to_weight(g - 1) if b]
    assert all(kappa_only_residual(g, b, "with_binomial") == 0 for g, b in cases)
    # the reading without the binomial weight already fails at small genus
    assert kappa_only_residual(4, MultiIndex((3,)), "as_stated") == Fraction(-2025, 4096)
    assert kappa_only_residual(5, MultiIndex((4,)), "as_stated") == Fraction(-144525, 2048)
    with pytest.raises(ValueError):
        kappa_only_residual(3, MultiIndex((1,)), "other")
    with pytest.raises(ValueError):
        kappa_only_residual(1, MultiIndex((1,)))


@given(st.sampled_from(GN), st.lists(st.fractions(-3, 3, max_denominator=5), min_size=3,
                                     max_size=3))
def test_symmetric_under_swapping_lengths(gn, lengths):
    g, n = gn
    v = normalized_volume(g, n)
    L = lengths[:n]
    assert evaluate(v, L) == evaluate(v, list(reversed(L)))


@given(st.sampled_from(GN))
def test_degree_purity(gn):
    # total L-degree 2(g-1) - 2k pairs with pi^(2k) in the plain volume
    g, n = gn
    for (pp, exps), c in volume_polynomial(g, n).terms.items():
        assert sum(exps) + pp == 2 * (g - 1) and c > 0


def test_short_residual_names_are_aliases():
    from superwp.volumes import thm16_residual, thm17_residual
    assert thm16_residual is point_recursion_residual
    assert thm17_residual is kappa_only_residual
