import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarith.exact import (
    ExactError,
    LocalPlace,
    REAL_PLACE,
    hasse_invariant,
    hilbert_symbol,
    is_rational_square,
    square_class,
    support_places,
    unit_residue,
    valuation,
)

nonzero_small = st.fractions(
    min_value=Fraction(-60), max_value=Fraction(60), max_denominator=24
).filter(lambda x: x != 0)


def hilbert_by_enumeration(a: Fraction, b: Fraction, v: LocalPlace) -> int:
    """Independent oracle: exhaustive search for primitive solutions of
    z^2 = a x^2 + b y^2 modulo p^K, keeping only Hensel-liftable ones.

    With a, b squarefree integers, any p-adic zero has gradient valuation
    at most G = v_p(2) + 1, so working modulo p^{2G+1} is conclusive.
    """
    a = Fraction(square_class(a).representative)
    b = Fraction(square_class(b).representative)
    if v.is_real:
        return 1 if (a > 0 or b > 0) else -1
    p = v.p
    G = (1 if p != 2 else 2) + 1
    K = 2 * G - 1
    mod = p**K
    A, B = int(a) % mod, int(b) % mod

    def vp(n: int) -> int:
        if n % mod == 0:
            return K
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        return k

    # primitive triples up to unit scaling: first unit coordinate set to 1
    def candidates():
        for y in range(mod):
            for z in range(mod):
                yield 1, y, z
        for x0 in range(0, mod, p):
            for z in range(mod):
                yield x0, 1, z
            for y0 in range(0, mod, p):
                yield x0, y0, 1

    for x, y, z in candidates():
        q = (A * x * x + B * y * y - z * z) % mod
        if q != 0:
            continue
        g = min(vp(2 * A * x % mod), vp(2 * B * y % mod), vp(2 * z % mod))
        if K > 2 * g:
            return 1
    return -1


def test_valuation_examples():
    assert valuation(12, 2) == 2
    assert valuation(Fraction(1, 9), 3) == -2
    assert valuation(5, 2) == 0
    with pytest.raises(ExactError):
        valuation(0, 3)


def test_square_class_examples():
    assert square_class(4).representative == 1
    assert square_class(18).representative == 2
    assert square_class(-50).representative == -2
    assert square_class(Fraction(3, 4)).representative == 3
    assert square_class(Fraction(2, 3)).representative == 6
    with pytest.raises(ExactError):
        square_class(0)


def test_is_rational_square():
    assert is_rational_square(Fraction(9, 4))
    assert not is_rational_square(Fraction(8, 4))
    assert not is_rational_square(-4)


def test_hilbert_trivial_first_argument_one():
    for v in [REAL_PLACE, LocalPlace.finite(2), LocalPlace.finite(5)]:
        for b in [2, -3, Fraction(7, 5)]:
            assert hilbert_symbol(1, b, v) == 1


def test_hilbert_minus_one_minus_one():
    assert hilbert_symbol(-1, -1, LocalPlace.finite(2)) == -1
    assert hilbert_symbol(-1, -1, REAL_PLACE) == -1
    for p in (3, 5, 7, 11, 13):
        assert hilbert_symbol(-1, -1, LocalPlace.finite(p)) == 1


def test_hilbert_2_3_at_3():
    assert hilbert_symbol(2, 3, LocalPlace.finite(3)) == -1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_hilbert_against_enumeration_oracle(p):
    v = LocalPlace.finite(p)
    rng = random.Random(p)
    values = [-1, 1, 2, 3, 5, 6, -2, -3, -5, p, -p, 2 * p]
    pairs = [(a, b) for a in values for b in values]
    rng.shuffle(pairs)
    for a, b in pairs[:40]:
        assert hilbert_symbol(a, b, v) == hilbert_by_enumeration(
            Fraction(a), Fraction(b), v
        ), (a, b, p)


def test_hilbert_against_oracle_at_infinity():
    for a in (-6, -1, 2, 5):
        for b in (-10, -2, 1, 3):
            assert hilbert_symbol(a, b, REAL_PLACE) == hilbert_by_enumeration(
                Fraction(a), Fraction(b), REAL_PLACE
            )


@given(a=nonzero_small, b=nonzero_small)
@settings(max_examples=150, deadline=None)
def test_hilbert_reciprocity(a, b):
    prod = 1
    for v in support_places(a, b):
        prod *= hilbert_symbol(a, b, v)
    assert prod == 1


@given(a=nonzero_small, ap=nonzero_small, b=nonzero_small)
@settings(max_examples=100, deadline=None)
def test_hilbert_bimultiplicative(a, ap, b):
    for v in support_places(a, ap, b):
        assert hilbert_symbol(a * ap, b, v) == hilbert_symbol(a, b, v) * hilbert_symbol(
            ap, b, v
        )


@given(a=nonzero_small)
@settings(max_examples=60, deadline=None)
def test_hilbert_a_minus_a(a):
    for v in support_places(a):
        assert hilbert_symbol(a, -a, v) == 1


def test_hasse_examples():
    v2 = LocalPlace.finite(2)
    assert hasse_invariant([1, 1, 1, 1], v2) == 1
    assert hasse_invariant([1, 1, 1, 1], REAL_PLACE) == 1
    assert hasse_invariant([-1, -1], v2) == -1
    assert hasse_invariant([-1, -1], v2) == hilbert_symbol(-1, -1, v2)


@given(
    phi=st.lists(nonzero_small, min_size=1, max_size=3),
    psi=st.lists(nonzero_small, min_size=1, max_size=3),
)
@settings(max_examples=60, deadline=None)
def test_hasse_sum_rule(phi, psi):
    det_phi = Fraction(1)
    for x in phi:
        det_phi *= x
    det_psi = Fraction(1)
    for x in psi:
        det_psi *= x
    for v in support_places(*(phi + psi)):
        lhs = hasse_invariant(phi + psi, v)
        rhs = hasse_invariant(phi, v) * hasse_invariant(psi, v) * hilbert_symbol(
            det_phi, det_psi, v
        )
        assert lhs == rhs


@given(diag=st.lists(nonzero_small, min_size=2, max_size=4), seed=st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_hasse_permutation_invariance(diag, seed):
    rng = random.Random(seed)
    perm = diag[:]
    rng.shuffle(perm)
    for v in support_places(*diag):
        assert hasse_invariant(diag, v) == hasse_invariant(perm, v)


def test_hasse_rejects_singular():
    with pytest.raises(ExactError):
        hasse_invariant([1, 0, 2], REAL_PLACE)


def test_unit_residue():
    assert unit_residue(12, 2, 8) == 3
    assert unit_residue(Fraction(5, 3), 3) == valuation_free_residue()


def valuation_free_residue():
    # 5/3 = 3^-1 * 5 -> unit part 5, residue 5 mod 3 = 2
    return 2


def test_hilbert_rejects_zero():
    with pytest.raises(ExactError):
        hilbert_symbol(0, 3, REAL_PLACE)
    with pytest.raises(ExactError):
        hilbert_symbol(2, 0, LocalPlace.finite(3))
