import random
import warnings
from fractions import Fraction

import pytest

from polarith.algebras import QuadRing, QuaternionRing, RationalRing, rmat_eq, rmat_mul
from polarith.exact import REAL_PLACE, LocalPlace, square_class
from polarith.forms import (
    EtalePairRing,
    FormError,
    GramForm,
    MatrixInvolution,
    adjoint_involution,
    diagonal_form_q,
    diagonalize,
    etale_pair_form,
    etale_pair_witness,
    fourth_power_isometric,
    invariants,
    involution_from_callable,
    involution_to_form,
    is_norm,
    is_positive_definite,
    is_positive_involution,
    isometric,
    search_isometry_witness,
    skew_standard_witness,
    symmetric_form_q,
    trace_gram,
)
from polarith.quadfield import QuadField

QR = RationalRing()
F5 = QuadField(5)
Fi = QuadField(-1)


def rand_pos_def(rng, n, bound=5):
    """U^T U + small diagonal boost: a random positive definite form."""
    while True:
        u = [[Fraction(rng.randint(-bound, bound)) for _ in range(n)] for _ in range(n)]
        g = [[sum(u[k][i] * u[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            g[i][i] += rng.randint(1, 3)
        f = symmetric_form_q(g)
        if f.is_nonsingular():
            return f


def test_positive_definite_examples():
    assert is_positive_definite(diagonal_form_q([1]))
    assert not is_positive_definite(diagonal_form_q([-1]))
    assert is_positive_definite(symmetric_form_q([[2, 1], [1, 1]]))
    assert not is_positive_definite(symmetric_form_q([[1, 2], [2, 1]]))


def test_positive_definite_skew_warns_false():
    f = GramForm("skew", QR, [[Fraction(0), Fraction(1)], [Fraction(-1), Fraction(0)]])
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert is_positive_definite(f) is False
        assert len(w) == 1


def test_positive_definite_over_real_quadratic():
    ring = QuadRing(F5)
    # <q> with q = 3 + sqrt5 totally positive
    q = F5.from_sqrt_coords(3, 1)
    f = GramForm("symmetric", ring, [[q]])
    assert is_positive_definite(f)
    # 1 + sqrt5 is not totally positive
    f2 = GramForm("symmetric", ring, [[F5.from_sqrt_coords(1, 1)]])
    assert not is_positive_definite(f2)


def test_gram_validation():
    with pytest.raises(FormError):
        GramForm("symmetric", QR, [[Fraction(0), Fraction(1)], [Fraction(2), Fraction(0)]])
    with pytest.raises(FormError):
        GramForm("hermitian", QuadRing(F5), [[F5.one()]])  # real field rejected


def test_adjoint_involution_identity_gram():
    f = diagonal_form_q([1, 1])
    inv = adjoint_involution(f)
    a = [[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]]
    assert inv.apply(a) == [[Fraction(1), Fraction(3)], [Fraction(2), Fraction(4)]]


def test_adjoint_involution_diag12():
    f = diagonal_form_q([1, 2])
    inv = adjoint_involution(f)
    a = [[Fraction(0), Fraction(1)], [Fraction(0), Fraction(0)]]
    assert inv.apply(a) == [[Fraction(0), Fraction(0)], [Fraction(1, 2), Fraction(0)]]


def test_adjoint_involution_defining_identity_random():
    rng = random.Random(11)
    for _ in range(20):
        n = rng.choice([2, 3])
        f = rand_pos_def(rng, n)
        inv = adjoint_involution(f)
        a = [[Fraction(rng.randint(-4, 4)) for _ in range(n)] for _ in range(n)]
        v = [Fraction(rng.randint(-4, 4)) for _ in range(n)]
        w = [Fraction(rng.randint(-4, 4)) for _ in range(n)]
        av = [sum(a[i][j] * v[j] for j in range(n)) for i in range(n)]
        adw = [sum(inv.apply(a)[i][j] * w[j] for j in range(n)) for i in range(n)]
        assert f.evaluate(av, w) == f.evaluate(v, adw)


def test_adjoint_involution_scale_invariance():
    f = symmetric_form_q([[2, 1], [1, 3]])
    inv1 = adjoint_involution(f)
    inv2 = adjoint_involution(f.scale(Fraction(5, 7)))
    assert inv1.same_as(inv2)
    a = [[Fraction(1), Fraction(2)], [Fraction(0), Fraction(1)]]
    assert inv1.apply(a) == inv2.apply(a)


def test_involution_to_form_transpose():
    inv = MatrixInvolution("symmetric", QR, 2, [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]])
    f = involution_to_form(inv, want_positive=True)
    assert is_positive_definite(f)
    assert adjoint_involution(f).same_as(inv)


def test_involution_to_form_conjugated():
    inv = MatrixInvolution("symmetric", QR, 2, [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(2)]])
    f = involution_to_form(inv, want_positive=True)
    assert is_positive_definite(f)
    assert adjoint_involution(f).same_as(inv)
    # up to positive scalar the gram is diag(1,2)
    ratio = f.gram[0][0] / Fraction(1)
    assert f.gram == [[ratio, Fraction(0)], [Fraction(0), 2 * ratio]]


def test_involution_to_form_roundtrip_random():
    rng = random.Random(23)
    for _ in range(10):
        f = rand_pos_def(rng, 2)
        inv = adjoint_involution(f)
        g = involution_to_form(inv, want_positive=True)
        assert adjoint_involution(g).same_as(inv)


def test_involution_from_callable():
    z = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(2)]]
    reference = MatrixInvolution("symmetric", QR, 2, z)
    recovered = involution_from_callable(reference.apply, "symmetric", QR, 2)
    assert recovered.same_as(reference)


def test_involution_to_form_symplectic_rejects_positive():
    z = [[Fraction(0), Fraction(1)], [Fraction(-1), Fraction(0)]]
    inv = MatrixInvolution("symmetric", QR, 2, z)
    with pytest.raises(FormError):
        involution_to_form(inv, want_positive=True)
    f = involution_to_form(inv, want_positive=False)
    assert f.kind == "skew"


def test_positive_involution_test():
    assert is_positive_involution(adjoint_involution(diagonal_form_q([1, 1])))
    assert not is_positive_involution(
        MatrixInvolution("symmetric", QR, 2, [[Fraction(0), Fraction(1)], [Fraction(-1), Fraction(0)]])
    )


def test_invariants_symmetric_examples():
    inv = invariants(diagonal_form_q([1, 1]))
    assert inv.dim == 2
    assert inv.det_class.representative == 1
    assert inv.hasse_minus_places() == []
    assert inv.signatures == [(2, 0)]

    inv2 = invariants(diagonal_form_q([-1, -1]))
    assert inv2.hasse_minus_places() == [LocalPlace.finite(2), REAL_PLACE]
    assert inv2.signatures == [(0, 2)]


def test_invariants_quat_skew_hermitian():
    ring = QuaternionRing(RationalRing(), Fraction(-1), Fraction(-1))
    i = ring.i()
    f = GramForm("quat-skew-hermitian", ring, [[i]])
    inv = invariants(f)
    assert inv.det_class.representative == 1  # Nrd(i) = 1
    assert not inv.complete


def test_diagonalize_preserves_form():
    rng = random.Random(5)
    for _ in range(15):
        n = rng.choice([2, 3, 4])
        g = [[Fraction(rng.randint(-4, 4)) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(i):
                g[i][j] = g[j][i]
        f = symmetric_form_q(g)
        if not f.is_nonsingular():
            continue
        diag, u = diagonalize(f)
        transformed = f.transform(u)
        for i in range(n):
            for j in range(n):
                expect = diag[i] if i == j else Fraction(0)
                assert transformed.gram[i][j] == expect


def test_is_norm_examples():
    assert is_norm(2, Fi)
    assert not is_norm(3, Fi)
    assert is_norm(1, Fi)
    assert is_norm(5, Fi)  # 5 = 1 + 4
    with pytest.raises(FormError):
        is_norm(2, F5)


def test_is_norm_against_search():
    # exhaustive a^2+b^2 search as oracle for Q(i)
    reachable = set()
    for a in range(0, 40):
        for b in range(0, 40):
            if a or b:
                reachable.add(a * a + b * b)
    for m in range(1, 60):
        claim = is_norm(m, Fi)
        # norms of Q(i)^x include m iff m * square is a sum of two squares
        truth = any(m * k * k in reachable for k in range(1, 12))
        assert claim == truth, m


def test_isometric_examples():
    f1 = diagonal_form_q([1, 1])
    f2 = diagonal_form_q([2, 2])
    dec = isometric(f1, f2)
    assert dec and dec.complete
    w = search_isometry_witness(f1, f2, 2)
    assert w is not None
    # verify u^T G1 u = G2
    transformed = f1.transform(w)
    assert transformed.gram == f2.gram

    f3 = diagonal_form_q([1, 3])
    dec2 = isometric(f1, f3)
    assert not dec2
    assert "det_class" in dec2.reason
    assert search_isometry_witness(f1, f3, 3) is None


def test_isometric_skew_dimension_only():
    j2 = GramForm("skew", QR, [[Fraction(0), Fraction(1)], [Fraction(-1), Fraction(0)]])
    j2b = GramForm("skew", QR, [[Fraction(0), Fraction(5)], [Fraction(-5), Fraction(0)]])
    assert isometric(j2, j2b)
    s = skew_standard_witness(j2b)
    assert s is not None


def test_etale_pair_isometry():
    f1 = etale_pair_form([[1, 0], [0, 1]])
    f2 = etale_pair_form([[2, 1], [0, 3]])
    assert isometric(f1, f2)
    w = etale_pair_witness(f1, f2)
    assert w is not None


def test_hermitian_imaginary_quadratic():
    ring = QuadRing(Fi)
    one = Fi.one()
    f = GramForm("hermitian", ring, [[one]])
    inv = invariants(f)
    assert inv.dim == 1 and inv.det_is_norm and inv.signatures == [(1, 0)]
    two = Fi.from_rational(2)
    f2 = GramForm("hermitian", ring, [[two]])
    assert isometric(f, f2)  # det ratio 2 is a norm of Q(i)
    f3 = GramForm("hermitian", ring, [[Fi.from_rational(3)]])
    assert not isometric(f, f3)  # 3 is not a norm
    fneg = GramForm("hermitian", ring, [[Fi.from_rational(-1)]])
    assert not isometric(f, fneg)  # signatures differ


def test_hermitian_off_diagonal():
    ring = QuadRing(Fi)
    i_elem = Fi.sqrtD()
    g = [[Fi.from_rational(2), i_elem], [-i_elem, Fi.from_rational(3)]]
    f = GramForm("hermitian", ring, g)
    assert is_positive_definite(f)
    inv = invariants(f)
    assert inv.dim == 2 and inv.signatures == [(2, 0)]


def test_quaternion_hermitian_type_iii():
    ring = QuaternionRing(RationalRing(), Fraction(-1), Fraction(-1))
    f = GramForm("hermitian", ring, [[ring.one()]])
    assert is_positive_definite(f)
    inv = invariants(f)
    assert inv.signatures == [(1, 0)] and inv.complete
    f2 = GramForm("hermitian", ring, [[ring.coerce(5)]])
    assert isometric(f, f2)


def test_fourth_power_examples():
    f1 = diagonal_form_q([1, 1])
    f2 = diagonal_form_q([1, 5])
    assert not isometric(f1, f2)
    ok, cert = fourth_power_isometric(f1, f2)
    assert ok
    assert cert["hasse_trivial"] and cert["invariants_match"]

    ok2, _ = fourth_power_isometric(f1, f1)
    assert ok2

    with pytest.raises(FormError):
        fourth_power_isometric(diagonal_form_q([1, -1]), f1)


def test_fourth_power_hermitian_imaginary():
    ring = QuadRing(Fi)
    f1 = GramForm("hermitian", ring, [[Fi.one()]])
    f2 = GramForm("hermitian", ring, [[Fi.from_rational(3)]])
    ok, cert = fourth_power_isometric(f1, f2)
    assert ok and cert["det_is_norm"]


def test_fourth_power_random_pairs():
    rng = random.Random(99)
    non_isometric_seen = 0
    for _ in range(25):
        n = rng.choice([1, 2, 3])
        f1, f2 = rand_pos_def(rng, n), rand_pos_def(rng, n)
        if not isometric(f1, f2):
            non_isometric_seen += 1
        ok, _ = fourth_power_isometric(f1, f2)
        assert ok
    assert non_isometric_seen > 3


def test_witness_search_trivial_and_height():
    f = symmetric_form_q([[2, 1], [1, 1]])
    w = search_isometry_witness(f, f, 1)
    assert w == [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]


def test_lemma_positive_adjoint_and_psi_q():
    """Positive definite f => adjoint involution positive; and for random
    q = b b^dagger, psi_q is positive definite."""
    rng = random.Random(41)
    for _ in range(12):
        n = rng.choice([2, 3])
        f = rand_pos_def(rng, n)
        inv = adjoint_involution(f)
        assert is_positive_involution(inv)
        while True:
            b = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
            from polarith.linalg import det as qdet

            if qdet(b) != 0:
                break
        q = rmat_mul(QR, b, inv.apply(b))
        psi_q = GramForm(f.kind, f.ring, rmat_mul(QR, f.gram, q))
        assert is_positive_definite(psi_q)


def test_det_class_multiplicativity_and_sum_rule():
    rng = random.Random(17)
    from polarith.exact import hasse_invariant, hilbert_symbol, support_places

    for _ in range(10):
        d1 = [Fraction(rng.choice([x for x in range(-6, 7) if x]))
              for _ in range(rng.choice([1, 2]))]
        d2 = [Fraction(rng.choice([x for x in range(-6, 7) if x]))
              for _ in range(rng.choice([1, 2]))]
        f1, f2 = diagonal_form_q(d1), diagonal_form_q(d2)
        i1, i2 = invariants(f1), invariants(f2)
        isum = invariants(f1.direct_sum(f2))
        assert isum.det_class == i1.det_class * i2.det_class
        det1 = Fraction(1)
        for x in d1:
            det1 *= x
        det2 = Fraction(1)
        for x in d2:
            det2 *= x
        for v in support_places(*(d1 + d2)):
            assert hasse_invariant(list(d1) + list(d2), v) == (
                hasse_invariant(d1, v) * hasse_invariant(d2, v) * hilbert_symbol(det1, det2, v)
            )


def test_symmetric_real_quadratic_invariants_flagged():
    ring = QuadRing(F5)
    q = F5.from_sqrt_coords(3, 1)  # totally positive
    f1 = GramForm("symmetric", ring, [[q]])
    f2 = GramForm("symmetric", ring, [[q * 4]])
    dec = isometric(f1, f2)
    assert dec and not dec.complete  # det ratio 4 is a square; flagged incomplete
    f3 = GramForm("symmetric", ring, [[F5.from_rational(1)]])
    dec2 = isometric(f1, f3)
    assert not dec2  # (3+sqrt5) is not a square times 1 in F
    # signature separation
    f4 = GramForm("symmetric", ring, [[F5.from_sqrt_coords(1, 1)]])  # mixed signs
    assert not isometric(f1, f4)


def test_fourth_power_symmetric_real_quadratic():
    ring = QuadRing(F5)
    q1 = F5.from_sqrt_coords(3, 1)
    q2 = F5.from_rational(1)
    f1 = GramForm("symmetric", ring, [[q1]])
    f2 = GramForm("symmetric", ring, [[q2]])
    assert is_positive_definite(f1) and is_positive_definite(f2)
    ok, cert = fourth_power_isometric(f1, f2)
    assert ok and cert["det_fourth_power_square"]


def test_fourth_power_quaternion_hermitian():
    ring = QuaternionRing(RationalRing(), Fraction(-1), Fraction(-1))
    f1 = GramForm("hermitian", ring, [[ring.one()]])
    f2 = GramForm("hermitian", ring, [[ring.coerce(7)]])
    ok, cert = fourth_power_isometric(f1, f2)
    assert ok and cert["classified_by"] == "dimension and signature"


def test_isometric_never_false_with_witness_dim4():
    """Random dim <= 4, height <= 3: a found witness forces isometric."""
    rng = random.Random(3110)
    for _ in range(6):
        n = rng.choice([2, 3, 4])
        f1 = rand_pos_def(rng, n, bound=2)
        u = [[Fraction(rng.choice([-1, 0, 1, 2])) for _ in range(n)] for _ in range(n)]
        from polarith.linalg import det as qdet

        if qdet(u) == 0:
            continue
        f2 = f1.transform(u)
        if any(abs(x) > 40 for row in f2.gram for x in row):
            continue
        w = search_isometry_witness(f1, f2, 3)
        if w is not None:
            assert isometric(f1, f2)


def test_involution_from_callable_rejects_non_involution():
    def not_involution(a):
        # transpose then scale: not an involution of the algebra
        return [[2 * a[j][i] for j in range(2)] for i in range(2)]

    with pytest.raises(FormError):
        involution_from_callable(not_involution, "symmetric", QR, 2)
