import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarith.algebras import (
    AlgebraError,
    AlgebraWithInvolution,
    NormSpec,
    OrderR,
    QuadRing,
    QuaternionRing,
    RationalRing,
    SimpleFactor,
    apply_involution,
    local_norm,
    matrix_algebra_q,
    matrix_order_z,
    maximal_order_quadfield,
    norm,
    norm_times_inverse,
    quadfield_algebra,
    quaternion_algebra_q,
    rational_algebra,
)
from polarith.quadfield import QuadField

F5 = QuadField(5)


def test_quaternion_canonical_involution():
    A = quaternion_algebra_q(-1, -1)
    ring = A.factors[0].ring
    i = ring.i()
    x = (i,)
    assert A.eq(apply_involution(A, x), (-i,))
    one = A.one()
    assert A.eq(apply_involution(A, one), one)


def test_matrix_involution_conjugate_by_diag():
    A = matrix_algebra_q(2, z=[[1, 0], [0, 2]])
    f = A.factors[0]
    x = ([[Fraction(0), Fraction(1)], [Fraction(0), Fraction(0)]],)
    expected = [[Fraction(0), Fraction(0)], [Fraction(1, 2), Fraction(0)]]
    assert f.eq(apply_involution(A, x)[0], expected)


def test_involution_axioms_random():
    rng = random.Random(7)
    algebras = [
        rational_algebra(),
        quadfield_algebra(F5, "conjugation"),
        quaternion_algebra_q(-1, -1),
        matrix_algebra_q(2, z=[[2, 1], [1, 1]]),
        AlgebraWithInvolution(
            (SimpleFactor(RationalRing()), SimpleFactor(RationalRing())),
            swap_pairs=((0, 1),),
        ),
    ]
    for A in algebras:
        dim = A.dim_q
        for _ in range(10):
            x = A.from_qcoords([Fraction(rng.randint(-5, 5)) for _ in range(dim)])
            y = A.from_qcoords([Fraction(rng.randint(-5, 5)) for _ in range(dim)])
            xd = apply_involution(A, x)
            assert A.eq(apply_involution(A, xd), x)
            assert A.eq(
                apply_involution(A, A.mul(x, y)),
                A.mul(apply_involution(A, y), xd),
            )
            assert A.eq(
                apply_involution(A, A.add(x, y)),
                A.add(xd, apply_involution(A, y)),
            )


def test_norm_examples():
    A = rational_algebra()
    spec = NormSpec(A, (1,))
    assert spec.rank_d == 1
    assert norm(A, A.from_rational(2), spec) == 2

    B = quadfield_algebra(F5)
    specB = NormSpec(B, (1,))
    assert specB.rank_d == 2
    x = (F5.from_sqrt_coords(3, 1),)  # 3 + sqrt5
    assert norm(B, x, specB) == 4

    C = matrix_algebra_q(2)
    specC = NormSpec(C, (2,))
    assert specC.rank_d == 4
    d = ([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(2)]],)
    assert norm(C, d, specC) == 4


def test_norm_multiplicative_and_units():
    A = quadfield_algebra(F5)
    spec = NormSpec(A, (1,))
    order = maximal_order_quadfield(A)
    rng = random.Random(3)
    for _ in range(20):
        x = (F5.from_rational(0),)
        while norm(A, x, spec) == 0:
            x = A.from_qcoords([Fraction(rng.randint(-9, 9)) for _ in range(2)])
        y = A.from_qcoords([Fraction(rng.randint(-9, 9)) for _ in range(2)])
        assert norm(A, A.mul(x, y), spec) == norm(A, x, spec) * norm(A, y, spec)
        assert order.contains(x) and norm(A, x, spec).denominator == 1
    u = (F5.from_sqrt_coords(Fraction(1, 2), Fraction(1, 2)),)  # fundamental unit
    assert norm(A, u, spec) == 1


def test_norm_times_inverse_examples():
    B = quadfield_algebra(F5)
    specB = NormSpec(B, (1,))
    orderB = maximal_order_quadfield(B)
    x = (F5.from_sqrt_coords(1, 1),)  # 1 + sqrt5
    out = norm_times_inverse(orderB, x, specB)
    assert out[0] == F5.from_sqrt_coords(-1, 1)  # sqrt5 - 1

    A = rational_algebra()
    specA = NormSpec(A, (1,))
    orderA = OrderR(A, (A.one(),))
    assert norm_times_inverse(orderA, A.from_rational(2), specA)[0] == 1

    C = matrix_algebra_q(2)
    specC = NormSpec(C, (2,))
    orderC = matrix_order_z(C)
    d = ([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(2)]],)
    out = norm_times_inverse(orderC, d, specC)
    assert out[0] == [[Fraction(4), Fraction(0)], [Fraction(0), Fraction(2)]]


def test_local_norm_examples():
    A = rational_algebra()
    spec = NormSpec(A, (1,))
    assert local_norm(A, A.from_rational(12), 2, spec) == 4
    assert local_norm(A, A.from_rational(12), 5, spec) == 1

    B = quadfield_algebra(F5)
    specB = NormSpec(B, (1,))
    x = (F5.from_sqrt_coords(3, 1),)
    assert local_norm(B, x, 2, specB) == 4
    assert local_norm(B, x, 3, specB) == 1


@given(coords=st.lists(st.integers(-6, 6), min_size=2, max_size=2))
@settings(max_examples=40, deadline=None)
def test_local_global_norm_factorization(coords):
    B = quadfield_algebra(F5)
    spec = NormSpec(B, (1,))
    x = B.from_qcoords([Fraction(c) for c in coords])
    n = norm(B, x, spec)
    if n == 0:
        return
    prod = Fraction(1)
    from sympy import factorint

    for p in factorint(n.numerator * n.denominator):
        prod *= local_norm(B, x, p, spec)
    assert prod == n


def test_quaternion_matrix_reduced_norm():
    # M_1 of a quaternion algebra: Nrd(matrix [x]) must equal Nrd(x)
    ring = QuaternionRing(RationalRing(), Fraction(-1), Fraction(-1))
    f = SimpleFactor(ring, matrix_size=1, involution="conjugate_transpose")
    i = ring.i()
    assert f.nrd([[i]]) == 1
    x = ring.coerce(2) + i
    assert f.nrd([[x]]) == x.nrd() == 5
    # M_2: diag(x, y) has Nrd = Nrd(x) Nrd(y)
    f2 = SimpleFactor(ring, matrix_size=2, involution="conjugate_transpose")
    y = ring.j() + ring.coerce(1)
    m = [[x, ring.zero()], [ring.zero(), y]]
    assert f2.nrd(m) == x.nrd() * y.nrd()


def test_quaternion_norm_spec():
    A = quaternion_algebra_q(-1, -1)
    spec = NormSpec(A, (1,))
    assert spec.rank_d == 2
    ring = A.factors[0].ring
    x = (ring.coerce(1) + ring.i(),)
    assert norm(A, x, spec) == 2


def test_order_validation_rejects_bad():
    A = quadfield_algebra(F5)
    # basis not containing 1
    with pytest.raises(AlgebraError):
        OrderR(A, ((F5.from_rational(2),), (F5.omega() * 2,)))
    # not closed: Z + Z*(w/2) is not a ring
    with pytest.raises(AlgebraError):
        OrderR(A, ((F5.one(),), (F5.omega() / 2,)))


def test_order_membership():
    A = quadfield_algebra(F5)
    order = maximal_order_quadfield(A)
    assert order.contains((F5.omega(),))
    assert not order.contains((F5.omega() / 2,))


def test_swap_pair_norm_compat():
    A = AlgebraWithInvolution(
        (SimpleFactor(RationalRing()), SimpleFactor(RationalRing())),
        swap_pairs=((0, 1),),
    )
    with pytest.raises(AlgebraError):
        NormSpec(A, (1, 2))
    spec = NormSpec(A, (2, 2))
    assert spec.rank_d == 4
    x = (Fraction(3), Fraction(5))
    assert norm(A, x, spec) == 15**2
    assert apply_involution(A, x) == (Fraction(5), Fraction(3))


def test_rational_scalar_detection():
    C = matrix_algebra_q(2)
    s = C.from_rational(Fraction(7, 2))
    assert C.is_rational_scalar(s) == Fraction(7, 2)
    d = ([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(2)]],)
    assert C.is_rational_scalar(d) is None


def test_norm_spec_declared_rank():
    A = quadfield_algebra(F5)
    assert NormSpec(A, (1,), declared_rank=2).rank_d == 2
    with pytest.raises(AlgebraError):
        NormSpec(A, (1,), declared_rank=3)


def test_quaternion_over_quadratic_center():
    ring = QuaternionRing(QuadRing(F5), F5.from_rational(-1), F5.from_rational(-1))
    A = AlgebraWithInvolution((SimpleFactor(ring, involution="canonical"),))
    spec = NormSpec(A, (1,))
    assert spec.rank_d == 4
    i = ring.i()
    x = (ring.coerce(1) + i,)
    # Nrd(1 + i) = 2 in F; Nm_{F/Q}(2) = 4
    assert norm(A, x, spec) == 4
    y = (ring.coerce(F5.from_sqrt_coords(0, 1)),)  # scalar sqrt5
    # Nrd = 5 as an F-element is (sqrt5)^2: Nm_{F/Q}((sqrt5)^2) = 25
    assert norm(A, y, spec) == 25
    # involution axioms
    xd = apply_involution(A, x)
    assert A.eq(apply_involution(A, xd), x)


def test_matrix_over_quadratic_field():
    ring = QuadRing(F5)
    f = SimpleFactor(ring, matrix_size=2, involution="conjugate_transpose")
    A = AlgebraWithInvolution((f,))
    spec = NormSpec(A, (1,))
    assert spec.rank_d == 4
    s5 = F5.sqrtD()
    m = ([[s5, F5.zero()], [F5.zero(), F5.one()]],)
    # Nrd = det = sqrt5; Nm_{F/Q} = -5; absolute value 5
    assert norm(A, m, spec) == 5
    md = apply_involution(A, m)
    # conjugate-transpose: sqrt5 bar = -sqrt5
    assert f.eq(md[0], [[-s5, F5.zero()], [F5.zero(), F5.one()]])
