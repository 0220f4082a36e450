"""Separation of polarized isogeny classes inside one isogeny class for
abelian surfaces with real multiplication: totally positive elements of the
maximal order of a real quadratic field, modulo the equivalence
q ~ r  iff  q/r lies in Q^x * F^x2.

The equivalence test is a genuine decision procedure, not a search: the
ideal of q/r is analyzed prime by prime (ramified exponents must be even,
split-pair exponents congruent mod 2), the square-root ideal must be
principal, and the leftover unit must be a square up to a rational factor
supported on the ramified primes.  A positive answer always carries an
exact witness (n, u) with n q = u^2 r; a negative answer can be
cross-checked by the exhaustive bounded witness search below.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from sympy import factorint, primerange

from .quadfield import (
    QfIdeal,
    QuadElem,
    QuadField,
    ResourceError,
    factor_ideal,
    fundamental_unit,
    is_principal,
    is_totally_positive,
    prime_splitting,
    primes_above,
    sqrt_in_field,
)


class HeckeError(ValueError):
    pass


@dataclass(frozen=True)
class PolClassRep:
    """A totally positive element of the maximal order, tagged with the
    split prime that produced it (when any)."""

    field: QuadField
    q: QuadElem
    source_prime: int | None = None

    def __post_init__(self):
        if not self.q.is_integral():
            raise HeckeError("representative must lie in the maximal order")
        if not is_totally_positive(self.q):
            raise HeckeError("representative must be totally positive")


def rosati_transport_check(q: QuadElem, r: QuadElem, u: QuadElem, n) -> bool:
    """n * q == u^2 * r, exactly."""
    if u.is_zero() or n == 0:
        return False
    lhs = q * Fraction(n)
    rhs = u * u * r
    return (lhs - rhs).is_zero()


def equivalence_witness(q: QuadElem, r: QuadElem) -> tuple[int, QuadElem] | None:
    """(n, u) with n q = u^2 r and n a positive... nonzero integer, u
    integral, when q/r is in Q^x F^x2; None otherwise."""
    if q.field != r.field:
        raise HeckeError("elements of different fields")
    F = q.field
    if q.is_zero() or r.is_zero():
        raise HeckeError("zero element")
    s = q / r
    nm = s.norm()
    from .exact import is_rational_square

    if nm <= 0 or not is_rational_square(nm):
        return None
    ideal_s = QfIdeal.principal(s)
    factors = factor_ideal(ideal_s)
    # group exponents by rational prime
    by_p: dict[int, list[tuple[QfIdeal, int]]] = {}
    for pr, e in factors:
        nrm = pr.norm()
        p = int(min(factorint(int(nrm)).keys())) if nrm > 1 else None
        by_p.setdefault(p, []).append((pr, e))
    c0 = Fraction(1)
    sqrt_exponents: list[tuple[QfIdeal, int]] = []
    for p, entries in sorted(by_p.items()):
        kind = prime_splitting(F, p)
        if kind == "ramified":
            (pr, e), = entries
            if e % 2:
                return None
            sqrt_exponents.append((pr, e // 2))
        elif kind == "inert":
            (pr, e), = entries
            # v_P(c) = v_p(c): fix parity through c0
            if e % 2:
                c0 *= p
                sqrt_exponents.append((pr, (e + 1) // 2))
            else:
                sqrt_exponents.append((pr, e // 2))
        else:  # split
            prs = primes_above(F, p)
            emap = {0: 0, 1: 0}
            for pr, e in entries:
                emap[prs.index(pr)] = e
            if (emap[0] - emap[1]) % 2:
                return None
            if emap[0] % 2:
                c0 *= p
                sqrt_exponents.append((prs[0], (emap[0] + 1) // 2))
                sqrt_exponents.append((prs[1], (emap[1] + 1) // 2))
            else:
                sqrt_exponents.append((prs[0], emap[0] // 2))
                sqrt_exponents.append((prs[1], emap[1] // 2))
    ideal_c = QfIdeal.unit_ideal(F)
    for pr, e in sqrt_exponents:
        if e:
            ideal_c = ideal_c * pr**e
    x0 = is_principal(ideal_c)
    if x0 is None:
        return None
    u0 = s * c0 / (x0 * x0)
    if not u0.is_unit():
        raise HeckeError("internal: unit bookkeeping failed")
    # try to absorb the unit: u0 * w must be a square for a rational w
    # supported on -1 and the ramified primes
    divisors = [1]
    for p in factorint(abs(F.disc)).keys():
        divisors = divisors + [d * p for d in divisors]
    for d in sorted(divisors):
        for w in (d, -d):
            y = sqrt_in_field(u0 * w)
            if y is None:
                continue
            # s * (c0 w) = (x0 y)^2
            u = x0 * y
            n = c0 * w
            # clear denominators: n q = u^2 r with integer n, integral u
            t = u.x.denominator
            t = t * u.y.denominator // gcd(t, u.y.denominator)
            t_n = Fraction(n * t * t)
            u_int = u * t
            extra = t_n.denominator
            u_int = u_int * extra
            n_int = t_n * extra * extra
            assert n_int.denominator == 1
            if rosati_transport_check(q, r, u_int, n_int):
                return int(n_int), u_int
            raise HeckeError("internal: witness failed verification")
    return None


def equivalent(q: PolClassRep | QuadElem, r: PolClassRep | QuadElem) -> bool:
    """q/r in Q^x F^x2, decided exactly."""
    qe = q.q if isinstance(q, PolClassRep) else q
    re_ = r.q if isinstance(r, PolClassRep) else r
    return equivalence_witness(qe, re_) is not None


def exhaustive_witness_search(
    q: QuadElem, r: QuadElem, height: int
) -> tuple[Fraction, QuadElem] | None:
    """Independent bounded check: u over integral coordinates with
    |coords| <= height, n = u^2 r / q rational.  Returns the first witness
    or None; used to confirm negative `equivalent` answers."""
    F = q.field
    for x in range(-height, height + 1):
        for y in range(-height, height + 1):
            u = QuadElem(F, Fraction(x), Fraction(y))
            if u.is_zero():
                continue
            cand = u * u * r / q
            if cand.is_rational() and cand.as_rational() != 0:
                return cand.as_rational(), u
    return None


def generate_classes(
    field: QuadField, count: int, prime_cap: int = 10_000
) -> list[PolClassRep]:
    """`count` pairwise-inequivalent totally positive representatives:
    the class of 1, then one class per split rational prime with a
    principal, totally-positive-adjustable prime above it."""
    if count < 1:
        raise HeckeError("count must be >= 1")
    if not field.is_real:
        raise HeckeError("the construction needs a real quadratic field")
    reps = [PolClassRep(field, field.one(), None)]
    if count == 1:
        return reps
    eps = fundamental_unit(field)
    last_p = None
    for p in primerange(2, prime_cap):
        last_p = p
        if prime_splitting(field, p) != "split":
            continue
        pr = primes_above(field, p)[0]
        g = is_principal(pr, eps)
        if g is None:
            continue
        g_pos = _make_totally_positive(g, eps)
        if g_pos is None:
            continue
        rep = PolClassRep(field, g_pos, p)
        if any(equivalent(rep, old) for old in reps):
            continue
        reps.append(rep)
        if len(reps) == count:
            return reps
    raise ResourceError(
        f"could not find {count} classes below the prime cap (last prime tried: {last_p})"
    )


def _make_totally_positive(g: QuadElem, eps: QuadElem) -> QuadElem | None:
    """Adjust a generator by -1 and the fundamental unit to make it totally
    positive; None when the signature pattern is unreachable (norm +1
    units)."""
    for cand in (g, -g, g * eps, -(g * eps)):
        if cand.sign_at(0) > 0 and cand.sign_at(1) > 0:
            return cand if cand.is_integral() else None
    return None


def pairwise_matrix(reps: list[PolClassRep]) -> list[list[bool]]:
    n = len(reps)
    return [[equivalent(reps[i], reps[j]) for j in range(n)] for i in range(n)]
