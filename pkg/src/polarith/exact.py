"""Exact rational invariants: p-adic valuations, square classes, Hilbert
symbols and Hasse invariants over Q.

Conventions
-----------
* The Hilbert symbol sigma(a, b, v) is +1 iff z^2 = a x^2 + b y^2 has a
  solution (x, y, z) != (0, 0, 0) over the completion of Q at v.
* The Hasse invariant of a diagonal form <a_1, ..., a_n> at v is the
  product over i < j of sigma(a_i, a_j, v).  Two conventions circulate in
  the literature (i < j versus i <= j); this package uses i < j, which is
  the one compatible with the direct-sum rule
  s(f + g) = s(f) s(g) sigma(det f, det g).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint, isprime


class ExactError(ValueError):
    pass


@dataclass(frozen=True)
class LocalPlace:
    """A place of Q: a finite prime p, or the real place (p is None)."""

    p: int | None

    def __post_init__(self):
        if self.p is not None and not isprime(self.p):
            raise ExactError(f"{self.p} is not prime")

    @classmethod
    def finite(cls, p: int) -> "LocalPlace":
        return cls(p)

    @classmethod
    def real(cls) -> "LocalPlace":
        return cls(None)

    @property
    def is_real(self) -> bool:
        return self.p is None

    def __repr__(self):
        return "oo" if self.p is None else f"p{self.p}"

    def __lt__(self, other):  # real place sorts last
        if self.p is None:
            return False
        if other.p is None:
            return True
        return self.p < other.p


REAL_PLACE = LocalPlace(None)


@dataclass(frozen=True)
class SquareClassQ:
    """A class in Q^x / (Q^x)^2, stored as its squarefree integer
    representative (sign included)."""

    representative: int

    def __post_init__(self):
        if self.representative == 0:
            raise ExactError("zero has no square class")
        n = abs(self.representative)
        for q, e in factorint(n).items():
            if e >= 2:
                raise ExactError(f"{self.representative} is not squarefree")

    def __mul__(self, other: "SquareClassQ") -> "SquareClassQ":
        return square_class(Fraction(self.representative * other.representative))

    @property
    def is_trivial(self) -> bool:
        return self.representative == 1


def valuation(x: Fraction | int, p: int) -> int:
    """v_p(x) for x a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ExactError("valuation of zero is undefined")
    if not isprime(p):
        raise ExactError(f"{p} is not prime")
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x: Fraction | int, p: int) -> Fraction:
    """x / p^{v_p(x)}."""
    return Fraction(x) / Fraction(p) ** valuation(x, p)


def unit_residue(x: Fraction | int, p: int, modulus: int | None = None) -> int:
    """The residue of the p-adic unit part of x modulo `modulus` (default p)."""
    if modulus is None:
        modulus = p
    u = unit_part(x, p)
    return u.numerator * pow(u.denominator, -1, modulus) % modulus


def square_class(x: Fraction | int) -> SquareClassQ:
    """Squarefree representative of x modulo rational squares."""
    x = Fraction(x)
    if x == 0:
        raise ExactError("zero has no square class")
    n = x.numerator * x.denominator
    rep = -1 if n < 0 else 1
    for q, e in factorint(abs(n)).items():
        if e % 2:
            rep *= q
    return SquareClassQ(rep)


def is_rational_square(x: Fraction | int) -> bool:
    x = Fraction(x)
    return x != 0 and square_class(x).is_trivial


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for odd prime p, a coprime to p."""
    a %= p
    if a == 0:
        raise ExactError("legendre symbol needs a unit")
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def hilbert_symbol(a: Fraction | int, b: Fraction | int, v: LocalPlace) -> int:
    """sigma(a, b) at the place v, by the standard closed formulas."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ExactError("hilbert symbol needs nonzero arguments")
    if v.is_real:
        return -1 if (a < 0 and b < 0) else 1
    p = v.p
    alpha, beta = valuation(a, p), valuation(b, p)
    if p != 2:
        u = unit_residue(a, p)
        w = unit_residue(b, p)
        s = 1
        if alpha % 2 and beta % 2:
            s *= legendre(-1, p)
        if beta % 2:
            s *= legendre(u, p)
        if alpha % 2:
            s *= legendre(w, p)
        return s
    u = unit_residue(a, 2, 8)
    w = unit_residue(b, 2, 8)
    eps_u = (u - 1) // 2 % 2
    eps_w = (w - 1) // 2 % 2
    om_u = (u * u - 1) // 8 % 2
    om_w = (w * w - 1) // 8 % 2
    e = eps_u * eps_w + alpha * om_w + beta * om_u
    return -1 if e % 2 else 1


def hasse_invariant(diag: list[Fraction | int], v: LocalPlace) -> int:
    """prod_{i<j} sigma(a_i, a_j) at v for a diagonalized form."""
    entries = [Fraction(x) for x in diag]
    if any(x == 0 for x in entries):
        raise ExactError("singular form: zero diagonal entry")
    s = 1
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            s *= hilbert_symbol(entries[i], entries[j], v)
    return s


def support_places(*values: Fraction | int) -> list[LocalPlace]:
    """Finite primes dividing any value's numerator or denominator, plus 2,
    plus the real place.  Hilbert symbols of the values are +1 elsewhere."""
    primes = {2}
    for x in values:
        x = Fraction(x)
        if x == 0:
            raise ExactError("support of zero")
        for n in (abs(x.numerator), x.denominator):
            primes.update(factorint(n).keys())
    places = [LocalPlace.finite(p) for p in sorted(primes)]
    places.append(REAL_PLACE)
    return places
