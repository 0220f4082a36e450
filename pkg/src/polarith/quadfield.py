"""Real and imaginary quadratic fields: maximal orders, fractional ideals
with prime factorization, desk-scale class groups, units, total positivity.

Elements are stored in the canonical integral basis (1, w) with
w = (disc + sqrt(disc)) / 2, so the maximal order is exactly the set of
elements with integer coordinates.  Ideals are stored as a 2x2 integer
row-HNF basis over a positive denominator; equality is normalized basis
equality, which makes ideals hashable and suitable for golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from sympy import factorint, isprime, primerange

from .exact import is_rational_square
from .linalg import frac, hnf, inverse, mat


class QuadFieldError(ValueError):
    pass


class ResourceError(RuntimeError):
    pass


MAX_CLASS_GROUP_DISC = 10**6


def _squarefree(n: int) -> bool:
    return all(e < 2 for e in factorint(abs(n)).values())


@dataclass(frozen=True)
class QuadField:
    """Q(sqrt(D)) for a squarefree integer D != 0, 1."""

    D: int

    def __post_init__(self):
        if self.D in (0, 1) or not _squarefree(self.D):
            raise QuadFieldError(f"D = {self.D} must be squarefree and != 0, 1")

    @property
    def disc(self) -> int:
        return self.D if self.D % 4 == 1 else 4 * self.D

    @property
    def is_real(self) -> bool:
        return self.D > 0

    # minimal polynomial of w is x^2 - disc*x + (disc^2 - disc)/4
    @property
    def w_trace(self) -> int:
        return self.disc

    @property
    def w_norm(self) -> int:
        return (self.disc * self.disc - self.disc) // 4

    def one(self) -> "QuadElem":
        return QuadElem(self, Fraction(1), Fraction(0))

    def zero(self) -> "QuadElem":
        return QuadElem(self, Fraction(0), Fraction(0))

    def omega(self) -> "QuadElem":
        return QuadElem(self, Fraction(0), Fraction(1))

    def sqrtD(self) -> "QuadElem":
        """The element sqrt(D) in (1, w) coordinates."""
        if self.D % 4 == 1:
            return QuadElem(self, Fraction(-self.D), Fraction(2))
        return QuadElem(self, Fraction(-2 * self.D), Fraction(1))

    def from_rational(self, x) -> "QuadElem":
        return QuadElem(self, frac(x), Fraction(0))

    def from_sqrt_coords(self, s, t) -> "QuadElem":
        """The element s + t*sqrt(D)."""
        return self.from_rational(s) + self.sqrtD() * frac(t)

    def __repr__(self):
        return f"Q(sqrt({self.D}))"


@dataclass(frozen=True)
class QuadElem:
    field: QuadField
    x: Fraction
    y: Fraction

    def _check(self, other: "QuadElem"):
        if self.field != other.field:
            raise QuadFieldError("elements of different fields")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_rational(other)
        self._check(other)
        return QuadElem(self.field, self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(self.field, -self.x, -self.y)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.field, self.x * other, self.y * other)
        self._check(other)
        # w^2 = disc*w - (disc^2-disc)/4
        t, nw = self.field.w_trace, self.field.w_norm
        yy = self.y * other.y
        return QuadElem(
            self.field,
            self.x * other.x - yy * nw,
            self.x * other.y + self.y * other.x + yy * t,
        )

    __rmul__ = __mul__

    def conj(self) -> "QuadElem":
        return QuadElem(self.field, self.x + self.y * self.field.w_trace, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x + self.x * self.y * self.field.w_trace + self.y * self.y * self.field.w_norm

    def trace(self) -> Fraction:
        return 2 * self.x + self.y * self.field.w_trace

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_rational(self) -> bool:
        return self.y == 0

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise QuadFieldError(f"{self} is not rational")
        return self.x

    def inv(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.conj() * (1 / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.field, self.x / other, self.y / other)
        self._check(other)
        return self * other.inv()

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        out = self.field.one()
        b = self
        while e:
            if e & 1:
                out = out * b
            b = b * b
            e >>= 1
        return out

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def is_unit(self) -> bool:
        return self.is_integral() and abs(self.norm()) == 1

    def sign_at(self, embedding: int) -> int:
        """Sign of the image under the two real embeddings (0: w -> (disc+sqrt)/2,
        1: w -> (disc-sqrt)/2).  Real fields only."""
        if not self.field.is_real:
            raise QuadFieldError("real embeddings need a real field")
        if self.is_zero():
            return 0
        # value = (A + B*sqrt(disc)) / 2 with A = 2x + y*disc, B = +-y
        A = 2 * self.x + self.y * self.field.disc
        B = self.y if embedding == 0 else -self.y
        if B == 0:
            return 1 if A > 0 else -1
        if A == 0:
            return 1 if B > 0 else -1
        if A > 0 and B > 0:
            return 1
        if A < 0 and B < 0:
            return -1
        # opposite signs: compare A^2 vs B^2 * disc
        lhs, rhs = A * A, B * B * self.field.disc
        if A > 0:
            return 1 if lhs > rhs else -1
        return -1 if lhs > rhs else 1

    def __repr__(self):
        return f"({self.x} + {self.y}*w | D={self.field.D})"


def is_totally_positive(x: QuadElem) -> bool:
    """True iff both real embeddings of x are positive (real fields)."""
    if not x.field.is_real:
        raise QuadFieldError("total positivity is about real fields")
    if x.is_zero():
        raise QuadFieldError("zero is not totally positive")
    return x.sign_at(0) > 0 and x.sign_at(1) > 0


def is_square_in_field(x: QuadElem) -> bool:
    """Exact test for x in F^x2 (or x = 0)."""
    if x.is_zero():
        return True
    if x.is_rational():
        c = x.as_rational()
        return is_rational_square(c) or is_rational_square(c * x.field.D)
    n = x.norm()
    if n < 0 or not is_rational_square(n):
        return False
    n0sq = _rational_sqrt(n)
    for n0 in (n0sq, -n0sq):
        tau2 = x.trace() + 2 * n0
        if tau2 > 0 and is_rational_square(tau2):
            tau = _rational_sqrt(tau2)
            if tau != 0:
                y = (x + n0) / tau
                if y * y == x:
                    return True
    return False


def sqrt_in_field(x: QuadElem) -> QuadElem | None:
    """A square root of x in F, or None."""
    if x.is_zero():
        return x.field.zero()
    if x.is_rational():
        c = x.as_rational()
        if is_rational_square(c):
            return x.field.from_rational(_rational_sqrt(c))
        if is_rational_square(c * x.field.D):
            t = _rational_sqrt(c * x.field.D)
            return x.field.sqrtD() * (t / x.field.D)
        return None
    n = x.norm()
    if n < 0 or not is_rational_square(n):
        return None
    n0sq = _rational_sqrt(n)
    for n0 in (n0sq, -n0sq):
        tau2 = x.trace() + 2 * n0
        if tau2 > 0 and is_rational_square(tau2):
            tau = _rational_sqrt(tau2)
            if tau != 0:
                y = (x + n0) / tau
                if y * y == x:
                    return y
    return None


def _rational_sqrt(x: Fraction) -> Fraction:
    n, d = isqrt(x.numerator), isqrt(x.denominator)
    if n * n != x.numerator or d * d != x.denominator:
        raise QuadFieldError(f"{x} is not a rational square")
    return Fraction(n, d)


# ---------------------------------------------------------------------------
# Ideals


@dataclass(frozen=True)
class QfIdeal:
    """Fractional ideal of the maximal order, as (1/den) * rowspan_Z(num)
    in (1, w) coordinates.  num is in row HNF with normalized content."""

    field: QuadField
    num: tuple[tuple[int, int], tuple[int, int]]
    den: int

    @classmethod
    def from_rows(cls, field: QuadField, rows: list[list[int]], den: int) -> "QfIdeal":
        h = hnf(rows)
        if len(h) != 2:
            raise QuadFieldError("ideal basis must have rank 2")
        g = 0
        for row in h:
            for x in row:
                g = gcd(g, x)
        g = gcd(g, den)
        h = [[x // g for x in row] for row in h]
        den //= g
        return cls(field, (tuple(h[0]), tuple(h[1])), den)

    @classmethod
    def from_generators(cls, gens: list[QuadElem]) -> "QfIdeal":
        """The fractional o_F-module generated by gens (as an ideal)."""
        if not gens or all(g.is_zero() for g in gens):
            raise QuadFieldError("zero ideal")
        field = gens[0].field
        closure = []
        for g in gens:
            closure.append(g)
            closure.append(g * field.omega())
        den = 1
        for g in closure:
            for c in (g.x, g.y):
                den = den * c.denominator // gcd(den, c.denominator)
        rows = [[int(g.x * den), int(g.y * den)] for g in closure]
        return cls.from_rows(field, rows, den)

    @classmethod
    def principal(cls, g: QuadElem) -> "QfIdeal":
        return cls.from_generators([g])

    @classmethod
    def unit_ideal(cls, field: QuadField) -> "QfIdeal":
        return cls.from_rows(field, [[1, 0], [0, 1]], 1)

    def basis_elements(self) -> list[QuadElem]:
        return [
            QuadElem(self.field, Fraction(r[0], self.den), Fraction(r[1], self.den))
            for r in self.num
        ]

    def is_ideal(self) -> bool:
        """Check closure under multiplication by the maximal order."""
        b = self.basis_elements()
        m = mat([[frac(r[0]), frac(r[1])] for r in self.num])
        minv = inverse(m)
        for e in b:
            ew = e * self.field.omega()
            coords = [ew.x * self.den, ew.y * self.den]
            sol = [coords[0] * minv[0][0] + coords[1] * minv[1][0],
                   coords[0] * minv[0][1] + coords[1] * minv[1][1]]
            if any(c.denominator != 1 for c in sol):
                return False
        return True

    def norm(self) -> Fraction:
        d = self.num[0][0] * self.num[1][1] - self.num[0][1] * self.num[1][0]
        return Fraction(abs(d), self.den * self.den)

    def conj(self) -> "QfIdeal":
        return QfIdeal.from_generators([e.conj() for e in self.basis_elements()])

    def __mul__(self, other):
        if isinstance(other, QuadElem):
            return QfIdeal.from_generators([e * other for e in self.basis_elements()])
        if isinstance(other, (int, Fraction)):
            return QfIdeal.from_generators([e * other for e in self.basis_elements()])
        if self.field != other.field:
            raise QuadFieldError("ideals of different fields")
        gens = [a * b for a in self.basis_elements() for b in other.basis_elements()]
        return QfIdeal.from_generators(gens)

    def inv(self) -> "QfIdeal":
        return self.conj() * (1 / self.norm())

    def __pow__(self, e: int) -> "QfIdeal":
        if e == 0:
            return QfIdeal.unit_ideal(self.field)
        base = self if e > 0 else self.inv()
        out = QfIdeal.unit_ideal(self.field)
        for _ in range(abs(e)):
            out = out * base
        return out

    def is_integral(self) -> bool:
        return self.den == 1

    def contains(self, e: QuadElem) -> bool:
        m = mat([[frac(r[0]), frac(r[1])] for r in self.num])
        minv = inverse(m)
        coords = [e.x * self.den, e.y * self.den]
        sol = [coords[0] * minv[0][0] + coords[1] * minv[1][0],
               coords[0] * minv[0][1] + coords[1] * minv[1][1]]
        return all(c.denominator == 1 for c in sol)

    def as_json_dict(self) -> dict:
        """HNF basis and denominator, integers as strings (exact at any size)."""
        return {
            "D": self.field.D,
            "hnf": [[str(x) for x in row] for row in self.num],
            "den": str(self.den),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "QfIdeal":
        field = QuadField(int(doc["D"]))
        rows = [[int(x) for x in row] for row in doc["hnf"]]
        return cls.from_rows(field, rows, int(doc["den"]))

    def __repr__(self):
        return f"Ideal({self.num}, den={self.den} | D={self.field.D})"


def prime_splitting(field: QuadField, p: int) -> str:
    """'split', 'inert' or 'ramified', decided by the minimal polynomial of
    w modulo p (equivalently the Kronecker symbol of the discriminant)."""
    if not isprime(p):
        raise QuadFieldError(f"{p} is not prime")
    if field.disc % p == 0:
        return "ramified"
    t, nw = field.w_trace, field.w_norm
    roots = [r for r in range(p) if (r * r - t * r + nw) % p == 0]
    if not roots:
        return "inert"
    return "split" if len(set(roots)) == 2 else "ramified"


def primes_above(field: QuadField, p: int) -> list[QfIdeal]:
    """The prime ideals above p, deterministically ordered (split primes by
    increasing root of the minimal polynomial of w mod p)."""
    kind = prime_splitting(field, p)
    if kind == "inert":
        return [QfIdeal.from_rows(field, [[p, 0], [0, p]], 1)]
    t, nw = field.w_trace, field.w_norm
    roots = sorted({r for r in range(p) if (r * r - t * r + nw) % p == 0})
    if kind == "ramified" and not roots:
        raise QuadFieldError("no root for ramified prime")  # cannot happen
    out = []
    for r in roots:
        # ideal (p, w - r)
        out.append(QfIdeal.from_rows(field, [[p, 0], [-r, 1]], 1))
    if kind == "ramified":
        return out[:1]
    return out


def _lift_root(field: QuadField, p: int, r0: int, k: int) -> int:
    """Hensel lift of the simple root r0 of minpoly(w) mod p to mod p^k."""
    t, nw = field.w_trace, field.w_norm
    r = r0
    mod = p
    while mod < p**k:
        mod = min(mod * mod, p**k)
        f = (r * r - t * r + nw) % mod
        fp = (2 * r - t) % mod
        r = (r - f * pow(fp, -1, mod)) % mod
    return r


def element_prime_valuation(e: QuadElem, p: int, which: int = 0) -> int:
    """v_P(e) for the prime(s) P above p; `which` selects the split prime
    (ordered as in primes_above)."""
    if e.is_zero():
        raise QuadFieldError("valuation of zero")
    field = e.field
    kind = prime_splitting(field, p)
    nv_num = e.norm()
    from .exact import valuation as qval

    vn = qval(nv_num, p)
    if kind == "inert":
        assert vn % 2 == 0
        return vn // 2
    if kind == "ramified":
        return vn
    # split: v_P(x + y*w) = v_p(x + y*r) with r the lifted root
    t, nw = field.w_trace, field.w_norm
    roots = sorted({r for r in range(p) if (r * r - t * r + nw) % p == 0})
    prec = max(vn, 0) + 2 * qval_den_bound(e, p) + 4
    r = _lift_root(field, p, roots[which], prec)
    val = x_plus_yr_valuation(e, r, p)
    return val


def qval_den_bound(e: QuadElem, p: int) -> int:
    from .exact import valuation as qval

    b = 0
    for c in (e.x, e.y):
        if c != 0:
            b = max(b, -qval(c, p) if qval(c, p) < 0 else 0)
    return b


def x_plus_yr_valuation(e: QuadElem, r: int, p: int) -> int:
    from .exact import valuation as qval

    s = e.x + e.y * r
    if s == 0:
        # x + y*r is only an approximation of the embedding; s = 0 exactly
        # means the true valuation is at least the lift precision, which
        # exceeds v_p(norm): the other conjugate carries the valuation.
        return qval(e.norm(), p) - x_plus_yr_valuation(e.conj(), r, p)
    return qval(s, p)


def ideal_prime_valuation(ideal: QfIdeal, p: int, which: int = 0) -> int:
    vals = [element_prime_valuation(e, p, which) for e in ideal.basis_elements() if not e.is_zero()]
    return min(vals)


def factor_ideal(x: QfIdeal) -> list[tuple[QfIdeal, int]]:
    """Prime factorization of a fractional ideal.  The product of the
    returned prime powers equals x exactly (verified)."""
    field = x.field
    n = x.norm()
    if n == 0:
        raise QuadFieldError("zero ideal")
    # support: primes of the integral part's norm and of the denominator
    # (the norm of x itself can hide cancelling conjugate factors)
    det_num = abs(x.num[0][0] * x.num[1][1] - x.num[0][1] * x.num[1][0])
    support = sorted(set(factorint(det_num).keys()) | set(factorint(x.den).keys()))
    factors: list[tuple[QfIdeal, int]] = []
    for p in support:
        primes = primes_above(field, p)
        for which, pr in enumerate(primes):
            v = ideal_prime_valuation(x, p, which)
            if v != 0:
                factors.append((pr, v))
    # verification round-trip
    acc = QfIdeal.unit_ideal(field)
    for pr, e in factors:
        acc = acc * pr**e
    if acc != x:
        raise QuadFieldError("factorization verification failed")
    return factors


# ---------------------------------------------------------------------------
# Units


def fundamental_unit(field: QuadField) -> QuadElem:
    """Fundamental unit (> 1 under the first embedding) of the maximal order
    of a real quadratic field, by the continued fraction of a reduced
    quadratic irrational of discriminant disc."""
    if not field.is_real:
        raise QuadFieldError("imaginary fields have no fundamental unit")
    disc = field.disc
    s = isqrt(disc)
    # reduced start: alpha0 = (P0 + sqrt(disc)) / 2 with P0 < sqrt(disc) < P0 + 2
    P0 = s if (s % 2 == disc % 2) else s - 1
    Q0 = 2
    P, Q = P0, Q0
    b_prev, b_cur = 1, 0  # B_{-2}, B_{-1}
    l = 0
    while True:
        q = (P + s) // Q
        b_prev, b_cur = b_cur, q * b_cur + b_prev
        P = q * Q - P
        Q = (disc - P * P) // Q
        l += 1
        if (P, Q) == (P0, Q0):
            break
        if l > 10**7:
            raise ResourceError("continued fraction period too long")
    # unit = B_{l-1} * alpha0 + B_{l-2}
    Bl1, Bl2 = b_cur, b_prev
    x = Fraction(Bl1 * (P0 - disc), 2) + Bl2
    u = QuadElem(field, x, Fraction(Bl1))
    assert u.is_unit(), "continued fraction did not produce a unit"
    if u.sign_at(0) < 0:
        u = -u
    if abs_embedding_less_than_one(u):
        u = u.inv()
    return u


def abs_embedding_less_than_one(u: QuadElem) -> bool:
    """|sigma_0(u)| < 1, exactly."""
    d = u - 1
    dn = u + 1
    s_pos = (u.sign_at(0) > 0)
    if s_pos:
        return d.sign_at(0) < 0
    return dn.sign_at(0) > 0


def torsion_units(field: QuadField) -> list[QuadElem]:
    """Roots of unity in the maximal order."""
    one = field.one()
    if field.is_real:
        return [one, -one]
    if field.D == -1:
        i = field.sqrtD()
        return [one, i, -one, -i]
    if field.D == -3:
        # zeta6 = (1 + sqrt(-3)) / 2
        z = (field.one() + field.sqrtD()) / 2
        return [z**k for k in range(6)]
    return [one, -one]


def unit_group_absorb(field: QuadField, u: QuadElem) -> tuple[int, int]:
    """Write the unit u as (+-1) * eps^k for the fundamental unit eps of a
    real field; returns (sign, k)."""
    if not u.is_unit():
        raise QuadFieldError(f"{u} is not a unit")
    eps = fundamental_unit(field)
    k = 0
    v = u if u.sign_at(0) > 0 else -u
    sign = 1 if u.sign_at(0) > 0 else -1
    guard = 0
    while not (v - 1).is_zero():
        if abs_embedding_less_than_one(v):
            v = v * eps
            k -= 1
        else:
            v = v * eps.inv()
            k += 1
        guard += 1
        if guard > 10**5:
            raise ResourceError("unit absorption did not terminate")
    return sign, k


# ---------------------------------------------------------------------------
# Class group


@dataclass(frozen=True)
class ClassGroupTable:
    field: QuadField
    representatives: tuple[QfIdeal, ...]

    @property
    def h(self) -> int:
        return len(self.representatives)


def minkowski_bound(field: QuadField) -> int:
    d = abs(field.disc)
    if field.is_real:
        return isqrt(d) // 2 + 1
    # (2/pi) sqrt(d) < 0.6367 sqrt(d); ceil with a safe rational bound 2/3
    return (2 * isqrt(d)) // 3 + 1


def _generator_in_ideal(ideal: QfIdeal, eps: QuadElem | None) -> QuadElem | None:
    """An element of the integral ideal with |Nm| = Nm(ideal), or None."""
    field = ideal.field
    N = ideal.norm()
    assert ideal.is_integral() and N.denominator == 1
    N = N.numerator
    t, nw = field.w_trace, field.w_norm

    def try_xy(y: int, target: int) -> QuadElem | None:
        # x^2 + t*x*y + nw*y^2 = target, solve for integer x
        A = 1
        B = t * y
        C = nw * y * y - target
        disc_q = B * B - 4 * A * C
        if disc_q < 0:
            return None
        r = isqrt(disc_q)
        if r * r != disc_q:
            return None
        for sgn in (1, -1):
            num = -B + sgn * r
            if num % 2 == 0:
                x = num // 2
                cand = QuadElem(field, Fraction(x), Fraction(y))
                if ideal.contains(cand):
                    return cand
        return None

    if field.is_real:
        assert eps is not None
        # bound both embeddings by sqrt(N) * eps (up to unit normalization)
        # |y| <= 2M / sqrt(disc) with M = sqrt(N)*eps_embedding
        # use integer overestimates
        eps_num = (2 * eps.x + eps.y * field.disc + eps.y * (isqrt(field.disc) + 1)) / 2
        M = (isqrt(N) + 1) * (eps_num + 1)
        ymax = int(2 * M) // isqrt(field.disc) + 1
        targets = (N, -N)
    else:
        ymax = 2 * isqrt(N // max(1, abs(field.disc) // 4)) + 2
        targets = (N,)
    for y in range(0, ymax + 1):
        for yy in ((y,) if y == 0 else (y, -y)):
            for target in targets:
                g = try_xy(yy, target)
                if g is not None:
                    return g
    return None


def is_principal(ideal: QfIdeal, eps: QuadElem | None = None) -> QuadElem | None:
    """A generator if the fractional ideal is principal, else None."""
    field = ideal.field
    if field.is_real and eps is None:
        eps = fundamental_unit(field)
    den = ideal.den
    integral = QfIdeal.from_rows(field, [list(r) for r in ideal.num], 1)
    g = _generator_in_ideal(integral, eps)
    if g is None:
        return None
    return g / den


def class_group(field: QuadField) -> ClassGroupTable:
    """Complete class-group table by enumeration below the Minkowski bound.

    Desk scale only: |disc| <= 10^6.
    """
    if abs(field.disc) > MAX_CLASS_GROUP_DISC:
        raise ResourceError(f"|disc| = {abs(field.disc)} exceeds the desk-scale bound")
    mb = minkowski_bound(field)
    eps = fundamental_unit(field) if field.is_real else None
    gen_primes: list[QfIdeal] = []
    for p in primerange(2, mb + 1):
        for pr in primes_above(field, p):
            if pr.norm() <= mb:
                gen_primes.append(pr)
    # close the set of ideals of norm <= mb under products
    ideals = {QfIdeal.unit_ideal(field)}
    frontier = list(ideals)
    while frontier:
        nxt = []
        for i in frontier:
            for pr in gen_primes:
                j = i * pr
                if j.norm() <= mb and j not in ideals:
                    ideals.add(j)
                    nxt.append(j)
        frontier = nxt
    reps: list[QfIdeal] = []
    for i in sorted(ideals, key=lambda j: (j.norm(), j.num)):
        if not any(is_principal(i * r.inv(), eps) is not None for r in reps):
            reps.append(i)
    return ClassGroupTable(field, tuple(reps))


def principalize(ideal: QfIdeal, table: ClassGroupTable) -> tuple[QuadElem | None, int]:
    """(generator, 0) when the class is trivial; otherwise (None, index of
    the class representative in the table)."""
    field = ideal.field
    eps = fundamental_unit(field) if field.is_real else None
    g = is_principal(ideal, eps)
    if g is not None:
        return normalize_generator(g), 0
    for idx, rep in enumerate(table.representatives):
        if idx == 0:
            continue
        if is_principal(ideal * rep.inv(), eps) is not None:
            return None, idx
    raise QuadFieldError("class not matched by the table")  # incomplete table


def normalize_generator(g: QuadElem) -> QuadElem:
    """Deterministic generator of (g): balance the archimedean embeddings by
    fundamental-unit powers (real case) and fix a sign convention."""
    field = g.field
    if not field.is_real:
        cands = [g * t for t in torsion_units(field)]
        return min(cands, key=lambda e: (e.x, e.y))
    eps = fundamental_unit(field)

    def height(e: QuadElem) -> Fraction:
        # max(|sigma_0|, |sigma_1|)^2 proxy: x-coordinate blowup is monotone
        return max(abs(2 * e.x + e.y * field.disc), abs(e.y) * field.disc)

    cur = g
    while True:
        up, down = cur * eps, cur * eps.inv()
        if height(up) < height(cur):
            cur = up
        elif height(down) < height(cur):
            cur = down
        else:
            break
    cands = [cur, -cur, cur * eps, -cur * eps]
    pos = [c for c in cands if c.sign_at(0) > 0]
    return min(pos, key=lambda e: (height(e), e.x, e.y))
