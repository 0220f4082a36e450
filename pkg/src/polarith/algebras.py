"""Semisimple Q-algebras with involution over concrete simple factors
(Q, quadratic field, quaternion algebra, matrix algebras over these),
dagger-stable orders, and norms with per-factor exponents.

Elements are tuples of per-factor components.  Component arithmetic is
dispatched through small ring descriptors so that matrix code is written
once.  All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import valuation
from .linalg import frac, inverse as qinverse, mat, poly_nth_root
from .quadfield import QuadElem, QuadField


class AlgebraError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Ring descriptors


class RationalRing:
    """Q, with the identity involution."""

    dim_q = 1

    def one(self):
        return Fraction(1)

    def zero(self):
        return Fraction(0)

    def is_zero(self, x):
        return x == 0

    def conj(self, x):
        return x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError
        return 1 / x

    def to_qcoords(self, x):
        return [frac(x)]

    def from_qcoords(self, coords):
        return coords[0]

    def trace_q(self, x):
        return frac(x)

    def as_rational(self, x):
        return frac(x)

    def is_rational(self, x):
        return True

    def __repr__(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, RationalRing)

    def __hash__(self):
        return hash("RationalRing")


@dataclass(frozen=True)
class QuadRing:
    """A quadratic field as a ring descriptor.  `conj` is field conjugation;
    callers that need the identity involution (symmetric forms over F) say
    so at the form level, not here."""

    field: QuadField

    dim_q = 2

    def one(self):
        return self.field.one()

    def zero(self):
        return self.field.zero()

    def is_zero(self, x):
        return x.is_zero()

    def conj(self, x):
        return x.conj()

    def inv(self, x):
        return x.inv()

    def to_qcoords(self, x):
        return [x.x, x.y]

    def from_qcoords(self, coords):
        return QuadElem(self.field, coords[0], coords[1])

    def trace_q(self, x):
        return x.trace()

    def as_rational(self, x):
        return x.as_rational()

    def is_rational(self, x):
        return x.is_rational()

    def coerce(self, c):
        if isinstance(c, (int, Fraction)):
            return self.field.from_rational(c)
        return c

    def __repr__(self):
        return f"Q(sqrt({self.field.D}))"


@dataclass(frozen=True)
class QuatElem:
    """Element c0 + c1 i + c2 j + c3 ij of a quaternion algebra; the
    coordinates live in the centre (Fraction or QuadElem)."""

    alg: "QuaternionRing"
    coords: tuple

    def __add__(self, other):
        other = self.alg.coerce(other)
        return QuatElem(self.alg, tuple(x + y for x, y in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return QuatElem(self.alg, tuple(-x for x in self.coords))

    def __sub__(self, other):
        return self + (-self.alg.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self.alg.coerce(other)
        a, b = self.alg.a, self.alg.b
        x0, x1, x2, x3 = self.coords
        y0, y1, y2, y3 = other.coords
        return QuatElem(
            self.alg,
            (
                x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
                x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
            ),
        )

    def __rmul__(self, other):
        return self.alg.coerce(other) * self

    def __eq__(self, other):
        if not isinstance(other, QuatElem):
            other = self.alg.coerce(other)
        return self.alg == other.alg and self.coords == other.coords

    def __hash__(self):
        return hash((self.alg, self.coords))

    def conj(self):
        x0, x1, x2, x3 = self.coords
        return QuatElem(self.alg, (x0, -x1, -x2, -x3))

    def nrd(self):
        return (self * self.conj()).coords[0]

    def trd(self):
        return self.coords[0] * 2

    def __repr__(self):
        return f"QuatElem{self.coords}"


@dataclass(frozen=True)
class QuaternionRing:
    """Quaternion algebra (a, b / centre) with i^2 = a, j^2 = b, ij = -ji.

    `conj` is the canonical involution."""

    center: object  # RationalRing or QuadRing
    a: object
    b: object

    def __post_init__(self):
        if self.center.is_zero(self.a) or self.center.is_zero(self.b):
            raise AlgebraError("structure constants must be nonzero")

    @property
    def dim_q(self):
        return 4 * self.center.dim_q

    def coerce(self, x):
        if isinstance(x, QuatElem):
            return x
        if isinstance(x, (int, Fraction)):
            if self.center.dim_q == 1:
                x = frac(x)
            else:
                x = self.center.field.from_rational(x)
        return QuatElem(self, (x, self._cz(), self._cz(), self._cz()))

    def _cz(self):
        return self.center.zero()

    def one(self):
        return self.coerce(1)

    def zero(self):
        return QuatElem(self, (self._cz(), self._cz(), self._cz(), self._cz()))

    def i(self):
        return QuatElem(self, (self._cz(), self.center.one(), self._cz(), self._cz()))

    def j(self):
        return QuatElem(self, (self._cz(), self._cz(), self.center.one(), self._cz()))

    def k(self):
        return QuatElem(self, (self._cz(), self._cz(), self._cz(), self.center.one()))

    def is_zero(self, x):
        return all(self.center.is_zero(c) for c in x.coords)

    def conj(self, x):
        return x.conj()

    def inv(self, x):
        n = x.nrd()
        if self.center.is_zero(n):
            raise ZeroDivisionError("non-invertible quaternion")
        ninv = self.center.inv(n)
        xc = x.conj()
        return QuatElem(self, tuple(c * ninv for c in xc.coords))

    def to_qcoords(self, x):
        out = []
        for c in x.coords:
            out.extend(self.center.to_qcoords(c))
        return out

    def from_qcoords(self, coords):
        d = self.center.dim_q
        comps = tuple(self.center.from_qcoords(list(coords[i * d : (i + 1) * d])) for i in range(4))
        return QuatElem(self, comps)

    def trace_q(self, x):
        # left multiplication on the algebra has trace 4*c0 over the centre
        return self.center.trace_q(x.coords[0]) * 4

    def is_rational(self, x):
        return (
            all(self.center.is_zero(c) for c in x.coords[1:])
            and self.center.is_rational(x.coords[0])
        )

    def as_rational(self, x):
        if not self.is_rational(x):
            raise AlgebraError(f"{x} is not a rational scalar")
        return self.center.as_rational(x.coords[0])

    def basis(self):
        return [self.one(), self.i(), self.j(), self.k()]

    def __repr__(self):
        return f"({self.a},{self.b} / {self.center})"


# ---------------------------------------------------------------------------
# Generic matrices over a ring descriptor


def rmat_mul(ring, A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = ring.zero()
            for t in range(k):
                s = s + A[i][t] * B[t][j]
            row.append(s)
        out.append(row)
    return out


def rmat_transpose(A):
    return [list(col) for col in zip(*A)]


def rmat_conj_transpose(ring, A):
    return [[ring.conj(x) for x in col] for col in zip(*A)]


def rmat_identity(ring, n):
    return [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]


def rmat_add(A, B):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def rmat_sub(A, B):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def rmat_scale(c, A):
    return [[c * x for x in row] for row in A]


def rmat_eq(ring, A, B):
    return all(
        ring.is_zero(x - y) for ra, rb in zip(A, B) for x, y in zip(ra, rb)
    )


def rmat_det(ring, A):
    """Determinant over a commutative ring descriptor with division."""
    n = len(A)
    m = [row[:] for row in A]
    sign = 1
    acc = ring.one()
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not ring.is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            return ring.zero()
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        p = m[col][col]
        acc = acc * p
        pinv = ring.inv(p)
        for r in range(col + 1, n):
            if not ring.is_zero(m[r][col]):
                f = m[r][col] * pinv
                for c in range(col, n):
                    m[r][c] = m[r][c] - f * m[col][c]
    if sign < 0:
        acc = -acc
    return acc


def rmat_inv(ring, A):
    """Inverse over a ring descriptor; works for commutative bases and for
    quaternion bases (by pivoting on invertible entries)."""
    n = len(A)
    m = [row[:] + rmat_identity(ring, n)[i] for i, row in enumerate(A)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            x = m[r][col]
            if not ring.is_zero(x):
                try:
                    ring.inv(x)
                except ZeroDivisionError:
                    continue
                piv = r
                break
        if piv is None:
            raise ZeroDivisionError("matrix not invertible by pivoting")
        m[col], m[piv] = m[piv], m[col]
        pinv = ring.inv(m[col][col])
        m[col] = [pinv * x for x in m[col]]
        for r in range(n):
            if r != col and not ring.is_zero(m[r][col]):
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


# ---------------------------------------------------------------------------
# Simple factors


INVOLUTION_KINDS = ("identity", "conjugation", "canonical", "conjugate_transpose")


@dataclass(frozen=True)
class SimpleFactor:
    """One simple factor: a field (Q or quadratic), a quaternion algebra, or
    a matrix algebra over one of these, together with its involution.

    matrix_size = 0 means "not a matrix factor": elements are ring elements.
    For matrix factors, elements are matrix_size x matrix_size lists over
    the base ring and the involution is x -> z^{-1} x^{*T} z.
    """

    ring: object
    matrix_size: int = 0
    involution: str = "identity"
    z: tuple | None = None  # conjugating matrix, rows of tuples, matrix factors only

    def __post_init__(self):
        if self.involution not in INVOLUTION_KINDS:
            raise AlgebraError(f"unknown involution {self.involution}")
        if self.matrix_size == 0:
            if self.involution == "identity" and isinstance(self.ring, QuaternionRing):
                raise AlgebraError("identity is not an involution of a quaternion algebra")
            if self.involution == "conjugation" and not isinstance(self.ring, QuadRing):
                raise AlgebraError("conjugation needs a quadratic field")
            if self.involution == "canonical" and not isinstance(self.ring, QuaternionRing):
                raise AlgebraError("canonical involution needs a quaternion algebra")
            if self.involution == "conjugate_transpose":
                raise AlgebraError("conjugate_transpose needs a matrix factor")
        else:
            if self.involution != "conjugate_transpose":
                raise AlgebraError("matrix factors use conjugate_transpose involutions")
            if self.z is None:
                object.__setattr__(self, "z", _freeze(rmat_identity(self.ring, self.matrix_size)))
            zm = self.z_matrix()
            zct = rmat_conj_transpose(self.ring, zm)
            zneg = [[-x for x in row] for row in zm]
            if not (rmat_eq(self.ring, zct, zm) or rmat_eq(self.ring, zct, zneg)):
                raise AlgebraError("conjugator must be symmetric or skew under the base involution")
            rmat_inv(self.ring, zm)  # must be invertible

    def z_matrix(self):
        return [list(r) for r in self.z] if self.z is not None else None

    def _z_is_identity(self) -> bool:
        cached = getattr(self, "_z_id_flag", None)
        if cached is None:
            zm = self.z_matrix()
            cached = rmat_eq(self.ring, zm, rmat_identity(self.ring, self.matrix_size))
            object.__setattr__(self, "_z_id_flag", cached)
        return cached

    def _z_cached(self):
        cached = getattr(self, "_z_pair", None)
        if cached is None:
            zm = self.z_matrix()
            cached = (zm, rmat_inv(self.ring, zm))
            object.__setattr__(self, "_z_pair", cached)
        return cached

    # --- element plumbing -------------------------------------------------
    @property
    def dim_q(self) -> int:
        n = max(self.matrix_size, 1)
        return n * n * self.ring.dim_q

    @property
    def center_ring(self):
        if isinstance(self.ring, QuaternionRing):
            return self.ring.center
        return self.ring

    @property
    def reduced_degree(self) -> int:
        """Degree over the centre: n for M_n(field), 2n for M_n(quaternion)."""
        n = max(self.matrix_size, 1)
        return n * (2 if isinstance(self.ring, QuaternionRing) else 1)

    @property
    def rank_contribution(self) -> int:
        """Degree of Nm_{F/Q} o Nrd restricted to Q: [F:Q] * reduced_degree."""
        return self.center_ring.dim_q * self.reduced_degree

    def one(self):
        if self.matrix_size:
            return rmat_identity(self.ring, self.matrix_size)
        return self.ring.one()

    def zero(self):
        if self.matrix_size:
            n = self.matrix_size
            return [[self.ring.zero() for _ in range(n)] for _ in range(n)]
        return self.ring.zero()

    def add(self, x, y):
        if self.matrix_size:
            return rmat_add(x, y)
        return x + y

    def sub(self, x, y):
        if self.matrix_size:
            return rmat_sub(x, y)
        return x - y

    def mul(self, x, y):
        if self.matrix_size:
            return rmat_mul(self.ring, x, y)
        return x * y

    def eq(self, x, y):
        if self.matrix_size:
            return rmat_eq(self.ring, x, y)
        return self.ring.is_zero(x - y)

    def is_zero_elem(self, x):
        if self.matrix_size:
            return all(self.ring.is_zero(e) for row in x for e in row)
        return self.ring.is_zero(x)

    def scale(self, c: Fraction, x):
        if self.matrix_size:
            cc = _coerce_scalar(self.ring, c)
            return [[cc * e for e in row] for row in x]
        return _coerce_scalar_elem(self.ring, c, x)

    def involve(self, x):
        if self.matrix_size:
            xct = rmat_conj_transpose(self.ring, x)
            if self._z_is_identity():
                return xct
            zm, zinv = self._z_cached()
            return rmat_mul(self.ring, rmat_mul(self.ring, zinv, xct), zm)
        if self.involution == "identity":
            return x
        if self.involution == "conjugation":
            return x.conj()
        if self.involution == "canonical":
            return x.conj()
        raise AlgebraError("bad involution")

    def to_qcoords(self, x) -> list[Fraction]:
        if self.matrix_size:
            out = []
            for row in x:
                for e in row:
                    out.extend(self.ring.to_qcoords(e))
            return out
        return self.ring.to_qcoords(x)

    def from_qcoords(self, coords):
        if self.matrix_size:
            n = self.matrix_size
            d = self.ring.dim_q
            rows = []
            idx = 0
            for _ in range(n):
                row = []
                for _ in range(n):
                    row.append(self.ring.from_qcoords(list(coords[idx : idx + d])))
                    idx += d
                rows.append(row)
            return rows
        return self.ring.from_qcoords(list(coords))

    def basis(self):
        out = []
        dim = self.dim_q
        for i in range(dim):
            coords = [Fraction(0)] * dim
            coords[i] = Fraction(1)
            out.append(self.from_qcoords(coords))
        return out

    def inv_elem(self, x):
        if self.matrix_size:
            return rmat_inv(self.ring, x)
        return self.ring.inv(x)

    # --- norms -------------------------------------------------------------
    def nrd(self, x):
        """Reduced norm, valued in the centre."""
        if self.matrix_size == 0:
            if isinstance(self.ring, QuaternionRing):
                return x.nrd()
            return x
        if isinstance(self.ring, QuaternionRing):
            return self._nrd_quaternion_matrix(x)
        return rmat_det(self.ring, x)

    def _nrd_quaternion_matrix(self, x):
        """Reduced norm of M_n(B) for a quaternion algebra B, via the
        characteristic polynomial of left multiplication on the factor as a
        centre-module: that polynomial is the (2n)-th power of the reduced
        characteristic polynomial."""
        center = self.center_ring
        n = self.matrix_size
        dimc = 4 * n * n
        basis = self.basis_over_center()
        cols = []
        for e in basis:
            xe = self.mul(x, e)
            cols.append(self._center_coords(xe))
        # columns are images; build the matrix of left multiplication
        L = [[cols[j][i] for j in range(dimc)] for i in range(dimc)]
        cp = _ring_charpoly(center, L)
        red = poly_nth_root(cp, 2 * n, _center_one(center), _center_zero(center))
        const = red[0]
        sign = 1 if (2 * n) % 2 == 0 else -1
        return const if sign == 1 else -const

    def basis_over_center(self):
        """Basis of the factor as a centre-module (matrix units x 1,i,j,k)."""
        assert isinstance(self.ring, QuaternionRing)
        n = self.matrix_size
        qb = self.ring.basis()
        out = []
        for i in range(n):
            for j in range(n):
                for q in qb:
                    m = self.zero()
                    m[i][j] = q
                    out.append(m)
        return out

    def _center_coords(self, x):
        """Coordinates of a quaternion-matrix element over the centre."""
        out = []
        for row in x:
            for e in row:
                out.extend(e.coords)
        return out

    def center_norm_to_q(self, c) -> Fraction:
        """Nm_{F/Q} of a centre element."""
        if isinstance(self.center_ring, QuadRing):
            return c.norm()
        return frac(c)

    def __repr__(self):
        if self.matrix_size:
            return f"M_{self.matrix_size}({self.ring})"
        return f"{self.ring}[{self.involution}]"


def _freeze(m):
    return tuple(tuple(row) for row in m)


def _coerce_scalar(ring, c: Fraction):
    if isinstance(ring, RationalRing):
        return frac(c)
    if isinstance(ring, QuadRing):
        return ring.field.from_rational(c)
    if isinstance(ring, QuaternionRing):
        return ring.coerce(c)
    raise AlgebraError("unknown ring")


def _coerce_scalar_elem(ring, c: Fraction, x):
    return _coerce_scalar(ring, c) * x


def _center_one(center):
    return center.one() if not isinstance(center, RationalRing) else Fraction(1)


def _center_zero(center):
    return center.zero() if not isinstance(center, RationalRing) else Fraction(0)


def _ring_charpoly(center, L):
    """Faddeev-LeVerrier characteristic polynomial over a commutative ring
    descriptor (needs division by integers only)."""
    n = len(L)
    one, zero = _center_one(center), _center_zero(center)
    coeffs = [zero] * (n + 1)
    coeffs[n] = one

    def mmul(A, B):
        return [
            [sum((A[i][t] * B[t][j] for t in range(n)), zero) for j in range(n)]
            for i in range(n)
        ]

    M = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        M = mmul(L, M)
        tr = sum((M[i][i] for i in range(n)), zero)
        c = -(tr / k)
        coeffs[n - k] = c
        for i in range(n):
            M[i][i] = M[i][i] + c
    return coeffs


# ---------------------------------------------------------------------------
# The algebra with involution


@dataclass(frozen=True)
class AlgebraWithInvolution:
    factors: tuple[SimpleFactor, ...]
    swap_pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        seen = set()
        for i, j in self.swap_pairs:
            if i == j or i in seen or j in seen:
                raise AlgebraError("swap pairs must be disjoint and non-trivial")
            seen.update((i, j))
            fi, fj = self.factors[i], self.factors[j]
            if fi.matrix_size or fj.matrix_size or not isinstance(
                fi.ring, (RationalRing, QuadRing)
            ):
                raise AlgebraError("swap pairs are supported for etale (field) factors")
            if type(fi.ring) is not type(fj.ring):
                raise AlgebraError("swap pairs must join matching kinds")

    @property
    def swapped_indices(self) -> set[int]:
        out = set()
        for i, j in self.swap_pairs:
            out.update((i, j))
        return out

    @property
    def dim_q(self) -> int:
        return sum(f.dim_q for f in self.factors)

    def one(self):
        return tuple(f.one() for f in self.factors)

    def zero(self):
        return tuple(f.zero() for f in self.factors)

    def add(self, x, y):
        return tuple(f.add(a, b) for f, a, b in zip(self.factors, x, y))

    def sub(self, x, y):
        return tuple(f.sub(a, b) for f, a, b in zip(self.factors, x, y))

    def mul(self, x, y):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, x, y))

    def eq(self, x, y):
        return all(f.eq(a, b) for f, a, b in zip(self.factors, x, y))

    def scale(self, c: Fraction, x):
        return tuple(f.scale(c, a) for f, a in zip(self.factors, x))

    def inv(self, x):
        return tuple(f.inv_elem(a) for f, a in zip(self.factors, x))

    def involve(self, x):
        out = list(x)
        swapped = self.swapped_indices
        for idx, (f, a) in enumerate(zip(self.factors, x)):
            if idx not in swapped:
                out[idx] = f.involve(a)
        for i, j in self.swap_pairs:
            out[i], out[j] = x[j], x[i]
        return tuple(out)

    def to_qcoords(self, x) -> list[Fraction]:
        out = []
        for f, a in zip(self.factors, x):
            out.extend(f.to_qcoords(a))
        return out

    def from_qcoords(self, coords):
        out = []
        idx = 0
        for f in self.factors:
            out.append(f.from_qcoords(list(coords[idx : idx + f.dim_q])))
            idx += f.dim_q
        return tuple(out)

    def from_rational(self, c: Fraction):
        return self.scale(frac(c), self.one())

    def is_rational_scalar(self, x) -> Fraction | None:
        """The rational c with x = c * 1, or None."""
        c = None
        for f, a in zip(self.factors, x):
            if f.matrix_size:
                n = f.matrix_size
                diag = a[0][0]
                for i in range(n):
                    for j in range(n):
                        if i == j:
                            if not f.ring.is_zero(a[i][j] - diag):
                                return None
                        elif not f.ring.is_zero(a[i][j]):
                            return None
                if not f.ring.is_rational(diag):
                    return None
                cc = f.ring.as_rational(diag)
            else:
                if isinstance(f.ring, RationalRing):
                    cc = frac(a)
                else:
                    if not f.ring.is_rational(a):
                        return None
                    cc = f.ring.as_rational(a)
            if c is None:
                c = cc
            elif c != cc:
                return None
        return c

    def basis(self):
        out = []
        for idx, f in enumerate(self.factors):
            for e in f.basis():
                comp = list(self.zero())
                comp[idx] = e
                out.append(tuple(comp))
        return out

    def __repr__(self):
        return " x ".join(repr(f) for f in self.factors)


def apply_involution(algebra: AlgebraWithInvolution, x):
    """x -> x^dagger.  Anti-multiplicative of order 2 (tested)."""
    return algebra.involve(x)


@dataclass(frozen=True)
class NormSpec:
    """Exponents gamma_i per factor and the rank d of the norm.  A declared
    rank, when given, is checked against the one the gammas force."""

    algebra: AlgebraWithInvolution
    gammas: tuple[int, ...]
    declared_rank: int | None = None

    def __post_init__(self):
        if len(self.gammas) != len(self.algebra.factors):
            raise AlgebraError("one gamma per factor")
        if any(g < 1 for g in self.gammas):
            raise AlgebraError("gammas must be positive")
        for i, j in self.algebra.swap_pairs:
            if self.gammas[i] != self.gammas[j]:
                raise AlgebraError("dagger-compatibility requires equal gammas on swapped factors")
        if self.declared_rank is not None and self.declared_rank != self.rank_d:
            raise AlgebraError(
                f"declared rank {self.declared_rank} != "
                f"{self.rank_d} forced by the gammas"
            )

    @property
    def rank_d(self) -> int:
        return sum(g * f.rank_contribution for g, f in zip(self.gammas, self.algebra.factors))


def norm(algebra: AlgebraWithInvolution, x, spec: NormSpec) -> Fraction:
    """Nm_E(x) = prod_i |Nm_{F_i/Q}(Nrd(x_i))|^{gamma_i}."""
    if spec.algebra is not algebra and spec.algebra != algebra:
        raise AlgebraError("norm spec belongs to a different algebra")
    out = Fraction(1)
    for f, a, g in zip(algebra.factors, x, spec.gammas):
        nr = f.nrd(a)
        q = f.center_norm_to_q(nr)
        out *= abs(q) ** g
    return out


def local_norm(algebra: AlgebraWithInvolution, x, p: int, spec: NormSpec) -> Fraction:
    """Nm_{E_p}(x) = prod_i |Nm(Nrd(x_i))|_p^{-gamma_i}, a power of p."""
    out = Fraction(1)
    for f, a, g in zip(algebra.factors, x, spec.gammas):
        nr = f.nrd(a)
        q = f.center_norm_to_q(nr)
        if q == 0:
            raise AlgebraError("local norm of a non-invertible element")
        out *= Fraction(p) ** (g * valuation(q, p))
    return out


@dataclass(frozen=True)
class OrderR:
    """A dagger-stable order, given by a Z-basis.  Closure under
    multiplication, stability under the involution, presence of 1 and full
    rank are verified at construction."""

    algebra: AlgebraWithInvolution
    basis_elements: tuple

    def __post_init__(self):
        n = self.algebra.dim_q
        if len(self.basis_elements) != n:
            raise AlgebraError("order basis must have full rank")
        rows = [self.algebra.to_qcoords(b) for b in self.basis_elements]
        m = mat(rows)
        try:
            minv = qinverse(m)
        except ZeroDivisionError:
            raise AlgebraError("order basis is singular") from None
        object.__setattr__(self, "_minv", minv)
        if not self.contains(self.algebra.one()):
            raise AlgebraError("order must contain 1")
        for b in self.basis_elements:
            if not self.contains(self.algebra.involve(b)):
                raise AlgebraError("order is not dagger-stable")
        for b1 in self.basis_elements:
            for b2 in self.basis_elements:
                if not self.contains(self.algebra.mul(b1, b2)):
                    raise AlgebraError("order is not closed under multiplication")

    def basis_matrix_is_identity(self) -> bool:
        rows = [self.algebra.to_qcoords(b) for b in self.basis_elements]
        n = len(rows)
        return all(rows[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))

    def coordinates(self, x) -> list[Fraction]:
        coords = self.algebra.to_qcoords(x)
        minv = self._minv
        n = len(coords)
        return [sum((coords[i] * minv[i][j] for i in range(n)), Fraction(0)) for j in range(n)]

    def contains(self, x) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(x))

    def element_from_coordinates(self, coords):
        acc = self.algebra.zero()
        for c, b in zip(coords, self.basis_elements):
            acc = self.algebra.add(acc, self.algebra.scale(frac(c), b))
        return acc


def norm_times_inverse(order: OrderR, x, spec: NormSpec):
    """Nm_E(x) * x^{-1}, asserted to lie in the order."""
    algebra = order.algebra
    n = norm(algebra, x, spec)
    if n == 0:
        raise AlgebraError("element is not invertible")
    out = algebra.scale(n, algebra.inv(x))
    if not order.contains(out):
        raise AlgebraError("norm-times-inverse fell outside the order")
    return out


# ---------------------------------------------------------------------------
# Convenience constructors


def rational_algebra() -> AlgebraWithInvolution:
    return AlgebraWithInvolution((SimpleFactor(RationalRing()),))


def quadfield_algebra(field: QuadField, involution: str = "identity") -> AlgebraWithInvolution:
    return AlgebraWithInvolution((SimpleFactor(QuadRing(field), involution=involution),))


def matrix_algebra_q(n: int, z=None) -> AlgebraWithInvolution:
    zt = _freeze(mat(z)) if z is not None else None
    return AlgebraWithInvolution(
        (SimpleFactor(RationalRing(), matrix_size=n, involution="conjugate_transpose", z=zt),)
    )


def quaternion_algebra_q(a, b) -> AlgebraWithInvolution:
    ring = QuaternionRing(RationalRing(), frac(a), frac(b))
    return AlgebraWithInvolution((SimpleFactor(ring, involution="canonical"),))


def maximal_order_quadfield(algebra: AlgebraWithInvolution) -> OrderR:
    f = algebra.factors[0]
    assert isinstance(f.ring, QuadRing)
    field = f.ring.field
    return OrderR(algebra, (
        (field.one(),),
        (field.omega(),),
    ))


def matrix_order_z(algebra: AlgebraWithInvolution) -> OrderR:
    return OrderR(algebra, tuple(algebra.basis()))
