"""Gram-matrix forms and their classification: positivity, adjoint
involutions, invariant vectors, isometry decisions and the fourth-power
verifier.

Supported (kind, base) combinations:

  symmetric            over Q or a real quadratic field (identity entries)
  skew                 over Q
  hermitian            over an imaginary quadratic field (conjugation),
                       over a definite quaternion algebra (canonical
                       involution), or over the etale pair Q x Q (swap)
  quat-skew-hermitian  over a quaternion algebra over Q (canonical)

Isometry over Q (symmetric), over imaginary quadratic fields (hermitian),
for skew forms and for etale-pair forms is decided by complete invariants.
For quaternionic skew-hermitian forms only the local invariants (dimension
and reduced-norm determinant class) are compared and the decision carries
an explicit completeness flag: the global isometry class is genuinely not
determined by localizations.  Symmetric forms over a real quadratic field
compare determinant and signatures only (no Hasse data over the field) and
are flagged the same way.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .algebras import (
    QuadRing,
    QuaternionRing,
    RationalRing,
    rmat_conj_transpose,
    rmat_eq,
    rmat_identity,
    rmat_inv,
    rmat_mul,
)
from .exact import (
    LocalPlace,
    SquareClassQ,
    hasse_invariant,
    hilbert_symbol,
    square_class,
    support_places,
)
from .linalg import frac
from .quadfield import QuadElem, QuadField, is_square_in_field


class FormError(ValueError):
    pass


KINDS = ("symmetric", "skew", "hermitian", "quat-skew-hermitian")


# ---------------------------------------------------------------------------
# The etale pair Q x Q with the swap involution


@dataclass(frozen=True)
class PairElem:
    x: Fraction
    y: Fraction

    def __add__(self, other):
        other = _pair(other)
        return PairElem(self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __neg__(self):
        return PairElem(-self.x, -self.y)

    def __sub__(self, other):
        return self + (-_pair(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _pair(other)
        return PairElem(self.x * other.x, self.y * other.y)

    __rmul__ = __mul__

    def swap(self):
        return PairElem(self.y, self.x)


def _pair(v) -> PairElem:
    if isinstance(v, PairElem):
        return v
    return PairElem(frac(v), frac(v))


class EtalePairRing:
    """Q x Q with the swap involution."""

    dim_q = 2

    def one(self):
        return PairElem(Fraction(1), Fraction(1))

    def zero(self):
        return PairElem(Fraction(0), Fraction(0))

    def is_zero(self, v):
        return v.x == 0 and v.y == 0

    def conj(self, v):
        return v.swap()

    def inv(self, v):
        if v.x == 0 or v.y == 0:
            raise ZeroDivisionError
        return PairElem(1 / v.x, 1 / v.y)

    def to_qcoords(self, v):
        return [v.x, v.y]

    def from_qcoords(self, coords):
        return PairElem(coords[0], coords[1])

    def trace_q(self, v):
        return v.x + v.y

    def is_rational(self, v):
        return v.x == v.y

    def as_rational(self, v):
        if not self.is_rational(v):
            raise FormError("not a scalar of the pair ring")
        return v.x

    def __eq__(self, other):
        return isinstance(other, EtalePairRing)

    def __hash__(self):
        return hash("EtalePairRing")

    def __repr__(self):
        return "QxQ"


# ---------------------------------------------------------------------------
# GramForm


def _entry_conj(kind: str, ring, x):
    """The entrywise involution used by a given form kind."""
    if kind in ("symmetric", "skew"):
        return x
    return ring.conj(x)


@dataclass
class GramForm:
    """A form given by its Gram matrix over a supported base.

    Column convention: psi(v, w) = sum_i,j iota(v_i) G_ij w_j, so an
    endomorphism u transforms the Gram matrix as u^{iota T} G u.
    """

    kind: str
    ring: object
    gram: list

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FormError(f"unknown form kind {self.kind}")
        n = len(self.gram)
        if any(len(row) != n for row in self.gram):
            raise FormError("gram matrix must be square")
        self._validate_base()
        sign = -1 if self.kind in ("skew", "quat-skew-hermitian") else 1
        for i in range(n):
            for j in range(n):
                lhs = _entry_conj(self.kind, self.ring, self.gram[j][i])
                rhs = self.gram[i][j] if sign == 1 else -self.gram[i][j]
                if not self.ring.is_zero(lhs - rhs):
                    raise FormError("gram matrix does not match the declared kind")

    def _validate_base(self):
        r = self.ring
        if self.kind == "symmetric":
            if isinstance(r, RationalRing):
                return
            if isinstance(r, QuadRing) and r.field.is_real:
                return
            raise FormError("symmetric forms live over Q or a real quadratic field")
        if self.kind == "skew":
            if isinstance(r, RationalRing):
                return
            raise FormError("skew forms live over Q")
        if self.kind == "hermitian":
            if isinstance(r, QuadRing):
                if r.field.is_real:
                    raise FormError(
                        "hermitian forms with conjugation need an imaginary "
                        "quadratic field (the CM case); real quadratic bases "
                        "carry the identity involution and symmetric forms"
                    )
                return
            if isinstance(r, QuaternionRing):
                if not isinstance(r.center, RationalRing):
                    raise FormError("quaternion bases are supported over Q")
                if not (r.center.as_rational(r.a) < 0 and r.center.as_rational(r.b) < 0):
                    raise FormError(
                        "hermitian forms over a quaternion base need a "
                        "definite algebra (canonical involution positive)"
                    )
                return
            if isinstance(r, EtalePairRing):
                return
            raise FormError("unsupported hermitian base")
        if self.kind == "quat-skew-hermitian":
            if isinstance(r, QuaternionRing) and isinstance(r.center, RationalRing):
                return
            raise FormError("quat-skew-hermitian forms live over a quaternion algebra over Q")

    @property
    def dim(self) -> int:
        return len(self.gram)

    def entry_conj(self, x):
        return _entry_conj(self.kind, self.ring, x)

    def evaluate(self, v: list, w: list):
        s = self.ring.zero()
        for i in range(self.dim):
            for j in range(self.dim):
                s = s + self.entry_conj(v[i]) * self.gram[i][j] * w[j]
        return s

    def transform(self, u: list) -> "GramForm":
        """The form with Gram u^{iota T} G u (u columns = new basis)."""
        uct = [[self.entry_conj(u[j][i]) for j in range(self.dim)] for i in range(self.dim)]
        g = rmat_mul(self.ring, rmat_mul(self.ring, uct, self.gram), u)
        return GramForm(self.kind, self.ring, g)

    def is_nonsingular(self) -> bool:
        try:
            rmat_inv(self.ring, [row[:] for row in self.gram])
            return True
        except ZeroDivisionError:
            return False

    def direct_sum(self, other: "GramForm") -> "GramForm":
        if self.kind != other.kind or self.ring != other.ring:
            raise FormError("direct sum needs matching kind and base")
        n, m = self.dim, other.dim
        g = [[self.ring.zero() for _ in range(n + m)] for _ in range(n + m)]
        for i in range(n):
            for j in range(n):
                g[i][j] = self.gram[i][j]
        for i in range(m):
            for j in range(m):
                g[n + i][n + j] = other.gram[i][j]
        return GramForm(self.kind, self.ring, g)

    def repeat(self, k: int) -> "GramForm":
        out = self
        for _ in range(k - 1):
            out = out.direct_sum(self)
        return out

    def scale(self, c) -> "GramForm":
        """Multiply the form by a central involution-fixed scalar."""
        return GramForm(self.kind, self.ring, [[c * x for x in row] for row in self.gram])


def symmetric_form_q(entries) -> GramForm:
    return GramForm("symmetric", RationalRing(), [[frac(x) for x in row] for row in entries])


def diagonal_form_q(diag, kind: str = "symmetric") -> GramForm:
    n = len(diag)
    g = [[frac(diag[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    return GramForm(kind, RationalRing(), g)


# ---------------------------------------------------------------------------
# Positivity


def trace_gram(f: GramForm) -> list[list[Fraction]]:
    """The rational Gram matrix of Tr(psi(v, v); D) on the Q-vector space
    underlying the module, via the regular representation of the base."""
    ring = f.ring
    d = ring.dim_q
    n = f.dim
    basis = [ring.from_qcoords([Fraction(int(i == t)) for i in range(d)]) for t in range(d)]
    big = [[Fraction(0)] * (n * d) for _ in range(n * d)]
    for i in range(n):
        for j in range(n):
            gij = f.gram[i][j]
            for s in range(d):
                for u in range(d):
                    val = f.entry_conj(basis[s]) * gij * basis[u]
                    big[i * d + s][j * d + u] = ring.trace_q(val)
    return big


def _leading_minors_positive(m: list[list[Fraction]]) -> bool:
    """Sylvester test by exact LDL pivots."""
    n = len(m)
    a = [row[:] for row in m]
    for k in range(n):
        if a[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            if a[i][k] != 0:
                fct = a[i][k] / a[k][k]
                for j in range(k, n):
                    a[i][j] -= fct * a[k][j]
    return True


def is_positive_definite(f: GramForm) -> bool:
    """Positivity of the trace form Tr(psi(v, v); D).  Skew kinds return
    False with a warning: their trace form vanishes identically."""
    if f.kind in ("skew", "quat-skew-hermitian"):
        warnings.warn("a skew-Hermitian form can never be positive definite", stacklevel=2)
        return False
    return _leading_minors_positive(trace_gram(f))


# ---------------------------------------------------------------------------
# Diagonalization


def diagonalize(f: GramForm) -> tuple[list, list]:
    """(diag, u) with u^{iota T} G u diagonal.  Not defined for skew kinds."""
    if f.kind == "skew":
        raise FormError("skew forms do not diagonalize")
    ring = f.ring
    n = f.dim
    g = [row[:] for row in f.gram]
    u = rmat_identity(ring, n)

    def col_op(target, source, c):
        # v_target += v_source * c
        for r in range(n):
            g[r][target] = g[r][target] + g[r][source] * c
        for r in range(n):
            gr = _entry_conj(f.kind, ring, c)
            g[target][r] = g[target][r] + gr * g[source][r]
        for r in range(n):
            u[r][target] = u[r][target] + u[r][source] * c

    def col_swap(i, j):
        for r in range(n):
            g[r][i], g[r][j] = g[r][j], g[r][i]
        g[i], g[j] = g[j], g[i]
        for r in range(n):
            u[r][i], u[r][j] = u[r][j], u[r][i]

    base_units = [ring.from_qcoords([Fraction(int(t == s)) for t in range(ring.dim_q)]) for s in range(ring.dim_q)]
    for k in range(n):
        if ring.is_zero(g[k][k]):
            piv = None
            for i in range(k, n):
                if not ring.is_zero(g[i][i]):
                    piv = i
                    break
            if piv is not None:
                col_swap(k, piv)
            else:
                found = False
                for i in range(k, n):
                    for j in range(k, n):
                        if i != j and not ring.is_zero(g[i][j]):
                            for lam in base_units:
                                probe = _entry_conj(f.kind, ring, lam) * g[j][i] + g[i][j] * lam
                                if not ring.is_zero(probe):
                                    col_op(i, j, lam)
                                    found = True
                                    break
                            if found:
                                break
                    if found:
                        break
                if not found:
                    raise FormError("singular form: cannot diagonalize")
                if ring.is_zero(g[k][k]):
                    piv = next(i for i in range(k, n) if not ring.is_zero(g[i][i]))
                    col_swap(k, piv)
        pivot_inv = ring.inv(g[k][k])
        for j in range(k + 1, n):
            if not ring.is_zero(g[k][j]):
                col_op(j, k, -(pivot_inv * g[k][j]))
    diag = [g[i][i] for i in range(n)]
    return diag, u


# ---------------------------------------------------------------------------
# Adjoint involutions


@dataclass
class MatrixInvolution:
    """The involution a -> z^{-1} a^{iota T} z of M_n(base), where iota is
    the base involution attached to the form kind."""

    kind: str
    ring: object
    n: int
    z: list

    def apply(self, a: list) -> list:
        act = [[_entry_conj(self.kind, self.ring, a[j][i]) for j in range(self.n)] for i in range(self.n)]
        zinv = rmat_inv(self.ring, [row[:] for row in self.z])
        return rmat_mul(self.ring, rmat_mul(self.ring, zinv, act), self.z)

    def same_as(self, other: "MatrixInvolution") -> bool:
        """Equality of involutions: conjugators agree up to a central
        involution-fixed scalar."""
        if self.kind != other.kind or self.ring != other.ring or self.n != other.n:
            return False
        zinv = rmat_inv(self.ring, [row[:] for row in self.z])
        m = rmat_mul(self.ring, zinv, other.z)
        # m must be a central iota-fixed scalar matrix
        diag = m[0][0]
        for i in range(self.n):
            for j in range(self.n):
                if i == j:
                    if not self.ring.is_zero(m[i][j] - diag):
                        return False
                elif not self.ring.is_zero(m[i][j]):
                    return False
        if isinstance(self.ring, QuaternionRing):
            if not self.ring.is_rational(diag):
                return False
        fixed = _entry_conj(self.kind, self.ring, diag)
        return self.ring.is_zero(fixed - diag)


def adjoint_involution(f: GramForm) -> MatrixInvolution:
    """The adjoint involution a -> G^{-1} a^{iota T} G of the form."""
    if not f.is_nonsingular():
        raise FormError("singular form has no adjoint involution")
    return MatrixInvolution(f.kind, f.ring, f.dim, [row[:] for row in f.gram])


def involution_from_callable(fn, kind: str, ring, n: int) -> MatrixInvolution:
    """Recover the conjugator z of an involution given as a callable, by
    solving the linear system z * fn(a) = a^{iota T} * z over the matrix
    units."""
    d = ring.dim_q
    unknowns = n * n * d

    def z_from_coords(coords):
        m = []
        idx = 0
        for _ in range(n):
            row = []
            for _ in range(n):
                row.append(ring.from_qcoords([coords[idx + t] for t in range(d)]))
                idx += d
            m.append(row)
        return m

    basis_elems = []
    for i in range(n):
        for j in range(n):
            for t in range(d):
                e = [[ring.zero()] * n for _ in range(n)]
                e[i][j] = ring.from_qcoords([Fraction(int(s == t)) for s in range(d)])
                basis_elems.append(e)
    z_units = []
    for k in range(unknowns):
        coords = [Fraction(0)] * unknowns
        coords[k] = Fraction(1)
        z_units.append(z_from_coords(coords))
    system: list[list[Fraction]] = []
    for a in basis_elems:
        fa = fn(a)
        act = [[_entry_conj(kind, ring, a[j][i]) for j in range(n)] for i in range(n)]
        blocks = []
        for zk in z_units:
            lhs = rmat_mul(ring, zk, fa)
            rhs = rmat_mul(ring, act, zk)
            col = []
            for i in range(n):
                for j in range(n):
                    col.extend(ring.to_qcoords(lhs[i][j] - rhs[i][j]))
            blocks.append(col)
        for r in range(len(blocks[0])):
            system.append([blocks[k][r] for k in range(unknowns)])
    from .linalg import nullspace

    null = nullspace(system)
    if not null:
        raise FormError("callable is not an adjoint involution of a form")
    for vec in null:
        z = z_from_coords(vec)
        zct = rmat_conj_transpose_kind(kind, ring, z)
        sym = [[(z[i][j] + zct[i][j]) / 2 for j in range(n)] for i in range(n)]
        skw = [[(z[i][j] - zct[i][j]) / 2 for j in range(n)] for i in range(n)]
        for cand in (sym, skw):
            if all(ring.is_zero(x) for row in cand for x in row):
                continue
            try:
                rmat_inv(ring, [row[:] for row in cand])
            except ZeroDivisionError:
                continue
            inv = MatrixInvolution(kind, ring, n, cand)
            ok = True
            for a in basis_elems[: min(len(basis_elems), 8)]:
                if not rmat_eq(ring, inv.apply(a), fn(a)):
                    ok = False
                    break
            if ok:
                return inv
    raise FormError("no invertible symmetric or skew conjugator found")


def rmat_conj_transpose_kind(kind, ring, a):
    n = len(a)
    return [[_entry_conj(kind, ring, a[j][i]) for j in range(n)] for i in range(n)]


def is_positive_involution(inv: MatrixInvolution) -> bool:
    """Exact test: the trace form x -> Tr(x x^dagger) on M_n(base) is
    positive definite."""
    ring = inv.ring
    n = inv.n
    d = ring.dim_q
    dim = n * n * d

    def basis_elem(k):
        coords = [Fraction(0)] * (n * n * d)
        coords[k] = Fraction(1)
        m = []
        idx = 0
        for _ in range(n):
            row = []
            for _ in range(n):
                row.append(ring.from_qcoords([coords[idx + t] for t in range(d)]))
                idx += d
            m.append(row)
        return m

    elems = [basis_elem(k) for k in range(dim)]
    dag = [inv.apply(e) for e in elems]
    big = [[Fraction(0)] * dim for _ in range(dim)]
    for a in range(dim):
        for b in range(dim):
            prod = rmat_mul(ring, elems[a], dag[b])
            tr = Fraction(0)
            for i in range(n):
                tr += ring.trace_q(prod[i][i])
            big[a][b] = tr
    sym = [[(big[a][b] + big[b][a]) / 2 for b in range(dim)] for a in range(dim)]
    return _leading_minors_positive(sym)


def involution_to_form(inv: MatrixInvolution, want_positive: bool) -> GramForm:
    """A Gram form whose adjoint involution is `inv`; positive definite when
    `want_positive` (implements the phi(v0, v0)-rescaling construction)."""
    ring = inv.ring
    if not isinstance(ring, (RationalRing, QuadRing)):
        raise FormError("involution_to_form supports matrix algebras over Q or a quadratic field")
    n = inv.n
    z = [row[:] for row in inv.z]
    zct = rmat_conj_transpose_kind(inv.kind, ring, z)
    if rmat_eq(ring, zct, z):
        kind = inv.kind if inv.kind == "hermitian" else "symmetric"
    elif rmat_eq(ring, zct, [[-x for x in row] for row in z]):
        kind = "skew"
    else:
        raise FormError("conjugator is neither symmetric nor skew: inconsistent involution")
    form = GramForm(kind, ring, z)
    if not want_positive:
        return form
    if kind == "skew":
        raise FormError("symplectic-type involutions admit no positive definite form")
    # find v0 with phi(v0, v0) != 0 and rescale by its inverse
    candidates = []
    for i in range(n):
        v = [ring.zero()] * n
        v[i] = _ring_one(ring)
        candidates.append(v)
    for i in range(n):
        for j in range(i + 1, n):
            v = [ring.zero()] * n
            v[i] = _ring_one(ring)
            v[j] = _ring_one(ring)
            candidates.append(v)
    for v0 in candidates:
        s = form.evaluate(v0, v0)
        if ring.is_zero(s):
            continue
        rescaled = form.scale(ring.inv(s))
        if is_positive_definite(rescaled):
            return rescaled
        rescaled_neg = form.scale(-ring.inv(s))
        if is_positive_definite(rescaled_neg):
            return rescaled_neg
    if is_positive_involution(inv):
        raise AssertionError(
            "internal bug: a positive involution must admit a positive definite form"
        )
    raise FormError("involution is not positive: no positive definite form exists")


def _ring_one(ring):
    return ring.one()


# ---------------------------------------------------------------------------
# Invariants


@dataclass
class FormInvariants:
    kind: str
    base: str
    dim: int
    det_class: SquareClassQ | None = None
    det_element: object | None = None
    det_field: QuadField | None = None  # set when det compares modulo Nm(F^x)
    det_is_norm: bool | None = None
    hasse: dict | None = None
    signatures: list[tuple[int, int]] | None = None
    complete: bool = True

    def hasse_minus_places(self) -> list[LocalPlace]:
        if self.hasse is None:
            return []
        return sorted([v for v, s in self.hasse.items() if s == -1])

    def same_as(self, other: "FormInvariants") -> tuple[bool, str]:
        if self.kind != other.kind or self.base != other.base:
            return False, f"kind/base mismatch: {self.kind}/{self.base} vs {other.kind}/{other.base}"
        if self.dim != other.dim:
            return False, f"dimension mismatch: {self.dim} vs {other.dim}"
        if self.det_class is not None and self.det_class != other.det_class:
            return False, (
                f"det_class mismatch: {self.det_class.representative} vs "
                f"{other.det_class.representative}"
            )
        if self.det_field is not None:
            ratio = frac(self.det_element) / frac(other.det_element)
            if not is_norm(ratio, self.det_field):
                return False, (
                    f"determinant norm-class mismatch: {self.det_element} vs "
                    f"{other.det_element} modulo Nm(F^x)"
                )
        elif self.det_element is not None or other.det_element is not None:
            if not _det_elements_square_ratio(self.det_element, other.det_element):
                return False, "field determinant classes differ"
        if self.hasse is not None:
            if self.hasse_minus_places() != other.hasse_minus_places():
                return False, (
                    f"hasse mismatch at {self.hasse_minus_places()} vs {other.hasse_minus_places()}"
                )
        if self.signatures is not None and self.signatures != other.signatures:
            return False, f"signature mismatch: {self.signatures} vs {other.signatures}"
        return True, "invariants agree"


def _det_elements_square_ratio(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, QuadElem):
        return is_square_in_field(a * b.inv())
    return square_class(frac(a) / frac(b)).is_trivial


def is_norm(m, F: QuadField) -> bool:
    """m in Nm_{F/Q}(F^x) for an imaginary quadratic field F, by Hilbert
    symbols: m is a norm iff (m, D)_v = +1 at every place."""
    m = frac(m)
    if m == 0:
        raise FormError("zero is not a unit")
    if F.is_real:
        raise FormError("norm-class determinants need a CM (imaginary) field")
    for v in support_places(m, Fraction(F.D)):
        if hilbert_symbol(m, Fraction(F.D), v) != 1:
            return False
    return True


def invariants(f: GramForm) -> FormInvariants:
    """The full invariant vector appropriate to the form's kind and base."""
    if not f.is_nonsingular():
        raise FormError("singular forms have no invariants")
    ring = f.ring
    if f.kind == "skew":
        if f.dim % 2:
            raise FormError("nonsingular skew forms have even dimension")
        return FormInvariants(kind="skew", base="Q", dim=f.dim, complete=True)
    if f.kind == "symmetric" and isinstance(ring, RationalRing):
        diag, _ = diagonalize(f)
        det = Fraction(1)
        for x in diag:
            det *= x
        places = support_places(*diag)
        hasse = {v: hasse_invariant(diag, v) for v in places}
        pos = sum(1 for x in diag if x > 0)
        return FormInvariants(
            kind="symmetric",
            base="Q",
            dim=f.dim,
            det_class=square_class(det),
            hasse=hasse,
            signatures=[(pos, f.dim - pos)],
            complete=True,
        )
    if f.kind == "symmetric" and isinstance(ring, QuadRing):
        diag, _ = diagonalize(f)
        det = ring.one()
        for x in diag:
            det = det * x
        sig0 = sum(1 for x in diag if x.sign_at(0) > 0)
        sig1 = sum(1 for x in diag if x.sign_at(1) > 0)
        return FormInvariants(
            kind="symmetric",
            base=f"Q(sqrt{ring.field.D})",
            dim=f.dim,
            det_element=det,
            signatures=[(sig0, f.dim - sig0), (sig1, f.dim - sig1)],
            complete=False,
        )
    if f.kind == "hermitian" and isinstance(ring, QuadRing):
        diag, _ = diagonalize(f)
        dets = [x.as_rational() for x in diag]  # conj-fixed, hence rational
        det = Fraction(1)
        for x in dets:
            det *= x
        pos = sum(1 for x in dets if x > 0)
        return FormInvariants(
            kind="hermitian",
            base=f"Q(sqrt{ring.field.D})",
            dim=f.dim,
            det_element=det,
            det_field=ring.field,
            det_is_norm=is_norm(det, ring.field),
            signatures=[(pos, f.dim - pos)],
            complete=True,
        )
    if f.kind == "hermitian" and isinstance(ring, QuaternionRing):
        diag, _ = diagonalize(f)
        dets = [ring.as_rational(x) for x in diag]  # canonical-fixed: rational
        pos = sum(1 for x in dets if x > 0)
        return FormInvariants(
            kind="hermitian",
            base=f"quat({ring.a},{ring.b})",
            dim=f.dim,
            signatures=[(pos, f.dim - pos)],
            complete=True,
        )
    if f.kind == "hermitian" and isinstance(ring, EtalePairRing):
        return FormInvariants(kind="hermitian", base="QxQ", dim=f.dim, complete=True)
    if f.kind == "quat-skew-hermitian":
        diag, _ = diagonalize(f)
        det = Fraction(1)
        for x in diag:
            det *= x.nrd()
        return FormInvariants(
            kind="quat-skew-hermitian",
            base=f"quat({ring.a},{ring.b})",
            dim=f.dim,
            det_class=square_class(det),
            complete=False,
        )
    raise FormError("unsupported kind/base")


# ---------------------------------------------------------------------------
# Isometry


@dataclass
class IsometryDecision:
    value: bool
    complete: bool
    reason: str

    def __bool__(self) -> bool:
        return self.value


def isometric(f1: GramForm, f2: GramForm) -> IsometryDecision:
    """Isometry decision by invariant comparison.  `complete` records
    whether the invariants are a complete system for the kind/base."""
    if f1.kind != f2.kind or f1.ring != f2.ring:
        raise FormError("isometry needs matching kind and base")
    inv1, inv2 = invariants(f1), invariants(f2)
    ok, reason = inv1.same_as(inv2)
    return IsometryDecision(ok, inv1.complete and inv2.complete, reason)


def search_isometry_witness(f1: GramForm, f2: GramForm, height: int):
    """Brute-force oracle for rational symmetric forms: a matrix u of entry
    height <= `height` with u^T G1 u = G2, or None within the bound."""
    if f1.kind != "symmetric" or not isinstance(f1.ring, RationalRing):
        raise FormError("witness search is for rational symmetric forms")
    if f1.dim != f2.dim:
        return None
    if height < 1:
        raise FormError("height must be >= 1")
    n = f1.dim
    g1, g2 = f1.gram, f2.gram

    values = {Fraction(0)}
    for num in range(1, height + 1):
        for den in range(1, height + 1):
            values.add(Fraction(num, den))
            values.add(Fraction(-num, den))
    values = sorted(values, key=lambda v: (abs(v), v < 0))

    def qform(v):
        return sum(v[i] * g1[i][j] * v[j] for i in range(n) for j in range(n))

    def pairing(v, w):
        return sum(v[i] * g1[i][j] * w[j] for i in range(n) for j in range(n))

    pools: dict[Fraction, list[tuple]] = {}

    def pool_for(target):
        if target in pools:
            return pools[target]
        from itertools import product

        out = [cand for cand in product(values, repeat=n) if qform(cand) == target]
        pools[target] = out
        return out

    cols: list[tuple] = []

    def backtrack(j):
        if j == n:
            return True
        for cand in pool_for(g2[j][j]):
            if all(pairing(cols[i], cand) == g2[i][j] for i in range(j)):
                cols.append(cand)
                if backtrack(j + 1):
                    return True
                cols.pop()
        return False

    if not backtrack(0):
        return None
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def skew_standard_witness(f: GramForm) -> list:
    """Exact symplectic basis: a matrix S with S^T G S = the standard
    block-antidiagonal J.  Witness that same-dimension skew forms are
    isometric."""
    if f.kind != "skew":
        raise FormError("needs a skew form")
    if not f.is_nonsingular():
        raise FormError("singular skew form")
    n = f.dim
    g = [row[:] for row in f.gram]
    basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def pairing(v, w):
        return sum(v[i] * f.gram[i][j] * w[j] for i in range(n) for j in range(n))

    remaining = [basis[i] for i in range(n)]
    pairs = []
    while remaining:
        e = remaining.pop(0)
        mate_idx = None
        for idx, w in enumerate(remaining):
            if pairing(e, w) != 0:
                mate_idx = idx
                break
        if mate_idx is None:
            raise FormError("skew form is singular on the remaining space")
        fvec = remaining.pop(mate_idx)
        c = pairing(e, fvec)
        fvec = [x / c for x in fvec]
        # project the rest against the hyperbolic pair (e, fvec)
        projected = []
        for w in remaining:
            a = pairing(e, w)
            b = pairing(fvec, w)
            projected.append([w[i] - a * fvec[i] + b * e[i] for i in range(n)])
        remaining = projected
        pairs.append((e, fvec))
    cols = []
    for e, fv in pairs:
        cols.append(e)
        cols.append(fv)
    s = [[cols[j][i] for j in range(len(cols))] for i in range(n)]
    j_std = GramForm("skew", RationalRing(), _standard_symplectic(n))
    check = f.transform(s)
    if check.gram != j_std.gram:
        raise AssertionError("symplectic reduction failed verification")
    return s


def _standard_symplectic(n):
    g = [[Fraction(0)] * n for _ in range(n)]
    for k in range(n // 2):
        g[2 * k][2 * k + 1] = Fraction(1)
        g[2 * k + 1][2 * k] = Fraction(-1)
    return g


def etale_pair_form(a_matrix) -> GramForm:
    """The etale-pair hermitian form whose first component matrix is A (the
    hermitian condition forces the second component to be A^T)."""
    n = len(a_matrix)
    g = [[PairElem(frac(a_matrix[i][j]), frac(a_matrix[j][i])) for j in range(n)] for i in range(n)]
    return GramForm("hermitian", EtalePairRing(), g)


def etale_pair_witness(f1: GramForm, f2: GramForm):
    """Isometry witness for etale-pair hermitian forms of equal dimension."""
    if not (isinstance(f1.ring, EtalePairRing) and isinstance(f2.ring, EtalePairRing)):
        raise FormError("needs etale-pair forms")
    if f1.dim != f2.dim or not f1.is_nonsingular() or not f2.is_nonsingular():
        return None
    n = f1.dim
    a1 = [[f1.gram[i][j].x for j in range(n)] for i in range(n)]
    a2 = [[f2.gram[i][j].x for j in range(n)] for i in range(n)]
    from .linalg import inverse, mat_mul

    u2t = mat_mul(a2, inverse(a1))
    u = [[PairElem(Fraction(int(i == j)), u2t[j][i]) for j in range(n)] for i in range(n)]
    assert rmat_eq(f1.ring, f1.transform(u).gram, f2.gram)
    return u


# ---------------------------------------------------------------------------
# The fourth-power verifier


def fourth_power_isometric(f1: GramForm, f2: GramForm) -> tuple[bool, dict]:
    """Verify that the 4-fold direct sums of two positive definite forms of
    equal dimension over the same base are isometric, returning the
    invariant certificate.  A False return signals a bug, not a result."""
    if f1.kind != f2.kind or f1.ring != f2.ring:
        raise FormError("fourth-power check needs matching kind and base")
    if f1.dim != f2.dim:
        raise FormError("fourth-power check needs equal dimensions")
    if f1.kind in ("skew", "quat-skew-hermitian"):
        raise FormError("positive definiteness requires a hermitian kind")
    if not is_positive_definite(f1) or not is_positive_definite(f2):
        raise FormError("fourth-power check needs positive definite forms")
    q1, q2 = f1.repeat(4), f2.repeat(4)
    i1, i2 = invariants(q1), invariants(q2)
    cert: dict = {
        "dim": i1.dim,
        "kind": f1.kind,
        "signatures": [i1.signatures, i2.signatures],
    }
    if f1.kind == "symmetric" and isinstance(f1.ring, RationalRing):
        assert i1.det_class.is_trivial and i2.det_class.is_trivial, "fourth-power determinant must be a square"
        assert i1.hasse_minus_places() == [] and i2.hasse_minus_places() == [], (
            "hasse invariant of a positive definite fourth power must be trivial"
        )
        # independent route: the direct-sum rule with square determinants
        d1, _ = diagonalize(f1.repeat(2))
        det2 = Fraction(1)
        for x in d1:
            det2 *= x
        for v in support_places(*(d1 + [det2])):
            s2 = hasse_invariant(d1, v)
            rule = s2 * s2 * hilbert_symbol(det2, det2, v)
            assert rule == hasse_invariant(d1 + d1, v), "sum rule violated"
        cert["det_classes"] = [i1.det_class.representative, i2.det_class.representative]
        cert["hasse_trivial"] = True
        cert["sum_rule_checked"] = True
    elif f1.kind == "symmetric":
        assert is_square_in_field(i1.det_element) and is_square_in_field(i2.det_element)
        cert["det_fourth_power_square"] = True
        cert["hasse_argument"] = "formal: s(psi+psi) doubles and pairs square determinants"
    elif isinstance(f1.ring, QuadRing):
        assert i1.det_is_norm and i2.det_is_norm, "fourth-power determinant must be a norm"
        cert["det_is_norm"] = True
    else:
        cert["classified_by"] = "dimension and signature"
    ok, reason = i1.same_as(i2)
    cert["invariants_match"] = ok
    cert["reason"] = reason
    return ok, cert
