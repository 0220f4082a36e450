"""Z_p-lattices in a form-carrying Q_p-space: scale, maximality, the
maximal-completion algorithm, unimodular classification, and the split-case
bounded solver.

Maximality is tested through index-p superlattices only.  This is
sufficient: if M strictly contains L with the same scale, pick v in M - L
and the least k >= 1 with p^k v in L; then L + Z_p p^{k-1} v is an index-p
superlattice of L inside M, and its scale is squeezed between the two equal
scales.  So some index-p superlattice already witnesses non-maximality.

Isometry witnesses between unimodular forms are constructed modulo
p^precision (square-root lifts are truncated), but every certificate that
the solver returns is re-verified in exact rational arithmetic: the final
b of split_local_solve satisfies b^T q b = m' * I as an identity in Q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product

from sympy import isprime

from .exact import legendre, valuation
from .forms import GramForm, symmetric_form_q
from .linalg import (
    Matrix,
    det,
    frac,
    identity,
    inverse,
    mat,
    mat_add,
    mat_mul,
    mat_scale,
    mat_sub,
    transpose,
)


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class PadicContext:
    """Odd prime and working modulus p^precision for truncated witnesses."""

    p: int
    precision: int = 12

    def __post_init__(self):
        if self.p == 2:
            raise LatticeError("p = 2 is excluded (2 must be invertible)")
        if not isprime(self.p):
            raise LatticeError(f"{self.p} is not prime")
        if self.precision < 1:
            raise LatticeError("precision must be positive")

    @property
    def modulus(self) -> int:
        return self.p**self.precision


def _mat_min_valuation(m: Matrix, p: int) -> int:
    vals = [valuation(x, p) for row in m for x in row if x != 0]
    if not vals:
        raise LatticeError("zero matrix has no scale")
    return min(vals)


def _mat_p_integral(m: Matrix, p: int) -> bool:
    return all(x == 0 or valuation(x, p) >= 0 for row in m for x in row)


@dataclass
class PadicLattice:
    """Columns of `basis` span the lattice over Z_p; `form` is a symmetric
    rational Gram form read p-adically."""

    ctx: PadicContext
    basis: Matrix
    form: GramForm

    def __post_init__(self):
        self.basis = mat(self.basis)
        if det(self.basis) == 0:
            raise LatticeError("lattice basis is singular")
        if self.form.dim != len(self.basis):
            raise LatticeError("form and basis dimensions differ")
        if self.form.kind != "symmetric":
            raise LatticeError("p-adic lattices are implemented for symmetric forms")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def gram(self) -> Matrix:
        return mat_mul(mat_mul(transpose(self.basis), self.form.gram), self.basis)

    def contains(self, other: "PadicLattice") -> bool:
        """other subseteq self, p-locally."""
        coords = mat_mul(inverse(self.basis), other.basis)
        return _mat_p_integral(coords, self.ctx.p)

    def equals(self, other: "PadicLattice") -> bool:
        return self.contains(other) and other.contains(self)

    def index_p_superlattices(self):
        """All index-p superlattices, in lexicographic order of the residue
        projective point that defines them."""
        p, n = self.ctx.p, self.dim
        for v in _projective_points(p, n):
            i = next(k for k in range(n) if v[k] % p != 0)
            new_basis = [row[:] for row in self.basis]
            w = [
                sum(self.basis[r][k] * v[k] for k in range(n)) / p for r in range(n)
            ]
            for r in range(n):
                new_basis[r][i] = w[r]
            yield PadicLattice(self.ctx, new_basis, self.form)


def _projective_points(p: int, n: int):
    """Representatives of P^{n-1}(F_p), first unit coordinate normalized to
    one, in lexicographic order."""
    for lead in range(n):
        for tail in product(range(p), repeat=n - lead - 1):
            yield (0,) * lead + (1,) + tail


def scale(L: PadicLattice) -> int:
    """Exponent s with scale ideal p^s: min valuation over the Gram."""
    return _mat_min_valuation(L.gram(), L.ctx.p)


def is_maximal(L: PadicLattice) -> bool:
    """No index-p superlattice has the same scale (sufficient by the module
    docstring argument)."""
    s = scale(L)
    for sup in L.index_p_superlattices():
        if scale(sup) == s:
            return False
    return True


def maximal_completion(L: PadicLattice, target_scale: int) -> PadicLattice:
    """A maximal lattice containing L among lattices of scale >= the target
    exponent.  Greedy over index-p superlattices in lexicographic order;
    each step strictly decreases the discriminant valuation, so the loop
    terminates."""
    if scale(L) < target_scale:
        raise LatticeError(
            f"scale {scale(L)} is below the requested target {target_scale}"
        )
    current = L
    while True:
        enlarged = None
        for sup in current.index_p_superlattices():
            if scale(sup) >= target_scale:
                enlarged = sup
                break
        if enlarged is None:
            return current
        current = enlarged


def unimodular_isometric(g1: Matrix, g2: Matrix, p: int) -> bool:
    """Classification of unimodular symmetric forms over Z_p, p odd: equal
    dimension and determinant ratio a square unit."""
    if p == 2 or not isprime(p):
        raise LatticeError("p must be an odd prime")
    g1, g2 = mat(g1), mat(g2)
    d1, d2 = det(g1), det(g2)
    if d1 == 0 or d2 == 0 or valuation(d1, p) != 0 or valuation(d2, p) != 0:
        raise LatticeError("forms must be unimodular (unit determinant)")
    if len(g1) != len(g2):
        return False
    from .exact import unit_residue

    return legendre(unit_residue(d1 * d2, p), p) == 1


# ---------------------------------------------------------------------------
# Unimodular congruence witnesses at finite precision


def _sqrt_mod_pk(u: int, p: int, k: int) -> int:
    """Square root of a unit square u modulo p^k (canonical choice: the
    smaller residue mod p, then Hensel)."""
    r = None
    for x in range(1, p):
        if (x * x - u) % p == 0:
            r = min(x, p - x)
            break
    if r is None:
        raise LatticeError("not a quadratic residue")
    mod = p
    while mod < p**k:
        mod = min(mod * mod, p**k)
        r = (r + u * pow(r, -1, mod)) * pow(2, -1, mod) % mod
    return r % (p**k)


def _p_adic_diagonalize_unimodular(g: Matrix, ctx: PadicContext):
    """(diag, t) with t^T g t = diag, t p-integral with unit determinant,
    for a p-unimodular symmetric g.  Exact rational arithmetic."""
    p = ctx.p
    n = len(g)
    a = [row[:] for row in g]
    t = identity(n)

    def col_op(target, source, c):
        for r in range(n):
            a[r][target] += a[r][source] * c
        for r in range(n):
            a[target][r] += c * a[source][r]
        for r in range(n):
            t[r][target] += t[r][source] * c

    def col_swap(i, j):
        for r in range(n):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        a[i], a[j] = a[j], a[i]
        for r in range(n):
            t[r][i], t[r][j] = t[r][j], t[r][i]

    for k in range(n):
        piv = None
        for i in range(k, n):
            if a[i][i] != 0 and valuation(a[i][i], p) == 0:
                piv = i
                break
        if piv is None:
            found = False
            for i in range(k, n):
                for j in range(k, n):
                    if i != j and a[i][j] != 0 and valuation(a[i][j], p) == 0:
                        col_op(i, j, Fraction(1))
                        found = True
                        break
                if found:
                    break
            if not found:
                raise LatticeError("form is not unimodular at p")
            piv = next(i for i in range(k, n) if a[i][i] != 0 and valuation(a[i][i], p) == 0)
        if piv != k:
            col_swap(k, piv)
        for j in range(k + 1, n):
            if a[k][j] != 0:
                col_op(j, k, -a[k][j] / a[k][k])
    return [a[i][i] for i in range(n)], t


def unimodular_congruence_witness(u1: Matrix, u2: Matrix, ctx: PadicContext) -> Matrix:
    """A p-integral rational matrix T with T^T u1 T = u2 modulo
    p^precision, for unimodular-isometric symmetric u1, u2 (p odd)."""
    p, k = ctx.p, ctx.precision
    if not unimodular_isometric(u1, u2, p):
        raise LatticeError("forms are not unimodular-isometric")
    t1 = _reduce_to_standard(mat(u1), ctx)
    t2 = _reduce_to_standard(mat(u2), ctx)
    t = mat_mul(t1, inverse(t2))
    return _entries_mod_pk(t, p, k)


def _entries_mod_pk(m: Matrix, p: int, k: int) -> Matrix:
    """Reduce p-integral rational entries to their integer representatives
    modulo p^k (keeps the congruence, shrinks the entries)."""
    mod = p**k
    out = []
    for row in m:
        new = []
        for x in row:
            if x.denominator % p == 0:
                raise LatticeError("entry is not p-integral")
            new.append(Fraction(x.numerator * pow(x.denominator, -1, mod) % mod))
        out.append(new)
    return out


def _reduce_to_standard(u: Matrix, ctx: PadicContext) -> Matrix:
    """T with T^T u T = diag(1, ..., 1, delta) mod p^precision, where delta
    is 1 or the canonical non-residue."""
    p, k = ctx.p, ctx.precision
    n = len(u)
    diag, t = _p_adic_diagonalize_unimodular(u, ctx)
    units = []
    for d in diag:
        units.append(valuation(d, p) == 0)
    if not all(units):
        raise LatticeError("diagonalization produced a non-unit entry")
    from .exact import unit_residue

    mod = p**k
    residues = [unit_residue(d, p, mod) for d in diag]
    cols = [[t[r][c] for r in range(n)] for c in range(n)]
    # classify entries; scale residue entries to 1, pair up non-residues
    nonresidues = []
    for idx in range(n):
        if legendre(residues[idx] % p, p) == 1:
            r = _sqrt_mod_pk(residues[idx], p, k)
            inv_r = Fraction(pow(r, -1, mod))
            cols[idx] = [x * inv_r for x in cols[idx]]
        else:
            nonresidues.append(idx)
    while len(nonresidues) >= 2:
        i, j = nonresidues[0], nonresidues[1]
        nonresidues = nonresidues[2:]
        ui, uj = residues[i], residues[j]
        x, y = _represent_one(ui, uj, p, k)
        ci, cj = cols[i], cols[j]
        new_i = [x * a + y * b for a, b in zip(ci, cj)]
        new_j = [(-uj * y % mod) * a + (ui * x % mod) * b for a, b in zip(ci, cj)]
        # norms: 1 and ui*uj (a residue); rescale the second
        s = _sqrt_mod_pk(ui * uj % mod, p, k)
        inv_s = Fraction(pow(s, -1, mod))
        cols[i] = new_i
        cols[j] = [v * inv_s for v in new_j]
    if nonresidues:
        # move the leftover non-residue to the last slot, normalized to the
        # canonical non-residue
        idx = nonresidues[0]
        nu = _canonical_nonresidue(p)
        ratio = residues[idx] * pow(nu, -1, mod) % mod
        s = _sqrt_mod_pk(ratio, p, k)
        inv_s = Fraction(pow(s, -1, mod))
        cols[idx] = [v * inv_s for v in cols[idx]]
        cols.append(cols.pop(idx))
    t_out = [[cols[c][r] for c in range(n)] for r in range(n)]
    return _entries_mod_pk(t_out, p, k)


def _canonical_nonresidue(p: int) -> int:
    for x in range(2, p):
        if legendre(x, p) == -1:
            return x
    raise LatticeError("no non-residue found")


def _represent_one(u: int, v: int, p: int, k: int) -> tuple[int, int]:
    """(x, y) with u x^2 + v y^2 = 1 mod p^k, x or y a unit (Hensel)."""
    mod = p**k
    x0 = y0 = None
    for x in range(p):
        rem = (1 - u * x * x) % p
        # v y^2 = rem mod p
        target = rem * pow(v, -1, p) % p
        for y in range(p):
            if (y * y - target) % p == 0:
                x0, y0 = x, y
                break
        if x0 is not None:
            break
    if x0 is None:
        raise LatticeError("binary unit form fails to represent 1 mod p")
    x, y = x0, y0
    mod_cur = p
    while mod_cur < mod:
        mod_cur = min(mod_cur * mod_cur, mod)
        rem = (1 - u * x * x - v * y * y) % mod_cur
        if y % p != 0:
            # adjust y: f(y) = v y^2 - c
            y = (y + rem * pow(2 * v * y, -1, mod_cur)) % mod_cur
        else:
            x = (x + rem * pow(2 * u * x, -1, mod_cur)) % mod_cur
    return x % mod, y % mod


# ---------------------------------------------------------------------------
# The split-case solver


def _is_scalar_matrix(m: Matrix) -> Fraction | None:
    n = len(m)
    d = m[0][0]
    for i in range(n):
        for j in range(n):
            if i == j:
                if m[i][j] != d:
                    return None
            elif m[i][j] != 0:
                return None
    return d


def _rational_sqrt_or_none(x: Fraction) -> Fraction | None:
    from math import isqrt

    if x <= 0:
        return None
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def _cayley_orthogonal_round(h: Matrix, ctx: PadicContext) -> Matrix:
    """Round an approximately orthogonal p-adic matrix to an exactly
    orthogonal rational matrix congruent to it (Cayley transform of the
    skew-symmetrized parameter)."""
    n = len(h)
    p, k = ctx.p, ctx.precision
    eye = identity(n)

    twists = _det_one_signed_permutations(n)
    for j in twists:
        hj = mat_mul(h, j)
        d = det(mat_add(eye, hj))
        if d == 0:
            continue
        x = mat_mul(mat_sub(eye, hj), inverse(mat_add(eye, hj)))
        if not _mat_p_integral(x, p):
            continue
        # reduce entries first, then skew-symmetrize (the order matters:
        # per-entry modular reduction does not commute with transposition)
        xr = _entries_mod_pk(x, p, k)
        xs = mat_scale(Fraction(1, 2), mat_sub(xr, transpose(xr)))
        dstar = det(mat_add(eye, xs))
        if dstar == 0:
            continue
        hstar = mat_mul(mat_sub(eye, xs), inverse(mat_add(eye, xs)))
        return mat_mul(hstar, inverse(j))
    raise LatticeError("no Cayley chart found for the orthogonal rounding")


def _det_one_signed_permutations(n: int):
    """Signed permutation matrices of determinant +1, deterministic order,
    identity first."""
    out = []
    for perm in permutations(range(n)):
        sign_perm = _perm_sign(perm)
        for signs in product((1, -1), repeat=n):
            s = sign_perm
            for x in signs:
                s *= x
            if s != 1:
                continue
            m = [[Fraction(0)] * n for _ in range(n)]
            for i, pi in enumerate(perm):
                m[pi][i] = Fraction(signs[i])
            out.append(m)
    out.sort(key=lambda m: sum(abs(m[i][j] - (1 if i == j else 0)) for i in range(n) for j in range(n)))
    return out


def _perm_sign(perm) -> int:
    s = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            s = -s
    return s


def split_local_solve(
    q: Matrix, a: Matrix, m_prime: Fraction | int, ctx: PadicContext
) -> Matrix:
    """b with p-integral entries and b^T q b = m' * I exactly.

    Preconditions: q integral symmetric nonsingular; a^T q a = m * I for a
    rational scalar m; m' q^{-1} p-integral; m'/m a rational square.  The
    last condition strengthens the p-adic-square hypothesis of the local
    theory: it is what makes an exact rational certificate possible, and it
    holds for every instance the global solver generates.

    Construction: scale a to b0 = sqrt(m'/m) a (exact Gram m' * I); when b0
    is not p-integral, transport it onto the maximal completion of
    m' q^{-1} Z_p^n by a finite-precision unimodular isometry and round the
    correction to an exact orthogonal matrix through the Cayley transform.
    """
    p = ctx.p
    q = mat(q)
    a = mat(a)
    m_prime = frac(m_prime)
    n = len(q)
    if q != transpose(q):
        raise LatticeError("q must be symmetric")
    if not _mat_p_integral(q, p):
        raise LatticeError("q must be p-integral")
    dq = det(q)
    if dq == 0:
        raise LatticeError("q must be nonsingular")
    if m_prime == 0 or valuation(m_prime, p) < 0:
        raise LatticeError("m' must be a nonzero p-adic integer")
    aqa = mat_mul(mat_mul(transpose(a), q), a)
    m = _is_scalar_matrix(aqa)
    if m is None or m == 0:
        raise LatticeError("a^T q a must be a nonzero rational scalar")
    qinv = inverse(q)
    if not _mat_p_integral(mat_scale(m_prime, qinv), p):
        raise LatticeError("m' q^{-1} must be p-integral")
    s = _rational_sqrt_or_none(m_prime / m)
    if s is None:
        raise LatticeError(
            "m'/m must be a positive rational square for an exact certificate"
        )
    b0 = mat_scale(s, a)
    if _mat_p_integral(b0, p):
        return b0

    target = valuation(m_prime, p)
    form = symmetric_form_q(q)
    lam0 = PadicLattice(ctx, mat_scale(m_prime, qinv), form)
    lam_max = maximal_completion(lam0, target)
    bprime = lam_max.basis
    uprime = mat_scale(1 / m_prime, mat_mul(mat_mul(transpose(bprime), q), bprime))
    if _mat_min_valuation(uprime, p) < 0 or valuation(det(uprime), p) != 0:
        raise LatticeError("maximal completion did not reach a unimodular Gram")

    attempts = 0
    cur_ctx = ctx
    while attempts < 5:
        t = unimodular_congruence_witness(uprime, identity(n), cur_ctx)
        bp = mat_mul(bprime, t)
        h = mat_mul(inverse(b0), bp)
        d = det(h)
        if d == 0:
            raise LatticeError("degenerate approximate isometry")
        if valuation(d + 1, p) > 0:
            flip = identity(n)
            flip[n - 1][n - 1] = Fraction(-1)
            h = mat_mul(h, flip)
        try:
            hstar = _cayley_orthogonal_round(h, cur_ctx)
            b = mat_mul(b0, hstar)
            check = mat_mul(mat_mul(transpose(b), q), b)
            if _is_scalar_matrix(check) == m_prime and _mat_p_integral(b, p):
                return b
        except LatticeError:
            pass
        attempts += 1
        cur_ctx = PadicContext(p, cur_ctx.precision * 2)
    raise LatticeError("orthogonal rounding failed at all precisions")


def unit_case_parity(q: Matrix, a: Matrix, ctx: PadicContext):
    """Dichotomy for unimodular q with a^T q a = m scalar: either v_p(m) is
    even, or a finite-precision witness b with b^T q b = I exists."""
    p = ctx.p
    q = mat(q)
    a = mat(a)
    n = len(q)
    dq = det(q)
    if dq == 0 or valuation(dq, p) != 0 or not _mat_p_integral(q, p):
        raise LatticeError("q must be unimodular")
    aqa = mat_mul(mat_mul(transpose(a), q), a)
    m = _is_scalar_matrix(aqa)
    if m is None or m == 0:
        raise LatticeError("a^T q a must be a nonzero rational scalar")
    if valuation(m, p) % 2 == 0:
        return ("even-valuation", None)
    if n % 2 == 1:
        raise LatticeError(
            "odd valuation with odd dimension contradicts the unimodular classification"
        )
    if not unimodular_isometric(q, identity(n), p):
        raise LatticeError(
            "odd valuation forces det q to be a square unit; inconsistent input"
        )
    b = unimodular_congruence_witness(q, identity(n), ctx)
    return ("isometry-witness", b)
