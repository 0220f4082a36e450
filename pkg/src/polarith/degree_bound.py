"""Global bounded-norm solver: given (E, dagger, R, Nm, q, a) with
a^dagger q a rational, produce b in R with b^dagger q b a nonzero integer
and controlled norm.

Fully implemented routes:
  * commutative quadratic-field case (ideal algorithm: local exponents,
    principalization through the class group, unit cleanup);
  * split matrix case M_n(Q) with transpose involution (local maximal
    lattices glued over the bad primes, then an exact decomposition of the
    resulting unimodular positive definite Gram as T^T T);
  * a universal brute-force oracle over coordinate boxes.

The achieved constant c = Nm(b) / Nm(q)^{d - 1/2} is reported, never
asserted: the exponent the paper's global statement carries is d - 1/2,
while the commutative ideal construction sketch only guarantees
Nm(ideal) <= Nm(q)^{(3d-1)/2}; the result records what was achieved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from sympy import factorint

from .algebras import (
    AlgebraWithInvolution,
    NormSpec,
    OrderR,
    QuadRing,
    RationalRing,
    apply_involution,
    matrix_algebra_q,
    matrix_order_z,
    maximal_order_quadfield,
    norm,
    quadfield_algebra,
    rational_algebra,
)
from .exact import valuation
from .lattices_local import PadicContext, PadicLattice, maximal_completion
from .linalg import (
    det,
    frac,
    hnf,
    identity,
    inverse,
    lattice_intersection,
    mat,
    mat_mul,
    mat_scale,
    transpose,
)
from .quadfield import (
    QfIdeal,
    QuadElem,
    QuadField,
    class_group,
    fundamental_unit,
    primes_above,
    prime_splitting,
    sqrt_in_field,
    torsion_units,
    unit_group_absorb,
)


class DegreeBoundError(ValueError):
    pass


class OracleBudgetError(RuntimeError):
    def __init__(self, explored: int):
        super().__init__(f"oracle budget exceeded after exploring box radius {explored}")
        self.explored = explored


@dataclass
class BoundInstance:
    """(algebra, norm, order, q, a) with q symmetric in R and a^dagger q a a
    nonzero rational scalar (checked).  a = None builds an oracle-only
    instance with no similitude hypothesis (the solvers reject it)."""

    algebra: AlgebraWithInvolution
    spec: NormSpec
    order: OrderR
    q: tuple
    a: tuple | None

    def __post_init__(self):
        A = self.algebra
        if not A.eq(apply_involution(A, self.q), self.q):
            raise DegreeBoundError("q must be symmetric under the involution")
        if not self.order.contains(self.q):
            raise DegreeBoundError("q must lie in the order")
        if self.a is None:
            self.m = None
            return
        m = A.is_rational_scalar(A.mul(A.mul(apply_involution(A, self.a), self.q), self.a))
        if m is None or m == 0:
            raise DegreeBoundError("a^dagger q a must be a nonzero rational scalar")
        self.m = m

    def require_similitude(self) -> Fraction:
        if self.m is None:
            raise DegreeBoundError("this instance has no similitude element a")
        return self.m

    @property
    def d(self) -> int:
        return self.spec.rank_d

    def norm_q(self) -> Fraction:
        return norm(self.algebra, self.q, self.spec)


@dataclass
class BoundResult:
    b: tuple
    value: int
    norm_b: Fraction
    norm_q: Fraction
    d: int
    method: str
    notes: dict = field(default_factory=dict)

    @property
    def achieved_ratio_squared(self) -> Fraction:
        """c^2 = Nm(b)^2 / Nm(q)^{2d-1}, exact (avoids the half-integer
        exponent)."""
        return self.norm_b**2 / self.norm_q ** (2 * self.d - 1)

    def bound_rhs_squared(self) -> Fraction:
        return self.achieved_ratio_squared * self.norm_q ** (2 * self.d - 1)


def verify_result(inst: BoundInstance, res: BoundResult) -> None:
    """Exact re-verification: b in R, b^dagger q b = value in Z - {0},
    Nm(b) = norm_b."""
    A = inst.algebra
    if not inst.order.contains(res.b):
        raise DegreeBoundError("result b is not in the order")
    val = A.is_rational_scalar(A.mul(A.mul(apply_involution(A, res.b), inst.q), res.b))
    if val is None or val == 0 or val.denominator != 1:
        raise DegreeBoundError("b^dagger q b is not a nonzero rational integer")
    if val != res.value:
        raise DegreeBoundError("reported value mismatch")
    if norm(A, res.b, inst.spec) != res.norm_b:
        raise DegreeBoundError("reported norm mismatch")


# ---------------------------------------------------------------------------
# Instance constructors


def quadfield_instance(D: int, q_coords, a_coords, involution: str = "identity") -> BoundInstance:
    F = QuadField(D)
    A = quadfield_algebra(F, involution)
    spec = NormSpec(A, (1,))
    order = maximal_order_quadfield(A)
    q = (QuadElem(F, frac(q_coords[0]), frac(q_coords[1])),)
    a = (QuadElem(F, frac(a_coords[0]), frac(a_coords[1])),)
    return BoundInstance(A, spec, order, q, a)


def rational_instance(q: int, a=1) -> BoundInstance:
    A = rational_algebra()
    spec = NormSpec(A, (1,))
    order = OrderR(A, (A.one(),))
    return BoundInstance(A, spec, order, (frac(q),), (frac(a),))


def matrix_instance(n: int, q_rows, a_rows, gamma: int = 1) -> BoundInstance:
    A = matrix_algebra_q(n)
    spec = NormSpec(A, (gamma,))
    order = matrix_order_z(A)
    return BoundInstance(A, spec, order, (mat(q_rows),), (mat(a_rows),))


# ---------------------------------------------------------------------------
# Commutative solver


def _ideal_exponent_data(F: QuadField, q: QuadElem, p: int):
    """Per-prime local data at p: list of (prime ideal, e_i, k_i)."""
    from .quadfield import element_prime_valuation

    kind = prime_splitting(F, p)
    primes = primes_above(F, p)
    out = []
    for which, pr in enumerate(primes):
        e = 2 if kind == "ramified" else 1
        k = element_prime_valuation(q, p, which)
        out.append((pr, e, k))
    return out


def _min_t(data) -> tuple[int, list[int]] | None:
    """Minimal t >= ceil(k_i/e_i) with all beta_i = (t e_i - k_i)/2 integral
    and nonnegative; None when the parity constraints are infeasible."""
    lo = 0
    for _, e, k in data:
        lo = max(lo, -(-k // e))
    for t in (lo, lo + 1):
        betas = []
        ok = True
        for _, e, k in data:
            num = t * e - k
            if num < 0 or num % 2:
                ok = False
                break
            betas.append(num // 2)
        if ok:
            return t, betas
    return None


_class_group_cache: dict[int, object] = {}


def _cached_class_group(F: QuadField):
    if F.D not in _class_group_cache:
        _class_group_cache[F.D] = class_group(F)
    return _class_group_cache[F.D]


def solve_commutative(inst: BoundInstance) -> BoundResult:
    """The ideal algorithm over a quadratic field (or Q).  Falls back to the
    oracle, with a note, when the ideal class cannot be principalized."""
    inst.require_similitude()
    A = inst.algebra
    f0 = A.factors[0]
    if isinstance(f0.ring, RationalRing) and not f0.matrix_size:
        qv = frac(inst.q[0])
        res = BoundResult(
            b=A.one(),
            value=int(qv),
            norm_b=Fraction(1),
            norm_q=inst.norm_q(),
            d=inst.d,
            method="rank-one",
        )
        verify_result(inst, res)
        return res
    if not isinstance(f0.ring, QuadRing) or f0.matrix_size:
        raise DegreeBoundError("commutative solver needs a quadratic field algebra")
    F = f0.ring.field
    if not inst.order.contains((F.omega(),)):
        return _oracle_fallback(inst, "non-maximal order: ideal algorithm unavailable")
    q = inst.q[0]

    if f0.involution == "conjugation":
        # symmetric elements for conjugation are rational: q in Z, b = 1
        qv = q.as_rational()
        res = BoundResult(
            b=A.one(),
            value=int(qv),
            norm_b=Fraction(1),
            norm_q=inst.norm_q(),
            d=inst.d,
            method="conjugation-trivial",
        )
        verify_result(inst, res)
        return res

    nq = inst.norm_q()
    assert nq.denominator == 1
    support = sorted(factorint(int(nq)).keys())
    factors: list[tuple[QfIdeal, int]] = []
    big_m = Fraction(1)
    for p in support:
        data = _ideal_exponent_data(F, q, p)
        sol = _min_t(data)
        if sol is None:
            return _oracle_fallback(inst, f"local exponent equations infeasible at p={p}")
        t, betas = sol
        big_m *= Fraction(p) ** t
        for (pr, _, _), beta in zip(data, betas):
            if beta:
                factors.append((pr, beta))
    ideal_b = QfIdeal.unit_ideal(F)
    for pr, e in factors:
        ideal_b = ideal_b * pr**e

    table = _cached_class_group(F)
    gen, _idx = _principalize_with_ramified_twists(ideal_b, table, F)
    notes = {
        "ideal_norm": str(ideal_b.norm()),
        "ideal_bound_ok": ideal_b.norm() ** 2 <= nq ** (3 * inst.d - 1),
    }
    if gen is None:
        return _oracle_fallback(inst, "ideal class not principalizable at desk scale")
    b0, extra_rational = gen
    big_m *= extra_rational

    # value-side unit cleanup
    value_elem = b0 * b0 * q  # identity involution
    u = value_elem / big_m
    if not u.is_unit():
        # content mismatch can only come from the ramified twist bookkeeping
        return _oracle_fallback(inst, "unit bookkeeping failed")
    b_elem, value = _absorb_unit_real(F, b0, q, u, big_m)
    if b_elem is None:
        return _oracle_fallback(inst, "fundamental unit is not in Q*F^2: cleanup impossible")
    res = BoundResult(
        b=(b_elem,),
        value=int(value),
        norm_b=abs(b_elem.norm()),
        norm_q=nq,
        d=inst.d,
        method="ideal-algorithm",
        notes=notes,
    )
    verify_result(inst, res)
    return res


def _principalize_with_ramified_twists(ideal_b: QfIdeal, table, F: QuadField):
    """A generator of ideal_b, possibly after multiplying by ramified
    primes (which keeps b^dagger q b rational, scaled by p).  Returns
    ((generator, rational scale), class index) or (None, index)."""
    from .quadfield import is_principal, normalize_generator

    eps = fundamental_unit(F) if F.is_real else None
    g = is_principal(ideal_b, eps)
    if g is not None:
        return (normalize_generator(g), Fraction(1)), 0
    ram = [p for p in factorint(abs(F.disc)).keys()]
    for r in range(1, len(ram) + 1):
        from itertools import combinations

        for combo in combinations(ram, r):
            tw = ideal_b
            scalef = Fraction(1)
            for p in combo:
                tw = tw * primes_above(F, p)[0]
                scalef *= p
            g = is_principal(tw, eps)
            if g is not None:
                return (normalize_generator(g), scalef), 0
    return None, -1


def _absorb_unit_real(F: QuadField, b0: QuadElem, q: QuadElem, u: QuadElem, big_m: Fraction):
    """Remove the unit from b0^2 q = big_m * u by unit multiplications:
    returns (b, value) with value = b^2 q in Q, or (None, None)."""
    if not F.is_real:
        for t in torsion_units(F):
            cand = u * t * t
            if cand.is_rational():
                b = b0 * t
                return b, big_m * cand.as_rational()
        return None, None
    sign, k = unit_group_absorb(F, u)
    eps = fundamental_unit(F)
    if k % 2 == 0:
        b = b0 * eps ** (-(k // 2))
        return b, big_m * sign
    # odd exponent: try to write eps = z^2 / c with c a (+-) squarefree
    # divisor of the discriminant (the only possible square ideal supports)
    divisors = [1]
    for p in factorint(abs(F.disc)).keys():
        divisors = divisors + [d * p for d in divisors]
    for c0 in sorted(divisors):
        for c in (c0, -c0):
            z = sqrt_in_field(eps * c)
            if z is None:
                continue
            # eps = z^2 / c ; reduce to exponent +-1 then absorb
            kk = k % 2  # remaining odd part after even absorption
            b = b0 * eps ** (-((k - kk) // 2))
            # now value = big_m * sign * eps^kk * (stuff we multiply b by)^2
            # multiply b by conj(z): value *= conj(z)^2; eps * conj(z)^2 =
            # (z conj(z))^2 / (c z^2) * eps^2 ... compute directly instead
            b_try = b * z.conj()
            val_elem = b_try * b_try * q
            if val_elem.is_rational():
                return b_try, val_elem.as_rational()
            b_try2 = b * z
            val_elem2 = b_try2 * b_try2 * q
            if val_elem2.is_rational():
                return b_try2, val_elem2.as_rational()
    return None, None


# ---------------------------------------------------------------------------
# Split matrix solver


def solve_split_matrix(inst: BoundInstance) -> BoundResult:
    """M_n(Q) with the transpose involution and R = M_n(Z): glue the local
    maximal-lattice solutions over the bad primes into one integer lattice,
    then split the resulting unimodular positive definite Gram as T^T T
    (class number of I_n is 1 for n <= 8).  Positive definite q only;
    everything else routes to the oracle."""
    A = inst.algebra
    f0 = A.factors[0]
    if not (isinstance(f0.ring, RationalRing) and f0.matrix_size):
        raise DegreeBoundError("split solver needs a rational matrix algebra")
    if f0.z_matrix() != identity(f0.matrix_size):
        return _oracle_fallback(inst, "non-transpose involutions route to the oracle")
    n = f0.matrix_size
    gamma = inst.spec.gammas[0]
    q = inst.q[0]
    m = inst.require_similitude()
    from .forms import symmetric_form_q as _sf

    if not _leading_ok(q):
        return _oracle_fallback(inst, "q is not positive definite")
    qinv = inverse(q)
    detq = det(q)
    assert detq.denominator == 1
    bad = set(factorint(abs(int(detq))).keys())
    bad |= set(factorint(m.numerator * m.denominator).keys())
    bad.discard(1)
    # choose m'' = m * s^2 with m'' q^{-1} integral and m'' a positive integer
    s = Fraction(1)
    for p in sorted(bad | {2}):
        kappa = max(0, -min((valuation(x, p) for row in qinv for x in row if x != 0), default=0))
        need = max(kappa, 0) - valuation(m, p)
        if need > 0:
            s *= Fraction(p) ** ((need + 1) // 2)
        elif valuation(m, p) < 0:
            s *= Fraction(p) ** ((-valuation(m, p) + 1) // 2)
    m2 = m * s * s
    assert m2.denominator == 1 and m2 > 0
    # at each active odd prime, the maximal completion of m'' q^{-1} Z_p^n
    # is the local solution lattice; complete it to a global integer
    # lattice that is Z_l^n at every other prime, then intersect
    active = sorted(
        p for p in bad if p != 2 and (valuation(m2, p) > 0 or valuation(detq, p) != 0)
    )
    row_lattices = []
    for p in active:
        ctx = PadicContext(p, 12)
        lam0 = PadicLattice(ctx, mat_scale(m2, qinv), _sf(q))
        lam = maximal_completion(lam0, valuation(m2, p))
        rows = _rows_of_integer_lattice(lam.basis)
        # pad with p^K Z^n (inside the local lattice) so the other primes
        # see the full Z^n
        kexp = valuation(det(lam.basis), p)
        pad = [[p**kexp if i == j else 0 for j in range(n)] for i in range(n)]
        row_lattices.append(hnf(rows + pad))
    if row_lattices:
        glued = lattice_intersection(row_lattices, n) if len(row_lattices) > 1 else row_lattices[0]
    else:
        glued = [[int(x) for x in row] for row in identity(n)]
    bstar = transpose(mat(glued))
    u = mat_scale(1 / m2, mat_mul(mat_mul(transpose(bstar), q), bstar))
    if not all(x.denominator == 1 for row in u for x in row) or abs(det(u)) != 1:
        return _oracle_fallback(inst, "glued Gram is not unimodular (dyadic obstruction)")
    t = identity_form_decomposition(u)
    if t is None:
        return _oracle_fallback(inst, "unimodular Gram is not in the class of I_n")
    b = mat_mul(bstar, inverse(t))
    res = BoundResult(
        b=(b,),
        value=int(m2),
        norm_b=abs(det(b)) ** gamma,
        norm_q=inst.norm_q(),
        d=inst.d,
        method="lattice-glue",
        notes={"m2": str(m2), "active_primes": active},
    )
    verify_result(inst, res)
    return res


def _leading_ok(g) -> bool:
    n = len(g)
    a = [row[:] for row in g]
    for k in range(n):
        if a[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            if a[i][k] != 0:
                f = a[i][k] / a[k][k]
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return True


def _rows_of_integer_lattice(basis) -> list[list[int]]:
    rows = transpose(basis)
    den = 1
    for row in rows:
        for x in row:
            if x.denominator != 1:
                raise DegreeBoundError("glued lattice is not integral")
    return hnf([[int(x) for x in row] for row in rows])


def identity_form_decomposition(u) -> list | None:
    """T in GL_n(Z) with u = T^T T for a positive definite unimodular
    integral Gram in the class of I_n: greedy reduction, then recursive
    norm-1 splitting along integral orthogonal projections.  None when the
    search finds no norm-1 vector (the Gram is not in the I_n class, or it
    is too skew for the bounded search)."""
    n = len(u)

    def greedy_reduce(g, emb):
        changed = True
        guard = 0
        while changed and guard < 10**4:
            changed = False
            guard += 1
            k = len(g)
            for i in range(k):
                for j in range(k):
                    if i == j or g[j][j] == 0:
                        continue
                    c = -round(Fraction(g[i][j], g[j][j]))
                    if c and g[i][i] + 2 * c * g[i][j] + c * c * g[j][j] < g[i][i]:
                        for r in range(n):
                            emb[r][i] += c * emb[r][j]
                        for r in range(k):
                            g[r][i] += c * g[r][j]
                        for r in range(k):
                            g[i][r] += c * g[j][r]
                        changed = True
        return g, emb

    def rec(g, emb):
        k = len(g)
        if k == 0:
            return []
        g, emb = greedy_reduce(g, emb)
        x = _find_norm_one(g, k)
        if x is None:
            return None
        x_orig = [sum(emb[r][i] * x[i] for i in range(k)) for r in range(n)]
        pair = [sum(g[i][j] * x[j] for j in range(k)) for i in range(k)]
        rows = [
            [(1 if t == i else 0) - pair[i] * x[t] for t in range(k)] for i in range(k)
        ]
        comp = hnf([[int(v) for v in row] for row in rows])
        if len(comp) != k - 1:
            return None
        new_g = [
            [
                sum(v[i] * g[i][j] * w[j] for i in range(k) for j in range(k))
                for w in comp
            ]
            for v in comp
        ]
        new_emb = [
            [sum(emb[r][t] * v[t] for t in range(k)) for v in comp] for r in range(n)
        ]
        rest = rec(new_g, new_emb)
        if rest is None:
            return None
        return [x_orig] + rest

    g0 = [[int(x) for x in row] for row in u]
    cols = rec(g0, [[Fraction(int(i == j)) for j in range(n)] for i in range(n)])
    if cols is None:
        return None
    v = [[cols[c][r] for c in range(n)] for r in range(n)]
    # columns of v are u-orthonormal: v^T u v = I, so u = (v^{-1})^T v^{-1}
    t = inverse(mat(v))
    if mat_mul(transpose(t), t) != mat(u):
        return None
    return t


def _find_norm_one(g, k) -> list | None:
    """An integer vector of norm 1 for a reduced positive definite Gram, by
    bounded enumeration (box from the diagonal)."""
    if k == 0:
        return None
    if any(g[i][i] == 1 for i in range(k)):
        i = next(i for i in range(k) if g[i][i] == 1)
        return [1 if t == i else 0 for t in range(k)]
    bound = 3
    best = None
    for cand in product(range(-bound, bound + 1), repeat=k):
        if all(c == 0 for c in cand):
            continue
        val = sum(cand[i] * g[i][j] * cand[j] for i in range(k) for j in range(k))
        if val == 1:
            best = list(cand)
            break
    return best


def _content(xs) -> int:
    from math import gcd

    c = 0
    for x in xs:
        c = gcd(c, int(x))
    return c


# ---------------------------------------------------------------------------
# Oracle


def brute_force_oracle(
    inst: BoundInstance,
    norm_cap: Fraction,
    max_radius: int = 24,
    budget: int = 2_000_000,
    extra_shells: int = 2,
) -> BoundResult | None:
    """Minimum-norm b in the explored coordinate box with b^dagger q b in
    Z - {0} and Nm(b) <= norm_cap.  Boxes grow by shells; after the first
    hit a fixed number of further shells is still explored.  Returns None
    when the box is exhausted without a hit; raises OracleBudgetError when
    the budget dies first."""
    A = inst.algebra
    order = inst.order
    dim = A.dim_q
    norm_cap = frac(norm_cap)
    canonical = order.basis_matrix_is_identity()
    best: tuple | None = None
    explored = 0
    found_radius = None
    # per-element evaluation cost grows ~dim^2; keep the total work flat
    budget = min(budget, max(20_000, 2_000_000 // (dim * dim)))
    # and keep the box within the element budget: (2r+1)^dim <= ~budget
    radius_cap = 1
    while (2 * (radius_cap + 1) + 1) ** dim <= budget:
        radius_cap += 1
    max_radius = min(max_radius, radius_cap)
    for radius in range(1, max_radius + 1):
        if found_radius is not None and radius > found_radius + extra_shells:
            break
        for coords in _shell(dim, radius):
            explored += 1
            if explored > budget:
                if best is not None:
                    break
                raise OracleBudgetError(radius)
            if canonical:
                b = A.from_qcoords([Fraction(c) for c in coords])
            else:
                b = order.element_from_coordinates([Fraction(c) for c in coords])
            val = A.is_rational_scalar(A.mul(A.mul(apply_involution(A, b), inst.q), b))
            if val is None or val == 0 or val.denominator != 1:
                continue
            nb = norm(A, b, inst.spec)
            if nb > norm_cap:
                continue
            key = (nb, coords)
            if best is None or key < best[0]:
                best = (key, b, int(val))
                if found_radius is None:
                    found_radius = radius
        if explored > budget:
            break
    if best is None:
        return None
    res = BoundResult(
        b=best[1],
        value=best[2],
        norm_b=best[0][0],
        norm_q=inst.norm_q(),
        d=inst.d,
        method="oracle",
        notes={"explored": explored},
    )
    verify_result(inst, res)
    return res


def _shell(dim: int, radius: int):
    """Integer points with max-norm exactly `radius`, lexicographic,
    generated without revisiting the box interior."""
    if dim == 1:
        yield (-radius,)
        yield (radius,)
        return
    for x0 in range(-radius, radius + 1):
        if abs(x0) == radius:
            for rest in product(range(-radius, radius + 1), repeat=dim - 1):
                yield (x0,) + rest
        else:
            for rest in _shell(dim - 1, radius):
                yield (x0,) + rest


def _cleared_similitude_result(inst: BoundInstance) -> BoundResult | None:
    """The paper's trivial candidate: clear denominators of a; then
    (t a)^dagger q (t a) = t^2 m is a nonzero integer and t a is in R."""
    if inst.a is None:
        return None
    from math import gcd

    coords = inst.order.coordinates(inst.a)
    t = 1
    for c in coords:
        t = t * c.denominator // gcd(t, c.denominator)
    A = inst.algebra
    b = A.scale(Fraction(t), inst.a)
    val = inst.m * t * t
    if val.denominator != 1:
        return None
    return BoundResult(
        b=b,
        value=int(val),
        norm_b=norm(A, b, inst.spec),
        norm_q=inst.norm_q(),
        d=inst.d,
        method="cleared-similitude",
    )


def _oracle_fallback(inst: BoundInstance, reason: str) -> BoundResult:
    direct = _cleared_similitude_result(inst)
    cap = direct.norm_b if direct is not None else inst.norm_q() ** (2 * inst.d)
    try:
        res = brute_force_oracle(inst, cap)
    except OracleBudgetError:
        res = None
    if res is None:
        res = direct
    elif direct is not None and direct.norm_b < res.norm_b:
        res = direct
    if res is None:
        raise DegreeBoundError(f"{reason}; oracle found no solution either")
    res.method = res.method if res.method == "cleared-similitude" else "oracle-fallback"
    res.notes["fallback_reason"] = reason
    verify_result(inst, res)
    return res


def solve(inst: BoundInstance) -> BoundResult:
    """Dispatch: commutative fields to the ideal algorithm, rational matrix
    algebras to the lattice glue, everything else to the oracle."""
    f0 = inst.algebra.factors[0]
    if len(inst.algebra.factors) == 1 and not f0.matrix_size and isinstance(
        f0.ring, (RationalRing, QuadRing)
    ):
        return solve_commutative(inst)
    if len(inst.algebra.factors) == 1 and f0.matrix_size and isinstance(f0.ring, RationalRing):
        return solve_split_matrix(inst)
    return _oracle_fallback(inst, "no specialized route for this algebra")


# ---------------------------------------------------------------------------
# Constant measurement


@dataclass
class ConstantReport:
    entries: list[dict]
    empirical_c_squared: Fraction

    def as_json_dict(self) -> dict:
        return {
            "entries": self.entries,
            "empirical_c_squared": str(self.empirical_c_squared),
        }


def measure_constant(instances: list[BoundInstance]) -> ConstantReport:
    """Run solver and oracle on a shared-(R, dagger, Nm) batch; the maximal
    achieved ratio is the empirical constant (reported squared to stay in
    exact arithmetic)."""
    if not instances:
        raise DegreeBoundError("empty batch")
    ref = (instances[0].algebra, instances[0].spec.gammas)
    entries = []
    cmax = Fraction(0)
    for inst in instances:
        if (inst.algebra, inst.spec.gammas) != ref:
            raise DegreeBoundError("instances must share (R, dagger, Nm)")
        res = solve(inst)
        try:
            oracle = brute_force_oracle(inst, res.norm_b)
        except OracleBudgetError:
            oracle = None
        entry = {
            "norm_q": str(res.norm_q),
            "solver_norm_b": str(res.norm_b),
            "solver_value": res.value,
            "method": res.method,
            "ratio_squared": str(res.achieved_ratio_squared),
            "oracle_found_leq": oracle is not None,
            "oracle_norm_b": str(oracle.norm_b) if oracle else None,
        }
        entries.append(entry)
        cmax = max(cmax, res.achieved_ratio_squared)
    return ConstantReport(entries, cmax)


# ---------------------------------------------------------------------------
# Commutative-subalgebra integrality (the square-root lemma ingredient)


def torus_conductor(order: OrderR, x: tuple) -> int:
    """A constant c with: for all x' in L = Q[x], x'^2 in R implies
    c x' in R.  Takes c = [o_L : Z[x]], the conductor of the quadratic
    order Z[x] in the maximal order of L, read off the discriminant of the
    minimal polynomial of x.  (Z[x] is inside R cap L, so c o_L is too.)

    Requires x to be a non-rational element of the order generating an
    etale quadratic subalgebra."""
    A = order.algebra
    if not order.contains(x):
        raise DegreeBoundError("x must lie in the order")
    one = A.one()
    coords_one = A.to_qcoords(one)
    coords_x = A.to_qcoords(x)
    coords_x2 = A.to_qcoords(A.mul(x, x))
    import itertools

    pair = None
    nvars = len(coords_one)
    for i, j in itertools.combinations(range(nvars), 2):
        d = coords_x[i] * coords_one[j] - coords_x[j] * coords_one[i]
        if d != 0:
            alpha = (coords_x2[i] * coords_one[j] - coords_x2[j] * coords_one[i]) / d
            beta = (coords_x[i] * coords_x2[j] - coords_x[j] * coords_x2[i]) / d
            pair = (alpha, beta)
            break
    if pair is None:
        raise DegreeBoundError("x is rational: the lemma is trivial")
    alpha, beta = pair
    rhs = [alpha * cx + beta * co for cx, co in zip(coords_x, coords_one)]
    if coords_x2 != rhs:
        raise DegreeBoundError("x does not generate a quadratic subalgebra")
    if alpha.denominator != 1 or beta.denominator != 1:
        raise DegreeBoundError("x must be integral over Z")
    dzx = int(alpha * alpha + 4 * beta)  # disc of Z[x] for x^2 = alpha x + beta
    if dzx == 0:
        raise DegreeBoundError("degenerate (non-etale) subalgebra")
    f = 1
    for pr, e in factorint(abs(dzx)).items():
        f *= pr ** (e // 2)
    while f > 1:
        rem = dzx // (f * f) if dzx % (f * f) == 0 else None
        if rem is not None and rem % 4 in (0, 1):
            break
        f = _shrink_square_divisor(f, dzx)
    return f


def _shrink_square_divisor(f: int, dzx: int) -> int:
    for pr in sorted(factorint(f).keys(), reverse=True):
        cand = f // pr
        if dzx % (cand * cand) == 0:
            return cand
    return 1
