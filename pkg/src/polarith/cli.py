"""Batch command-line surface: JSON in, JSON out, exact values only.

Exit codes: 0 = verified positive result, 2 = computed mathematical
negative (e.g. "not isometric"), 1 = error (schema violation, precondition
failure, resource cap).  Output is byte-identical for identical input:
keys are sorted and every numeric value is an exact integer or a fraction
string, never a float.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .degree_bound import (
    BoundInstance,
    DegreeBoundError,
    OracleBudgetError,
    matrix_instance,
    measure_constant,
    quadfield_instance,
    rational_instance,
    solve,
)
from .exact import ExactError, valuation
from .forms import (
    FormError,
    GramForm,
    fourth_power_isometric,
    invariants,
    isometric,
)
from .algebras import QuadRing, QuaternionRing, RationalRing
from .lattices_local import (
    LatticeError,
    PadicContext,
    PadicLattice,
    is_maximal,
    maximal_completion,
    scale,
    split_local_solve,
)
from .linalg import det, frac, mat
from .quadfield import QuadField, QuadFieldError, ResourceError
from .forms import EtalePairRing, PairElem
from .hecke_classes import (
    HeckeError,
    equivalence_witness,
    generate_classes,
    pairwise_matrix,
)


class InputError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _rat(v, where: str) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise InputError("schema:not-exact", f"{where}: floats are not accepted")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError("schema:bad-rational", f"{where}: {v!r} ({exc})") from None
    raise InputError("schema:bad-rational", f"{where}: expected int or fraction string")


def _rat_str(x: Fraction) -> str:
    return str(x)


def _matrix(v, where: str):
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise InputError("schema:bad-matrix", f"{where}: expected a list of rows")
    n = len(v)
    if any(len(r) != n for r in v):
        raise InputError("schema:bad-matrix", f"{where}: matrix must be square")
    return [[_rat(x, where) for x in row] for row in v]


def _serialize_matrix(m) -> list:
    return [[_rat_str(x) for x in row] for row in m]


# ---------------------------------------------------------------------------
# Form (de)serialization


def parse_base(doc, where: str):
    if not isinstance(doc, dict) or "type" not in doc:
        raise InputError("schema:bad-base", f"{where}: base needs a 'type'")
    t = doc["type"]
    if t == "Q":
        return RationalRing()
    if t == "quadfield":
        try:
            return QuadRing(QuadField(int(doc["D"])))
        except (KeyError, QuadFieldError, TypeError) as exc:
            raise InputError("schema:bad-field", f"{where}: {exc}") from None
    if t == "quaternion":
        a = _rat(doc.get("a"), where + ".a")
        b = _rat(doc.get("b"), where + ".b")
        return QuaternionRing(RationalRing(), a, b)
    if t == "etale-pair":
        return EtalePairRing()
    raise InputError("schema:bad-base", f"{where}: unknown base type {t!r}")


def serialize_base(ring) -> dict:
    if isinstance(ring, RationalRing):
        return {"type": "Q"}
    if isinstance(ring, QuadRing):
        return {"type": "quadfield", "D": ring.field.D}
    if isinstance(ring, QuaternionRing):
        return {"type": "quaternion", "a": _rat_str(ring.a), "b": _rat_str(ring.b)}
    if isinstance(ring, EtalePairRing):
        return {"type": "etale-pair"}
    raise InputError("internal:base", "unserializable base")


def parse_form(doc, where: str = "form") -> GramForm:
    if not isinstance(doc, dict):
        raise InputError("schema:bad-form", f"{where}: expected an object")
    for key in ("kind", "base", "gram"):
        if key not in doc:
            raise InputError("schema:missing-field", f"{where}: missing {key!r}")
    ring = parse_base(doc["base"], where + ".base")
    rows = doc["gram"]
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise InputError("schema:bad-matrix", f"{where}.gram: expected rows")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InputError("schema:bad-matrix", f"{where}.gram: must be square")

    def entry(v, w):
        if isinstance(ring, RationalRing):
            return _rat(v, w)
        if isinstance(ring, QuadRing):
            if not isinstance(v, list) or len(v) != 2:
                raise InputError("schema:bad-entry", f"{w}: quadratic entries are [x, y] pairs")
            from .quadfield import QuadElem

            return QuadElem(ring.field, _rat(v[0], w), _rat(v[1], w))
        if isinstance(ring, QuaternionRing):
            if not isinstance(v, list) or len(v) != 4:
                raise InputError("schema:bad-entry", f"{w}: quaternion entries are 4-tuples")
            return ring.from_qcoords([_rat(x, w) for x in v])
        if isinstance(ring, EtalePairRing):
            if not isinstance(v, list) or len(v) != 2:
                raise InputError("schema:bad-entry", f"{w}: pair entries are [x, y]")
            return PairElem(_rat(v[0], w), _rat(v[1], w))
        raise InputError("schema:bad-base", f"{w}: unsupported base")

    gram = [[entry(rows[i][j], f"{where}.gram[{i}][{j}]") for j in range(n)] for i in range(n)]
    try:
        return GramForm(doc["kind"], ring, gram)
    except FormError as exc:
        raise InputError("invariant:gram", f"{where}: invariant violation: {exc}") from None


def serialize_form_entry(ring, x):
    if isinstance(ring, RationalRing):
        return _rat_str(x)
    if isinstance(ring, QuadRing):
        return [_rat_str(x.x), _rat_str(x.y)]
    if isinstance(ring, QuaternionRing):
        return [_rat_str(c) for c in ring.to_qcoords(x)]
    if isinstance(ring, EtalePairRing):
        return [_rat_str(x.x), _rat_str(x.y)]
    raise InputError("internal:base", "unserializable entry")


def serialize_invariants(inv) -> dict:
    out: dict = {"kind": inv.kind, "base": inv.base, "dim": inv.dim, "complete": inv.complete}
    if inv.det_class is not None:
        out["det_square_class"] = inv.det_class.representative
    if inv.det_element is not None:
        if hasattr(inv.det_element, "x"):
            out["det_element"] = [_rat_str(inv.det_element.x), _rat_str(inv.det_element.y)]
        else:
            out["det_element"] = _rat_str(frac(inv.det_element))
    if inv.det_is_norm is not None:
        out["det_is_norm"] = inv.det_is_norm
    if inv.hasse is not None:
        out["hasse_minus_one_places"] = [
            "oo" if v.is_real else v.p for v in inv.hasse_minus_places()
        ]
    if inv.signatures is not None:
        out["signatures"] = [list(s) for s in inv.signatures]
    return out


# ---------------------------------------------------------------------------
# Verb handlers: each returns (exit_code, payload)


def cmd_classify_form(doc, args):
    f = parse_form(doc.get("form", doc))
    inv = invariants(f)
    return 0, {"invariants": serialize_invariants(inv)}


def cmd_isometric(doc, args):
    f1 = parse_form(doc["form1"], "form1")
    f2 = parse_form(doc["form2"], "form2")
    dec = isometric(f1, f2)
    payload = {"isometric": bool(dec), "complete": dec.complete, "reason": dec.reason}
    return (0 if dec else 2), payload


def cmd_fourth_power_check(doc, args):
    f1 = parse_form(doc["form1"], "form1")
    f2 = parse_form(doc["form2"], "form2")
    ok, cert = fourth_power_isometric(f1, f2)
    return (0 if ok else 1), {"isometric_fourth_powers": ok, "certificate": cert}


def cmd_maximal_lattice(doc, args):
    p = doc.get("p")
    if not isinstance(p, int):
        raise InputError("schema:missing-field", "p must be an integer prime")
    precision = doc.get("precision", args.precision)
    try:
        ctx = PadicContext(p, precision)
    except LatticeError as exc:
        raise InputError("precondition:p", str(exc)) from None
    form = parse_form(doc["form"], "form")
    basis = _matrix(doc["basis"], "basis")
    target = doc.get("target_scale", 0)
    if not isinstance(target, int):
        raise InputError("schema:bad-field", "target_scale must be an integer")
    L = PadicLattice(ctx, basis, form)
    out = maximal_completion(L, target)
    return 0, {
        "basis": _serialize_matrix(out.basis),
        "gram": _serialize_matrix(out.gram()),
        "scale": scale(out),
        "maximal": is_maximal(out),
        "contains_input": out.contains(L),
    }


def cmd_local_solve(doc, args):
    p = doc.get("p")
    if not isinstance(p, int):
        raise InputError("schema:missing-field", "p must be an integer prime")
    precision = doc.get("precision", args.precision)
    ctx = PadicContext(p, precision)
    q = _matrix(doc["q"], "q")
    a = _matrix(doc["a"], "a")
    m_prime = _rat(doc["m_prime"], "m_prime")
    b = split_local_solve(q, a, m_prime, ctx)
    vdet = valuation(det(mat(b)), p)
    return 0, {
        "b": _serialize_matrix(b),
        "value": _rat_str(m_prime),
        "local_norm_exponent_of_det": vdet,
    }


def _parse_general_algebra(alg, where: str):
    """The full factor-list algebra descriptor: kind tags, structure
    constants, involution tag plus conjugating element, swap pairs and
    gammas."""
    from .algebras import (
        AlgebraWithInvolution,
        NormSpec,
        OrderR,
        SimpleFactor,
        _freeze,
    )
    from .quadfield import QuadElem

    factors = []
    for i, fd in enumerate(alg.get("factors", [])):
        kind = fd.get("kind")
        w = f"{where}.factors[{i}]"
        if kind == "rational":
            factors.append(SimpleFactor(RationalRing()))
        elif kind == "quadfield":
            ring = QuadRing(QuadField(int(fd["D"])))
            factors.append(SimpleFactor(ring, involution=fd.get("involution", "identity")))
        elif kind == "quaternion":
            ring = QuaternionRing(RationalRing(), _rat(fd["a"], w), _rat(fd["b"], w))
            factors.append(SimpleFactor(ring, involution="canonical"))
        elif kind == "matrix":
            base = parse_base(fd.get("base", {"type": "Q"}), w + ".base")
            n = int(fd["n"])
            z = fd.get("z")
            zf = _freeze(_matrix(z, w + ".z")) if z is not None else None
            factors.append(
                SimpleFactor(base, matrix_size=n, involution="conjugate_transpose", z=zf)
            )
        else:
            raise InputError("schema:bad-algebra", f"{w}: unknown factor kind {kind!r}")
    swap_pairs = tuple(tuple(p) for p in alg.get("swap_pairs", []))
    A = AlgebraWithInvolution(tuple(factors), swap_pairs)
    gammas = tuple(int(g) for g in alg.get("gammas", [1] * len(factors)))
    spec = NormSpec(A, gammas)
    return A, spec


def _general_instance(doc, where: str) -> BoundInstance:
    from .algebras import AlgebraError, OrderR

    try:
        A, spec = _parse_general_algebra(doc["algebra"], where)
        basis_doc = doc.get("order_basis")
        if basis_doc is None:
            basis = tuple(A.basis())
        else:
            basis = tuple(
                A.from_qcoords([_rat(c, f"{where}.order_basis") for c in row])
                for row in basis_doc
            )
        order = OrderR(A, basis)
        q = A.from_qcoords([_rat(c, f"{where}.q") for c in doc["q"]])
        a = A.from_qcoords([_rat(c, f"{where}.a") for c in doc["a"]])
        return BoundInstance(A, spec, order, q, a)
    except (AlgebraError, QuadFieldError) as exc:
        raise InputError("precondition:algebra", f"{where}: {exc}") from None


def parse_instance(doc, where: str = "instance") -> BoundInstance:
    alg = doc.get("algebra")
    if not isinstance(alg, dict) or "type" not in alg:
        raise InputError("schema:bad-algebra", f"{where}: algebra needs a type")
    t = alg["type"]
    if t == "general":
        return _general_instance(doc, where)
    try:
        if t == "rational":
            return rational_instance(int(_rat(doc["q"], "q")), _rat(doc.get("a", 1), "a"))
        if t == "quadfield":
            D = alg.get("D")
            if not isinstance(D, int):
                raise InputError("schema:bad-field", f"{where}: D must be an integer")
            involution = alg.get("involution", "identity")
            q = doc["q"]
            a = doc["a"]
            return quadfield_instance(
                D,
                (_rat(q[0], "q"), _rat(q[1], "q")),
                (_rat(a[0], "a"), _rat(a[1], "a")),
                involution,
            )
        if t == "matrix":
            n = alg.get("n")
            if not isinstance(n, int):
                raise InputError("schema:bad-field", f"{where}: n must be an integer")
            return matrix_instance(n, _matrix(doc["q"], "q"), _matrix(doc["a"], "a"),
                                   alg.get("gamma", 1))
    except (KeyError, IndexError, TypeError) as exc:
        raise InputError("schema:bad-instance", f"{where}: {exc}") from None
    except (QuadFieldError, DegreeBoundError) as exc:
        raise InputError("precondition:instance", f"{where}: {exc}") from None
    raise InputError("schema:bad-algebra", f"{where}: unknown algebra type {t!r}")


def serialize_element(inst: BoundInstance, x) -> object:
    if len(inst.algebra.factors) == 1:
        f0 = inst.algebra.factors[0]
        if f0.matrix_size:
            return _serialize_matrix(x[0])
        comp = x[0]
        if isinstance(comp, Fraction):
            return _rat_str(comp)
        if hasattr(comp, "x"):
            return [_rat_str(comp.x), _rat_str(comp.y)]
    return [_rat_str(c) for c in inst.algebra.to_qcoords(x)]


def cmd_degree_bound(doc, args):
    inst = parse_instance(doc.get("instance", doc))
    res = solve(inst)
    payload = {
        "b": serialize_element(inst, res.b),
        "value": res.value,
        "norm_b": _rat_str(res.norm_b),
        "norm_q": _rat_str(res.norm_q),
        "rank_d": res.d,
        "achieved_ratio_squared": _rat_str(res.achieved_ratio_squared),
        "method": res.method,
        "notes": {k: v if isinstance(v, (bool, int, list)) else str(v) for k, v in res.notes.items()},
    }
    if args.norm_cap is not None:
        from .degree_bound import brute_force_oracle

        cap = _rat(args.norm_cap, "--norm-cap")
        oracle = brute_force_oracle(inst, cap)
        payload["oracle"] = {
            "cap": _rat_str(cap),
            "found": oracle is not None,
            "norm_b": _rat_str(oracle.norm_b) if oracle else None,
            "value": oracle.value if oracle else None,
        }
    return 0, payload


def cmd_hecke_classes(doc, args):
    D = doc.get("D")
    count = doc.get("count")
    if not isinstance(D, int) or not isinstance(count, int):
        raise InputError("schema:missing-field", "need integer D and count")
    field = QuadField(D)
    reps = generate_classes(field, count, prime_cap=doc.get("prime_cap", 10_000))
    ser = []
    for r in reps:
        ser.append(
            {
                "coords": [_rat_str(r.q.x), _rat_str(r.q.y)],
                "norm": _rat_str(r.q.norm()),
                "source_prime": r.source_prime,
            }
        )
    matrix_eq = pairwise_matrix(reps)
    witnesses = []
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if matrix_eq[i][j]:
                w = equivalence_witness(reps[i].q, reps[j].q)
                witnesses.append({"i": i, "j": j, "n": w[0], "u": [_rat_str(w[1].x), _rat_str(w[1].y)]})
    payload = {
        "representatives": ser,
        "pairwise_equivalent": matrix_eq,
        "witnesses": witnesses,
    }
    if args.height:
        from .hecke_classes import exhaustive_witness_search

        confirmed = True
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                if not matrix_eq[i][j]:
                    if exhaustive_witness_search(reps[i].q, reps[j].q, args.height) is not None:
                        confirmed = False
        payload["negatives_confirmed_at_height"] = {"height": args.height, "confirmed": confirmed}
    return 0, payload


def cmd_measure_constant(doc, args):
    raw = doc.get("instances")
    if not isinstance(raw, list) or not raw:
        raise InputError("schema:missing-field", "instances must be a nonempty list")
    instances = [parse_instance(d, f"instances[{i}]") for i, d in enumerate(raw)]
    report = measure_constant(instances)
    return 0, report.as_json_dict()


VERBS = {
    "classify-form": cmd_classify_form,
    "isometric": cmd_isometric,
    "fourth-power-check": cmd_fourth_power_check,
    "maximal-lattice": cmd_maximal_lattice,
    "local-solve": cmd_local_solve,
    "degree-bound": cmd_degree_bound,
    "hecke-classes": cmd_hecke_classes,
    "measure-constant": cmd_measure_constant,
}


def validate_only(verb: str, doc) -> list[dict]:
    """Schema errors without running the computation."""
    errors = []
    try:
        if verb == "classify-form":
            parse_form(doc.get("form", doc))
        elif verb in ("isometric", "fourth-power-check"):
            parse_form(doc["form1"], "form1")
            parse_form(doc["form2"], "form2")
        elif verb == "maximal-lattice":
            if not isinstance(doc.get("p"), int):
                raise InputError("schema:missing-field", "p must be an integer")
            parse_form(doc["form"], "form")
            _matrix(doc["basis"], "basis")
        elif verb == "local-solve":
            _matrix(doc["q"], "q")
            _matrix(doc["a"], "a")
            _rat(doc["m_prime"], "m_prime")
        elif verb == "degree-bound":
            parse_instance(doc.get("instance", doc))
        elif verb == "hecke-classes":
            if not isinstance(doc.get("D"), int) or not isinstance(doc.get("count"), int):
                raise InputError("schema:missing-field", "need integer D and count")
            QuadField(doc["D"])
        elif verb == "measure-constant":
            for i, d in enumerate(doc.get("instances", [])):
                parse_instance(d, f"instances[{i}]")
        else:
            raise InputError("schema:unknown-verb", f"unknown verb {verb!r}")
    except InputError as exc:
        errors.append({"code": exc.code, "message": str(exc)})
    except KeyError as exc:
        errors.append({"code": "schema:missing-field", "message": f"missing {exc}"})
    except (QuadFieldError, FormError, ExactError) as exc:
        errors.append({"code": "invariant:violation", "message": str(exc)})
    return errors


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="polarith",
        description="Exact form classification, p-adic lattices, and bounded-norm solvers",
    )
    parser.add_argument("verb", choices=list(VERBS) + ["validate"])
    parser.add_argument("input", nargs="?", help="input JSON file ('-' for stdin)")
    parser.add_argument("--validate-verb", help="verb whose schema `validate` checks")
    parser.add_argument("-o", "--output", default="-")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--precision", type=int, default=12)
    parser.add_argument("--norm-cap", default=None)
    parser.add_argument("--height", type=int, default=3)
    args = parser.parse_args(argv)

    try:
        if args.input in (None, "-"):
            doc = json.load(sys.stdin)
        else:
            with open(args.input) as fh:
                doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _emit({"error": {"code": "io:input", "message": str(exc)}}, args)
        return 1

    if args.verb == "validate":
        verb = args.validate_verb or doc.get("verb")
        if verb is None:
            _emit({"error": {"code": "schema:missing-field",
                             "message": "validate needs --validate-verb or a 'verb' field"}}, args)
            return 1
        errors = validate_only(verb, doc)
        _emit({"valid": not errors, "errors": errors}, args)
        return 0 if not errors else 1

    handler = VERBS[args.verb]
    try:
        code, payload = handler(doc, args)
    except InputError as exc:
        _emit({"error": {"code": exc.code, "message": str(exc)}}, args)
        return 1
    except (FormError, LatticeError, DegreeBoundError, HeckeError, QuadFieldError, ExactError) as exc:
        _emit({"error": {"code": "precondition:" + type(exc).__name__, "message": str(exc)}}, args)
        return 1
    except (ResourceError, OracleBudgetError) as exc:
        _emit({"error": {"code": "resource:budget", "message": str(exc)}}, args)
        return 1
    except KeyError as exc:
        _emit({"error": {"code": "schema:missing-field", "message": f"missing {exc}"}}, args)
        return 1
    _emit(payload, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
