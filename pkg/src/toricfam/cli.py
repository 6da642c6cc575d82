"""Command line front end: ``toricfam {analyze,fiber,family,bounds,selftest}``.

Problem files are TOML (or JSON with the same keys)::

    p = 2
    a = 1
    n = 1
    s = 1
    base = "torus"            # or "affine"
    fiber_space = "torus"     # or "affine"; or give S2 = [0, ...]
    ops = ["Sym(1)", "TensorPow(2)"]
    f = [{exp = [3], coef = 1}]
    P = [{gamma = [1], exp = [1], coef = 1}]

    [budgets]
    k_max = 6
    M = 6
    guard = 3

    [fiber]                   # optional point for the ``fiber`` command
    lambda = [1]
    degree = 1

A coefficient is an integer encoding of an element of F_q or a list of its
coordinates over F_p. Cyclotomic outputs are integer vectors on the basis
1, zeta_p, ..., zeta_p^(p-2).
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
import time
from fractions import Fraction

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .arith import CycInt, CycRat, ord_p
from .errors import (
    BudgetExceeded,
    DegreeViolation,
    FiberDegenerate,
    NoSolution,
    ToricError,
    Unverified,
    ValidationError,
)
from .euler import Verdict, euler_plan, euler_series, moment_oracle, reconstruct, verify
from .expsum import Mixed, fiber_lpoly, hodge_polygon, newton_polygon
from .family import (
    BoundProfile,
    FamilySpec,
    TensorPow,
    basis_weights,
    torus_base_bounds,
    affine_base_bounds,
    dwork_np_lower_bound,
    gamma_family,
    parse_linop,
    relative_polytope,
    w_gamma_min,
)
from .ffield import FieldTower, closed_points, expected_point_count
from .polytope import natural_period, poincare_series
from .toric import LaurentPoly, hodge_basis, is_nondegenerate, newton_data

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3, 4
ELEMENTS_PER_SECOND = 2e7  # rough throughput of the vectorised character sums
TABLE_ELEMENTS_PER_SECOND = 3e5  # building exp/log/trace tables


# ------------------------------------------------------------------ parsing


def _line_of(text: str, key: str):
    m = re.search(rf'^\s*"?{re.escape(key)}"?\s*[=:]', text, re.M)
    return text.count("\n", 0, m.start()) + 1 if m else None


class Problem:
    def __init__(self, data: dict, text: str = ""):
        self.text = text
        self.data = data
        self.spec, self.ops, self.budgets, self.fiber_point = self._build()

    def _err(self, msg, key):
        return ValidationError(msg, _line_of(self.text, key))

    def _int(self, key, default=None, src=None):
        src = self.data if src is None else src
        if key not in src:
            if default is None:
                raise self._err(f"missing required key {key!r}", key)
            return default
        val = src[key]
        if not isinstance(val, int) or isinstance(val, bool):
            raise self._err(f"{key!r} must be an integer", key)
        return val

    def _coef(self, tower: FieldTower, c, key):
        p = tower.p
        if isinstance(c, int) and not isinstance(c, bool):
            if not 0 <= c < tower.q:
                c %= p if tower.a == 1 else tower.q
            return c
        if isinstance(c, list) and all(isinstance(x, int) for x in c) and len(c) <= tower.a:
            return sum((x % p) * p**i for i, x in enumerate(c))
        raise self._err(f"bad coefficient {c!r}", key)

    def _build(self):
        d = self.data
        p, a = self._int("p"), self._int("a", 1)
        n, s = self._int("n"), self._int("s", 0)
        try:
            tower = FieldTower(p, a, d.get("modulus"))
        except ToricError as exc:
            raise self._err(str(exc), "p" if "prime" in str(exc) else "modulus") from exc
        f_terms = {}
        for t in d.get("f", []):
            exp = t.get("exp")
            if not isinstance(exp, list) or len(exp) != n:
                raise self._err(f"f term exponent {exp!r} must have length n = {n}", "f")
            c = self._coef(tower, t.get("coef", 1), "f")
            f_terms[tuple(exp)] = int(tower.base.add(f_terms.get(tuple(exp), 0), c))
        if not any(f_terms.values()):
            raise self._err("f must have at least one nonzero term", "f")
        P_terms = []
        for t in d.get("P", []):
            g, exp = t.get("gamma"), t.get("exp")
            if not isinstance(g, list) or len(g) != s or not isinstance(exp, list) or len(exp) != n:
                raise self._err(f"P term {t!r} has the wrong shape", "P")
            P_terms.append(((tuple(g), tuple(exp)), self._coef(tower, t.get("coef", 1), "P")))
        base = d.get("base", "torus")
        S2 = d.get("S2")
        fiber_space = d.get("fiber_space", "torus")
        if S2:
            fiber_space = Mixed(tuple(S2))
        try:
            spec = FamilySpec(tower, n, s, f_terms, P_terms, base, fiber_space)
            if P_terms:
                spec.validate()
        except ToricError as exc:
            key = "P" if "deformation" in str(exc) else "base"
            raise self._err(f"{type(exc).__name__}: {exc}", key) from exc
        try:
            ops = [parse_linop(x) for x in d.get("ops", ["Sym(1)"])]
        except ValidationError as exc:
            raise self._err(str(exc), "ops") from exc
        b = d.get("budgets", {})
        budgets = {
            "k_max": self._int("k_max", 6, b),
            "M": self._int("M", 6, b),
            "d_max": self._int("d_max", 4, b),
            "guard": b.get("guard"),
            "j_max": b.get("j_max"),
        }
        fp = d.get("fiber")
        point = None
        if fp:
            lam = fp.get("lambda", [])
            if len(lam) != s:
                raise self._err(f"fiber lambda must have length s = {s}", "lambda")
            point = (tuple(int(x) for x in lam), int(fp.get("degree", 1)))
        return spec, ops, budgets, point


def load_problem(path: str) -> Problem:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    text = raw.decode("utf-8", errors="replace")
    try:
        if path.endswith(".json"):
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(exc.msg, exc.lineno) from exc
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ValidationError(str(exc), int(m.group(1)) if m else None) from exc
    return Problem(data, text)


# --------------------------------------------------------------- reporting


def _plain(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, CycInt):
        return x.to_list()
    if isinstance(x, CycRat):
        return x.num.to_list() if x.den == 1 else {"num": x.num.to_list(), "den": x.den}
    if isinstance(x, Verdict):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


def claim(value, anchor: str) -> dict:
    """A numeric claim tagged with the result it instantiates."""
    return {"value": _plain(value), "anchor": anchor}


def _poly_vertices(poly):
    return [[x, str(y)] for x, y in poly.vertices]


def _collect_failures(obj) -> bool:
    if isinstance(obj, dict):
        if obj.get("status") == "Fail":
            return True
        return any(_collect_failures(v) for v in obj.values())
    if isinstance(obj, list):
        return any(_collect_failures(v) for v in obj)
    return False


# ---------------------------------------------------------------- commands


def _delta_report(f: LaurentPoly, k_max: int):
    nd = newton_data(f)
    delta = nd.delta
    out = {
        "vertices": [[str(x) for x in v] for v in delta.vertices],
        "faces_without_origin": [nd.face_vertices(F) for F in nd.faces],
        "volume": claim(delta.volume, "normalized-volume"),
        "D": delta.weight_fn.D,
        "fiber_degree": claim(int(delta.volume * _fact(f.n)), "fiber-degree-law"),
    }
    cert = is_nondegenerate(f, k_max)
    out["nondegenerate"] = (
        {"status": "CertifiedUpTo", "k": cert.k}
        if cert
        else {"status": "Degenerate", "face": cert.face, "witness": list(cert.witness), "k": cert.k}
    )
    return out, cert


def _fact(n):
    from math import factorial

    return factorial(n)


def cmd_analyze(prob: Problem) -> tuple[dict, list]:
    spec = prob.spec
    rep: dict = {"command": "analyze", "p": spec.p, "a": spec.tower.a, "n": spec.n, "s": spec.s, "base": spec.base}
    rep["delta"], cert = _delta_report(spec.f, prob.budgets["k_max"])
    weights = None
    if cert:
        B = hodge_basis(spec.f, spec.affine_vars)
        weights = B.weights
        rep["hodge_basis"] = {
            "monomials": [list(m) for m in B.monomials],
            "weights": claim(B.weights, "hodge-basis"),
            "count": claim(len(B), "hodge-basis-rank"),
        }
    N = spec.fiber_degree()
    polygons = []
    if not spec.P_terms:
        rep["gamma"] = None
        return rep, polygons
    gamma = relative_polytope(spec)
    per = natural_period(gamma)
    D = gamma.weight_fn.D
    pnum, st = poincare_series(gamma, period=per if per != D else None)
    rep["gamma"] = {
        "vertices": [[str(x) for x in v] for v in gamma.vertices],
        "span_dim": st,
        "volume": claim(gamma.volume, "relative-polytope-volume"),
        "D": D,
        "poincare_numerator": claim(pnum, "poincare-rationality"),
        "poincare_period": per if per != D else D,
        "forced_equal_degrees": claim(st < spec.s, "degree-window/torus-base"),
    }
    rep["gamma"]["w_gamma"] = claim(w_gamma_min(gamma), "divisibility/affine-base")
    bounds = {}
    for op in prob.ops:
        key = str(op)
        if spec.base == "affine":
            br = affine_base_bounds(
                gamma_family(spec),
                op,
                N,
                spec.n,
                delta=newton_data(spec.f).delta,
                basis_min_weight=basis_weights(op, weights)[1] if weights else None,
            )
            bounds[key] = {k: claim(v, f"{k}/affine-base") for k, v in br.to_json().items()}
        else:
            br = torus_base_bounds(gamma, spec.s, spec.n, op, N)
            bounds[key] = {k: claim(v, f"{k}/torus-base") for k, v in br.to_json().items()}
        if weights:
            prof = BoundProfile.from_basis_weights(spec.p, basis_weights(op, weights)[0])
            db = dwork_np_lower_bound(prof, gamma, spec.p, j_max=prob.budgets["j_max"], k=spec.s + spec.n * op.order)
            bounds[key]["dwork"] = {
                "d": db.d,
                "W": claim({j: c for j, c in db.W.items()}, "W-table"),
                "polygon": claim(_poly_vertices(db.polygon), "newton-polygon-lower-bound"),
                "degree_bound": claim(db.degree_bound, "degree-bound/general"),
                "total_degree": db.total_degree.to_json() if db.total_degree else None,
            }
            polygons.append((f"dwork[{key}]", db.polygon))
    rep["bounds"] = bounds
    return rep, polygons


def _fiber_poly(prob: Problem) -> LaurentPoly:
    spec = prob.spec
    if prob.fiber_point is None:
        return spec.f
    lam, deg = prob.fiber_point
    return spec.fiber(lam, spec.tower.a * deg)


def cmd_fiber(prob: Problem) -> tuple[dict, list]:
    spec = prob.spec
    G = _fiber_poly(prob)
    deg = prob.fiber_point[1] if prob.fiber_point else 1
    rep: dict = {"command": "fiber", "p": spec.p, "q": spec.q, "lambda": list(prob.fiber_point[0]) if prob.fiber_point else None}
    rep["delta"], cert = _delta_report(G, prob.budgets["k_max"])
    if not cert:
        rep["verdict"] = Verdict("Fail", "fiber is degenerate", list(cert.witness)).to_json()
        return rep, []
    B = hodge_basis(G, spec.affine_vars)
    N = len(B)
    space = Mixed(spec.affine_vars) if spec.affine_vars else "torus"
    try:
        P = fiber_lpoly(G, N, prob.budgets["guard"], space)
    except DegreeViolation as exc:
        rep["verdict"] = Verdict("Fail", str(exc), {"index": exc.index, "coefficient": _plain(exc.coefficient)}).to_json()
        return rep, []
    npoly = newton_polygon(P, spec.q, deg)
    hpoly = hodge_polygon(B)
    ok = npoly.lies_on_or_above(hpoly)
    rep["lpoly"] = claim([c.to_list() for c in P.coeffs], "fiber-L-polynomial")
    rep["degree"] = claim(P.degree, "fiber-degree-law")
    rep["newton_polygon"] = claim(_poly_vertices(npoly), "fiber-newton-polygon")
    rep["hodge_polygon"] = claim(_poly_vertices(hpoly), "hodge-polygon")
    rep["coincide"] = npoly == hpoly
    rep["verdict"] = Verdict("Pass" if ok else "Fail", "newton polygon lies on or above the hodge polygon").to_json()
    return rep, [("newton", npoly), ("hodge", hpoly)]


def cost_estimate(spec: FamilySpec, op, M: int, guard=None) -> float:
    """Rough wall-clock seconds for euler_series: character sums plus field tables."""
    q = spec.q
    evals = 0.0
    levels = set()
    for d, (_, top) in euler_plan(spec, op, M, guard).items():
        npts = expected_point_count(q, spec.s, d, spec.base)
        evals += npts * sum(q ** (d * r * spec.n) for r in range(1, top + 1))
        levels.update(d * r for r in range(1, top + 1))
    tables = sum(q**lv for lv in levels)
    return evals / ELEMENTS_PER_SECOND + tables / TABLE_ELEMENTS_PER_SECOND


def cmd_family(prob: Problem, budget_seconds=None, force=False, inject_fault=False) -> tuple[dict, list]:
    spec = prob.spec
    M = prob.budgets["M"]
    guard = prob.budgets["guard"]
    rep: dict = {"command": "family", "p": spec.p, "q": spec.q, "base": spec.base, "M": M}
    N = spec.fiber_degree()
    seconds = sum(cost_estimate(spec, op, M, guard) for op in prob.ops)
    print(f"cost model: about {seconds:.1f} s", file=sys.stderr)
    if budget_seconds is not None and seconds > budget_seconds and not force:
        raise BudgetExceeded(f"estimated {seconds:.1f} s exceeds the budget of {budget_seconds} s")
    rep["fiber_degree"] = claim(N, "fiber-degree-law")
    gamma = relative_polytope(spec)
    results = {}
    for op in prob.ops:
        key = str(op)
        r: dict = {}
        series = euler_series(spec, op, M, guard)
        r["series"] = claim(series.coeffs, "euler-product")
        r["regimes"] = series.meta["regimes"]
        table = []
        for j, c in enumerate(series.coeffs):
            v = ord_p(c, spec.p, spec.tower.a)
            table.append([j, None if v.is_infinite else v.ord_q])
        r["divisibility_table"] = claim(table, "ord_q of series coefficients")
        if isinstance(op, TensorPow):
            oracle = moment_oracle(spec, op.k, M)
            if inject_fault:
                oracle.coeffs[-1] = oracle.coeffs[-1] + 1
            diff = series.first_difference(oracle)
            r["oracle"] = (
                Verdict("Pass", "euler product equals moment oracle")
                if diff is None
                else Verdict("Fail", "first differing coefficient", diff)
            ).to_json()
        if spec.base == "affine":
            caps = affine_base_bounds(gamma_family(spec), op, N, spec.n)["total_degree"].floor
        else:
            caps = torus_base_bounds(gamma, spec.s, spec.n, op, N)["total_degree"].floor
        rational = None
        try:
            rational = reconstruct(series, min(caps, M), min(caps, M))
            r["rational"] = {
                "num": claim(rational.num, "rational-function"),
                "den": claim(rational.den, "rational-function"),
                "provenance": rational.provenance,
            }
        except (NoSolution, Unverified) as exc:
            r["rational"] = {"status": type(exc).__name__, "detail": str(exc)}
        checks = verify(spec, op, series, rational)
        r["checks"] = {k: v.to_json() for k, v in checks.items()}
        results[key] = r
    rep["operations"] = results
    return rep, []


def cmd_bounds(prob: Problem) -> tuple[dict, list]:
    rep, polys = cmd_analyze(prob)
    rep["command"] = "bounds"
    rep.pop("hodge_basis", None)
    return rep, polys


def cmd_selftest() -> tuple[dict, list]:
    from .expsum import LPolynomial  # noqa: F401

    checks = {}
    t3 = FieldTower(3)
    k = LaurentPoly(1, {(1,): 1, (-1,): 1}, t3)
    P = fiber_lpoly(k, 2)
    checks["kloosterman"] = Verdict(
        "Pass" if [c.to_list() for c in P.coeffs] == [[1, 0], [-1, 0], [3, 0]] else "Fail", "1 - T + 3T^2 at p = 3"
    )
    t2 = FieldTower(2)
    cub = FamilySpec(t2, 1, 1, {(3,): 1}, [(((1,), (1,)), 1)])
    g = relative_polytope(cub)
    b = torus_base_bounds(g, 1, 1, parse_linop("Sym(1)"), 3)
    checks["cubic_bounds"] = Verdict(
        "Pass" if (b["degree_upper"].exact, b["total_degree"].exact) == (Fraction(9, 2), 180) else "Fail",
        "degree cap 9/2, total 180",
    )
    van = FamilySpec(t2, 1, 1, {(1,): 1}, [(((1,), (0,)), 1)], base="affine")
    ser = euler_series(van, parse_linop("Sym(1)"), 4)
    checks["vanishing_family"] = Verdict("Pass" if all(not c for c in ser.coeffs[1:]) else "Fail", "series is 1")
    cp = closed_points(t3, 1, "torus", 2)
    checks["closed_points"] = Verdict("Pass" if (len(cp[1]), len(cp[2])) == (2, 3) else "Fail", "F_3 torus counts")
    return {"command": "selftest", "checks": {k: v.to_json() for k, v in checks.items()}}, []


# -------------------------------------------------------------------- main


def _text(obj, prefix="") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, dict) and v or isinstance(v, list) and any(isinstance(x, dict) for x in v):
                lines.append(f"{prefix}{k}:")
                lines.extend(_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        for v in obj:
            lines.extend(_text(v, prefix + "- ") if isinstance(v, (dict, list)) else [f"{prefix}- {json.dumps(v)}"])
    return lines


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toricfam", description="Exact toric exponential sums and family L-functions.")
    ap.add_argument("command", choices=["analyze", "fiber", "family", "bounds", "selftest"])
    ap.add_argument("--input", metavar="FILE")
    ap.add_argument("--out", metavar="FILE")
    ap.add_argument("--format", choices=["json", "text"], default="json")
    ap.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work is vectorised")
    ap.add_argument("--budget-seconds", type=float)
    ap.add_argument("--force", action="store_true", help="run even when the cost model exceeds the budget")
    ap.add_argument("--csv", metavar="FILE", help="write polygon vertices as CSV")
    ap.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.monotonic()
    try:
        if args.command == "selftest":
            report, polys = cmd_selftest()
        else:
            if not args.input:
                raise ValidationError("--input is required")
            prob = load_problem(args.input)
            if args.command == "analyze":
                report, polys = cmd_analyze(prob)
            elif args.command == "fiber":
                report, polys = cmd_fiber(prob)
            elif args.command == "family":
                report, polys = cmd_family(prob, args.budget_seconds, args.force, args.inject_fault)
            else:
                report, polys = cmd_bounds(prob)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BudgetExceeded as exc:
        print(f"budget abort: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (FiberDegenerate, ToricError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = _plain(report)
    if args.budget_seconds is not None and time.monotonic() - start > args.budget_seconds and not args.force:
        print("budget abort: wall-clock budget exceeded", file=sys.stderr)
        return EXIT_BUDGET
    body = json.dumps(report, indent=2, sort_keys=True) if args.format == "json" else "\n".join(_text(report))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body + "\n")
    else:
        print(body)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["polygon", "x", "y"])
            for name, poly in polys:
                for x, y in poly.vertices:
                    wr.writerow([name, x, str(y)])
    return EXIT_FAIL if _collect_failures(report) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
