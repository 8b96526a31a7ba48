"""Command implementations behind the ``conicmin`` CLI.

Each ``cmd_*`` function takes parsed inputs and returns plain data (dicts,
lists, CSV text) so it can be driven from tests as well as the shell.
"""

from __future__ import annotations

import csv
import io
import math
import random
import time
from fractions import Fraction

from . import exact as ex
from .adversary import GENERAL, analytic_bound, lower_bound_report
from .bruteforce import EnumerationDomain, brute_min, enumerate_points
from .conecut import ConeCutParams
from .errors import ParseError
from .lattice import LatticeBasis, cvp, lll_reduce, svp
from .minimizer import ball_radius_for_box, minimize_pieces, punctured_pieces
from .oracles import constrained_reduction, from_value_oracle, parse_function

CSV_COLUMNS = ["n", "r", "seed", "variant", "oracle_calls", "analytic_bound", "shrink_iters", "branches", "wall_ms"]


def _fmt_point(x):
    return None if x is None else [ex.fmt(v) for v in x]


def _parse_params(raw: dict) -> tuple[ConeCutParams, int, int]:
    try:
        params = ConeCutParams(ex.frac(raw.get("c_hat", "1/2")))
        return params, int(raw.get("seed", 0)), int(raw.get("max_depth", 64))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad params: {exc}") from exc


def load_problem(spec: dict) -> dict:
    """Validate a problem spec and build its oracle pieces."""
    if not isinstance(spec, dict):
        raise ParseError("problem spec must be a JSON object")
    f = parse_function(spec.get("objective") or {})
    gs = [parse_function(g) for g in spec.get("constraints", [])]
    dom = spec.get("domain", {})
    try:
        center = ex.vec(dom.get("center", [0] * f.dim))
        radius = ex.frac(dom.get("radius", 1))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad domain: {exc}") from exc
    norm = dom.get("norm", "l2")
    if norm not in ("l2", "linf"):
        raise ParseError(f"unknown norm {norm!r}")
    if len(center) != f.dim or any(g.dim != f.dim for g in gs):
        raise ParseError("dimensions of objective, constraints and center disagree")
    if radius < 1:
        raise ParseError("radius must be at least 1")
    h = constrained_reduction(f, gs)
    even = f.even and all(g.even for g in gs)
    params, seed, max_depth = _parse_params(spec.get("params", {}))
    return {
        "value": h, "dim": f.dim, "center": center, "radius": radius, "norm": norm,
        "exclude_origin": bool(dom.get("exclude_origin", False)), "even": even,
        "params": params, "seed": seed, "max_depth": max_depth,
    }


def _run(prob: dict, oracle):
    n, center, radius = prob["dim"], prob["center"], prob["radius"]
    if prob["norm"] == "linf":
        ball = ball_radius_for_box(n, radius)
        box = lambda x: max(Fraction(0), max(abs(a - c) for a, c in zip(x, center)) - radius)
    else:
        ball, box = radius, None
    pieces = punctured_pieces(n, prob["even"]) if prob["exclude_origin"] else [(None, None)]
    return minimize_pieces(oracle, center, ball, pieces, box, prob["params"], prob["seed"], prob["max_depth"])


def cmd_minimize(spec: dict, verify: bool = False) -> dict:
    prob = load_problem(spec)
    h = prob["value"]
    oracle = from_value_oracle(h)
    t0 = time.perf_counter()
    res = _run(prob, oracle)
    wall = (time.perf_counter() - t0) * 1000
    if res.point is None:
        status = "EMPTY"
    elif h(res.point)[0] > 0:
        status = "INFEASIBLE"
    else:
        status = "OPTIMAL"
    record = {
        "status": status,
        "point": _fmt_point(res.point),
        "oracle_calls": res.oracle_calls,
        "shrink_iters": res.total_shrink_iters,
        "branches": res.total_branches,
        "wall_ms": round(wall, 3),
        "params": {"c_hat": ex.fmt(res.c_hat), "seed": prob["seed"], "max_depth": prob["max_depth"]},
    }
    if verify:
        record["verify"] = verify_against_bruteforce(prob, res.point)
    return record


def verify_against_bruteforce(prob: dict, point) -> dict:
    """Compare the returned point with exhaustive search, using a separate counter."""
    h = prob["value"]
    check = from_value_oracle(h)
    dom = EnumerationDomain(prob["center"], prob["radius"], prob["norm"],
                            exclusions=[[0] * prob["dim"]] if prob["exclude_origin"] else [])
    pts = enumerate_points(dom)
    if not pts:
        return {"ok": point is None, "brute_argmin": None, "point_leq_brute": None, "brute_leq_point": None}
    first, _ = brute_min(check, pts)
    ref = first[0]
    if point is None:
        return {"ok": False, "brute_argmin": _fmt_point(ref), "point_leq_brute": None, "brute_leq_point": None}
    a, b = check.compare_leq(point, ref), check.compare_leq(ref, point)
    return {"ok": a and b, "brute_argmin": _fmt_point(ref), "point_leq_brute": a, "brute_leq_point": b}


def gcd_problem(a: int, b: int) -> dict:
    """Minimize ``a x1 - b x2`` subject to ``a x1 - b x2 >= 1``; the optimum is gcd(a, b)."""
    lin = {"kind": "polynomial", "vars": 2,
           "monomials": [{"coef": str(a), "exps": [1, 0]}, {"coef": str(-b), "exps": [0, 1]}]}
    slack = {"kind": "polynomial", "vars": 2,
             "monomials": [{"coef": "1", "exps": [0, 0]}, {"coef": str(-a), "exps": [1, 0]},
                           {"coef": str(b), "exps": [0, 1]}]}
    radius = math.isqrt(a * a + b * b)
    if radius * radius < a * a + b * b:
        radius += 1
    return {"objective": lin, "constraints": [slack],
            "domain": {"center": ["0", "0"], "radius": str(radius), "norm": "l2"}}


def cmd_gcd(a: int, b: int, verify: bool = False) -> tuple[int, dict]:
    if a < 1 or b < 1:
        raise ParseError("gcd needs positive integers")
    record = cmd_minimize(gcd_problem(a, b))
    x = [ex.frac(v) for v in record["point"]]
    g = int(a * x[0] - b * x[1])
    record["gcd"] = g
    if verify:
        record["verify"] = {"ok": g == math.gcd(a, b), "euclid": math.gcd(a, b)}
    return g, record


def bench_instance(n: int, r: int, seed: int) -> dict:
    """A positive-definite diagonal quadratic with a seeded rational minimizer inside the ball."""
    rng = random.Random(seed * 7919 + n)
    center = [Fraction(rng.randint(-50, 50), 101) * r for _ in range(n)]
    weights = [rng.randint(1, 4) for _ in range(n)]
    monomials = []
    for i, (c, w) in enumerate(zip(center, weights)):
        e2 = [2 if j == i else 0 for j in range(n)]
        e1 = [1 if j == i else 0 for j in range(n)]
        monomials += [{"coef": str(w), "exps": e2}, {"coef": ex.fmt(-2 * w * c), "exps": e1},
                      {"coef": ex.fmt(w * c * c), "exps": [0] * n}]
    return {"objective": {"kind": "polynomial", "vars": n, "monomials": monomials},
            "domain": {"center": ["0"] * n, "radius": str(r), "norm": "l2"},
            "params": {"seed": seed}}


def cmd_bench(config: dict) -> str:
    """Sweep ``n × r × seeds`` and return CSV text with :data:`CSV_COLUMNS`."""
    try:
        ns = [int(v) for v in config.get("n", [])]
        rs = [int(v) for v in config.get("r", [])]
        seeds = [int(v) for v in config.get("seeds", [0])]
        variant = config.get("variant", "quadratic")
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"bad bench config: {exc}") from exc
    if variant not in ("quadratic", "general", "even"):
        raise ParseError(f"unknown bench variant {variant!r}")
    rows = []
    for n in ns:
        for r in rs:
            for seed in seeds:
                if variant == "quadratic":
                    rec = cmd_minimize(bench_instance(n, r, seed))
                    rows.append({"n": n, "r": r, "seed": seed, "variant": variant,
                                 "oracle_calls": rec["oracle_calls"], "analytic_bound": "",
                                 "shrink_iters": rec["shrink_iters"], "branches": rec["branches"],
                                 "wall_ms": rec["wall_ms"]})
                else:
                    t0 = time.perf_counter()
                    rep = lower_bound_report(n, r, variant, 1, seed)
                    row = {k: rep["rows"][0][k] for k in CSV_COLUMNS if k in rep["rows"][0]}
                    row["wall_ms"] = round((time.perf_counter() - t0) * 1000, 3)
                    rows.append(row)
    rows.sort(key=lambda row: (row["n"], row["r"], row["seed"]))
    return rows_to_csv(rows)


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def cmd_adversary(n: int, r: int, variant: str = GENERAL, trials: int = 1, seed: int = 0) -> dict:
    report = lower_bound_report(n, r, variant, trials, seed)
    report["analytic_bound"] = analytic_bound(n, r, variant)
    return report


def cmd_lattice(op: str, spec: dict) -> dict:
    try:
        cols = [ex.vec(c) for c in spec["basis"]]
        lat = LatticeBasis.from_columns(cols)
        delta = ex.frac(spec.get("delta", "3/4"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad basis spec: {exc}") from exc
    if op == "lll":
        return {"basis": [_fmt_point(c) for c in lll_reduce(lat, delta).columns()]}
    if op == "svp":
        v = svp(lat)
        return {"vector": _fmt_point(v), "norm_sq": ex.fmt(ex.norm_sq(v))}
    if op == "cvp":
        if "target" not in spec:
            raise ParseError("cvp needs a target")
        target = ex.vec(spec["target"])
        v = cvp(lat, target)
        return {"vector": _fmt_point(v), "dist_sq": ex.fmt(ex.norm_sq(ex.sub(v, target)))}
    raise ParseError(f"unknown lattice op {op!r}")
