"""Command-line front end: constructions and verification suites.

Every randomized suite takes --seed and --trials; reports are JSON on
stdout with per-suite tolerances, and the exit code is 0 on pass, 1 on a
verification failure, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import random
import sys

import numpy as np

from critdimer import permutations as perms
from critdimer.laurent import LaurentPoly
from critdimer.measurement import (
    MatrixPoint,
    PluckerVector,
    meas_f,
    meas_f_theta,
    measure,
    measure_symbolic,
    symbolic_measurement,
    twist_left,
    twist_minor_formula,
)
from critdimer.permutations import BoundedAffinePermutation
from critdimer.plabic import (
    PlabicGraph,
    bridge_graph,
    critical_weights_theta,
    is_reduced,
    le_graph,
    random_positive_weights,
    square_faces,
    square_move,
)
from critdimer.strands import (
    crossing_graph,
    is_admissible_t,
    is_admissible_theta,
    is_generic_theta,
    is_nondegenerate_theta,
    t_sample,
    theta_sample,
)
from critdimer import curves, electrical, symmetry


class UsageError(Exception):
    pass


def _parse_f(text: str) -> BoundedAffinePermutation:
    try:
        return BoundedAffinePermutation([int(x) for x in text.split(",")])
    except ValueError as ex:
        raise UsageError(f"bad window: {ex}")


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as ex:
        raise UsageError(f"bad float list: {ex}")


def _parse_complex(text: str) -> list[complex]:
    vals = _parse_floats(text)
    if len(vals) % 2:
        raise UsageError("-t expects re,im pairs")
    return [complex(vals[2 * i], vals[2 * i + 1]) for i in range(len(vals) // 2)]


def _set_key(I) -> str:
    return ",".join(str(i) for i in sorted(I))


def _emit(data, args) -> None:
    if getattr(args, "csv", False):
        for row in data if isinstance(data, list) else [data]:
            print(",".join(str(x) for x in (row.values() if isinstance(row, dict) else row)))
    else:
        print(json.dumps(data, indent=2, default=str))


def _report(name: str, cases: list[dict], tolerance: float, trials: int) -> dict:
    devs = [c["deviation"] for c in cases if isinstance(c.get("deviation"), float)]
    ok = all(c.get("pass", True) for c in cases)
    max_dev = max(devs) if devs else 0.0
    return {
        "suite": name,
        "trials": trials,
        "tolerance": tolerance,
        "max_deviation": max_dev,
        "pass": bool(ok and max_dev <= tolerance),
        "cases": cases,
    }


# -- perm / strand / graph ------------------------------------------------------------


def cmd_perm(args) -> int:
    f = _parse_f(args.f)
    if args.what == "info":
        neck = perms.grassmann_necklace(f)
        _emit({
            "window": list(f.window), "n": f.n, "k": f.k,
            "loopless": f.is_loopless(), "coloopless": f.is_coloopless(),
            "length": f.length(),
            "necklace": [_set_key(neck[r]) for r in range(1, f.n + 1)],
            "bridges": perms.bridges(f),
        }, args)
    elif args.what == "necklace":
        neck = perms.grassmann_necklace(f)
        out = {"I": [_set_key(neck[r]) for r in range(1, f.n + 1)]}
        if neck.j_sets is not None:
            out["J"] = [_set_key(J) for J in neck.j_sets]
        _emit(out, args)
    elif args.what == "crossings":
        rel = perms.crossing_relations(f)
        _emit({k: sorted(_set_key(e) if isinstance(e, frozenset) else list(e)
                         for e in v) if isinstance(v, set) else v
               for k, v in rel.items()}, args)
    elif args.what == "dual":
        _emit(perms.dual(f).to_json(), args)
    elif args.what == "shift":
        _emit(perms.shift_conjugate(f).to_json(), args)
    elif args.what == "dsh":
        _emit(perms.downshift(f).to_json(), args)
    return 0


def cmd_strand(args) -> int:
    f = _parse_f(args.f)
    if args.what == "components":
        g = crossing_graph(f)
        _emit({
            "components": [sorted(c) for c in g.components],
            "c_f": g.c_f, "d_f": g.d_f,
            "edges": sorted(_set_key(e) for e in g.edges),
            "directed_edges": sorted(list(e) for e in g.directed_edges),
        }, args)
    elif args.what == "admissible":
        if args.theta is None and args.t is None:
            raise UsageError("strand admissible needs --theta or --t")
        if args.theta is not None:
            th = _parse_floats(args.theta)
            if len(th) != f.n:
                raise UsageError("theta length differs from n")
            _emit({"admissible": is_admissible_theta(f, th),
                   "generic": is_generic_theta(th),
                   "nondegenerate": is_nondegenerate_theta(f, th)}, args)
        else:
            t = _parse_complex(args.t)
            _emit({"admissible": is_admissible_t(f, t)}, args)
    elif args.what == "dot":
        g = crossing_graph(f)
        lines = ["digraph strand_crossings {"]
        for (p, q) in sorted(g.directed_edges):
            lines.append(f"  {p} -> {q};")
        lines.append("}")
        print("\n".join(lines))
    return 0


def cmd_graph(args) -> int:
    f = _parse_f(args.f)
    G = le_graph(f) if args.what == "le" else bridge_graph(f)
    if args.dot:
        print(G.to_dot())
    else:
        out = G.to_json()
        out["reduced"] = is_reduced(G)
        out["faces"] = sorted(_set_key(F.label) for F in G.faces())
        _emit(out, args)
    return 0


def cmd_move(args) -> int:
    with open(args.graph) as fh:
        G = PlabicGraph.from_json(json.load(fh))
    if args.weights:
        with open(args.weights) as fh:
            raw = json.load(fh)
        wt = {int(k): v for k, v in raw.items()}
    else:
        wt = random_positive_weights(G, random.Random(args.seed))
    label = frozenset(int(x) for x in args.face.split(","))
    sites = [F for F in square_faces(G) if F.label == label]
    if not sites:
        raise UsageError(f"no interior square face labeled {args.face}")
    G2, wt2 = square_move(G, wt, sites[0])
    dev = measure(G, wt).projective_distance(measure(G2, wt2))
    _emit({"graph": G2.to_json(), "weights": {str(e): w for e, w in wt2.items()},
           "measurement_deviation": dev}, args)
    return 0 if dev < 1e-12 else 1


def cmd_measure(args) -> int:
    with open(args.graph) as fh:
        G = PlabicGraph.from_json(json.load(fh))
    if args.symbolic:
        X = measure_symbolic(G)
        _emit({_set_key(I): repr(X[I]) for I in X.subsets()}, args)
        return 0
    if args.weights:
        with open(args.weights) as fh:
            raw = json.load(fh)
        wt = {int(k): complex(v) if isinstance(v, str) else v for k, v in raw.items()}
    elif args.theta:
        wt = critical_weights_theta(G, _parse_floats(args.theta))
    else:
        raise UsageError("measure needs --weights, --theta, or --symbolic")
    X = measure(G, wt)
    _emit({_set_key(I): str(X[I]) for I in X.subsets()}, args)
    return 0


def cmd_curve(args) -> int:
    f = _parse_f(args.f)
    if args.theta:
        th = _parse_floats(args.theta)
        pts = {s: list(curves.curve_point_theta(f, th, float(s)))
               for s in _parse_floats(args.s)}
    else:
        t = _parse_complex(args.t)
        pts = {s: [str(z) for z in curves.curve_point_t(f, t, complex(float(s), 0.0))]
               for s in _parse_floats(args.s)}
    _emit(pts, args)
    return 0


def cmd_reconstruct(args) -> int:
    with open(args.pluckers) as fh:
        raw = json.load(fh)
    data = {frozenset(int(x) for x in key.split(",")): complex(v) if isinstance(v, str) else v
            for key, v in raw.items()}
    X = PluckerVector(args.k, args.n, data)
    theta = curves.reconstruct_theta(args.k, args.n, X)
    _emit({"theta": list(theta.values)}, args)
    return 0


def cmd_elec(args) -> int:
    if args.what == "regular":
        N = args.N
        X = electrical.symmetric_point(N + 1, 2 * N)
        L = electrical.lam_extract(X)
        rows = []
        worst = 0.0
        for p in range(1, N + 1):
            row = {"p": p}
            for q in range(1, N + 1):
                want = electrical.closed_form_elec(N, abs(p - q))
                got = float(L[p - 1, q - 1])
                worst = max(worst, abs(got - want))
                row[f"L{q}"] = got
            rows.append(row)
        out = {"N": N, "Lambda": rows, "closed_form_deviation": worst,
               "ising_closed_form": [electrical.closed_form_ising(N, d) for d in range(N)],
               "pass": worst < 1e-9}
        _emit(out, args)
        return 0 if out["pass"] else 1
    tau = perms.Pairing([int(x) for x in args.tau.split(",")])
    theta = _parse_floats(args.theta) if args.theta else None
    region = (electrical.GeneralizedRegion(tau, tuple(theta)) if theta
              else electrical.region_sample(tau, args.seed))
    G, wt = electrical.temperley_graph(region)
    X = measure(G, wt)
    Y = meas_f_theta(perms.pairing_to_perms(tau)["elec"], region.theta)
    dev = X.projective_distance(Y)
    _emit({"theta": list(region.theta),
           "measurement": {_set_key(I): str(X[I]) for I in X.subsets()},
           "formula_deviation": dev, "pass": dev < 1e-9}, args)
    return 0 if dev < 1e-9 else 1


def cmd_dual_verify(args) -> int:
    f = _parse_f(args.f)
    rng = random.Random(args.seed)
    cases = []
    for i in range(args.trials):
        th = theta_sample(f, args.seed + i, pin=False)
        ok = symmetry.duality_check(f, th)
        eq = symmetry.shift_equivariance_check(f, th)
        cases.append({"trial": i, "pass": bool(ok and eq), "deviation": 0.0})
    rep = _report("duality", cases, 1e-10, args.trials)
    _emit(rep, args)
    return 0 if rep["pass"] else 1


def cmd_shift_verify(args) -> int:
    name = args.pair
    if name not in ("bundled:f24", "bundled:f25"):
        raise UsageError("--pair must be bundled:f24 or bundled:f25")
    n = 4 if name.endswith("24") else 5
    pairing = symmetry.bundled_pair(n)
    rep_data = symmetry.shift_diagram_check(pairing, trials=args.trials, seed=args.seed)
    ok = (rep_data["black_gauge"] < 1e-10 and rep_data["gauge_twist"]
          and rep_data["joint_injectivity"] > 1e-9
          and rep_data["critical_coherence"] < 1e-10)
    _emit({"suite": f"shift-{name}", "pass": bool(ok), **rep_data}, args)
    return 0 if ok else 1


# -- verification suites ----------------------------------------------------------------


def verify_laurent(args) -> dict:
    f = _parse_f(args.f)
    cases = []
    for builder, bname in ((le_graph, "le"), (bridge_graph, "bridge")):
        G = builder(f)
        X = measure_symbolic(G)           # raises on any division remainder
        cases.append({"graph": bname, "pass": True, "deviation": 0.0,
                      "coords": {_set_key(I): repr(X[I]) for I in X.subsets()}})
    return _report("laurent", cases, 0.0, 1)


def verify_curve(args) -> dict:
    f = _parse_f(args.f)
    if not f.is_loopless():
        raise UsageError("verify curve needs a loopless window")
    cases = []
    for i in range(args.trials):
        t = t_sample(f, args.seed + i, require="nondegenerate", pin=False)
        dev = curves.span_pluckers(f, t).projective_distance(meas_f(f, t))
        dev2 = curves.fourier_pluckers(f, t).projective_distance(
            curves.span_pluckers(f, t))
        cases.append({"trial": i, "deviation": max(dev, dev2),
                      "pass": max(dev, dev2) < 1e-9})
    return _report("curve", cases, 1e-9, args.trials)


def verify_squaremove(args) -> dict:
    f = _parse_f(args.f)
    rng = random.Random(args.seed)
    G = le_graph(f)
    sites = square_faces(G)
    cases = []
    for i in range(args.trials):
        if not sites:
            cases.append({"trial": i, "pass": True, "deviation": 0.0,
                          "note": "no interior square face"})
            break
        wt = random_positive_weights(G, rng)
        G2, wt2 = square_move(G, wt, sites[0])
        dev = measure(G, wt).projective_distance(measure(G2, wt2))
        cases.append({"trial": i, "deviation": dev, "pass": dev < 1e-12})
    return _report("squaremove", cases, 1e-12, args.trials)


def verify_twist(args) -> dict:
    f = _parse_f(args.f)
    cases = []
    G = le_graph(f)
    labels = {F.label for F in G.faces()}
    for i in range(args.trials):
        t = t_sample(f, args.seed + i, require="generic", pin=False)
        X = meas_f(f, t)
        tw = twist_left(MatrixPoint.from_plucker(X), f).minors()
        vals = np.array([complex(tw[lab]) for lab in labels])
        mono = np.array([twist_minor_formula(f, lab, t) for lab in labels])
        i0 = int(np.argmax(np.abs(vals)))
        dev = float(np.max(np.abs(vals / vals[i0] - mono / mono[i0]))
                    / max(1.0, float(np.max(np.abs(mono / mono[i0])))))
        cases.append({"trial": i, "deviation": dev, "pass": dev < 1e-10})
    return _report("twist", cases, 1e-10, args.trials)


def cmd_verify(args) -> int:
    runner = {
        "laurent": verify_laurent,
        "curve": verify_curve,
        "squaremove": verify_squaremove,
        "twist": verify_twist,
    }[args.what]
    rep = runner(args)
    _emit(rep, args)
    return 0 if rep["pass"] else 1


# -- entry point --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="critdimer")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, trials_default=10):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--csv", action="store_true")

    p = sub.add_parser("perm")
    p.add_argument("what", choices=["info", "necklace", "crossings", "dual", "shift", "dsh"])
    p.add_argument("--f", required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_perm)

    p = sub.add_parser("strand")
    p.add_argument("what", choices=["components", "admissible", "dot"])
    p.add_argument("--f", required=True)
    p.add_argument("--theta")
    p.add_argument("--t")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_strand)

    p = sub.add_parser("graph")
    p.add_argument("what", choices=["le", "bridges"])
    p.add_argument("--f", required=True)
    p.add_argument("--dot", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("move")
    p.add_argument("--graph", required=True)
    p.add_argument("--weights")
    p.add_argument("--face", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_move)

    p = sub.add_parser("measure")
    p.add_argument("--graph", required=True)
    p.add_argument("--weights")
    p.add_argument("--theta")
    p.add_argument("--symbolic", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("curve")
    p.add_argument("what", choices=["eval"])
    p.add_argument("--f", required=True)
    p.add_argument("--theta")
    p.add_argument("--t")
    p.add_argument("--s", required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("reconstruct")
    p.add_argument("--pluckers", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("dual")
    p.add_argument("what", choices=["verify"])
    p.add_argument("--f", required=True)
    common(p)
    p.set_defaults(func=cmd_dual_verify)

    p = sub.add_parser("shift")
    p.add_argument("what", choices=["verify"])
    p.add_argument("--pair", required=True)
    common(p)
    p.set_defaults(func=cmd_shift_verify)

    p = sub.add_parser("elec")
    p.add_argument("what", choices=["regular", "region"])
    p.add_argument("--N", type=int)
    p.add_argument("--tau")
    p.add_argument("--theta")
    common(p)
    p.set_defaults(func=cmd_elec)

    p = sub.add_parser("verify")
    p.add_argument("what", choices=["laurent", "curve", "squaremove", "twist"])
    p.add_argument("--f", required=True)
    p.add_argument("--n", type=int)
    common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return 2 if ex.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as ex:
        print(f"usage error: {ex}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError, KeyError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
