"""Command-line entry point: every experiment as a reproducible subcommand.

JSON is the canonical output format (sorted keys, fixed separators); CSV is
a projection for commands that produce row tables.  A determinism hash over
the payload (timestamp excluded) is attached to every output.

Exit codes: 0 ok, 2 bad configuration, 3 invariant violation, 4 resource.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

from . import sepkernel
from .entropy import InvariantViolation, entropy_estimate
from .envelope import (
    FamilyParameterError,
    build_permutation_family,
    constant_embedding_check,
    discreteness_table,
    envelope_entropy_lower_bound,
    envelope_rho_matrix,
)
from .slovak import OnOrbitError, SlovakModel
from .spaces import epsilon_net, format_point, parse_point
from .symbolic import (
    equicontinuity_detector,
    factor_language,
    complexity,
    is_periodically_recurrent,
    partition_for,
    system_language,
)
from .systems import (
    GOLDEN_T0,
    CompactifiedInteger,
    ShiftWindow,
    make_system,
    orbit,
    parse_alpha,
    sample_points,
    sturmian_factors,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_RESOURCE = 4


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------


def _floats(text: str) -> List[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise ConfigError(f"bad float list {text!r}") from None


def _ints(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise ConfigError(f"bad int list {text!r}") from None


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _parse_system_point(handle, text: str):
    if handle.space_id == "compactint":
        return CompactifiedInteger(None if text == "inf" else int(text))
    if handle.space_id == "fullshift":
        if text.startswith("w:"):
            return ShiftWindow(tuple(int(c) for c in text[2:]))
        raise ConfigError("full-shift points use w:<2d+1 bits>")
    return parse_point(text)


def _emit(payload: dict, args) -> int:
    body = dict(payload)
    body["config"] = {k: v for k, v in sorted(vars(args).items())
                      if k not in ("func", "out") and v is not None}
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"),
                           default=str)
    body["determinism_hash"] = hashlib.sha256(canonical.encode()).hexdigest()
    body["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    if args.format == "csv":
        lines = payload.get("csv")
        if lines is None:
            raise ConfigError("this command has no CSV projection")
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(body, sort_keys=True, indent=2, default=str) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _ladder(n_values: Sequence[int], eps_values: Sequence[float]):
    return [(n, eps) for n in n_values for eps in eps_values]


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def cmd_entropy(args) -> int:
    handle = make_system(args.system, args.depth, args.t0)
    K = epsilon_net(handle.space_id, args.net_eps, args.depth)
    report = entropy_estimate(handle, K,
                              _ladder(_ints(args.n_ladder),
                                      _floats(args.eps_ladder)),
                              exact_threshold=args.exact_threshold)
    payload = report.to_dict()
    payload["csv"] = report.to_csv_lines()
    payload["kernel_backend"] = sepkernel.BACKEND
    return _emit(payload, args)


def cmd_analyze(args) -> int:
    if args.what == "complexity":
        if args.system.startswith("sturmian"):
            alpha = parse_alpha(args.system)
            src = factor_language(lambda n: sturmian_factors(alpha, n),
                                  args.system)
        else:
            handle = make_system(args.system, args.depth, args.t0)
            part = partition_for(handle, args.mesh)
            src = system_language(handle, part, sample_size=args.sample)
        rows = [{"n": n, "count": complexity(src, n)}
                for n in range(1, args.n_max + 1)]
        payload = {"source": src.label, "rows": rows,
                   "csv": ["n,count"] + [f"{r['n']},{r['count']}" for r in rows]}
        return _emit(payload, args)
    handle = make_system(args.system, args.depth, args.t0)
    if args.what == "recurrence":
        x = (_parse_system_point(handle, args.point) if args.point
             else sample_points(handle, 1)[0])
        v = is_periodically_recurrent(handle, x, args.eps,
                                      args.horizon or 64)
        payload = {"system": handle.label(), "point": str(x),
                   "verdict": v.kind, "period": v.period,
                   "escapes": {str(k): m for k, m in v.escapes.items()},
                   "eps": v.eps, "horizon": v.horizon}
        return _emit(payload, args)
    if args.what == "equicontinuity":
        v = equicontinuity_detector(handle, _floats(args.mesh_ladder),
                                    args.horizon or 12, args.sample)
        payload = {"system": handle.label(), "verdict": v.kind,
                   "witness": v.witness.label if v.witness else None,
                   "counts": {f"{eps:g}": list(c) for eps, c in v.counts.items()},
                   "horizon": v.horizon}
        return _emit(payload, args)
    raise ConfigError(f"unknown analysis {args.what!r}")


def _parse_stages(text: str):
    stages = []
    for part in text.split(","):
        fields = part.split(":")
        if len(fields) != 4:
            raise ConfigError("stages are k:delta:n:q,...")
        stages.append((int(fields[0]), float(fields[1]),
                       int(fields[2]), int(fields[3])))
    return stages


def cmd_envelope(args) -> int:
    if args.what == "lower-bound":
        stages = _parse_stages(args.stages)
        rows = envelope_entropy_lower_bound(stages)
        realized = []
        if args.system:
            handle = make_system(args.system, args.depth, args.t0)
            for k, delta_k, n_k, q_k in stages:
                if n_k > args.realize_cap:
                    realized.append({"k": k, "realized": False,
                                     "reason": "above --realize-cap"})
                    continue
                fam = build_permutation_family(handle, k, delta_k, n_k,
                                               eps=args.eps, seed=args.seed)
                realized.append({"k": k, "realized": True,
                                 "family_size": len(fam.members),
                                 "size_exact": fam.size_exact,
                                 "provenance": fam.provenance})
        payload = {"rows": rows, "realized": realized,
                   "csv": ["k,delta,n,q,m,h_k,analytic_bound,meets_bound"] +
                          [f"{r['k']},{r['delta_k']:g},{r['n_k']},{r['q_k']},"
                           f"{r['m']},{r['h_k']:.10g},{r['analytic_bound']:.10g},"
                           f"{int(r['meets_bound'])}" for r in rows]}
        return _emit(payload, args)
    if args.what == "discreteness":
        model = SlovakModel(args.depth, args.truncation, args.t0)
        exps = list(range(-args.pairs, args.pairs + 1))
        pairs = [(m, n) for m in exps for n in exps if m < n]
        from .envelope import power_separation

        vals = _pmap(lambda mn: power_separation(model, mn[0], mn[1],
                                                 args.sample),
                     pairs, args.jobs)
        entries = {f"{m},{n}": v for (m, n), v in zip(pairs, vals)}
        payload = {"max_exp": args.pairs, "sample_size": args.sample,
                   "min_off_diagonal": min(entries.values()),
                   "all_positive": all(v > 0 for v in entries.values()),
                   "pairs": entries,
                   "csv": ["m,n,lower_bound"] +
                          [f"{k},{v:.10g}" for k, v in sorted(entries.items())]}
        if not payload["all_positive"]:
            raise InvariantViolation("power separation hit zero")
        return _emit(payload, args)
    if args.what == "constants":
        handle = make_system(args.system, args.depth, args.t0)
        K = epsilon_net(handle.space_id, args.net_eps, args.depth)
        rep = constant_embedding_check(
            handle, K, _ladder(_ints(args.n_ladder), _floats(args.eps_ladder)),
            generic_crosscheck=args.crosscheck)
        if not rep["all_equal"]:
            raise InvariantViolation("constant embedding count mismatch")
        rep["csv"] = ["n,eps,point_count,envelope_count,equal"] + [
            f"{r['n']},{r['eps']:g},{r['point_count']},{r['envelope_count']},"
            f"{int(r['equal'])}" for r in rep["rows"]]
        return _emit(rep, args)
    raise ConfigError(f"unknown envelope command {args.what!r}")


def cmd_slovak(args) -> int:
    model = SlovakModel(args.depth, args.truncation, args.t0)
    if args.what == "build":
        payload = model.summary()
        rows = model.graph_rows([t / 16.0 + 1.0 / 128.0 for t in range(-48, 49)])
        payload["csv"] = ["t,s,word,F,tail_error"] + [
            f"{t:.6g},{s:.10g},{w},{v:.10g},{e:.3g}" for t, s, w, v, e in rows]
        return _emit(payload, args)
    if args.what == "fibers":
        ns = range(-args.range, args.range + 1)
        fibers = [model.fiber(n) for n in ns]
        payload = {"tail": model.tail,
                   "fibers": [{"n": f.n, "v_lo": f.v_lo, "v_hi": f.v_hi,
                               "length": str(f.length)} for f in fibers],
                   "csv": ["n,v_lo,v_hi,length"] +
                          [f"{f.n},{f.v_lo:.10g},{f.v_hi:.10g},{float(f.length):.10g}"
                           for f in fibers]}
        return _emit(payload, args)
    if args.what == "successor":
        rows = []
        for n in range(args.steps):
            res = model.successor(n)
            if not res.matches(args.tol):
                raise InvariantViolation(
                    f"successor trace diverged from the lifted map at n={n}")
            rows.append({"n": n, "traced": format_point(res.traced),
                         "expected": format_point(res.expected),
                         "distance": res.distance})
        payload = {"steps": args.steps, "rows": rows, "all_match": True,
                   "csv": ["n,distance"] +
                          [f"{r['n']},{r['distance']:.3g}" for r in rows]}
        return _emit(payload, args)
    if args.what == "uc-check":
        eps = _floats(args.eps_ladder)
        rows = _pmap(lambda e: model.uc_modulus_check([e],
                                                      args.sample)[0],
                     eps, args.jobs)
        if not all(r["passed"] for r in rows):
            raise InvariantViolation("uniform-continuity check failed")
        payload = {"rows": rows,
                   "csv": ["eps,n0,r,delta,pairs,worst,passed"] + [
                       f"{r['eps']:g},{r['n0']},{r['r']:.6g},{r['delta']:.6g},"
                       f"{r['pairs']},{r['worst_image_distance']:.6g},"
                       f"{int(r['passed'])}" for r in rows]}
        return _emit(payload, args)
    raise ConfigError(f"unknown slovak command {args.what!r}")


def cmd_suspension(args) -> int:
    handle = make_system(f"solenoid:{args.t0}", args.depth, args.t0)
    start = (parse_point(args.start) if args.start
             else sample_points(handle, 1)[0])
    pts = orbit(handle, start, args.steps)
    payload = {"t0": args.t0, "steps": args.steps,
               "points": [format_point(p) for p in pts],
               "csv": ["step,word,s"] + [
                   f"{i},{p.base},{float(p.s):.10g}"
                   for i, p in enumerate(pts)]}
    return _emit(payload, args)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(sub):
    sub.add_argument("--depth", type=int, default=10)
    sub.add_argument("--t0", type=float, default=GOLDEN_T0)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--out", default=os.environ.get("SLOVAKLAB_OUT"))
    sub.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="slovaklab",
        description="computational experiments in topological dynamics")
    sp = ap.add_subparsers(dest="command", required=True)

    p = sp.add_parser("entropy", help="separated-set entropy estimate")
    p.add_argument("--system", required=True)
    p.add_argument("--eps-ladder", default="0.4")
    p.add_argument("--n-ladder", default="4,5,6,7,8,9,10")
    p.add_argument("--net-eps", type=float, default=0.4)
    p.add_argument("--exact-threshold", type=int, default=4096)
    _common(p)
    p.set_defaults(func=cmd_entropy)

    p = sp.add_parser("analyze", help="complexity / recurrence / detector")
    p.add_argument("what", choices=("complexity", "recurrence",
                                    "equicontinuity"))
    p.add_argument("--system", required=True)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--mesh", type=float, default=0.5)
    p.add_argument("--mesh-ladder", default="0.5,0.25")
    p.add_argument("--point")
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--horizon", type=int,
                   help="recurrence default 64; detector default 12 "
                        "(kept within the window resolution)")
    p.add_argument("--sample", type=int, default=256)
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sp.add_parser("envelope", help="functional-envelope experiments")
    p.add_argument("what", choices=("lower-bound", "discreteness",
                                    "constants"))
    p.add_argument("--system")
    p.add_argument("--stages", default="1:0.5:12:2")
    p.add_argument("--eps", type=float)
    p.add_argument("--realize-cap", type=int, default=64)
    p.add_argument("--pairs", type=int, default=5)
    p.add_argument("--sample", type=int, default=60)
    p.add_argument("--truncation", type=int, default=12)
    p.add_argument("--net-eps", type=float, default=0.4)
    p.add_argument("--eps-ladder", default="0.4")
    p.add_argument("--n-ladder", default="1,4,8")
    p.add_argument("--crosscheck", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_envelope)

    p = sp.add_parser("slovak", help="graph-closure model")
    p.add_argument("what", choices=("build", "fibers", "successor",
                                    "uc-check"))
    p.add_argument("--truncation", "--N", type=int, default=12)
    p.add_argument("--range", type=int, default=5)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--eps-ladder", default="0.5,0.25")
    p.add_argument("--sample", type=int, default=120)
    _common(p)
    p.set_defaults(func=cmd_slovak)

    p = sp.add_parser("suspension", help="suspension-flow orbit trace")
    p.add_argument("what", choices=("trace",))
    p.add_argument("--start")
    p.add_argument("--steps", type=int, default=16)
    _common(p)
    p.set_defaults(func=cmd_suspension)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "slovak" and args.depth == 10:
        args.depth = 4  # the graph model defaults to the coarse solenoid
    if args.command == "envelope" and args.what == "discreteness" \
            and args.depth == 10:
        args.depth = 4
    try:
        return args.func(args)
    except (ConfigError, FamilyParameterError, OnOrbitError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (OSError, MemoryError) as e:
        print(f"resource error: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
