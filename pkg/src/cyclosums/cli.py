"""Command-line front end.

Subcommands::

    cyclosums eval   --kind R --exps 1 --roots 1/2 --q 2 --x 1/3
    cyclosums check  --theorem T31 --p 1 --q 2 --x 1/2 --y 1/2
    cyclosums suite  suites/paper_examples.json --jobs 2 --out report.json
    cyclosums kernel --fn phi --p 2 --s 1/3 --x 1/2

Exit codes:
    0 - success / every check passed
    1 - a check failed or an evaluation did not reach its accuracy
    2 - invalid input (nothing is evaluated)
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .context import CVal, PrecisionCtx, fmt_number
from .errors import CycloError, DomainError
from .exact import GaussianRational, RootOfUnity
from .kernels import ExpansionPoint, Phi, laurent, phi_deriv
from .parity import THEOREMS, ParityCase, check_parity
from .residue import (THM6, FactoredRational, IntegrandSpec, closure_total, extra_residue_sum,
                      thm6_rhs, thm6_validate)
from .sums import SumSpec, evaluate

CLOSURE_LIMIT = 1e-3


def _cval_json(v: CVal, ctx: PrecisionCtx) -> dict:
    out = v.to_json(ctx.work_digits)
    out["err"] = v.err
    return out


def _ints(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(t) for t in text]
    text = str(text).strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise DomainError(f"expected comma-separated integers, got {text!r}") from exc


def _roots(text) -> list[RootOfUnity]:
    if isinstance(text, (list, tuple)):
        return [RootOfUnity.parse(t) for t in text]
    text = str(text).strip()
    return [RootOfUnity.parse(t) for t in text.split(",")] if text else []


# ---------------------------------------------------------------------------
# check descriptors


def validate_case(desc: dict, ctx: PrecisionCtx):
    """Build the check object for a descriptor; raises DomainError on bad input."""
    th = desc.get("theorem")
    if th in THEOREMS:
        return ParityCase(th, _ints(desc.get("exps", [])), _roots(desc.get("roots", [])), ctx,
                          int(desc.get("branch", 0)))
    if th == "closure":
        rational = FactoredRational.parse(desc.get("rational", ""))
        ps = _ints(desc.get("ps", [1]))
        roots = _roots(desc["roots"]) if desc.get("roots") else [RootOfUnity(1, 2)] * len(ps)
        spec = IntegrandSpec(desc.get("kernel", "H"), ps, roots, RootOfUnity.parse(desc.get("x", "0/1")),
                             rational, bool(desc.get("relaxed", False)))
        n_max = int(desc.get("nmax", 200))
        if n_max < 1:
            raise DomainError("nmax must be >= 1")
        return spec, n_max
    if th in THM6:
        rational = FactoredRational.parse(desc.get("rational", ""))
        ps = _ints(desc.get("ps", []))
        roots = _roots(desc.get("roots", []))
        x = RootOfUnity.parse(desc.get("x", "0/1"))
        thm6_validate(th, ps, roots, x, rational)
        return th, ps, roots, x, rational
    raise DomainError(f"unknown theorem {th!r}")


def run_case(desc: dict, ctx: PrecisionCtx) -> dict:
    """Run one descriptor and return its JSON record (never raises on evaluation failure)."""
    t0 = time.perf_counter()
    th = desc["theorem"]
    try:
        built = validate_case(desc, ctx)
        if th in THEOREMS:
            rep = check_parity(built)
            return rep.to_json()
        if th == "closure":
            spec, n_max = built
            a = closure_total(spec, n_max, ctx)
            b = closure_total(spec, 2 * n_max, ctx)
            ra, rb = float(abs(a.total.value)), float(abs(b.total.value))
            ok = ra <= CLOSURE_LIMIT and rb < ra
            return {"theorem": "closure", "params": _params(desc),
                    "total": _cval_json(a.total, ctx), "total_doubled": _cval_json(b.total, ctx),
                    "residual": ra, "residual_doubled": rb, "pass": ok,
                    "terms_used": b.count, "seconds": round(time.perf_counter() - t0, 3)}
        name, ps, roots, x, rational = built
        rhs = thm6_rhs(name, ps, roots, x, rational, ctx, bool(desc.get("printed", False)))
        lhs = extra_residue_sum(name, ps, roots, x, rational, ctx)
        residual = float(abs(lhs.value - rhs.value))
        ok = residual <= max(ctx.tol, 10.0 * (lhs.err + rhs.err))
        return {"theorem": name, "params": _params(desc), "lhs": _cval_json(lhs, ctx),
                "rhs": _cval_json(rhs, ctx), "residual": residual, "pass": ok,
                "terms_used": rhs.terms_used, "seconds": round(time.perf_counter() - t0, 3)}
    except CycloError as exc:
        return {"theorem": th, "params": _params(desc), "pass": False, "error": str(exc),
                "seconds": round(time.perf_counter() - t0, 3)}


def _params(desc: dict) -> dict:
    return {k: v for k, v in desc.items() if k != "theorem"}


def _admissible(desc: dict, ctx: PrecisionCtx) -> bool:
    try:
        validate_case(desc, ctx)
        return True
    except DomainError:
        return False


def roots_up_to(order: int) -> list[str]:
    seen = []
    for N in range(1, order + 1):
        for k in range(N):
            r = RootOfUnity(k, N)
            if r not in seen:
                seen.append(r)
    return [str(r) for r in seen]


def expand_grid(desc: dict, ctx: PrecisionCtx) -> list[dict]:
    """Turn a grid descriptor into admissible explicit cases."""
    th = desc.get("theorem")
    g = desc["grid"]
    roots = roots_up_to(int(g.get("max_order", 2)))
    out = []
    if th in ("T31", "T41"):
        for p, q in itertools.product(g.get("p", [1]), g.get("q", [1])):
            for x, y in itertools.product(roots, repeat=2):
                c = {"theorem": th, "exps": [p, q], "roots": [x, y]}
                if _admissible(c, ctx):
                    out.append(c)
    elif th in ("T32", "T42"):
        cand = []
        for p1, p2, q in itertools.product(g.get("p1", [1]), g.get("p2", [1]), g.get("q", [1])):
            for rs in itertools.product(roots, repeat=3):
                c = {"theorem": th, "exps": [p1, p2, q], "roots": list(rs)}
                if _admissible(c, ctx):
                    cand.append(c)
        if "sample" in g:
            rnd = random.Random(int(g.get("seed", 0)))
            cand = rnd.sample(cand, min(int(g["sample"]), len(cand)))
        out = cand
    else:
        raise DomainError(f"grids are supported for T31, T32, T41, T42, not {th!r}")
    if not out:
        raise DomainError(f"grid for {th} has no admissible cases")
    return out


# ---------------------------------------------------------------------------
# commands


def _ctx(args) -> PrecisionCtx:
    return PrecisionCtx(digits=args.digits, tol=args.tol, max_terms=args.max_terms)


def _emit(payload, args) -> None:
    text = json.dumps(payload, indent=2)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    print(text)


def cmd_eval(args) -> int:
    ctx = _ctx(args)
    spec = SumSpec(args.kind, _ints(args.exps), _roots(args.roots), args.q, args.x)
    t0 = time.perf_counter()
    v = evaluate(spec, ctx)
    _emit({"spec": spec.to_json(), "value": v.to_json(ctx.work_digits), "err": v.err,
           "certified": v.certified, "terms_used": v.terms_used,
           "seconds": round(time.perf_counter() - t0, 3)}, args)
    return 0


def _check_desc(args) -> dict:
    th = args.theorem
    if th in ("T31", "T41"):
        return {"theorem": th, "exps": _ints(args.p) + [args.q], "roots": [args.x, args.y]}
    if th in ("T32", "T42"):
        return {"theorem": th, "exps": _ints(args.p) + [args.q],
                "roots": [args.x] + [str(r) for r in _roots(args.roots)]}
    if th in ("SPLIT_S", "SPLIT_R"):
        return {"theorem": th, "exps": _ints(args.k), "roots": [str(r) for r in _roots(args.roots)],
                "branch": args.branch}
    if th == "closure":
        d = {"theorem": th, "kernel": args.kernel, "ps": _ints(args.p), "x": args.x,
             "rational": args.rational, "nmax": args.nmax, "relaxed": args.relaxed}
        if args.roots:
            d["roots"] = [str(r) for r in _roots(args.roots)]
        return d
    if th in THM6:
        return {"theorem": th, "ps": _ints(args.p), "roots": [str(r) for r in _roots(args.roots)],
                "x": args.x, "rational": args.rational, "printed": args.printed}
    raise DomainError(f"unknown theorem {th!r}")


def cmd_check(args) -> int:
    ctx = _ctx(args)
    desc = _check_desc(args)
    validate_case(desc, ctx)
    rec = run_case(desc, ctx)
    _emit(rec, args)
    return 0 if rec["pass"] else 1


def load_suite(path: str, ctx_default: PrecisionCtx) -> tuple[list[dict], PrecisionCtx, int]:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read suite config {path}: {exc}") from exc
    if not isinstance(cfg, dict) or not isinstance(cfg.get("cases"), list):
        raise DomainError("suite config needs a 'cases' list")
    ctx = PrecisionCtx(digits=int(cfg.get("digits", ctx_default.digits)),
                       tol=float(cfg.get("tol", ctx_default.tol)),
                       max_terms=int(cfg.get("max_terms", ctx_default.max_terms)))
    cases = []
    for desc in cfg["cases"]:
        if not isinstance(desc, dict) or "theorem" not in desc:
            raise DomainError(f"malformed case descriptor {desc!r}")
        if "grid" in desc:
            cases.extend(expand_grid(desc, ctx))
        else:
            validate_case(desc, ctx)
            cases.append(desc)
    if not cases:
        raise DomainError("suite has no cases")
    return cases, ctx, int(cfg.get("jobs", 1))


def run_suite(cases: list[dict], ctx: PrecisionCtx, jobs: int) -> dict:
    t0 = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            records = list(ex.map(run_case, cases, itertools.repeat(ctx), chunksize=2))
    else:
        records = [run_case(c, ctx) for c in cases]
    passed = sum(1 for r in records if r["pass"])
    residuals = [r["residual"] for r in records if "residual" in r]
    summary = {"total": len(records), "passed": passed, "failed": len(records) - passed,
               "max_residual": max(residuals, default=None),
               "wall_seconds": round(time.perf_counter() - t0, 3)}
    return {"digits": ctx.digits, "tol": ctx.tol, "cases": records, "summary": summary}


def _write_csv(path: str, report: dict) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theorem", "params", "residual", "pass", "seconds"])
        for r in report["cases"]:
            w.writerow([r["theorem"], json.dumps(r["params"], sort_keys=True),
                        r.get("residual", ""), r["pass"], r["seconds"]])


def cmd_suite(args) -> int:
    cases, ctx, jobs = load_suite(args.config, _ctx(args))
    if args.jobs:
        jobs = args.jobs
    report = run_suite(cases, ctx, jobs)
    _emit(report, args)
    if args.csv:
        _write_csv(args.csv, report)
    return 0 if report["summary"]["failed"] == 0 else 1


def cmd_kernel(args) -> int:
    ctx = _ctx(args)
    x = RootOfUnity.parse(args.x)
    if args.expand is not None:
        c = GaussianRational.parse(args.expand)
        if not c.is_real:
            raise DomainError("expansion points are integers or half-integers")
        point = ExpansionPoint("int", int(c.re)) if args.which == "Phi" and c.re.denominator == 1 \
            else ExpansionPoint.at(Fraction(c.re))
        ls = laurent(point, args.which, args.p, x, args.trunc, ctx)
        lo, coeffs = ls.coefficients()
        _emit({"which": args.which, "p": args.p, "x": str(x), "center": str(ls.center),
               "lowest_order": lo,
               "coefficients": [{"re": fmt_number(v.real, ctx.work_digits),
                                 "im": fmt_number(v.imag, ctx.work_digits)} for v in coeffs]}, args)
        return 0
    if args.s is None:
        raise DomainError("kernel needs --s or --expand")
    v = phi_deriv(args.p, args.s, x, ctx) if args.fn == "phi" else Phi(args.s, x, ctx)
    _emit({"fn": args.fn, "p": args.p, "s": args.s, "x": str(x),
           "value": v.to_json(ctx.work_digits), "err": v.err}, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=40)
    common.add_argument("--tol", type=float, default=1e-25)
    common.add_argument("--max-terms", type=int, default=200000)
    common.add_argument("--jobs", type=int, default=0)
    common.add_argument("--out", default=None, help="also write the JSON report here")
    common.add_argument("--csv", default=None, help="per-case CSV summary (suite)")

    ap = argparse.ArgumentParser(prog="cyclosums", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate one sum")
    e.add_argument("--kind", required=True)
    e.add_argument("--exps", default="")
    e.add_argument("--roots", default="")
    e.add_argument("--q", type=int, default=0)
    e.add_argument("--x", default="0/1")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check", parents=[common], help="check one identity")
    c.add_argument("--theorem", required=True)
    c.add_argument("--p", default="1")
    c.add_argument("--q", type=int, default=1)
    c.add_argument("--k", default="")
    c.add_argument("--x", default="0/1")
    c.add_argument("--y", default="0/1")
    c.add_argument("--roots", default="")
    c.add_argument("--branch", type=int, default=0)
    c.add_argument("--kernel", default="H")
    c.add_argument("--rational", default="")
    c.add_argument("--nmax", type=int, default=200)
    c.add_argument("--relaxed", action="store_true", help="accept r(s) = O(1/s)")
    c.add_argument("--printed", action="store_true", help="use the printed closed form verbatim")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("suite", parents=[common], help="run a suite config")
    s.add_argument("config")
    s.set_defaults(func=cmd_suite)

    k = sub.add_parser("kernel", parents=[common], help="evaluate or expand phi / Phi")
    k.add_argument("--fn", choices=("phi", "Phi"), default="phi")
    k.add_argument("--p", type=int, default=1)
    k.add_argument("--s", default=None)
    k.add_argument("--x", default="0/1")
    k.add_argument("--expand", default=None, help="expansion centre, e.g. -2 or -3/2")
    k.add_argument("--which", choices=("phi_p", "phi_half_p", "Phi"), default="phi_p")
    k.add_argument("--trunc", type=int, default=6)
    k.set_defaults(func=cmd_kernel)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CycloError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
