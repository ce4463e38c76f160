"""Batch command-line front end.

Exit codes are a contract for CI: 0 success, 2 usage or violated
hypothesis, 3 missing registry value (the key is named), 4 failed
verification or table mismatch (the witness or row is named).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import bounds
from .constructions import ConstructionPlan, parse_plan, run_plan
from .counting import bounded_rank_size, delsarte_rank_count, gauss_binomial, mrd_size
from .errors import CdckitError, Mismatch, RegistryMiss
from .registry import BaseBoundRegistry, shipped_registry
from .subspaces import cdc_from_text, cdc_to_text, verify_min_distance

USAGE_EXIT, REGISTRY_EXIT, VERIFY_EXIT = 2, 3, 4


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _load_registry(path: Optional[str]) -> BaseBoundRegistry:
    reg = BaseBoundRegistry(dict(shipped_registry().entries))
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            reg.merge_text(fh.read())
    return reg


def _cmd_count(args) -> int:
    expr = args.expr
    vals = args.args
    arity = {"gauss": 3, "mrd": 4, "delsarte": 5, "bounded": 5}
    if expr not in arity:
        print(f"unknown expression {expr!r}", file=sys.stderr)
        return USAGE_EXIT
    if len(vals) != arity[expr]:
        print(f"{expr} takes {arity[expr]} integers, got {len(vals)}", file=sys.stderr)
        return USAGE_EXIT
    if expr == "gauss":
        n, k, q = vals
        print(gauss_binomial(n, k, q))
    elif expr == "mrd":
        print(mrd_size(*vals))
    elif expr == "delsarte":
        print(delsarte_rank_count(*vals))
    else:
        print(bounded_rank_size(*vals))
    return 0


_PLAN_TO_BOUND = {
    "linkage": "linkage",
    "multiblocks": "cor41",
    "parallel_blocks": "cor42",
    "multilevel_I": "cor43",
    "multilevel_II": "cor44",
}


def _bound_params_from_plan(plan: ConstructionPlan) -> tuple:
    if plan.family not in _PLAN_TO_BOUND:
        raise ValueError(
            f"family {plan.family!r} has no closed-form bound; evaluate it "
            f"with `build --count-only`"
        )
    family = _PLAN_TO_BOUND[plan.family]
    p = dict(plan.params)
    p.setdefault("n2", plan.n - p["n1"])
    if "a1" in p:
        p.setdefault("a2", plan.k - p["a1"])
    if "u1" in p:
        p.setdefault("u2", plan.k - p["u1"])
    names = bounds.FAMILY_PARAM_NAMES[family]
    return family, {nm: p[nm] for nm in names if nm in p}


def _cmd_bound(args) -> int:
    registry = _load_registry(args.registry)
    if args.plan:
        with open(args.plan, "r", encoding="utf-8") as fh:
            plan = parse_plan(fh.read())
        family, params = _bound_params_from_plan(plan)
        q, n, d, k = plan.q, plan.n, plan.d, plan.k
    else:
        family = args.family
        q, n, d, k = args.q, args.n, args.d, args.k
        if None in (q, n, d, k):
            print("--q --n --d --k are required without --plan", file=sys.stderr)
            return USAGE_EXIT
        if family == "cor45":
            total = bounds.bound_cor45_poly(n, d, k, q, registry)
            _emit({"family": "cor45", "q": q, "n": n, "d": d, "k": k, "total": total})
            print(f"# A_{q}({n},{d},{k}) >= {total}", file=sys.stderr)
            return 0
        names = bounds.FAMILY_PARAM_NAMES[family]
        given = {nm: getattr(args, nm) for nm in
                 ("n1", "n2", "a1", "a2", "b1", "b2", "t1", "t2", "c1", "c2",
                  "u1", "u2", "lam") if getattr(args, nm, None) is not None}
        if "n1" in given:
            given.setdefault("n2", n - given["n1"])
        if "a1" in given:
            given.setdefault("a2", k - given["a1"])
        if "u1" in given:
            given.setdefault("u2", k - given["u1"])
        params = {nm: given[nm] for nm in names if nm in given}
        missing = [nm for nm in names if nm not in params and nm != "lam"]
        if missing:
            print(f"{family} needs flags: {' '.join('--'+m for m in missing)}",
                  file=sys.stderr)
            return USAGE_EXIT
    fn = bounds.FAMILY_EVALUATORS[family]
    result = fn(q, n, d, k, registry=registry, **params)
    _emit({
        "family": result.family, "q": q, "n": n, "d": d, "k": k,
        "params": result.params, "total": result.total, "terms": result.terms,
        "registry_deps": [list(t) for t in sorted(set(result.registry_deps))],
    })
    print(f"# A_{q}({n},{d},{k}) >= {result.total} via {family} {result.params}",
          file=sys.stderr)
    return 0


def _cmd_table(args) -> int:
    registry = _load_registry(args.registry)
    ids = [args.id] if args.id else list(bounds.ALL_TABLE_IDS)
    bad = 0
    for tid in ids:
        for row in bounds.reproduce_table(tid, q_filter=args.q, registry=registry):
            _emit(row)
            if not row["match"]:
                bad += 1
                print(
                    f"# MISMATCH table {tid} row {row['row']} "
                    f"A_{row['q']}({row['n']},{row['d']},{row['k']}): "
                    f"computed {row['computed']} != {row['published_new']} "
                    f"(delta {row['computed'] - row['published_new']})",
                    file=sys.stderr,
                )
    if bad:
        print(f"# {bad} rows mismatched", file=sys.stderr)
        return VERIFY_EXIT
    return 0


def _cmd_build(args) -> int:
    registry = _load_registry(args.registry)
    with open(args.plan, "r", encoding="utf-8") as fh:
        plan = parse_plan(fh.read())
    out = run_plan(plan, registry, explicit=not args.count_only)
    for name, value in sorted(out.component_counts.items()):
        _emit({"component": name, "count": value})
    _emit({"total": out.total, "explicit": out.cdc is not None})
    if out.cdc is not None and args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(cdc_to_text(out.cdc))
        print(f"# wrote {len(out.cdc)} codewords to {args.out}", file=sys.stderr)
    return 0


def _cmd_verify(args) -> int:
    with open(args.infile, "r", encoding="utf-8") as fh:
        code = cdc_from_text(fh.read())
    mode = args.mode
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    if mode.startswith("sample:"):
        parts = mode.split(":")
        count = int(parts[1])
        seed = int(parts[2]) if len(parts) > 2 else args.seed
        if seed is None:
            print("sampling needs a seed: use sample:N:SEED or --seed", file=sys.stderr)
            return USAGE_EXIT
        report = verify_min_distance(code, mode="sample", sample_count=count, seed=seed)
    elif mode == "exhaustive":
        report = verify_min_distance(code, jobs=jobs)
    else:
        print(f"bad --mode {mode!r}; use exhaustive or sample:N:SEED", file=sys.stderr)
        return USAGE_EXIT
    payload = {
        "min_found": None if report.min_found == float("inf") else report.min_found,
        "pairs_checked": report.pairs_checked,
        "mode": report.mode,
        "seed": report.seed,
        "claimed_d": code.d,
        "ok": bool(report.ok(code.d)),
    }
    if report.witness is not None:
        i, j = report.witness
        payload["witness"] = {
            "indices": [i, j],
            "rows_i": [list(code.codewords[i].mat.row(r)) for r in range(code.k)],
            "rows_j": [list(code.codewords[j].mat.row(r)) for r in range(code.k)],
        }
    _emit(payload)
    if not report.ok(code.d):
        print(f"# FAIL min_found {report.min_found} < claimed {code.d}; "
              f"witness pair {report.witness}", file=sys.stderr)
        return VERIFY_EXIT
    return 0


def _cmd_registry(args) -> int:
    registry = _load_registry(args.registry)
    if args.action == "list":
        sys.stdout.write(registry.to_text())
        return 0
    q, n, d, k = args.args
    value, source = registry.lookup(q, n, d, k)
    print(f"{value} {source}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cdckit",
                                 description="constant-dimension code workbench")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("count", help="exact q-combinatorics")
    p.add_argument("expr", help="gauss|mrd|delsarte|bounded")
    p.add_argument("args", nargs="*", type=int)
    p.set_defaults(fn=_cmd_count)

    p = sub.add_parser("bound", help="evaluate a lower-bound family")
    p.add_argument("--family", choices=list(bounds.FAMILY_EVALUATORS) + ["cor45"])
    p.add_argument("--plan")
    p.add_argument("--registry")
    for nm in ("q", "n", "d", "k", "n1", "n2", "a1", "a2", "b1", "b2",
               "t1", "t2", "c1", "c2", "u1", "u2", "lam"):
        p.add_argument(f"--{nm}", type=int)
    p.set_defaults(fn=_cmd_bound)

    p = sub.add_parser("table", help="reproduce published table rows")
    p.add_argument("--id", type=int, choices=bounds.ALL_TABLE_IDS)
    p.add_argument("--q", type=int)
    p.add_argument("--registry")
    p.set_defaults(fn=_cmd_table)

    p = sub.add_parser("build", help="run a construction plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--out")
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--registry")
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("verify", help="check the minimum distance of a CDC file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", default="exhaustive", help="exhaustive | sample:N:SEED")
    p.add_argument("--seed", type=int, help="sampling seed (alternative to sample:N:SEED)")
    p.add_argument("--jobs", type=int, default=0,
                   help="verification workers; 0 means available parallelism")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("registry", help="inspect base code sizes")
    p.add_argument("action", choices=["list", "get"])
    p.add_argument("args", nargs="*", type=int)
    p.add_argument("--registry")
    p.set_defaults(fn=_cmd_registry)

    return ap


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except RegistryMiss as exc:
        q, n, d, k = exc.key
        print(f"registry miss: ({q},{n},{d},{k})", file=sys.stderr)
        return REGISTRY_EXIT
    except Mismatch as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return VERIFY_EXIT
    except (CdckitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
