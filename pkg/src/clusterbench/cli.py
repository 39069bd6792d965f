"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 budget or usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import blc, criteria, numerics, series, symbolic, tables, trees
from .errors import BudgetError, GraphError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAX_ENUMERATE = 8
MAX_COUNT = 30


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _load_frames(path: str | None) -> dict[int, blc.BasicLinearCombination]:
    if not path:
        return {}
    with open(path) as fh:
        records = blc.parse_frame_records(fh)
    return {r.order: blc.load_frame_sum(r) for r in records}


def _representation(rep: str, n: int, frame: str | None) -> blc.BasicLinearCombination:
    if rep == "frame-file":
        frames = _load_frames(frame)
        if n not in frames:
            raise GraphError(f"frame file has no ensembles of order {n}")
        return frames[n]
    return blc.build(rep, n)


REPS = sorted(blc.REPRESENTATIONS) + ["frame-file"]


# -- subcommands ----------------------------------------------------------------------


def cmd_counts(args) -> int:
    if not 2 <= args.n_min <= args.n_max <= MAX_COUNT:
        raise BudgetError(f"counts support 2 <= n <= {MAX_COUNT}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "count_tr", "count_tr0", "enumerated_tr", "enumerated_tr0"])
    for n in range(args.n_min, args.n_max + 1):
        row = [n, trees.count_tr(n), trees.count_tr0(n)]
        if n <= args.enumerate_max:
            reps = trees.enumerate_tr(n)
            row += [len(reps), sum(1 for t, _ in reps if trees.in_t_n0(t))]
        else:
            row += ["", ""]
        w.writerow(row)
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_criteria(args) -> int:
    if args.collection:
        if args.rep not in ("tree-b", "tree-a"):
            raise ValueError("collections are defined for tree-b and tree-a")
        row = "TR" if args.rep == "tree-b" else "TR0"
        scores = [tables.single_score(row, k, args.criterion, {}) for k in range(2, args.n + 1)]
        if None in scores:
            raise BudgetError(f"criterion {args.criterion} of tree sums is computed for n <= {tables.MAX_TREE_ORDER}")
        out = {"rep": args.rep, "n": args.n, "collection": True, "criterion": args.criterion,
               "score": sum(scores), "member_scores": dict(zip(range(2, args.n + 1), scores))}
    else:
        L = _representation(args.rep, args.n, args.frame)
        rep = criteria.report(L)
        out = {"rep": args.rep, "n": args.n, "collection": False, "criterion": args.criterion,
               "score": rep.criterion(args.criterion), **rep.to_dict()}
    _emit(_dump(out), args.output)
    return EXIT_OK


def cmd_tables(args) -> int:
    frames = _load_frames(args.frame)
    ids = range(1, 7) if args.table == "all" else [int(args.table)]
    cells = {t: tables.table_cells(t, frames) for t in ids}
    if args.format == "csv":
        text = tables.to_csv([c for t in ids for c in cells[t]])
    elif args.format == "json":
        text = _dump([c.__dict__ | {"citation": c.citation} for t in ids for c in cells[t]])
    else:
        text = "\n".join(tables.to_markdown(t, cells[t]) for t in ids)
    _emit(text, args.output)
    return EXIT_OK


IDENTITIES = {
    "tree": symbolic.tree_identity,
    "rh": symbolic.ree_hoover_identity,
    "partition": lambda n: symbolic.IdentityResult(symbolic.partition_identity_check(n)),
}


def cmd_verify(args) -> int:
    result = IDENTITIES[args.identity](args.n)
    _emit(_dump({"identity": args.identity, "n": args.n, **result.to_dict()}), args.output)
    return EXIT_OK if result.holds else EXIT_FAIL


def _read_vector(path: str) -> series.CoefficientVector:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return series.CoefficientVector.from_dict(json.loads(text))


def cmd_transform(args) -> int:
    vec = _read_vector(args.input)
    n = args.n or vec.max_index
    exact = all(isinstance(v, (int, Fraction)) for v in vec.values.values())
    if args.to == "B":
        if vec.family == "b":
            run = lambda v: series.mayer_route_report(v, n)
            fn = lambda v: series.virial_from_b(v, n)
        elif vec.family == "a":
            run = lambda v: series.a_route_report(v, n)
            fn = lambda v: series.virial_from_a(v, n)
        else:
            raise ValueError("B is computed from b or a coefficients")
        value, stages = run(vec.values)
        total = stages[-1]
        out = {"from": vec.family, "to": "B", "n": n, "value": series.format_number(value),
               "ops_counted": total.counted, "ops_counted_strict": total.strict,
               "paper_bound": total.bound, "within_bound": all(s.within for s in stages),
               "stages": [s.to_dict() for s in stages]}
        if not exact and vec.errors:
            _, se = series.propagate(fn, vec.values, vec.errors)
            out["std_error"] = se
    elif args.to == "a" and vec.family == "b":
        values = dict(vec.values)
        values.setdefault(1, 1)
        out = series.a_from_b(values, n).to_dict()
    elif args.to == "b" and vec.family == "a":
        out = series.b_from_a(vec.values, n).to_dict()
    else:
        raise ValueError(f"no transform from {vec.family} to {args.to}")
    _emit(_dump(out), args.output)
    return EXIT_OK


ESTIMATE_DEFAULTS = {"rep": "blocks", "n": 2, "potential": "hard-rod", "sigma": 1.0, "epsilon": 1.0,
                     "well_width": 1.5, "beta": 1.0, "nu": 1, "samples": 100000, "seed": 0,
                     "workers": 1, "frame": None, "max_evaluations": None}


def _estimate_config(args) -> dict:
    cfg = dict(ESTIMATE_DEFAULTS)
    if args.config:
        data = json.loads(Path(args.config).read_text())
        unknown = set(data) - set(cfg)
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        cfg.update(data)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def cmd_estimate(args) -> int:
    cfg = _estimate_config(args)
    model = numerics.PotentialModel(cfg["potential"], sigma=cfg["sigma"], epsilon=cfg["epsilon"],
                                    nu=cfg["nu"], beta=cfg["beta"], well_width=cfg["well_width"])
    L = _representation(cfg["rep"], cfg["n"], cfg["frame"])
    rep = numerics.estimate_blc(L, model, cfg["samples"], cfg["seed"], cfg["workers"], cfg["max_evaluations"])
    out = {"config": cfg, "model": model.to_dict(), **rep.to_dict(timing=args.timing)}
    _emit(_dump(out), args.output)
    return EXIT_OK


def cmd_ingest_frame(args) -> int:
    frames = _load_frames(args.file)
    out = []
    for n, L in sorted(frames.items()):
        entry = {"n": n, **criteria.report(L).to_dict()}
        printed = tables.PRINTED[1][2]["F"].get(n)
        if printed is not None:
            entry["printed_cr1"] = printed
            entry["cr1_matches_printed"] = printed == entry["cr1"]
        if args.blc_dir:
            path = Path(args.blc_dir) / f"frame_n{n}.json"
            path.write_text(L.to_json() + "\n")
            entry["blc_file"] = str(path)
        out.append(entry)
    _emit(_dump(out), args.output)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clusterbench", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        sp.add_argument("--output", "-o", help="write to a file instead of stdout")
        return sp

    sp = add("counts", cmd_counts, "closed-form and enumerated class counts")
    sp.add_argument("--n-min", type=int, default=2)
    sp.add_argument("--n-max", type=int, default=10)
    sp.add_argument("--enumerate-max", type=int, default=7,
                    help=f"enumerate representatives up to this n (at most {MAX_ENUMERATE})")

    sp = add("criteria", cmd_criteria, "complexity criteria of one representation")
    sp.add_argument("--rep", choices=REPS, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--criterion", type=int, choices=(1, 2, 3), default=1)
    sp.add_argument("--collection", action="store_true", help="sum over the tree sums of orders 2..n")
    sp.add_argument("--frame", help="frame-sum record file for --rep frame-file")

    sp = add("tables", cmd_tables, "printed vs recomputed complexity tables")
    sp.add_argument("--table", choices=[str(i) for i in range(1, 7)] + ["all"], default="all")
    sp.add_argument("--format", choices=("md", "csv", "json"), default="md")
    sp.add_argument("--frame", help="frame-sum record file filling the L_F rows")

    sp = add("verify", cmd_verify, "exact graph-sum identities")
    sp.add_argument("--identity", choices=sorted(IDENTITIES), required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add("transform", cmd_transform, "series maps with operation counts")
    sp.add_argument("--input", required=True, help="coefficient vector JSON, or - for stdin")
    sp.add_argument("--to", choices=("B", "a", "b"), default="B")
    sp.add_argument("--n", type=int, help="target order (default: highest input index)")

    sp = add("estimate", cmd_estimate, "Monte Carlo estimate of a representation")
    sp.add_argument("--config", help="JSON file with any of the options below")
    sp.add_argument("--rep", choices=["tree-b", "tree-a", "blocks", "rh", "mayer", "frame-file"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--potential", choices=numerics.KINDS)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--well-width", dest="well_width", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--nu", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--max-evaluations", dest="max_evaluations", type=int)
    sp.add_argument("--frame")
    sp.add_argument("--timing", action="store_true", help="include wall time (output no longer reproducible)")

    sp = add("ingest-frame", cmd_ingest_frame, "validate frame-sum records and report their criteria")
    sp.add_argument("--file", required=True)
    sp.add_argument("--blc-dir", help="also write each order as a BLC JSON file here")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "enumerate_max", 0) > MAX_ENUMERATE:
        parser.error(f"--enumerate-max is limited to {MAX_ENUMERATE}")
    try:
        return args.func(args)
    except (BudgetError, GraphError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
