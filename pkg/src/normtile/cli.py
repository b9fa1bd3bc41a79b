"""Command-line interface.

Exit codes: 0 success, 1 a check failed (bound, normality, turning,
corner count, 3D residual), 2 bad input (arguments, files, infeasible
requests).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import deregularize as dereg
from . import generators as gen
from . import io
from . import metrics as met
from . import monohedral as mono
from .errors import GeometryCollision, NotMonohedral, TilingError
from .geometry import default_angle_tol
from .mesh import validate_normality

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _floats(arg: str) -> list:
    try:
        return [float(x) for x in arg.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {arg!r}") from None


# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    spec = gen.PatternSpec(args.family, args.rows, args.cols, args.manifold,
                           args.edge_length, args.kind, args.n_seeds, args.seed)
    io.save(gen.generate(spec), args.out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    mesh = io.load(args.file)
    tol = args.angle_tol if args.angle_tol is not None else default_angle_tol()
    m = met.compute_metrics(mesh, tol)
    report = validate_normality(mesh)
    summary = m.summary()
    summary["angle_tol"] = tol
    summary["provenance"] = mesh.provenance
    summary["normality"] = {"ok": report.ok,
                            "violations": [{"kind": v.kind, "detail": v.detail} for v in report.violations]}
    failed = not report.ok
    if mesh.manifold.closed:
        chk = met.check_corner_degree_bound(mesh, tol, m)
        summary["bound_holds"] = chk.holds
        failed |= not chk.holds
    if args.format == "json":
        summary["nodes"] = [{"id": k, "n": n, "r": r, "n_star": s}
                            for k, (n, r, s) in sorted(m.per_node.items())]
        summary["cells"] = [{"id": k, "v": v, "q": q, "v_star": s}
                            for k, (v, q, s) in sorted(m.per_cell.items())]
        _emit(_json(summary), args.out)
    else:
        prefix = args.out or str(Path(args.file).with_suffix(""))
        with open(prefix + ".nodes.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "n", "r", "n_star"])
            w.writerows([k, *row] for k, row in sorted(m.per_node.items()))
        with open(prefix + ".cells.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "v", "q", "v_star"])
            w.writerows([k, *row] for k, row in sorted(m.per_cell.items()))
        scalars = {k: v for k, v in summary.items() if not isinstance(v, (dict, list))}
        sys.stdout.write(_json(scalars))
    if args.symbolic:
        label = args.label or Path(args.file).stem
        io.emit_symbolic_csv([met.symbolic_points(m, "combinatorial", label),
                              met.symbolic_points(m, "corner", label)], args.symbolic)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_deregularize(args) -> int:
    mesh = io.load(args.file)
    plan = dereg.plan_dereg(mesh, args.target_rho, args.seed, args.blend_fraction, args.greedy)
    try:
        out = dereg.apply_dereg(mesh, plan)
    except GeometryCollision as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    io.save(out, args.out)
    return EXIT_OK


def cmd_ball_sweep(args) -> int:
    mesh = io.load(args.file)
    center = _floats(args.center)
    if len(center) != 2:
        raise InputError("--center needs two coordinates X,Y")
    rows = met.ball_sweep(mesh, center, _floats(args.radii), args.policy)
    lines = ["radius,n_bar,v_bar,V,E,F"]
    lines += [f"{r.radius!r},{r.n_bar!r},{r.v_bar!r},{r.V},{r.E},{r.F}" for r in rows]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_monohedral_check(args) -> int:
    mesh = io.load(args.file)
    tol = args.angle_tol if args.angle_tol is not None else default_angle_tol()
    try:
        rep = mono.check_two_corner_minimum(mesh, tol, args.samples_per_arc)
    except NotMonohedral as e:
        _emit(_json({"monohedral": False, "error": str(e)}), None)
        return EXIT_FAIL
    cells, worst = [], 0.0
    for fid, (v_star, total, smooth) in sorted(rep.cells.items()):
        err = abs(total - 2 * math.pi)
        worst = max(worst, err)
        cells.append({"id": fid, "v_star": v_star, "turning_error": err, "smooth_integral": smooth})
    ok = rep.holds and worst <= args.turning_tol
    _emit(_json({"monohedral": True, "holds": rep.holds, "violations": rep.violations,
                 "max_turning_error": worst, "min_v_star": min(c["v_star"] for c in cells),
                 "cells": cells}), None)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_3d(args) -> int:
    r = mono.verify_3d_construction(args.grid)
    ok = r.stack_residual <= 1e-12 and r.side_residual <= 1e-12 and r.vertex_tangent_residual <= 1e-3
    _emit(_json({"grid": args.grid, "stack_residual": r.stack_residual,
                 "side_residual": r.side_residual,
                 "vertex_tangent_residual": r.vertex_tangent_residual, "pass": ok}), None)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_plot(args) -> int:
    points = io.read_symbolic_csv(args.csv)
    names = {"h2": "h2_hyperbola", "rays": "origin_rays"}
    io.emit_symbolic_svg(points, [names[o] for o in args.overlay or ()], args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="normtile", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a pattern and save it")
    p.add_argument("family", choices=gen.FAMILIES)
    p.add_argument("--rows", type=int, default=4)
    p.add_argument("--cols", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifold", choices=("torus", "plane", "sphere"), default="torus")
    p.add_argument("--kind", help="platonic solid or monohedral demo kind")
    p.add_argument("--n-seeds", type=int, default=20)
    p.add_argument("--edge-length", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="degree statistics and bound check")
    p.add_argument("file")
    p.add_argument("--angle-tol", type=float)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="json file, or prefix for the csv tables")
    p.add_argument("--symbolic", help="also write symbolic-plane points to this csv")
    p.add_argument("--label", help="label for the symbolic points")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("deregularize", help="make pairs degenerate down to a target regularity")
    p.add_argument("file")
    p.add_argument("--target-rho", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blend-fraction", type=float, default=0.25)
    p.add_argument("--greedy", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_deregularize)

    p = sub.add_parser("ball-sweep", help="degree averages over growing balls")
    p.add_argument("file")
    p.add_argument("--center", required=True)
    p.add_argument("--radii", required=True)
    p.add_argument("--policy", choices=("centroid", "vertices"), default="centroid")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ball_sweep)

    p = sub.add_parser("monohedral-check", help="turning integrals and corner counts per cell")
    p.add_argument("file")
    p.add_argument("--samples-per-arc", type=int, default=256)
    p.add_argument("--angle-tol", type=float)
    p.add_argument("--turning-tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_monohedral_check)

    p = sub.add_parser("verify-3d", help="sampled check of the smooth-cornered prism cell")
    p.add_argument("--grid", type=int, default=64)
    p.set_defaults(func=cmd_verify_3d)

    p = sub.add_parser("plot", help="svg of symbolic-plane points")
    p.add_argument("csv")
    p.add_argument("--out", required=True)
    p.add_argument("--overlay", action="append", choices=("h2", "rays"))
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, TilingError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
