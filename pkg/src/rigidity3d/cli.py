"""Command-line front end.

Subcommands operate on JSON documents (see `fileio`):

    analyze    verdict report for any document
    stress     equilibrium stress space, or the inductive proper stress
    lambda     axis invariant (scalar) or interior-edge Jacobian (matrix)
    dent       push a tetrahedron through an edge of a convex surface
    suspend    generate a suspension instance
    signs      dihedral-rate sign analysis of an infinitesimal flex
    probe-pd   spectrum scan of the Jacobian over random instances

Exit codes: 0 on success, 1 for usage or input errors, 2 when an
internal cross-check fails (those messages always name the check).
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import fileio
from .cauchy import (
    CauchyError,
    count_sign_changes,
    dent,
    sign_subgraph,
    sign_vector_from_flex,
    vertex_sign_change_check,
)
from .frameworks import (
    FrameworkError,
    bar_flex_space,
    equilibrium_residual,
    equilibrium_stress_space,
    nontrivial_flex,
)
from .generators import GenerationError, SUSPENSION_PROFILES, suspension_profile
from .geometry import DEFAULT_TOL, GeometryError, Tolerances
from .hessian import (
    DecompositionError,
    lambda_matrix,
    pd_probe,
    rigidity_from_lambda,
)
from .suspensions import (
    SuspensionError,
    inductive_proper_stress,
    lambda_scalar,
    tensegrity_labeling,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2

# every internal cross-check failure message names its check with one of
# these phrases; anything else is treated as bad input
_INVARIANT_MARKERS = ("disagree", "internal", "Gram check", "asymmetric beyond")


def _tolerances(args):
    return Tolerances(rank_tol=args.rank_tol, geom_tol=args.geom_tol)


def _emit_table(args, header, rows):
    if args.csv:
        fileio.write_csv(sys.stdout, header, rows)
        return
    text = [[f"{x:.9g}" if isinstance(x, float) else str(x) for x in row]
            for row in [header, *rows]]
    widths = [max(len(r[c]) for r in text) for c in range(len(header))]
    for row in text:
        print("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))


def _emit_json(payload):
    json.dump(payload, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_analyze(args):
    tol = _tolerances(args)
    loaded = fileio.load(args.file, tol)
    report = fileio.analysis_report(loaded, tol, seed=args.seed)
    if args.json:
        _emit_json(report)
        return EXIT_OK
    print(f"instance  {report['instance_hash']}")
    print(f"vertices  {len(loaded.vertices)}")
    print(f"edges     {loaded.framework.n_edges}")
    for key, value in report["verdicts"].items():
        print(f"  {key:<32} {value}")
    timing = "  ".join(f"{k}={v * 1e3:.1f}ms" for k, v in report["timings"].items())
    print(f"timings   {timing}")
    return EXIT_OK


def cmd_stress(args):
    tol = _tolerances(args)
    loaded = fileio.load(args.file, tol)
    if args.inductive:
        if loaded.suspension is None:
            print("error: --inductive needs a suspension document "
                  "(poles + equator)", file=sys.stderr)
            return EXIT_INPUT
        stress = inductive_proper_stress(loaded.suspension, tol)
        fw = tensegrity_labeling(loaded.suspension, include_ns=True, tol=tol)
        rows = [(i, j, kind.value, stress[(i, j)]) for i, j, kind in fw.edges]
        if args.json:
            _emit_json({
                "kind": "inductive_proper_stress",
                "residual": equilibrium_residual(fw, stress),
                "edges": [dict(zip(("i", "j", "kind", "omega"), r)) for r in rows],
            })
        else:
            _emit_table(args, ("i", "j", "kind", "omega"), rows)
            if not args.csv:
                print(f"# residual {equilibrium_residual(fw, stress):.3e}")
        return EXIT_OK
    basis = equilibrium_stress_space(loaded.framework, tol)
    if args.json:
        _emit_json({
            "kind": "stress_space",
            "dimension": len(basis),
            "basis": [s.omega and {f"{i},{j}": w for (i, j), w in s.omega.items()}
                      for s in basis],
        })
        return EXIT_OK
    if not basis:
        print("stress space is trivial (dimension 0)")
        return EXIT_OK
    header = ("i", "j") + tuple(f"omega{k}" for k in range(len(basis)))
    rows = [(i, j) + tuple(s[(i, j)] for s in basis)
            for i, j in loaded.framework.edge_pairs]
    _emit_table(args, header, rows)
    if not args.csv:
        print(f"# dimension {len(basis)}")
    return EXIT_OK


def cmd_lambda(args):
    tol = _tolerances(args)
    loaded = fileio.load(args.file, tol)
    if loaded.decomposition is not None:
        lam = lambda_matrix(loaded.decomposition, tol=tol)
        if args.json:
            _emit_json({
                "kind": "lambda_matrix",
                "r": lam.r,
                "eigenvalues": [float(x) for x in lam.eigenvalues],
                "positive_definite": lam.is_positive_definite,
                "rigid": rigidity_from_lambda(loaded.decomposition, tol),
                "matrix": lam.matrix.tolist(),
            })
            return EXIT_OK
        if args.csv:
            _emit_table(args, *fileio.matrix_table(lam.matrix))
            return EXIT_OK
        print(f"interior edges      {lam.r}")
        print(f"eigenvalues         {[float(f'{x:.9g}') for x in lam.eigenvalues]}")
        print(f"positive definite   {lam.is_positive_definite}")
        print(f"rigid               {rigidity_from_lambda(loaded.decomposition, tol)}")
        return EXIT_OK
    if loaded.suspension is not None:
        breakdown = lambda_scalar(loaded.suspension, tol)
        if args.json:
            header, rows = fileio.lambda_breakdown_table(breakdown)
            _emit_json({
                "kind": "lambda_scalar",
                "total": breakdown.total,
                "total_projected": breakdown.total_projected,
                "axis_scale": breakdown.scale,
                "terms": [dict(zip(header, r)) for r in rows],
            })
            return EXIT_OK
        _emit_table(args, *fileio.lambda_breakdown_table(breakdown))
        if not args.csv:
            print(f"# total {breakdown.total!r}  "
                  f"projected {breakdown.total_projected!r}")
        return EXIT_OK
    print("error: lambda needs a suspension (poles + equator) or a "
          "decomposition (tetrahedra) document", file=sys.stderr)
    return EXIT_INPUT


def cmd_dent(args):
    tol = _tolerances(args)
    loaded = fileio.load(args.file, tol)
    if loaded.surface is None:
        print("error: dent needs a document with faces", file=sys.stderr)
        return EXIT_INPUT
    surface = loaded.surface
    new_edges = []
    for edge in args.edge:
        result = dent(surface, edge, tol)
        surface = result.surface
        new_edges.append(result.new_edge)
    fileio.save(args.out, surface, metadata={
        "dented_edges": [list(e) for e in args.edge],
        "new_edges": [list(e) for e in new_edges],
        "source": os.path.basename(str(args.file)),
    })
    for edge, new in zip(args.edge, new_edges):
        print(f"dented {tuple(edge)} -> new edge {new}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_suspend(args):
    tol = _tolerances(args)
    seed = 0 if args.seed is None else args.seed
    rng = np.random.default_rng(seed)
    s = suspension_profile(args.profile, rng, args.n, tol)
    doc = fileio.save(args.out, s, metadata={
        "profile": args.profile, "seed": seed, "n": args.n,
    })
    print(f"wrote {args.out}  ({args.profile}, n={args.n}, "
          f"hash {fileio.instance_hash(doc)[:12]})")
    return EXIT_OK


def cmd_signs(args):
    tol = _tolerances(args)
    loaded = fileio.load(args.file, tol)
    if loaded.surface is None:
        print("error: signs needs a document with faces", file=sys.stderr)
        return EXIT_INPUT
    if args.flex_index is not None:
        space = bar_flex_space(loaded.framework, tol)
        if not 0 <= args.flex_index < space.dimension:
            print(f"error: --flex-index must be in [0, {space.dimension})",
                  file=sys.stderr)
            return EXIT_INPUT
        motion = space.basis[args.flex_index]
    else:
        motion = nontrivial_flex(loaded.framework, tol)
        if motion is None:
            print("framework is infinitesimally rigid; no nontrivial flex")
            return EXIT_OK
    signs = sign_vector_from_flex(loaded.surface, motion, tol)
    checks = vertex_sign_change_check(loaded.surface, signs, tol)
    payload = {
        "edge_signs": {f"{i},{j}": signs[(i, j)]
                       for i, j in loaded.surface.edges},
        "vertices": [{
            "vertex": c.vertex, "convex": c.convex, "nonzero": c.nonzero,
            "changes": c.changes, "ok": c.ok, "detail": c.detail,
        } for c in checks],
    }
    if not signs.nonzero_edges:
        payload["note"] = "all dihedral rates vanish"
    else:
        try:
            stats = count_sign_changes(sign_subgraph(loaded.surface, signs, tol))
            payload["totals"] = {
                "sign_changes": stats.s,
                "vertex_bound": stats.vertex_bound,
                "face_bound": stats.face_bound,
                "bounds_contradict": stats.bounds_contradict,
            }
        except CauchyError as exc:
            payload["note"] = f"sign pattern is not a flex pattern: {exc}"
    if args.json:
        _emit_json(payload)
        return EXIT_OK
    _emit_table(args, ("i", "j", "sign"),
                [(i, j, signs[(i, j)]) for i, j in loaded.surface.edges])
    print()
    _emit_table(args, ("vertex", "convex", "nonzero", "changes", "ok"),
                [(c.vertex, c.convex, c.nonzero, c.changes, c.ok)
                 for c in checks])
    for c in checks:
        if not c.ok:
            print(f"# vertex {c.vertex}: {c.detail}")
    if "totals" in payload:
        t = payload["totals"]
        print(f"# sign changes {t['sign_changes']}  "
              f"vertex bound {t['vertex_bound']}  face bound {t['face_bound']}"
              + ("  (bounds contradict: not a flex of any convex position)"
                 if t["bounds_contradict"] else ""))
    if "note" in payload:
        print(f"# {payload['note']}")
    return EXIT_OK


def cmd_probe_pd(args):
    tol = _tolerances(args)
    seed = 0 if args.seed is None else args.seed
    os.makedirs(args.out, exist_ok=True)
    report = pd_probe(trials=args.trials, seed=seed,
                      include_controls=args.include_controls, tol=tol)
    payload = report.to_dict()
    payload["seed"] = seed
    payload["tolerances"] = {"rank_tol": tol.rank_tol, "geom_tol": tol.geom_tol}
    report_path = os.path.join(args.out, "report.json")
    with open(report_path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    with open(os.path.join(args.out, "trials.csv"), "w", newline="") as fh:
        fileio.write_csv(
            fh,
            ("kind", "seed0", "seed1", "r", "min_eigenvalue",
             "diagonal_positive", "weakly_convex", "rigid"),
            [(t.kind, t.seed[0], t.seed[1], t.r, t.min_eigenvalue,
              t.diagonal_positive, t.weakly_convex, t.rigid)
             for t in report.trials],
        )
    for k, ce in enumerate(report.counterexamples):
        boundary = set()
        for t in ce["tetrahedra"]:
            boundary.update(
                (min(t[a], t[b]), max(t[a], t[b]))
                for a in range(4) for b in range(a + 1, 4)
            )
        boundary -= {tuple(e) for e in ce["interior_edges"]}
        fileio.save(
            os.path.join(args.out, f"counterexample_{k}.json"),
            {
                "version": fileio.VERSION,
                "vertices": ce["vertices"],
                "edges": [{"i": i, "j": j, "kind": "bar"}
                          for i, j in sorted(boundary)],
                "tetrahedra": ce["tetrahedra"],
                "metadata": {"trial": ce["trial"]},
            },
        )
    s = payload["summary"]
    print(f"trials {s['trials']}  generation failures {s['generation_failures']}  "
          f"weakly convex {s['weakly_convex_trials']}")
    if "min_eigenvalue" in s:
        e = s["min_eigenvalue"]
        print(f"min eigenvalue  min {e['min']:.6g}  median {e['median']:.6g}  "
              f"max {e['max']:.6g}")
    print(f"non-PD weakly convex instances: {s['non_pd_weakly_convex']}")
    print(f"wrote {report_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _edge(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected i,j — got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"edge endpoints must be integers: {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rank-tol", type=float, default=DEFAULT_TOL.rank_tol,
                        help="relative singular-value cutoff")
    common.add_argument("--geom-tol", type=float, default=DEFAULT_TOL.geom_tol,
                        help="geometric coincidence/flatness cutoff")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized subcommands")
    common.add_argument("--verbose", action="store_true",
                        help="log progress to stderr")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true",
                     help="machine-readable JSON on stdout")
    fmt.add_argument("--csv", action="store_true",
                     help="CSV tables on stdout (repr floats)")

    parser = argparse.ArgumentParser(
        prog="rigidity3d",
        description="rigidity analysis of triangulated polyhedra",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common],
                       help="verdict report for a document")
    p.add_argument("file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("stress", parents=[common],
                       help="equilibrium stresses of the edge framework")
    p.add_argument("file")
    p.add_argument("--inductive", action="store_true",
                   help="peel-and-solve proper stress (suspensions only)")
    p.set_defaults(func=cmd_stress)

    p = sub.add_parser("lambda", parents=[common],
                       help="axis invariant or interior-edge Jacobian")
    p.add_argument("file")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("dent", parents=[common],
                       help="replace the two faces at an edge by the other "
                            "diagonal, pushed inward")
    p.add_argument("file")
    p.add_argument("--edge", type=_edge, action="append", required=True,
                   metavar="I,J", help="edge to dent (repeatable, in order)")
    p.add_argument("--out", required=True, help="output document path")
    p.set_defaults(func=cmd_dent)

    p = sub.add_parser("suspend", parents=[common],
                       help="generate a suspension document")
    p.add_argument("--n", type=int, required=True, help="equator size")
    p.add_argument("--profile", choices=SUSPENSION_PROFILES, default="convex")
    p.add_argument("--out", required=True, help="output document path")
    p.set_defaults(func=cmd_suspend)

    p = sub.add_parser("signs", parents=[common],
                       help="dihedral-rate signs of an infinitesimal flex")
    p.add_argument("file")
    p.add_argument("--flex-index", type=int, default=None,
                   help="flex-basis index (default: a nontrivial flex)")
    p.set_defaults(func=cmd_signs)

    p = sub.add_parser("probe-pd", parents=[common],
                       help="eigenvalue scan of the Jacobian over random "
                            "weakly convex instances")
    p.add_argument("--trials", type=int, default=60)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--include-controls", action="store_true",
                   help="also probe non-weakly-convex controls")
    p.set_defaults(func=cmd_probe_pd)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (fileio.FileFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (GeometryError, FrameworkError, SuspensionError,
            DecompositionError, CauchyError, GenerationError) as exc:
        message = str(exc)
        print(f"error: {message}", file=sys.stderr)
        if any(marker in message for marker in _INVARIANT_MARKERS):
            return EXIT_INVARIANT
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
