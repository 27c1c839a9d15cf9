"""Command line interface: ``mxr <subcommand> ...``.

Exit codes: 0 success, 1 failed verification, 2 bad input (precondition,
validation, domain or hypothesis violations; the message names the node or
flag). Reports are printed as tab-separated tables.
"""
import argparse
import math
import sys

import numpy as np

from . import catalog
from .associate import associate_immersion
from .catalog import CatalogSpec
from .documents import MODELS, read_data, write_data, write_mesh
from .errors import (DomainError, HypothesisError, MxRError, PreconditionError, StructuralError,
                     UnsupportedError, ValidationError)
from .frames import (apply_isometry, compare_up_to_isometry, connection_from_data,
                     flatness_residual, integrate_frame, reconstruct_immersion)
from .fundamental import Chart, ParameterGrid, check_compatibility, fundamental_from_chart
from .hopf import hopf_differential, rotation_law_check

INPUT_ERRORS = (PreconditionError, ValidationError, StructuralError, DomainError,
                HypothesisError, UnsupportedError)
COMPARE_TOL = 1e-5
CONJUGATE_TOL = 1e-8
SNAP_TOL = 1e-6


def _table(rows, header, out=None):
    lines = ["\t".join(header)]
    for r in rows:
        lines.append("\t".join(_fmt(x) for x in r))
    text = "\n".join(lines)
    print(text)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return f"{x:.6e}"
    if isinstance(x, (bool, np.bool_)):
        return "pass" if x else "FAIL"
    return str(x)


def _spec(args, text=None):
    return CatalogSpec.parse(text or args.spec, getattr(args, "space", None))


def _grid(args, spec):
    if getattr(args, "grid", None):
        try:
            nu, nv = (int(k) for k in args.grid.lower().split("x"))
        except ValueError:
            raise ValidationError(f"--grid expects NUxNV, got {args.grid!r}")
        a = catalog.default_halfwidth(spec) if args.halfwidth is None else args.halfwidth
        return ParameterGrid(-a, a, -catalog.DEFAULT_HALFWIDTH, catalog.DEFAULT_HALFWIDTH, nu, nv)
    a = catalog.default_halfwidth(spec) if args.halfwidth is None else args.halfwidth
    return ParameterGrid.square(a, catalog.DEFAULT_HALFWIDTH, args.h)


ROUTES = ("closed", "chart", "fd", "samples")


def _data_for(args, spec, grid):
    """closed: exact formulas; chart: analytic chart jets; fd: analytic chart derivatives with
    every data derivative by finite differences; samples: positions only."""
    if args.route == "closed":
        return catalog.fundamental_closed_form(spec, grid)
    ch = catalog.chart(spec, grid.u_max)
    if args.route == "chart":
        return fundamental_from_chart(ch, grid)
    if args.route == "fd":
        return fundamental_from_chart(ch, grid, metric_jet=False)
    return fundamental_from_chart(Chart(ch.sig, ch.evaluate, name=ch.name), grid)


# ---------------------------------------------------------------------------

def cmd_catalog(args):
    rows = []
    for k in catalog.KINDS:
        p = catalog.DEFAULT_PARAMS[k]
        spec = CatalogSpec(k)
        try:
            u0 = f"{catalog.domain_halfwidth(spec):.12f}"
        except UnsupportedError:
            u0 = "-"
        rows.append((k, spec.sig.name, "-" if p is None else repr(p), u0))
    _table(rows, ("kind", "ambient", "default_param", "u0"))
    return 0


def cmd_sample(args):
    spec = _spec(args)
    grid = _grid(args, spec)
    ch = catalog.chart(spec, grid.u_max)
    surf = ch.sample(grid)
    mesh = write_mesh(surf, args.out, args.model, args.drop, name=str(spec))
    if args.data:
        write_data(_data_for(args, spec, grid), args.data)
    _table([(str(spec), grid.n_u, grid.n_v, len(mesh.vertices), len(mesh.faces), mesh.model)],
           ("spec", "nu", "nv", "vertices", "faces", "model"))
    return 0


def cmd_verify(args):
    if args.input:
        data = read_data(args.input)
    elif args.spec:
        spec = _spec(args)
        data = _data_for(args, spec, _grid(args, spec))
    else:
        raise ValidationError("verify needs --in FILE or --spec SPEC")
    rep = check_compatibility(data, args.tol)
    _table([(k, mx, rms, f"{node[0]},{node[1]}", ok) for k, mx, rms, node, ok in rep.rows()],
           ("equation", "max", "rms", "worst_node", "status"), args.tsv)
    for k in rep.violations:
        print(f"violated: {k} (max {rep.max[k]:.3e} at node {rep.worst_node[k]}, tol {rep.tol:.1e})",
              file=sys.stderr)
    print(f"# tol={rep.tol:.3e} result={'pass' if rep.passed else 'FAIL'}")
    return 0 if rep.passed else 1


def _known_target(spec, theta, grid):
    """A closed-form surface x_theta should match, or None."""
    ch = catalog.chart(spec, grid.u_max)
    t = math.remainder(theta, 2 * math.pi)
    if abs(t) < 1e-12:
        return "input", ch.sample(grid)
    if abs(abs(t) - math.pi) < 1e-12:
        return "opposite", apply_isometry(ch.sample(grid), flip_t=True)
    if abs(t - math.pi / 2) < 1e-12:
        try:
            partner = catalog.helicoid_partner(spec)
        except UnsupportedError:
            return None
        return str(partner), catalog.chart(partner, grid.u_max).sample(grid)
    return None


def cmd_associate(args):
    spec = _spec(args)
    grid = _grid(args, spec)
    ch = catalog.chart(spec, grid.u_max)
    rows, status = [], 0
    for k, theta in enumerate(args.theta):
        xt = associate_immersion(ch, theta, grid=grid)
        if args.out:
            path = args.out if len(args.theta) == 1 else _suffixed(args.out, k)
            write_mesh(xt, path, args.model, args.drop, name=f"{spec} theta={theta:g}")
        target = _known_target(spec, theta, grid)
        if target is None:
            rows.append((f"{theta:.17g}", "-", "-", "-"))
            continue
        name, surf = target
        dev = compare_up_to_isometry(surf, xt)
        ok = dev <= COMPARE_TOL
        status = status or (0 if ok else 1)
        rows.append((f"{theta:.17g}", name, dev, ok))
    _table(rows, ("theta", "compared_with", "max_deviation", "status"), args.tsv)
    return status


def _suffixed(path, k):
    stem, dot, ext = path.rpartition(".")
    return f"{stem}_{k}.{ext}" if dot else f"{path}_{k}"


def _snap(a, b):
    """Recompute the catenoid-side parameter from the helicoid's when the relation holds to SNAP_TOL."""
    beta = b.param
    rel = {"s2-unduloid": lambda: math.copysign(math.sqrt(1 + beta * beta), beta),
           "h2-catenoid": lambda: math.copysign(math.sqrt(beta * beta - 1), beta),
           "h2-gencatenoid": lambda: math.copysign(math.sqrt(1 - beta * beta), beta)}
    if a.kind not in rel or b.kind not in ("s2-helicoid", "h2-helicoid"):
        return a, False
    try:
        exact = rel[a.kind]()
    except ValueError:
        return a, False
    if abs(exact - a.param) <= SNAP_TOL and exact != a.param:
        return CatalogSpec(a.kind, exact), True
    return a, False


def cmd_conjugate_check(args):
    parts = args.pair.split(",")
    if len(parts) != 2:
        raise ValidationError(f"--pair expects A,B, got {args.pair!r}")
    a, b = (_spec(args, p) for p in parts)
    a, snapped = _snap(a, b)
    if snapped:
        print(f"# parameter of {a.kind} snapped to {a.param:.17g} from the stated relation", file=sys.stderr)
    rep = catalog.conjugate_pair_check(a, b, step=args.step)
    ok = rep["max"] <= args.tol
    rows = [(k, v, v <= args.tol) for k, v in rep.items() if k != "max"]
    _table(rows, ("check", "max_deviation", "status"), args.tsv)
    print(f"# pair={a},{b} max={rep['max']:.3e} tol={args.tol:.1e} result={'pass' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_reconstruct(args):
    data = read_data(args.input)
    base = tuple(int(k) for k in args.base.split(",")) if args.base else data.grid.center
    conn = connection_from_data(data)
    fr = integrate_frame(conn, data, base=base, gate=args.gate)
    rc = reconstruct_immersion(fr, data, t0=args.t0)
    if args.out:
        write_mesh(rc, args.out, args.model, args.drop, name=data.label)
    flat = float(np.max(flatness_residual(conn)[1:-1, 1:-1]))
    _table([("flatness", flat), ("row_drift", fr.row_drift(conn)),
            ("group_defect", fr.group_defect()), ("projection_displacement", rc.displacement)],
           ("quantity", "value"), args.tsv)
    return 0


def cmd_hopf(args):
    spec = _spec(args)
    grid = _grid(args, spec)
    ch = catalog.chart(spec, grid.u_max)
    q = hopf_differential(ch, grid)
    c = q.values[grid.center]
    print(f"# Q_phi at base = {c.real:.12f}{c.imag:+.12f}i, cross-route {q.cross_route:.3e}")
    rows, status = [], 0
    for theta in args.theta:
        r = rotation_law_check(ch, theta, grid)
        for name, v in r.rows():
            ok = v <= COMPARE_TOL
            status = status or (0 if ok else 1)
            rows.append((f"{theta:.17g}", name, v, ok))
    _table(rows, ("theta", "law", "max_deviation", "status"), args.tsv)
    return status


# ---------------------------------------------------------------------------

def _add_surface(p, required=True):
    p.add_argument("--spec", required=required, help="surface, e.g. s2-helicoid:1 or h2-horocycle")
    p.add_argument("--space", choices=("s2", "h2"), help="ambient for short names (h, u, c, c0, g)")
    p.add_argument("--h", type=float, default=1e-2, help="grid spacing (default 1e-2)")
    p.add_argument("--grid", help="node counts NUxNV (overrides --h)")
    p.add_argument("--halfwidth", type=float, help="u half-width (default min(0.5, 0.9 u0))")


def _add_mesh(p):
    p.add_argument("--model", choices=MODELS, help="mesh model (default by ambient)")
    p.add_argument("--drop", type=int, default=0, help="coordinate dropped by embed4d-drop-coordinate")


def _angle(text):
    t = text.strip().lower().replace(" ", "")
    try:
        return float(t)
    except ValueError:
        pass
    num, _, den = t.partition("/")
    k = num.replace("pi", "").replace("*", "") or "1"
    if k == "-":
        k = "-1"
    if "pi" not in num:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}")
    return float(k) * math.pi / (float(den) if den else 1.0)


def build_parser():
    ap = argparse.ArgumentParser(prog="mxr", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    sub.add_parser("catalog", help="list the surface catalog")

    p = sub.add_parser("sample", help="sample a catalog surface to a mesh (and data document)")
    _add_surface(p)
    _add_mesh(p)
    p.add_argument("--out", required=True, help="OBJ mesh path")
    p.add_argument("--data", help="also write the fundamental-data JSON document")
    p.add_argument("--route", choices=ROUTES, default="closed", help="how the data are computed")

    p = sub.add_parser("verify", help="check the compatibility equations")
    _add_surface(p, required=False)
    p.add_argument("--in", dest="input", help="fundamental-data JSON document")
    p.add_argument("--tol", type=float, help="tolerance (default 1e-8 with exact jets, else 10 h^2)")
    p.add_argument("--route", choices=ROUTES, default="closed", help="how the data are computed")
    p.add_argument("--tsv", help="also write the report table here")

    p = sub.add_parser("associate", help="associate immersions x_theta")
    _add_surface(p)
    _add_mesh(p)
    p.add_argument("--theta", type=_angle, nargs="+", required=True, help="angles (radians or e.g. pi/2)")
    p.add_argument("--out", help="OBJ mesh path (suffixed _k for several angles)")
    p.add_argument("--tsv")

    p = sub.add_parser("conjugate-check", help="algebraic check of a conjugate pair")
    p.add_argument("--pair", required=True, help="A,B e.g. u:1.4142135,h:1")
    p.add_argument("--space", choices=("s2", "h2"))
    p.add_argument("--tol", type=float, default=CONJUGATE_TOL)
    p.add_argument("--step", type=float, default=catalog.PROFILE_STEP)
    p.add_argument("--tsv")

    p = sub.add_parser("reconstruct", help="integrate a data document into an immersion")
    _add_mesh(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--base", help="base node i,j (default centre)")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--gate", type=float, help="flatness gate (default 10 h^2)")
    p.add_argument("--out", help="OBJ mesh path")
    p.add_argument("--tsv")

    p = sub.add_parser("hopf", help="Hopf differential and rotation-law deviations")
    _add_surface(p)
    p.add_argument("--theta", type=_angle, nargs="+", default=[math.pi / 6, math.pi / 2, math.pi])
    p.add_argument("--tsv")
    return ap


COMMANDS = {"catalog": cmd_catalog, "sample": cmd_sample, "verify": cmd_verify,
            "associate": cmd_associate, "conjugate-check": cmd_conjugate_check,
            "reconstruct": cmd_reconstruct, "hopf": cmd_hopf}


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return COMMANDS[args.cmd](args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MxRError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
