"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 singular
laminate.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .classification import classify_tensors
from .compliance import compliance
from .errors import DenominatorVanishes, SingularBlockError, ValidationError
from .laminate import Laminate, homogeneity_tensors, load_laminate, stiffness_tensors
from .material import get_material, load_catalog, ply_polar
from .polar import DEFAULT_TOL
from .report import (
    analysis,
    classification_from_report,
    clean,
    csv_rows_analysis,
    fmt,
    pretty_analysis,
    pretty_classification,
    verification,
)
from .response import ThermalLoad, deform, polar_diagram, surface_sample
from .search import DEDUP_POLICIES, PREDICATES, SearchSpec, enumerate_sequences, verify

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_SINGULAR = 3

VERIFY_TOL = 1e-9
TENSORS = ("A", "B", "D", "U", "V", "W", "a", "b", "d", "u", "v1", "v2", "w", "C", "Y")


def _floats(text: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers")
    return vals


def _vec3(text: str) -> list[float]:
    return _floats(text, 3)


def _plate(text: str) -> tuple[float, float]:
    parts = text.lower().split("x")
    try:
        w, h = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"plate size must look like 100x80, got {text!r}")
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError("plate sides must be positive")
    return w, h


def _grid(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be an integer, got {text!r}")
    if n < 2:
        raise argparse.ArgumentTypeError("grid must be at least 2")
    return n


def _emit_json(obj, out) -> None:
    json.dump(clean(obj), out, indent=2, sort_keys=False)
    out.write("\n")


def _emit_csv(rows, header, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    if header:
        w.writerow(header)
    for r in rows:
        w.writerow([f"{v:.9g}" if isinstance(v, float) else v for v in r])


def _format(args) -> str:
    if args.format:
        return args.format
    return "pretty" if sys.stdout.isatty() else "json"


def _catalog(args):
    return load_catalog(args.materials) if args.materials else load_catalog()


def _load(args) -> Laminate:
    return load_laminate(args.laminate, _catalog(args))


def cmd_analyze(args, out) -> int:
    lam = _load(args)
    rep = clean(analysis(lam, args.tol, verify=args.verify))
    fmt_ = _format(args)
    if fmt_ == "json":
        _emit_json(rep, out)
    elif fmt_ == "csv":
        _emit_csv(csv_rows_analysis(rep), ("quantity", "component", "value"), out)
    else:
        out.write(pretty_analysis(rep) + "\n")
    if args.verify and rep["verify"]["oracle_max_deviation"] > VERIFY_TOL:
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_classify(args, out) -> int:
    if args.from_report:
        try:
            rep = json.loads(Path(args.laminate).read_text())
        except OSError as exc:
            raise ValidationError(f"cannot read {args.laminate}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.laminate}: line {exc.lineno}: {exc.msg}") from None
        try:
            report = classification_from_report(rep, args.tol)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"{args.laminate}: not an analysis report ({exc})") from None
    else:
        lam = _load(args)
        s = stiffness_tensors(lam)
        ply = ply_polar(lam.plies[0].material) if lam.identical_plies else None
        report = classify_tensors(s, compliance(s), ply, args.tol)
    rep = clean(report)
    fmt_ = _format(args)
    if fmt_ == "json":
        _emit_json(rep, out)
    elif fmt_ == "csv":
        rows = [(k, v) for k, v in rep.items() if not isinstance(v, (dict, list))]
        rows += [(f"symmetry_{k}", v) for k, v in rep["symmetry"].items()]
        rows += [(f"residual_{k}", v) for k, v in rep["residuals"].items()]
        _emit_csv(rows, ("key", "value"), out)
    else:
        out.write(pretty_classification(rep) + "\n")
    return EXIT_OK


def cmd_deform(args, out) -> int:
    lam = _load(args)
    s = stiffness_tensors(lam)
    c = compliance(s)
    resp = deform(s, c, args.N, args.M, ThermalLoad(args.t, args.grad_t))
    field = surface_sample(resp, *args.plate, args.grid)
    result = {
        "load": {"t": args.t, "grad_t": args.grad_t, "N": args.N, "M": args.M},
        "response": resp.to_dict(),
        "plate_mm": list(args.plate),
        "max_abs_z_mm": float(np.max(np.abs(field[:, 2]))),
    }
    if args.surface:
        target = sys.stdout if args.surface == "-" else open(args.surface, "w", newline="")
        try:
            _emit_csv(field.tolist(), ("x_mm", "y_mm", "z_mm"), target)
        finally:
            if target is not sys.stdout:
                target.close()
        if args.surface == "-":
            return EXIT_OK
    fmt_ = _format(args)
    if fmt_ == "json":
        _emit_json(result, out)
    elif fmt_ == "csv":
        r = resp
        rows = [("eps", i, v) for i, v in zip("126", r.eps)]
        rows += [("kappa", i, v) for i, v in zip("126", r.kappa)]
        rows += [(k, "", getattr(r, k)) for k in ("K_gauss", "H_mean", "kappa_I", "kappa_II")]
        rows.append(("max_abs_z_mm", "", result["max_abs_z_mm"]))
        _emit_csv(rows, ("quantity", "component", "value"), out)
    else:
        r = resp
        out.write(
            f"eps   = [{', '.join(fmt(v) for v in r.eps)}]\n"
            f"kappa = [{', '.join(fmt(v) for v in r.kappa)}] 1/mm\n"
            f"principal curvatures: {fmt(r.kappa_I)}, {fmt(r.kappa_II)} 1/mm\n"
            f"Gaussian curvature K = {fmt(r.K_gauss)} 1/mm^2, mean curvature H = {fmt(r.H_mean)} 1/mm\n"
            f"max |z| over {args.plate[0]:g}x{args.plate[1]:g} mm plate: {fmt(result['max_abs_z_mm'])} mm\n"
        )
    return EXIT_OK


def _tensor_polar(lam: Laminate, name: str):
    s = stiffness_tensors(lam)
    if name in s.polar:
        return s.polar[name]
    if name in ("C", "Y"):
        return homogeneity_tensors(s).polar[name]
    return compliance(s).polar[name]


def cmd_polar_plot(args, out) -> int:
    lam = _load(args)
    try:
        rows = polar_diagram(_tensor_polar(lam, args.tensor), args.component, args.step)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    if args.format == "json":
        _emit_json({"tensor": args.tensor, "component": args.component, "rows": rows}, out)
    else:
        _emit_csv(rows.tolist(), ("theta_deg", "value"), out)
    return EXIT_OK


def _search_material(args):
    return get_material(args.material, _catalog(args))


def cmd_search(args, out) -> int:
    spec = SearchSpec(
        n=args.n,
        orientations=tuple(args.orientations),
        predicates=frozenset(args.predicates),
        max_results=args.max_results,
        dedup=args.dedup,
        material=_search_material(args),
        ply_thickness=args.ply_thickness,
        workers=args.workers,
    )
    fmt_ = _format(args)
    count = 0
    failed = False
    for res in enumerate_sequences(spec):
        count += 1
        failed |= not res.verified
        if fmt_ == "pretty":
            mark = "ok" if res.verified else "VERIFY FAILED"
            out.write("[" + " ".join(f"{a:g}" for a in res.sequence) + f"]  {mark}\n")
        elif fmt_ == "csv":
            out.write(" ".join(f"{a:g}" for a in res.sequence) + f",{res.verified}\n")
        else:
            out.write(json.dumps(clean(res.to_dict())) + "\n")
    if fmt_ == "pretty":
        out.write(f"{count} sequence(s)\n")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def cmd_verify(args, out) -> int:
    if args.sequence is not None:
        lam = Laminate.from_angles(_search_material(args), args.sequence, args.ply_thickness)
    elif args.laminate:
        lam = _load(args)
    else:
        raise ValidationError("verify needs a laminate file or --sequence")
    s = stiffness_tensors(lam)
    c = compliance(s)
    rep = verification(s, c, lam)
    ok = rep["oracle_max_deviation"] <= VERIFY_TOL and rep["v2_identity_deviation"] <= VERIFY_TOL
    ok = ok and rep["two_route_deviation"] <= 1e-10
    if args.predicates:
        if not lam.identical_plies:
            raise ValidationError("predicate checks need identical plies")
        checks = verify(lam.angles_deg, lam.plies[0].material, args.predicates, lam.ply_thickness)
        rep["predicates"] = checks
        ok = ok and all(v["passed"] for v in checks.values())
    rep["passed"] = ok
    fmt_ = _format(args)
    if fmt_ == "json":
        _emit_json(rep, out)
    elif fmt_ == "csv":
        rows = [("oracle_max_deviation", rep["oracle_max_deviation"]),
                ("v2_identity_deviation", rep["v2_identity_deviation"]),
                ("two_route_deviation", rep["two_route_deviation"])]
        rows += [(f"predicate_{k}", v["passed"]) for k, v in rep.get("predicates", {}).items()]
        rows.append(("passed", ok))
        _emit_csv(rows, ("check", "value"), out)
    else:
        out.write(f"oracle max deviation:   {rep['oracle_max_deviation']:.3e}\n")
        out.write(f"v2 identity deviation:  {rep['v2_identity_deviation']:.3e}\n")
        out.write(f"two-route deviation:    {rep['two_route_deviation']:.3e}\n")
        for k, v in rep.get("predicates", {}).items():
            out.write(f"{k}: {'pass' if v['passed'] else 'FAIL'} (residual {v['residual']:.3e})\n")
        out.write("passed\n" if ok else "FAILED\n")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _predicates(text: str) -> list[str]:
    names = [p for p in text.replace(" ", "").split(",") if p]
    bad = [p for p in names if p not in PREDICATES]
    if bad:
        raise argparse.ArgumentTypeError(
            f"unknown predicate(s) {', '.join(bad)}; choose from {', '.join(PREDICATES)}"
        )
    return names


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "pretty"),
                        help="output format (default: pretty on a terminal, json otherwise)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help=f"classification tolerance (default {DEFAULT_TOL:g})")
    common.add_argument("--materials", metavar="PATH",
                        help="extra material catalog (JSON array); overrides $LAMPOLAR_MATERIALS")

    p = argparse.ArgumentParser(prog="lampolar", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    a = sub.add_parser("analyze", parents=[common], help="full tensor report of a laminate")
    a.add_argument("laminate", help="laminate JSON file")
    a.add_argument("--verify", action="store_true",
                   help="add the dense-inversion and two-route cross-checks")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("classify", parents=[common], help="coupling and special-case classification")
    c.add_argument("laminate", help="laminate JSON file, or an analysis report with --from-report")
    c.add_argument("--from-report", action="store_true",
                   help="read the tensors from a JSON report written by 'analyze'")
    c.set_defaults(func=cmd_classify)

    d = sub.add_parser("deform", parents=[common], help="strain and curvature under load")
    d.add_argument("laminate", help="laminate JSON file")
    d.add_argument("--t", type=float, default=0.0, help="uniform temperature change (degC)")
    d.add_argument("--grad-t", type=float, default=0.0,
                   help="through-thickness temperature gradient (degC/mm)")
    d.add_argument("--N", type=_vec3, default=None, metavar="N1,N2,N6",
                   help="force resultants, Kelvin components (N/mm)")
    d.add_argument("--M", type=_vec3, default=None, metavar="M1,M2,M6",
                   help="moment resultants, Kelvin components (N)")
    d.add_argument("--plate", type=_plate, default=(100.0, 100.0), metavar="WxH",
                   help="plate size in mm for the height field (default 100x100)")
    d.add_argument("--grid", type=_grid, default=21, help="height-field points per side (default 21)")
    d.add_argument("--surface", metavar="PATH",
                   help="write the height field as CSV (x_mm,y_mm,z_mm); '-' for stdout")
    d.set_defaults(func=cmd_deform)

    s = sub.add_parser("search", parents=[common], help="enumerate stacking sequences")
    s.add_argument("--n", type=int, required=True, help="number of plies")
    s.add_argument("--orientations", type=_floats, default=[0.0, 90.0], metavar="DEG,...",
                   help="orientation set in degrees (default 0,90)")
    s.add_argument("--predicates", type=_predicates, default=[], metavar="NAME,...",
                   help=f"any of {', '.join(PREDICATES)}")
    s.add_argument("--max-results", type=int, default=None)
    s.add_argument("--dedup", choices=DEDUP_POLICIES, default="none")
    s.add_argument("--workers", type=int, default=1, help="parallel processes (default 1)")
    s.add_argument("--material", default="T300/5208", help="ply material for verification")
    s.add_argument("--ply-thickness", type=float, default=0.125, help="mm")
    s.set_defaults(func=cmd_search)

    pp = sub.add_parser("polar-plot", parents=[common],
                        help="polar diagram data of one tensor component")
    pp.add_argument("laminate", help="laminate JSON file")
    pp.add_argument("--tensor", choices=TENSORS, required=True)
    pp.add_argument("--component", required=True,
                    help="11, 12, 16, 22, 26, 66 (21, 61, 62 for b); 1, 2, 6 for vectors")
    pp.add_argument("--step", type=float, default=1.0, help="angle step in degrees (default 1)")
    pp.set_defaults(func=cmd_polar_plot, format_default="csv")

    v = sub.add_parser("verify", parents=[common],
                       help="cross-check a laminate against the independent routes")
    v.add_argument("laminate", nargs="?", help="laminate JSON file")
    v.add_argument("--sequence", type=_floats, default=None, metavar="DEG,...",
                   help="stacking sequence in place of a file")
    v.add_argument("--material", default="T300/5208", help="ply material for --sequence")
    v.add_argument("--ply-thickness", type=float, default=0.125, help="mm, for --sequence")
    v.add_argument("--predicates", type=_predicates, default=[], metavar="NAME,...",
                   help="also check search predicates on the actual tensors")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None and getattr(args, "format_default", None):
        args.format = args.format_default
    out = sys.stdout
    try:
        return args.func(args, out)
    except ValidationError as exc:
        print(f"lampolar: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SingularBlockError, DenominatorVanishes) as exc:
        print(f"lampolar: singular laminate: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
