"""Command-line interface.

Every subcommand prints JSON by default (``--format csv`` where a table makes
sense).  Exact numbers are printed as ``p/q`` strings next to a decimal.
Domain errors print ``{"error": reason, "message": ...}`` and exit with 1;
usage errors exit with 2.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import catalog as cat
from . import magnetics as mag
from . import thermostat as th
from .errors import PauliError
from .polytope import EQ, Row, enumerate_vertices
from .rational import exact, fmt


# ---------------------------------------------------------------------------
# output helpers


def plain(obj):
    """Recursively convert results into JSON-ready values."""
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, Row):
        return row_text(obj)
    if isinstance(obj, cat.Inequality):
        return obj.text()
    if dataclasses.is_dataclass(obj):
        return {f.name: plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return str(obj)


def row_text(row: Row, names=None) -> str:
    if names is None:
        return " ".join(fmt(c) for c in row.coeffs) + f" {'=' if row.sense == EQ else '<='} {fmt(row.bound)}"
    terms = []
    for c, n in zip(row.coeffs, names):
        if c:
            mag_ = "" if abs(c) == 1 else fmt(abs(c))
            terms.append(f"{'-' if c < 0 else '+'} {mag_}{n}")
    lhs = " ".join(terms).lstrip("+ ") or "0"
    return f"{lhs} {'=' if row.sense == EQ else '<='} {fmt(row.bound)}"


def exact_pair(value) -> dict:
    value = exact(value)
    return {"exact": fmt(value), "decimal": float(value)}


def emit(payload, args, table=None):
    """Write ``payload`` as JSON, or ``table`` (header, rows) as CSV."""
    if args.format == "csv" and table is not None:
        header, rows = table
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([plain(v) if not isinstance(v, float) else repr(v) for v in r])
        sys.stdout.write(out.getvalue())
    else:
        sys.stdout.write(json.dumps(plain(payload), indent=2) + "\n")


# ---------------------------------------------------------------------------
# argument helpers


def rational_list(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(exact(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def rational(text: str) -> Fraction:
    try:
        return exact(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def load_system(args) -> cat.ConstraintSystem:
    if getattr(args, "system_file", None):
        with open(args.system_file) as fh:
            return cat.ConstraintSystem.parse(fh.read())
    return cat.load_catalog(cat.ShellConfig.parse(args.shell))


def orbital_spectrum(args, system: cat.ConstraintSystem) -> tuple[Fraction, ...]:
    n = system.shell.electron_count
    if args.nu is not None:
        return args.nu
    if args.bcc_a is not None:
        return cat.SymmetrySpec.bcc(args.bcc_a).nu(n)
    if args.fcc_a is not None:
        return cat.SymmetrySpec.fcc(args.fcc_a).nu(n)
    if args.spherical:
        return cat.SymmetrySpec.spherical().nu(n)
    if args.preset:
        return mag.preset_nu(args.preset)
    raise UsageError("give the orbital spectrum via --nu, --bcc-a, --fcc-a, --spherical or --preset")


class UsageError(Exception):
    pass


def add_shell(p, default="d7-high"):
    p.add_argument("--shell", default=default, help="shell key, e.g. d7-high, d8-high, d7-low, d3")
    p.add_argument("--system-file", help="constraint table in the dump format (overrides --shell)")


def add_spectrum(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--nu", type=rational_list, help="orbital occupancies, comma separated (p/q or decimals)")
    g.add_argument("--bcc-a", type=rational, help="BCC spectrum (a, a, a, b, b)")
    g.add_argument("--fcc-a", type=rational, help="FCC spectrum (b, b, a, a, a)")
    g.add_argument("--spherical", action="store_true", help="all occupancies equal")
    g.add_argument("--preset", choices=["fe", "co", "ni"], help="element preset")


# ---------------------------------------------------------------------------
# commands


def cmd_catalog(args):
    if args.spinless:
        n_el, dim = args.spinless
        system = cat.load_spinless_catalog(n_el, dim)
    else:
        system = load_system(args)
    if args.dump:
        sys.stdout.write(system.dump())
        return
    payload = {
        "shell": system.shell.key,
        "total_spin": system.shell.total_spin,
        "inequalities": [r.text() for r in system.inequalities],
        "equalities": [r.text() for r in system.equalities],
        "cubicles": cat.cubicle_report(system),
        "witness": system.witness,
    }
    emit(payload, args, (["cubicle", "row"], [(r.cubicle, r.text()) for r in system.rows()]))


def cmd_dual(args):
    dual = cat.particle_hole_dual(load_system(args))
    if args.dump:
        sys.stdout.write(dual.dump())
        return
    emit({"shell": dual.shell.key, "inequalities": [r.text() for r in dual.inequalities],
          "equalities": [r.text() for r in dual.equalities]}, args,
         (["cubicle", "row"], [(r.cubicle, r.text()) for r in dual.rows()]))


def _symmetry(args) -> cat.SymmetrySpec:
    if args.symmetry in ("bcc", "fcc"):
        return getattr(cat.SymmetrySpec, args.symmetry)(args.a)
    if args.symmetry == "hexagonal":
        return cat.SymmetrySpec.hexagonal(args.a, args.b)
    return cat.SymmetrySpec.spherical()


def cmd_specialize(args):
    system = load_system(args)
    spec = cat.specialize(system, _symmetry(args))
    names = spec.variables
    rows = [row_text(r, names) for r in spec.inequalities]
    payload = {"shell": system.shell.key, "symmetry": spec.symmetry.kind, "variables": names,
               "count": len(rows), "inequalities": rows}
    if spec.parameters:
        payload["homogeneous"] = [[[fmt(v) for v in term] for term in h] for h in spec.homogeneous()]
        payload["parameter_ranges"] = {p: [fmt(v) for v in cat.parameter_interval(spec, p)]
                                       for p in spec.parameters}
    emit(payload, args, (["row"], [(r,) for r in rows]))


def _moment(args, floor=False):
    system = load_system(args)
    nu = orbital_spectrum(args, system)
    res = (mag.moment_floor if floor else mag.moment_bound)(system, nu)
    key = "min_moment" if floor else "max_moment"
    payload = {
        key: fmt(res.value),
        "decimal": float(res.value),
        ("argmin" if floor else "argmax"): res.argmax,
        "tight_rows": res.tight_bounds,
        "active_rows": res.active_rows,
        "nu": res.nu,
    }
    emit(payload, args, ([key, "decimal"], [(res.value, float(res.value))]))


def cmd_bound(args):
    _moment(args)


def cmd_floor(args):
    _moment(args, floor=True)


def cmd_project(args):
    system = load_system(args)
    if args.zero_moment:
        region = mag.zero_moment_region(system)
        rows = [row_text(r, region.variables) for r in region.rows]
        emit({"shell": system.shell.key, "zero_moment_rows": rows}, args, (["row"], [(r,) for r in rows]))
        return
    proj = mag.projected_system(system)
    parts = mag.classify_projection(proj)
    payload = {k: [row_text(r, proj.variables) for r in v] for k, v in parts.items()}
    payload["shell"] = system.shell.key
    emit(payload, args, (["kind", "row"], [(k, row_text(r, proj.variables))
                                           for k, v in parts.items() for r in v]))


def cmd_vertices(args):
    system = load_system(args)
    nu = orbital_spectrum(args, system)
    verts = enumerate_vertices(mag.moment_polytope(system, nu))
    emit({"nu": nu, "vertices": verts}, args, (list(system.mu_names), verts))


def cmd_volume(args):
    system = cat.load_catalog(cat.ShellConfig.parse(args.zero_moment_fraction))
    res = mag.zero_moment_fraction(system, args.convention)
    payload = {"fraction": fmt(res["fraction"]), "decimal": float(res["fraction"]),
               "zero_volume": res["zero_volume"], "reference_volume": res["reference_volume"],
               "convention": res["convention"]}
    emit(payload, args, (["fraction", "decimal"], [(res["fraction"], float(res["fraction"]))]))


def cmd_diagram(args):
    d = mag.iron_diagram(args.a_min, args.a_max)
    payload = {
        "vertices": [{"label": v.label, "a": v.a, "M": v.M} for v in d["vertices"]],
        "upper": [{"from": s.a_from, "to": s.a_to, "formula": s.formula(),
                   "mu_sat": [[fmt(c), fmt(k)] for c, k in s.mu_sat]} for s in d["upper"]],
        "lower": [{"from": s.a_from, "to": s.a_to, "formula": s.formula()} for s in d["lower"]],
    }
    emit(payload, args, (["label", "a", "M"], [(v.label, v.a, v.M) for v in d["vertices"]]))


def cmd_cobalt(args):
    preset = mag.load_presets()["co"]
    occ, unc = preset["occupancies"], preset["uncertainty"]
    a = args.a if args.a is not None else exact(occ["a"])
    b = args.b if args.b is not None else exact(occ["b"])
    c = args.c if args.c is not None else exact(occ["c"])
    m_orb = args.m_orb if args.m_orb is not None else exact(preset["moments"]["orbital"])
    sigma = {k: exact(unc[k]) for k in "abc"} if args.sigma else None
    res = mag.cobalt_bound(a, b, c, m_orb, sigma)
    res.pop("adjustment")
    emit(res, args, (["case", "epsilon", "delta", "bound"],
                     [(cs["case"], cs["epsilon"], cs["delta"], cs["bound"]) for cs in res["cases"]]))


def cmd_nickel(args):
    if args.spherical:
        nu = cat.SymmetrySpec.spherical().nu(8)
    elif args.nu is not None:
        nu = args.nu
    else:
        nu = mag.preset_nu("ni")
    res = mag.nickel_bounds(nu)
    res["minimum_decimal"] = float(res["minimum"])
    emit(res, args, (["row", "label", "value", "decimal"],
                     [(b["row"], b["label"], b["value"], float(b["value"])) for b in res["bounds"]]))


def cmd_check(args):
    system = load_system(args)
    ok, bad = system.check(args.nu, args.mu)
    emit({"feasible": ok, "violated": [f"{r.cubicle}: {r.text()}" for r in bad]}, args,
         (["cubicle", "row"], [(r.cubicle, r.text()) for r in bad]))


def _grid(lo, hi, points):
    if points < 2:
        raise UsageError("--points must be at least 2")
    return np.linspace(lo, hi, points)


def cmd_evolve(args):
    traj = th.evolve(args.a, _grid(0.0, args.beta_max, args.points))
    states = [{"beta": s.beta, "mu": s.mu, "regime": s.regime, "active_facets": s.active_facets,
               "multipliers": s.multipliers} for s in traj.states]
    b1, b2 = th.critical_betas(args.a)
    payload = {
        "a": args.a,
        "critical_betas": {"beta1": b1, "beta2": b2},
        "transitions": [dataclasses.asdict(t) for t in traj.transitions],
        "findings": traj.findings,
        "states": states,
    }
    rows = [(s.beta, *[float(v) for v in s.mu], s.regime, " ".join(map(str, s.active_facets)))
            for s in traj.states]
    emit(payload, args, (["beta", "mu1", "mu2", "mu3", "mu4", "regime", "active"], rows))


def _summary(curve_or_moments, data_path, normalization="model"):
    s = dict(curve_or_moments)
    out = {"beta1": s["beta1"], "beta2": s["beta2"], "M1_over_Msat": s["M1_over_Msat"],
           "M2_over_Msat": s["M2_over_Msat"], "M_sat": s["M_sat"],
           "M1_over_experimental_spin": s["M1"] / s["experimental_spin"],
           "M2_over_experimental_spin": s["M2"] / s["experimental_spin"]}
    if data_path:
        data = th.DataSeries.from_csv(data_path)
        if normalization == "model":
            targets = (out["M1_over_Msat"], out["M2_over_Msat"])
        else:
            targets = (out["M1_over_experimental_spin"], out["M2_over_experimental_spin"])
        t1, t2 = th.crossover_temperatures(targets, data)
        out["T1_kelvin"], out["T2_kelvin"] = t1, t2
    return out


def _moments(a):
    s = th.crossover_moments(a)
    s["experimental_spin"] = mag.experimental_moments("fe").spin
    return s


def cmd_curve(args):
    grid = _grid(args.t_min, args.t_max, args.points)
    curve = th.weiss_curve(args.a, grid)
    summary = _summary(_moments(args.a), args.data, args.normalization)
    if args.format == "csv":
        out = io.StringIO()
        out.write("# summary: " + json.dumps(plain(summary)) + "\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t_reduced", "m_reduced", "beta", "regime", "curve"])
        for name in ("constrained", "unconstrained"):
            for p in curve[name]:
                w.writerow([repr(p.t_reduced), repr(p.m_reduced), repr(p.beta), p.regime, name])
        for p in curve["markers"]:
            w.writerow([repr(p.t_reduced), repr(p.m_reduced), repr(p.beta), p.regime, p.crossover_marker])
        sys.stdout.write(out.getvalue())
        return
    emit({"summary": summary, "markers": curve["markers"], "constrained": curve["constrained"],
          "unconstrained": curve["unconstrained"]}, args)


def cmd_crossover(args):
    if args.m1 is not None and args.m2 is not None:
        data = th.DataSeries.from_csv(args.data)
        t1, t2 = th.crossover_temperatures((float(args.m1), float(args.m2)), data)
        emit({"M1_over_Msat": args.m1, "M2_over_Msat": args.m2, "T1_kelvin": t1, "T2_kelvin": t2}, args)
        return
    emit(_summary(_moments(args.a), args.data, args.normalization), args)


def cmd_baseline(args):
    data = th.DataSeries.from_csv(args.data, kind="susceptibility")
    window = tuple(args.window) if args.window else None
    fit = th.fit_quadratic_baseline(data, window)
    resid = fit["residual"]
    payload = {"a2": fit["a2"], "a0": fit["a0"], "kink_kelvin": th.residual_kink(resid),
               "residual": [list(p) for p in resid.points]}
    emit(payload, args, (["T_kelvin", "residual"], resid.points))


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0, help="only used by randomized test helpers")

    parser = argparse.ArgumentParser(prog="paulimag", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", parents=[common], help="show or dump a constraint table")
    add_shell(p)
    p.add_argument("--dump", action="store_true", help="print the table in its text format")
    p.add_argument("--spinless", type=int, nargs=2, metavar=("N", "ORBITALS"),
                   help="purely orbital constraints for N spinless fermions")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("dual", parents=[common], help="particle-hole dual of a table")
    add_shell(p)
    p.add_argument("--dump", action="store_true")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("specialize", parents=[common], help="substitute a crystal-field spectrum")
    add_shell(p)
    p.add_argument("--symmetry", choices=["bcc", "fcc", "hexagonal", "spherical"], default="bcc")
    p.add_argument("--a", type=rational, help="fix a (symbolic if omitted)")
    p.add_argument("--b", type=rational, help="fix b (hexagonal)")
    p.set_defaults(func=cmd_specialize)

    for name, func, text in (("bound", cmd_bound, "largest spin moment"),
                             ("floor", cmd_floor, "smallest spin moment")):
        p = sub.add_parser(name, parents=[common], help=text)
        add_shell(p)
        add_spectrum(p)
        p.set_defaults(func=func)

    p = sub.add_parser("project", parents=[common], help="eliminate mu, keep (nu, M)")
    add_shell(p)
    p.add_argument("--zero-moment", action="store_true", help="orbital rows allowing M = 0")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("vertices", parents=[common], help="vertices of the moment polytope")
    add_shell(p)
    add_spectrum(p)
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("volume", parents=[common], help="volume fraction of zero-moment spectra")
    p.add_argument("--zero-moment-fraction", metavar="SHELL", default="d7-high")
    p.add_argument("--convention", choices=["chart", "box"], default="chart")
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("diagram", parents=[common], help="admissible (a, M) region for BCC d7")
    p.add_argument("--a-min", type=rational, default=Fraction(7, 5))
    p.add_argument("--a-max", type=rational, default=Fraction(5, 3))
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("cobalt", parents=[common], help="cobalt bound with orbital-moment splitting")
    for k in ("a", "b", "c"):
        p.add_argument(f"--{k}", type=rational)
    p.add_argument("--m-orb", type=rational)
    p.add_argument("--sigma", action="store_true", help="propagate the preset uncertainties")
    p.set_defaults(func=cmd_cobalt)

    p = sub.add_parser("nickel", parents=[common], help="the four d8 bounds")
    p.add_argument("--nu", type=rational_list)
    p.add_argument("--spherical", action="store_true")
    p.set_defaults(func=cmd_nickel)

    p = sub.add_parser("check", parents=[common], help="evaluate every row at a point")
    add_shell(p)
    p.add_argument("--nu", type=rational_list, required=True)
    p.add_argument("--mu", type=rational_list, required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("evolve", parents=[common], help="thermal trajectory of BCC d7")
    p.add_argument("--a", type=rational, default=mag.IRON_A)
    p.add_argument("--beta-max", type=float, default=2.0)
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("curve", parents=[common], help="Weiss magnetization curve")
    p.add_argument("--a", type=rational, default=mag.IRON_A)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--t-min", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=1.05)
    p.add_argument("--data", help="CSV T_kelvin,value of measured M/M_sat")
    p.add_argument("--normalization", choices=["model", "experimental"], default="model")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("crossover", parents=[common], help="crossover temperatures from data")
    p.add_argument("--data", required=True)
    p.add_argument("--a", type=rational, default=mag.IRON_A)
    p.add_argument("--m1", type=rational)
    p.add_argument("--m2", type=rational)
    p.add_argument("--normalization", choices=["model", "experimental"], default="model")
    p.set_defaults(func=cmd_crossover)

    p = sub.add_parser("baseline", parents=[common], help="quadratic baseline and residual")
    p.add_argument("--data", required=True)
    p.add_argument("--window", type=float, nargs=2, metavar=("T_LO", "T_HI"))
    p.set_defaults(func=cmd_baseline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(exc)}) + "\n")
        return 2
    except PauliError as exc:
        sys.stdout.write(json.dumps({"error": exc.reason, "message": str(exc)}) + "\n")
        return 1
    except (ValueError, OSError) as exc:
        sys.stdout.write(json.dumps({"error": "invalid_input", "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
