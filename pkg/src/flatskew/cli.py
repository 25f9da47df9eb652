"""``flatskew`` command-line interface.

Exit status: 0 on success, 1 on a domain error (JSON description on
stderr), 2 on malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import random
import sys
from fractions import Fraction

from . import io, svg
from .cuts import lift_cuts, sample_liftable_cuts, sample_cuts
from .errors import FlatSkewError, NoCandidates, SchemaError
from .flow import RationalDirection, cylinder_decomposition, flow
from .groups import GroupSpec
from .iet import first_return_iet, shorten_to_convention
from .rational import fmt, parse_rational
from .skew import ergodic_sum, transversal_sum_profile
from .surface import stratum
from .witness import (ApproximationTarget, diagnose, essential_value_witness,
                      sample_region, single_cylinder_search)


def _rational(text):
    try:
        return parse_rational(text)
    except SchemaError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="64-bit seed for every random choice")
    fmt_group = p.add_mutually_exclusive_group()
    fmt_group.add_argument("--json", action="store_const", dest="format", const="json",
                           help="JSON output (default)")
    fmt_group.add_argument("--csv", action="store_const", dest="format", const="csv",
                           help="CSV output for tabular results")
    p.add_argument("--svg", metavar="PATH", help="also write an SVG plot where supported")
    p.add_argument("--threads", type=int, default=1, help="worker processes (speed only)")
    return p


def build_parser():
    common = _common()
    ap = argparse.ArgumentParser(prog="flatskew", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("surface-info", "genus, stratum and vertex classes")
    p.add_argument("--surface", required=True)

    p = add("cyl", "cylinder decomposition in a rational direction")
    p.add_argument("--surface", required=True)
    p.add_argument("--dir", required=True)

    p = add("flow", "flow a point for a rational time")
    p.add_argument("--surface", required=True)
    p.add_argument("--start", required=True, help="'square,x,y'")
    p.add_argument("--dir", required=True)
    p.add_argument("--time", required=True, type=_rational)

    p = add("iet", "first-return interval exchange on a bottom-edge transversal")
    p.add_argument("--surface", required=True)
    p.add_argument("--dir", required=True)
    p.add_argument("--transversal", help="'square,a/b,c/d' (default: all of square 0)")
    p.add_argument("--shorten", action="store_true",
                   help="shrink by slow Rauzy induction towards the minimal interval count")
    p.add_argument("--stop-length", type=_rational, default=Fraction(0))

    p = add("sum", "ergodic sum of the cut cocycle along a trajectory")
    p.add_argument("--surface", required=True)
    p.add_argument("--cuts", required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--dir", required=True)
    p.add_argument("--time", required=True, type=_rational)

    p = add("profile", "exact sum profile over each cylinder period")
    p.add_argument("--surface", required=True)
    p.add_argument("--cuts", required=True)
    p.add_argument("--dir", required=True)

    p = add("search", "single-cylinder directions approximating a slope")
    p.add_argument("--surface", required=True)
    p.add_argument("--target", required=True, help="'p/q', 'cf:a0,a1,...', 'sqrt:n' or 'golden'")
    p.add_argument("--max-q", type=int, required=True)

    p = add("witness", "certify a +g/-g split of a single cylinder")
    p.add_argument("--surface", required=True)
    p.add_argument("--cuts", required=True)
    p.add_argument("--cut-index", type=int, required=True)
    p.add_argument("--max-q", type=int, required=True)
    p.add_argument("--target", default="golden")
    p.add_argument("--tol", type=_rational, default=Fraction(1, 20))
    p.add_argument("--verify", type=int, default=0,
                   help="recheck this many seeded points per region pointwise")

    p = add("diagnose", "empirical fiber statistics over random starts")
    p.add_argument("--surface", required=True)
    p.add_argument("--cuts", required=True)
    p.add_argument("--dir", required=True)
    p.add_argument("--n-points", type=int, default=100)
    p.add_argument("--t-max", type=_rational, default=Fraction(1000))
    p.add_argument("--checkpoints", type=int, default=20)
    p.add_argument("--unpaired", action="store_true", help="drop every minus segment")

    p = add("sample-cuts", "seeded random cut collection")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--surface", help="resample until the collection lifts to this surface")
    p.add_argument("--free", type=int, default=1)
    p.add_argument("--torsion", type=int, nargs="*", default=[])
    return ap


# -- commands ------------------------------------------------------------------------

def _dir(text):
    return RationalDirection.parse(text)


def cmd_surface_info(args):
    surf = io.load_surface(args.surface)
    sig = stratum(surf)
    return {"k": surf.k, "genus": sig.genus, "orders": list(sig.orders), "n": sig.n,
            "stratum": sig.label,
            "vertices": [{"squares": list(vc.squares), "corners": len(vc.corners),
                          "angle_multiple": vc.multiplicity} for vc in surf.vertices]}


def cmd_cyl(args):
    surf = io.load_surface(args.surface)
    return [io.cylinder_to_dict(c) for c in cylinder_decomposition(surf, _dir(args.dir))]


def cmd_flow(args):
    surf = io.load_surface(args.surface)
    res = flow(surf, io.parse_point(args.start), _dir(args.dir), args.time)
    if res.hit_singularity:
        return {"singularity_hit": {"time": fmt(res.hit_time), "vertex": res.hit_vertex}}
    return {"end_point": io.point_to_dict(res.end_point)}


def cmd_iet(args):
    surf = io.load_surface(args.surface)
    direction = _dir(args.dir)
    trans = io.parse_transversal(args.transversal) if args.transversal else (0, 0, 1)
    if args.shorten:
        res = shorten_to_convention(surf, direction, trans[0], stop_length=args.stop_length)
        out = io.iet_to_dict(res.iet, res.transversal)
        out.update(target=res.target, achieved=res.achieved, steps=res.steps,
                   stop_reason=res.stop_reason)
        return out
    return io.iet_to_dict(first_return_iet(surf, direction, trans), trans)


def _lifted(args, surf):
    cuts = io.load_cuts(args.cuts)
    return cuts, lift_cuts(surf, cuts)


def cmd_sum(args):
    surf = io.load_surface(args.surface)
    _, lifted = _lifted(args, surf)
    g = ergodic_sum(surf, lifted, io.parse_point(args.start), _dir(args.dir), args.time)
    return {"value": io.element_to_dict(g)}


def cmd_profile(args):
    surf = io.load_surface(args.surface)
    _, lifted = _lifted(args, surf)
    direction = _dir(args.dir)
    profiles = [transversal_sum_profile(surf, lifted, c, direction)
                for c in cylinder_decomposition(surf, direction)]
    if args.svg and profiles:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg.step_plot(profiles[0].breakpoints, profiles[0].values,
                                   title=f"sum profile, direction {direction}"))
    return [io.profile_to_dict(p) for p in profiles]


def cmd_search(args):
    surf = io.load_surface(args.surface)
    target = ApproximationTarget.parse(args.target)
    cands = single_cylinder_search(surf, target, args.max_q, workers=args.threads)
    if not cands:
        raise NoCandidates(f"no single-cylinder direction with q <= {args.max_q}")
    return [io.candidate_to_dict(c) for c in cands]


def cmd_witness(args):
    surf = io.load_surface(args.surface)
    cuts, lifted = _lifted(args, surf)
    if not 0 <= args.cut_index < len(cuts):
        raise SchemaError(f"cut index {args.cut_index} out of range")
    target = ApproximationTarget.parse(args.target)
    cands = single_cylinder_search(surf, target, args.max_q, workers=args.threads)
    rep = essential_value_witness(surf, cuts, lifted, args.cut_index, cands, args.tol)
    out = io.witness_to_dict(rep)
    if args.verify:
        rng = random.Random(args.seed)
        g = cuts.cuts[args.cut_index].value
        checks = {}
        for region, want in (("plus", g), ("minus", -g)):
            if not getattr(rep, f"{region}_regions"):
                continue
            pts = sample_region(rep, region, rng, args.verify)
            checks[region] = all(ergodic_sum(surf, lifted, x, rep.direction,
                                             rep.candidate.crossings) == want for x in pts)
        out["verified"] = checks
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg.step_plot(rep.profile.breakpoints, rep.profile.values,
                                   title=f"witness profile, direction {rep.direction}"))
    return out


def cmd_diagnose(args):
    surf = io.load_surface(args.surface)
    _, lifted = _lifted(args, surf)
    if args.unpaired:
        lifted = lifted.drop_minus()
    d = diagnose(surf, lifted, _dir(args.dir), args.n_points, args.t_max, args.seed,
                 checkpoints=args.checkpoints)
    if args.svg and d.times:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg.scatter_plot(d.times, [m[0] if m else 0 for m in d.mean_path],
                                      title="mean fiber value"))
    return {"n_points": d.n_points, "t_max": fmt(d.t_max),
            "times": [fmt(t) for t in d.times],
            "mean": [round(m, 12) for m in d.mean], "std": [round(s, 12) for s in d.std],
            "max_abs": list(d.max_abs_path), "histogram": d.histogram,
            "return_fraction": d.return_fraction,
            "crossing_rate": [fmt(r) for r in d.crossing_rate], "resamples": d.resamples}


def cmd_sample_cuts(args):
    group = GroupSpec(args.free, tuple(args.torsion))
    if args.surface:
        surf = io.load_surface(args.surface)
        cuts, _, _ = sample_liftable_cuts(surf, args.n, seed=args.seed, group=group)
    else:
        cuts = sample_cuts(args.n, group=group, seed=args.seed)
    return io.cuts_to_dict(cuts)


COMMANDS = {
    "surface-info": cmd_surface_info, "cyl": cmd_cyl, "flow": cmd_flow, "iet": cmd_iet,
    "sum": cmd_sum, "profile": cmd_profile, "search": cmd_search, "witness": cmd_witness,
    "diagnose": cmd_diagnose, "sample-cuts": cmd_sample_cuts,
}


def _to_csv(result):
    rows = result if isinstance(result, list) else [result]
    keys = sorted({k for r in rows for k in r})
    buf = _stdio.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v
                    for k, v in r.items()})
    return buf.getvalue()


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = COMMANDS[args.command](args)
    except SchemaError as exc:
        print(json.dumps({"error": "SchemaError", "message": str(exc)}), file=stderr)
        return 2
    except FlatSkewError as exc:
        print(json.dumps(exc.to_json()), file=stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=stderr)
        return 2
    if args.format == "csv":
        stdout.write(_to_csv(result))
    else:
        stdout.write(io.dumps(result) + "\n")
    return 0


def main():
    sys.exit(run())
