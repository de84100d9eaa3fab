"""Command line front end.

Every subcommand prints human-readable text by default and a deterministic
JSON document with --json.  Exit codes: 0 success, 1 domain error (failed
precondition, failed recognition, ...), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction

from mpmath import mp

from . import analysis, arith, db, modparam, qform
from .ellcurve import QuadElt, an_coeffs, torsion_subgroup
from .errors import HeegnerlabError
from .heegner import heegner_condition, heegner_fiber


def _digits(prec_bits: int) -> int:
    return max(6, int(prec_bits * 0.30103) + 2)


def _num(v, prec_bits: int) -> str:
    with mp.workprec(prec_bits):
        return mp.nstr(v, _digits(prec_bits), strip_zeros=False)


def jsonify(v, prec_bits: int):
    """Map library values onto the documented JSON schema."""
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, Fraction):
        return {"num": str(v.numerator), "den": str(v.denominator)}
    if isinstance(v, QuadElt):
        return {
            "rational_part": jsonify(v.x, prec_bits),
            "sqrt_part": jsonify(v.y, prec_bits),
            "sqrt_of": v.d,
        }
    if isinstance(v, mp.mpf):
        return {"re": _num(v, prec_bits), "im": "0.0", "prec_bits": prec_bits}
    if isinstance(v, (complex, mp.mpc)):
        return {
            "re": _num(mp.re(v), prec_bits),
            "im": _num(mp.im(v), prec_bits),
            "prec_bits": prec_bits,
        }
    if isinstance(v, dict):
        return {k: jsonify(w, prec_bits) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonify(w, prec_bits) for w in v]
    return str(v)


def _emit(payload: dict, args, text_lines) -> None:
    if args.json:
        print(json.dumps(jsonify(payload, args.prec), sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _form_dict(f):
    return {"a": f.a, "b": f.b, "c": f.c}


def _curve(args):
    return db.find_curve(args.curve, args.database).curve()


def cmd_classgroup(args):
    cg = qform.enumerate_reduced(args.disc)
    structure = qform.group_structure(cg)
    payload = {
        "discriminant": args.disc,
        "order": len(cg.forms),
        "structure": list(structure),
        "forms": [_form_dict(f) for f in cg.forms],
    }
    _emit(
        payload,
        args,
        [
            f"discriminant {args.disc}: h = {len(cg.forms)}, "
            f"structure {' x '.join(f'Z/{d}' for d in structure) or 'trivial'}"
        ]
        + [f"  ({f.a}, {f.b}, {f.c})" for f in cg.forms],
    )
    return 0


def cmd_ring_class(args):
    h = qform.ring_class_number(args.disc, args.conductor)
    payload = {
        "discriminant": args.disc,
        "conductor": args.conductor,
        "ring_class_number": h,
        "odd_part": arith.odd_part(h).odd_part,
    }
    _emit(payload, args, [f"h_{args.conductor}({args.disc}) = {h}"])
    return 0


def cmd_heegner_list(args):
    if not heegner_condition(args.disc, args.level):
        raise HeegnerlabError(
            f"discriminant {args.disc} fails the admissibility condition "
            f"at level {args.level}"
        )
    fiber = heegner_fiber(args.disc, args.level)
    reps = []
    lines = [f"{len(fiber)} fiber representative(s) at level {args.level}:"]
    for rep in fiber:
        tau = rep.tau(args.prec)
        reps.append(
            {
                "form": _form_dict(rep.form),
                "class_form": _form_dict(rep.class_form),
                "tau": tau,
            }
        )
        lines.append(
            f"  ({rep.form.a}, {rep.form.b}, {rep.form.c})"
            f"  tau = {_num(tau, args.prec)}"
        )
    _emit({"discriminant": args.disc, "level": args.level, "points": reps},
          args, lines)
    return 0


def cmd_coeffs(args):
    E = _curve(args)
    q = an_coeffs(E, args.terms)
    payload = {"curve": E.label, "coefficients": list(q.coefficients)}
    _emit(payload, args,
          [f"a_1..a_{args.terms}: {' '.join(str(c) for c in q.coefficients)}"])
    return 0


def cmd_point(args):
    E = _curve(args)
    orbit = modparam.orbit_points(E, args.disc, args.prec)
    tr = modparam.trace_point(orbit)
    recog = None
    recog_err = None
    if not tr.is_identity:
        try:
            if tr.is_real:
                rec = modparam.recognize(
                    [tr.xy], 10**6, E, precision_bits=args.prec
                )
            else:
                x, y = tr.xy
                with mp.workprec(args.prec + 20):
                    conj = (mp.conj(x), mp.conj(y))
                rec = modparam.recognize(
                    [(x, y), conj],
                    10**6,
                    E,
                    precision_bits=args.prec,
                )
            recog = {"kind": rec.kind, "value": rec.value,
                     "residual": mp.mpf(rec.residual)}
        except HeegnerlabError as exc:
            recog_err = str(exc)
    payload = {
        "curve": E.label,
        "discriminant": args.disc,
        "orbit_size": len(orbit.points_z),
        "points_z": list(orbit.points_z),
        "points_xy": [list(p) for p in orbit.points_xy],
        "trace": {
            "is_identity": tr.is_identity,
            "z": tr.z,
            "xy": list(tr.xy) if tr.xy else None,
            "is_real": tr.is_real,
            "half_lattice": tr.half_lattice,
        },
        "recognized": recog,
        "recognition_error": recog_err,
        "precision_bits": args.prec,
        "terms_used": orbit.terms_used,
    }
    lines = [f"{E.label}, D = {args.disc}: orbit of {len(orbit.points_z)} point(s)"]
    for x, y in orbit.points_xy:
        lines.append(f"  x = {_num(x, args.prec)}")
        lines.append(f"  y = {_num(y, args.prec)}")
    if tr.is_identity:
        lines.append("trace: identity")
    else:
        lines.append(f"trace x = {_num(tr.xy[0], args.prec)}")
        lines.append(f"trace y = {_num(tr.xy[1], args.prec)}")
        if tr.half_lattice:
            lines.append("warning: trace lies in an index-2 superlattice")
    if recog:
        val = recog["value"]
        if isinstance(val, tuple) and len(val) == 2:
            val = f"({val[0]}, {val[1]})"
        lines.append(f"recognized ({recog['kind']}): {val}")
    elif recog_err:
        lines.append(f"recognition failed: {recog_err}")
    _emit(payload, args, lines)
    return 0


def cmd_orbit_degree(args):
    E = _curve(args)
    deg = analysis.orbit_degree(E, args.disc, args.mul, args.prec)
    payload = {
        "curve": E.label,
        "discriminant": args.disc,
        "multiplier": args.mul,
        "orbit_degree": deg,
    }
    _emit(payload, args, [f"orbit degree of {args.mul}*P: {deg}"])
    return 0


def cmd_torsion(args):
    E = _curve(args)
    points, structure = torsion_subgroup(E)
    payload = {
        "curve": E.label,
        "order": len(points),
        "structure": list(structure),
        "points": [
            None if P.is_infinity else [P.x, P.y] for P in points
        ],
    }
    desc = " x ".join(f"Z/{d}" for d in structure) or "trivial"
    lines = [f"torsion subgroup of {E.label}: order {len(points)} ({desc})"]
    for P in points:
        lines.append(f"  {P}")
    _emit(payload, args, lines)
    return 0


def cmd_independence(args):
    E = _curve(args)
    discs = [int(s) for s in args.discs.split(",")]
    report = analysis.independence_report(
        E, discs, args.bound, args.prec, conductor=args.conductor
    )
    payload = {
        "curve_label": report.curve_label,
        "entries": [asdict(e) for e in report.entries],
        "search_bound": report.search_bound,
        "relation": (
            None
            if report.relation is None
            else {
                "coefficients": list(report.relation.coefficients),
                "torsion_slack": report.relation.torsion_slack,
            }
        ),
        "verdict": report.verdict,
        "hypothesis_note": report.hypothesis_note,
    }
    lines = [f"{report.curve_label}: verdict {report.verdict}"]
    for e in report.entries:
        if not e.admissible or e.error:
            lines.append(f"  D = {e.discriminant}: ERROR {e.error}")
            continue
        lines.append(
            f"  D = {e.discriminant}: h = {e.class_number} "
            f"(odd part {e.odd_part}), orbit degrees {e.orbit_degrees}"
        )
        lines.append(f"    {e.recognition}")
    if report.relation:
        lines.append(
            f"relation: coefficients {report.relation.coefficients}, "
            f"torsion slack {report.relation.torsion_slack}"
        )
    lines.append(report.hypothesis_note)
    _emit(payload, args, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    # the global flags are accepted both before and after the subcommand;
    # SUPPRESS keeps an unsupplied post-subcommand flag from clobbering a
    # pre-subcommand value
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        default=argparse.SUPPRESS, help="JSON output")
    common.add_argument("--database", default=argparse.SUPPRESS,
                        help="curve database path")
    common.add_argument("--prec", type=int, default=argparse.SUPPRESS,
                        help="working precision in bits (default 200)")
    parser = argparse.ArgumentParser(
        prog="heegnerlab",
        description="class groups, fiber points on modular curves, and "
        "dependence measurements on elliptic curves",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classgroup", parents=[common],
                       help="reduced forms and group structure")
    p.add_argument("--disc", type=int, required=True)
    p.set_defaults(func=cmd_classgroup)

    p = sub.add_parser("ring-class", parents=[common], help="class number of a non-maximal order")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--conductor", type=int, required=True)
    p.set_defaults(func=cmd_ring_class)

    p = sub.add_parser("heegner-list", parents=[common], help="fiber representatives and tau values")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=cmd_heegner_list)

    p = sub.add_parser("coeffs", parents=[common], help="q-expansion coefficients")
    p.add_argument("--curve", required=True)
    p.add_argument("--terms", type=int, required=True)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("point", parents=[common], help="orbit, trace, and recognition")
    p.add_argument("--curve", required=True)
    p.add_argument("--disc", type=int, required=True)
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("orbit-degree", parents=[common], help="distinct conjugates of n*P")
    p.add_argument("--curve", required=True)
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--mul", type=int, required=True)
    p.set_defaults(func=cmd_orbit_degree)

    p = sub.add_parser("torsion", parents=[common], help="rational torsion subgroup")
    p.add_argument("--curve", required=True)
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("independence", parents=[common], help="full dependence-search report")
    p.add_argument("--curve", required=True)
    p.add_argument("--discs", required=True, help="comma-separated discriminants")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--conductor", type=int, default=None)
    p.set_defaults(func=cmd_independence)

    return parser


def run_command(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    # "--discs -7,-11" looks like a following option to argparse; fold the
    # value into the flag
    argv = list(argv)
    for i, tok in enumerate(argv[:-1]):
        if tok == "--discs" and argv[i + 1].startswith("-"):
            argv[i : i + 2] = [f"--discs={argv[i + 1]}"]
            break
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    # global-flag defaults are filled here, not via set_defaults: set_defaults
    # mutates the shared parent actions and the subparser would then clobber a
    # value given before the subcommand
    for dest, default in (("json", False), ("database", None), ("prec", 200)):
        if not hasattr(args, dest):
            setattr(args, dest, default)
    try:
        return args.func(args)
    except HeegnerlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command())
