"""Command line interface.

Every command prints one JSON document. Exit codes: 0 success, 2 invalid
input (with a JSON defect on stdout), 3 a theorem check failed.
Negative vectors need the ``--a=-1,2`` spelling so argparse does not take
them for options. Commands that need a one-parameter subgroup also read it
from an ``"a"`` key in the fan file when ``--a`` is absent.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import io, pipeline, props
from .action import GeometricQuotientError, OneParamAction, boundary, project_fan, quotient_semigroup
from .cobordism import CobordismError, collapse, standard_cobordism, validate_cobordism
from .cones import Cone, ConeError, Fan, common_refinement, is_smooth, resolve_fan, star_subdivision
from .lattice import LatticeError
from .torific import TorificError, torify

EXIT_OK, EXIT_INVALID, EXIT_THEOREM = 0, 2, 3


class Invalid(Exception):
    pass


def parse_vec(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer vector: {text!r}") from exc


def parse_rays(text: str) -> list[tuple[int, ...]]:
    return [parse_vec(part) for part in text.split(";") if part.strip()]


def _emit(doc, out: Path | None) -> None:
    if out is not None:
        io.write(out, doc)
    else:
        sys.stdout.write(io.dumps(doc))


def _fan(path: Path) -> Fan:
    return io.fan_from_json(io.load(path))


def _fan_and_a(args) -> tuple[Fan, tuple[int, ...] | None]:
    """The fan file and its ``a``; ``--a`` overrides an ``"a"`` key in the file."""
    doc = io.load(args.fan)
    fan = io.fan_from_json(doc)
    a = args.a
    if a is None and isinstance(doc, dict) and "a" in doc:
        a = io._ints(doc["a"], "a")
    return fan, a


def _single_cone(fan: Fan) -> Cone:
    if len(fan.cones) != 1:
        raise Invalid("expected a fan with exactly one maximal cone")
    return fan.cones[0]


def _action(a, rank: int) -> OneParamAction:
    if a is None:
        raise Invalid("--a is required (or an \"a\" key in the fan file)")
    if len(a) != rank:
        raise Invalid(f"--a has length {len(a)}, expected {rank}")
    return OneParamAction(a)


# ---------------------------------------------------------------------------
# commands


def cmd_fan(args) -> int:
    if args.action == "dual":
        c = Cone.from_rays(parse_rays(args.rays)) if args.rays else _single_cone(_fan(args.fan))
        d = c.dual()
        _emit({"rays": [list(r) for r in d.rays], "lines": [list(l) for l in d.lines]}, args.out)
        return EXIT_OK
    fan = _fan(args.fan)
    if args.action == "check":
        bad = fan.problems()
        doc = {"valid": not bad, "problems": bad}
        if not bad:
            doc.update(
                smooth=fan.is_smooth() if all(c.is_strictly_convex for c in fan.cones) else False,
                simplicial=fan.is_simplicial(),
                convex=fan.convex_support() is not None,
            )
        _emit(doc, args.out)
        return EXIT_OK if not bad else EXIT_INVALID
    if args.action == "resolve":
        out = resolve_fan(fan)
    elif args.action == "star":
        if args.rho is None:
            raise Invalid("--rho is required")
        out = star_subdivision(fan, args.rho)
    elif args.action == "refine":
        if args.other is None:
            raise Invalid("--other is required")
        out = common_refinement(fan, _fan(args.other))
    else:  # pragma: no cover - argparse restricts choices
        raise Invalid(args.action)
    _emit(io.fan_to_json(out), args.out)
    return EXIT_OK


def cmd_boundary(args) -> int:
    fan, a = _fan_and_a(args)
    act = _action(a, fan.rank)
    _emit(io.fan_to_json(boundary(fan, act, args.side).fan), args.out)
    return EXIT_OK


def cmd_project(args) -> int:
    fan, a = _fan_and_a(args)
    act = _action(a, fan.rank)
    src = boundary(fan, act, args.side).fan if args.side else fan
    _emit(io.fan_to_json(project_fan(src, act)), args.out)
    return EXIT_OK


def cmd_quotient_semigroup(args) -> int:
    a = args.a
    if args.rays:
        c = Cone.from_rays(parse_rays(args.rays))
    elif args.fan is not None:
        fan, a = _fan_and_a(args)
        c = _single_cone(fan)
    else:
        raise Invalid("--rays or --fan is required")
    act = _action(a, c.rank)
    gens = sorted(list(v) for v in quotient_semigroup(c, act))
    _emit({"generators": gens}, args.out)
    return EXIT_OK


def cmd_torify(args) -> int:
    fan, a = _fan_and_a(args)
    sigma = _single_cone(fan)
    if not is_smooth(sigma):
        raise Invalid("torify needs a smooth cone")
    act = _action(a, sigma.rank)
    r = torify(sigma, act, args.characters, degree_cap=args.degree_cap)
    _emit(io.torification_to_json(r), args.out)
    return EXIT_OK if r.ok else EXIT_THEOREM


def cmd_cobordism(args) -> int:
    if args.action == "build":
        cb = standard_cobordism(_fan(args.fan), pipeline.centers_from_json(io.load(args.centers)) if args.centers else [])
        _emit(io.cobordism_to_json(cb), args.out)
        return EXIT_OK
    cb = io.cobordism_from_json(io.load(args.cobordism))
    if args.action == "validate":
        report = validate_cobordism(cb)
        _emit(report.to_json(), args.out)
        return EXIT_OK if report.ok else EXIT_INVALID
    trace = collapse(cb, torify_groups=args.torify)
    _emit(io.trace_to_json(trace), args.out)
    return EXIT_OK


def cmd_factor(args) -> int:
    sigma = _fan(args.fan)
    centers = pipeline.centers_from_json(io.load(args.centers)) if args.centers else []
    _emit(pipeline.factor_document(sigma, centers, args.torify), args.out)
    return EXIT_OK


def cmd_fixtures(args) -> int:
    cfg = pipeline.RunConfig(command="fixtures", fixtures=args.dir)
    outcomes = pipeline.verify_fixtures(cfg.fixture_dir())
    for o in outcomes:
        status = "PASS" if o.ok else "FAIL"
        print(f"{status:4}  [{o.provenance}]  {o.name}" + (f"\n      {o.diff}" if o.diff else ""), file=sys.stderr)
    _emit({"fixtures": [{"name": o.name, "provenance": o.provenance, "ok": o.ok, "diff": o.diff} for o in outcomes]}, args.out)
    if not outcomes:
        return EXIT_INVALID
    return EXIT_OK if all(o.ok for o in outcomes) else EXIT_THEOREM


def cmd_props(args) -> int:
    if args.mutation:
        r = props.mutation_self_test(args.seed, max(args.trials, 1))
        _emit({"mutation_detected": not r.ok, "report": r.to_json()}, args.out)
        return EXIT_OK if not r.ok else EXIT_THEOREM
    names = args.suite or None
    unknown = [n for n in names or [] if n not in props.SUITES]
    if unknown:
        raise Invalid(f"unknown suite {unknown[0]!r}; choose from {sorted(props.SUITES)}")
    reports = props.run_all(args.seed, args.trials, names, args.persist) if args.trials > 0 else []
    _emit({"seed": args.seed, "trials": args.trials, "suites": [r.to_json() for r in reports]}, args.out)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_THEOREM


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wfactor", description="Toric cobordisms, torification and factorization traces.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fan=True, a=False):
        if fan:
            sp.add_argument("--fan", type=Path, help="fan JSON file")
        if a:
            sp.add_argument("--a", type=parse_vec, help="one-parameter subgroup, e.g. --a=2,1,-1")
        sp.add_argument("--out", type=Path, help="write JSON here instead of stdout")

    sp = sub.add_parser("fan", help="fan utilities")
    sp.add_argument("action", choices=["check", "dual", "resolve", "star", "refine"])
    common(sp)
    sp.add_argument("--rays", help="cone rays for dual, e.g. '1,0;1,2'")
    sp.add_argument("--rho", type=parse_vec, help="ray for star subdivision")
    sp.add_argument("--other", type=Path, help="second fan for refine")
    sp.set_defaults(func=cmd_fan)

    sp = sub.add_parser("boundary", help="lower or upper boundary fan")
    common(sp, a=True)
    sp.add_argument("--side", choices=["lower", "upper"], required=True)
    sp.set_defaults(func=cmd_boundary)

    sp = sub.add_parser("project", help="project a fan (or one of its boundaries) along a")
    common(sp, a=True)
    sp.add_argument("--side", choices=["lower", "upper"])
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("quotient-semigroup", help="generators of invariant monomials")
    common(sp, a=True)
    sp.add_argument("--rays", help="cone rays, e.g. '1,0;0,1'")
    sp.set_defaults(func=cmd_quotient_semigroup)

    sp = sub.add_parser("torify", help="torify a smooth cone")
    common(sp, a=True)
    sp.add_argument("--characters", type=parse_vec, help="character set, default the nonzero weights")
    sp.add_argument("--degree-cap", type=int)
    sp.set_defaults(func=cmd_torify)

    sp = sub.add_parser("cobordism", help="build, validate or collapse a cobordism")
    sp.add_argument("action", choices=["build", "validate", "collapse"])
    common(sp)
    sp.add_argument("--centers", type=Path, help="JSON list of star-subdivision centers")
    sp.add_argument("--cobordism", type=Path, help="cobordism JSON (validate, collapse)")
    sp.add_argument("--torify", action="store_true", help="torify each collapsed bubble")
    sp.set_defaults(func=cmd_cobordism)

    sp = sub.add_parser("factor", help="factor a sequence of star subdivisions through a cobordism")
    common(sp)
    sp.add_argument("--centers", type=Path)
    sp.add_argument("--torify", action="store_true")
    sp.set_defaults(func=cmd_factor)

    sp = sub.add_parser("fixtures", help="replay golden fixtures")
    sp.add_argument("action", choices=["verify"])
    sp.add_argument("--dir", type=Path, help=f"fixture directory (default ${pipeline.FIXTURE_ENV} or tests/fixtures)")
    sp.add_argument("--out", type=Path)
    sp.set_defaults(func=cmd_fixtures)

    sp = sub.add_parser("props", help="randomized property suites")
    sp.add_argument("action", choices=["run"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--suite", action="append", help="restrict to a suite (repeatable)")
    sp.add_argument("--persist", type=Path, help="directory for shrunk counterexamples")
    sp.add_argument("--mutation", action="store_true", help="run the mutation self-test instead")
    sp.add_argument("--out", type=Path)
    sp.set_defaults(func=cmd_props)
    return p


def _defect(kind: str, message: str, defects: Sequence[str] = ()) -> dict:
    return {"error": {"kind": kind, "message": message, "defects": list(defects)}}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    needs_fan = {"boundary", "project", "torify", "factor"}
    try:
        if args.command in needs_fan and args.fan is None:
            raise Invalid("--fan is required")
        return args.func(args)
    except pipeline.TheoremCheckFailed as exc:
        sys.stdout.write(io.dumps(_defect("theorem_check", str(exc), exc.defects)))
        return EXIT_THEOREM
    except (Invalid, io.FormatError, LatticeError, ConeError, TorificError, CobordismError, GeometricQuotientError) as exc:
        sys.stdout.write(io.dumps(_defect("invalid_input", str(exc) or type(exc).__name__)))
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
