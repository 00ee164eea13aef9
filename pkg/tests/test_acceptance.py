"""Acceptance criteria 1 to 7.

Each test records a PASS/FAIL line with its runtime; the lines are printed
at the end of the pytest session (see conftest.py) and also when this file
is run directly with ``python tests/test_acceptance.py``.
"""

import hashlib
import sys
import time
from pathlib import Path

import pytest

from wfactor import cli, io, props
from wfactor.action import OneParamAction
from wfactor.cones import Cone, Fan
from wfactor.lattice import dot, snf_diagonal
from wfactor.torific import product_expansion, torify

RESULTS: list[str] = []

V1, V2, V3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def add(*vs):
    return tuple(map(sum, zip(*vs)))


def scale(k, v):
    return tuple(k * x for x in v)


def record(number, title, ok, seconds, limit, detail=""):
    ok = ok and (limit is None or seconds < limit)
    bound = f" < {limit:g} s" if limit is not None else ""
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'}  {title}  ({seconds:.2f} s{bound})"
    if detail:
        line += f"  {detail}"
    RESULTS.append(line)
    return ok


def timed(fn):
    t0 = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - t0


def run_suites(names, trials):
    reports, seconds = timed(lambda: [props.run_suite(props.SUITES[n], 0, trials) for n in names])
    ok = all(r.ok and r.passed == trials for r in reports)
    detail = "; ".join(f"{r.name} {r.passed}/{r.trials}" + ("" if r.ok else f" {r.message}") for r in reports)
    return ok, seconds, detail


def test_criterion_1_example_golden_run():
    act = OneParamAction((2, 1, -1))
    sigma = Cone.from_rays([V1, V2, V3])
    r, seconds = timed(lambda: torify(sigma, act, [2, 1, -1]))
    w = add(scale(2, V1), V2)
    expansion = set(product_expansion([r.ideals[k] for k in sorted(r.ideals)]))
    fan = {
        Cone.from_rays([V1, V3, w]),
        Cone.from_rays([V2, add(V1, V2), add(V2, V3)]),
        Cone.from_rays([V3, w, add(V1, V2), add(V2, V3)]),
    }
    splittings = {Cone.from_rays([V1, V3, w]): (V1, [V3, w]), Cone.from_rays([V2, add(V1, V2), add(V2, V3)]): (V2, [add(V1, V2), add(V2, V3)])}
    normals = {ch.cone: ch.normal for ch in r.heart.checks}
    split_ok = True
    for cone, (vj, rest) in splittings.items():
        u = normals.get(cone)
        split_ok &= u is not None and set(cone.rays) == {vj, *rest}
        split_ok &= u is not None and dot(u, vj) == 1 and dot(u, act.a) == 0 and all(dot(u, x) == 0 for x in rest)
        split_ok &= snf_diagonal([list(vj)] + [list(x) for x in rest]) == (1, 1, 1)
    checks = {
        "a": expansion == {(1, 1, 1), (2, 0, 2), (0, 3, 1), (1, 2, 2)},
        "b": set(r.fan.cones) == fan,
        "c": set(r.dtor) == {V3, add(V1, V2), add(V2, V3), w},
        "d": split_ok and r.heart.ok,
    }
    bad = [k for k, v in checks.items() if not v]
    ok = record(1, "orthant torification golden run", not bad, seconds, 1.0, f"failed parts {bad}" if bad else "")
    assert ok, checks


def test_criterion_2_torify_suite():
    ok, seconds, detail = run_suites(["torify"], 200)
    assert record(2, "torification property suite, 200 trials", ok, seconds, 60.0, detail), detail


def test_criterion_3_boundary_identities():
    ok, seconds, detail = run_suites(["boundary"], 100)
    assert record(3, "boundary projections and sign rule, 100 trials", ok, seconds, 10.0, detail), detail


def test_criterion_4_cobordism_round_trip():
    ok, seconds, detail = run_suites(["cobordism"], 50)
    assert record(4, "standard cobordism round trip, 50 trials", ok, seconds, 60.0, detail), detail


def test_criterion_5_alpha_oracle():
    ok, seconds, detail = run_suites(["alpha"], 100)
    assert record(5, "alpha-torific generators vs brute force, 100 trials", ok, seconds, 60.0, detail), detail


def test_criterion_6_core_invariants():
    ok, seconds, detail = run_suites(["dual", "subdivisions"], 200)
    assert record(6, "dual involution and subdivision invariants, 200 trials each", ok, seconds, 60.0, detail), detail


def test_criterion_7_determinism(tmp_path):
    fan = tmp_path / "fan.json"
    io.write(fan, io.fan_to_json(Fan.from_cones([Cone.from_rays([V1, V2, V3])])))
    centers = tmp_path / "centers.json"
    centers.write_text("[[1, 1, 1], [1, 1, 0], [2, 1, 1]]\n")

    def once(k):
        out = tmp_path / f"trace_{k}.json"
        code = cli.main(["factor", "--fan", str(fan), "--centers", str(centers), "--torify", "--out", str(out)])
        return code, hashlib.sha256(out.read_bytes()).hexdigest()

    runs, seconds = timed(lambda: [once(k) for k in range(3)])
    ok = all(code == 0 for code, _ in runs) and len({h for _, h in runs}) == 1
    assert record(7, "factor traces are byte-identical across runs", ok, seconds, None, runs[0][1][:16]), runs


if __name__ == "__main__":
    here = str(Path(__file__).resolve())
    code = pytest.main([here, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
