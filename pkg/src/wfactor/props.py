"""Randomized property suites with greedy shrinking.

Each suite draws an instance (a JSON-able dict of integers) from a seeded
generator and checks it; a failing instance is shrunk by moving integer
entries toward zero while the failure persists. Suites double as the
acceptance harness, so the checks are phrased against oracles that do not
share code paths with the implementation under test where possible.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass
from functools import reduce
from math import gcd
from pathlib import Path
from typing import Any, Callable

from .action import OneParamAction, boundary, project_fan
from .cobordism import collapse, is_collapsible, precedence_graph, standard_cobordism
from .cones import (
    Cone,
    Fan,
    common_refinement,
    is_subdivision,
    resolve_fan,
    same_support,
    star_subdivision,
)
from .lattice import (
    LatticeError,
    as_vec,
    dot,
    primitive,
    rank,
    solve_rational,
    vecmat,
)
from .torific import (
    alpha_torific_generators,
    is_principal_on,
    minimal_degree_bound,
    torify,
    TorificError,
)


class Invalid(Exception):
    """The drawn (or shrunk) instance does not satisfy the suite's preconditions."""


# ---------------------------------------------------------------------------
# generators


def random_unimodular(rng: random.Random, n: int, steps: int | None = None) -> list[list[int]]:
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 2 * n):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-2, -1, 1, 2))
        M[i] = [x + c * y for x, y in zip(M[i], M[j])]
    for i in range(n):
        if rng.random() < 0.3:
            M[i] = [-x for x in M[i]]
    return M


def random_vector(rng: random.Random, n: int, lo: int, hi: int, nonzero: bool = True) -> list[int]:
    while True:
        v = [rng.randint(lo, hi) for _ in range(n)]
        if any(v) or not nonzero:
            return v


def smooth_instance(rng: random.Random, max_rank: int, full: bool = False, nonzero_chars: bool = True) -> dict:
    n = rng.randint(1, max_rank)
    l = n if full else rng.randint(1, n)
    B = random_unimodular(rng, n)
    chars = [rng.choice([c for c in range(-4, 5) if c or not nonzero_chars]) for _ in range(n)]
    if not any(chars):
        chars[0] = 1
    return {"basis": B, "l": l, "chars": chars}


def _smooth_from(inst: dict) -> tuple[Cone, OneParamAction, list[list[int]]]:
    B = inst["basis"]
    n = len(B)
    if rank(B) != n or abs(_det(B)) != 1:
        raise Invalid("basis is not unimodular")
    l = inst["l"]
    if not 1 <= l <= n:
        raise Invalid("bad l")
    a = vecmat(inst["chars"], B)
    if not any(a):
        raise Invalid("a = 0")
    return Cone.from_rays([tuple(r) for r in B[:l]], n), OneParamAction(a), B


def _det(B) -> int:
    from .lattice import determinant

    return determinant(B)


def random_cone_instance(rng: random.Random, max_rank: int, lo: int = -5, hi: int = 5) -> dict:
    n = rng.randint(1, max_rank)
    k = rng.randint(1, n + 2)
    return {"rank": n, "rays": [random_vector(rng, n, lo, hi) for _ in range(k)]}


def random_pointed_full_cone(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> Cone:
    while True:
        rays = [tuple(random_vector(rng, n, lo, hi)) for _ in range(rng.randint(n, n + 2))]
        c = Cone.from_rays(rays, n)
        if c.is_strictly_convex and c.dim == n:
            return c


# ---------------------------------------------------------------------------
# independent oracles


def caratheodory_member(gens: list[tuple[int, ...]], x: tuple[int, ...]) -> bool:
    """``x`` is a nonnegative combination of ``gens``, by brute force.

    Carathéodory: if it is, it is one of a linearly independent subset.
    Each subset is solved exactly over the rationals.
    """
    if not any(x):
        return True
    n = len(x)
    gens = [g for g in gens if any(g)]
    for k in range(1, min(len(gens), n) + 1):
        for sub in itertools.combinations(gens, k):
            if rank(sub) != k:
                continue
            cols = [[sub[j][i] for j in range(k)] for i in range(n)]
            sol = solve_rational(cols, x)
            if sol is not None and all(s >= 0 for s in sol):
                return True
    return False


def brute_force_minimal_exponents(weights: list[int], alpha: int, modulus: int, bound: int) -> set[tuple[int, ...]]:
    """All minimal e >= 0 with total degree <= bound and the right weight."""
    sols = []
    for e in itertools.product(range(bound + 1), repeat=len(weights)):
        if sum(e) > bound:
            continue
        s = sum(x * w for x, w in zip(e, weights))
        if (modulus and (s - alpha) % modulus == 0) or (not modulus and s == alpha):
            sols.append(e)
    return {e for e in sols if not any(f != e and all(x <= y for x, y in zip(f, e)) for f in sols)}


# ---------------------------------------------------------------------------
# suites


@dataclass
class Suite:
    name: str
    generate: Callable[[random.Random], dict]
    check: Callable[[dict], str | None]
    description: str = ""


def _check_membership(inst: dict) -> str | None:
    n = inst["rank"]
    gens = [tuple(r) for r in inst["rays"]]
    if any(len(g) != n for g in gens) or not any(any(g) for g in gens):
        raise Invalid("bad rays")
    c = Cone.from_rays(gens, n)
    rng = random.Random(json.dumps(inst, sort_keys=True))
    for _ in range(6):
        if rng.random() < 0.5:
            x = tuple(sum(rng.randint(0, 3) * g[i] for g in gens) for i in range(n))
        else:
            x = tuple(rng.randint(-6, 6) for _ in range(n))
        if c.contains(x) != caratheodory_member(gens, x):
            return f"membership of {list(x)} disagrees (facets say {c.contains(x)})"
    return None


def _check_dual(inst: dict) -> str | None:
    n = inst["rank"]
    c = Cone.from_rays([tuple(r) for r in inst["rays"]], n)
    if not (c.is_strictly_convex and c.dim == n):
        raise Invalid("need a pointed full-dimensional cone")
    dd = c.dual().dual()
    if set(dd.rays) != set(c.rays):
        return f"dual of dual is {dd}, not {c}"
    return None


def _fan_instance(rng: random.Random) -> dict:
    n = rng.randint(2, 3)
    c = random_pointed_full_cone(rng, n)
    pts = []
    for _ in range(2):
        w = [rng.randint(0, 2) for _ in c.rays]
        if not any(w):
            w[0] = 1
        pts.append(list(primitive([sum(k * r[i] for k, r in zip(w, c.rays)) for i in range(n)])))
    return {"rank": n, "rays": [list(r) for r in c.rays], "points": pts}


def _fan_from(inst: dict) -> tuple[Cone, Fan]:
    n = inst["rank"]
    c = Cone.from_rays([tuple(r) for r in inst["rays"]], n)
    if not (c.is_strictly_convex and c.dim == n):
        raise Invalid("need a pointed full-dimensional cone")
    return c, Fan.from_cones([c], n)


def _check_subdivisions(inst: dict) -> str | None:
    c, base = _fan_from(inst)
    pts = [as_vec(p) for p in inst["points"]]
    if not all(c.contains(p) and any(p) for p in pts):
        raise Invalid("points must lie in the cone")
    f1 = star_subdivision(base, primitive(pts[0]))
    if not (same_support(f1, base) and is_subdivision(f1, base) and f1.is_valid()):
        return "star subdivision changed the support"
    f2 = star_subdivision(Fan.from_cones(c.triangulate(), c.rank), primitive(pts[1]))
    if not same_support(f2, base):
        return "star subdivision of the triangulation changed the support"
    r = resolve_fan(f1)
    if not (r.is_smooth() and same_support(r, base) and is_subdivision(r, f1)):
        return "resolve_fan is not a smooth subdivision with equal support"
    ref = common_refinement(f1, f2)
    if not (is_subdivision(ref, f1) and is_subdivision(ref, f2) and ref.is_valid()):
        return "common refinement does not subdivide both inputs"
    return None


def _check_torify(inst: dict) -> str | None:
    sigma, act, _ = _smooth_from(inst)
    r = torify(sigma, act)
    if not is_principal_on(r.fan, r.product):
        return "product ideal is not principal on the blow-up"
    if not is_subdivision(r.fan, Fan.from_cones([sigma], sigma.rank)):
        return "blow-up does not preserve the support"
    if not r.heart.ok:
        return "heart condition failed: " + "; ".join(r.heart.defects)
    for c in r.fan.cones:
        split = [ch for ch in r.heart.checks if ch.cone == c]
        tau = [v for v in c.rays if v not in {r.basis[ch.j] for ch in split}]
        if len(split) + (rank(tau) if tau else 0) != c.dim:
            return f"splitting dimensions do not add up on {c}"
    if not r.quasielementary:
        return f"not quasi-elementary: {r.quasielementary.witness}"
    if r.defects:
        return "; ".join(r.defects)
    return None


def _boundary_instance(rng: random.Random) -> dict:
    while True:
        inst = smooth_instance(rng, 4, full=True, nonzero_chars=False)
        if min(inst["chars"]) < 0 < max(inst["chars"]):
            return inst


def _check_boundary(inst: dict) -> str | None:
    sigma, act, B = _smooth_from(inst)
    if sigma.contains(act.a) or sigma.contains(tuple(-x for x in act.a)):
        raise Invalid("a must lie outside plus/minus sigma")
    whole = Fan.from_cones([Cone.from_rays([act.project(r) for r in sigma.rays], act.rank - 1)], act.rank - 1)
    chars = inst["chars"]
    for side, sign in (("lower", -1), ("upper", 1)):
        bf = boundary(sigma, act, side).fan
        w = project_fan(bf, act)
        if not same_support(w, whole):
            return f"projected {side} boundary does not cover pi(sigma)"
        rule = {
            t
            for t in sigma.faces
            if any(sign * al > 0 and tuple(v) not in t.rays for v, al in zip(B, chars))
        }
        if rule != set(bf.all_cones):
            return f"{side} boundary disagrees with the sign rule"
    return None


def _cobordism_instance(rng: random.Random) -> dict:
    n = rng.randint(2, 3)
    B = random_unimodular(rng, n, steps=n)
    sigma = Fan.from_cones([Cone.from_rays([tuple(r) for r in B], n)], n)
    base = sigma
    centers = []
    for _ in range(rng.randint(0, 3)):
        c = rng.choice(base.cones)
        face = rng.choice(sorted((f for f in c.faces if f.dim >= 2), key=Cone.sort_key))
        rho = primitive([sum(r[i] for r in face.rays) for i in range(n)])
        if rho in base.rays:
            continue
        centers.append(list(rho))
        base = star_subdivision(base, rho)
    return {"basis": B, "centers": centers}


def _check_cobordism(inst: dict) -> str | None:
    B = [tuple(r) for r in inst["basis"]]
    n = len(B)
    if abs(_det(B)) != 1:
        raise Invalid("basis is not unimodular")
    sigma = Fan.from_cones([Cone.from_rays(B, n)], n)
    oracle = [sigma]
    for rho in inst["centers"]:
        rho = as_vec(rho)
        if not sigma_contains(oracle[-1], rho) or rho in oracle[-1].rays:
            raise Invalid("bad center")
        oracle.append(star_subdivision(oracle[-1], rho))
    try:
        cb = standard_cobordism(sigma, inst["centers"])
    except Exception as exc:  # noqa: BLE001 - reported as a failure
        return f"standard_cobordism raised {exc}"
    verdict = is_collapsible(cb)
    if not verdict:
        return "standard cobordism is not collapsible"
    for b2, lows in precedence_graph(cb).items():
        if any(verdict.levels[b1] >= verdict.levels[b2] for b1 in lows):
            return "levels do not increase along the precedence relation"
    trace = collapse(cb)
    if list(trace.quotients) != list(reversed(oracle)):
        return "collapse does not retrace the subdivision sequence"
    return None


def sigma_contains(fan: Fan, v) -> bool:
    return any(c.contains(v) for c in fan.cones)


def _alpha_instance(rng: random.Random) -> dict:
    inst = smooth_instance(rng, 4, nonzero_chars=False)
    if not any(inst["chars"][: inst["l"]]):
        inst["chars"][0] = rng.choice([-2, -1, 1, 2])
    inst["alpha"] = rng.choice([c for c in range(-4, 5) if c])
    return inst


def _check_alpha(inst: dict) -> str | None:
    sigma, act, B = _smooth_from(inst)
    alpha = inst["alpha"]
    if not alpha:
        raise Invalid("alpha must be nonzero")
    l = inst["l"]
    bound_w, free_w = inst["chars"][:l], inst["chars"][l:]
    g = reduce(gcd, (abs(w) for w in free_w), 0)
    cap = minimal_degree_bound(bound_w, alpha, g)
    expected = brute_force_minimal_exponents(bound_w, alpha, g, cap + 2)
    try:
        I = alpha_torific_generators(sigma, act, alpha, basis=tuple(tuple(r) for r in B))
    except TorificError as exc:
        if "empty" in str(exc) and not expected:
            return None
        return f"unexpected error {exc}"
    got = {tuple(e[:l]) for e in I.exponents}
    if got != expected:
        return f"generators {sorted(got)} differ from brute force {sorted(expected)}"
    for m in I.generators:
        if dot(act.a, m) != alpha:
            return f"generator {list(m)} has the wrong character"
    return None


SUITES: dict[str, Suite] = {
    "membership": Suite("membership", lambda rng: random_cone_instance(rng, 4), _check_membership,
                        "facet membership agrees with exact nonnegative combinations"),
    "dual": Suite("dual", lambda rng: {"rank": (n := rng.randint(1, 4)),
                                       "rays": [list(r) for r in random_pointed_full_cone(rng, n).rays]},
                  _check_dual, "dual of the dual is the identity"),
    "subdivisions": Suite("subdivisions", _fan_instance, _check_subdivisions,
                          "star subdivision, resolution and common refinement keep the support"),
    "torify": Suite("torify", lambda rng: smooth_instance(rng, 5), _check_torify,
                    "torification is principal, support preserving, split and quasi-elementary"),
    "boundary": Suite("boundary", _boundary_instance, _check_boundary,
                      "both boundaries project onto pi(sigma) and follow the sign rule"),
    "cobordism": Suite("cobordism", _cobordism_instance, _check_cobordism,
                       "collapse of the standard cobordism retraces the subdivisions"),
    "alpha": Suite("alpha", _alpha_instance, _check_alpha,
                   "alpha-torific generators equal the brute-force minimal set"),
}


# ---------------------------------------------------------------------------
# runner


def _shrink_candidates(x: Any):
    if isinstance(x, bool):
        return
    if isinstance(x, int):
        if x != 0:
            yield 0
            if abs(x) > 1:
                yield x // 2 if x > 0 else -((-x) // 2)
            yield x - 1 if x > 0 else x + 1
        return
    if isinstance(x, list):
        for i in range(len(x)):
            if len(x) > 1:
                yield x[:i] + x[i + 1:]
        for i, v in enumerate(x):
            for w in _shrink_candidates(v):
                yield x[:i] + [w] + x[i + 1:]
        return
    if isinstance(x, dict):
        for k in sorted(x):
            for w in _shrink_candidates(x[k]):
                y = dict(x)
                y[k] = w
                yield y


def _fails(suite: Suite, inst: dict) -> str | None:
    try:
        return suite.check(inst)
    except (Invalid, LatticeError, ValueError, ZeroDivisionError, IndexError, KeyError, TypeError):
        return None


def shrink(suite: Suite, inst: dict, budget: int = 400) -> dict:
    """Greedy shrinking: accept any smaller variant that still fails."""
    current = inst
    improved = True
    while improved and budget > 0:
        improved = False
        for cand in _shrink_candidates(current):
            budget -= 1
            if budget <= 0:
                break
            if _fails(suite, cand):
                current = cand
                improved = True
                break
    return current


@dataclass
class SuiteReport:
    name: str
    trials: int
    passed: int
    skipped: int
    seconds: float
    counterexample: dict | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "passed": self.passed,
            "skipped": self.skipped,
            "ok": self.ok,
            "counterexample": self.counterexample,
            "message": self.message,
        }


def run_suite(suite: Suite, seed: int, trials: int, persist: Path | None = None) -> SuiteReport:
    rng = random.Random(f"{suite.name}:{seed}")
    t0 = time.perf_counter()
    passed = skipped = 0
    for _ in range(trials):
        inst = suite.generate(rng)
        try:
            msg = suite.check(inst)
        except Invalid:
            skipped += 1
            continue
        except Exception as exc:  # noqa: BLE001 - a crash is a counterexample
            msg = f"{type(exc).__name__}: {exc}"
        if msg is None:
            passed += 1
            continue
        small = shrink(suite, inst)
        final = _fails(suite, small) or msg
        report = SuiteReport(suite.name, trials, passed, skipped, time.perf_counter() - t0, small, final)
        if persist is not None:
            persist.mkdir(parents=True, exist_ok=True)
            doc = {"suite": suite.name, "seed": seed, "instance": small, "message": final,
                   "provenance": "candidate", "oracle": suite.description}
            (persist / f"candidate_{suite.name}_{seed}.json").write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        return report
    return SuiteReport(suite.name, trials, passed, skipped, time.perf_counter() - t0)


def run_all(seed: int, trials: int, names: list[str] | None = None, persist: Path | None = None) -> list[SuiteReport]:
    return [run_suite(SUITES[n], seed, trials, persist) for n in (names or list(SUITES))]


def mutation_self_test(seed: int = 0, trials: int = 50) -> SuiteReport:
    """Break ``Cone.dual`` on purpose and confirm the dual suite notices."""
    original = Cone.dual

    def broken(self):
        return original(self) if len(self.rays) % 2 else self

    Cone.dual = broken
    try:
        return run_suite(SUITES["dual"], seed, trials)
    finally:
        Cone.dual = original
