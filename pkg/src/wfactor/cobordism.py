"""Toric birational cobordisms and their collapse into a factorization.

A cobordism is a fan in N together with a one-parameter subgroup a. Its
maximal cones whose span contains a are the bubbles (fixed-point
components). Replacing the lower boundary of a bubble by its upper
boundary, bubble by bubble, walks from the lower quotient to the upper
one; each intermediate stage projects to a fan of the factorization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Literal, Sequence

from .action import (
    GeometricQuotientError,
    OneParamAction,
    boundary,
    flows_into,
    is_fixed_face,
    project_cone,
    project_fan,
)
from .cones import Cone, ConeError, Fan, is_smooth, same_support, star_subdivision
from .lattice import Vec, as_vec, dot, neg, solve_rational
from .torific import TorificationResult, is_quasielementary_fan, torify


class CobordismError(ValueError):
    """Raised when a cobordism cannot be built or collapsed."""


@dataclass(frozen=True)
class CobordismFan:
    fan: Fan
    act: OneParamAction
    provenance: Literal["constructed", "user"] = "user"
    stages: tuple[Fan, ...] = ()
    hints: tuple[tuple[Cone, int], ...] = ()

    def __post_init__(self):
        if self.fan.rank != self.act.rank:
            raise CobordismError("fan and action live in different lattices")


@dataclass(frozen=True, order=True)
class Bubble:
    cone: Cone = field(compare=False)
    key: tuple = field(default=(), repr=False)

    @staticmethod
    def of(c: Cone) -> "Bubble":
        return Bubble(c, c.sort_key())


def bubbles(cb: CobordismFan) -> tuple[Bubble, ...]:
    """Maximal cones whose span contains a, in canonical order."""
    return tuple(sorted(Bubble.of(c) for c in cb.fan.cones if c.span_contains(cb.act.a)))


def precedes(b1: Bubble, b2: Bubble, cb: CobordismFan) -> bool:
    """The a-flow passes from ``b1`` into ``b2`` through a shared face.

    True when some x in both cones has ``x - eps a`` in b1 and
    ``x + eps a`` in b2. Only faces not fixed by the action can carry
    such a point, which makes the relation irreflexive.
    """
    a = cb.act.a
    shared = b1.cone.intersection(b2.cone)
    for face in shared.faces:
        if is_fixed_face(face, cb.act):
            continue
        if not (face.is_face_of(b1.cone) and face.is_face_of(b2.cone)):
            continue
        if flows_into(b2.cone, face, a) and flows_into(b1.cone, face, neg(a)):
            return True
    return False


def precedence_graph(cb: CobordismFan) -> dict[Bubble, set[Bubble]]:
    """Map each bubble to the set of bubbles directly below it."""
    bs = bubbles(cb)
    below: dict[Bubble, set[Bubble]] = {b: set() for b in bs}
    for b1 in bs:
        for b2 in bs:
            if b1 != b2 and precedes(b1, b2, cb):
                below[b2].add(b1)
    return below


@dataclass(frozen=True)
class Collapsibility:
    ok: bool
    levels: dict[Bubble, int]
    cycle: tuple[Bubble, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def is_collapsible(cb: CobordismFan) -> Collapsibility:
    """Acyclicity of the precedence relation with a level function.

    The level of a bubble is the length of the longest chain of bubbles
    below it, so ``b1 ≺ b2`` implies ``level(b1) < level(b2)``.
    """
    below = precedence_graph(cb)
    ts = TopologicalSorter(below)
    try:
        order = list(ts.static_order())
    except CycleError as exc:
        cyc = tuple(exc.args[1])
        return Collapsibility(False, {}, cyc)
    levels: dict[Bubble, int] = {}
    for b in order:
        levels[b] = 1 + max((levels[p] for p in below[b]), default=-1)
    return Collapsibility(True, dict(sorted(levels.items())))


def _hinted_levels(cb: CobordismFan) -> dict[Bubble, int] | None:
    """Levels from construction hints, if they respect the precedence relation."""
    if not cb.hints:
        return None
    hint = dict(cb.hints)
    below = precedence_graph(cb)
    if any(b.cone not in hint for b in below):
        return None
    for b2, lows in below.items():
        if any(hint[b1.cone] >= hint[b2.cone] for b1 in lows):
            return None
    return {b: hint[b.cone] for b in below}


def quasielementary_decomposition(cb: CobordismFan, use_hints: bool = True) -> list[tuple[int, tuple[Bubble, ...]]]:
    """Bubbles grouped by level, lowest level first.

    Levels come from the longest-chain function unless the cobordism
    carries construction hints (the index of the center that created each
    bubble) that increase along the precedence relation.
    """
    verdict = is_collapsible(cb)
    if not verdict:
        raise CobordismError("not collapsible: precedence cycle " + " -> ".join(map(str, (b.cone for b in verdict.cycle))))
    levels = (_hinted_levels(cb) if use_hints else None) or verdict.levels
    groups: dict[int, list[Bubble]] = {}
    for b, lv in levels.items():
        groups.setdefault(lv, []).append(b)
    return [(lv, tuple(sorted(groups[lv]))) for lv in sorted(groups)]


# ---------------------------------------------------------------------------
# collapse


@dataclass(frozen=True)
class CollapseStep:
    level: int
    bubbles: tuple[Cone, ...]
    removed: tuple[Cone, ...]
    added: tuple[Cone, ...]
    torifications: tuple[TorificationResult, ...] = ()


@dataclass(frozen=True)
class FactorizationTrace:
    stages: tuple[Fan, ...]
    quotients: tuple[Fan, ...]
    steps: tuple[CollapseStep, ...]


def _check_stage(theta: Fan, act: OneParamAction, reference: Fan | None) -> Fan:
    bad = theta.problems()
    if bad:
        raise CobordismError("stage is not a fan: " + bad[0])
    try:
        w = project_fan(theta, act)
    except GeometricQuotientError as exc:
        raise CobordismError(f"stage does not project: {exc}") from exc
    if reference is not None and not same_support(w, reference):
        raise CobordismError("projected support changed during the collapse")
    return w


def collapse(cb: CobordismFan, torify_groups: bool = False, use_hints: bool = True) -> FactorizationTrace:
    """Collapse bubbles level by level from the lower boundary to the upper.

    The lower boundary sits on top of the fan in the a-direction, so the
    highest level is collapsed first. All bubbles of one level go in a
    single step; they are pairwise unstacked, which is checked.
    """
    act = cb.act
    groups = quasielementary_decomposition(cb, use_hints)
    theta = boundary(cb.fan, act, "lower").fan
    stages = [theta]
    quotients = [_check_stage(theta, act, None)]
    steps = []
    for level, group in reversed(groups):
        cones = [b.cone for b in group]
        qe = is_quasielementary_fan(Fan.from_cones(cones, cb.fan.rank), act)
        if not qe:
            raise CobordismError(f"level {level} is not quasi-elementary")
        removed, added = [], []
        current = set(theta.cones)
        for c in cones:
            lo = boundary(c, act, "lower").fan.cones
            hi = boundary(c, act, "upper").fan.cones
            missing = [t for t in lo if t not in current]
            if missing:
                raise CobordismError(f"lower boundary cone {missing[0]} of {c} is not in the current stage")
            removed.extend(lo)
            added.extend(hi)
        keep = [t for t in theta.cones if t not in set(removed)]
        theta = Fan.from_cones(keep + added, cb.fan.rank)
        quotients.append(_check_stage(theta, act, quotients[0]))
        stages.append(theta)
        tors = ()
        if torify_groups:
            tors = tuple(torify(c, act) for c in cones if is_smooth(c))
        steps.append(CollapseStep(level, tuple(cones), tuple(sorted(set(removed), key=Cone.sort_key)),
                                  tuple(sorted(set(added), key=Cone.sort_key)), tors))
    upper = boundary(cb.fan, act, "upper").fan
    if theta != upper:
        raise CobordismError("collapse did not end at the upper boundary")
    return FactorizationTrace(tuple(stages), tuple(quotients), tuple(steps))


# ---------------------------------------------------------------------------
# construction and validation


def _lift(v: Sequence[int], h: int) -> Vec:
    return tuple(v) + (h,)


def standard_cobordism(sigma: Fan, centers: Iterable[Sequence[int]]) -> CobordismFan:
    """The cobordism of a sequence of star subdivisions of ``sigma``.

    Start from ``sigma × P^1`` in ``N ⊕ Z`` with ``a = e_{n+1}``. A center
    ``rho = sum c_i w_i`` in the smallest cone spanned by rays ``w_i`` of
    the running fan is lifted to ``e_{n+1} + sum c_i w_i^``, where ``w_i^``
    are the lifts chosen so far, and the product fan is star-subdivided
    there. Finally every cone through ``±e_{n+1}`` is dropped. The lower
    quotient is then the fully subdivided fan and the upper one is sigma.
    """
    n = sigma.rank
    top = tuple(int(i == n) for i in range(n + 1))
    product = []
    for c in sigma.cones:
        lifted = [_lift(r, 0) for r in c.rays]
        product.append(Cone.from_rays(lifted + [top], n + 1))
        product.append(Cone.from_rays(lifted + [neg(top)], n + 1))
    fan = Fan.from_cones(product, n + 1)
    lift = {r: _lift(r, 0) for r in sigma.rays}
    base = sigma
    stages = [base]
    hints: dict[Cone, int] = {}
    for k, rho in enumerate(centers):
        rho = as_vec(rho)
        if len(rho) != n:
            raise CobordismError(f"center {list(rho)} has the wrong rank")
        gamma = base.smallest_cone_containing(rho)
        if gamma is None:
            raise CobordismError(f"center {list(rho)} is outside the fan")
        if rho in base.rays:
            raise CobordismError(f"center {list(rho)} is already a ray")
        if not gamma.is_simplicial:
            raise CobordismError(f"center {list(rho)} lies in the non-simplicial cone {gamma}")
        coeffs = solve_rational([list(col) for col in zip(*gamma.rays)], rho)
        if coeffs is None or any(c.denominator != 1 for c in coeffs):
            raise CobordismError(f"center {list(rho)} is not an integral combination of {gamma}")
        hat = list(top)
        for c, w in zip(coeffs, gamma.rays):
            hat = [x + int(c) * y for x, y in zip(hat, lift[w])]
        hat = tuple(hat)
        fan = star_subdivision(fan, hat)
        for c in fan.cones:
            if hat in c.rays and top not in c.rays:
                hints[c] = k
        base = star_subdivision(base, rho)
        lift[rho] = hat
        stages.append(base)
    kept = [c for c in fan.all_cones if top not in c.rays and neg(top) not in c.rays]
    out = CobordismFan(Fan.from_cones(kept, n + 1), OneParamAction(top), "constructed", tuple(stages),
                       tuple(sorted(hints.items(), key=lambda kv: kv[0].sort_key())))
    lower = project_fan(boundary(out.fan, out.act, "lower"), out.act)
    upper = project_fan(boundary(out.fan, out.act, "upper"), out.act)
    if lower != base or upper != sigma:
        raise CobordismError("standard cobordism does not have the expected quotients")
    return out


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    witness: str = ""
    required: bool = True


@dataclass(frozen=True)
class CobordismReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks if c.required)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {"name": c.name, "ok": c.ok, "required": c.required, "witness": c.witness} for c in self.checks
            ],
        }


def validate_cobordism(cb: CobordismFan) -> CobordismReport:
    """Fan axioms, convex support, nonempty boundaries and injective projection.

    Constructed cobordisms have non-convex support by design (cones through
    ``±e_{n+1}`` are removed), so convexity is only required of user input.
    """
    fan, act = cb.fan, cb.act
    checks = []
    bad = fan.problems()
    checks.append(Check("fan axioms", not bad, bad[0] if bad else ""))
    if bad:
        return CobordismReport(tuple(checks))
    hull = fan.convex_support()
    checks.append(Check("convex support", hull is not None, "" if hull else "support is not convex",
                        required=cb.provenance == "user"))
    for side in ("lower", "upper"):
        bf = boundary(fan, act, side).fan
        witness = ""
        if bf.is_empty:
            h = fan.support_hull()
            pairs = [f"<{list(u)},a>={dot(u, act.a)}" for u in h.facets]
            witness = f"every facet normal pairs {'>= 0' if side == 'lower' else '<= 0'} with a: " + ", ".join(pairs)
            if h.lines or h.equations:
                witness += f" (support has lines {[list(l) for l in h.lines]})"
        checks.append(Check(f"{side} boundary nonempty", not bf.is_empty, witness))
        failures = []
        for c in bf.all_cones:
            try:
                project_cone(c, act)
            except GeometricQuotientError:
                failures.append(c)
        checks.append(Check(f"{side} projection injective", not failures, str(failures[0]) if failures else ""))
    if not bubbles(cb):
        checks.append(Check("nontrivial", False, "trivial cobordism: no bubbles", required=False))
    return CobordismReport(tuple(checks))
