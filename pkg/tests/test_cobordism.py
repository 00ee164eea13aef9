import itertools
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wfactor import io
from wfactor.action import OneParamAction, boundary, project_fan
from wfactor.cobordism import (
    CobordismError,
    CobordismFan,
    bubbles,
    collapse,
    is_collapsible,
    precedence_graph,
    precedes,
    quasielementary_decomposition,
    standard_cobordism,
    validate_cobordism,
)
from wfactor.cones import Cone, Fan, star_subdivision
from wfactor.lattice import primitive
from wfactor.props import random_unimodular

E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
QUADRANT = Fan.from_cones([Cone.from_rays([(1, 0), (0, 1)])])

PINWHEEL = Fan.from_cones(
    [
        Cone.from_rays([(1, 0, 0), (1, 0, 1), (-1, 1, -1), (-1, 1, 0)]),
        Cone.from_rays([(-1, 1, 0), (-1, 1, 1), (-1, -1, -1), (-1, -1, 0)]),
        Cone.from_rays([(-1, -1, 0), (-1, -1, 1), (1, 0, -1), (1, 0, 0)]),
    ]
)


def pinwheel():
    return CobordismFan(PINWHEEL, OneParamAction(E3))


def flow_oracle(b1, b2, a, big=1000):
    """Some shared point x has big*x - a only in b1 and big*x + a only in b2.

    Points of a face whose span contains a move inside that face and lie
    in both cones on either side, so they do not count as crossing.
    """
    shared = b1.intersection(b2)
    rays = shared.rays
    candidates = {
        tuple(map(sum, zip(*subset)))
        for k in range(1, len(rays) + 1)
        for subset in itertools.combinations(rays, k)
    }
    for x in candidates:
        lo = tuple(big * xi - ai for xi, ai in zip(x, a))
        hi = tuple(big * xi + ai for xi, ai in zip(x, a))
        if b1.contains(lo) and not b2.contains(lo) and b2.contains(hi) and not b1.contains(hi):
            return True
    return False


# --- one blow-up --------------------------------------------------------------


def test_one_center_has_the_expected_bubble():
    cb = standard_cobordism(QUADRANT, [(1, 1)])
    (b,) = bubbles(cb)
    assert set(b.cone.rays) == {E1, E2, (1, 1, 1)}
    assert set(b.cone.facets) == {(0, 0, 1), (0, 1, -1), (1, 0, -1)}
    assert cb.provenance == "constructed"


def test_one_center_quotients():
    cb = standard_cobordism(QUADRANT, [(1, 1)])
    lo = project_fan(boundary(cb.fan, cb.act, "lower"), cb.act)
    up = project_fan(boundary(cb.fan, cb.act, "upper"), cb.act)
    assert lo == star_subdivision(QUADRANT, (1, 1))
    assert up == QUADRANT


def test_one_center_collapse_retraces_the_blowup():
    cb = standard_cobordism(QUADRANT, [(1, 1)])
    trace = collapse(cb)
    assert trace.quotients == (star_subdivision(QUADRANT, (1, 1)), QUADRANT)
    assert len(trace.steps) == 1


def test_trivial_cobordism():
    cb = standard_cobordism(QUADRANT, [])
    assert bubbles(cb) == ()
    report = validate_cobordism(cb)
    assert report.ok
    assert any(c.name == "nontrivial" and not c.ok and not c.required for c in report.checks)
    assert collapse(cb).quotients == (QUADRANT,)


def test_two_nested_centers():
    cb = standard_cobordism(QUADRANT, [(1, 1), (2, 1)])
    groups = quasielementary_decomposition(cb)
    assert [lv for lv, _ in groups] == [0, 1]
    first = star_subdivision(QUADRANT, (1, 1))
    assert collapse(cb).quotients == (star_subdivision(first, (2, 1)), first, QUADRANT)


@pytest.mark.parametrize(
    "centers, message",
    [
        ([(1, 0)], "already a ray"),
        ([(-1, 1)], "outside"),
        ([(1, 1, 1)], "wrong rank"),
    ],
)
def test_bad_centers(centers, message):
    with pytest.raises(CobordismError, match=message):
        standard_cobordism(QUADRANT, centers)


def test_constructed_support_is_not_convex_but_valid():
    cb = standard_cobordism(QUADRANT, [(1, 1), (2, 1), (1, 2)])
    report = validate_cobordism(cb)
    convex = [c for c in report.checks if c.name == "convex support"][0]
    assert not convex.ok and not convex.required
    assert report.ok


def test_user_cobordism_requires_convex_support():
    cb = standard_cobordism(QUADRANT, [(1, 1), (2, 1), (1, 2)])
    user = CobordismFan(cb.fan, cb.act, "user")
    assert not validate_cobordism(user).ok


def test_empty_boundary_gets_a_witness():
    cb = CobordismFan(Fan.from_cones([Cone.from_rays([E1, E2, E3])]), OneParamAction(E3), "user")
    report = validate_cobordism(cb)
    lower = [c for c in report.checks if c.name == "lower boundary nonempty"][0]
    assert not lower.ok and "facet normal" in lower.witness


def test_mismatched_lattices_rejected():
    with pytest.raises(CobordismError):
        CobordismFan(QUADRANT, OneParamAction(E3))


# --- precedence and collapsibility ------------------------------------------


def test_stacked_pair_in_the_plane():
    f = Fan.from_cones([Cone.from_rays([(1, 0), (1, 1)]), Cone.from_rays([(1, 1), (0, 1)])])
    cb = CobordismFan(f, OneParamAction((0, 1)))
    lo, hi = sorted(bubbles(cb), key=lambda b: (1, 0) not in b.cone.rays)
    assert precedes(lo, hi, cb) and not precedes(hi, lo, cb)
    assert flow_oracle(lo.cone, hi.cone, (0, 1))


def test_side_by_side_bubbles_form_one_group():
    f = Fan.from_cones([Cone.from_rays([(1, 0), (0, 1)]), Cone.from_rays([(-1, 0), (0, 1)])])
    cb = CobordismFan(f, OneParamAction((0, 1)))
    groups = quasielementary_decomposition(cb)
    assert len(groups) == 1 and len(groups[0][1]) == 2


def test_pinwheel_precedence_is_a_cycle():
    cb = pinwheel()
    bs = bubbles(cb)
    assert len(bs) == 3
    matrix = [[precedes(x, y, cb) for y in bs] for x in bs]
    assert matrix == [[False, True, False], [False, False, True], [True, False, False]]
    for x, y in itertools.product(bs, repeat=2):
        if x != y:
            assert precedes(x, y, cb) == flow_oracle(x.cone, y.cone, cb.act.a)


def test_pinwheel_is_not_collapsible():
    cb = pinwheel()
    verdict = is_collapsible(cb)
    assert not verdict and len(set(verdict.cycle)) == 3
    with pytest.raises(CobordismError, match="not collapsible"):
        collapse(cb)


@st.composite
def standard_instances(draw):
    rng = random.Random(draw(st.integers(0, 10**6)))
    n = rng.randint(2, 3)
    B = random_unimodular(rng, n, steps=n)
    sigma = Fan.from_cones([Cone.from_rays([tuple(r) for r in B], n)], n)
    base, centers = sigma, []
    for _ in range(draw(st.integers(0, 3))):
        c = rng.choice(base.cones)
        face = rng.choice(sorted((f for f in c.faces if f.dim >= 2), key=Cone.sort_key))
        rho = primitive([sum(r[i] for r in face.rays) for i in range(n)])
        if rho not in base.rays:
            centers.append(rho)
            base = star_subdivision(base, rho)
    return sigma, centers


@given(standard_instances())
def test_precedence_is_irreflexive_and_matches_the_flow(data):
    sigma, centers = data
    cb = standard_cobordism(sigma, centers)
    for x, y in itertools.product(bubbles(cb), repeat=2):
        p = precedes(x, y, cb)
        if x == y:
            assert not p
        else:
            assert p == flow_oracle(x.cone, y.cone, cb.act.a)


@given(standard_instances())
def test_levels_increase_and_collapse_retraces(data):
    sigma, centers = data
    cb = standard_cobordism(sigma, centers)
    verdict = is_collapsible(cb)
    assert verdict
    for b2, lows in precedence_graph(cb).items():
        assert all(verdict.levels[b1] < verdict.levels[b2] for b1 in lows)
    trace = collapse(cb)
    assert trace.quotients == tuple(reversed(cb.stages))
    assert trace.stages[-1] == boundary(cb.fan, cb.act, "upper").fan


@given(standard_instances())
def test_cobordism_json_round_trip(data):
    sigma, centers = data
    cb = standard_cobordism(sigma, centers)
    back = io.cobordism_from_json(json.loads(io.dumps(io.cobordism_to_json(cb))))
    assert back.fan == cb.fan and back.act == cb.act
