import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from wfactor.cones import (
    Cone,
    ConeError,
    Fan,
    barycentric_star_subdivision,
    common_refinement,
    cone_from_rays,
    covers,
    is_smooth,
    is_strictly_convex_on,
    is_subdivision,
    pl_function_of_ideal,
    resolve_fan,
    same_support,
    star_subdivision,
)
from wfactor.lattice import dot, primitive
from wfactor.props import caratheodory_member

E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def fan(*cones):
    return Fan.from_cones([Cone.from_rays(c) for c in cones])


def rays_of(f):
    return sorted(sorted(c.rays) for c in f.cones)


def vectors(n, lo=-5, hi=5):
    return st.tuples(*[st.integers(lo, hi)] * n)


@st.composite
def cones(draw, max_rank=4):
    n = draw(st.integers(1, max_rank))
    gens = draw(st.lists(vectors(n), min_size=1, max_size=n + 2))
    assume(any(any(g) for g in gens))
    return gens


@st.composite
def pointed_full_cones(draw, ranks=(2, 3)):
    n = draw(st.sampled_from(ranks))
    gens = draw(st.lists(vectors(n, -3, 3), min_size=n, max_size=n + 2))
    c = Cone.from_rays([g for g in gens if any(g)] or [(1,) * n], n)
    assume(c.is_strictly_convex and c.dim == n)
    return c


# --- construction -----------------------------------------------------------


def test_quadrant_facets():
    c = cone_from_rays([(1, 0), (0, 1)])
    assert set(c.facets) == {(1, 0), (0, 1)}


def test_facets_of_a1_cone():
    c = cone_from_rays([(1, 0), (1, 2)])
    assert set(c.facets) == {(0, 1), (2, -1)}
    # each ray satisfies both inequalities and is tight on exactly one
    for r in c.rays:
        assert sorted(dot(u, r) == 0 for u in c.facets) == [False, True]


def test_redundant_generator_is_dropped():
    assert cone_from_rays([(1, 0), (1, 1), (1, 2)]).rays == ((1, 0), (1, 2))


def test_rays_are_primitive_and_sorted():
    c = cone_from_rays([(0, 4), (6, 0)])
    assert c.rays == ((0, 1), (1, 0))


def test_zero_generator_rejected():
    with pytest.raises(ConeError):
        cone_from_rays([(0, 0), (1, 0)])


def test_lineality_detected():
    c = cone_from_rays([(1, 0), (-1, 0), (0, 1)])
    assert not c.is_strictly_convex
    assert c.lines == ((1, 0),)


@given(cones())
def test_membership_agrees_with_caratheodory(gens):
    n = len(gens[0])
    c = Cone.from_rays(gens, n)
    for x in [tuple(g) for g in gens] + [tuple(sum(g[i] for g in gens) for i in range(n))]:
        assert c.contains(x)
    probes = [tuple((i * 7 + j * 3) % 11 - 5 for j in range(n)) for i in range(6)]
    for x in probes:
        assert c.contains(x) == caratheodory_member([tuple(g) for g in gens if any(g)], x)


@given(cones())
def test_facets_cut_out_codimension_one_faces(gens):
    c = Cone.from_rays(gens, len(gens[0]))
    for u in c.facets:
        assert all(dot(u, r) >= 0 for r in c.generators)
        if c.is_strictly_convex:
            assert c.face(u).dim == c.dim - 1


# --- duality ----------------------------------------------------------------


def test_dual_of_quadrant():
    assert cone_from_rays([(1, 0), (0, 1)]).dual().rays == ((0, 1), (1, 0))


def test_dual_of_lower_dimensional_orthant_has_lines():
    d = Cone.from_rays([E1, E2], 3).dual()
    assert set(d.rays) == {E1, E2}
    assert d.lines == (E3,)


def test_dual_of_dual_a1_cone():
    c = cone_from_rays([(1, 0), (1, 2)])
    assert c.dual().dual() == c


@given(pointed_full_cones(ranks=(1, 2, 3, 4)))
def test_dual_is_an_involution(c):
    assert set(c.dual().dual().rays) == set(c.rays)


@given(pointed_full_cones())
def test_dual_pairs_nonnegatively(c):
    d = c.dual()
    assert all(dot(u, r) >= 0 for u in d.rays for r in c.rays)


# --- smoothness -------------------------------------------------------------


@pytest.mark.parametrize(
    "rays, smooth",
    [
        ([E1, E2, E3], True),
        ([(1, 0), (1, 2)], False),
        ([(0, 1, 0), (1, 1, 0), (0, 1, 1)], True),
        ([(1, 0, 0), (0, 1, 0), (1, 1, 2)], False),
    ],
)
def test_is_smooth(rays, smooth):
    assert is_smooth(cone_from_rays(rays)) is smooth


# --- fans -------------------------------------------------------------------


def test_fan_keeps_only_maximal_cones():
    f = Fan.from_cones([Cone.from_rays([(1, 0), (0, 1)]), Cone.from_rays([(1, 0)])])
    assert len(f.cones) == 1


def test_fan_with_overlapping_cones_is_reported():
    f = fan([(1, 0), (1, 2)], [(1, 1), (0, 1)])
    bad = f.problems()
    assert len(bad) == 1
    assert "[1, 0], [1, 2]" in bad[0] and "[0, 1], [1, 1]" in bad[0]


def test_non_strictly_convex_members_are_rejected():
    with pytest.raises(ConeError):
        Fan.from_cones([Cone.from_rays([(1, 0), (-1, 0), (0, 1)])])


def test_smallest_cone_containing():
    f = fan([E1, E2, E3])
    assert f.smallest_cone_containing((1, 1, 0)) == Cone.from_rays([E1, E2])
    assert f.smallest_cone_containing((-1, 0, 0)) is None


# --- subdivisions -----------------------------------------------------------


def test_star_subdivision_of_the_plane():
    f = star_subdivision(fan([(1, 0), (0, 1)]), (1, 1))
    assert rays_of(f) == [[(0, 1), (1, 1)], [(1, 0), (1, 1)]]


def test_star_subdivision_of_the_cube_corner():
    f = star_subdivision(fan([E1, E2, E3]), (1, 1, 1))
    assert len(f.cones) == 3
    assert f.is_smooth()
    assert all((1, 1, 1) in c.rays for c in f.cones)


def test_star_subdivision_at_existing_ray_is_identity():
    f = fan([(1, 0), (0, 1)])
    assert star_subdivision(f, (1, 0)) == f


def test_star_subdivision_on_a_face():
    # center in the face <e1, e2> of the octant splits only through that face
    f = star_subdivision(fan([E1, E2, E3]), (1, 1, 0))
    assert rays_of(f) == [[E3, E2, (1, 1, 0)], [E3, E1, (1, 1, 0)]]
    assert same_support(f, fan([E1, E2, E3]))


def test_barycentric_plane():
    f = barycentric_star_subdivision(fan([(1, 0), (0, 1)]))
    assert set(f.rays) == {(1, 0), (0, 1), (1, 1)}
    assert len(f.cones) == 2


def test_barycentric_single_ray_unchanged():
    f = Fan.from_cones([Cone.from_rays([(1, 0)])])
    assert barycentric_star_subdivision(f) == f


def test_barycentric_cube_corner_has_one_cone_per_flag():
    f = barycentric_star_subdivision(fan([E1, E2, E3]))
    assert len(f.cones) == 6
    assert {(1, 1, 1), (1, 1, 0), (1, 0, 1), (0, 1, 1)} <= set(f.rays)


def test_common_refinement_identity():
    f = star_subdivision(fan([(1, 0), (0, 1)]), (1, 1))
    assert common_refinement(f, f) == f


def test_common_refinement_absorbs():
    q = fan([(1, 0), (0, 1)])
    s = star_subdivision(q, (1, 1))
    assert common_refinement(q, s) == s


def test_common_refinement_of_two_splits():
    q = fan([(1, 0), (0, 1)])
    r = common_refinement(star_subdivision(q, (2, 1)), star_subdivision(q, (1, 1)))
    assert rays_of(r) == [[(0, 1), (1, 1)], [(1, 0), (2, 1)], [(1, 1), (2, 1)]]


def test_common_refinement_requires_equal_support():
    with pytest.raises(ConeError):
        common_refinement(fan([(1, 0), (0, 1)]), fan([(1, 0), (1, 1)]))


def test_resolve_smooth_fan_unchanged():
    f = fan([E1, E2, E3])
    assert resolve_fan(f) == f


def test_resolve_a1():
    r = resolve_fan(fan([(1, 0), (1, 2)]))
    assert rays_of(r) == [[(1, 0), (1, 1)], [(1, 1), (1, 2)]]
    assert r.is_smooth()


def test_resolve_a2():
    r = resolve_fan(fan([(1, 0), (1, 3)]))
    assert set(r.rays) == {(1, 0), (1, 1), (1, 2), (1, 3)}
    assert r.is_smooth()


def test_resolve_non_simplicial_cone():
    c = fan([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)])
    r = resolve_fan(c)
    assert r.is_smooth() and is_subdivision(r, c)


@st.composite
def subdivided_cones(draw):
    c = draw(pointed_full_cones())
    w = draw(st.lists(st.integers(0, 2), min_size=len(c.rays), max_size=len(c.rays)))
    assume(any(w))
    rho = primitive([sum(k * r[i] for k, r in zip(w, c.rays)) for i in range(c.rank)])
    return c, rho


@given(subdivided_cones())
def test_star_subdivision_preserves_support(data):
    c, rho = data
    base = Fan.from_cones([c])
    f = star_subdivision(base, rho)
    assert f.is_valid()
    assert is_subdivision(f, base)


@given(subdivided_cones())
def test_resolution_is_smooth_with_same_support(data):
    c, rho = data
    base = star_subdivision(Fan.from_cones([c]), rho)
    r = resolve_fan(base)
    assert r.is_smooth()
    assert is_subdivision(r, base)


def test_covers_detects_a_gap():
    # two cones of the quadrant subdivision, with the middle one missing
    f = fan([(1, 0), (2, 1)], [(1, 2), (0, 1)])
    assert not covers(f, Cone.from_rays([(1, 0), (0, 1)]))
    assert covers(f, Cone.from_rays([(1, 0), (2, 1)]))


# --- piecewise linear functions -------------------------------------------


class _Ideal:
    def __init__(self, sigma, gens):
        self.sigma = sigma
        self.generators = gens


def test_pl_function_of_principal_ideal():
    q = cone_from_rays([(1, 0), (0, 1)])
    psi = pl_function_of_ideal(q, _Ideal(q, [(1, 1)]))
    v = is_strictly_convex_on(psi, Fan.from_cones([q]))
    assert not v and v.reason == "principal"


def test_pl_function_of_maximal_ideal():
    q = cone_from_rays([(1, 0), (0, 1)])
    psi = pl_function_of_ideal(q, _Ideal(q, [(1, 0), (0, 1)]))
    assert psi((3, 5)) == 3
    assert psi.fan == star_subdivision(Fan.from_cones([q]), (1, 1))
    assert is_strictly_convex_on(psi, Fan.from_cones([q]))
