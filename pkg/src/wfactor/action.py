"""One-parameter subgroup actions on toric data.

A lattice point ``a`` of N acts on monomials by ``t.z^m = t^<a,m> z^m``.
Everything here is phrased through cones: boundaries are read off facet
signs, quotients go through the canonical projection ``N -> N / Z a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Sequence

from .cones import Cone, ConeError, Fan
from .lattice import (
    LatticeError,
    Matrix,
    Vec,
    as_vec,
    complete_basis,
    dot,
    hilbert_basis,
    in_span,
    integer_kernel,
    inverse_unimodular,
    matvec,
    neg,
    primitive,
    solve_integer,
    vec_gcd,
    vecmat,
)

Side = Literal["lower", "upper"]


class GeometricQuotientError(ValueError):
    """The projection is not injective on some cone."""


@dataclass(frozen=True)
class OneParamAction:
    a: Vec

    def __post_init__(self):
        object.__setattr__(self, "a", as_vec(self.a))
        if not any(self.a):
            raise LatticeError("one-parameter subgroup must be nonzero")

    @property
    def rank(self) -> int:
        return len(self.a)

    @cached_property
    def pi(self) -> Matrix:
        from .lattice import quotient_projection

        return quotient_projection(primitive(self.a))

    def project(self, v: Sequence[int]) -> Vec:
        return matvec(self.pi, v)


def character(m: Sequence[int], act: OneParamAction) -> int:
    return dot(act.a, m)


# ---------------------------------------------------------------------------
# flow geometry


def flows_into(sigma: Cone, face: Cone, direction: Sequence[int]) -> bool:
    """True if ``x + eps * direction`` stays in ``sigma`` for x in relint ``face``.

    Equivalent to ``direction in sigma + span(face)``: every facet of sigma
    containing ``face`` must pair nonnegatively with the direction.
    """
    if not sigma.span_contains(direction):
        return False
    for u in sigma.facets:
        if all(dot(u, r) == 0 for r in face.rays) and dot(u, direction) < 0:
            return False
    return True


def is_fixed_face(face: Cone, act: OneParamAction) -> bool:
    """The orbit of ``face`` is pointwise fixed iff ``a`` lies in its span."""
    return face.span_contains(act.a)


@dataclass(frozen=True)
class BoundaryFan:
    side: Side
    fan: Fan
    parent: Fan


def _as_fan(x: Cone | Fan) -> Fan:
    if isinstance(x, Cone):
        return Fan.from_cones([x], x.rank)
    return x


def in_boundary(fan: Fan, face: Cone, act: OneParamAction, side: Side) -> bool:
    direction = act.a if side == "lower" else neg(act.a)
    return not any(flows_into(c, face, direction) for c in fan.cones if c.contains_cone(face))


def boundary(x: Cone | Fan, act: OneParamAction, side: Side) -> BoundaryFan:
    """Lower (``x + eps a`` leaves) or upper (``x - eps a`` leaves) boundary.

    A cone of the fan belongs to the boundary when its relative interior
    does; that is decided from the facets of the maximal cones around it.
    """
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', not {side!r}")
    fan = _as_fan(x)
    if fan.rank != act.rank:
        raise LatticeError("rank mismatch between fan and action")
    members = [t for t in fan.all_cones if in_boundary(fan, t, act, side)]
    out = Fan.from_cones(members, fan.rank)
    for t in out.all_cones:
        if not in_boundary(fan, t, act, side):
            raise ConeError(f"boundary is not closed under faces at {t}")
    return BoundaryFan(side, out, fan)


def project_cone(c: Cone, act: OneParamAction) -> Cone:
    if c.rays and in_span(c.rays, act.a):
        raise GeometricQuotientError(f"projection is not injective on {c}")
    return Cone.from_rays([act.project(r) for r in c.rays], act.rank - 1)


def project_fan(x: BoundaryFan | Fan, act: OneParamAction) -> Fan:
    fan = x.fan if isinstance(x, BoundaryFan) else x
    images = [project_cone(c, act) for c in fan.cones]
    out = Fan.from_cones(images, act.rank - 1)
    if len(out.cones) != len(set(images)):
        raise GeometricQuotientError("projected cones overlap")
    bad = out.problems()
    if bad:
        raise GeometricQuotientError("projected cones do not form a fan: " + bad[0])
    return out


def quotient_semigroup(c: Cone, act: OneParamAction) -> frozenset[Vec]:
    """Generators of the invariant monomials ``M ∩ c^dual ∩ a^perp``.

    When that cone has units (a lineality space) the generating set is a
    Hilbert basis of the pointed quotient lifted back, plus plus/minus a
    basis of the units.
    """
    if not c.is_strictly_convex:
        raise ConeError("quotient_semigroup needs a strictly convex cone")
    a = act.a
    d = Cone.from_rays(list(c.rays) + [a, neg(a)], c.rank).dual()
    if d.is_strictly_convex:
        return hilbert_basis(d)
    P = integer_kernel(d.lines)
    img = Cone.from_rays([matvec(P, r) for r in d.rays], len(P)) if d.rays else Cone.zero(len(P))
    out = set()
    for y in hilbert_basis(img):
        out.add(solve_integer(P, y))
    for l in d.lines:
        out.add(l)
        out.add(neg(l))
    return frozenset(out)


# ---------------------------------------------------------------------------
# smooth cones in adapted coordinates


def adapted_basis(sigma: Cone, order: Sequence[Sequence[int]] | None = None) -> Matrix:
    """A Z-basis v_1..v_n of N whose first l vectors are the rays of sigma.

    The rays are taken in ``order`` if given, else in descending
    lexicographic order (so the standard orthant keeps e_1, e_2, ...).
    """
    if order is None:
        rays = sorted(sigma.rays, reverse=True)
    else:
        rays = [as_vec(r) for r in order]
        if sorted(rays) != sorted(sigma.rays):
            raise ConeError("basis order must list exactly the rays of sigma")
    if not rays:
        return tuple(tuple(int(i == j) for j in range(sigma.rank)) for i in range(sigma.rank))
    return complete_basis(rays, sigma.rank)


def characters_in_basis(basis: Matrix, act: OneParamAction) -> Vec:
    """The weights alpha_j = <a, v_j*> of the coordinate functions."""
    return vecmat(act.a, inverse_unimodular(basis))


def stabilizer_order(sigma: Cone, tau: Cone, act: OneParamAction, basis: Matrix | None = None) -> int:
    """Order b of the generic stabilizer on the orbit of ``tau``.

    b is the nonnegative generator of the subgroup spanned by the nonzero
    weights of coordinates not vanishing on that orbit; 0 means all of K*.
    """
    from .cones import is_smooth

    if not is_smooth(sigma):
        raise ConeError("stabilizer_order needs a smooth cone")
    if not tau.is_face_of(sigma):
        raise ConeError(f"{tau} is not a face of {sigma}")
    basis = basis or adapted_basis(sigma)
    alphas = characters_in_basis(basis, act)
    weights = [al for v, al in zip(basis, alphas) if al != 0 and v not in tau.rays]
    return vec_gcd(weights)


@dataclass(frozen=True)
class StackedPair:
    """Two maximal cones with the a-flow passing from ``lower`` into ``upper``."""

    lower: Cone
    upper: Cone
    face: Cone
    point: Vec


def stacked_pairs(fan: Fan, act: OneParamAction, first_only: bool = False) -> list[StackedPair]:
    """All (lower, upper) pairs of maximal cones stacked along the flow.

    For a non-fixed cone gamma of the fan, a point in its relative interior
    moves into ``upper`` under ``+eps a`` and into ``lower`` under
    ``-eps a``. Faces with ``a`` in their span are fixed and skipped.
    """
    out = []
    for face in sorted(fan.all_cones, key=lambda c: (c.dim, c.sort_key())):
        if is_fixed_face(face, act):
            continue
        around = [c for c in fan.cones if c.contains_cone(face)]
        ups = [c for c in around if flows_into(c, face, act.a)]
        if not ups:
            continue
        downs = [c for c in around if flows_into(c, face, neg(act.a))]
        for lo in downs:
            for hi in ups:
                out.append(StackedPair(lo, hi, face, face.interior_point()))
                if first_only:
                    return out
    return out
