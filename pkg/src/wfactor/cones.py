"""Rational polyhedral cones and fans with exact arithmetic.

Cones carry both descriptions: primitive generators (``rays``, plus a
lineality basis ``lines`` for cones that are not strictly convex) and
inner facet normals plus the equations cutting out their span. Conversion
between the two is an integer double description method.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .lattice import (
    LatticeError,
    Vec,
    as_vec,
    dot,
    hilbert_basis,
    hnf_basis,
    integer_kernel,
    neg,
    primitive,
    rank,
    rational_inverse,
    snf_diagonal,
    solve_rational,
    transpose,
)


class ConeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# double description


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a * b // gcd(a, b)


def _integral(row: Sequence[Fraction]) -> Vec:
    den = 1
    for x in row:
        den = _lcm(den, Fraction(x).denominator)
    return tuple(int(Fraction(x) * den) for x in row)


def _dd_core(constraints: list[Vec], r: int) -> list[Vec]:
    """Extreme rays of ``{z in Q^r : c.z >= 0}``; first r constraints are e_k."""
    rays: list[tuple[Vec, int]] = []
    for k in range(r):
        z = tuple(int(i == k) for i in range(r))
        mask = 0
        for i in range(r):
            if i != k:
                mask |= 1 << i
        rays.append((z, mask))
    for j in range(r, len(constraints)):
        h = constraints[j]
        pos, negs, zero = [], [], []
        for z, mask in rays:
            v = dot(h, z)
            if v > 0:
                pos.append((z, mask, v))
            elif v < 0:
                negs.append((z, mask, v))
            else:
                zero.append((z, mask | (1 << j)))
        if not negs:
            rays = [(z, m) for z, m, _ in pos] + zero
            continue
        masks = [m for _, m in rays]
        new = []
        for zp, mp, vp in pos:
            for zn, mn, vn in negs:
                common = mp & mn
                if bin(common).count("1") < r - 2:
                    continue
                adjacent = True
                for m in masks:
                    if m != mp and m != mn and (m & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                w = tuple(vp * a - vn * b for a, b in zip(zn, zp))
                w = primitive(w)
                new.append((w, common | (1 << j)))
        rays = [(z, m) for z, m, _ in pos] + zero + new
    return [z for z, _ in rays]


def double_description(
    ineqs: Iterable[Sequence[int]], eqs: Iterable[Sequence[int]], n: int
) -> tuple[tuple[Vec, ...], tuple[Vec, ...]]:
    """Generators of ``{x in Q^n : A x >= 0, E x = 0}``.

    Returns ``(rays, lines)``: primitive extreme rays of the pointed part
    (chosen orthogonal to the lineality space within the equation
    subspace) and an HNF lattice basis of the lineality space.
    """
    eqs = [as_vec(e) for e in eqs if any(e)]
    K = integer_kernel(eqs, n) if eqs else tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    d = len(K)
    if d == 0:
        return (), ()
    A = []
    for a in ineqs:
        row = tuple(dot(k, a) for k in K)
        if any(row):
            A.append(row)
    lin_y = integer_kernel(A, d) if A else tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    lines = hnf_basis(_to_x(y, K) for y in lin_y) if lin_y else ()
    if not A:
        return (), lines
    basis: list[Vec] = []
    for row in A:
        if rank(basis + [row]) > len(basis):
            basis.append(row)
    r = len(basis)
    Bt = transpose(basis)
    cons = [tuple(int(i == k) for i in range(r)) for k in range(r)]
    for row in A:
        if row in basis:
            continue
        c = solve_rational(Bt, row)
        cons.append(_integral(c))
    zs = _dd_core(cons, r)
    if not zs:
        return (), lines
    # lift z -> y = B^T (B B^T)^{-1} z, orthogonal to the lineality
    G = [[dot(b1, b2) for b2 in basis] for b1 in basis]
    Ginv = rational_inverse(G)
    rays = set()
    for z in zs:
        w = [sum(Ginv[i][k] * z[k] for k in range(r)) for i in range(r)]
        y = [sum(w[i] * basis[i][t] for i in range(r)) for t in range(d)]
        x = [sum(y[t] * K[t][c] for t in range(d)) for c in range(n)]
        rays.add(primitive(_integral(x)))
    return tuple(sorted(rays)), lines


def _to_x(y: Sequence[int], K: Sequence[Vec]) -> Vec:
    n = len(K[0])
    return tuple(sum(y[t] * K[t][c] for t in range(len(K))) for c in range(n))


# ---------------------------------------------------------------------------
# cones


@dataclass(frozen=True)
class Cone:
    """A rational polyhedral cone in ``Z^rank``.

    ``rays`` are primitive and lexicographically sorted; ``facets`` are
    inner normals chosen inside the span of the cone; ``equations`` is an
    HNF basis of the lattice orthogonal to the span.
    """

    rank: int
    rays: tuple[Vec, ...]
    facets: tuple[Vec, ...]
    equations: tuple[Vec, ...]
    lines: tuple[Vec, ...] = ()

    @property
    def dim(self) -> int:
        return self.rank - len(self.equations)

    @property
    def is_strictly_convex(self) -> bool:
        return not self.lines

    @property
    def is_simplicial(self) -> bool:
        return self.is_strictly_convex and len(self.rays) == self.dim

    @property
    def generators(self) -> tuple[Vec, ...]:
        return self.rays + self.lines + tuple(neg(l) for l in self.lines)

    @staticmethod
    def zero(rank: int) -> "Cone":
        return _cone_from_generators(rank, frozenset())

    @staticmethod
    def from_rays(rays: Iterable[Sequence[int]], rank: int | None = None) -> "Cone":
        gens = [as_vec(r) for r in rays]
        if rank is None:
            if not gens:
                raise ConeError("cannot infer rank of an empty generator set")
            rank = len(gens[0])
        if any(len(g) != rank for g in gens):
            raise ConeError("generators of mixed rank")
        return _cone_from_generators(rank, frozenset(primitive(g) for g in gens if any(g)))

    @staticmethod
    def from_inequalities(
        ineqs: Iterable[Sequence[int]], eqs: Iterable[Sequence[int]], rank: int
    ) -> "Cone":
        key = (rank, frozenset(as_vec(a) for a in ineqs if any(a)), frozenset(as_vec(e) for e in eqs if any(e)))
        return _cone_from_h(*key)

    def contains(self, x: Sequence[int]) -> bool:
        return all(dot(e, x) == 0 for e in self.equations) and all(dot(u, x) >= 0 for u in self.facets)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.generators)

    def interior_point(self) -> Vec:
        """A lattice point in the relative interior."""
        pt = [0] * self.rank
        for r in self.rays:
            pt = [a + b for a, b in zip(pt, r)]
        return tuple(pt)

    def in_relative_interior(self, x: Sequence[int]) -> bool:
        return self.contains(x) and all(dot(u, x) > 0 for u in self.facets)

    def span_contains(self, x: Sequence[int]) -> bool:
        return all(dot(e, x) == 0 for e in self.equations)

    def face(self, normal: Sequence[int]) -> "Cone":
        """The face cut out by a supporting functional ``normal``."""
        return Cone.from_rays([r for r in self.rays if dot(normal, r) == 0], self.rank)

    @cached_property
    def facet_faces(self) -> tuple[tuple[Vec, "Cone"], ...]:
        return tuple((u, self.face(u)) for u in self.facets)

    @cached_property
    def faces(self) -> frozenset["Cone"]:
        if not self.is_strictly_convex:
            raise ConeError("face lattice only for strictly convex cones")
        out = {self}
        stack = [self]
        while stack:
            c = stack.pop()
            for _, f in c.facet_faces:
                if f not in out:
                    out.add(f)
                    stack.append(f)
        return frozenset(out)

    def is_face_of(self, other: "Cone") -> bool:
        """True when self is a face of ``other``."""
        if not other.contains_cone(self):
            return False
        tight = [u for u in other.facets if all(dot(u, r) == 0 for r in self.rays)]
        smallest = [r for r in other.rays if all(dot(u, r) == 0 for u in tight)]
        return frozenset(smallest) == frozenset(self.rays) and self.lines == other.lines

    def intersection(self, other: "Cone") -> "Cone":
        if self.rank != other.rank:
            raise ConeError("rank mismatch")
        return Cone.from_inequalities(self.facets + other.facets, self.equations + other.equations, self.rank)

    def dual(self) -> "Cone":
        gens = list(self.facets) + list(self.equations) + [neg(e) for e in self.equations]
        return Cone.from_rays(gens, self.rank)

    def triangulate(self) -> tuple["Cone", ...]:
        """Pulling triangulation using the global lexicographic ray order."""
        return _triangulate(self, None)

    def sort_key(self) -> tuple:
        return (self.rays, self.lines)

    def __repr__(self) -> str:
        body = ", ".join(str(list(r)) for r in self.rays)
        if self.lines:
            body += " | lines " + ", ".join(str(list(l)) for l in self.lines)
        return f"Cone<{body}>"


@lru_cache(maxsize=200_000)
def _cone_from_generators(rank: int, gens: frozenset[Vec]) -> Cone:
    if not gens:
        eqs = tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank))
        return Cone(rank, (), (), eqs, ())
    gl = sorted(gens)
    equations = integer_kernel(gl, rank)
    facets, _ = double_description(gl, equations, rank)
    rays, lines = double_description(facets, equations, rank)
    if lines:
        # keep only generators of the pointed part modulo the lineality
        rays = tuple(sorted(rays))
    return Cone(rank, tuple(sorted(rays)), tuple(sorted(facets)), equations, lines)


@lru_cache(maxsize=200_000)
def _cone_from_h(rank: int, ineqs: frozenset[Vec], eqs: frozenset[Vec]) -> Cone:
    rays, lines = double_description(sorted(ineqs), sorted(eqs), rank)
    gens = set(rays) | set(lines) | {neg(l) for l in lines}
    return _cone_from_generators(rank, frozenset(gens))


def cone_from_rays(rays: Iterable[Sequence[int]]) -> Cone:
    rays = [as_vec(r) for r in rays]
    if not rays:
        raise ConeError("cone_from_rays needs at least one generator")
    if any(not any(r) for r in rays):
        raise ConeError("generators must be nonzero")
    return Cone.from_rays(rays)


def dual_cone(c: Cone) -> Cone:
    return c.dual()


def is_smooth(c: Cone) -> bool:
    if not c.is_strictly_convex:
        raise ConeError("smoothness is defined for strictly convex cones")
    if not c.rays:
        return True
    if len(c.rays) != c.dim:
        return False
    return all(d == 1 for d in snf_diagonal(c.rays))


def multiplicity(c: Cone) -> int:
    """Index of the ray lattice in the saturated lattice of the span."""
    out = 1
    for d in snf_diagonal(c.rays):
        out *= d
    return out


def _triangulate(c: Cone, order: dict | None) -> tuple[Cone, ...]:
    if c.is_simplicial:
        return (c,)
    apex = min(c.rays) if order is None else min(c.rays, key=order.__getitem__)
    out = []
    for u, f in c.facet_faces:
        if dot(u, apex) == 0:
            continue
        for s in _triangulate(f, order):
            out.append(Cone.from_rays(s.rays + (apex,), c.rank))
    return tuple(out)


# ---------------------------------------------------------------------------
# fans


@dataclass(frozen=True)
class Fan:
    """A fan stored by its maximal cones, canonically sorted."""

    rank: int
    cones: tuple[Cone, ...]

    @staticmethod
    def from_cones(cones: Iterable[Cone], rank: int | None = None) -> "Fan":
        cones = list(cones)
        if rank is None:
            if not cones:
                raise ConeError("cannot infer rank of an empty fan")
            rank = cones[0].rank
        for c in cones:
            if c.rank != rank:
                raise ConeError("cones of mixed rank")
            if not c.is_strictly_convex:
                raise ConeError(f"fan members must be strictly convex: {c}")
        uniq = sorted(set(cones), key=lambda c: (-c.dim, c.sort_key()))
        maximal: list[Cone] = []
        for c in uniq:
            if not any(m.contains_cone(c) for m in maximal):
                maximal.append(c)
        return Fan(rank, tuple(sorted(maximal, key=Cone.sort_key)))

    @staticmethod
    def from_rays_and_cones(rank: int, rays: Sequence[Sequence[int]], maximal: Iterable[Iterable[int]]) -> "Fan":
        rays = [as_vec(r) for r in rays]
        return Fan.from_cones([Cone.from_rays([rays[i] for i in idx], rank) for idx in maximal], rank)

    @cached_property
    def rays(self) -> tuple[Vec, ...]:
        return tuple(sorted({r for c in self.cones for r in c.rays}))

    @cached_property
    def all_cones(self) -> frozenset[Cone]:
        out: set[Cone] = set()
        for c in self.cones:
            out |= c.faces
        return frozenset(out)

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cones), default=-1)

    @property
    def is_empty(self) -> bool:
        return not self.cones

    def cones_containing(self, x: Sequence[int]) -> list[Cone]:
        return [c for c in self.cones if c.contains(x)]

    def contains(self, x: Sequence[int]) -> bool:
        return any(c.contains(x) for c in self.cones)

    def smallest_cone_containing(self, x: Sequence[int]) -> Cone | None:
        for c in self.cones:
            if c.contains(x):
                for f in sorted(c.faces, key=lambda f: f.dim):
                    if f.contains(x):
                        return f
        return None

    def index_form(self) -> tuple[tuple[Vec, ...], tuple[tuple[int, ...], ...]]:
        idx = {r: i for i, r in enumerate(self.rays)}
        cones = sorted(tuple(sorted(idx[r] for r in c.rays)) for c in self.cones)
        return self.rays, tuple(cones)

    def problems(self) -> list[str]:
        """Violations of the fan axioms; empty for a valid fan."""
        out = []
        cs = self.cones
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                t = cs[i].intersection(cs[j])
                if not (t.is_face_of(cs[i]) and t.is_face_of(cs[j])):
                    out.append(f"{cs[i]} and {cs[j]} meet in {t}, not a common face")
        return out

    def is_valid(self) -> bool:
        return not self.problems()

    def is_smooth(self) -> bool:
        return all(is_smooth(c) for c in self.cones)

    def is_simplicial(self) -> bool:
        return all(c.is_simplicial for c in self.cones)

    def support_hull(self) -> Cone:
        gens = self.rays
        return Cone.from_rays(gens, self.rank) if gens else Cone.zero(self.rank)

    def convex_support(self) -> Cone | None:
        """The support as a cone when it is convex, else None."""
        hull = self.support_hull()
        return hull if covers(self, hull) else None

    def __repr__(self) -> str:
        return "Fan[" + "; ".join(repr(c) for c in self.cones) + "]"


def covers(fan: Fan, cone: Cone) -> bool:
    """Exact test of ``cone ⊆ |fan|``.

    The pieces ``cone ∩ tau`` of full relative dimension form a fan; they
    cover ``cone`` iff every wall of that fan off the boundary of ``cone`` is
    shared by exactly two pieces.
    """
    d = cone.dim
    if d == 0:
        return True
    pieces = {cone.intersection(t) for t in fan.cones if not _separated(cone, t)}
    pieces = [p for p in pieces if p.dim == d]
    if not pieces:
        return False
    count: dict[Cone, int] = {}
    for p in pieces:
        for _, f in p.facet_faces:
            count[f] = count.get(f, 0) + 1
    for f, k in count.items():
        on_boundary = any(all(dot(u, r) == 0 for r in f.rays) for u in cone.facets)
        if not on_boundary and k != 2:
            return False
    return True


def support_contains(fan: Fan, other: Fan) -> bool:
    return all(covers(fan, c) for c in other.cones)


def same_support(f1: Fan, f2: Fan) -> bool:
    return support_contains(f1, f2) and support_contains(f2, f1)


def is_subdivision(fine: Fan, coarse: Fan) -> bool:
    """Every cone of ``fine`` lies in a cone of ``coarse`` and supports agree."""
    return all(any(c.contains_cone(f) for c in coarse.cones) for f in fine.cones) and same_support(fine, coarse)


# ---------------------------------------------------------------------------
# subdivisions


def star_subdivision(fan: Fan, rho: Sequence[int]) -> Fan:
    rho = primitive(rho)
    if not fan.contains(rho):
        raise ConeError(f"{list(rho)} is not in the support of the fan")
    if rho in fan.rays:
        return fan
    out = []
    for c in fan.cones:
        if not c.contains(rho):
            out.append(c)
            continue
        for u, f in c.facet_faces:
            if dot(u, rho) > 0:
                out.append(Cone.from_rays(f.rays + (rho,), fan.rank))
    return Fan.from_cones(out, fan.rank)


def barycentric_star_subdivision(fan: Fan) -> Fan:
    order = sorted(
        (c for c in fan.all_cones if c.dim >= 2),
        key=lambda c: (-c.dim, c.sort_key()),
    )
    out = fan
    for c in order:
        out = star_subdivision(out, primitive(c.interior_point()))
    return out


def common_refinement(f1: Fan, f2: Fan) -> Fan:
    if f1.rank != f2.rank:
        raise ConeError("rank mismatch")
    if not same_support(f1, f2):
        raise ConeError("common refinement needs fans with equal support")
    pieces = []
    for c1 in f1.cones:
        for c2 in f2.cones:
            if _separated(c1, c2):
                continue
            pieces.append(c1.intersection(c2))
    return Fan.from_cones(pieces, f1.rank)


def _separated(c1: Cone, c2: Cone) -> bool:
    """Cheap certificate that two full-dimensional cones meet in lower dimension.

    A facet normal of one cone that vanishes on the lines of the other, is
    nonpositive on its rays and negative on one of them puts the
    intersection inside a hyperplane.
    """
    if c1.dim != c1.rank or c2.dim != c2.rank:
        return False
    for a, b in ((c1, c2), (c2, c1)):
        for u in a.facets:
            if any(dot(u, l) for l in b.lines):
                continue
            vals = [dot(u, r) for r in b.rays]
            if all(v <= 0 for v in vals) and any(v < 0 for v in vals):
                return True
    return False


def simplicialize(fan: Fan) -> Fan:
    """Pulling triangulation of every cone with one global ray order.

    Using the same order everywhere makes the pieces agree on shared faces.
    """
    order = {r: i for i, r in enumerate(fan.rays)}
    out = []
    for c in fan.cones:
        out.extend(_triangulate(c, order))
    return Fan.from_cones(out, fan.rank)


def resolve_fan(fan: Fan) -> Fan:
    """Deterministic smooth subdivision with the same support.

    Cones are first made simplicial without new rays; then the smallest
    non-smooth cone (in canonical order) is star-subdivided at its Hilbert
    basis element of least coordinate sum, until every cone is smooth.
    """
    out = simplicialize(fan)
    while True:
        bad = [c for c in out.cones if not is_smooth(c)]
        if not bad:
            return out
        c = min(bad, key=Cone.sort_key)
        hb = [v for v in hilbert_basis(c) if v not in c.rays]
        rho = min(hb, key=lambda v: (sum(v), v))
        out = star_subdivision(out, rho)


# ---------------------------------------------------------------------------
# piecewise linear functions


def linearity_domains(cone: Cone, functionals: Iterable[Sequence[int]]) -> list[tuple[Cone, Vec]]:
    """Closed domains of ``cone`` on which ``min_m <v, m>`` is attained by one m.

    Only domains of full dimension in ``cone`` are returned, one per
    distinct domain (first functional in sorted order wins ties).
    """
    ms = sorted({as_vec(m) for m in functionals})
    if not ms:
        raise ConeError("need at least one functional")
    out = []
    seen = set()
    for m in ms:
        diffs = [tuple(a - b for a, b in zip(m2, m)) for m2 in ms if m2 != m]
        dom = Cone.from_inequalities(list(cone.facets) + diffs, cone.equations, cone.rank)
        if dom.dim == cone.dim and dom not in seen:
            seen.add(dom)
            out.append((dom, m))
    return out


@dataclass(frozen=True)
class PLFunction:
    """A function linear on each maximal cone of ``fan``."""

    fan: Fan
    values: tuple[Vec, ...]

    def functional_on(self, c: Cone) -> Vec:
        return self.values[self.fan.cones.index(c)]

    def __call__(self, v: Sequence[int]) -> int:
        for c, m in zip(self.fan.cones, self.values):
            if c.contains(v):
                return dot(v, m)
        raise ConeError(f"{list(v)} is outside the domain")


def pl_function_of_ideal(cone: Cone, ideal) -> PLFunction:
    """``v -> min over generators m of <v, m>`` on its linearity fan."""
    if getattr(ideal, "sigma", cone) != cone:
        raise ConeError("ideal lives on a different cone")
    doms = linearity_domains(cone, ideal.generators)
    fan = Fan.from_cones([d for d, _ in doms], cone.rank)
    lookup = {d: m for d, m in doms}
    return PLFunction(fan, tuple(lookup[c] for c in fan.cones))


@dataclass(frozen=True)
class ConvexityVerdict:
    strict: bool
    reason: str

    def __bool__(self) -> bool:
        return self.strict


def is_strictly_convex_on(psi: PLFunction, coarser: Fan) -> ConvexityVerdict:
    """Relative strict convexity (in the min sense) of ``psi`` over ``coarser``.

    On every cone of ``coarser`` the linearity domains inside it must carry
    pairwise distinct functionals, and each functional must be strictly
    smaller than the others on the interior of its own domain.
    """
    if psi.fan.rank != coarser.rank:
        raise ConeError("rank mismatch")
    multi = False
    for big in coarser.cones:
        doms = [(c, m) for c, m in zip(psi.fan.cones, psi.values) if big.contains_cone(c)]
        if not doms:
            raise ConeError(f"{big} contains no linearity domain; fans do not match")
        if len(doms) == 1:
            continue
        multi = True
        for c, m in doms:
            for c2, m2 in doms:
                if c2 is c:
                    continue
                diff = [a - b for a, b in zip(m2, m)]
                vals = [dot(diff, r) for r in c.rays]
                if any(v < 0 for v in vals):
                    return ConvexityVerdict(False, f"not a min-function: {c} prefers {list(m2)}")
                if not any(vals):
                    return ConvexityVerdict(False, f"functional {list(m)} repeats on {c} and {c2}")
    if not multi:
        return ConvexityVerdict(False, "principal")
    return ConvexityVerdict(True, "strictly convex")
