"""Torific ideals on a smooth cone and the torified fan they produce.

On the affine chart of a smooth cone sigma we work in the coordinates
``z_j = z^{v_j*}`` attached to an adapted basis ``v_1..v_n`` whose first
``l`` vectors are the rays of sigma. The first ``l`` coordinates are
"bound" (they vanish somewhere on the chart) and the remaining ``n - l``
are units. A monomial is stored by its exponent vector in these
coordinates; the corresponding character of the torus is ``B^{-1} e``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterable, Sequence

from .action import (
    GeometricQuotientError,
    OneParamAction,
    StackedPair,
    adapted_basis,
    boundary,
    characters_in_basis,
    project_fan,
    stacked_pairs,
)
from .cones import (
    Cone,
    ConeError,
    Fan,
    common_refinement,
    is_smooth,
    is_subdivision,
    linearity_domains,
)
from .lattice import (
    Matrix,
    Vec,
    as_vec,
    bezout,
    determinant,
    dot,
    integer_kernel,
    inverse_unimodular,
    matvec,
    snf_diagonal,
)


class TorificError(ValueError):
    """Raised when a torific ideal cannot be produced."""


# ---------------------------------------------------------------------------
# monomial ideals in adapted coordinates


def _minimize(exps: Iterable[Vec], l: int) -> tuple[Vec, ...]:
    """Drop exponents divisible by another one (units are ignored).

    Two monomials with the same bound part differ by a unit and generate
    the same ideal; the lexicographically smaller one is kept.
    """
    by_bound: dict[Vec, Vec] = {}
    for e in exps:
        key = e[:l]
        if key not in by_bound or e < by_bound[key]:
            by_bound[key] = e
    keys = sorted(by_bound, key=lambda k: (sum(k), k))
    kept: list[Vec] = []
    for k in keys:
        if not any(all(x <= y for x, y in zip(kk, k)) for kk in kept):
            kept.append(k)
    return tuple(sorted(by_bound[k] for k in kept))


@dataclass(frozen=True)
class MonomialIdeal:
    """A monomial ideal of ``K[sigma^dual ∩ M]`` given by minimal generators."""

    sigma: Cone
    basis: Matrix
    exponents: tuple[Vec, ...]

    def __post_init__(self):
        l = len(self.sigma.rays)
        exps = [as_vec(e) for e in self.exponents]
        for e in exps:
            if len(e) != self.sigma.rank:
                raise TorificError("exponent vector has wrong length")
            if any(x < 0 for x in e[:l]):
                raise TorificError(f"{list(e)} is not a regular monomial on sigma")
        object.__setattr__(self, "exponents", _minimize(exps, l))

    @property
    def l(self) -> int:
        return len(self.sigma.rays)

    @cached_property
    def _binv(self) -> Matrix:
        return inverse_unimodular(self.basis)

    @property
    def generators(self) -> tuple[Vec, ...]:
        """Generators as characters m in M."""
        return tuple(matvec(self._binv, e) for e in self.exponents)

    @classmethod
    def from_characters(cls, sigma: Cone, basis: Matrix, ms: Iterable[Sequence[int]]) -> "MonomialIdeal":
        return cls(sigma, basis, tuple(matvec(basis, m) for m in ms))

    @classmethod
    def unit(cls, sigma: Cone, basis: Matrix) -> "MonomialIdeal":
        return cls(sigma, basis, ((0,) * sigma.rank,))

    @property
    def is_principal(self) -> bool:
        return len(self.exponents) == 1

    def contains_monomial(self, e: Sequence[int]) -> bool:
        return any(all(x <= y for x, y in zip(g[: self.l], e[: self.l])) for g in self.exponents)

    def __mul__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        return ideal_product([self, other])

    def to_json(self) -> dict:
        return {
            "sigma": [list(r) for r in self.sigma.rays],
            "basis": [list(v) for v in self.basis],
            "exponents": [list(e) for e in self.exponents],
            "generators": [list(m) for m in self.generators],
        }


def ideal_product(ideals: Sequence[MonomialIdeal]) -> MonomialIdeal:
    if not ideals:
        raise TorificError("empty product")
    first = ideals[0]
    for I in ideals[1:]:
        if I.sigma != first.sigma or I.basis != first.basis:
            raise TorificError("ideals live in different charts")

    def mul(A: tuple[Vec, ...], B: tuple[Vec, ...]) -> tuple[Vec, ...]:
        return _minimize((tuple(x + y for x, y in zip(a, b)) for a in A for b in B), first.l)

    exps = reduce(mul, (I.exponents for I in ideals[1:]), first.exponents)
    return MonomialIdeal(first.sigma, first.basis, exps)


def product_expansion(ideals: Sequence[MonomialIdeal]) -> tuple[Vec, ...]:
    """All sums of one generator from each factor, without reduction."""
    sums = {(0,) * ideals[0].sigma.rank} if ideals else set()
    for I in ideals:
        sums = {tuple(x + y for x, y in zip(s, e)) for s in sums for e in I.exponents}
    return tuple(sorted(sums))


# ---------------------------------------------------------------------------
# alpha-torific ideals


def minimal_degree_bound(weights: Sequence[int], alpha: int, modulus: int) -> int:
    """Upper bound on the total degree of a minimal solution.

    Minimal solutions ``e >= 0`` of ``sum e_j w_j = alpha`` (or the same
    congruence mod ``modulus`` when it is positive) have no zero-sum
    sub-multiset. A walk through the summands that adds a positive weight
    while the partial sum is <= 0 and a negative one otherwise stays in a
    window of ``A + B`` values, so it lasts at most ``A + B - 1`` steps;
    the remaining summands all share a sign and number at most ``|alpha|``.
    Modulo g, any g summands contain a zero-sum block mod g.
    """
    if modulus > 0:
        return 0 if alpha % modulus == 0 else modulus - 1
    pos = [w for w in weights if w > 0]
    negs = [-w for w in weights if w < 0]
    A = max(pos, default=0)
    B = max(negs, default=0)
    if A and B:
        return A + B - 1 + abs(alpha)
    return abs(alpha)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for c in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for x in c:
            out.append(x - prev - 1)
            prev = x
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def alpha_torific_generators(
    sigma: Cone,
    act: OneParamAction,
    alpha: int,
    degree_cap: int | None = None,
    basis: Matrix | None = None,
) -> MonomialIdeal:
    """The ideal generated by all regular monomials of weight ``alpha``.

    Generators are enumerated by total degree in the bound coordinates up to
    a proven bound, so the returned set is the complete minimal one.
    ``degree_cap`` limits that bound; exceeding it is an error rather than
    a silent truncation.
    """
    if not is_smooth(sigma):
        raise ConeError("torific ideals need a smooth cone")
    basis = basis or adapted_basis(sigma)
    alphas = characters_in_basis(basis, act)
    l = len(sigma.rays)
    bound_w, free_w = alphas[:l], alphas[l:]
    g, coeffs = bezout(free_w)

    def residue(w: int) -> int:
        return w % g if g else w

    active = [j for j in range(l) if residue(bound_w[j]) != 0]
    ws = [residue(bound_w[j]) for j in active]
    D = minimal_degree_bound(ws, residue(alpha), g)
    if degree_cap is None:
        degree_cap = sigma.rank * (abs(alpha) + sum(abs(w) for w in alphas) + 1)
    if D > degree_cap:
        raise TorificError(f"cap exceeded: degree bound {D} > cap {degree_cap}")

    found: list[Vec] = []
    for d in range(D + 1):
        for comp in _compositions(d, len(active)):
            s = sum(c * w for c, w in zip(comp, ws))
            if (g and (s - alpha) % g) or (not g and s != alpha):
                continue
            if any(all(x <= y for x, y in zip(f, comp)) for f in found):
                continue
            found.append(comp)
    if not found:
        raise TorificError(f"empty ideal: no regular monomial has weight {alpha}")

    exps = []
    for comp in found:
        e = [0] * sigma.rank
        for j, c in zip(active, comp):
            e[j] = c
        rest = alpha - sum(e[j] * bound_w[j] for j in range(l))
        if g:
            q = rest // g
            for i, c in enumerate(coeffs):
                e[l + i] = q * c
        exps.append(tuple(e))
    return MonomialIdeal(sigma, basis, tuple(exps))


def character_set(sigma: Cone, act: OneParamAction, basis: Matrix | None = None) -> tuple[int, ...]:
    """Distinct nonzero weights of the bound coordinates."""
    basis = basis or adapted_basis(sigma)
    alphas = characters_in_basis(basis, act)
    return tuple(sorted({w for w in alphas[: len(sigma.rays)] if w}))


def divisible_character(sigma: Cone, act: OneParamAction, basis: Matrix | None = None) -> int:
    """The least positive character divisible by every nonzero bound weight."""
    ws = [abs(w) for w in character_set(sigma, act, basis)]
    return reduce(math.lcm, ws, 1)


def beta_preset(sigma: Cone, act: OneParamAction, basis: Matrix | None = None) -> tuple[int, ...]:
    """Default characters together with both signs of the divisible character.

    With both ``beta`` and ``-beta`` present the lower and upper quotients
    of the torified fan agree. One sign alone is not enough: for
    ``a = (-3, 4, -2)`` on the orthant, adding only ``12`` leaves the
    quotients different.
    """
    b = divisible_character(sigma, act, basis)
    return tuple(sorted(set(character_set(sigma, act, basis)) | {b, -b}))


# ---------------------------------------------------------------------------
# the blow-up fan


def blowup_fan(sigma: Cone, ideal: MonomialIdeal) -> Fan:
    """Linearity fan of ``v -> min <v, m>`` over the generators of ``ideal``."""
    return Fan.from_cones([d for d, _ in linearity_domains(sigma, ideal.generators)], sigma.rank)


def order_function(ideal: MonomialIdeal, v: Sequence[int]) -> int:
    return min(dot(v, m) for m in ideal.generators)


def dtor_rays(fan: Fan, ideal: MonomialIdeal) -> tuple[Vec, ...]:
    """Rays of the blow-up where the ideal vanishes (the exceptional support)."""
    return tuple(r for r in fan.rays if order_function(ideal, r) > 0)


def is_principal_on(fan: Fan, ideal: MonomialIdeal) -> bool:
    """True when on every cone one generator attains the minimum at all rays."""
    gens = ideal.generators
    for c in fan.cones:
        x = c.interior_point()
        best = min(dot(x, m) for m in gens)
        cands = [m for m in gens if dot(x, m) == best]
        if not any(all(dot(r, m) == order_function(ideal, r) for r in c.rays) for m in cands):
            return False
    return True


# ---------------------------------------------------------------------------
# the heart condition


@dataclass(frozen=True)
class HeartCheck:
    cone: Cone
    j: int
    normal: Vec | None
    ok: bool
    reason: str = ""


def _heart_normal(cone: Cone, v: Vec, act: OneParamAction) -> tuple[Vec | None, str]:
    others = [r for r in cone.rays if r != v]
    K = integer_kernel(others + [act.a], cone.rank)
    vals = [dot(k, v) for k in K]
    g, cs = bezout(vals)
    if g != 1:
        return None, f"hyperplane through the other rays and a meets v with index {g}"
    u = tuple(sum(c * k[i] for c, k in zip(cs, K)) for i in range(cone.rank))
    return u, ""


def check_heart_j(fan: Fan, j: int, S: Iterable[int], act: OneParamAction, basis: Matrix) -> list[HeartCheck]:
    """Check the splitting condition for the coordinate ``j`` on every cone.

    For each maximal cone having ``v_j`` as a ray we look for a primitive
    functional u vanishing on the other rays and on ``a`` with
    ``<u, v_j> = 1``. Indices in ``S`` are exempt.
    """
    if j in set(S):
        return []
    v = basis[j]
    out = []
    for c in fan.cones:
        if v not in c.rays:
            continue
        u, why = _heart_normal(c, v, act)
        out.append(HeartCheck(c, j, u, u is not None, why))
    return out


@dataclass(frozen=True)
class HeartReport:
    ok: bool
    checks: tuple[HeartCheck, ...]
    certificates: tuple[tuple[Cone, tuple[int, ...], int], ...]
    defects: tuple[str, ...] = ()


def check_heart(fan: Fan, S: Iterable[int], act: OneParamAction, basis: Matrix, l: int) -> HeartReport:
    """Check all coordinates outside ``S`` at once on every maximal cone.

    On a cone with exempt-free coordinates J, the normals ``u_j`` found
    coordinate by coordinate must together split off ``⊕ Z v_j``: the
    pairing matrix ``[<u_i, v_j>]`` is the identity and the map
    ``N -> Z^J`` given by the u's is onto (all invariant factors 1).
    """
    S = set(S)
    checks: list[HeartCheck] = []
    certs = []
    defects = []
    for j in range(l):
        checks.extend(check_heart_j(fan, j, S, act, basis))
    for ch in checks:
        if not ch.ok:
            defects.append(f"coordinate {ch.j} on {ch.cone}: {ch.reason}")
    by_cone: dict[Cone, list[HeartCheck]] = {}
    for ch in checks:
        by_cone.setdefault(ch.cone, []).append(ch)
    for c, chs in sorted(by_cone.items(), key=lambda kv: kv[0].sort_key()):
        if not all(ch.ok for ch in chs):
            continue
        us = [ch.normal for ch in chs]
        vs = [basis[ch.j] for ch in chs]
        pairing = [[dot(u, v) for v in vs] for u in us]
        if pairing != [[int(i == k) for k in range(len(vs))] for i in range(len(vs))]:
            defects.append(f"pairing matrix on {c} is not the identity")
            continue
        inv = snf_diagonal(us)
        if any(x != 1 for x in inv):
            defects.append(f"normals on {c} do not span a direct summand")
            continue
        certs.append((c, tuple(ch.j for ch in chs), determinant(pairing)))
    return HeartReport(not defects, tuple(checks), tuple(certs), tuple(defects))


# ---------------------------------------------------------------------------
# quasi-elementary fans


@dataclass(frozen=True)
class QuasiElementaryVerdict:
    ok: bool
    witness: StackedPair | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_quasielementary_fan(fan: Fan, act: OneParamAction) -> QuasiElementaryVerdict:
    """No two maximal cones are stacked along the flow of ``a``."""
    pairs = stacked_pairs(fan, act, first_only=True)
    return QuasiElementaryVerdict(not pairs, pairs[0] if pairs else None)


# ---------------------------------------------------------------------------
# torification of one smooth cone


@dataclass(frozen=True)
class QuotientPair:
    cone: Cone
    lower: Fan
    upper: Fan


@dataclass
class TorificationResult:
    sigma: Cone
    act: OneParamAction
    basis: Matrix
    characters: tuple[int, ...]
    ideals: dict[int, MonomialIdeal]
    product: MonomialIdeal
    expansion: tuple[Vec, ...]
    fan: Fan
    exceptional: tuple[int, ...]
    dtor: tuple[Vec, ...]
    heart: HeartReport
    quasielementary: QuasiElementaryVerdict
    quotient_pairs: tuple[QuotientPair, ...]
    lower_quotient: Fan | None
    upper_quotient: Fan | None
    defects: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.defects

    def to_json(self) -> dict:
        def fan_json(f: Fan | None):
            if f is None:
                return None
            rays, cones = f.index_form()
            return {"rank": f.rank, "rays": [list(r) for r in rays], "maximal_cones": [list(c) for c in cones]}

        return {
            "sigma": [list(r) for r in self.sigma.rays],
            "a": list(self.act.a),
            "basis": [list(v) for v in self.basis],
            "characters": list(self.characters),
            "ideals": {str(k): v.to_json() for k, v in sorted(self.ideals.items())},
            "product": self.product.to_json(),
            "product_expansion": [list(e) for e in self.expansion],
            "fan": fan_json(self.fan),
            "exceptional_coordinates": list(self.exceptional),
            "dtor_rays": [list(r) for r in self.dtor],
            "heart_ok": self.heart.ok,
            "heart_normals": [
                {"cone": [list(r) for r in ch.cone.rays], "j": ch.j, "u": list(ch.normal) if ch.normal else None}
                for ch in self.heart.checks
            ],
            "quasielementary": self.quasielementary.ok,
            "lower_quotient": fan_json(self.lower_quotient),
            "upper_quotient": fan_json(self.upper_quotient),
            "defects": list(self.defects),
        }


def _projected(fan: Fan, act: OneParamAction, side: str) -> Fan:
    return project_fan(boundary(fan, act, side), act)


def torify(
    sigma: Cone,
    act: OneParamAction,
    characters: Iterable[int] | None = None,
    basis: Matrix | None = None,
    degree_cap: int | None = None,
) -> TorificationResult:
    """Blow up the product of the alpha-torific ideals over ``characters``.

    The blow-up fan is the common refinement of the blow-ups of the
    individual ideals. Checks of the heart condition, quasi-elementarity
    and the local quotient pairs are recorded in the result; failures go
    into ``defects`` instead of raising.
    """
    basis = basis or adapted_basis(sigma)
    chars = tuple(sorted(set(characters))) if characters is not None else character_set(sigma, act, basis)
    if 0 in chars:
        raise TorificError("0 is not allowed as a character")
    ideals = {al: alpha_torific_generators(sigma, act, al, degree_cap, basis) for al in chars}
    base = Fan.from_cones([sigma], sigma.rank)
    fan = base
    for al in chars:
        fan = common_refinement(fan, blowup_fan(sigma, ideals[al]))
    product = ideal_product(list(ideals.values())) if ideals else MonomialIdeal.unit(sigma, basis)

    defects = []
    if not is_subdivision(fan, base):
        defects.append("blow-up fan is not a subdivision of sigma")
    if not is_principal_on(fan, product):
        defects.append("product ideal is not principal on the blow-up")
    dtor = dtor_rays(fan, product)
    l = len(sigma.rays)
    S = tuple(j for j in range(l) if basis[j] in dtor)
    heart = check_heart(fan, S, act, basis, l)
    defects.extend(heart.defects)
    qe = is_quasielementary_fan(fan, act)
    if not qe:
        defects.append(f"blow-up fan is not quasi-elementary: {qe.witness.lower} below {qe.witness.upper}")

    pairs = []
    lower = upper = None
    try:
        for c in fan.cones:
            pairs.append(QuotientPair(c, _projected(Fan.from_cones([c], c.rank), act, "lower"),
                                      _projected(Fan.from_cones([c], c.rank), act, "upper")))
        lower = _projected(fan, act, "lower")
        upper = _projected(fan, act, "upper")
    except GeometricQuotientError as exc:
        defects.append(f"quotient failure: {exc}")
    else:
        for side, glob in (("lower", lower), ("upper", upper)):
            local = set()
            for p in pairs:
                local |= (p.lower if side == "lower" else p.upper).all_cones
            missing = [c for c in glob.cones if c not in local]
            if missing:
                defects.append(f"{side} quotient cone {missing[0]} not covered by local pairs")

    return TorificationResult(
        sigma=sigma,
        act=act,
        basis=basis,
        characters=chars,
        ideals=ideals,
        product=product,
        expansion=product_expansion([ideals[al] for al in chars]),
        fan=fan,
        exceptional=S,
        dtor=dtor,
        heart=heart,
        quasielementary=qe,
        quotient_pairs=tuple(pairs),
        lower_quotient=lower,
        upper_quotient=upper,
        defects=defects,
    )
