import itertools
from functools import reduce
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wfactor.cones import Cone
from wfactor.lattice import (
    LatticeError,
    bezout,
    determinant,
    hermite_normal_form,
    hilbert_basis,
    integer_kernel,
    inverse_unimodular,
    matmul,
    matvec,
    primitive,
    rank,
    smith_normal_form,
    snf_diagonal,
    solve_integer,
)


def cofactor_det(A):
    """Laplace expansion; an oracle that shares nothing with elimination."""
    if not A:
        return 1
    if len(A) == 1:
        return A[0][0]
    return sum((-1) ** j * A[0][j] * cofactor_det([row[:j] + row[j + 1:] for row in A[1:]]) for j in range(len(A)))


def matrices(max_n=4, lo=-6, hi=6, square=False):
    def build(dims):
        m, n = dims
        return st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=m, max_size=m)

    dims = st.integers(1, max_n).map(lambda n: (n, n)) if square else st.tuples(st.integers(1, max_n), st.integers(1, max_n))
    return dims.flatmap(build)


@given(matrices(square=True))
def test_determinant_matches_cofactor_expansion(A):
    assert determinant(A) == cofactor_det(A)


@given(matrices())
def test_smith_form_certificate(A):
    D, U, V = smith_normal_form(A)
    assert [list(r) for r in matmul(matmul(U, A), V)] == [list(r) for r in D]
    assert abs(cofactor_det(U)) == 1 and abs(cofactor_det(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    assert len(nonzero) == rank(A)


@given(matrices())
def test_first_invariant_factor_is_gcd_of_entries(A):
    # first invariant factor = gcd of all entries (Smith's theorem)
    entries_gcd = 0
    for row in A:
        for x in row:
            entries_gcd = gcd(entries_gcd, x)
    diag = [d for d in snf_diagonal(A) if d]
    if entries_gcd:
        assert diag[0] == entries_gcd
    else:
        assert diag == []


@given(matrices())
def test_hermite_form_is_row_equivalent_and_echelon(A):
    H, U = hermite_normal_form(A)
    assert abs(cofactor_det(U)) == 1
    assert [list(r) for r in matmul(U, A)] == [list(r) for r in H]
    pivots = []
    for row in H:
        nz = [j for j, x in enumerate(row) if x]
        if nz:
            pivots.append(nz[0])
            assert row[nz[0]] > 0
    assert pivots == sorted(pivots) and len(set(pivots)) == len(pivots)


@given(matrices())
def test_integer_kernel_is_saturated_basis(A):
    n = len(A[0])
    K = integer_kernel(A, n)
    assert len(K) == n - rank(A)
    for k in K:
        assert all(x == 0 for x in matvec(A, k))
    if K:
        # a saturated lattice basis has all invariant factors equal to one
        assert all(d == 1 for d in snf_diagonal(K))


@given(st.lists(st.integers(-30, 30), min_size=1, max_size=5))
def test_bezout(values):
    g, cs = bezout(values)
    assert g >= 0
    assert sum(c * v for c, v in zip(cs, values)) == g
    assert all(v % g == 0 for v in values) if g else not any(values)


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=5).filter(any))
def test_primitive(v):
    p = primitive(v)
    assert reduce(gcd, p, 0) == 1
    k = reduce(gcd, v, 0)
    assert tuple(x * k for x in p) == tuple(v)


def test_inverse_unimodular_rejects_singular():
    with pytest.raises(LatticeError):
        inverse_unimodular([[2, 0], [0, 1]])


def test_solve_integer_detects_non_integral_solution():
    assert solve_integer([[2, 0], [0, 2]], (1, 0)) is None
    assert solve_integer([[2, 0], [0, 2]], (2, 4)) == (1, 2)


def brute_hilbert_basis(rays, box):
    """Irreducible lattice points of the cone, by enumeration in a box.

    For a simplicial cone every Hilbert basis element lies in the
    fundamental parallelepiped, and the box is chosen to contain it. A
    decomposition leaving the box would make the oracle too large, so a
    bad box shows up as a failure rather than a false pass.
    """
    c = Cone.from_rays(rays)
    n = len(rays[0])
    pts = [p for p in itertools.product(range(-box, box + 1), repeat=n) if any(p) and c.contains(p)]
    pset = set(pts)
    out = set()
    for p in pts:
        reducible = any(
            q != p and tuple(x - y for x, y in zip(p, q)) in pset for q in pts
        )
        if not reducible:
            out.add(p)
    return out


@pytest.mark.parametrize(
    "rays",
    [
        [(1, 0), (1, 2)],
        [(1, 0), (1, 3)],
        [(2, -1), (-1, 2)],
        [(1, 0), (-1, 5)],
        [(1, 0, 0), (0, 1, 0), (1, 1, 2)],
        [(1, 0, 0), (0, 1, 0), (1, 2, 3)],
    ],
)
def test_hilbert_basis_against_enumeration(rays):
    c = Cone.from_rays(rays)
    box = max(max(abs(x) for x in r) for r in rays) * len(rays)
    assert set(hilbert_basis(c)) == brute_hilbert_basis(rays, box)


def test_hilbert_basis_example():
    # the A_1 cone <(1,0),(1,2)> has the extra generator (1,1)
    assert set(hilbert_basis(Cone.from_rays([(1, 0), (1, 2)]))) == {(1, 0), (1, 1), (1, 2)}
