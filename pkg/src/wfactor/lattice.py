"""Exact integer and rational linear algebra on lattices.

Vectors are plain tuples of Python ints; matrices are tuples of row tuples.
Nothing in here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vec = tuple[int, ...]
Matrix = tuple[Vec, ...]


class LatticeError(ValueError):
    pass


def as_vec(v: Iterable[int]) -> Vec:
    out = tuple(int(c) for c in v)
    return out


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(as_vec(r) for r in rows)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != len(v):
        raise LatticeError(f"rank mismatch: {len(u)} vs {len(v)}")
    return sum(a * b for a, b in zip(u, v))


def vec_gcd(v: Iterable[int]) -> int:
    g = 0
    for c in v:
        g = gcd(g, c)
    return g


def is_primitive(v: Sequence[int]) -> bool:
    return vec_gcd(v) == 1


def primitive(v: Sequence[int]) -> Vec:
    """Primitive integer vector on the ray through ``v`` (rational input allowed)."""
    if any(isinstance(c, Fraction) for c in v):
        den = 1
        for c in v:
            den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
        v = [int(Fraction(c) * den) for c in v]
    g = vec_gcd(v)
    if g == 0:
        raise LatticeError("the zero vector has no primitive direction")
    return tuple(int(c) // g for c in v)


def add(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def scale(c: int, v: Sequence[int]) -> Vec:
    return tuple(c * a for a in v)


def neg(v: Sequence[int]) -> Vec:
    return tuple(-a for a in v)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(A: Sequence[Sequence[int]]) -> Matrix:
    if not A:
        return ()
    return tuple(zip(*A))


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    Bt = transpose(B)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A: Sequence[Sequence[int]], v: Sequence[int]) -> Vec:
    return tuple(dot(row, v) for row in A)


def vecmat(v: Sequence[int], A: Sequence[Sequence[int]]) -> Vec:
    """Row vector times matrix: the combination sum_i v[i] * A[i]."""
    n = len(A[0]) if A else 0
    out = [0] * n
    for c, row in zip(v, A):
        if c:
            for j, x in enumerate(row):
                out[j] += c * x
    return tuple(out)


def determinant(A: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    n = len(A)
    if n == 0:
        return 1
    if any(len(r) != n for r in A):
        raise LatticeError("determinant of a non-square matrix")
    M = [list(r) for r in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(A: Sequence[Sequence[int]]) -> int:
    rows = [list(r) for r in A if any(r)]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                f, g = rows[i][c], p[c]
                rows[i] = [g * x - f * y for x, y in zip(rows[i], p)]
        r += 1
        if r == len(rows):
            break
    return r


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(S, U, V)`` with ``U @ A @ V == S`` and S in Smith form.

    U and V are unimodular; the diagonal of S is nonnegative with each entry
    dividing the next.
    """
    if not A or not A[0]:
        raise LatticeError("smith_normal_form needs a nonempty matrix")
    m, n = len(A), len(A[0])
    S = [list(r) for r in A]
    U = [list(r) for r in identity(m)]
    V = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        S[dst] = [x - q * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in S:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            if best[0] != t:
                swap_rows(t, best[0])
            if best[1] != t:
                swap_cols(t, best[1])
            clean = True
            p = S[t][t]
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, S[i][t] // p)
                    if S[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, S[t][j] // p)
                    if S[t][j]:
                        clean = False
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, -1)
        if best is None:
            break
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return as_matrix(S), as_matrix(U), as_matrix(V)


def snf_diagonal(A: Sequence[Sequence[int]]) -> Vec:
    S, _, _ = smith_normal_form(A)
    return tuple(S[i][i] for i in range(min(len(S), len(S[0]))))


def hermite_normal_form(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row-style HNF: ``(H, U)`` with ``U @ A == H``, U unimodular.

    Pivots are positive and entries above a pivot are reduced into
    ``[0, pivot)``. Zero rows sit at the bottom.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = [list(r) for r in A]
    U = [list(r) for r in identity(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[piv] = H[piv], H[r]
            U[r], U[piv] = U[piv], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if not H[r][c]:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        r += 1
    return as_matrix(H), as_matrix(U)


def hnf_basis(rows: Iterable[Sequence[int]]) -> Matrix:
    """Canonical basis (nonzero HNF rows) of the lattice spanned by ``rows``."""
    rows = [tuple(r) for r in rows]
    if not rows:
        return ()
    H, _ = hermite_normal_form(rows)
    return tuple(r for r in H if any(r))


def integer_kernel(A: Sequence[Sequence[int]], n: int | None = None) -> Matrix:
    """HNF basis of ``{x in Z^n : A x = 0}``."""
    if not A or not A[0]:
        if n is None:
            raise LatticeError("cannot infer ambient rank of an empty matrix")
        return identity(n)
    n = len(A[0])
    S, _, V = smith_normal_form(A)
    r = sum(1 for i in range(min(len(S), n)) if S[i][i])
    cols = [tuple(V[i][j] for i in range(n)) for j in range(r, n)]
    return hnf_basis(cols)


def saturation(rows: Sequence[Sequence[int]], n: int) -> Matrix:
    """HNF basis of ``span_Q(rows) ∩ Z^n``."""
    return integer_kernel(integer_kernel(rows, n), n) if rows else ()


def quotient_projection(a: Sequence[int]) -> Matrix:
    """Integer matrix ``pi`` of ``N -> N / Z a`` onto ``Z^(n-1)``.

    The rows are the HNF basis of ``M ∩ a^perp``, so ``pi`` is surjective with
    kernel exactly ``Z a`` and the choice is canonical.
    """
    a = as_vec(a)
    if not any(a):
        raise LatticeError("one-parameter subgroup must be nonzero")
    if not is_primitive(a):
        raise LatticeError(f"{a} is not primitive")
    return integer_kernel([a])


def complete_basis(rows: Sequence[Sequence[int]], n: int) -> Matrix:
    """Extend ``rows`` (part of a Z-basis) to a unimodular n x n matrix."""
    rows = as_matrix(rows)
    if not rows:
        return identity(n)
    S, _, V = smith_normal_form(rows)
    if any(S[i][i] != 1 for i in range(len(rows))):
        raise LatticeError("rows do not extend to a Z-basis")
    W = inverse_unimodular(V)
    return rows + W[len(rows):]


def inverse_unimodular(A: Sequence[Sequence[int]]) -> Matrix:
    inv = rational_inverse(A)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise LatticeError("matrix is not unimodular")
        out.append(tuple(int(x) for x in row))
    return tuple(out)


def rational_inverse(A: Sequence[Sequence[int]]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            raise LatticeError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [x / p for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return tuple(tuple(row[n:]) for row in M)


def solve_rational(A: Sequence[Sequence[int]], b: Sequence[int]) -> tuple[Fraction, ...] | None:
    """Some rational ``x`` with ``A x = b``, or None if inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[Fraction(x) for x in A[i]] + [Fraction(b[i])] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        M[r] = [x / p for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    if any(M[i][n] != 0 for i in range(r, m)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = M[i][n]
    return tuple(x)


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int]) -> Vec | None:
    """Some integer ``x`` with ``A x = b``, or None."""
    S, U, V = smith_normal_form(A)
    c = matvec(U, b)
    n = len(A[0])
    y = [0] * n
    for i, ci in enumerate(c):
        d = S[i][i] if i < n else 0
        if d == 0:
            if ci != 0:
                return None
        else:
            if ci % d:
                return None
            y[i] = ci // d
    return matvec(V, y)


def in_span(rows: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    if not rows:
        return not any(v)
    return rank(list(rows) + [list(v)]) == rank(rows)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, x, y)`` with ``a x + b y = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def bezout(values: Sequence[int]) -> tuple[int, Vec]:
    """gcd g >= 0 of ``values`` and coefficients c with ``sum c_i v_i = g``."""
    g, coeffs = 0, []
    for v in values:
        g2, x, y = ext_gcd(g, v)
        coeffs = [c * x for c in coeffs] + [y]
        g = g2
    return g, tuple(coeffs)


def hilbert_basis(cone) -> frozenset[Vec]:
    """Minimal generating set of the semigroup ``cone ∩ Z^n``.

    Works for any strictly convex cone exposing ``rays``, ``dim``,
    ``contains`` and ``triangulate()``. Candidates are the lattice points
    of the half-open fundamental parallelepipeds of a triangulation; these
    generate the semigroup, and the irreducible ones are kept.
    """
    if not cone.is_strictly_convex:
        raise LatticeError("hilbert_basis needs a strictly convex cone")
    if not cone.rays:
        return frozenset()
    candidates: set[Vec] = set(cone.rays)
    for simplex in cone.triangulate():
        candidates.update(parallelepiped_points(simplex.rays))
    return _irreducible(candidates, cone)


def _irreducible(candidates: set[Vec], cone) -> frozenset[Vec]:
    cands = sorted(candidates, key=lambda v: (sum(abs(c) for c in v), v))
    keep = []
    for x in cands:
        reducible = False
        for y in cands:
            if y == x:
                continue
            d = sub(x, y)
            if any(d) and cone.contains(d):
                reducible = True
                break
        if not reducible:
            keep.append(x)
    return frozenset(keep)


def parallelepiped_points(gens: Sequence[Sequence[int]]) -> list[Vec]:
    """Nonzero lattice points of ``{sum l_i g_i : 0 <= l_i < 1}``.

    ``gens`` must be linearly independent. Points are enumerated through the
    finite group ``Lambda / <gens>`` where Lambda is the saturated lattice of
    their span, so the count is exactly the multiplicity.
    """
    gens = as_matrix(gens)
    k = len(gens)
    if k == 0:
        return []
    n = len(gens[0])
    basis = saturation(gens, n)
    # coordinates of each generator in the saturated basis
    T = []
    for g in gens:
        sol = solve_rational(transpose(basis), g)
        T.append(tuple(int(x) for x in sol))
    S, _, V = smith_normal_form(T)
    diag = [S[i][i] for i in range(k)]
    Vinv = inverse_unimodular(V)
    Tinv = rational_inverse(T)
    out = []

    def rec(i, y):
        if i == k:
            c = vecmat(y, Vinv)
            lam = [sum(Fraction(c[r]) * Tinv[r][s] for r in range(k)) for s in range(k)]
            lam = [x - (x.numerator // x.denominator) for x in lam]
            if not any(lam):
                return
            coords = [sum(lam[r] * T[r][s] for r in range(k)) for s in range(k)]
            pt = [sum(coords[s] * basis[s][j] for s in range(k)) for j in range(n)]
            out.append(tuple(int(x) for x in pt))
            return
        for v in range(diag[i]):
            y[i] = v
            rec(i + 1, y)
        y[i] = 0

    rec(0, [0] * k)
    return out
