"""Dense exact linear algebra over the integers and the rationals.

Matrices are plain lists of row lists. Every size that occurs in this package
is tiny, so nothing here tries to be clever about complexity.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    if not A:
        return []
    cols = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(row)) for j in range(cols)] for row in A]


def transpose(A: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*A)]


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} vs {len(v)}")
    return sum(a * b for a, b in zip(u, v))


def det(A: Sequence[Sequence]) -> Fraction | int:
    """Determinant by fraction-free Gaussian elimination (Bareiss).

    Integer input gives an integer; rational input gives a Fraction.
    """
    n = len(A)
    if n == 0:
        return 1
    if any(len(row) != n for row in A):
        raise ValueError("determinant of a non-square matrix")
    if any(isinstance(x, Fraction) and x.denominator != 1 for row in A for x in row):
        M = [[Fraction(x) for x in row] for row in A]
        return _det_field(M)
    M = [[int(x) for x in row] for row in A]
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


def _det_field(M: list[list[Fraction]]) -> Fraction:
    n = len(M)
    result = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            result = -result
        result *= M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            if f:
                for j in range(k, n):
                    M[i][j] -= f * M[k][j]
    return result


def rref(A: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (matrix, pivot columns)."""
    M = [[Fraction(x) for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if M else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def nullspace(A: Sequence[Sequence], ncols: Optional[int] = None) -> list[list[int]]:
    """Integer basis (primitive rows) of the rational kernel {x : A x = 0}."""
    if ncols is None:
        ncols = len(A[0])
    if not A:
        return identity(ncols)
    M, pivots = rref(A)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(M, pivots):
            x[p] = -row[f]
        basis.append(clear_denominators(x))
    return basis


def clear_denominators(v: Sequence[Fraction]) -> list[int]:
    """Smallest positive multiple of v that is a primitive integer vector."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    w = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in w:
        g = gcd(g, x)
    return [x // g for x in w] if g else w


def solve_linear_unique(A: Sequence[Sequence], b: Sequence) -> Optional[list[Fraction]]:
    """The unique rational solution of A x = b, or None.

    None covers both the inconsistent and the underdetermined case.
    """
    if not A:
        return None
    n = len(A[0])
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    M, pivots = rref(aug)
    if n in pivots:
        return None
    if len(pivots) < n:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(M, pivots):
        x[p] = row[n]
    return x


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (D, U, V) with U*A*V = D diagonal, d1 | d2 | ..., U and V unimodular."""
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(x) for x in row] for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not entries:
                return D, U, V
            _, pi, pj = min(entries)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return D, U, V


def invariant_factors(A: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    if not A or not A[0]:
        return []
    D, _, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]))) if D[i][i]]


def gcd_maximal_minors(A: Sequence[Sequence[int]]) -> int:
    rows = len(A)
    if rows == 0:
        return 1
    cols = len(A[0])
    if rows > cols:
        raise ValueError("more rows than columns")
    g = 0
    for idx in itertools.combinations(range(cols), rows):
        g = gcd(g, int(det([[row[j] for j in idx] for row in A])))
        if g == 1:
            break
    return abs(g)


def extends_to_basis(vectors: Sequence[Sequence[int]], r: int) -> bool:
    """True iff the integer vectors can be completed to a basis of Z^r."""
    if any(len(v) != r for v in vectors):
        raise ValueError(f"all vectors must have length {r}")
    if len(vectors) > r:
        return False
    if not vectors:
        return True
    return gcd_maximal_minors([list(v) for v in vectors]) == 1
