"""Real algebraic numbers as (squarefree integer polynomial, isolating interval)."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Union

from .poly import (
    RationalFunction1D,
    UniPoly,
    cauchy_bound,
    interval_eval,
    poly_gcd,
    roots_in_closed,
    sturm_count,
    sturm_sequence,
)


class PoleError(ZeroDivisionError):
    """A rational function was evaluated at a root of its denominator."""


def decimal_string(x: Fraction, digits: int = 12) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(+(Decimal(x.numerator) / Decimal(x.denominator)))


def rational_string(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class AlgebraicNumber:
    """The unique root of ``poly`` in the closed interval [lo, hi].

    ``poly`` is squarefree with primitive integer coefficients. No minimality is
    assumed, so a rational value may hide behind a degree-2 polynomial; use
    :func:`rational_roots` to decide rationality.
    """

    poly: UniPoly
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty isolating interval")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def refine(self) -> "AlgebraicNumber":
        if self.is_point:
            return self
        mid = (self.lo + self.hi) / 2
        vm = self.poly(mid)
        if vm == 0:
            return AlgebraicNumber(self.poly, mid, mid)
        vlo = self.poly(self.lo)
        if vlo == 0:
            return AlgebraicNumber(self.poly, self.lo, self.lo)
        if (vlo > 0) != (vm > 0):
            return AlgebraicNumber(self.poly, self.lo, mid)
        return AlgebraicNumber(self.poly, mid, self.hi)

    def refined_to(self, width: Fraction) -> "AlgebraicNumber":
        x = self
        while x.hi - x.lo > width:
            x = x.refine()
        return x

    def __float__(self) -> float:
        x = self.refined_to(Fraction(1, 2**60) * max(1, abs(self.lo)))
        return float((x.lo + x.hi) / 2)

    def approx(self, digits: int = 12) -> str:
        scale = max(Fraction(1), abs(self.lo), abs(self.hi))
        x = self.refined_to(scale / 10 ** (digits + 4))
        return decimal_string((x.lo + x.hi) / 2, digits)

    def compare(self, q: Fraction) -> int:
        """Sign of (self - q)."""
        q = Fraction(q)
        x = self
        while True:
            if x.is_point:
                return (x.lo > q) - (x.lo < q)
            if q < x.lo:
                return 1
            if q > x.hi:
                return -1
            if x.poly(q) == 0:
                return 0
            x = x.refine()

    def to_json(self) -> dict:
        return {
            "poly": [int(c) for c in self.poly.coeffs],
            "lo": rational_string(self.lo),
            "hi": rational_string(self.hi),
            "approx": self.approx(12),
        }

    def __repr__(self) -> str:
        return f"AlgebraicNumber(~{self.approx(12)}, poly={self.poly.int_coeffs()})"

    def apply(self, f: RationalFunction1D) -> Union[Fraction, "AlgebraicNumber"]:
        """Exact value f(self) as a rational or a new algebraic number."""
        return evaluate_rational_function(f, self)


Scalar = Union[Fraction, AlgebraicNumber]


def make_algebraic(p: UniPoly, lo: Fraction, hi: Fraction) -> AlgebraicNumber:
    return AlgebraicNumber(p.squarefree_part(), Fraction(lo), Fraction(hi))


def isolate_real_roots(p: UniPoly, interval: tuple[Fraction, Fraction]) -> list[AlgebraicNumber]:
    """All distinct real roots of p in the open interval, in increasing order."""
    if p.is_zero():
        raise ValueError("cannot isolate the roots of the zero polynomial")
    q = p.squarefree_part()
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    if q.degree <= 0 or lo >= hi:
        return []
    seq = sturm_sequence(q)
    out: list[AlgebraicNumber] = []

    def count_open(a: Fraction, b: Fraction) -> int:
        return sturm_count(q, a, b, seq) - (1 if q(b) == 0 else 0)

    def rec(a: Fraction, b: Fraction, n: int) -> None:
        if n == 0:
            return
        if n == 1 and q(a) != 0 and q(b) != 0:
            out.append(AlgebraicNumber(q, a, b))
            return
        m = (a + b) / 2
        left = count_open(a, m)
        at_mid = q(m) == 0
        rec(a, m, left)
        if at_mid:
            out.append(AlgebraicNumber(q, m, m))
        rec(m, b, n - left - (1 if at_mid else 0))

    rec(lo, hi, count_open(lo, hi))
    return out


def all_real_roots(p: UniPoly) -> list[AlgebraicNumber]:
    q = p.squarefree_part()
    if q.degree <= 0:
        return []
    b = cauchy_bound(q)
    return isolate_real_roots(q, (-b, b))


def rational_roots(p: UniPoly) -> list[Fraction]:
    """All rational roots, by the rational-root test on the primitive integer form.

    A rational root r/s of the integer form has s dividing the leading coefficient
    L. Two distinct such fractions are at least 1/L^2 apart, so once an isolating
    interval is narrower than 1/(2 L^2) the best approximation with denominator at
    most L is the only possible candidate, and it is checked exactly.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    q = p.squarefree_part()
    if q.degree <= 0:
        return []
    L = abs(int(q.lc))
    out = []
    for root in all_real_roots(q):
        if root.is_point:
            out.append(root.lo)
            continue
        x = root.refined_to(Fraction(1, 2 * L * L + 1))
        if x.is_point:
            out.append(x.lo)
            continue
        cand = ((x.lo + x.hi) / 2).limit_denominator(L)
        if q(cand) == 0:
            out.append(cand)
    return out


def _has_root_at(g: UniPoly, x: AlgebraicNumber) -> bool:
    """Does g vanish at x, given that every root of g is a root of x.poly?"""
    if g.degree <= 0:
        return False
    return roots_in_closed(g, x.lo, x.hi) > 0


def sign_at(f: RationalFunction1D, x: Scalar) -> int:
    """Exact sign of f(x); zero is reported only through a shared polynomial factor."""
    if not isinstance(x, AlgebraicNumber):
        d = f.den(Fraction(x))
        if d == 0:
            raise PoleError(f"denominator vanishes at {x}")
        v = f.num(Fraction(x)) / d
        return (v > 0) - (v < 0)
    if x.is_point:
        return sign_at(f, x.lo)
    if _has_root_at(poly_gcd(f.den, x.poly), x):
        raise PoleError("denominator vanishes at the algebraic point")
    if f.num.is_zero() or _has_root_at(poly_gcd(f.num, x.poly), x):
        return 0
    while True:
        # x.lo is never a root of f.num or f.den here: x.poly(x.lo) != 0 unless x is a point
        if roots_in_closed(f.num, x.lo, x.hi) == 0 and roots_in_closed(f.den, x.lo, x.hi) == 0:
            v = f.num(x.lo) * f.den(x.lo)
            return (v > 0) - (v < 0)
        x = x.refine()
        if x.is_point:
            return sign_at(f, x.lo)


def _charpoly(A: list[list[Fraction]]) -> UniPoly:
    """Characteristic polynomial det(yI - A) by Faddeev-LeVerrier."""
    n = len(A)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        for i in range(n):
            M[i][i] += coeffs[n - k + 1]
        AM = [[sum(A[i][l] * M[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(AM[i][i] for i in range(n)) / k
        M = AM
    return UniPoly(coeffs)


def _poly_of_matrix(p: UniPoly, C: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(C)
    out = [[Fraction(0)] * n for _ in range(n)]
    for c in reversed(p.coeffs):
        out = [[sum(out[i][l] * C[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            out[i][i] += c
    return out


def _inverse(M: list[list[Fraction]]) -> list[list[Fraction]]:
    from .linalg import rref

    n = len(M)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise PoleError("singular matrix")
    return [row[n:] for row in R]


def evaluate_rational_function(f: RationalFunction1D, x: Scalar) -> Scalar:
    if not isinstance(x, AlgebraicNumber):
        return f(Fraction(x))
    if x.is_point:
        return f(x.lo)
    g = poly_gcd(f.den, x.poly)
    if _has_root_at(g, x):
        raise PoleError("denominator vanishes at the algebraic point")
    p = x.poly if g.degree <= 0 else (x.poly // g).integer_form()
    x = AlgebraicNumber(p, x.lo, x.hi)
    n = p.degree
    if n == 1:
        return f(-p.coeffs[0] / p.coeffs[1])
    monic = p.monic()
    # companion matrix of p: its eigenvalues are the roots of p
    C = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n):
        C[i][i - 1] = Fraction(1)
    for i in range(n):
        C[i][n - 1] = -monic.coeffs[i]
    A = _poly_of_matrix(f.num, C)
    B = _inverse(_poly_of_matrix(f.den, C))
    image = [[sum(A[i][l] * B[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
    q = _charpoly(image).squarefree_part()
    while True:
        nlo, nhi = interval_eval(f.num, x.lo, x.hi)
        dlo, dhi = interval_eval(f.den, x.lo, x.hi)
        if dlo > 0 or dhi < 0:
            cands = [a / b for a in (nlo, nhi) for b in (dlo, dhi)]
            ylo, yhi = min(cands), max(cands)
            if roots_in_closed(q, ylo, yhi) == 1:
                for r in rational_roots(q):
                    if ylo <= r <= yhi:
                        return r
                return AlgebraicNumber(q, ylo, yhi)
        x = x.refine()
        if x.is_point:
            return f(x.lo)
