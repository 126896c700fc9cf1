"""Univariate polynomials and rational functions with rational coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction]


def _trim(coeffs: Iterable[Number]) -> tuple[Fraction, ...]:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class UniPoly:
    """Dense polynomial, constant term first. The zero polynomial has no coefficients."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[Number] = ()):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @classmethod
    def x(cls) -> "UniPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, c: Number) -> "UniPoly":
        return cls((c,))

    @classmethod
    def linear(cls, a: Number, b: Number) -> "UniPoly":
        """a + b*x"""
        return cls((a, b))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "UniPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" + ("" if i == 0 else "*x" if i == 1 else f"*x^{i}"))
        return "UniPoly(" + " + ".join(reversed(terms)) + ")"

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __add__(self, other) -> "UniPoly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UniPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __sub__(self, other) -> "UniPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "UniPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            return UniPoly(c * other for c in self.coeffs)
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniPoly":
        out = UniPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __divmod__(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return UniPoly(), self
        q = [Fraction(0)] * (dq + 1)
        lc = other.lc
        for k in range(dq, -1, -1):
            f = r[k + other.degree] / lc
            q[k] = f
            if f:
                for j, c in enumerate(other.coeffs):
                    r[k + j] -= f * c
        return UniPoly(q), UniPoly(r[: other.degree])

    def __floordiv__(self, other: "UniPoly") -> "UniPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return divmod(self, other)[1]

    def derivative(self) -> "UniPoly":
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self * (1 / self.lc)

    def integer_form(self) -> "UniPoly":
        """Primitive integer multiple with positive leading coefficient."""
        if self.is_zero():
            return self
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for c in ints:
            g = gcd(g, c)
        if ints[-1] < 0:
            g = -g
        return UniPoly(c // g for c in ints)

    def int_coeffs(self) -> list[int]:
        return [int(c) for c in self.integer_form().coeffs]

    def squarefree_part(self) -> "UniPoly":
        if self.degree <= 0:
            return self
        return (self // poly_gcd(self, self.derivative())).integer_form()

    def compose_linear(self, a: Number, b: Number) -> "UniPoly":
        """p(a + b*x)"""
        lin = UniPoly.linear(a, b)
        out = UniPoly()
        for c in reversed(self.coeffs):
            out = out * lin + c
        return out


def _as_poly(p) -> UniPoly:
    if isinstance(p, UniPoly):
        return p
    return UniPoly.const(p)


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over Q (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def sturm_sequence(p: UniPoly) -> list[UniPoly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    seq.pop()
    return seq


def _variations(values: Sequence[Fraction]) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def sturm_count(p: UniPoly, a: Fraction, b: Fraction, seq: list[UniPoly] | None = None) -> int:
    """Number of distinct real roots of p in the half-open interval (a, b]."""
    if p.is_zero():
        raise ValueError("zero polynomial has infinitely many roots")
    if seq is None:
        seq = sturm_sequence(p)
    return _variations([q(Fraction(a)) for q in seq]) - _variations([q(Fraction(b)) for q in seq])


def roots_in_closed(p: UniPoly, a: Fraction, b: Fraction) -> int:
    return sturm_count(p, a, b) + (1 if p(Fraction(a)) == 0 else 0)


def cauchy_bound(p: UniPoly) -> Fraction:
    """Every real root has absolute value strictly below this bound."""
    lc = abs(p.lc)
    return 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))


def interval_eval(p: UniPoly, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Enclosure of p over [lo, hi] by interval Horner evaluation."""
    if p.is_zero():
        return Fraction(0), Fraction(0)
    a = b = p.coeffs[-1]
    for c in reversed(p.coeffs[:-1]):
        prods = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(prods) + c, max(prods) + c
    return a, b


@dataclass(frozen=True)
class RationalFunction1D:
    """num/den in lowest terms with monic denominator."""

    num: UniPoly
    den: UniPoly

    def __init__(self, num: UniPoly, den: UniPoly | None = None):
        if den is None:
            den = UniPoly.const(1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = UniPoly(), UniPoly.const(1)
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
            lc = den.lc
            num, den = num * (1 / lc), den * (1 / lc)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __call__(self, x: Number) -> Fraction:
        d = self.den(Fraction(x))
        if d == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num(Fraction(x)) / d

    def __add__(self, other) -> "RationalFunction1D":
        other = _as_rf(other)
        return RationalFunction1D(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction1D":
        return RationalFunction1D(-self.num, self.den)

    def __sub__(self, other) -> "RationalFunction1D":
        return self + (-_as_rf(other))

    def __mul__(self, other) -> "RationalFunction1D":
        other = _as_rf(other)
        return RationalFunction1D(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction1D":
        other = _as_rf(other)
        return RationalFunction1D(self.num * other.den, self.den * other.num)

    def derivative(self) -> "RationalFunction1D":
        return RationalFunction1D(
            self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction1D):
            return NotImplemented
        return self.num.coeffs == other.num.coeffs and self.den.coeffs == other.den.coeffs

    def __hash__(self) -> int:
        return hash((self.num.coeffs, self.den.coeffs))


def _as_rf(f) -> RationalFunction1D:
    if isinstance(f, RationalFunction1D):
        return f
    return RationalFunction1D(_as_poly(f))
