"""Builders for the worked family and reference data for isolated factorial singularities."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Optional, Sequence

from .geometry import Cone, TailedPolyhedron
from .pdivisor import BasePoint, PolyhedralDivisor


class SpecError(ValueError):
    pass


def build_xk(k: int, points: Optional[Sequence] = None) -> PolyhedralDivisor:
    """The divisor X_k: two fractional translates at 0 and inf, k unit segments elsewhere.

    ``points`` are coordinates for y_1..y_k (default 1..k); they are provenance only.
    """
    if not isinstance(k, int) or k < 1:
        raise SpecError("k must be a positive integer")
    if points is None:
        points = list(range(1, k + 1))
    points = [Fraction(p) for p in points]
    if len(points) != k:
        raise SpecError(f"expected {k} point coordinates, got {len(points)}")
    if len(set(points)) != k or any(p == 0 for p in points):
        raise SpecError("point coordinates must be distinct and nonzero")
    sigma = Cone.from_generators([(-1, 1), (15 * k - 4, 8)])
    coefficients = [
        (BasePoint("0", Fraction(0)), TailedPolyhedron.translate((Fraction(2, 5), Fraction(1, 5)), sigma)),
        (BasePoint("inf", "inf"), TailedPolyhedron.translate((Fraction(-2, 3), Fraction(1, 3)), sigma)),
    ]
    unit = TailedPolyhedron.segment((0, 0), (1, 0), sigma)
    for i, p in enumerate(points, start=1):
        coefficients.append((BasePoint(f"y{i}", p), unit))
    return PolyhedralDivisor.build(sigma, coefficients)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    ambient: Optional[str]
    notes: str
    constraint: Callable[..., bool] = lambda: True
    parameters: tuple[str, ...] = ()

    def check(self, **params) -> bool:
        if set(params) != set(self.parameters):
            raise SpecError(f"{self.name} takes parameters {self.parameters}")
        return self.constraint(**params)

    def to_json(self) -> dict:
        return {"name": self.name, "ambient": self.ambient, "parameters": list(self.parameters), "notes": self.notes}


def brieskorn_pham_catalog() -> list[CatalogEntry]:
    """Isolated factorial cone singularities of complexity at most one (reference data only)."""
    return [
        CatalogEntry("affine space", None, "smooth; no defining equation"),
        CatalogEntry(
            "A-type Brieskorn-Pham threefold",
            "x1*x2 + x3^p + x4^q = 0",
            "p, q > 1 coprime; Sasaki-Einstein structures on this family are known to be quasi-regular",
            lambda p, q: p > 1 and q > 1 and gcd(p, q) == 1,
            ("p", "q"),
        ),
        CatalogEntry(
            "four-dimensional A-type hypersurface",
            "x1*x2 + x3*x4 + x5^p = 0",
            "p > 1",
            lambda p: p > 1,
            ("p",),
        ),
        CatalogEntry("quadric cone in six variables", "x1*x2 + x3*x4 + x5*x6 = 0", "no parameters"),
    ]
