"""Rational polyhedral cones, tailed polyhedra and truncated dual-cone volumes.

Cones are stored by their primitive extreme rays in lexicographic order; that
canonical form doubles as the equality test. Facets are found by brute force
over (d-1)-subsets of generators, which is plenty for the ranks used here (<= 4).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from math import gcd, lcm
from typing import Iterable, Optional, Sequence, Union

from .exact import (
    AlgebraicNumber,
    RationalFunction1D,
    Scalar,
    UniPoly,
    det,
    dot,
    evaluate_rational_function,
    nullspace,
    rank,
    rational_string,
)

IntVec = tuple[int, ...]
QVec = tuple[Fraction, ...]


class GeometryError(ValueError):
    pass


class NotFullDimensionalError(GeometryError):
    pass


class NotPointedError(GeometryError):
    pass


class BoundaryError(GeometryError):
    """A point that should be interior to a cone lies on its boundary or outside."""


class UnboundedError(GeometryError):
    pass


def primitive(v: Sequence[int]) -> IntVec:
    g = reduce(gcd, (abs(int(x)) for x in v), 0)
    if g == 0:
        raise GeometryError("the zero vector has no primitive generator")
    return tuple(int(x) // g for x in v)


def vertex_multiplicity(v: Sequence[Fraction]) -> int:
    """Least mu >= 1 with mu * v integral."""
    return lcm(1, *(Fraction(x).denominator for x in v))


def integral_generator(v: Sequence[Fraction]) -> IntVec:
    """Primitive integer vector on the ray through v (v != 0)."""
    m = vertex_multiplicity(v)
    return primitive([int(Fraction(x) * m) for x in v])


def lift(v: Sequence[Fraction], height: int) -> IntVec:
    """mu(v) * (v, height): the integral point of (v, height) scaled by the multiplicity."""
    m = vertex_multiplicity(v)
    return tuple(int(Fraction(x) * m) for x in v) + (m * height,)


def _dedupe(vectors: Iterable[Sequence[int]]) -> list[IntVec]:
    seen = set()
    out = []
    for v in vectors:
        if all(x == 0 for x in v):
            continue
        p = primitive(v)
        if p not in seen:
            seen.add(p)
            out.append(p)
    return sorted(out)


def _analyze(gens: list[IntVec], n: int):
    """Return (facet normals, equations, pointed, extreme rays) of pos(gens)."""
    equations = [tuple(e) for e in nullspace(gens, n)] if gens else [
        tuple(int(i == j) for j in range(n)) for i in range(n)
    ]
    d = n - len(equations)
    facets: list[IntVec] = []
    if d > 0:
        for S in itertools.combinations(gens, d - 1):
            M = [list(s) for s in S] + [list(e) for e in equations]
            if M and rank(M) != n - 1:
                continue
            (h,) = nullspace(M, n)
            vals = [dot(h, g) for g in gens]
            if all(v >= 0 for v in vals):
                h = tuple(h)
            elif all(v <= 0 for v in vals):
                h = tuple(-x for x in h)
            else:
                continue
            h = primitive(h)
            if h not in facets:
                facets.append(h)
    facets.sort()
    pointed = n == 0 or rank([list(f) for f in facets] + [list(e) for e in equations]) == n
    if not pointed:
        return facets, equations, False, list(gens)
    rays = []
    for g in gens:
        tight = [list(f) for f in facets if dot(f, g) == 0] + [list(e) for e in equations]
        if (rank(tight) if tight else 0) == n - 1:
            rays.append(g)
    return facets, equations, True, rays


@dataclass(frozen=True)
class Cone:
    """pos(rays) in Z^rank. For non-pointed cones ``rays`` is just a generating set."""

    rank: int
    rays: tuple[IntVec, ...]
    pointed: bool
    dim: int

    @classmethod
    def from_generators(cls, generators: Iterable[Sequence[int]], rank_: Optional[int] = None) -> "Cone":
        gens = [tuple(int(x) for x in g) for g in generators]
        if rank_ is None:
            if not gens:
                raise GeometryError("cannot infer the rank of an empty cone")
            rank_ = len(gens[0])
        if any(len(g) != rank_ for g in gens):
            raise GeometryError("generator length does not match the rank")
        gens = _dedupe(gens)
        facets, eqs, pointed, rays = _analyze(gens, rank_)
        cone = cls(rank_, tuple(sorted(rays)), pointed, rank_ - len(eqs))
        cone.__dict__["_facets"] = tuple(facets)
        cone.__dict__["_equations"] = tuple(eqs)
        return cone

    @classmethod
    def orthant(cls, n: int) -> "Cone":
        return cls.from_generators([tuple(int(i == j) for j in range(n)) for i in range(n)])

    @property
    def full_dimensional(self) -> bool:
        return self.dim == self.rank

    @property
    def is_simplicial(self) -> bool:
        return self.pointed and len(self.rays) == self.dim

    def _ensure(self):
        if "_facets" not in self.__dict__:
            facets, eqs, _, _ = _analyze(list(self.rays), self.rank)
            self.__dict__["_facets"] = tuple(facets)
            self.__dict__["_equations"] = tuple(eqs)

    @property
    def facet_normals(self) -> tuple[IntVec, ...]:
        self._ensure()
        return self.__dict__["_facets"]

    @property
    def equations(self) -> tuple[IntVec, ...]:
        self._ensure()
        return self.__dict__["_equations"]

    @cached_property
    def inequalities(self) -> tuple[IntVec, ...]:
        """x is in the cone iff <h, x> >= 0 for every h returned."""
        return self.facet_normals + self.equations + tuple(tuple(-x for x in e) for e in self.equations)

    def contains_point(self, x: Sequence) -> bool:
        return all(dot(h, x) >= 0 for h in self.inequalities)

    def is_interior(self, x: Sequence) -> bool:
        if not self.full_dimensional:
            return False
        return all(dot(h, x) > 0 for h in self.facet_normals)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains_point(r) for r in other.rays)

    def facet_rays(self) -> list[tuple[IntVec, ...]]:
        """Ray subsets spanning each facet."""
        return [tuple(r for r in self.rays if dot(f, r) == 0) for f in self.facet_normals]

    def to_json(self) -> dict:
        return {"rank": self.rank, "rays": [list(r) for r in self.rays]}

    @classmethod
    def from_json(cls, data: dict) -> "Cone":
        return cls.from_generators(data["rays"], int(data["rank"]))

    def __repr__(self) -> str:
        flag = "" if self.pointed else ", not pointed"
        return f"Cone({[list(r) for r in self.rays]}{flag})"


def dual_cone(C: Cone) -> Cone:
    if not C.full_dimensional:
        raise NotFullDimensionalError("dual_cone needs a full-dimensional cone")
    if not C.facet_normals:
        return Cone.from_generators([], C.rank)
    return Cone.from_generators(C.facet_normals, C.rank)


@dataclass(frozen=True)
class SimplicialPiece:
    generators: tuple[IntVec, ...]
    det_abs: int


def _pull(rays: tuple[IntVec, ...], n: int, pivot: str) -> list[tuple[IntVec, ...]]:
    sub = Cone.from_generators(rays, n)
    if len(sub.rays) == sub.dim:
        return [sub.rays]
    apex = sub.rays[-1] if pivot == "last" else sub.rays[0]
    out = []
    for facet in sub.facet_rays():
        if apex in facet:
            continue
        for simplex in _pull(facet, n, pivot):
            out.append((apex,) + simplex)
    return out


def triangulate(C: Cone, pivot: str = "last") -> list[SimplicialPiece]:
    """Pulling triangulation: cone over the facets not containing the pivot ray.

    ``pivot`` is "last" or "first" in the canonical ray order; both cover C with
    pieces whose generators are extreme rays of C.
    """
    if not C.pointed:
        raise NotPointedError("cannot triangulate a cone containing a line")
    if not C.full_dimensional:
        raise NotFullDimensionalError("triangulate needs a full-dimensional cone")
    if pivot not in ("first", "last"):
        raise ValueError("pivot must be 'first' or 'last'")
    pieces = []
    for simplex in _pull(C.rays, C.rank, pivot):
        gens = tuple(sorted(simplex))
        pieces.append(SimplicialPiece(gens, abs(int(det([list(g) for g in gens])))))
    return pieces


@lru_cache(maxsize=512)
def dual_pieces(C: Cone, pivot: str = "last") -> tuple[SimplicialPiece, ...]:
    return tuple(triangulate(dual_cone(C), pivot))


@dataclass(frozen=True)
class LinePoint:
    """The point base + t * direction, where t may be irrational."""

    base: QVec
    direction: QVec
    t: Scalar

    @classmethod
    def make(cls, base, direction, t) -> "LinePoint":
        if not isinstance(t, AlgebraicNumber):
            t = Fraction(t)
        return cls(tuple(Fraction(x) for x in base), tuple(Fraction(x) for x in direction), t)

    @property
    def is_rational(self) -> bool:
        return not isinstance(self.t, AlgebraicNumber)

    def rational_coordinates(self) -> QVec:
        if not self.is_rational:
            raise ValueError("point has an irrational coordinate")
        return tuple(b + self.t * d for b, d in zip(self.base, self.direction))

    def approx(self) -> tuple[float, ...]:
        t = float(self.t)
        return tuple(float(b) + t * float(d) for b, d in zip(self.base, self.direction))


Point = Union[Sequence, LinePoint]


def as_line_point(xi: Point) -> LinePoint:
    """Normalize a point; at most one coordinate may be an AlgebraicNumber."""
    if isinstance(xi, LinePoint):
        return xi
    irr = [i for i, x in enumerate(xi) if isinstance(x, AlgebraicNumber)]
    if len(irr) > 1:
        raise GeometryError("points with more than one irrational coordinate are not supported")
    n = len(xi)
    if not irr:
        return LinePoint.make([Fraction(x) for x in xi], [0] * n, 0)
    j = irr[0]
    base = [Fraction(0) if i == j else Fraction(x) for i, x in enumerate(xi)]
    return LinePoint.make(base, [int(i == j) for i in range(n)], xi[j])


def _coords(xi: Sequence) -> QVec:
    return tuple(Fraction(x) for x in xi)


def truncated_dual_volume(C: Cone, xi: Point, pivot: str = "last") -> Scalar:
    """Normalized lattice volume of {u in C^dual : <u, xi> <= 1}."""
    p = as_line_point(xi)
    if p.is_rational:
        x = p.rational_coordinates()
        pieces = dual_pieces(C, pivot)
        total = Fraction(0)
        for piece in pieces:
            prod = Fraction(1)
            for u in piece.generators:
                val = dot(u, x)
                if val <= 0:
                    raise BoundaryError("xi is not in the interior of the cone")
                prod *= val
            total += Fraction(piece.det_abs) / prod
        return total
    f, (lo, hi) = vol_along_line(C, p.base, p.direction, pivot, check_base=False)
    if (lo is not None and p.t.compare(lo) <= 0) or (hi is not None and p.t.compare(hi) >= 0):
        raise BoundaryError("xi is not in the interior of the cone")
    return evaluate_rational_function(f, p.t)


def _line_forms(C: Cone, base: QVec, direction: QVec):
    for u in dual_cone(C).rays:
        yield dot(u, base), dot(u, direction)


def line_interval(C: Cone, base: Sequence, direction: Sequence) -> tuple[Optional[Fraction], Optional[Fraction]]:
    """Open interval of s with base + s*direction interior to C (None = unbounded)."""
    base, direction = _coords(base), _coords(direction)
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    for a, b in _line_forms(C, base, direction):
        if b > 0:
            lo = -a / b if lo is None else max(lo, -a / b)
        elif b < 0:
            hi = -a / b if hi is None else min(hi, -a / b)
        elif a <= 0:
            raise BoundaryError("line does not meet the interior of the cone")
    if lo is not None and hi is not None and lo >= hi:
        raise BoundaryError("line does not meet the interior of the cone")
    return lo, hi


def _piece_factors(piece: SimplicialPiece, base: QVec, direction: QVec) -> list[UniPoly]:
    return [UniPoly.linear(dot(u, base), dot(u, direction)) for u in piece.generators]


def vol_along_line(
    C: Cone, base: Sequence, direction: Sequence, pivot: str = "last", check_base: bool = True
) -> tuple[RationalFunction1D, tuple[Optional[Fraction], Optional[Fraction]]]:
    """s -> vol(base + s*direction) as an exact rational function, with its validity interval.

    With ``check_base=False`` the base may lie outside C as long as the line meets the interior.
    """
    base, direction = _coords(base), _coords(direction)
    if check_base and not C.is_interior(base):
        raise BoundaryError("base point is not interior to the cone")
    interval = line_interval(C, base, direction)
    total = RationalFunction1D(UniPoly())
    for piece in dual_pieces(C, pivot):
        den = UniPoly.const(1)
        for factor in _piece_factors(piece, base, direction):
            den = den * factor
        total = total + RationalFunction1D(UniPoly.const(piece.det_abs), den)
    return total, interval


def derivative_along_line(
    C: Cone, base: Sequence, direction: Sequence, w: Sequence, pivot: str = "last", check_base: bool = True
) -> RationalFunction1D:
    """s -> D_w vol at base + s*direction, for a fixed direction of differentiation w."""
    base, direction, w = _coords(base), _coords(direction), _coords(w)
    if check_base and not C.is_interior(base):
        raise BoundaryError("base point is not interior to the cone")
    line_interval(C, base, direction)
    total = RationalFunction1D(UniPoly())
    for piece in dual_pieces(C, pivot):
        factors = _piece_factors(piece, base, direction)
        den = UniPoly.const(1)
        for f in factors:
            den = den * f
        # d/dh det / prod(l_i + h <u_i, w>) at h = 0
        num = UniPoly()
        for i, u in enumerate(piece.generators):
            rest = UniPoly.const(1)
            for j, f in enumerate(factors):
                if j != i:
                    rest = rest * f
            num = num + rest * dot(u, w)
        total = total + RationalFunction1D(num * (-piece.det_abs), den * den)
    return total


def directional_derivative_at(C: Cone, xi: Sequence, v: Sequence, pivot: str = "last") -> Fraction:
    """Exact D_v vol(xi) at a rational interior point."""
    x, v = _coords(xi), _coords(v)
    total = Fraction(0)
    for piece in dual_pieces(C, pivot):
        vals = [dot(u, x) for u in piece.generators]
        if any(a <= 0 for a in vals):
            raise BoundaryError("xi is not in the interior of the cone")
        prod = Fraction(1)
        for a in vals:
            prod *= a
        total -= Fraction(piece.det_abs) / prod * sum(
            dot(u, v) / a for u, a in zip(piece.generators, vals)
        )
    return total


# ---------------------------------------------------------------- polyhedra


def _homogenize(vertices: Iterable[QVec], tail: Cone) -> list[IntVec]:
    gens = [lift(v, 1) for v in vertices]
    gens += [tuple(r) + (0,) for r in tail.rays]
    return gens


@dataclass(frozen=True)
class TailedPolyhedron:
    """conv(vertices) + tail, with ``vertices`` exactly the extreme points."""

    rank: int
    vertices: tuple[QVec, ...]
    tail: Cone

    @classmethod
    def from_points(cls, points: Iterable[Sequence], tail: Cone) -> "TailedPolyhedron":
        pts = [tuple(Fraction(x) for x in p) for p in points]
        if not pts:
            raise GeometryError("a polyhedron needs at least one point")
        n = tail.rank
        if any(len(p) != n for p in pts):
            raise GeometryError("point dimension does not match the tail cone")
        if not tail.pointed:
            raise NotPointedError("tail cones must be pointed")
        H = Cone.from_generators(_homogenize(set(pts), tail), n + 1)
        verts = sorted({tuple(Fraction(x, r[n]) for x in r[:n]) for r in H.rays if r[n] > 0})
        poly = cls(n, tuple(verts), tail)
        poly.__dict__["_homog"] = H
        return poly

    @classmethod
    def translate(cls, v: Sequence, tail: Cone) -> "TailedPolyhedron":
        return cls.from_points([v], tail)

    @classmethod
    def segment(cls, a: Sequence, b: Sequence, tail: Cone) -> "TailedPolyhedron":
        return cls.from_points([a, b], tail)

    @property
    def homogenization(self) -> Cone:
        if "_homog" not in self.__dict__:
            self.__dict__["_homog"] = Cone.from_generators(_homogenize(self.vertices, self.tail), self.rank + 1)
        return self.__dict__["_homog"]

    def is_translated_tail(self) -> bool:
        return len(self.vertices) == 1

    def min_value(self, u: Sequence) -> Fraction:
        if any(dot(u, r) < 0 for r in self.tail.rays):
            raise UnboundedError("linear form is unbounded below on the polyhedron")
        return min(dot(u, v) for v in self.vertices)

    def contains_point(self, x: Sequence) -> bool:
        return self.homogenization.contains_point(tuple(Fraction(c) for c in x) + (Fraction(1),))

    def to_json(self) -> dict:
        return {
            "vertices": [[rational_string(c) for c in v] for v in self.vertices],
            "tail": self.tail.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict, tail: Optional[Cone] = None) -> "TailedPolyhedron":
        t = Cone.from_json(data["tail"]) if "tail" in data else tail
        if t is None:
            raise GeometryError("polyhedron without a tail cone")
        return cls.from_points([[Fraction(c) for c in v] for v in data["vertices"]], t)

    def __repr__(self) -> str:
        vs = ", ".join("(" + ", ".join(rational_string(c) for c in v) + ")" for v in self.vertices)
        return f"TailedPolyhedron([{vs}] + {self.tail!r})"


def minkowski_sum(P: TailedPolyhedron, Q: TailedPolyhedron) -> TailedPolyhedron:
    if P.rank != Q.rank:
        raise GeometryError("rank mismatch")
    if P.tail != Q.tail:
        raise GeometryError("Minkowski sum of polyhedra with different tail cones")
    pts = {tuple(a + b for a, b in zip(v, w)) for v in P.vertices for w in Q.vertices}
    return TailedPolyhedron.from_points(pts, P.tail)


def face_min(P: TailedPolyhedron, u: Sequence) -> TailedPolyhedron:
    """The face of P on which <u, .> attains its minimum."""
    m = P.min_value(u)
    verts = [v for v in P.vertices if dot(u, v) == m]
    tail = Cone.from_generators([r for r in P.tail.rays if dot(u, r) == 0], P.rank)
    return TailedPolyhedron.from_points(verts, tail)


def contains(P: TailedPolyhedron, Q: TailedPolyhedron) -> bool:
    if P.rank != Q.rank:
        raise GeometryError("rank mismatch")
    H = P.homogenization
    return all(H.contains_point(g) for g in _homogenize(Q.vertices, Q.tail))


def equals(P: TailedPolyhedron, Q: TailedPolyhedron) -> bool:
    return contains(P, Q) and contains(Q, P)


def cone_as_polyhedron(C: Cone) -> TailedPolyhedron:
    return TailedPolyhedron.from_points([[0] * C.rank], C)
