"""Polyhedral divisors on the projective line and their singularity checks."""

from __future__ import annotations

import functools
import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .exact import dot, extends_to_basis, gcd_maximal_minors, rational_string, solve_linear_unique
from .geometry import (
    Cone,
    GeometryError,
    NotPointedError,
    TailedPolyhedron,
    UnboundedError,
    contains,
    dual_cone,
    equals,
    lift,
    minkowski_sum,
    primitive,
    vertex_multiplicity,
)

GENERIC = "*generic*"


class DivisorError(ValueError):
    pass


class InadmissibleError(DivisorError):
    pass


@dataclass(frozen=True)
class BasePoint:
    label: str
    coordinate: Optional[Union[Fraction, str]] = None

    def to_json(self) -> dict:
        out: dict = {"label": self.label}
        if isinstance(self.coordinate, Fraction):
            out["coordinate"] = rational_string(self.coordinate)
        elif self.coordinate is not None:
            out["coordinate"] = self.coordinate
        return out


def _is_integral(v: Sequence[Fraction]) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


@dataclass(frozen=True)
class PolyhedralDivisor:
    rank: int
    tail: Cone
    support: tuple[tuple[BasePoint, TailedPolyhedron], ...]

    def __post_init__(self):
        labels = [p.label for p, _ in self.support]
        if len(set(labels)) != len(labels):
            raise DivisorError("base point labels must be unique")
        if GENERIC in labels:
            raise DivisorError(f"label {GENERIC!r} is reserved")
        if self.tail.rank != self.rank:
            raise DivisorError("tail rank mismatch")
        if not self.tail.pointed or not self.tail.full_dimensional:
            raise DivisorError("the tail cone must be pointed and full-dimensional")
        for p, P in self.support:
            if P.tail != self.tail:
                raise DivisorError(f"coefficient at {p.label} has a different tail cone")

    @classmethod
    def build(
        cls, tail: Cone, coefficients: Iterable[tuple[Union[str, BasePoint], TailedPolyhedron]]
    ) -> "PolyhedralDivisor":
        """Drop trivial coefficients (the bare tail cone) while building."""
        support = []
        for point, P in coefficients:
            if isinstance(point, str):
                point = BasePoint(point)
            if P.tail == tail and P.vertices == (tuple(Fraction(0) for _ in range(tail.rank)),):
                continue
            support.append((point, P))
        return cls(tail.rank, tail, tuple(support))

    @property
    def labels(self) -> list[str]:
        return [p.label for p, _ in self.support]

    def coefficient(self, label: str) -> TailedPolyhedron:
        for p, P in self.support:
            if p.label == label:
                return P
        if label == GENERIC:
            return TailedPolyhedron.translate([0] * self.rank, self.tail)
        raise KeyError(label)

    def to_json(self) -> dict:
        return {
            "type": "pdivisor",
            "rank": self.rank,
            "tail": self.tail.to_json(),
            "support": [dict(p.to_json(), coefficient=P.to_json()) for p, P in self.support],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PolyhedralDivisor":
        rank = int(data["rank"])
        tail = Cone.from_json(data["tail"])
        if tail.rank != rank:
            raise DivisorError("tail rank does not match the divisor rank")
        coeffs = []
        for entry in data.get("support", []):
            coord = entry.get("coordinate")
            if coord is not None:
                try:
                    coord = Fraction(coord)
                except (ValueError, TypeError):
                    coord = str(coord)
            P = TailedPolyhedron.from_json(entry["coefficient"], tail)
            coeffs.append((BasePoint(str(entry["label"]), coord), P))
        return cls.build(tail, coeffs)


@dataclass(frozen=True)
class CanonicalData:
    u: tuple[Fraction, ...]
    a: dict[str, Fraction]

    def to_json(self) -> dict:
        return {
            "u": [rational_string(x) for x in self.u],
            "a": {k: rational_string(v) for k, v in self.a.items()},
        }


def evaluate(D: PolyhedralDivisor, u: Sequence) -> list[tuple[BasePoint, Fraction]]:
    if any(dot(u, r) < 0 for r in D.tail.rays):
        raise UnboundedError("u is not in the dual of the tail cone")
    return [(p, P.min_value(u)) for p, P in D.support]


def _sum_polyhedra(polys: Sequence[TailedPolyhedron], tail: Cone) -> TailedPolyhedron:
    """Minkowski sum; m equal summands collapse to the dilation mP, which is exact for convex sets."""
    total = TailedPolyhedron.translate([0] * tail.rank, tail)
    for P, m in Counter(polys).items():
        scaled = TailedPolyhedron(P.rank, tuple(tuple(m * x for x in v) for v in P.vertices), P.tail)
        total = minkowski_sum(total, scaled)
    return total


@functools.lru_cache(maxsize=256)
def degree(D: PolyhedralDivisor) -> TailedPolyhedron:
    return _sum_polyhedra([P for _, P in D.support], D.tail)


def is_proper(D: PolyhedralDivisor) -> bool:
    """deg(D) is a proper subset of the tail cone."""
    deg = degree(D)
    tail = TailedPolyhedron.translate([0] * D.rank, D.tail)
    return contains(tail, deg) and not equals(tail, deg)


def _ray_normal(D: PolyhedralDivisor, ray) -> tuple[int, ...]:
    """A weight in the dual tail cone whose orthogonal face of the tail is exactly ``ray``."""
    dual = dual_cone(D.tail)
    orth = [w for w in dual.rays if dot(w, ray) == 0]
    if not orth:
        raise GeometryError("ray is not an extreme ray of the tail cone")
    return tuple(sum(c) for c in zip(*orth))


def rays_meeting_degree(D: PolyhedralDivisor) -> dict[tuple[int, ...], bool]:
    """For every tail ray: does it intersect deg(D)? Assumes deg(D) lies in the tail."""
    deg = degree(D)
    return {r: deg.min_value(_ray_normal(D, r)) == 0 for r in D.tail.rays}


def canonical_data(D: PolyhedralDivisor) -> Optional[CanonicalData]:
    """Solve for the canonical weight u and the coefficients a_y, or None.

    With empty support the divisor carries no vertical data and the toric
    canonical weight of the tail cone is returned.
    """
    n = D.rank
    labels = D.labels
    if not labels:
        u = solve_linear_unique([list(r) for r in D.tail.rays], [1] * len(D.tail.rays))
        return CanonicalData(tuple(u), {}) if u is not None else None
    # a_y is fixed by the first vertex of D_y, leaving a system in u alone
    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    firsts = []
    for _, P in D.support:
        v0, *others = P.vertices
        c0 = _discrepancy(v0)
        firsts.append((v0, c0))
        for v in others:
            A.append([Fraction(x - y) for x, y in zip(v, v0)])
            b.append(c0 - _discrepancy(v))
    for r, meets in rays_meeting_degree(D).items():
        if not meets:
            A.append([Fraction(x) for x in r])
            b.append(Fraction(1))
    A.append([sum((v0[j] for v0, _ in firsts), Fraction(0)) for j in range(n)])
    b.append(2 - sum(c0 for _, c0 in firsts))
    u = solve_linear_unique(A, b)
    if u is None:
        return None
    a = {lab: dot(u, v0) + c0 for lab, (v0, c0) in zip(labels, firsts)}
    return CanonicalData(tuple(u), a)


def _discrepancy(v) -> Fraction:
    mu = vertex_multiplicity(v)
    return Fraction(mu - 1, mu)


def max_multiplicity(P: TailedPolyhedron) -> int:
    return max(vertex_multiplicity(v) for v in P.vertices)


def log_terminal_sum(D: PolyhedralDivisor) -> Fraction:
    return sum((1 - Fraction(1, max_multiplicity(P)) for _, P in D.support), Fraction(0))


def is_log_terminal(D: PolyhedralDivisor) -> bool:
    return log_terminal_sum(D) < 2


def fano_problems(D: PolyhedralDivisor) -> list[str]:
    """Empty iff D is proper, Q-Gorenstein and log-terminal."""
    problems = []
    if not is_proper(D):
        problems.append("not proper: deg(D) is not a proper subset of the tail cone")
        return problems
    if canonical_data(D) is None:
        problems.append("not Q-Gorenstein: the canonical weight system has no unique solution")
    if not is_log_terminal(D):
        problems.append("not log-terminal")
    return problems


# --------------------------------------------------------------- isolatedness


def compact_edges(P: TailedPolyhedron) -> list[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]:
    """Bounded one-dimensional faces of a rank-2 polyhedron."""
    edges = []
    for v, w in itertools.combinations(P.vertices, 2):
        d = (w[0] - v[0], w[1] - v[1])
        for n in ((-d[1], d[0]), (d[1], -d[0])):
            if all(dot(n, r) > 0 for r in P.tail.rays) and all(dot(n, x) >= dot(n, v) for x in P.vertices):
                edges.append((v, w))
                break
    return edges


def _tail_normals(D: PolyhedralDivisor) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """(ray v_i, weight u_i with u_i orthogonal to v_i) for both tail rays."""
    return [(r, _ray_normal(D, r)) for r in D.tail.rays]


def facet_vertex(P: TailedPolyhedron, u: Sequence[int]) -> tuple[Fraction, ...]:
    m = P.min_value(u)
    (v,) = [x for x in P.vertices if dot(u, x) == m]
    return v


@dataclass
class IsolationReport:
    isolated: bool
    failed_condition: Optional[int] = None
    conditions: dict[int, list[dict]] = field(default_factory=lambda: {1: [], 2: [], 3: []})
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "isolated": self.isolated,
            "failed_condition": self.failed_condition,
            "conditions": {str(k): v for k, v in self.conditions.items()},
            "notes": self.notes,
        }


def _witness(vectors: list[tuple[int, ...]], **extra) -> dict:
    g = gcd_maximal_minors([list(v) for v in vectors])
    return dict(extra, vectors=[list(v) for v in vectors], gcd_minors=g, ok=g == 1)


def is_isolated(D: PolyhedralDivisor) -> IsolationReport:
    """Three-condition isolatedness criterion for rank-2 divisors on P^1."""
    if D.rank != 2:
        raise DivisorError("the isolatedness criterion needs a rank-2 divisor")
    if not is_proper(D):
        raise DivisorError("the isolatedness criterion needs a proper divisor")
    report = IsolationReport(isolated=True)
    report.notes.append(
        "condition 3 tries every ordered pair (z, z') covering the non-integral facet vertices"
    )

    def fail(cond: int):
        if report.isolated:
            report.isolated = False
            report.failed_condition = cond

    for p, P in D.support:
        for v, w in compact_edges(P):
            wit = _witness([lift(v, 1), lift(w, 1)], point=p.label)
            report.conditions[1].append(wit)
            if not wit["ok"]:
                fail(1)

    meets = rays_meeting_degree(D)
    for ray, u in _tail_normals(D):
        facet_vertices = {p.label: facet_vertex(P, u) for p, P in D.support}
        if not meets[ray]:
            for label, v in facet_vertices.items():
                wit = _witness([tuple(ray) + (0,), lift(v, 1)], point=label, ray=list(ray))
                report.conditions[2].append(wit)
                if not wit["ok"]:
                    fail(2)
            continue
        nonintegral = [lab for lab, v in facet_vertices.items() if not _is_integral(v)]
        entry: dict = {"ray": list(ray), "non_integral": nonintegral, "pairs": []}
        report.conditions[3].append(entry)
        if len(nonintegral) > 2:
            entry["ok"] = False
            fail(3)
            continue
        pool = list(facet_vertices) + [GENERIC]
        zero = tuple(Fraction(0) for _ in range(D.rank))
        ok = False
        for z, z2 in itertools.permutations(pool, 2):
            if not set(nonintegral) <= {z, z2}:
                continue
            vz = facet_vertices.get(z, zero)
            vz2 = facet_vertices.get(z2, zero)
            rest = [sum((v[i] for lab, v in facet_vertices.items() if lab != z), Fraction(0)) for i in range(2)]
            mu2 = vertex_multiplicity(vz2)
            second = tuple(int(x * mu2) for x in rest) + (mu2,)
            if any(Fraction(x).denominator != 1 for x in (Fraction(c) * mu2 for c in rest)):
                continue
            wit = _witness([lift(vz, 1), second], z=z, z_prime=z2)
            entry["pairs"].append(wit)
            if wit["ok"]:
                ok = True
                break
        entry["ok"] = ok
        if not ok:
            fail(3)
    return report


def qfactorial_isolated_form(D: PolyhedralDivisor) -> bool:
    if D.rank != 2:
        raise DivisorError("rank-2 divisors only")
    if len(D.support) != 3:
        return False
    segments = []
    translates = []
    for _, P in D.support:
        if len(P.vertices) == 1:
            translates.append(P)
        elif len(P.vertices) == 2:
            segments.append(P)
        else:
            return False
    if len(segments) != 1 or len(translates) != 2:
        return False
    v, w = segments[0].vertices
    if not (_is_integral(v) and _is_integral(w)):
        return False
    diff = [int(a - b) for a, b in zip(v, w)]
    if primitive(diff) != tuple(diff):
        return False
    if not is_proper(D):
        return False
    return all(rays_meeting_degree(D).values())


# --------------------------------------------------------------- degenerations


def admissible_points(D: PolyhedralDivisor) -> tuple[list[str], bool]:
    """Admissible support labels, and whether a generic point is admissible."""
    S = {p.label for p, P in D.support if not all(_is_integral(v) for v in P.vertices)}
    points = [lab for lab in D.labels if len(S - {lab}) <= 1]
    return points, len(S) <= 1


def degeneration_cone(D: PolyhedralDivisor, y: str) -> Cone:
    """Cone of the toric special fibre for the admissible choice y (GENERIC allowed)."""
    points, generic_ok = admissible_points(D)
    if y == GENERIC:
        if not generic_ok:
            raise InadmissibleError("a generic point is not admissible")
    elif y not in D.labels:
        raise InadmissibleError(f"unknown base point {y!r}")
    elif y not in points:
        raise InadmissibleError(f"base point {y!r} is not admissible")
    gens = [tuple(r) + (0,) for r in D.tail.rays]
    gens += [lift(v, 1) for v in D.coefficient(y).vertices]
    rest = _sum_polyhedra([P for p, P in D.support if p.label != y], D.tail)
    gens += [lift(v, -1) for v in rest.vertices]
    return Cone.from_generators(gens, D.rank + 1)


@dataclass(frozen=True)
class DegenerationWeight:
    weight: tuple[Fraction, ...]
    canonical_u: tuple[Fraction, ...]
    remark_last: Fraction
    first_block_matches: bool

    @property
    def last(self) -> Fraction:
        return self.weight[-1]

    @property
    def remark_agrees(self) -> bool:
        return self.weight[-1] == self.remark_last

    def to_json(self) -> dict:
        return {
            "weight": [rational_string(x) for x in self.weight],
            "first_block_matches_canonical_weight": self.first_block_matches,
            "remark_last_coordinate": rational_string(self.remark_last),
            "remark_agrees": self.remark_agrees,
        }


def toric_canonical_weight(C: Cone) -> Optional[tuple[Fraction, ...]]:
    sol = solve_linear_unique([list(r) for r in C.rays], [1] * len(C.rays))
    return tuple(sol) if sol is not None else None


def degeneration_weight(D: PolyhedralDivisor, y: str) -> DegenerationWeight:
    """Canonical weight of the degeneration cone, solved directly from its rays."""
    sigma = degeneration_cone(D, y)
    if not sigma.pointed:
        raise NotPointedError("trivial degeneration: the cone contains a line")
    w = toric_canonical_weight(sigma)
    if w is None:
        raise DivisorError("degeneration cone is not Q-Gorenstein")
    can = canonical_data(D)
    if can is None:
        raise DivisorError("divisor has no canonical weight")
    a_y = can.a.get(y, Fraction(0))
    return DegenerationWeight(w, can.u, a_y + 1, tuple(w[:-1]) == tuple(can.u))
