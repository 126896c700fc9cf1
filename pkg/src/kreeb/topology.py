"""Class groups, fundamental-group presentations and link identification."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Union

from .exact import extends_to_basis, invariant_factors
from .geometry import Cone, vertex_multiplicity
from .pdivisor import PolyhedralDivisor, is_isolated, is_proper, rays_meeting_degree

Word = tuple[int, ...]


@dataclass(frozen=True)
class AbelianGroup:
    free_rank: int
    torsion: tuple[int, ...] = ()

    @classmethod
    def cokernel(cls, relations: list[list[int]], n_generators: int) -> "AbelianGroup":
        """Z^n modulo the row span of ``relations``."""
        if not relations or n_generators == 0:
            return cls(n_generators)
        d = [x for x in invariant_factors(relations) if x != 0]
        return cls(n_generators - len(d), tuple(x for x in d if x > 1))

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def torsion_free(self) -> bool:
        return not self.torsion

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = ([f"Z^{self.free_rank}"] if self.free_rank else []) + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


# ------------------------------------------------------------------ class groups


def toric_class_group(C: Cone) -> AbelianGroup:
    rays = list(C.rays)
    relations = [[r[i] for r in rays] for i in range(C.rank)]
    return AbelianGroup.cokernel(relations, len(rays))


def class_group(X: Union[PolyhedralDivisor, Cone]) -> AbelianGroup:
    """Divisor class group; vertical prime divisors per vertex, horizontal ones per ray missing deg."""
    if isinstance(X, Cone):
        return toric_class_group(X)
    D = X
    if D.rank != 2:
        raise ValueError("class groups are implemented for rank-2 divisors")
    if not is_proper(D):
        raise ValueError("the divisor is not proper")
    rays = [r for r, meets in rays_meeting_degree(D).items() if not meets]
    verts = [(i, v) for i, (_, P) in enumerate(D.support) for v in P.vertices]
    ncols = len(rays) + len(verts)
    relations = []
    for e in range(D.rank):
        row = [r[e] for r in rays]
        row += [int(vertex_multiplicity(v) * v[e]) for _, v in verts]
        relations.append(row)
    for y in range(1, len(D.support)):
        row = [0] * ncols
        for j, (i, v) in enumerate(verts):
            if i == y:
                row[len(rays) + j] += vertex_multiplicity(v)
            elif i == 0:
                row[len(rays) + j] -= vertex_multiplicity(v)
        relations.append(row)
    return AbelianGroup.cokernel(relations, ncols)


# ------------------------------------------------------------------ presentations


@dataclass(frozen=True)
class GroupPresentation:
    """Generators are numbered from 1; a word is a tuple of signed generator indices."""

    generators: tuple[str, ...]
    relators: tuple[Word, ...]
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.generators)
        for w in self.relators:
            if any(x == 0 or abs(x) > n for x in w):
                raise ValueError(f"relator {w} names a missing generator")

    def word_str(self, w: Word) -> str:
        if not w:
            return "1"
        out, i = [], 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            name = self.generators[abs(w[i]) - 1]
            e = (j - i) * (1 if w[i] > 0 else -1)
            out.append(name if e == 1 else f"{name}^{e}")
            i = j
        return " ".join(out)

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relators": [list(w) for w in self.relators],
            "relators_readable": [self.word_str(w) for w in self.relators],
            "notes": list(self.notes),
        }


def _power(g: int, e: int) -> Word:
    return (g,) * e if e >= 0 else (-g,) * (-e)


def _commutator(a: int, b: int) -> Word:
    return (a, b, -a, -b)


def pi1_presentation(D: PolyhedralDivisor) -> GroupPresentation:
    if D.rank != 2:
        raise ValueError("presentations are implemented for rank-2 divisors")
    if not is_proper(D):
        raise ValueError("the divisor is not proper")
    names = [f"b_{lab}" for lab in D.labels] + ["t1", "t2"]
    m = len(D.support)
    t1, t2 = m + 1, m + 2
    rel: list[Word] = [tuple(range(1, m + 1))]
    rel += [_commutator(i, t) for i in range(1, m + 1) for t in (t1, t2)]
    rel.append(_commutator(t1, t2))
    for r in D.tail.rays:
        rel.append(_power(t1, r[0]) + _power(t2, r[1]))
    for i, (_, P) in enumerate(D.support, start=1):
        for v in P.vertices:
            mu = vertex_multiplicity(v)
            a, b = (int(mu * x) for x in v)
            rel.append(_power(t1, a) + _power(t2, b) + _power(i, mu))
    notes = ("tail-ray relators are emitted for both rays, following the worked family",)
    return GroupPresentation(tuple(names), tuple(w for w in rel if w), notes)


def abelianization(P: GroupPresentation) -> AbelianGroup:
    n = len(P.generators)
    rows = []
    for w in P.relators:
        row = [0] * n
        for x in w:
            row[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(row)
    return AbelianGroup.cokernel([r for r in rows if any(r)], n)


def _reduce(w: Word) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    # cyclic reduction: relators are only defined up to conjugacy
    i, j = 0, len(out)
    while j - i >= 2 and out[i] == -out[j - 1]:
        i, j = i + 1, j - 1
    return tuple(out[i:j])


def _inverse(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def _substitute(w: Word, g: int, image: Word) -> Word:
    out: list[int] = []
    for x in w:
        if x == g:
            out.extend(image)
        elif x == -g:
            out.extend(_inverse(image))
        else:
            out.append(x)
    return tuple(out)


def _pure_power(w: Word) -> Optional[tuple[int, int]]:
    g = abs(w[0])
    if all(abs(x) == g for x in w):
        return g, sum(1 if x > 0 else -1 for x in w)
    return None


def tietze_trivial(P: GroupPresentation, trace: Optional[list[str]] = None) -> str:
    """One-sided triviality certificate by greedy elimination: never claims a group is nontrivial."""
    alive = set(range(1, len(P.generators) + 1))
    rels = {_reduce(w) for w in P.relators} - {()}

    def log(msg: str):
        if trace is not None:
            trace.append(msg)

    while alive:
        step = None
        for w in sorted(rels, key=len):
            if len(w) == 1:
                step = (abs(w[0]), ())
                break
            if len(w) == 2 and abs(w[0]) != abs(w[1]):
                g, h = w
                # g h = 1  =>  g = h^-1
                image = (-h,) if g > 0 else (h,)
                step = (abs(g), image)
                break
        if step is None:
            powers: dict[int, int] = {}
            for w in rels:
                pp = _pure_power(w)
                if pp:
                    g, e = pp
                    powers[g] = gcd(powers.get(g, 0), e)
            unit = [g for g, e in powers.items() if e == 1]
            if unit:
                step = (unit[0], ())
            else:
                changed = False
                for g, e in powers.items():
                    new = {w for w in rels if not (_pure_power(w) and _pure_power(w)[0] == g)}
                    new.add((g,) * e)
                    if new != rels:
                        rels, changed = new, True
                if not changed:
                    break
                continue
        g, image = step
        log(f"{P.generators[g - 1]} = " + (P.word_str(image) if image else "1"))
        alive.discard(g)
        rels = {_reduce(_substitute(w, g, image)) for w in rels} - {()}
    return "certified-trivial" if not alive else "unknown"


# ------------------------------------------------------------------ links


def toric_is_isolated(C: Cone) -> bool:
    """Every proper face is smooth, i.e. every facet is simplicial and unimodular."""
    for rays in C.facet_rays():
        if len(rays) != C.rank - 1 or not extends_to_basis([list(r) for r in rays], C.rank):
            return False
    return True


def toric_pi1(C: Cone) -> AbelianGroup:
    """N modulo the sublattice spanned by the rays."""
    return AbelianGroup.cokernel([list(r) for r in C.rays], C.rank)


@dataclass
class LinkReport:
    h2: AbelianGroup
    pi1_abelianization: AbelianGroup
    pi1_status: str
    verdict: Optional[str]
    identification: Optional[str]
    candidate: Optional[str]
    presentation: Optional[GroupPresentation] = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "H2": self.h2.to_json(),
            "pi1_abelianization": self.pi1_abelianization.to_json(),
            "pi1": self.pi1_status,
            "kstability_verdict": self.verdict,
            "identification": self.identification,
            "candidate": self.candidate,
            "notes": self.notes,
        }
        if self.presentation is not None:
            out["presentation"] = self.presentation.to_json()
        return out


def smale_barden_name(k: int) -> str:
    return "S⁵" if k == 0 else f"{k}(S²×S³)"


def link_report(X: Union[PolyhedralDivisor, Cone], verdict: Optional[str] = None) -> LinkReport:
    """H^2 of the link, pi_1 status, and the simply-connected 5-manifold it must be.

    ``verdict`` is the K-stability verdict if already known; otherwise it is computed.
    """
    from .stability import kstability_test

    if isinstance(X, Cone):
        if not toric_is_isolated(X):
            raise ValueError("the cone singularity is not isolated")
        h2 = toric_class_group(X)
        pi1 = toric_pi1(X)
        status = "certified-trivial" if pi1.is_trivial else "unknown"
        cand = smale_barden_name(h2.free_rank) if X.rank == 3 and status != "unknown" and h2.torsion_free else None
        return LinkReport(
            h2, pi1, status, verdict, None, cand,
            notes=["toric input: topology only, no Sasaki-Einstein identification is made"],
        )
    report = is_isolated(X)
    if not report.isolated:
        raise ValueError(f"the singularity is not isolated (condition {report.failed_condition} fails)")
    h2 = class_group(X)
    P = pi1_presentation(X)
    trace: list[str] = []
    status = tietze_trivial(P, trace)
    ab = abelianization(P)
    if verdict is None:
        verdict = kstability_test(X).verdict
    name = smale_barden_name(h2.free_rank) if h2.torsion_free else None
    notes = ["elimination: " + "; ".join(trace)] if trace else []
    ok = status == "certified-trivial" and h2.torsion_free and verdict == "K-stable"
    if not ok:
        notes.append("identification withheld: needs certified trivial pi_1, torsion-free H^2 and a K-stable verdict")
    return LinkReport(h2, ab, status, verdict, name if ok else None, name, P, notes)
