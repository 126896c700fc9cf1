"""Volume minimization over the Reeb cone and the K-stability test."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .exact import (
    AlgebraicNumber,
    RationalFunction1D,
    Scalar,
    UniPoly,
    dot,
    evaluate_rational_function,
    isolate_real_roots,
    nullspace,
    rational_roots,
    rational_string,
    sign_at,
    sturm_count,
)
from .geometry import (
    BoundaryError,
    Cone,
    LinePoint,
    NotPointedError,
    derivative_along_line,
    dual_cone,
    dual_pieces,
    line_interval,
    primitive,
    truncated_dual_volume,
    vol_along_line,
)
from .pdivisor import (
    GENERIC,
    CanonicalData,
    PolyhedralDivisor,
    admissible_points,
    canonical_data,
    degeneration_cone,
    degeneration_weight,
    fano_problems,
    toric_canonical_weight,
)

Target = Union[PolyhedralDivisor, Cone]
QVec = tuple[Fraction, ...]


class StabilityError(ValueError):
    pass


class NotFanoError(StabilityError):
    pass


class NoAdmissiblePointError(StabilityError):
    pass


class OracleBudgetError(StabilityError):
    pass


def _q(v: Sequence) -> QVec:
    return tuple(Fraction(x) for x in v)


def _scalar_json(x: Scalar):
    return x.to_json() if isinstance(x, AlgebraicNumber) else rational_string(x)


def _scalar_float(x: Scalar) -> float:
    return float(x)


# ------------------------------------------------------------------ volumes


def _volume_cones(D: PolyhedralDivisor) -> list[tuple[str, Cone]]:
    points, generic_ok = admissible_points(D)
    labels = points + ([GENERIC] if generic_ok else [])
    if not labels:
        raise NoAdmissiblePointError("the divisor has no admissible point")
    out = []
    for y in labels:
        C = degeneration_cone(D, y)
        if C.pointed:
            out.append((y, C))
    if not out:
        raise NoAdmissiblePointError("every admissible degeneration cone contains a line")
    return out


def _lift_point(p: LinePoint) -> LinePoint:
    return LinePoint(p.base + (Fraction(0),), p.direction + (Fraction(0),), p.t)


def _as_point(xi) -> LinePoint:
    if isinstance(xi, LinePoint):
        return xi
    if isinstance(xi, ReebField):
        return xi.point
    n = len(xi)
    return LinePoint.make(xi, [0] * n, 0)


def vol_pdiv(D: PolyhedralDivisor, xi) -> Scalar:
    """vol(xi) via the degeneration cones; every admissible choice must agree."""
    p = _as_point(xi)
    if p.is_rational and not D.tail.is_interior(p.rational_coordinates()):
        raise BoundaryError("xi is not in the interior of the tail cone")
    lifted = _lift_point(p)
    cones = _volume_cones(D)
    if p.is_rational:
        values = {y: truncated_dual_volume(C, lifted) for y, C in cones}
        first = next(iter(values.values()))
        if any(v != first for v in values.values()):
            raise AssertionError(f"volume depends on the admissible point: {values}")
        return first
    funcs = {y: vol_along_line(C, lifted.base, lifted.direction, check_base=False)[0] for y, C in cones}
    first = next(iter(funcs.values()))
    if any(f != first for f in funcs.values()):
        raise AssertionError("volume function depends on the admissible point")
    return truncated_dual_volume(cones[0][1], lifted)


def volume(X: Target, xi) -> Scalar:
    if isinstance(X, PolyhedralDivisor):
        return vol_pdiv(X, xi)
    return truncated_dual_volume(X, _as_point(xi))


def directional_derivative(C: Cone, xi, v: Sequence) -> Scalar:
    """Exact D_v vol at xi (rational or on a line with an algebraic parameter)."""
    p = _as_point(xi)
    g = derivative_along_line(C, p.base, p.direction, v, check_base=False)
    return evaluate_rational_function(g, p.t)


def futaki_projected(C: Cone, w: Sequence, xi_hat, v: Sequence) -> Scalar:
    """D_{-v_hat} vol(xi_hat) with v_hat = v - <w, v> xi_hat.

    Uses D_{xi} vol(xi) = -n vol(xi) to avoid differentiating along a moving direction.
    """
    p = _as_point(xi_hat)
    n = C.rank
    wv = dot(w, v)
    g = derivative_along_line(C, p.base, p.direction, v, check_base=False)
    f = vol_along_line(C, p.base, p.direction, check_base=False)[0]
    # D_{v_hat} = D_v - <w,v> D_xi = D_v + n <w,v> vol
    h = g + f * (n * wv)
    return evaluate_rational_function(-h, p.t)


# ------------------------------------------------------------------ oracle


def _max_points() -> int:
    return int(float(os.environ.get("KREEB_MAX_T", "1e6")))


def _column_ranges(ineqs: list[tuple[int, ...]], xi: QVec, T: Fraction, box_pts: np.ndarray):
    """For fixed leading coordinates, the integer range of the last coordinate.

    Constraints: <a, u> >= 0 for each a in ineqs and <xi, u> <= T.
    """
    rows = [(list(a), Fraction(0)) for a in ineqs] + [([-x for x in xi], -T)]
    lo = np.full(len(box_pts), -np.inf)
    hi = np.full(len(box_pts), np.inf)
    ok = np.ones(len(box_pts), dtype=bool)
    for a, b in rows:
        # sum_i a_i u_i >= b
        den = 1
        for c in a:
            den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
        den = den * Fraction(b).denominator // math.gcd(den, Fraction(b).denominator)
        ai = [int(Fraction(c) * den) for c in a]
        bi = int(b * den)
        head = box_pts @ np.array(ai[:-1], dtype=np.int64) if len(ai) > 1 else np.zeros(len(box_pts), np.int64)
        rest = bi - head
        last = ai[-1]
        if last > 0:
            lo = np.maximum(lo, -((-rest) // last))
        elif last < 0:
            hi = np.minimum(hi, np.floor_divide(-rest, -last))
        else:
            ok &= rest <= 0
    return lo, hi, ok


def _enumerate(ineqs, xi: QVec, T: Fraction, bounds: list[tuple[int, int]]):
    """Columns of lattice points in the truncated cone: leading coordinates and last-coordinate ranges."""
    n = len(xi)
    grids = [np.arange(a, b + 1, dtype=np.int64) for a, b in bounds[:-1]]
    if grids:
        mesh = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, n - 1)
    else:
        mesh = np.zeros((1, 0), dtype=np.int64)
    lo, hi, ok = _column_ranges(ineqs, xi, T, mesh)
    lo = np.where(np.isfinite(lo), lo, bounds[-1][0])
    hi = np.where(np.isfinite(hi), hi, bounds[-1][1])
    keep = ok & (hi >= lo)
    return mesh[keep], lo[keep].astype(np.int64), hi[keep].astype(np.int64)


def _bounds(dual: Cone, xi: QVec, T: Fraction) -> list[tuple[int, int]]:
    verts = [tuple(Fraction(0) for _ in xi)]
    for r in dual.rays:
        s = dot(r, xi)
        if s <= 0:
            raise BoundaryError("xi is not in the interior of the cone")
        verts.append(tuple(T * x / s for x in r))
    return [(math.floor(min(c)), math.ceil(max(c))) for c in zip(*verts)]


def vol_counting_oracle(X: Target, xi: Sequence, T) -> Fraction:
    """n! T^-n * sum of dim R_u over lattice points u with <u, xi> <= T."""
    xi, T = _q(xi), Fraction(T)
    if T <= 0:
        raise ValueError("T must be positive")
    tail = X.tail if isinstance(X, PolyhedralDivisor) else X
    dual = dual_cone(tail)
    bounds = _bounds(dual, xi, T)
    head, lo, hi = _enumerate(list(tail.rays), xi, T, bounds)
    total_points = int((hi - lo + 1).sum())
    if total_points > _max_points():
        raise OracleBudgetError(
            f"{total_points} lattice points exceed the cap {_max_points()} (set KREEB_MAX_T)"
        )
    if isinstance(X, Cone):
        n = X.rank
        count = total_points
    else:
        n = X.rank + 1
        count = 0
        reps = hi - lo + 1
        cols = np.repeat(head, reps, axis=0)
        offs = np.arange(total_points) - np.repeat(np.cumsum(reps) - reps, reps)
        last = np.repeat(lo, reps) + offs
        U = np.column_stack([cols, last])
        deg = np.zeros(total_points, dtype=np.int64)
        for _, P in X.support:
            vals = []
            for v in P.vertices:
                den = math.lcm(*(x.denominator for x in v))
                num = np.array([int(x * den) for x in v], dtype=np.int64)
                vals.append(np.floor_divide(U @ num, den))
            deg += np.min(np.stack(vals), axis=0)
        count = int(np.maximum(0, deg + 1).sum())
    return Fraction(math.factorial(n) * count) / T**n


# ------------------------------------------------------------------ Reeb fields


@dataclass(frozen=True)
class ReebField:
    """base + t*direction with <weight, base> = 1 and direction orthogonal to weight."""

    point: LinePoint
    weight: QVec
    certified: bool = True
    numeric: Optional[tuple[float, ...]] = None

    @property
    def regularity(self) -> str:
        if not self.certified:
            return "undecided"
        return "quasi-regular" if self.point.is_rational else "irregular"

    def coordinates(self) -> list[Scalar]:
        p = self.point
        if p.is_rational:
            return list(p.rational_coordinates())
        return [
            b if d == 0 else evaluate_rational_function(RationalFunction1D(UniPoly.linear(b, d)), p.t)
            for b, d in zip(p.base, p.direction)
        ]

    def approx(self) -> tuple[float, ...]:
        return self.numeric if not self.certified and self.numeric else self.point.approx()

    def to_json(self) -> dict:
        out = {
            "regularity": self.regularity,
            "normalization": {"weight": [rational_string(x) for x in self.weight], "pairing": "1"},
            "approx": [f"{x:.12g}" for x in self.approx()],
        }
        if self.certified:
            out["coordinates"] = [_scalar_json(x) for x in self.coordinates()]
            out["line"] = {
                "base": [rational_string(x) for x in self.point.base],
                "direction": [rational_string(x) for x in self.point.direction],
                "parameter": _scalar_json(self.point.t),
            }
        return out


def canonical_weight(X: Target) -> QVec:
    if isinstance(X, PolyhedralDivisor):
        problems = fano_problems(X)
        if problems:
            raise NotFanoError("; ".join(problems))
        return canonical_data(X).u
    if not X.pointed or not X.full_dimensional:
        raise NotFanoError("the cone must be pointed and full-dimensional")
    w = toric_canonical_weight(X)
    if w is None:
        raise NotFanoError("the cone is not Q-Gorenstein")
    return w


def _reeb_cone(X: Target) -> Cone:
    return X.tail if isinstance(X, PolyhedralDivisor) else X


def _volume_cone(X: Target) -> Cone:
    """The cone whose truncated dual computes vol, and the number of appended zeros."""
    if isinstance(X, PolyhedralDivisor):
        return _volume_cones(X)[0][1]
    return X


def _lift_vec(X: Target, v: Sequence) -> QVec:
    return _q(v) + ((Fraction(0),) if isinstance(X, PolyhedralDivisor) else ())


def _lift(X: Target, p: LinePoint) -> LinePoint:
    return _lift_point(p) if isinstance(X, PolyhedralDivisor) else p


def _orthogonal_basis(w: QVec) -> list[tuple[int, ...]]:
    den = math.lcm(*(x.denominator for x in w))
    return [tuple(v) for v in nullspace([[int(x * den) for x in w]], len(w))]


@dataclass(frozen=True)
class Slice:
    """The segment {<w, xi> = 1} inside the Reeb cone, for a rank-2 lattice."""

    base: QVec
    direction: tuple[int, ...]
    interval: tuple[Fraction, Fraction]

    def point(self, s) -> LinePoint:
        return LinePoint.make(self.base, self.direction, s)


def reeb_slice(X: Target, w: Optional[QVec] = None) -> Slice:
    w = canonical_weight(X) if w is None else _q(w)
    C = _reeb_cone(X)
    if C.rank != 2:
        raise StabilityError("the exact slice needs a rank-2 lattice")
    j = 1 if w[1] != 0 else 0
    base = tuple(Fraction(int(i == j)) / w[j] for i in range(2))
    den = math.lcm(w[0].denominator, w[1].denominator)
    direction = primitive([int(w[1] * den), -int(w[0] * den)])
    lo, hi = line_interval(C, base, direction)
    if lo is None or hi is None:
        raise NotFanoError("the canonical weight does not bound the Reeb cone slice")
    return Slice(base, direction, (lo, hi))


def slice_volume(X: Target, sl: Optional[Slice] = None) -> RationalFunction1D:
    sl = sl or reeb_slice(X)
    p = _lift(X, sl.point(0))
    return vol_along_line(_volume_cone(X), p.base, p.direction, check_base=False)[0]


def _minimize_slice(X: Target, w: QVec) -> ReebField:
    sl = reeb_slice(X, w)
    f = slice_volume(X, sl)
    num = f.derivative().num
    lo, hi = sl.interval
    if num.is_zero():
        raise StabilityError("volume is constant along the slice")
    count = sturm_count(num.squarefree_part(), lo, hi) - (1 if num(hi) == 0 else 0)
    if count != 1:
        raise StabilityError(f"expected one critical point on the slice, found {count}")
    (root,) = isolate_real_roots(num, (lo, hi))
    exact = [r for r in rational_roots(num) if lo < r < hi]
    t: Scalar = exact[0] if exact else root.refined_to(Fraction(1, 2**24))
    return ReebField(sl.point(t), w)


def _newton(C: Cone, w: QVec, tol: float = 1e-10, max_iter: int = 200) -> np.ndarray:
    pieces = dual_pieces(C)
    gens = [np.array(p.generators, dtype=float) for p in pieces]
    dets = np.array([p.det_abs for p in pieces], dtype=float)
    E = np.array(_orthogonal_basis(w), dtype=float).T
    dual_rays = np.array(dual_cone(C).rays, dtype=float)
    x = np.array([float(sum(c)) for c in zip(*C.rays)])
    x /= float(np.dot(np.array([float(a) for a in w]), x))

    def value_grad_hess(x):
        val, g, H = 0.0, np.zeros_like(x), np.zeros((len(x), len(x)))
        for U, d in zip(gens, dets):
            ls = U @ x
            V = d / np.prod(ls)
            A = U / ls[:, None]
            s = A.sum(axis=0)
            val += V
            g -= V * s
            H += V * (np.outer(s, s) + A.T @ A)
        return val, g, H

    for _ in range(max_iter):
        val, g, H = value_grad_hess(x)
        rg = E.T @ g
        if np.linalg.norm(rg) <= tol * max(1.0, abs(val)):
            break
        step = E @ np.linalg.solve(E.T @ H @ E, -rg)
        lam = 1.0
        while lam > 1e-12:
            y = x + lam * step
            if np.all(dual_rays @ y > 0) and value_grad_hess(y)[0] <= val:
                break
            lam /= 2
        x = x + lam * step
    return x


def _recover_rational(C: Cone, w: QVec, x: np.ndarray) -> Optional[QVec]:
    basis = _orthogonal_basis(w)
    for bound in (10, 100, 1000, 10**4, 10**5, 10**6):
        cand = [Fraction(float(c)).limit_denominator(bound) for c in x]
        s = dot(w, cand)
        if s <= 0:
            continue
        cand = tuple(c / s for c in cand)
        if not C.is_interior(cand):
            continue
        if all(directional_derivative(C, cand, v) == 0 for v in basis):
            return cand
    return None


def reeb_minimize(X: Target) -> ReebField:
    """The volume minimizer on {<w, xi> = 1}, exact whenever the slice is one-dimensional."""
    w = canonical_weight(X)
    C = _reeb_cone(X)
    if C.rank == 1:
        return ReebField(LinePoint.make([Fraction(1) / w[0]], [0], 0), w)
    if C.rank == 2:
        return _minimize_slice(X, w)
    x = _newton(C, w)
    exact = _recover_rational(C, w, x)
    if exact is not None:
        return ReebField(LinePoint.make(exact, [0] * len(exact), 0), w)
    return ReebField(LinePoint.make([0] * len(x), [0] * len(x), 0), w, certified=False, numeric=tuple(x))


# ------------------------------------------------------------------ K-stability


VERDICT_EXIT = {"K-stable": 0, "not K-stable": 1, "undecided-numeric": 3}

REDUCTION_NOTE = (
    "positivity on u_y-orthogonal directions with positive last coordinate is checked on the "
    "representative v' = e_last - c*(xi,0); the remaining direction (v,0) with v orthogonal to u "
    "has zero derivative by criticality, so linearity extends the sign to the whole half-plane"
)


@dataclass
class StabilityReport:
    kind: str
    canonical: Union[CanonicalData, QVec]
    minimizer: ReebField
    xi_source: str
    criticality: list[dict] = field(default_factory=list)
    degenerations: list[dict] = field(default_factory=list)
    verdict: str = "undecided-numeric"
    notes: list[str] = field(default_factory=list)

    @property
    def regularity(self) -> str:
        return self.minimizer.regularity

    @property
    def exit_code(self) -> int:
        return VERDICT_EXIT[self.verdict]

    def to_json(self) -> dict:
        can = self.canonical.to_json() if isinstance(self.canonical, CanonicalData) else {
            "u": [rational_string(x) for x in self.canonical]
        }
        return {
            "kind": self.kind,
            "canonical": can,
            "minimizer": self.minimizer.to_json(),
            "xi_source": self.xi_source,
            "regularity": self.regularity,
            "criticality_witnesses": self.criticality,
            "degeneration_checks": self.degenerations,
            "verdict": self.verdict,
            "notes": self.notes,
        }


def _value_entry(g: RationalFunction1D, t: Scalar) -> tuple[int, dict]:
    sgn = sign_at(g, t)
    val = Fraction(0) if sgn == 0 else evaluate_rational_function(g, t)
    return sgn, {"sign": sgn, "value": _scalar_json(val), "approx": f"{_scalar_float(val):.12g}"}


def kstability_test(X: Target, xi: Optional[Sequence] = None) -> StabilityReport:
    w = canonical_weight(X)
    C = _reeb_cone(X)
    if xi is None:
        field_ = reeb_minimize(X)
        source = "minimizer"
    else:
        x = _q(xi)
        s = dot(w, x)
        if s <= 0 or not C.is_interior(x):
            raise BoundaryError("xi is not in the Reeb cone")
        x = tuple(c / s for c in x)
        field_ = ReebField(LinePoint.make(x, [0] * len(x), 0), w)
        source = "given"
    kind = "pdivisor" if isinstance(X, PolyhedralDivisor) else "toric"
    report = StabilityReport(kind, canonical_data(X) if kind == "pdivisor" else w, field_, source)
    if not field_.certified:
        report.notes.append("minimizer found only numerically; no exact critical point recovered")
        report.verdict = "undecided-numeric"
        return report

    V = _volume_cone(X)
    p = _lift(X, field_.point)
    critical = True
    for v in _orthogonal_basis(w):
        g = derivative_along_line(V, p.base, p.direction, _lift_vec(X, v), check_base=False)
        sgn, entry = _value_entry(g, p.t)
        entry["direction"] = list(v)
        entry["exact_zero"] = sgn == 0
        report.criticality.append(entry)
        critical &= sgn == 0

    positive = True
    if isinstance(X, PolyhedralDivisor):
        report.notes.append(REDUCTION_NOTE)
        points, generic_ok = admissible_points(X)
        labels = points + ([GENERIC] if generic_ok else [])
        if not labels:
            raise NoAdmissiblePointError("the divisor has no admissible point")
        for y in labels:
            sigma = degeneration_cone(X, y)
            entry: dict = {"point": y, "cone": sigma.to_json()["rays"]}
            if not sigma.pointed:
                entry.update(trivial=True, sign=None)
                report.degenerations.append(entry)
                continue
            dw = degeneration_weight(X, y)
            c = dw.last
            n = sigma.rank
            e_last = tuple(Fraction(int(i == n - 1)) for i in range(n))
            g = derivative_along_line(sigma, p.base, p.direction, e_last, check_base=False)
            f = vol_along_line(sigma, p.base, p.direction, check_base=False)[0]
            # D_{e_last - c*(xi,0)} vol = D_{e_last} vol + c*n*vol by homogeneity
            h = g + f * (c * n)
            sgn, vals = _value_entry(h, p.t)
            entry.update(vals)
            entry.update(
                trivial=False,
                u_y=dw.to_json(),
                direction=f"e_{n} - ({rational_string(c)})*(xi,0)",
            )
            if not dw.remark_agrees:
                report.notes.append(
                    f"at {y}: solved last coordinate {rational_string(c)} differs from a_y+1 = "
                    f"{rational_string(dw.remark_last)}; the solved weight is used"
                )
            report.degenerations.append(entry)
            positive &= sgn > 0
    report.verdict = "K-stable" if critical and positive else "not K-stable"
    return report
