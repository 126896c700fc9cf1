import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kreeb.catalog import build_xk
from kreeb.exact import AlgebraicNumber, UniPoly, sturm_count
from kreeb.geometry import BoundaryError, Cone, primitive
from kreeb.pdivisor import GENERIC, degeneration_cone
from kreeb.stability import (
    OracleBudgetError,
    directional_derivative,
    futaki_projected,
    kstability_test,
    reeb_minimize,
    reeb_slice,
    slice_volume,
    vol_counting_oracle,
    vol_pdiv,
    volume,
)

from strategies import interior_point, simplicial_cones, transform

F = Fraction
X1 = build_xk(1)


def example_volume(k, x):
    return F(4, 15) * (30 * k * x + 45 * k + 4) / ((x + 1) ** 2 * (15 * k - 8 * x - 4))


def closed_form_x0(k):
    return (225 * k * k + math.sqrt(225 * k * k + 600 * k + 144) * (15 * k + 4) - 600 * k - 48) / (480 * k)


def closed_form_futaki_sigma0(k, x0):
    d = 15 * k - 8 * x0 - 4
    return ((24 * (15 * k + 4) * (3 * k - 4) - 8 * (15 * k + 4) * d) / (45 * d * d * (x0 + 1))
            + (72 * (15 * k + 4) - 20 * d) / (225 * d * (x0 + 1) ** 2) + 56 / (225 * (x0 + 1) ** 3))


# ---------------------------------------------------------------- volumes

def test_vol_pdiv_examples():
    assert vol_pdiv(X1, (0, 1)) == F(196, 165)
    assert vol_pdiv(X1, (1, 1)) == F(79, 45)
    assert vol_pdiv(X1, (0, 2)) == F(196, 165) / 8
    with pytest.raises(BoundaryError):
        vol_pdiv(X1, (-1, 1))


def test_y_independence_twenty_points():
    rng = random.Random(20240611)
    hi = F(11, 8)
    for _ in range(20):
        x = F(rng.randint(1, 999), 1000) * (hi + 1) - 1
        s = F(rng.randint(1, 50), 10)
        xi = (s * x, s)
        vals = {y: volume_at(y, xi) for y in ("0", "inf")}
        assert vals["0"] == vals["inf"] == vol_pdiv(X1, xi) == example_volume(1, x) / s**3


def volume_at(y, xi):
    from kreeb.geometry import truncated_dual_volume

    return truncated_dual_volume(degeneration_cone(X1, y), tuple(xi) + (0,))


@pytest.mark.parametrize("k", [1, 2, 4, 7])
def test_slice_volume_is_the_example_formula(k):
    f = slice_volume(build_xk(k))
    for x in (F(-1, 2), F(0), F(1, 7), F(1)):
        assert f(x) == example_volume(k, x)


# ---------------------------------------------------------------- oracle

def test_oracle_orthant():
    est = vol_counting_oracle(Cone.orthant(2), (1, 1), 200)
    assert est == F(2 * 201 * 202 // 2, 200**2)
    assert abs(float(est) - 1.01505) < 1e-5


def test_oracle_ignores_points_outside_the_cone():
    C = Cone.from_generators([(1, 0), (1, 2)])
    # dual is cut out by a >= 0 and a + 2b >= 0; a brute count over a box agrees
    T = 30
    brute = sum(1 for a in range(0, 71) for b in range(-40, 41)
                if a >= 0 and a + 2 * b >= 0 and a + b <= T)
    assert vol_counting_oracle(C, (1, 1), T) == F(2 * brute, T * T)


def test_oracle_budget(monkeypatch):
    monkeypatch.setenv("KREEB_MAX_T", "100")
    with pytest.raises(OracleBudgetError):
        vol_counting_oracle(Cone.orthant(3), (1, 1, 1), 50)


def test_oracle_x1_close():
    est = vol_counting_oracle(X1, (0, 1), 500)
    assert abs(est - F(196, 165)) / F(196, 165) < F(5, 100)


# ---------------------------------------------------------------- Futaki

C0 = degeneration_cone(X1, "0")
nonzero_vec = st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))


@settings(max_examples=100)
@given(st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7), nonzero_vec, nonzero_vec,
       st.fractions(F(-9, 10), F(13, 10), max_denominator=20))
def test_futaki_linearity(a, b, v, w, x):
    xi = (x, 1, 0)
    lhs = directional_derivative(C0, xi, tuple(a * p + b * q for p, q in zip(v, w)))
    assert lhs == a * directional_derivative(C0, xi, v) + b * directional_derivative(C0, xi, w)


def test_futaki_projected_zero_at_minimizer():
    C = Cone.from_generators([(1, 0), (1, 3)])
    w = (F(1), F(0))
    xi = reeb_minimize(C).point
    # the projection kills the xi-direction, and the orthogonal direction is critical
    assert futaki_projected(C, w, xi, (0, 1)) == 0
    assert futaki_projected(C, w, xi, xi.rational_coordinates()) == 0
    off = (F(1), F(1, 10))
    assert futaki_projected(C, w, off, (0, 1)) != 0


# ---------------------------------------------------------------- minimizer

def test_minimizer_k3_rational():
    field = reeb_minimize(build_xk(3))
    assert field.regularity == "quasi-regular"
    assert field.coordinates() == [F(34, 15), 1]


@pytest.mark.parametrize("k", [1, 5, 7, 9])
def test_minimizer_irrational_matches_closed_form(k):
    field = reeb_minimize(build_xk(k))
    assert field.regularity == "irregular"
    x, one = field.coordinates()
    assert one == 1 and isinstance(x, AlgebraicNumber)
    assert abs(float(x) - closed_form_x0(k)) < 1e-9
    assert not math.isqrt((15 * k + 20) ** 2 - 256) ** 2 == (15 * k + 20) ** 2 - 256


@pytest.mark.parametrize("k", range(1, 12))
def test_unique_critical_point(k):
    D = build_xk(k)
    sl = reeb_slice(D)
    num = slice_volume(D, sl).derivative().num
    lo, hi = sl.interval
    assert (lo, hi) == (-1, F(15 * k - 4, 8))
    assert sturm_count(num.squarefree_part(), lo, hi) == 1


def test_simplicial_toric_minimizer_examples():
    for C in (Cone.orthant(3), Cone.from_generators([(1, 0), (1, 3)]), Cone.from_generators([(1, 2), (3, -1)])):
        s = [sum(c) for c in zip(*C.rays)]
        x = reeb_minimize(C).coordinates()
        assert all(a * s[0] == b * x[0] for a, b in zip(x, s))


@settings(max_examples=30)
@given(simplicial_cones(2))
def test_simplicial_rank2_minimizer_on_ray(C):
    s = [sum(c) for c in zip(*C.rays)]
    field = reeb_minimize(C)
    assert field.regularity == "quasi-regular"
    x = field.coordinates()
    assert x[0] * s[1] == x[1] * s[0]


@settings(max_examples=30)
@given(st.integers(1, 6), st.sampled_from([((1, 1), (0, 1)), ((1, 0), (2, 1)), ((0, 1), (1, 0)), ((2, 1), (1, 1))]))
def test_argmin_covariance(k, A):
    D = build_xk(k)
    TD = transform(D, A)
    x = reeb_minimize(D).approx()
    y = reeb_minimize(TD).approx()
    mapped = [A[i][0] * x[0] + A[i][1] * x[1] for i in range(2)]
    assert abs(mapped[0] * y[1] - mapped[1] * y[0]) < 1e-9 * max(1.0, abs(y[0]) + abs(y[1])) * (abs(mapped[0]) + abs(mapped[1]))


def test_rank3_non_simplicial_numeric_or_exact():
    square = Cone.from_generators([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)])
    field = reeb_minimize(square)
    assert field.certified and field.coordinates() == [0, 0, 1]


# ---------------------------------------------------------------- K-stability

@pytest.mark.parametrize("k", [1, 3, 5, 7, 9])
def test_kstable_xk(k):
    rep = kstability_test(build_xk(k))
    assert rep.verdict == "K-stable" and rep.exit_code == 0
    assert all(c["exact_zero"] for c in rep.criticality)
    assert [d["point"] for d in rep.degenerations] == ["0", "inf"]
    assert all(d["sign"] == 1 for d in rep.degenerations)


@pytest.mark.parametrize("k", [1, 3, 5])
def test_futaki_sigma0_matches_closed_form(k):
    rep = kstability_test(build_xk(k))
    x0 = float(reeb_minimize(build_xk(k)).coordinates()[0])
    got = float(rep.degenerations[0]["approx"])
    assert math.isclose(got, closed_form_futaki_sigma0(k, x0), rel_tol=1e-9)


def test_not_kstable_off_minimizer():
    rep = kstability_test(X1, (0, 1))
    assert rep.verdict == "not K-stable" and rep.exit_code == 1
    assert not rep.criticality[0]["exact_zero"]
    with pytest.raises(BoundaryError):
        kstability_test(X1, (-1, 1))


def test_toric_kstable_iff_on_the_ray():
    C = Cone.from_generators([(1, 2), (3, -1)])
    assert kstability_test(C).verdict == "K-stable"
    assert kstability_test(C, (4, 1)).verdict == "K-stable"
    assert kstability_test(C, (4, F(11, 10))).verdict == "not K-stable"


def test_report_records_remark_discrepancy():
    rep = kstability_test(X1)
    assert any("a_y+1" in n for n in rep.notes)
    assert rep.to_json()["verdict"] == "K-stable"
    assert GENERIC not in [d["point"] for d in rep.degenerations]


def test_interior_point_helper_is_interior():
    C = Cone.from_generators([(1, 0, 0), (1, 2, 0), (0, 1, 3)])
    assert C.is_interior(interior_point(C))
    assert primitive((3, 6, 9)) == (1, 2, 3)
    assert UniPoly([0, 1])(F(1, 2)) == F(1, 2)
