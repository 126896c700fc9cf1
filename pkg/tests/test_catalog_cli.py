import csv
import io as stdio
import json
from fractions import Fraction
from pathlib import Path

import pytest

from kreeb import io
from kreeb.catalog import SpecError, brieskorn_pham_catalog, build_xk
from kreeb.cli import main
from kreeb.geometry import Cone
from kreeb.stability import VERDICT_EXIT

FIXTURES = Path(__file__).parent.parent / "fixtures"


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", stdio.StringIO(stdin))
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def example_volume(k, x):
    return Fraction(4, 15) * (30 * k * x + 45 * k + 4) / ((x + 1) ** 2 * (15 * k - 8 * x - 4))


# ---------------------------------------------------------------- catalog

def test_build_xk():
    with pytest.raises(SpecError):
        build_xk(0)
    with pytest.raises(SpecError):
        build_xk(2, [1, 1])
    with pytest.raises(SpecError):
        build_xk(1, [0])
    D = build_xk(3)
    assert set(D.tail.rays) == {(-1, 1), (41, 8)}
    assert D.labels == ["0", "inf", "y1", "y2", "y3"]
    assert build_xk(2, [5, 7]).support[2][0].coordinate == 5


def test_brieskorn_pham_catalog():
    entries = brieskorn_pham_catalog()
    assert len(entries) == 4
    assert entries[0].ambient is None
    assert entries[1].check(p=2, q=3)
    assert not entries[1].check(p=2, q=2)
    with pytest.raises(SpecError):
        entries[1].check(p=2)


def test_fixtures_match_builder():
    for k in (1, 2, 3):
        with open(FIXTURES / f"x{k}.json", encoding="utf-8") as fh:
            assert io.load(fh) == build_xk(k)


def test_io_round_trip():
    for X in (build_xk(4), Cone.from_generators([(1, 2), (3, -1)])):
        assert io.from_json(json.loads(io.dumps(X))) == X
    with pytest.raises(io.SchemaError):
        io.from_json({"type": "mystery"})


# ---------------------------------------------------------------- CLI

def test_catalog_roundtrip_through_cli(capsys, monkeypatch):
    code, out, _ = run(capsys, "catalog", "xk", "--k", 1)
    assert code == 0
    code, out2, _ = run(capsys, "--json", "kstab", "-", stdin=out, monkeypatch=monkeypatch)
    data = json.loads(out2)
    assert code == 0 and data["verdict"] == "K-stable" and data["regularity"] == "irregular"


def test_catalog_listing(capsys):
    code, out, _ = run(capsys, "catalog", "brieskorn-pham")
    assert code == 0 and "(no equation)" in out and out.count("\n") == 4
    assert run(capsys, "catalog", "xk")[0] == 2
    assert run(capsys, "catalog", "xk", "--k", 0)[0] == 2


def test_reeb_k3(capsys):
    code, out, _ = run(capsys, "--json", "reeb", FIXTURES / "x3.json")
    data = json.loads(out)
    assert code == 0
    assert data["regularity"] == "quasi-regular"
    assert data["coordinates"][0] == "34/15"


def test_analyze_k2_not_isolated(capsys):
    code, out, _ = run(capsys, "--json", "analyze", FIXTURES / "x2.json")
    data = json.loads(out)
    assert code == 0
    assert data["isolated"]["isolated"] is False and data["isolated"]["failed_condition"] == 3
    assert data["admissible_points"] == ["0", "inf"]


def test_validate(capsys):
    assert run(capsys, "validate", FIXTURES / "improper.json")[0] == 2
    for name in ("x1", "x2", "x3", "qfactorial", "toric_orthant3", "toric_conifold", "toric_square", "toric_rank2"):
        assert run(capsys, "validate", FIXTURES / f"{name}.json")[0] == 0, name
    assert run(capsys, "analyze", FIXTURES / "improper.json")[0] == 2


def test_invalid_input(capsys, monkeypatch):
    code, _, err = run(capsys, "kstab", "-", stdin="{not json", monkeypatch=monkeypatch)
    assert code == 2 and err.startswith("error:")
    assert run(capsys, "kstab", FIXTURES / "missing.json")[0] == 2
    assert run(capsys, "kstab", FIXTURES / "x1.json", "--xi=-1,1")[0] == 2


@pytest.mark.parametrize("k", [1, 5])
def test_volcurve_matches_example_formula(tmp_path, capsys, monkeypatch, k):
    out = tmp_path / "curve.csv"
    fig = tmp_path / "curve.png"
    code, _, _ = run(capsys, "volcurve", "-", "--samples", 9, "--out", out, "--figure", fig,
                     stdin=io.dumps(build_xk(k)), monkeypatch=monkeypatch)
    assert code == 0
    rows = list(csv.DictReader(out.open(encoding="utf-8")))
    assert len(rows) == 9
    for row in rows:
        x = Fraction(row["x"])
        assert abs(float(row["vol"]) - float(example_volume(k, x))) < 1e-9 * max(1.0, float(row["vol"]))
    assert fig.stat().st_size > 1000 and fig.read_bytes()[:4] == b"\x89PNG"


def test_oracle_command(capsys):
    errors = []
    for T in (40, 80):
        code, out, _ = run(capsys, "--json", "oracle", FIXTURES / "toric_orthant3.json", "--xi", "1,1,1", "--T", T)
        assert code == 0
        errors.append(float(json.loads(out)["relative_error"]))
    assert errors[1] < errors[0] < 0.2


def test_topology_command(capsys):
    code, out, _ = run(capsys, "topology", FIXTURES / "x1.json")
    assert code == 0 and "1(S²×S³)" in out
    code, out, _ = run(capsys, "--json", "topology", FIXTURES / "x2.json")
    assert code == 0 and json.loads(out)["link"] is None


@pytest.mark.parametrize("name", ["x1", "x3", "qfactorial", "toric_orthant3", "toric_conifold", "toric_square",
                                  "toric_rank2"])
def test_exit_code_matches_json_verdict(capsys, name):
    code, out, _ = run(capsys, "kstab", FIXTURES / f"{name}.json", "--json")
    assert code == VERDICT_EXIT[json.loads(out)["verdict"]]
