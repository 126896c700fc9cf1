"""Command-line interface: ``kreeb <command> [file]``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import io
from .catalog import SpecError, brieskorn_pham_catalog, build_xk
from .exact import AlgebraicNumber, decimal_string, rational_string
from .geometry import Cone, GeometryError
from .pdivisor import (
    DivisorError,
    PolyhedralDivisor,
    admissible_points,
    canonical_data,
    degree,
    fano_problems,
    is_isolated,
    is_log_terminal,
    is_proper,
    log_terminal_sum,
    qfactorial_isolated_form,
)
from .stability import (
    StabilityError,
    canonical_weight,
    kstability_test,
    reeb_minimize,
    reeb_slice,
    slice_volume,
    vol_counting_oracle,
    volume,
)
from .topology import abelianization, class_group, link_report, pi1_presentation, tietze_trivial

EXIT_INVALID = 2


class UsageError(ValueError):
    pass


def _vector(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc


def _read(path: str):
    if path == "-":
        return io.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return io.load(fh)


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print("\n".join(lines))


def _fmt(x) -> str:
    if isinstance(x, AlgebraicNumber):
        return f"{x.approx(12)} (root of {x.poly.int_coeffs()} in [{rational_string(x.lo)}, {rational_string(x.hi)}])"
    return rational_string(x)


def cmd_validate(args) -> int:
    X = _read(args.file)
    if isinstance(X, PolyhedralDivisor):
        problems = fano_problems(X)
    else:
        try:
            canonical_weight(X)
            problems = []
        except StabilityError as exc:
            problems = [str(exc)]
    payload = {"valid": not problems, "problems": problems}
    _emit(args, payload, ["valid" if not problems else "invalid"] + [f"  {p}" for p in problems])
    return 0 if not problems else EXIT_INVALID


def cmd_analyze(args) -> int:
    X = _read(args.file)
    if isinstance(X, Cone):
        from .topology import toric_is_isolated

        w = canonical_weight(X)
        payload = {
            "kind": "toric",
            "rays": [list(r) for r in X.rays],
            "simplicial": X.is_simplicial,
            "canonical_weight": [rational_string(x) for x in w],
            "isolated": toric_is_isolated(X),
        }
        _emit(args, payload, [f"{k}: {v}" for k, v in payload.items()])
        return 0
    D = X
    proper = is_proper(D)
    payload: dict = {"kind": "pdivisor", "proper": proper, "degree": degree(D).to_json()}
    if not proper:
        _emit(args, payload, ["proper: False"])
        return EXIT_INVALID
    can = canonical_data(D)
    iso = is_isolated(D)
    points, generic_ok = admissible_points(D)
    payload.update(
        canonical=can.to_json() if can else None,
        log_terminal=is_log_terminal(D),
        log_terminal_sum=rational_string(log_terminal_sum(D)),
        isolated=iso.to_json(),
        qfactorial_isolated_form=qfactorial_isolated_form(D),
        admissible_points=points,
        generic_point_admissible=generic_ok,
        notes=["point coordinates are metadata: divisors differing only in point positions give identical reports"],
    )
    lines = [
        f"proper: True (deg = {degree(D)})",
        f"canonical weight: {can.to_json() if can else 'none'}",
        f"log-terminal: {payload['log_terminal']} (sum = {payload['log_terminal_sum']} < 2)",
        f"isolated: {iso.isolated}" + ("" if iso.isolated else f" (condition {iso.failed_condition} fails)"),
        f"Q-factorial isolated form: {payload['qfactorial_isolated_form']}",
        f"admissible points: {', '.join(points) or 'none'}; generic: {generic_ok}",
    ]
    _emit(args, payload, lines)
    return 0


def _xi_line(field) -> str:
    if field.certified:
        return f"xi = ({', '.join(_fmt(c) for c in field.coordinates())})"
    return f"xi ~ ({', '.join(f'{c:.12g}' for c in field.approx())})"


def cmd_reeb(args) -> int:
    X = _read(args.file)
    field = reeb_minimize(X)
    _emit(args, field.to_json(), [_xi_line(field), f"regularity: {field.regularity}"])
    return 0


def cmd_kstab(args) -> int:
    X = _read(args.file)
    rep = kstability_test(X, _vector(args.xi) if args.xi else None)
    lines = [f"verdict: {rep.verdict}", _xi_line(rep.minimizer), f"regularity: {rep.regularity}"]
    for c in rep.criticality:
        lines.append(f"criticality along {c['direction']}: {c['approx']} (exact zero: {c['exact_zero']})")
    for d in rep.degenerations:
        lines.append(f"degeneration at {d['point']}: " + ("trivial" if d["trivial"] else f"sign {d['sign']:+d}, {d['approx']}"))
    _emit(args, rep.to_json(), lines)
    return rep.exit_code


def cmd_topology(args) -> int:
    X = _read(args.file)
    if isinstance(X, Cone):
        rep = link_report(X)
        _emit(args, rep.to_json(), [f"H2 = {rep.h2}", f"pi1: {rep.pi1_status}", f"candidate: {rep.candidate}"])
        return 0
    h2 = class_group(X)
    P = pi1_presentation(X)
    payload = {"class_group": h2.to_json(), "presentation": P.to_json(),
               "pi1_abelianization": abelianization(P).to_json(), "pi1": tietze_trivial(P)}
    lines = [f"Cl = H2(link) = {h2}", f"pi1 abelianization = {abelianization(P)}", f"pi1: {payload['pi1']}"]
    if is_isolated(X).isolated:
        link = link_report(X)
        payload["link"] = link.to_json()
        lines.append(f"link: {link.identification or 'withheld (candidate ' + str(link.candidate) + ')'}")
    else:
        payload["link"] = None
        lines.append("link: not identified (singularity is not isolated)")
    _emit(args, payload, lines)
    return 0


def cmd_catalog(args) -> int:
    if args.family == "xk":
        if args.k is None:
            raise UsageError("catalog xk needs --k")
        pts = _vector(args.points) if args.points else None
        print(io.dumps(build_xk(args.k, pts)))
        return 0
    entries = brieskorn_pham_catalog()
    _emit(args, {"entries": [e.to_json() for e in entries]},
          [f"{i}. {e.name}: {e.ambient or '(no equation)'} -- {e.notes}" for i, e in enumerate(entries, 1)])
    return 0


def cmd_volcurve(args) -> int:
    X = _read(args.file)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    sl = reeb_slice(X)
    f = slice_volume(X, sl)
    lo, hi = sl.interval
    xs = [lo + (hi - lo) * Fraction(i, args.samples + 1) for i in range(1, args.samples + 1)]
    vols = [f(x) for x in xs]
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out != "-" else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["x", "vol"])
        for x, v in zip(xs, vols):
            w.writerow([decimal_string(x, 12), decimal_string(v, 12)])
    finally:
        if out is not sys.stdout:
            out.close()
    if args.figure:
        from .plotting import volume_curve_figure

        xi = reeb_minimize(X)
        t = float(xi.point.t)
        volume_curve_figure([float(x) for x in xs], [float(v) for v in vols], args.figure, t,
                            title=f"volume on the Reeb slice ({xi.regularity})")
    return 0


def cmd_oracle(args) -> int:
    X = _read(args.file)
    xi = _vector(args.xi)
    est = vol_counting_oracle(X, xi, Fraction(args.T))
    exact = volume(X, xi)
    rel = abs(est - exact) / exact
    payload = {"estimate": rational_string(est), "estimate_decimal": decimal_string(est),
               "exact": _fmt(exact), "relative_error": decimal_string(rel, 6)}
    _emit(args, payload, [f"estimate {decimal_string(est)} vs exact {_fmt(exact)} (relative error {decimal_string(rel, 4)})"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kreeb", description="Exact K-stability and Reeb-field computations.")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(name: str, fn, help_: str):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", nargs="?", default="-", help="input JSON (default: stdin)")
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        p.set_defaults(fn=fn)
        return p

    with_file("validate", cmd_validate, "schema, properness and Fano checks")
    with_file("analyze", cmd_analyze, "canonical data, isolatedness, admissible points")
    with_file("reeb", cmd_reeb, "volume-minimizing Reeb field and its regularity")
    p = with_file("kstab", cmd_kstab, "K-stability report")
    p.add_argument("--xi", help="comma-separated Reeb field (default: the minimizer)")
    with_file("topology", cmd_topology, "class group, fundamental group, link")
    p = with_file("volcurve", cmd_volcurve, "sample the slice volume to CSV")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--out", default="-")
    p.add_argument("--figure", help="also render a PNG plot to this path")
    p = with_file("oracle", cmd_oracle, "lattice-point counting estimate of the volume")
    p.add_argument("--xi", required=True)
    p.add_argument("--T", required=True)

    p = sub.add_parser("catalog", help="built-in families and reference data")
    p.add_argument("family", choices=["xk", "brieskorn-pham"])
    p.add_argument("--k", type=int)
    p.add_argument("--points", help="comma-separated coordinates of y1..yk")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(fn=cmd_catalog)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (io.SchemaError, DivisorError, GeometryError, StabilityError, SpecError, UsageError,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
