"""Command-line experiment driver.

Each subcommand prints a table (JSON array of row objects, or CSV) and
exits 0 when every checked row passes, 1 when an invariant fails and 2 on
usage or input errors.  Output for a given configuration is byte-identical
across runs.

Examples::

    drury-arveson relations --d 2 --N 6
    drury-arveson extremal --d 2 --n-max 200 --format csv
    drury-arveson dilate tuple.json --N 20 --out dilate.json
    drury-arveson zeta --d 2 --p 3 --M 1000000
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Callable

import numpy as np

SCHEMA_VERSION = 1
DEFAULT_TOL = 1e-10


class InputError(Exception):
    """Bad input file or argument; reported with exit code 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    d: int | None
    N: int | None
    n_max: int | None
    tol: float
    out: str | None
    fmt: str

    def __post_init__(self):
        if self.tol <= 0:
            raise InputError("--tol must be positive")
        if self.d is not None and self.d < 1:
            raise InputError("--d must be >= 1")
        if self.fmt not in ("json", "csv"):
            raise InputError("--format must be json or csv")


def _row(anchor: str, passed: bool | None = None, **fields) -> dict:
    row = {"schema_version": SCHEMA_VERSION, "anchor": anchor}
    row.update(fields)
    if passed is not None:
        row["pass"] = bool(passed)
    return row


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (np.floating,)):
        return _clean(float(value))
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


# -- subcommands ---------------------------------------------------------------


def cmd_relations(args, cfg: ExperimentConfig) -> list[dict]:
    from .shift import build_basis, relation_residuals, shift_matrix

    if args.N < 2:
        raise InputError("relations needs --N >= 2 (the interior must contain degree >= 1)")
    basis = build_basis(args.d, args.N)
    res = relation_residuals(basis)
    tol = cfg.tol
    rows = []
    for name, value in res.items():
        if name.startswith("commutator"):
            rows.append(_row("d-shift commutator identity", value < tol, quantity=name, region="interior", value=value))
        elif name == "adjoint_sum":
            rows.append(_row("sum S_k^* S_k = (d+N)(1+N)^-1", value < tol, quantity=name, region="interior", value=value))
        elif name == "adjoint_sum_norm":
            rows.append(_row("||sum S_k^* S_k|| = d", abs(value - args.d) < tol, quantity=name, region="interior", value=value))
        elif name == "row_sum":
            rows.append(_row("sum S_k S_k^* = 1 - E_0", value < tol, quantity=name, region="full", value=value))
        elif name.startswith("hyponormal"):
            rows.append(_row("hyponormality S_k^* S_k >= S_k S_k^*", value >= -tol, quantity=name, region="interior", value=value))
        elif name.startswith("commuting"):
            rows.append(_row("shifts commute", value < tol, quantity=name, region="full", value=value))
    if args.d == 1:
        S = shift_matrix(0, basis).matrix
        inner = basis.upto(basis.N - 1)
        E0 = np.zeros_like(S)
        E0[0, 0] = 1.0
        value = float(np.linalg.norm((S.conj().T @ S - S @ S.conj().T - E0)[inner, inner], 2))
        rows.append(_row("d=1: self-commutator is E_0", value < tol, quantity="self_commutator_minus_E0", region="interior", value=value))
    return rows


def cmd_extremal(args, cfg: ExperimentConfig) -> list[dict]:
    from .extremal import ratio_growth

    if args.n_max < 1:
        raise InputError("--n-max must be >= 1")
    rows = []
    prev = 0.0
    for n in range(1, args.n_max + 1):
        g = ratio_growth(args.d, n)
        monotone = g.ratio >= prev * (1 - 1e-12)
        prev = g.ratio
        rows.append(
            _row(
                "||p^n||_H2 / ||p^n||_inf growth",
                monotone,
                d=args.d,
                n=n,
                ratio=g.ratio,
                asymptote=g.asymptote,
                relative=g.relative,
            )
        )
    return rows


def cmd_energy(args, cfg: ExperimentConfig) -> list[dict]:
    from .extremal import energy_shift

    if args.n_max < 1:
        raise InputError("--n-max must be >= 1")
    rows = []
    for n in range(1, args.n_max + 1):
        rep = energy_shift(args.d, n)
        ok = abs(rep.closed_form - rep.direct) <= cfg.tol * max(1.0, rep.closed_form) and rep.closed_form == rep.bound
        rows.append(_row("d-shift energy is maximal", ok, **rep.row()))
    return rows


def cmd_zeta(args, cfg: ExperimentConfig) -> list[dict]:
    from .zeta import convergence_verdict

    if args.p is None or args.p <= 0:
        raise InputError("--p must be given and positive")
    if args.M < 1:
        raise InputError("--M must be >= 1")
    rep = convergence_verdict(args.d, args.p, args.M)
    return [_row("trace (1+N)^-p finite iff p > d", None, **rep.row())]


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _load_tuple(path: str):
    from .dilation import DContractionError, parse_tuple, validate

    obj = _load_json(path)
    try:
        mats = parse_tuple(obj)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    try:
        return validate(mats)
    except DContractionError as exc:
        raise InputError(f"{path}: not a d-contraction: {exc}") from exc


def cmd_dilate(args, cfg: ExperimentConfig) -> list[dict]:
    from .dilation import a_infinity, build_L

    T = _load_tuple(args.input)
    res = build_L(T, args.N)
    null = a_infinity(T)
    tol = max(cfg.tol, 1e-9)
    s = res.summary()
    ok = res.norm_L <= 1 + tol and res.coisometry_residual <= res.tail_bound + tol
    return [_row("dilation L: ||L|| <= 1, 1 - LL^* = P^(N+1)(1)", ok, nullity=null.verdict, **s)]


def cmd_vn(args, cfg: ExperimentConfig) -> list[dict]:
    from .dilation import vn_check
    from .h2space import Poly

    T = _load_tuple(args.input)
    obj = _load_json(args.f)
    try:
        f = Poly.from_json(obj)
    except (KeyError, ValueError) as exc:
        raise InputError(f"{args.f}: {exc}") from exc
    if f.d != T.d:
        raise InputError(f"{args.f}: polynomial has d={f.d}, tuple has d={T.d}")
    if f.degree > args.N:
        raise InputError(f"{args.f}: degree {f.degree} exceeds --N {args.N}")
    rep = vn_check(T, f, args.N, assert_bound=args.assert_bound)
    passed = rep.holds if rep.asserted else None
    return [
        _row(
            "||f(T)|| <= multiplier norm of f",
            passed,
            lhs=rep.lhs,
            rhs=rep.rhs,
            rhs_half=rep.rhs_half,
            margin=rep.margin,
            asserted=rep.asserted,
            observed=rep.holds,
        )
    ]


def cmd_gram(args, cfg: ExperimentConfig) -> list[dict]:
    from .h2space import gram_matrix, h2_inner, kernel_poly
    from .numerics import min_eigenvalue_hermitian

    obj = _load_json(args.input)
    raw = obj["points"] if isinstance(obj, dict) and "points" in obj else obj
    points = []
    try:
        for i, p in enumerate(raw):
            points.append(np.array([complex(*z) if isinstance(z, list) else complex(z) for z in p]))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{args.input}: points[{len(points)}]: malformed coordinate") from exc
    try:
        G = gram_matrix(points, args.N)
    except ValueError as exc:
        raise InputError(f"{args.input}: {exc}") from exc
    lam = min_eigenvalue_hermitian(G)
    rows = [_row("kernel Gram matrix is PSD", lam >= -cfg.tol, count=len(points), min_eigenvalue=lam)]
    for i, x in enumerate(points):
        u, tail = kernel_poly(x, args.N)
        err = abs(h2_inner(u, u) - G[i, i])
        rows.append(_row("truncated kernel norm matches closed form", err <= tail + 1e-12, index=i, error=err, tail=tail))
    return rows


def run_selfcheck(max_degree: int = 5) -> list[dict]:
    """Exact oracle cross-check of the monomial norm formula."""
    from .fock import monomial_norm_sq, sym_project_oracle, word_for
    from .multiindex import enumerate_upto

    rows = []
    for d in (1, 2, 3):
        bad = 0
        total = 0
        for k in enumerate_upto(d, max_degree):
            total += 1
            if sym_project_oracle(word_for(k), d).norm_sq != monomial_norm_sq(k):
                bad += 1
        rows.append(_row("monomial norm = brute-force symmetrization", bad == 0, selfcheck=True, d=d, checked=total, mismatches=bad))
    return rows


# -- output ----------------------------------------------------------------------


def render(rows: list[dict], fmt: str) -> str:
    rows = [{k: _clean(v) for k, v in r.items()} for r in rows]
    if fmt == "json":
        return json.dumps(rows, indent=1, sort_keys=True) + "\n"
    fields: list[str] = []
    for r in rows:
        for k in r:
            if k not in fields:
                fields.append(k)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue()


def write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


COMMANDS: dict[str, Callable] = {
    "relations": cmd_relations,
    "extremal": cmd_extremal,
    "energy": cmd_energy,
    "zeta": cmd_zeta,
    "dilate": cmd_dilate,
    "vn": cmd_vn,
    "gram": cmd_gram,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="pass/fail tolerance")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="write the table here instead of stdout")
    common.add_argument("--selfcheck", action="store_true", help="run the exact oracle suite first")

    parser = argparse.ArgumentParser(prog="drury-arveson", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("relations", parents=[common], help="d-shift commutation relations")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, required=True)

    p = sub.add_parser("extremal", parents=[common], help="growth of ||p^n||_H2 / ||p^n||_inf")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-max", dest="n_max", type=int, required=True)

    p = sub.add_parser("energy", parents=[common], help="energy sequence of the d-shift")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-max", dest="n_max", type=int, required=True)

    p = sub.add_parser("zeta", parents=[common], help="trace of (1+N)^-p")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--M", type=int, default=10_000)

    p = sub.add_parser("dilate", parents=[common], help="build the dilation operator L")
    p.add_argument("input", help="d-contraction JSON file")
    p.add_argument("--N", type=int, required=True)

    p = sub.add_parser("vn", parents=[common], help="compare ||f(T)|| with the truncated multiplier norm")
    p.add_argument("input", help="d-contraction JSON file")
    p.add_argument("--f", required=True, help="polynomial JSON file")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--assert-bound", action="store_true", help="T is a shift compression at degree <= N")

    p = sub.add_parser("gram", parents=[common], help="kernel Gram matrix of points in the ball")
    p.add_argument("input", help="JSON list of points")
    p.add_argument("--N", type=int, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = ExperimentConfig(
            command=args.command,
            d=getattr(args, "d", None),
            N=getattr(args, "N", None),
            n_max=getattr(args, "n_max", None),
            tol=args.tol,
            out=args.out,
            fmt=args.fmt,
        )
        rows = run_selfcheck() if args.selfcheck else []
        if rows and not all(r["pass"] for r in rows):
            write_output(render(rows, cfg.fmt), cfg.out)
            return 1
        rows += COMMANDS[args.command](args, cfg)
    except InputError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    write_output(render(rows, cfg.fmt), cfg.out)
    return 0 if all(r.get("pass", True) for r in rows) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
