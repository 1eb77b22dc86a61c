"""Command-line front end: ``tau``, ``check``, ``hodge`` and ``strata``.

Exit codes: 0 when every check passes, 1 when one fails (or a numerical
routine gives up), 2 on usage or input errors.  Reports are JSON lines
with floats written to 17 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import traceback
from dataclasses import dataclass, fields

import numpy as np

from . import InconsistentDataError, NumericalError
from . import tau as T
from .combinatorics import SearchBudgetExceeded, enumerate_strata, stratum_realizable
from .hodge import check_d2_closed_form, genus0_k2_vector, hodge_table
from .hyperelliptic import HyperellipticCover, periods
from .rational import RationalCover
from .report import CheckReport, dumps

CHECKS = ("pde", "scaling", "euler", "psl2", "modular", "boundary")
REPORT_COLUMNS = ("check", "lhs", "rhs", "abs_err", "rel_err", "pass")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    quadrature_tol: float = 1e-10
    theta_tol: float = 1e-12
    fd_step: float = 1e-5
    contour_radius_factor: float = 0.1
    epsilon_grid: tuple = T.DEFAULT_EPS_GRID
    search_budget: int = 5_000_000
    format: str = "json"

    def __post_init__(self):
        for name in ("quadrature_tol", "theta_tol", "fd_step", "contour_radius_factor"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                raise UsageError(f"config field {name!r}: must be a positive number")
        grid = tuple(float(e) for e in self.epsilon_grid)
        if len(grid) < 2 or grid[-1] <= 0 or any(b >= a for a, b in zip(grid, grid[1:])):
            raise UsageError("config field 'epsilon_grid': must be positive and strictly decreasing")
        self.epsilon_grid = grid
        if not isinstance(self.search_budget, int) or self.search_budget <= 0:
            raise UsageError("config field 'search_budget': must be a positive integer")
        if self.format not in ("json", "csv"):
            raise UsageError("config field 'format': must be 'json' or 'csv'")


def _load_json(path: str, what: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{what} {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    obj = _load_json(path, "config")
    if not isinstance(obj, dict):
        raise UsageError(f"config {path}: top level must be an object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(obj) - known)
    if unknown:
        raise UsageError(f"config {path}: unknown field {unknown[0]!r}")
    try:
        return RunConfig(**obj)
    except TypeError as exc:
        raise UsageError(f"config {path}: {exc}") from exc


def _complex_list(obj, field):
    if not isinstance(obj, list) or not obj:
        raise UsageError(f"field {field!r}: expected a non-empty list")
    out = []
    for i, v in enumerate(obj):
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(v))
        elif (isinstance(v, list) and len(v) == 2
              and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
            out.append(complex(v[0], v[1]))
        else:
            raise UsageError(f"field {field!r}[{i}]: expected a number or [re, im]")
    return out


def parse_curve(obj):
    """Cover from a JSON curve descriptor."""
    if not isinstance(obj, dict):
        raise UsageError("curve descriptor must be a JSON object")
    kind = obj.get("type")
    try:
        if kind == "hyperelliptic":
            if "branch_points" not in obj:
                raise UsageError("field 'branch_points': missing")
            return HyperellipticCover(tuple(_complex_list(obj["branch_points"], "branch_points")))
        if kind == "rational":
            if "numerator" not in obj:
                raise UsageError("field 'numerator': missing")
            num = _complex_list(obj["numerator"], "numerator")
            den = _complex_list(obj.get("denominator", [1.0]), "denominator")
            cover = RationalCover(tuple(num), tuple(den))
            prof = obj.get("infinity_profile")
            if prof is not None and tuple(sorted(prof, reverse=True)) != cover.infinity_profile:
                raise UsageError(f"field 'infinity_profile': {prof} does not match "
                                 f"the computed profile {list(cover.infinity_profile)}")
            return cover
    except InconsistentDataError as exc:
        raise UsageError(f"curve descriptor: {exc}") from exc
    raise UsageError(f"field 'type': expected 'hyperelliptic' or 'rational', got {kind!r}")


# -- output -------------------------------------------------------------------------

def _emit_reports(reports, cfg: RunConfig, out) -> bool:
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in reports:
            d = r.to_dict()
            w.writerow([d["check"]] + [dumps(d[c]) for c in REPORT_COLUMNS[1:]])
        out.write(buf.getvalue())
    else:
        for r in reports:
            out.write(r.to_json() + "\n")
    return all(r.passed for r in reports)


# -- commands ---------------------------------------------------------------------

def cmd_tau(args, cfg: RunConfig, out) -> int:
    cover = parse_curve(_load_json(args.curve, "curve"))
    data = None if T.is_rational(cover) else periods(cover, tol=cfg.quadrature_tol)
    lt = T.assemble_tau(cover, data, check=True)
    rep = lt.to_dict()
    rep["x_independence"] = "pass"
    out.write(dumps(rep) + "\n")
    return 0


def _psl2_maps(z, count=3, seed=0):
    rng = np.random.default_rng(seed)
    maps = []
    while len(maps) < count:
        a, b, c = rng.normal(size=3) + 1j * rng.normal(size=3)
        d = (1 + b * c) / a
        if np.min(np.abs(c * np.asarray(z) + d)) > 0.3 * max(1.0, abs(d)):
            maps.append((complex(a), complex(b), complex(c), complex(d)))
    return maps


def _modular_generators(g):
    I, Z = np.eye(g, dtype=int), np.zeros((g, g), dtype=int)
    S = np.block([[Z, I], [-I, Z]])
    Tm = np.block([[I, Z], [I, I]])
    return [("S", S), ("T", Tm)]


def cmd_check(args, cfg: RunConfig, out) -> int:
    cover = parse_curve(_load_json(args.curve, "curve"))
    name = args.check_name
    rational = T.is_rational(cover)
    reports: list[CheckReport] = []
    if name == "pde":
        if rational:
            for idx in range(len(cover.numerator) - 1):
                rep = T.check_pde_path(T.coefficient_path(cover, idx), step=cfg.fd_step)
                rep.params["coefficient"] = idx
                reports.append(rep)
        else:
            data = periods(cover)
            reports = [T.check_pde(cover, i, cfg.fd_step, data=data) for i in range(cover.n)]
    elif name == "scaling":
        reports = T.check_scaling(cover)
    elif name == "euler":
        reports = [T.check_euler(cover)]
    elif name == "psl2":
        for gamma in _psl2_maps(T.branch_values(cover)):
            reports.append(T.check_psl2(cover, gamma))
    elif name == "modular":
        if rational:
            raise UsageError("modular check needs a hyperelliptic curve")
        data = periods(cover)
        for label, sigma in _modular_generators(data.genus):
            rep = T.check_modular(cover, sigma, data=data)
            rep.params["generator"] = label
            reports.append(rep)
    elif name == "boundary":
        if rational:
            raise UsageError("boundary families are built from hyperelliptic curves")
        if args.k is None:
            raise UsageError("boundary check needs --k")
        try:
            fam = T.DegenerationFamily(cover, tuple(range(args.k)), cfg.epsilon_grid)
        except InconsistentDataError as exc:
            raise UsageError(str(exc)) from exc
        rows = T.boundary_rows(fam)
        reports = [T.fit_boundary_exponent(fam, t, rows=rows) for t in ("tau", "eta")]
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write(T.rows_to_csv(rows))
    return 0 if _emit_reports(reports, cfg, out) else 1


def _table_out(rows: list[dict], cfg: RunConfig, out):
    if cfg.format == "csv":
        if rows:
            w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: ("" if v is None else v) for k, v in r.items()})
    else:
        for r in rows:
            out.write(dumps(r) + "\n")


def cmd_hodge(args, cfg: RunConfig, out) -> int:
    if args.g < 0 or args.d < 2:
        raise UsageError("need g >= 0 and d >= 2")
    rows = [c.row() for c in hodge_table(args.g, args.d)]
    ok = True
    if args.genus0:
        if args.g != 0:
            raise UsageError("--genus0 applies to g = 0")
        vec = genus0_k2_vector(args.d)
        c3 = vec["coefficients"][0]
        for r in rows:
            if r["k"] == 2 and r["mu"] == [3] + [1] * (args.d - 3):
                r["flag"] = "c3 = 0" if c3 == 0 else None
    _table_out(rows, cfg, out)
    if args.genus0:
        out.write(dumps({"genus0_k2": {k: v for k, v in vec.items() if k != "coefficients"},
                         "coefficients": [str(c) for c in vec["coefficients"]]}) + "\n")
    if args.check_d2:
        if args.d != 2:
            raise UsageError("--check-d2 applies to d = 2")
        rep = check_d2_closed_form(args.g)
        ok = _emit_reports([rep], RunConfig(format="json"), out)
    return 0 if ok else 1


def cmd_strata(args, cfg: RunConfig, out) -> int:
    if args.g < 0 or args.d < 2:
        raise UsageError("need g >= 0 and d >= 2")
    rows = []
    for s in enumerate_strata(args.g, args.d):
        row = {"g": args.g, "d": args.d, "k": s.k, "mu": list(s.profile.parts),
               "lcm": s.lcm, "branch_count": s.branch_count}
        if args.brute_force:
            try:
                row["realizable"] = stratum_realizable(args.g, args.d, s, budget=cfg.search_budget)
            except SearchBudgetExceeded:
                row["realizable"] = "search budget exceeded"
        rows.append(row)
    _table_out(rows, cfg, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hurwitz-tau", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON run configuration")
    sub = p.add_subparsers(dest="command", required=True)
    t = sub.add_parser("tau", help="log tau of a curve descriptor")
    t.add_argument("curve")
    c = sub.add_parser("check", help="run a named check")
    c.add_argument("curve")
    c.add_argument("check_name", choices=CHECKS)
    c.add_argument("--k", type=int, help="number of colliding branch points (boundary)")
    c.add_argument("--csv", help="write the boundary fit data to this CSV file")
    h = sub.add_parser("hodge", help="Hodge coefficient table")
    h.add_argument("g", type=int)
    h.add_argument("d", type=int)
    h.add_argument("--check-d2", action="store_true")
    h.add_argument("--genus0", action="store_true")
    s = sub.add_parser("strata", help="boundary strata of a Hurwitz space")
    s.add_argument("g", type=int)
    s.add_argument("d", type=int)
    s.add_argument("--brute-force", action="store_true")
    for q in (t, c, h, s):
        q.add_argument("--config", dest="sub_config", help=argparse.SUPPRESS)
    return p


def _origin(exc: BaseException) -> str:
    tb = traceback.extract_tb(exc.__traceback__)
    if not tb:
        return "hurwitz_tau"
    return "hurwitz_tau." + os.path.splitext(os.path.basename(tb[-1].filename))[0]


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    commands = {"tau": cmd_tau, "check": cmd_check, "hodge": cmd_hodge, "strata": cmd_strata}
    buf = io.StringIO()     # nothing reaches stdout unless the command completes
    try:
        cfg = load_config(args.sub_config or args.config)
        code = commands[args.command](args, cfg, buf)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InconsistentDataError as exc:
        print(f"error [{_origin(exc)}]: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error [{_origin(exc)}]: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
