"""Command-line front end.

Exit codes: 0 success / everything passed, 1 verification failures found,
2 invalid input or configuration.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import sys
from typing import Sequence

from . import regions
from .classifier import DEFAULT_BOUNDARY_TOL, analyse
from .errors import ConfigError, RolleError
from .grid_verifier import (
    DEFAULT_DELTA_MIN,
    DEFAULT_FACTOR,
    FAILURE_COLUMNS,
    GridReport,
    ScheduleCell,
    default_schedule,
    verdict_row,
    verify_region,
)
from .poly_core import ParamPoint, from_param, from_roots
from .regions import Region
from .root_finder import SolverConfig, hyperbolic_roots
from .selftest import run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def fmt(x: float) -> str:
    return format(x, ".17g")


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc
    if n is not None and len(vals) != n:
        raise ConfigError(f"expected {n} numbers, got {len(vals)} in {text!r}")
    return vals


def parse_box(text: str) -> Region:
    """``amin:amax,bmin:bmax,cmin:cmax``; amax may be the literal ``b``."""
    parts = text.replace(" ", "").split(",")
    if len(parts) != 3 or any(p.count(":") != 1 for p in parts):
        raise ConfigError(f"box must look like 0:b,0.25:0.26,0.6:0.62, got {text!r}")
    (a0, a1), (b0, b1), (c0, c1) = (p.split(":") for p in parts)
    try:
        a_max = None if a1 == "b" else float(a1)
        region = Region("box", float(a0), a_max, float(b0), float(b1), float(c0), float(c1))
    except ValueError as exc:
        raise ConfigError(f"cannot parse box {text!r}") from exc
    for lo, hi in ((region.a_min, region.a_max), (region.b_min, region.b_max), (region.c_min, region.c_max)):
        if hi is not None and lo > hi:
            raise ConfigError(f"empty range {lo}:{hi} in box {text!r}")
    return region


def load_schedule(path: str) -> list[ScheduleCell]:
    """Schedule file: one INI section per cell.

    Keys: a_min, a_max (number or ``b``), b_min, b_max, c_min, c_max, delta,
    and optionally margin_factor, refine, delta_min.
    """
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read schedule {path!r}: {exc}") from exc
    cells = []
    for name in cp.sections():
        sec = cp[name]
        try:
            a_max = sec.get("a_max", "b").strip()
            region = Region(
                name,
                float(sec["a_min"]),
                None if a_max == "b" else float(a_max),
                float(sec["b_min"]),
                float(sec["b_max"]),
                float(sec["c_min"]),
                float(sec["c_max"]),
            )
            cells.append(ScheduleCell(
                region,
                float(sec["delta"]),
                float(sec.get("margin_factor", DEFAULT_FACTOR)),
                sec.getboolean("refine", False),
                float(sec.get("delta_min", DEFAULT_DELTA_MIN)),
            ))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad schedule section [{name}]: {exc}") from exc
    if not cells:
        raise ConfigError(f"schedule {path!r} has no cells")
    return cells


def dump_schedule(cells: Sequence[ScheduleCell]) -> str:
    cp = configparser.ConfigParser()
    for cell in cells:
        r = cell.region
        cp[r.id] = {
            "a_min": repr(r.a_min), "a_max": "b" if r.a_max is None else repr(r.a_max),
            "b_min": repr(r.b_min), "b_max": repr(r.b_max),
            "c_min": repr(r.c_min), "c_max": repr(r.c_max),
            "delta": repr(cell.delta), "margin_factor": repr(cell.margin_factor),
            "refine": str(cell.refine).lower(), "delta_min": repr(cell.delta_min),
        }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _solver(args) -> SolverConfig:
    return SolverConfig(abs_tol=args.tol)


# -- classify ---------------------------------------------------------------


def classification_record(res) -> dict:
    lab = res.label
    return {
        "d": res.poly.degree,
        "roots": list(res.poly.roots),
        "midpoints": list(res.gaps.midpoints),
        "xi": list(res.tilde.xi),
        "m": res.gaps.m,
        "M": res.gaps.M,
        "m_tilde": res.tilde.m_tilde,
        "M_tilde": res.tilde.M_tilde,
        "label": lab.name,
        "margin_L": lab.margin_L,
        "margin_R": lab.margin_R,
        "boundary": lab.boundary,
    }


def cmd_classify(args) -> int:
    if args.roots is not None:
        P = from_roots(_floats(args.roots))
    elif args.abc is not None:
        P = from_param(ParamPoint(*_floats(args.abc, 3)))
    else:
        P = from_roots(hyperbolic_roots(_floats(args.coeffs), _solver(args)))
    rec = classification_record(analyse(P, _solver(args), args.boundary_tol))
    out, close = _open_out(args.out)
    try:
        if args.format == "json":
            json.dump(rec, out, indent=2)
            out.write("\n")
        else:
            for key, val in rec.items():
                if isinstance(val, list):
                    val = " ".join(fmt(v) for v in val)
                elif isinstance(val, float):
                    val = fmt(val)
                out.write(f"{key:>9}: {val}\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


# -- verify -----------------------------------------------------------------


def write_failures_csv(report: GridReport, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(FAILURE_COLUMNS)
    rows = list(report.failures)
    for cell in report.cells:
        if cell.refinement is not None:
            rows.extend(cell.refinement.unresolved)
    for v in rows:
        row = verdict_row(v)
        w.writerow([fmt(row[k]) for k in FAILURE_COLUMNS])


def read_failures_csv(fh) -> list[dict]:
    return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _summary(report: GridReport) -> str:
    lines = []
    for c in report.cells:
        lines.append(
            f"{c.cell_id:<32} delta={c.delta:<8g} points={c.points_total:<10d} "
            f"L={c.pass_via_L:<10d} R={c.pass_via_R:<10d} fail={len(c.failures):<7d} "
            f"worst={c.worst_margin:.3e} time={c.wall_time:.1f}s"
        )
        if c.refinement is not None:
            for rc in c.refinement.cells:
                lines.append(
                    f"  refine delta={rc.delta:<10g} points={rc.points_total:<9d} fail={len(rc.failures)}"
                )
            lines.append(f"  unresolved={len(c.refinement.unresolved)} cleared={c.cleared}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    lines.append(
        f"total points={report.points_total} failures={len(report.failures)} "
        f"result={'PASS' if report.ok else 'FAIL'}"
    )
    return "\n".join(lines)


def build_schedule(args) -> list[ScheduleCell]:
    if args.box is not None:
        cells = [ScheduleCell(parse_box(args.box), args.delta or 1e-3, args.margin_factor,
                              args.refine, args.delta_min)]
    elif args.schedule == "paper-default":
        cells = default_schedule()
    else:
        cells = load_schedule(args.schedule)
    if args.box is None:
        cells = [
            ScheduleCell(c.region, args.delta or c.delta,
                         args.margin_factor if args.margin_factor_set else c.margin_factor,
                         c.refine or args.refine, c.delta_min)
            for c in cells
        ]
    return cells


def cmd_verify(args) -> int:
    args.margin_factor_set = args.margin_factor is not None
    if args.margin_factor is None:
        args.margin_factor = DEFAULT_FACTOR
    if args.delta is not None and not args.delta > 0:
        raise ConfigError("--delta must be positive")
    cells = build_schedule(args)
    progress = None
    if args.progress:
        def progress(cid, done, total):
            if done == total or done % 25 == 0:
                print(f"[{cid}] {done}/{total} c-slices", file=sys.stderr, flush=True)
    report = verify_region(cells, workers=args.workers, cfg=_solver(args), resume=args.resume, progress=progress)
    if args.out is not None:
        out, close = _open_out(args.out)
        try:
            if args.format == "json":
                json.dump(report.to_dict(), out, indent=1)
                out.write("\n")
            else:
                write_failures_csv(report, out)
        finally:
            if close:
                out.close()
    print(_summary(report))
    return EXIT_OK if report.ok else EXIT_FAIL


# -- sweep ------------------------------------------------------------------

SWEEP_COLUMNS = ("a", "b", "c", "m", "m_tilde", "M", "M_tilde", "label", "flag")


def sweep_rows(start, end, n, cfg, boundary_tol) -> list[dict]:
    n = max(int(n), 1)
    pts = [start] if n == 1 or start == end else [
        tuple(s + (e - s) * i / (n - 1) for s, e in zip(start, end)) for i in range(n)
    ]
    rows = []
    for p in pts:
        row = dict(zip("abc", p))
        if not regions.in_S(p):
            row.update(m="", m_tilde="", M="", M_tilde="", label="", flag="OutsideDomain")
            if regions.in_S_tilde(p):
                res = analyse(from_param(p), cfg, boundary_tol)
                row.update(m=res.gaps.m, m_tilde=res.tilde.m_tilde, M=res.gaps.M,
                           M_tilde=res.tilde.M_tilde, label=res.label.name)
        else:
            res = analyse(from_param(p), cfg, boundary_tol)
            row.update(m=res.gaps.m, m_tilde=res.tilde.m_tilde, M=res.gaps.M,
                       M_tilde=res.tilde.M_tilde, label=res.label.name,
                       flag="boundary" if res.label.boundary else "")
        rows.append(row)
    return rows


def cmd_sweep(args) -> int:
    rows = sweep_rows(_floats(args.start, 3), _floats(args.end, 3), args.n, _solver(args), args.boundary_tol)
    out, close = _open_out(args.out)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([fmt(r[k]) if isinstance(r[k], float) else r[k] for k in SWEEP_COLUMNS])
    finally:
        if close:
            out.close()
    return EXIT_OK


# -- selftest ---------------------------------------------------------------


def cmd_selftest(args) -> int:
    checks = run_all()
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.ok]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


# -- regions ----------------------------------------------------------------


def region_polygons() -> dict[str, list[tuple[float, float]]]:
    """Projections to the (b, c) plane, as closed-region vertex lists."""
    c1 = regions.C_T1
    return {
        "T1": [(0.0, 0.0), (0.0, c1), (c1, c1)],
        "T2": [(0.0, 0.0), (0.25, 0.75), (0.25, 1.0), (0.0, 1.0)],
        "T3": [(0.1, 0.1), (0.5, 0.5), (0.1, 0.5)],
        "T4": [(1 / 6, 0.5), (0.25, 0.5), (0.25, 1.0), (1 / 6, 1.0)],
        "T5": [(0.35, 0.5), (0.5, 0.5), (0.5, 0.6), (0.35, 0.6)],
        "T6": [(0.25, 0.5), (0.35, 0.5), (0.35, 0.6), (0.25, 0.6)],
        "S2": [(0.25, 0.6), (0.5, 0.6), (0.5, 1.0), (0.25, 1.0)],
    }


def regions_svg(polys, size: int = 400) -> str:
    pad = 30
    scale = size  # c and b both live in [0, 1]

    def xy(b, c):
        return pad + b * scale, pad + (1 - c) * scale

    colours = {"S2": "#222222", "T1": "#c6dbef", "T2": "#fdd0a2", "T3": "#bbbbbb",
               "T4": "#bbbbbb", "T5": "#bbbbbb", "T6": "#ffffff"}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size // 2 + 2 * pad}" '
        f'height="{size + 2 * pad}" viewBox="0 0 {size // 2 + 2 * pad} {size + 2 * pad}">'
    ]
    for name, pts in polys.items():
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in (xy(b, c) for b, c in pts))
        cx = sum(b for b, _ in pts) / len(pts)
        cy = sum(c for _, c in pts) / len(pts)
        tx, ty = xy(cx, cy)
        text_fill = "#ffffff" if name == "S2" else "#000000"
        parts.append(
            f'<g id="{name}"><polygon points="{coords}" fill="{colours[name]}" fill-opacity="0.7" '
            f'stroke="#000000" stroke-width="1"/>'
            f'<text x="{tx:.2f}" y="{ty:.2f}" font-size="11" text-anchor="middle" fill="{text_fill}">{name}</text></g>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_regions(args) -> int:
    polys = region_polygons()
    out, close = _open_out(args.out)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("region", "vertex", "b", "c"))
        for name, pts in polys.items():
            for i, (b, c) in enumerate(pts):
                w.writerow((name, i, fmt(b), fmt(c)))
    finally:
        if close:
            out.close()
    if args.svg:
        with open(args.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(regions_svg(polys))
    return EXIT_OK


# -- entry point --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ROLLE_WORKERS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rolle", description="Midpoint and critical-point gap statistics of hyperbolic polynomials.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--tol", type=float, default=1e-13, help="bisection width tolerance")
        sp.add_argument("--out", help="output file (default stdout)")

    c = sub.add_parser("classify", help="classify one polynomial")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--roots", help="comma-separated roots")
    src.add_argument("--abc", help="a,b,c for x(x-a)(x-b)(x-c)(x-1)")
    src.add_argument("--coeffs", help="comma-separated coefficients, highest degree first")
    c.add_argument("--boundary-tol", type=float, default=DEFAULT_BOUNDARY_TOL)
    c.add_argument("--format", choices=("text", "json"), default="text")
    common(c)
    c.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify", help="grid verification over S2 or a sub-box")
    where = v.add_mutually_exclusive_group()
    where.add_argument("--box", help="amin:amax,bmin:bmax,cmin:cmax (amax may be 'b')")
    where.add_argument("--schedule", default="paper-default", help="'paper-default' or a schedule file")
    v.add_argument("--delta", type=float, help="lattice step (overrides the schedule)")
    v.add_argument("--margin-factor", type=float, default=None, help="margin multiple of delta (default 6)")
    v.add_argument("--workers", type=int, default=_default_workers())
    v.add_argument("--resume", help="checkpoint file; completed c-slices are skipped")
    v.add_argument("--refine", action="store_true", help="refine failing points")
    v.add_argument("--delta-min", type=float, default=DEFAULT_DELTA_MIN)
    v.add_argument("--format", choices=("csv", "json"), default="csv")
    v.add_argument("--progress", action="store_true")
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="classify evenly spaced points of a segment")
    s.add_argument("--from", dest="start", required=True, help="a,b,c")
    s.add_argument("--to", dest="end", required=True, help="a,b,c")
    s.add_argument("--n", type=int, default=11)
    s.add_argument("--boundary-tol", type=float, default=DEFAULT_BOUNDARY_TOL)
    common(s)
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("selftest", help="recompute the golden values")
    t.set_defaults(func=cmd_selftest)

    r = sub.add_parser("regions", help="emit (b, c) projections of T1..T6 and S2")
    r.add_argument("--out", help="CSV vertex list (default stdout)")
    r.add_argument("--svg", help="also write an SVG rendering")
    r.set_defaults(func=cmd_regions)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RolleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
