"""Certified grid sweep of the residual cylinder S2.

A lattice point A2 = (k*delta, l*delta, n*delta) passes when

    m~(A2) >= m(A2) + factor*delta   or   M~(A2) >= M(A2) + factor*delta.

With factor 6 a pass at A2 forces m~ >= m + delta or M~ >= M + delta at every
point within per-axis distance delta of A2, so a fully passing lattice rules
out L-R+ on the whole cell.

Lattice coordinates are computed as exact rationals ``idx * p / q`` rounded
once, so equal lattice values are bitwise equal and repeated roots are
detected exactly.
"""

from __future__ import annotations

import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .classifier import tilde_stats
from .errors import InvalidInput, SolverFailure
from .poly_core import ParamPoint, from_param, gap_stats
from .regions import S2, Region
from .root_finder import DEFAULT_SOLVER, SolverConfig

log = logging.getLogger(__name__)

STEP_LETTERS = {"A": 1e-3, "B": 5e-4, "C": 2.5e-4, "D": 1e-4}
DEFAULT_FACTOR = 6.0
DEFAULT_DELTA_MIN = 5e-5


def _exact(x: float | Fraction) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class ScheduleCell:
    region: Region
    delta: float
    margin_factor: float = DEFAULT_FACTOR
    refine: bool = False
    delta_min: float = DEFAULT_DELTA_MIN

    def __post_init__(self):
        if not self.delta > 0:
            raise InvalidInput(f"delta must be positive, got {self.delta!r}")

    @property
    def id(self) -> str:
        return self.region.id

    @property
    def letter(self) -> str | None:
        for k, v in STEP_LETTERS.items():
            if v == self.delta:
                return k
        return None

    def signature(self, cfg: SolverConfig) -> str:
        r = self.region
        return "|".join(
            map(repr, (r.id, r.a_min, r.a_max, r.b_min, r.b_max, r.c_min, r.c_max,
                       self.delta, self.margin_factor, cfg.abs_tol, cfg.max_iter))
        )


@dataclass(frozen=True)
class PointVerdict:
    point: ParamPoint
    delta: float
    factor: float
    m: float
    M: float
    m_tilde: float
    M_tilde: float

    @property
    def pass_L(self) -> bool:
        return self.m_tilde >= self.m + self.factor * self.delta

    @property
    def pass_R(self) -> bool:
        return self.M_tilde >= self.M + self.factor * self.delta

    @property
    def passed(self) -> bool:
        return self.pass_L or self.pass_R

    @property
    def margin_L(self) -> float:
        return self.m_tilde - self.m

    @property
    def margin_R(self) -> float:
        return self.M - self.M_tilde

    def sort_key(self):
        p = self.point
        return (p.c, p.b, p.a)


@dataclass
class CellReport:
    cell_id: str
    delta: float
    margin_factor: float
    points_total: int = 0
    pass_via_L: int = 0
    pass_via_R: int = 0
    failures: list[PointVerdict] = field(default_factory=list)
    worst_margin: float = math.inf
    wall_time: float = 0.0
    level: int = 0
    refinement: "GridReport | None" = None

    @property
    def cleared(self) -> bool:
        if not self.failures:
            return True
        return self.refinement is not None and not self.refinement.unresolved

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "cell_id": self.cell_id,
            "delta": self.delta,
            "margin_factor": self.margin_factor,
            "level": self.level,
            "points_total": self.points_total,
            "pass_via_L": self.pass_via_L,
            "pass_via_R": self.pass_via_R,
            "failure_count": len(self.failures),
            "worst_margin": None if math.isinf(self.worst_margin) else self.worst_margin,
            "cleared": self.cleared,
            "failures": [verdict_row(v) for v in self.failures],
        }
        if self.refinement is not None:
            d["refinement"] = self.refinement.to_dict(timing)
        if timing:
            d["wall_time"] = self.wall_time
        return d


@dataclass
class GridReport:
    cells: list[CellReport] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    unresolved: list[PointVerdict] = field(default_factory=list)

    @property
    def points_total(self) -> int:
        return sum(c.points_total for c in self.cells)

    @property
    def failures(self) -> list[PointVerdict]:
        return [v for c in self.cells if c.level == 0 for v in c.failures]

    @property
    def worst_margin(self) -> float:
        return min((c.worst_margin for c in self.cells), default=math.inf)

    @property
    def wall_time(self) -> float:
        return sum(c.wall_time for c in self.cells)

    @property
    def ok(self) -> bool:
        return not self.unresolved and all(c.cleared for c in self.cells if c.level == 0)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "ok": self.ok,
            "points_total": self.points_total,
            "failure_count": len(self.failures),
            "unresolved_count": len(self.unresolved),
            "worst_margin": None if math.isinf(self.worst_margin) else self.worst_margin,
            "warnings": list(self.warnings),
            "cells": [c.to_dict(timing) for c in self.cells],
            "unresolved": [verdict_row(v) for v in self.unresolved],
        }
        if timing:
            d["wall_time"] = self.wall_time
        return d


FAILURE_COLUMNS = ("a", "b", "c", "delta", "m", "M", "m_tilde", "M_tilde", "margin_L", "margin_R")


def verdict_row(v: PointVerdict) -> dict:
    p = v.point
    return {
        "a": p.a, "b": p.b, "c": p.c, "delta": v.delta,
        "m": v.m, "M": v.M, "m_tilde": v.m_tilde, "M_tilde": v.M_tilde,
        "margin_L": v.margin_L, "margin_R": v.margin_R,
    }


# -- lattice ----------------------------------------------------------------


def _index_range(lo: Fraction, hi: Fraction, step: Fraction) -> tuple[int, int]:
    return math.ceil(lo / step), math.floor(hi / step)


@dataclass(frozen=True)
class _LatticeSpec:
    """Integer index ranges of a cell at a given step (c range plus (a, b) pairs)."""

    step: Fraction
    n_lo: int
    n_hi: int
    k: np.ndarray
    l: np.ndarray

    def coord(self, idx):
        return idx * self.step.numerator / self.step.denominator


@lru_cache(maxsize=64)
def _lattice_spec(region: Region, step: Fraction) -> _LatticeSpec:
    a_lo = max(_exact(region.a_min), Fraction(0))
    b_lo, b_hi = _exact(region.b_min), _exact(region.b_max)
    c_lo, c_hi = _exact(region.c_min), min(_exact(region.c_max), Fraction(1))
    l0, l1 = _index_range(max(b_lo, a_lo), b_hi, step)
    k0 = math.ceil(a_lo / step)
    k_cap = None if region.a_max is None else math.floor(_exact(region.a_max) / step)
    ks, ls = [], []
    for l in range(l0, l1 + 1):
        top = l if k_cap is None else min(k_cap, l)
        if top >= k0:
            ks.append(np.arange(k0, top + 1, dtype=np.int64))
            ls.append(np.full(top - k0 + 1, l, dtype=np.int64))
    k = np.concatenate(ks) if ks else np.empty(0, dtype=np.int64)
    l = np.concatenate(ls) if ls else np.empty(0, dtype=np.int64)
    n0, n1 = _index_range(c_lo, c_hi, step)
    return _LatticeSpec(step, n0, n1, k, l)


def lattice(cell: ScheduleCell) -> Iterator[ParamPoint]:
    """Lattice points of the cell: c ascending, then b, then a."""
    spec = _lattice_spec(cell.region, _exact(cell.delta))
    a = spec.coord(spec.k)
    b = spec.coord(spec.l)
    for n in range(spec.n_lo, spec.n_hi + 1):
        c = float(spec.coord(n))
        keep = spec.l <= n
        for ai, bi in zip(a[keep], b[keep]):
            yield ParamPoint(float(ai), float(bi), c)


def lattice_size(cell: ScheduleCell) -> int:
    spec = _lattice_spec(cell.region, _exact(cell.delta))
    return sum(int((spec.l <= n).sum()) for n in range(spec.n_lo, spec.n_hi + 1))


# -- evaluation -------------------------------------------------------------


def verify_point(
    p: ParamPoint,
    delta: float,
    factor: float = DEFAULT_FACTOR,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> PointVerdict:
    P = from_param(p)
    g = gap_stats(P)
    t = tilde_stats(P, cfg)
    return PointVerdict(p, delta, factor, g.m, g.M, t.m_tilde, t.M_tilde)


@dataclass
class _Slice:
    n: int
    c: float
    points: int
    pass_L: int
    pass_R: int
    worst: float
    failures: np.ndarray  # rows a, b, c, m, M, m~, M~

    def to_record(self, key: str) -> dict:
        return {
            "cell": key,
            "n": self.n,
            "c": self.c,
            "points": self.points,
            "pass_L": self.pass_L,
            "pass_R": self.pass_R,
            "worst": None if math.isinf(self.worst) else self.worst,
            "failures": self.failures.tolist(),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "_Slice":
        fail = np.asarray(rec["failures"], dtype=np.float64).reshape(-1, 7)
        worst = math.inf if rec["worst"] is None else rec["worst"]
        return cls(rec["n"], rec["c"], rec["points"], rec["pass_L"], rec["pass_R"], worst, fail)


def _evaluate(a, b, c, delta, factor, cfg):
    m, M, mt, Mt, status = _kernels.param_gap_extrema(a, b, c, cfg.abs_tol, cfg.max_iter)
    if status.any():
        i = int(np.flatnonzero(status)[0])
        cc = c[0] if c.shape[0] == 1 else c[i]
        raise SolverFailure(f"bisection did not converge at {(a[i], b[i], cc)!r}")
    slack = factor * delta
    pass_L = mt >= m + slack
    pass_R = Mt >= M + slack
    return m, M, mt, Mt, pass_L, pass_R


def _sweep_slice(region: Region, delta: float, factor: float, cfg: SolverConfig, n: int) -> _Slice:
    spec = _lattice_spec(region, _exact(delta))
    keep = spec.l <= n
    a = spec.coord(spec.k[keep])
    b = spec.coord(spec.l[keep])
    c = float(spec.coord(n))
    carr = np.array([c])
    if a.size == 0:
        return _Slice(n, c, 0, 0, 0, math.inf, np.empty((0, 7)))
    m, M, mt, Mt, pL, pR = _evaluate(a, b, carr, delta, factor, cfg)
    worst = float(np.max([mt - m, Mt - M], axis=0).min() - factor * delta)
    bad = ~(pL | pR)
    fails = np.stack([a[bad], b[bad], np.full(int(bad.sum()), c), m[bad], M[bad], mt[bad], Mt[bad]], axis=1)
    return _Slice(n, c, int(a.size), int(pL.sum()), int((~pL & pR).sum()), worst, fails)


def _sweep_task(args):
    region, delta, factor, cfg, n = args
    return _sweep_slice(region, delta, factor, cfg, n)


def _verdicts(rows: np.ndarray, delta: float, factor: float) -> list[PointVerdict]:
    out = [
        PointVerdict(ParamPoint(r[0], r[1], r[2]), delta, factor, r[3], r[4], r[5], r[6])
        for r in rows.tolist()
    ]
    out.sort(key=PointVerdict.sort_key)
    return out


class _Checkpoint:
    """Append-only JSON-lines file with one record per completed c-slice."""

    def __init__(self, path: str | os.PathLike | None):
        self.path = path
        self.done: dict[tuple[str, int], dict] = {}
        if path is not None and os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                    except json.JSONDecodeError:
                        log.warning("ignoring truncated checkpoint line in %s", path)
                        continue
                    self.done[(rec["cell"], rec["n"])] = rec
        self._fh = open(path, "a", encoding="utf-8", newline="\n") if path is not None else None

    def get(self, key: str, n: int) -> dict | None:
        return self.done.get((key, n))

    def write(self, key: str, sl: _Slice):
        if self._fh is None:
            return
        self._fh.write(json.dumps(sl.to_record(key)) + "\n")
        self._fh.flush()

    def close(self):
        if self._fh is not None:
            self._fh.close()


def _merge(cell: ScheduleCell, slices: Sequence[_Slice]) -> CellReport:
    rep = CellReport(cell.id, cell.delta, cell.margin_factor)
    fails = [s.failures for s in slices if len(s.failures)]
    for s in slices:
        rep.points_total += s.points
        rep.pass_via_L += s.pass_L
        rep.pass_via_R += s.pass_R
        rep.worst_margin = min(rep.worst_margin, s.worst)
    if fails:
        rep.failures = _verdicts(np.concatenate(fails), cell.delta, cell.margin_factor)
    return rep


def verify_region(
    schedule: Sequence[ScheduleCell],
    workers: int = 1,
    cfg: SolverConfig = DEFAULT_SOLVER,
    resume: str | os.PathLike | None = None,
    progress=None,
) -> GridReport:
    """Sweep every lattice point of every cell; failures are recorded, not fatal.

    The report does not depend on ``workers`` or on completion order.
    ``progress`` is an optional callable receiving (cell_id, done, total).
    """
    if workers < 1:
        raise InvalidInput(f"workers must be >= 1, got {workers!r}")
    report = GridReport()
    for cell in schedule:
        if not cell.region.within(S2):
            report.warnings.append(f"cell {cell.id} is not contained in S2")
    ckpt = _Checkpoint(resume)
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for cell in schedule:
            report.cells.append(_run_cell(cell, cfg, ckpt, pool, progress))
    finally:
        ckpt.close()
        if pool is not None:
            pool.shutdown()
    for rep, cell in zip(list(report.cells), schedule):
        if rep.failures and cell.refine:
            rep.refinement = refine_many(rep.failures, cell, cell.delta_min, cfg)
    return report


def _run_cell(cell, cfg, ckpt, pool, progress) -> CellReport:
    t0 = time.perf_counter()
    key = cell.signature(cfg)
    spec = _lattice_spec(cell.region, _exact(cell.delta))
    ns = list(range(spec.n_lo, spec.n_hi + 1))
    slices: dict[int, _Slice] = {}
    todo = []
    for n in ns:
        rec = ckpt.get(key, n)
        if rec is not None:
            slices[n] = _Slice.from_record(rec)
        else:
            todo.append(n)
    args = [(cell.region, cell.delta, cell.margin_factor, cfg, n) for n in todo]
    results = pool.map(_sweep_task, args, chunksize=4) if pool is not None else map(_sweep_task, args)
    for sl in results:
        slices[sl.n] = sl
        ckpt.write(key, sl)
        if progress is not None:
            progress(cell.id, len(slices), len(ns))
    rep = _merge(cell, [slices[n] for n in ns])
    rep.wall_time = time.perf_counter() - t0
    return rep


# -- refinement -------------------------------------------------------------


def _index_bounds(region: Region, step: Fraction):
    """Inclusive integer index bounds of the region at ``step`` (a-cap may be None)."""
    a_lo = max(_exact(region.a_min), Fraction(0))
    a_cap = None if region.a_max is None else math.floor(_exact(region.a_max) / step)
    b = _index_range(_exact(region.b_min), _exact(region.b_max), step)
    c = _index_range(_exact(region.c_min), min(_exact(region.c_max), Fraction(1)), step)
    return math.ceil(a_lo / step), a_cap, b, c


def _window_points(points: Sequence[ParamPoint], radius: Fraction, step: Fraction, region: Region) -> np.ndarray:
    """Indices (at ``step``) of the lattice points covering the per-axis
    ``radius``-box around each point, clipped to the region."""
    if not points:
        return np.empty((0, 3), dtype=np.int64)
    # points lie on the lattice of step ``radius``; work with integer indices there
    P = np.array([[p.a, p.b, p.c] for p in points])
    base = np.rint(P * (radius.denominator / radius.numerator)).astype(np.int64)
    ratio = radius / step
    lo = ((base - 1) * ratio.numerator) // ratio.denominator
    hi = -((-(base + 1) * ratio.numerator) // ratio.denominator)
    width = int((hi - lo).max()) + 1
    off = np.arange(width, dtype=np.int64)
    k0, a_cap, (l0, l1), (n0, n1) = _index_bounds(region, step)
    span = max(l1, n1, 1) + width + 2
    keys = []
    for chunk in range(0, len(base), 4096):
        lo_c, hi_c = lo[chunk:chunk + 4096], hi[chunk:chunk + 4096]
        K = lo_c[:, 0, None, None, None] + off[None, :, None, None]
        L = lo_c[:, 1, None, None, None] + off[None, None, :, None]
        N = lo_c[:, 2, None, None, None] + off[None, None, None, :]
        K, L, N = np.broadcast_arrays(K, L, N)
        ok = (
            (K <= hi_c[:, 0, None, None, None]) & (L <= hi_c[:, 1, None, None, None])
            & (N <= hi_c[:, 2, None, None, None])
            & (K >= k0) & (K <= L) & (L <= N)
            & (L >= l0) & (L <= l1) & (N >= n0) & (N <= n1)
        )
        if a_cap is not None:
            ok &= K <= a_cap
        keys.append(np.unique((K[ok] * span + L[ok]) * span + N[ok]))
    key = np.unique(np.concatenate(keys))
    n = key % span
    l = (key // span) % span
    k = key // (span * span)
    return np.stack([k, l, n], axis=1)


def refine_many(
    failing: Sequence[PointVerdict],
    cell: ScheduleCell,
    delta_min: float | None = None,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> GridReport:
    """Re-sweep the delta-neighbourhoods of failing points at a finer step.

    Each failing point was responsible for the box of per-axis radius delta
    around it; that box is re-covered by a lattice of step delta/2 (or
    ``delta_min`` if that is coarser), and failing fine points recurse until
    the step would drop below ``delta_min``.
    """
    report = GridReport()
    if delta_min is None:
        delta_min = cell.delta_min
    dmin = _exact(delta_min)
    pending = list(failing)
    delta = _exact(cell.delta)
    level = 0
    while pending:
        level += 1
        t0 = time.perf_counter()
        step = max(delta / 2, dmin) if delta > dmin else delta
        idx = _window_points([v.point for v in pending], delta, step, cell.region)
        fine = float(step)
        rep = CellReport(f"{cell.id}/refine{level}", fine, cell.margin_factor, level=level)
        if len(idx):
            coords = idx * step.numerator / step.denominator
            a, b, c = (np.ascontiguousarray(coords[:, i]) for i in range(3))
            m, M, mt, Mt, pL, pR = _evaluate(a, b, c, fine, cell.margin_factor, cfg)
            bad = ~(pL | pR)
            rep.points_total = int(a.size)
            rep.pass_via_L = int(pL.sum())
            rep.pass_via_R = int((~pL & pR).sum())
            rep.worst_margin = float(np.max([mt - m, Mt - M], axis=0).min() - cell.margin_factor * fine)
            rows = np.stack([a[bad], b[bad], c[bad], m[bad], M[bad], mt[bad], Mt[bad]], axis=1)
            rep.failures = _verdicts(rows, fine, cell.margin_factor)
        rep.wall_time = time.perf_counter() - t0
        report.cells.append(rep)
        pending = rep.failures
        if pending and step <= dmin:
            report.unresolved = list(pending)
            break
        delta = step
    return report


def refine(
    failing: PointVerdict,
    cell: ScheduleCell,
    delta_min: float | None = None,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> GridReport:
    if failing.passed:
        raise InvalidInput("refine() needs a failing point")
    return refine_many([failing], cell, delta_min, cfg)


# -- schedule ---------------------------------------------------------------


def default_schedule() -> list[ScheduleCell]:
    """Cells covering S2; unpinned parts use step B with refinement enabled."""
    A, B, C, D = (STEP_LETTERS[k] for k in "ABCD")
    return [
        ScheduleCell(Region("S3", 0.0, None, 0.25, 0.44, 0.6, 1.0), A),
        ScheduleCell(Region("b0.44-0.48", 0.0, None, 0.44, 0.48, 0.6, 1.0), B, refine=True),
        ScheduleCell(Region("b0.48-0.5/c0.6-0.9", 0.0, None, 0.48, 0.5, 0.6, 0.9), B, refine=True),
        ScheduleCell(Region("b0.48-0.5/a0.38-b/c0.9-1", 0.38, None, 0.48, 0.5, 0.9, 1.0), A),
        ScheduleCell(Region("b0.48-0.5/a0-0.38/c0.9-0.95", 0.0, 0.38, 0.48, 0.5, 0.9, 0.95), B),
        ScheduleCell(Region("b0.48-0.5/a0-0.38/c0.95-0.99", 0.0, 0.38, 0.48, 0.5, 0.95, 0.99), C),
        ScheduleCell(Region("b0.48-0.5/a0-0.38/c0.99-1", 0.0, 0.38, 0.48, 0.5, 0.99, 1.0), D),
    ]


def schedule_covers(schedule: Sequence[ScheduleCell], samples: int = 10**6, seed: int = 0) -> list[tuple]:
    """Points of S2 (random samples) not contained in any schedule cell."""
    rng = np.random.default_rng(seed)
    b = rng.uniform(0.25, 0.5, samples)
    a = rng.uniform(0, 1, samples) * b
    c = rng.uniform(0.6, 1.0, samples)
    covered = np.zeros(samples, dtype=bool)
    for cell in schedule:
        r = cell.region
        a_hi = b if r.a_max is None else np.minimum(r.a_max, b)
        covered |= (r.a_min <= a) & (a <= a_hi) & (r.b_min <= b) & (b <= r.b_max) & (r.c_min <= c) & (c <= r.c_max)
    return [tuple(x) for x in np.stack([a, b, c], axis=1)[~covered].tolist()]


# -- displacement bounds ------------------------------------------------------


@dataclass(frozen=True)
class CoverBoundResult:
    samples: int
    delta: float
    m_tilde_ratio: float  # max |m~(A1) - m~(A2)| / (3 delta)
    M_tilde_ratio: float
    m_ratio: float  # max |m(A1) - m(A2)| / (2 delta)
    M_ratio: float

    @property
    def worst(self) -> float:
        return max(self.m_tilde_ratio, self.M_tilde_ratio, self.m_ratio, self.M_ratio)

    @property
    def ok(self) -> bool:
        return self.worst <= 1.0


def nearest_lattice_point(p, delta: float) -> ParamPoint:
    """Per-axis snap to the nearest multiple of delta."""
    q = _exact(delta)
    if isinstance(p, ParamPoint):
        p = p.as_tuple()
    a, b, c = (round(_exact(v) / q) * q.numerator / q.denominator for v in p)
    return ParamPoint(a, b, c)


def cover_bound_check(
    samples: int,
    cfg: SolverConfig = DEFAULT_SOLVER,
    delta: float = 1e-3,
    seed: int = 0,
    region: Region = S2,
) -> CoverBoundResult:
    if samples < 1:
        raise InvalidInput("samples must be >= 1")
    rng = np.random.default_rng(seed)
    b1 = rng.uniform(region.b_min, region.b_max, samples)
    a1 = rng.uniform(0, 1, samples) * b1
    c1 = rng.uniform(region.c_min, region.c_max, samples)
    q = _exact(delta)
    inv = q.denominator / q.numerator

    def snap(x):
        return np.round(x * inv) * q.numerator / q.denominator

    a2, b2, c2 = snap(a1), snap(b1), snap(c1)
    s1 = _kernels.param_gap_extrema(a1, b1, c1, cfg.abs_tol, cfg.max_iter)
    s2 = _kernels.param_gap_extrema(a2, b2, c2, cfg.abs_tol, cfg.max_iter)
    m1, M1, mt1, Mt1, _ = s1
    m2, M2, mt2, Mt2, _ = s2
    return CoverBoundResult(
        samples,
        delta,
        float(np.abs(mt1 - mt2).max() / (3 * delta)),
        float(np.abs(Mt1 - Mt2).max() / (3 * delta)),
        float(np.abs(m1 - m2).max() / (2 * delta)),
        float(np.abs(M1 - M2).max() / (2 * delta)),
    )


def with_factor(cell: ScheduleCell, factor: float) -> ScheduleCell:
    return replace(cell, margin_factor=factor)
