"""Critical-point gap statistics and the L+/- R+/- case labels.

(L) holds when m <= m~ and (R) holds when M~ <= M. Ties count as holding.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TooFewRoots
from .poly_core import GapStats, HyperbolicPoly, gap_stats
from .root_finder import DEFAULT_SOLVER, SolverConfig, critical_points

DEFAULT_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class TildeStats:
    xi: tuple[float, ...]
    xi_gaps: tuple[float, ...]
    m_tilde: float
    M_tilde: float


@dataclass(frozen=True)
class CaseLabel:
    L: str
    R: str
    margin_L: float
    margin_R: float
    boundary: bool

    @property
    def name(self) -> str:
        return f"L{self.L}R{self.R}"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Classification:
    """Everything computed on the way to a label, for reporting."""

    poly: HyperbolicPoly
    gaps: GapStats
    tilde: TildeStats
    label: CaseLabel


def tilde_stats(P: HyperbolicPoly, cfg: SolverConfig = DEFAULT_SOLVER) -> TildeStats:
    if P.degree < 3:
        raise TooFewRoots("critical-point gaps need at least 3 roots")
    xi = critical_points(P, cfg).xi
    gaps = tuple(xi[j + 1] - xi[j] for j in range(len(xi) - 1))
    return TildeStats(xi, gaps, min(gaps), max(gaps))


def label_from_stats(m, M, m_tilde, M_tilde, boundary_tol=DEFAULT_BOUNDARY_TOL) -> CaseLabel:
    margin_L = m_tilde - m
    margin_R = M - M_tilde
    return CaseLabel(
        L="+" if m <= m_tilde else "-",
        R="+" if M_tilde <= M else "-",
        margin_L=margin_L,
        margin_R=margin_R,
        boundary=abs(margin_L) < boundary_tol or abs(margin_R) < boundary_tol,
    )


def analyse(
    P: HyperbolicPoly,
    cfg: SolverConfig = DEFAULT_SOLVER,
    boundary_tol: float = DEFAULT_BOUNDARY_TOL,
) -> Classification:
    g = gap_stats(P)
    t = tilde_stats(P, cfg)
    return Classification(P, g, t, label_from_stats(g.m, g.M, t.m_tilde, t.M_tilde, boundary_tol))


def classify(
    P: HyperbolicPoly,
    cfg: SolverConfig = DEFAULT_SOLVER,
    boundary_tol: float = DEFAULT_BOUNDARY_TOL,
) -> CaseLabel:
    return analyse(P, cfg, boundary_tol).label


@dataclass(frozen=True)
class RieszAndrewsReport:
    midpoint_min_ok: bool  # m >= m_dagger
    midpoint_max_ok: bool  # M <= M_dagger
    riesz_ok: bool | None  # m~ > m_dagger, strictly hyperbolic input only
    andrews: tuple[bool, ...] | None  # per j, None when skipped
    andrews_skipped: bool

    @property
    def all_ok(self) -> bool:
        checks = [self.midpoint_min_ok, self.midpoint_max_ok]
        if not self.andrews_skipped:
            checks.append(bool(self.riesz_ok))
            checks.extend(self.andrews)
        return all(checks)


def andrews_ratios(P: HyperbolicPoly, xi) -> list[tuple[float, float, float]]:
    """(lower, ratio, upper) per Rolle interval, j = 1..d-1."""
    x = P.roots
    d = len(x)
    out = []
    for j in range(1, d):
        ratio = (xi[j - 1] - x[j - 1]) / (x[j] - x[j - 1])
        out.append((1.0 / (d - j + 1), ratio, j / (j + 1)))
    return out


def riesz_andrews_report(P: HyperbolicPoly, cfg: SolverConfig = DEFAULT_SOLVER) -> RieszAndrewsReport:
    g = gap_stats(P)
    if not P.is_strict:
        return RieszAndrewsReport(g.m >= g.m_dagger, g.M <= g.M_dagger, None, None, True)
    t = tilde_stats(P, cfg)
    andrews = tuple(lo < r < hi for lo, r, hi in andrews_ratios(P, t.xi))
    return RieszAndrewsReport(
        g.m >= g.m_dagger,
        g.M <= g.M_dagger,
        t.m_tilde > g.m_dagger,
        andrews,
        False,
    )
