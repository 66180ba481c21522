"""Geometry of the parameter simplex and the analytic exclusion sets.

Parameter points (a, b, c) stand for F = x(x-a)(x-b)(x-c)(x-1). The
predicates accept ParamPoint, plain triples, or three numpy arrays (via
``np.stack``-able sequences), and treat every region as closed.

The second half of the module recomputes the numerical constants that the
analytic exclusion arguments rest on. Those recomputations bisect the
explicit logarithmic derivatives directly and never go through
``root_finder``, so they double as an independent check of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import OutsideDomain
from .poly_core import ParamPoint
from .root_finder import cubic_family_critical

C_T1 = 1 / 3.1
B_T1_T2 = C_T1 / 3  # where c = 3b meets c = 1/3.1


@dataclass(frozen=True)
class Region:
    """Axis-aligned box, or a trapezoid whose upper a-bound is b itself."""

    id: str
    a_min: float
    a_max: float | None  # None means a <= b
    b_min: float
    b_max: float
    c_min: float
    c_max: float

    @property
    def kind(self) -> str:
        return "trapezoid" if self.a_max is None else "box"

    def contains(self, p) -> bool:
        a, b, c = _abc(p)
        a_hi = b if self.a_max is None else min(self.a_max, b)
        return bool(
            self.a_min <= a <= a_hi
            and self.b_min <= b <= self.b_max
            and self.c_min <= c <= self.c_max
        )

    def within(self, other: "Region") -> bool:
        """Whether this region is a subset of ``other`` (inclusive)."""
        if not (
            other.b_min <= self.b_min
            and self.b_max <= other.b_max
            and other.c_min <= self.c_min
            and self.c_max <= other.c_max
            and other.a_min <= self.a_min
        ):
            return False
        if other.a_max is None:
            return True
        return self.a_max is not None and self.a_max <= other.a_max


S2 = Region("S2", 0.0, None, 0.25, 0.5, 0.6, 1.0)
S3 = Region("S3", 0.0, None, 0.25, 0.44, 0.6, 1.0)


def _abc(p):
    if isinstance(p, ParamPoint):
        return p.a, p.b, p.c
    a, b, c = p
    return a, b, c


def in_S_tilde(p):
    a, b, c = _abc(p)
    return (0 <= a) & (a <= b) & (b <= c) & (c <= 1)


def in_S(p):
    a, b, c = _abc(p)
    return in_S_tilde(p) & (b <= 0.5)


def in_S2(p):
    a, b, c = _abc(p)
    return in_S(p) & (0.25 <= b) & (0.6 <= c)


def _t1(a, b, c):
    return c <= C_T1


def _t2(a, b, c):
    return (c >= 3 * b) & (b <= 0.25)


def _t3(a, b, c):
    return (b >= 0.1) & (c <= 0.5)


def _t4(a, b, c):
    return (b >= 1 / 6) & (b <= 0.25) & (c >= 0.5)


def _t5(a, b, c):
    return (b >= 0.35) & (b <= 0.5) & (c >= 0.5) & (c <= 0.6)


def _t6(a, b, c):
    return (b >= 0.25) & (b <= 0.35) & (c >= 0.5) & (c <= 0.6)


_T = {1: _t1, 2: _t2, 3: _t3, 4: _t4, 5: _t5, 6: _t6}


def in_T(p, j: int):
    """Membership of p in T_j (j = 1..6); T_j is understood inside S."""
    if j not in _T:
        raise ValueError(f"no region T{j}")
    a, b, c = _abc(p)
    return in_S(p) & _T[j](a, b, c)


def reflect(p) -> ParamPoint:
    """Image under x -> 1 - x: (a, b, c) -> (1 - c, 1 - b, 1 - a)."""
    a, b, c = _abc(p)
    return ParamPoint(1 - c, 1 - b, 1 - a)


# -- certificates -----------------------------------------------------------

GUARANTEES_L_PLUS = "guarantees L+"
GUARANTEES_R_MINUS = "guarantees R-"

_CERTIFICATES = {
    1: (GUARANTEES_R_MINUS, "x^3(x-1)(x-A) bound with A >= 3.1: xi4 - 1 > A/2 >= z4 - z3"),
    2: (GUARANTEES_L_PLUS, "Q = x(x-r)(x-1)(x-t1)(x-t2) with t1 >= 3 realizes L+"),
    3: (GUARANTEES_R_MINUS, "b >= 0.1, c <= 0.5: xi3 - z3 stays below kappa1 <= xi4 - z4"),
    4: (GUARANTEES_L_PLUS, "b in [1/6, 1/4], c >= 1/2: all xi gaps exceed z2 - z1 = m"),
    5: (GUARANTEES_R_MINUS, "b in [0.35, 0.5], c in [0.5, 0.6]: xi4 - xi3 exceeds M"),
    6: (GUARANTEES_R_MINUS, "b in [0.25, 0.35], c in [0.5, 0.6]: xi4 - xi3 exceeds M"),
}

# T2 overlaps T1, T3 and T4; the axis-aligned sets are reported first
CERTIFICATE_ORDER = (1, 3, 4, 5, 6, 2)


@dataclass(frozen=True)
class AnalyticCertificate:
    region_id: str | None
    ruled_out: str | None
    citation: str
    also: tuple[str, ...] = field(default=())

    @property
    def needs_grid(self) -> bool:
        return self.region_id is None


def analytic_certificate(p) -> AnalyticCertificate:
    if not in_S(p):
        raise OutsideDomain(f"{_abc(p)!r} is not in S")
    hits = [j for j in CERTIFICATE_ORDER if in_T(p, j)]
    if not hits:
        return AnalyticCertificate(None, None, "inside S2: grid verification required")
    j = hits[0]
    ruled_out, why = _CERTIFICATES[j]
    return AnalyticCertificate(f"T{j}", ruled_out, why, tuple(f"T{k}" for k in hits[1:]))


# -- coverage of S \ S2 -----------------------------------------------------


@dataclass
class CoverageResult:
    checked: int
    counterexamples: list[tuple[float, float, float]]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def sample_S(n: int, seed: int = 0, method: str = "halton") -> np.ndarray:
    """n points of S as an (n, 3) array: sorted cube samples, folded to b <= 1/2."""
    if method == "halton":
        from scipy.stats import qmc

        u = qmc.Halton(d=3, scramble=True, seed=seed).random(n)
    else:
        u = np.random.default_rng(seed).random((n, 3))
    pts = np.sort(u, axis=1)
    flip = pts[:, 1] > 0.5
    pts[flip] = 1 - pts[flip][:, ::-1]
    return pts


def _uncovered(pts: np.ndarray) -> np.ndarray:
    a, b, c = pts[:, 0], pts[:, 1], pts[:, 2]
    inside = in_S((a, b, c))
    target = inside & ~in_S2((a, b, c))
    covered = np.zeros(len(pts), dtype=bool)
    for j in _T:
        covered |= in_T((a, b, c), j)
    return pts[target & ~covered]


def covers_complement(samples: int = 10**6, lattice_step: float = 0.005, seed: int = 0) -> CoverageResult:
    """Check that T1 u ... u T6 covers S minus S2 on Halton samples and a lattice."""
    pts = sample_S(samples, seed)
    n = round(1 / lattice_step)
    g = np.arange(n + 1) / n
    A, B, C = np.meshgrid(g, g[g <= 0.5], g, indexing="ij")
    lat = np.stack([A.ravel(), B.ravel(), C.ravel()], axis=1)
    lat = lat[in_S((lat[:, 0], lat[:, 1], lat[:, 2]))]
    junction = np.array([[0.0, B_T1_T2, C_T1], [0.0, 0.107527, C_T1], [0.1, 1 / 6, 0.5]])
    allpts = np.concatenate([pts, lat, junction])
    bad = _uncovered(allpts)
    return CoverageResult(len(allpts), [tuple(map(float, r)) for r in bad])


# -- recomputed constants ---------------------------------------------------


def bisect_decreasing(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-15) -> float:
    """Zero of f on the open interval (lo, hi), f decreasing from + to -.

    Endpoints are never evaluated, so poles there are harmless.
    """
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _logderiv(*roots_with_mult):
    pairs = tuple(roots_with_mult)
    return lambda x: sum(k / (x - r) for r, k in pairs)


def threshold_A() -> float:
    """Root of xi_+(A) - 1 - A/2 for x^3 (x - 1) (x - A), A > 1."""
    return 4 / 3 + 2 * math.sqrt(7) / 3


def threshold_residual(A: float) -> float:
    return cubic_family_critical(A)[1] - 1 - A / 2


@dataclass(frozen=True)
class PropLConstants:
    kappa: float
    lam: float
    f_tilde_0: float
    f_tilde_1: float

    @staticmethod
    def xi_tilde(r: float) -> float:
        return (r + 1 + math.sqrt(r * r - r + 1)) / 3

    def f_tilde(self, r: float) -> float:
        return self.xi_tilde(r) - self.kappa * r


def propL_constants() -> PropLConstants:
    # r -> 1 limit of 1/y + 1/(y-1) + 1/(y-1/r) + 2/(y-3/r) on (0, 1)
    kappa = bisect_decreasing(_logderiv((0, 1), (1, 2), (3, 2)), 0.0, 1.0)
    lam = bisect_decreasing(_logderiv((0, 1), (1, 2), (3, 1), (3.6, 1)), 1.0, 3.0)
    consts = PropLConstants(kappa, lam, 0.0, 0.0)
    return PropLConstants(kappa, lam, consts.f_tilde(0.0), consts.f_tilde(1.0))


def kappa_values() -> tuple[float, float]:
    """xi_+ - (1 + c)/2 for x^3 (x - c)(x - 1) at c = 0.6 and c = 0.5."""
    return tuple(cubic_family_critical(c)[1] - (1 + c) / 2 for c in (0.6, 0.5))


PROP0105_C = (0.479, 0.484, 0.489, 0.494, 0.5)


def prop0105_table(b: float = 0.1) -> list[float]:
    """xi_3 - (b + c)/2 for x^2 (x - b)(x - c), xi_3 the critical point in (b, c)."""
    out = []
    for c in PROP0105_C:
        xi3 = bisect_decreasing(_logderiv((0.0, 2), (b, 1), (c, 1)), b, c)
        out.append(xi3 - (b + c) / 2)
    return out


PROP1614_A = tuple(0.17 + 0.005 * k for k in range(8))


def prop1614_table(b: float = 0.25, c: float = 5 / 8) -> list[float]:
    """z1 - xi1 of x(x - a)(x - b)(x - c)(x - 1) along the tabulated a-values."""
    out = []
    for a in PROP1614_A:
        xi1 = bisect_decreasing(_logderiv((0.0, 1), (a, 1), (b, 1), (c, 1), (1.0, 1)), 0.0, a)
        out.append(a / 2 - xi1)
    return out


PROP0506_C = tuple(0.5 + 0.01 * k for k in range(11))


def _xi4_minus_z4(a: float, b: float, c: float) -> float:
    f = _logderiv(*_grouped((0.0, a, b, c, 1.0)))
    return bisect_decreasing(f, c, 1.0) - (1 + c) / 2


def _xi3_minus_z3(a: float, b: float, c: float) -> float:
    if b == c:
        return 0.0  # b is then a multiple root, so xi3 = z3 = b
    f = _logderiv(*_grouped((0.0, a, b, c, 1.0)))
    return bisect_decreasing(f, b, c) - (b + c) / 2


def _grouped(roots):
    out: list[tuple[float, int]] = []
    for r in roots:
        if out and out[-1][0] == r:
            out[-1] = (r, out[-1][1] + 1)
        else:
            out.append((r, 1))
    return out


@dataclass(frozen=True)
class Sequence0506:
    name: str
    a: float
    b: float
    values: tuple[float, ...]
    direction: str  # "decreasing" or "increasing"

    @property
    def monotone(self) -> bool:
        v = self.values
        if self.direction == "decreasing":
            return all(x > y for x, y in zip(v, v[1:]))
        return all(x < y for x, y in zip(v, v[1:]))


def prop0506_sequences() -> list[Sequence0506]:
    return [
        Sequence0506("xi4-z4", 0.0, 0.25, tuple(_xi4_minus_z4(0.0, 0.25, c) for c in PROP0506_C), "decreasing"),
        Sequence0506("xi3-z3", 0.35, 0.35, tuple(_xi3_minus_z3(0.35, 0.35, c) for c in PROP0506_C), "increasing"),
        Sequence0506("xi4-z4", 0.0, 0.35, tuple(_xi4_minus_z4(0.0, 0.35, c) for c in PROP0506_C), "decreasing"),
        Sequence0506("xi3-z3", 0.5, 0.5, tuple(_xi3_minus_z3(0.5, 0.5, c) for c in PROP0506_C), "increasing"),
        Sequence0506("xi4-z4", 0.0, 0.48, tuple(_xi4_minus_z4(0.0, 0.48, c) for c in PROP0506_C), "decreasing"),
    ]


# -- numerical spot checks of sign claims ------------------------------------


def B_poly(b, c):
    return 27 * b * b + 42 * b * c - 49 * c * c - 48 * b + 28 * c


def sign_spot_checks(n: int = 100) -> dict[str, bool]:
    """Sign claims used in the exclusion arguments, checked on n x n grids."""
    bb = np.linspace(1 / 6, 0.25, n)
    cc = np.linspace(0.5, 1.0, n)
    Bg, Cg = np.meshgrid(bb, cc, indexing="ij")
    r_minus = lambda c: ((1 + c) - np.sqrt(c * c - c + 1)) / 3  # noqa: E731
    p_diamond = 2 * (4 - 3 * Bg - 3 * Cg) / ((Bg + Cg) * (2 - Bg - Cg))
    cs = np.linspace(0.0, 1.0, n)
    A_plus_C = np.sqrt(4 * cs**2 - 7 * cs + 4) + 7 - 8 * cs
    return {
        "B negative": bool((B_poly(Bg, Cg) < 0).all()),
        "P_diamond((b+c)/2) positive": bool((p_diamond > 0).all()),
        "r_minus(1/2) > 0.21": bool(r_minus(0.5) > 0.21),
        "r_minus >= 1/4 exactly for c >= 5/8": bool(
            np.all((r_minus(cc) >= 0.25 - 1e-15) == (cc >= 5 / 8 - 1e-15))
        ),
        "A + C >= 0": bool((A_plus_C >= 0).all()),
    }
