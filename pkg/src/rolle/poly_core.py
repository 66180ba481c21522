"""Hyperbolic polynomials stored by their roots.

The root multiset is the primary representation; coefficients are always
derived from it. Two stored roots belong to the same multiplicity group
iff their float values are exactly equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    DegenerateSpan,
    InvalidDegree,
    InvalidInput,
    InvalidParamPoint,
    InvalidScale,
    ShiftTooLarge,
    TooFewRoots,
)


@dataclass(frozen=True)
class HyperbolicPoly:
    """Monic real polynomial ``(x - x_1) ... (x - x_d)`` with sorted roots."""

    roots: tuple[float, ...]

    def __post_init__(self):
        if len(self.roots) < 2:
            raise InvalidDegree(f"need at least 2 roots, got {len(self.roots)}")
        if not all(math.isfinite(r) for r in self.roots):
            raise InvalidInput(f"non-finite root in {self.roots!r}")
        if any(x > y for x, y in zip(self.roots, self.roots[1:])):
            raise InvalidInput("roots must be sorted; use from_roots()")

    @property
    def degree(self) -> int:
        return len(self.roots)

    def groups(self) -> list[tuple[float, int]]:
        """Distinct roots with their multiplicities, ascending."""
        out: list[tuple[float, int]] = []
        for r in self.roots:
            if out and out[-1][0] == r:
                out[-1] = (r, out[-1][1] + 1)
            else:
                out.append((r, 1))
        return out

    @property
    def is_strict(self) -> bool:
        return len(self.groups()) == self.degree

    def __call__(self, x: float) -> float:
        v = 1.0
        for r in self.roots:
            v *= x - r
        return v


@dataclass(frozen=True)
class ParamPoint:
    """Point (a, b, c) of the simplex 0 <= a <= b <= c <= 1.

    Stands for F = x (x - a) (x - b) (x - c) (x - 1).
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if not all(math.isfinite(v) for v in (a, b, c)):
            raise InvalidParamPoint(f"non-finite coordinate in {(a, b, c)!r}")
        if not (0.0 <= a <= b <= c <= 1.0):
            raise InvalidParamPoint(f"need 0 <= a <= b <= c <= 1, got {(a, b, c)!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class GapStats:
    midpoints: tuple[float, ...]
    midpoint_gaps: tuple[float, ...]
    m: float
    M: float
    root_gaps: tuple[float, ...]
    m_dagger: float
    M_dagger: float


def from_roots(values: Iterable[float]) -> HyperbolicPoly:
    vals = [float(v) for v in values]
    if len(vals) < 2:
        raise InvalidDegree(f"need at least 2 roots, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise InvalidInput(f"non-finite root in {vals!r}")
    return HyperbolicPoly(tuple(sorted(vals)))


def from_param(p: ParamPoint | Sequence[float]) -> HyperbolicPoly:
    if not isinstance(p, ParamPoint):
        p = ParamPoint(*map(float, p))
    return HyperbolicPoly((0.0, p.a, p.b, p.c, 1.0))


def coefficients(P: HyperbolicPoly) -> list[float]:
    """Monic coefficients, highest degree first, by repeated convolution."""
    coeffs = [1.0]
    for r in P.roots:
        nxt = coeffs + [0.0]
        for i in range(1, len(nxt)):
            nxt[i] -= r * coeffs[i - 1]
        coeffs = nxt
    return coeffs


def derivative_coefficients(P: HyperbolicPoly) -> list[float]:
    coeffs = coefficients(P)
    d = len(coeffs) - 1
    return [(d - i) * c for i, c in enumerate(coeffs[:-1])]


def horner(coeffs: Sequence[float], x: float) -> float:
    v = 0.0
    for c in coeffs:
        v = v * x + c
    return v


def gap_stats(P: HyperbolicPoly) -> GapStats:
    x = P.roots
    d = len(x)
    if d < 3:
        raise TooFewRoots("midpoint gaps need at least 3 roots")
    midpoints = tuple((x[j] + x[j + 1]) / 2 for j in range(d - 1))
    # z_{j+1} - z_j == (x_{j+2} - x_j) / 2, evaluated without cancellation
    mgaps = tuple((x[j + 2] - x[j]) / 2 for j in range(d - 2))
    rgaps = tuple(x[j + 1] - x[j] for j in range(d - 1))
    return GapStats(
        midpoints=midpoints,
        midpoint_gaps=mgaps,
        m=min(mgaps),
        M=max(mgaps),
        root_gaps=rgaps,
        m_dagger=min(rgaps),
        M_dagger=max(rgaps),
    )


def affine_map(P: HyperbolicPoly, scale: float, shift: float = 0.0) -> HyperbolicPoly:
    if not scale > 0:
        raise InvalidScale(f"scale must be positive, got {scale!r}")
    return HyperbolicPoly(tuple(scale * r + shift for r in P.roots))


def normalize_unit(P: HyperbolicPoly) -> HyperbolicPoly:
    """Affine image with smallest root 0 and largest root 1."""
    lo, hi = P.roots[0], P.roots[-1]
    if not hi > lo:
        raise DegenerateSpan("all roots coincide")
    span = hi - lo
    roots = [(r - lo) / span for r in P.roots]
    # pin the extremes; rounding may leave 1 - eps
    roots[0] = 0.0
    roots[-1] = 1.0
    for i, r in enumerate(P.roots):
        if r == hi:
            roots[i] = 1.0
    return HyperbolicPoly(tuple(roots))


def shift_root(P: HyperbolicPoly, group_index: int, u: float) -> HyperbolicPoly:
    """Move every copy of the ``group_index``-th distinct root by ``u``."""
    groups = P.groups()
    if not 0 <= group_index < len(groups):
        raise IndexError(f"group_index {group_index} out of range for {len(groups)} groups")
    value, _ = groups[group_index]
    neighbours = []
    if group_index > 0:
        neighbours.append(value - groups[group_index - 1][0])
    if group_index < len(groups) - 1:
        neighbours.append(groups[group_index + 1][0] - value)
    if neighbours and not abs(u) < min(neighbours):
        raise ShiftTooLarge(f"|u|={abs(u)!r} must be below the adjacent gap {min(neighbours)!r}")
    new = value + u
    return HyperbolicPoly(tuple(new if r == value else r for r in P.roots))
