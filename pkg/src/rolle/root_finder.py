"""Critical points and real roots of hyperbolic polynomials.

Everything here is bracketed bisection: between two consecutive distinct
roots of a hyperbolic polynomial its derivative has exactly one zero, and
every derivative of a hyperbolic polynomial is again hyperbolic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InvalidDegree, InvalidInput, NotHyperbolic, PoleAt, SolverFailure
from .poly_core import HyperbolicPoly, horner


@dataclass(frozen=True)
class SolverConfig:
    abs_tol: float = 1e-13
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise InvalidInput(f"abs_tol must be positive, got {self.abs_tol!r}")
        if self.max_iter < 1:
            raise InvalidInput(f"max_iter must be >= 1, got {self.max_iter!r}")


DEFAULT_SOLVER = SolverConfig()


@dataclass(frozen=True)
class CriticalPoints:
    xi: tuple[float, ...]
    tol_used: float


def critical_points(P: HyperbolicPoly, cfg: SolverConfig = DEFAULT_SOLVER) -> CriticalPoints:
    """Roots of P', with each root of multiplicity k contributing k-1 copies."""
    roots = np.asarray(P.roots, dtype=np.float64)
    d = roots.shape[0]
    out = np.empty(d - 1)
    status = _kernels.critical_points_row(
        roots, out, np.empty(d), np.empty(d), cfg.abs_tol, cfg.max_iter
    )
    if status != _kernels.OK:
        raise SolverFailure(f"bisection did not converge for roots {P.roots!r}")
    return CriticalPoints(tuple(float(v) for v in out), cfg.abs_tol)


def critical_points_many(roots: np.ndarray, cfg: SolverConfig = DEFAULT_SOLVER) -> np.ndarray:
    """Vectorised ``critical_points`` over the rows of a sorted (n, d) array."""
    R = np.ascontiguousarray(roots, dtype=np.float64)
    if R.ndim != 2 or R.shape[1] < 2:
        raise InvalidDegree("expected an (n, d) array with d >= 2")
    xi, status = _kernels.critical_points_batch(R, cfg.abs_tol, cfg.max_iter)
    if status.any():
        bad = int(np.flatnonzero(status)[0])
        raise SolverFailure(f"bisection did not converge for roots {R[bad]!r}")
    return xi


def cubic_family_critical(c: float) -> tuple[float, float]:
    """Nonzero critical points of x^3 (x - c) (x - 1), closed form.

    Also valid for c >= 1, i.e. for x^3 (x - 1) (x - A).
    """
    root = math.sqrt(4 * c * c - 7 * c + 4)
    return (2 * (c + 1) - root) / 5, (2 * (c + 1) + root) / 5


def logderiv_eval(P: HyperbolicPoly, x: float) -> float:
    """P'(x)/P(x) = sum over roots (with multiplicity) of 1/(x - x_j)."""
    s = 0.0
    for r in P.roots:
        if x == r:
            raise PoleAt(x)
        s += 1.0 / (x - r)
    return s


def _poly_derivative(coeffs: Sequence[float]) -> list[float]:
    d = len(coeffs) - 1
    return [(d - i) * c for i, c in enumerate(coeffs[:-1])]


def _root_bound(coeffs: Sequence[float]) -> float:
    # Cauchy bound for a monic polynomial
    return 1.0 + max(abs(c) for c in coeffs[1:])


def _bisect_sign(coeffs, lo, hi, flo, cfg):
    for _ in range(cfg.max_iter):
        if hi - lo <= cfg.abs_tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        fm = horner(coeffs, mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    raise SolverFailure(f"bisection did not converge on [{lo!r}, {hi!r}]")


def _roots_between(coeffs, brackets, cfg, scale):
    """One root of ``coeffs`` in each interval of ``brackets``."""
    resid = 1e-9 * scale
    out = []
    for lo, hi in brackets:
        flo, fhi = horner(coeffs, lo), horner(coeffs, hi)
        if flo == 0.0:
            out.append(lo)
        elif fhi == 0.0:
            out.append(hi)
        elif (flo > 0) != (fhi > 0):
            out.append(_bisect_sign(coeffs, lo, hi, flo, cfg))
        else:
            # no sign change: a multiple root sits on a bracket endpoint
            x = lo if abs(flo) <= abs(fhi) else hi
            if abs(horner(coeffs, x)) > resid:
                raise NotHyperbolic(f"no real root in [{lo!r}, {hi!r}]")
            out.append(x)
    return out


def hyperbolic_roots(coeffs: Sequence[float], cfg: SolverConfig = DEFAULT_SOLVER) -> list[float]:
    """Real roots of a monic hyperbolic polynomial (highest degree first).

    Roots of the k-th derivative bracket the roots of the (k-1)-th one, so
    the chain is walked from the linear derivative upwards.
    """
    coeffs = [float(c) for c in coeffs]
    if not coeffs or coeffs[0] == 0.0:
        raise InvalidInput("leading coefficient must be nonzero")
    if not all(math.isfinite(c) for c in coeffs):
        raise InvalidInput("non-finite coefficient")
    coeffs = [c / coeffs[0] for c in coeffs]
    d = len(coeffs) - 1
    if d < 1:
        raise InvalidDegree("constant polynomial has no roots")
    chain = [coeffs]
    for _ in range(d - 1):
        der = _poly_derivative(chain[-1])
        chain.append([c / der[0] for c in der])
    bound = _root_bound(coeffs)
    roots = [-chain[-1][1]]
    for level in reversed(chain[:-1]):
        edges = [-bound] + roots + [bound]
        scale = max(abs(c) for c in level)
        roots = _roots_between(level, list(zip(edges, edges[1:])), cfg, scale)
    scale = max(abs(c) for c in coeffs)
    for r in roots:
        if abs(horner(coeffs, r)) > 1e-9 * scale:
            raise NotHyperbolic(f"residual too large at {r!r}")
    return sorted(roots)
