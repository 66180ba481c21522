"""Golden values quoted in the source material, recomputed and compared."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import regions
from .classifier import analyse
from .poly_core import from_param, from_roots
from .root_finder import critical_points, hyperbolic_roots

DEGREE6_COEFFS = (1, -1.6, 0.53, 0.122578, -0.03793509, -0.0025040322, 0.000600530112)

F1_ROOTS = (0, 0.5, 0.5, 1, 1)
F2_ROOTS = (0, 0, 0.5, 1, 1)

# (a, b, c), label, m, m~, M, M~
EXAMPLE_TABLE = (
    ((0.1, 0.49, 0.92), "L+R+", 0.245, 0.2559, 0.41, 0.3992),
    ((0.2, 0.49, 0.92), "L+R-", 0.245, 0.2584, 0.36, 0.3635),
    ((0.4, 0.49, 0.92), "L-R-", 0.245, 0.2396, 0.26, 0.3268),
)

PROP0105_PAPER = (0.07991, 0.08114, 0.08237, 0.08237, 0.08507)
PROP1614_PAPER = (0.026, 0.027, 0.029, 0.030, 0.032, 0.034, 0.035, 0.037)
PROP0506_PAPER = (
    (0.1035533906, 0.0690114951),
    (0.0256598954, 0.0410687892),
    (0.1087868945, 0.0729018385),
    (0.0, 0.0162645857),
    (0.1183113455, 0.0801188068),
)


@dataclass(frozen=True)
class Check:
    name: str
    value: float | str
    expected: float | str
    tol: float | None
    ok: bool

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        if self.tol is None:
            value = self.value
            if isinstance(value, (list, tuple)):
                value = f"{len(value)} values from {value[0]:.10g} to {value[-1]:.10g}"
            elif isinstance(value, float):
                value = f"{value:.12g}"
            return f"{status}  {self.name}: got {value}, expected {self.expected}"
        return f"{status}  {self.name}: got {self.value:.12g}, expected {self.expected:.12g} (tol {self.tol:g})"


def near(name, value, expected, tol) -> Check:
    return Check(name, value, expected, tol, abs(value - expected) <= tol)


def same(name, value, expected) -> Check:
    return Check(name, value, expected, None, value == expected)


def truncated_to(name, value, printed, decimals) -> Check:
    """``printed`` is ``value`` cut (not rounded) after ``decimals`` digits."""
    scale = 10**decimals
    return Check(name, value, printed, None, math.floor(value * scale + 1e-9) == round(printed * scale))


def constant_checks() -> list[Check]:
    k0, k1 = regions.kappa_values()
    out = [near("kappa0 closed form", k0, 0.0627105746, 1e-9), near("kappa1 closed form", k1, 0.0949489742, 1e-9)]
    for c, k in ((0.6, k0), (0.5, k1)):
        xi = critical_points(from_roots((0, 0, 0, c, 1))).xi
        out.append(near(f"xi+ - (1+c)/2 at c={c}: bisection vs closed form", xi[3] - (1 + c) / 2, k, 1e-11))
    A = regions.threshold_A()
    out.append(near("threshold A", A, 3.09716, 1e-5))
    out.append(near("xi+(A) - 1 - A/2 at threshold", regions.threshold_residual(A), 0.0, 1e-12))
    pl = regions.propL_constants()
    out.append(near("kappa (r -> 1 limit)", pl.kappa, 0.283484861, 1e-8))
    out.append(near("lambda", pl.lam, 2.242184744, 1e-8))
    out.append(near("f~(1)", pl.f_tilde_1, 0.7165151389, 1e-8))
    out.append(Check("3 - lambda > 0.717", 3 - pl.lam, 0.717, None, 3 - pl.lam > 0.717))
    return out


def example_checks() -> list[Check]:
    out = []
    for name, roots, expected in (
        ("f1", F1_ROOTS, (0.129, 0.5, 0.770, 1.0)),
        ("f2", F2_ROOTS, (0.0, 0.276, 0.723, 1.0)),
    ):
        xi = critical_points(from_roots(roots)).xi
        for j, (v, e) in enumerate(zip(xi, expected), 1):
            out.append(near(f"{name} xi{j}", v, e, 1e-3))
    out.append(same("f1 label", analyse(from_roots(F1_ROOTS)).label.name, "L-R-"))
    out.append(same("f2 label", analyse(from_roots(F2_ROOTS)).label.name, "L+R+"))
    for abc, label, m, mt, M, Mt in EXAMPLE_TABLE:
        res = analyse(from_param(abc))
        tag = f"{abc}"
        out.append(near(f"{tag} m", res.gaps.m, m, 1e-15))
        out.append(near(f"{tag} M", res.gaps.M, M, 1e-15))
        out.append(near(f"{tag} m~", res.tilde.m_tilde, mt, 1e-4))
        out.append(near(f"{tag} M~", res.tilde.M_tilde, Mt, 1e-4))
        out.append(same(f"{tag} label", res.label.name, label))
    roots = hyperbolic_roots(DEGREE6_COEFFS)
    out.append(same("degree-6 polynomial label", analyse(from_roots(roots)).label.name, "L-R+"))
    return out


def proposition_checks() -> list[Check]:
    out = []
    t0105 = regions.prop0105_table()
    for c, v, e in zip(regions.PROP0105_C, t0105, PROP0105_PAPER):
        if c == 0.494:
            continue  # the printed value duplicates the c = 0.489 entry
        out.append(near(f"prop0105 c={c}", v, e, 1e-5))
    out.append(Check("prop0105 increasing in c", t0105, "increasing", None,
                     all(x < y for x, y in zip(t0105, t0105[1:]))))
    for a, v, e in zip(regions.PROP1614_A, regions.prop1614_table(), PROP1614_PAPER):
        out.append(truncated_to(f"prop1614 a={a:.3f} (3 printed decimals)", v, e, 3))
    for seq, (first, last) in zip(regions.prop0506_sequences(), PROP0506_PAPER):
        tag = f"prop0506 {seq.name} a={seq.a} b={seq.b}"
        out.append(near(f"{tag} c=0.5", seq.values[0], first, 1e-8))
        out.append(near(f"{tag} c=0.6", seq.values[-1], last, 1e-8))
        out.append(Check(f"{tag} {seq.direction}", seq.values, seq.direction, None, seq.monotone))
    for name, ok in regions.sign_spot_checks().items():
        out.append(Check(f"sign check: {name}", ok, True, None, ok))
    return out


def run_all() -> list[Check]:
    return constant_checks() + example_checks() + proposition_checks()
