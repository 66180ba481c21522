import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rolle import (
    SolverConfig,
    coefficients,
    critical_points,
    cubic_family_critical,
    from_param,
    from_roots,
    hyperbolic_roots,
    logderiv_eval,
    shift_root,
)
from rolle.errors import InvalidInput, NotHyperbolic, PoleAt
from rolle.poly_core import derivative_coefficients, horner
from rolle.root_finder import critical_points_many
from rolle.selftest import DEGREE6_COEFFS

distinct_roots = st.lists(
    st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=3, max_size=9, unique=True
).filter(lambda v: min(np.diff(sorted(v))) > 1e-3)


def test_f1_critical_points():
    xi = critical_points(from_roots([0, 0.5, 0.5, 1, 1])).xi
    assert xi[0] == pytest.approx(0.129, abs=1e-3)
    assert xi[1] == 0.5
    assert xi[2] == pytest.approx(0.770, abs=1e-3)
    assert xi[3] == 1.0


def test_f2_critical_points():
    xi = critical_points(from_roots([0, 0, 0.5, 1, 1])).xi
    assert xi == pytest.approx((0, 0.276, 0.723, 1), abs=1e-3)
    assert xi[0] == 0.0 and xi[3] == 1.0


def test_double_root():
    assert critical_points(from_roots([0.3, 0.3])).xi == (0.3,)


@pytest.mark.parametrize("c", np.linspace(0.05, 1.0, 20))
def test_cubic_family_closed_form_matches_bisection(c):
    xi = critical_points(from_roots([0, 0, 0, c, 1])).xi
    lo, hi = cubic_family_critical(c)
    assert xi[:2] == (0.0, 0.0)
    assert xi[2] == pytest.approx(lo, abs=1e-11)
    assert xi[3] == pytest.approx(hi, abs=1e-11)


def test_cubic_family_kappas():
    assert cubic_family_critical(0.6)[1] - 0.8 == pytest.approx(0.0627105746, abs=1e-9)
    assert cubic_family_critical(0.5)[1] - 0.75 == pytest.approx(0.0949489742, abs=1e-9)


def test_cubic_family_at_one():
    assert cubic_family_critical(1.0) == pytest.approx((0.6, 1.0))
    xi = critical_points(from_roots([0, 0, 0, 1, 1])).xi
    assert xi[2] == pytest.approx(0.6, abs=1e-12)
    assert xi[3] == 1.0


def test_critical_points_are_zeros_of_derivative(rng):
    for p in np.sort(rng.random((20, 3)), axis=1):
        P = from_param(p)
        dc = derivative_coefficients(P)
        for x in critical_points(P).xi:
            assert abs(horner(dc, x)) < 1e-10


def test_batch_matches_scalar(rng):
    R = np.column_stack([np.zeros(50), np.sort(rng.random((50, 3)), axis=1), np.ones(50)])
    batch = critical_points_many(R)
    for row, xi in zip(R, batch):
        assert tuple(xi) == critical_points(from_roots(row)).xi


@given(distinct_roots)
@settings(max_examples=300, deadline=None)
def test_rolle_containment_and_interlacing(values):
    P = from_roots(values)
    xi = critical_points(P).xi
    x = P.roots
    assert len(xi) == len(x) - 1
    for j, v in enumerate(xi):
        assert x[j] < v < x[j + 1]


@given(distinct_roots)
@settings(max_examples=100, deadline=None)
def test_bisection_is_deterministic(values):
    P = from_roots(values)
    assert critical_points(P).xi == critical_points(P).xi


def test_solver_config_validation():
    with pytest.raises(InvalidInput):
        SolverConfig(abs_tol=0)
    with pytest.raises(InvalidInput):
        SolverConfig(max_iter=0)


def test_looser_tolerance_still_close():
    P = from_param((0.1, 0.49, 0.92))
    a = critical_points(P).xi
    b = critical_points(P, SolverConfig(abs_tol=1e-6)).xi
    assert b == pytest.approx(a, abs=2e-6)


def test_hyperbolic_roots_simple():
    assert hyperbolic_roots([1, -6, 11, -6]) == pytest.approx([1, 2, 3], abs=1e-12)


def test_hyperbolic_roots_repeated():
    roots = hyperbolic_roots(coefficients(from_roots([0, 0.5, 0.5, 1, 1])))
    assert roots == pytest.approx([0, 0.5, 0.5, 1, 1], abs=1e-6)


def test_hyperbolic_roots_degree6():
    roots = hyperbolic_roots(DEGREE6_COEFFS)
    assert len(roots) == 6
    assert all(-1 < r < 1 for r in roots)
    assert roots == pytest.approx([-0.19, -0.18, 0.13, 0.21, 0.67, 0.96], abs=1e-9)


@pytest.mark.parametrize("coeffs", [[1, 0, 1], [1, 0, 0, 1], [1, -1, 1, -1, 1]])
def test_hyperbolic_roots_rejects_complex(coeffs):
    with pytest.raises(NotHyperbolic):
        hyperbolic_roots(coeffs)


def test_hyperbolic_roots_bad_input():
    with pytest.raises(InvalidInput):
        hyperbolic_roots([0, 1, 2])
    with pytest.raises(InvalidInput):
        hyperbolic_roots([1, math.nan])


@given(distinct_roots)
@settings(max_examples=100, deadline=None)
def test_hyperbolic_roots_recovers_roots(values):
    want = sorted(values)
    got = hyperbolic_roots(coefficients(from_roots(values)))
    span = want[-1] - want[0]
    assert got == pytest.approx(want, abs=1e-6 * max(1.0, span))


def test_logderiv_examples():
    assert logderiv_eval(from_roots([0, 1]), 0.5) == 0.0
    assert logderiv_eval(from_roots([0, 0.5, 1]), 0.25) == pytest.approx(-4 / 3)
    with pytest.raises(PoleAt):
        logderiv_eval(from_roots([0, 0.5, 1]), 0.5)


def test_logderiv_zero_in_lemma_configuration():
    # at r = 1 the point (r + 1)/2 is a pole; the r and 1 terms cancel as r -> 1
    for eps in (1e-2, 1e-3, 1e-4):
        r = 1 - eps
        assert abs(logderiv_eval(from_roots([0, r, 1, 3, 3]), (r + 1) / 2)) < eps


def shift_cases(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        d = int(rng.integers(3, 9))
        roots = np.sort(rng.uniform(-1, 1, d))
        if d > 3 and rng.random() < 0.3:
            roots[1] = roots[2]
        P = from_roots(roots)
        groups = P.groups()
        g = int(rng.integers(len(groups)))
        vals = [v for v, _ in groups]
        gaps = [abs(vals[g] - vals[k]) for k in (g - 1, g + 1) if 0 <= k < len(vals)]
        u = float(rng.uniform(-1, 1) * 0.9 * min(gaps))
        if u == 0:
            continue
        yield P, g, groups[g][1], u


def test_shift_sum_and_direction():
    for P, g, mult, u in shift_cases(1000, seed=1):
        before = np.array(critical_points(P).xi)
        after = np.array(critical_points(shift_root(P, g, u)).xi)
        d = P.degree
        moved = after - before
        assert np.all(moved * np.sign(u) >= -1e-12)
        assert moved.sum() == pytest.approx((d - 1) * mult * u / d, rel=1e-8, abs=1e-12)
