"""Toda system: constants, envelopes, solver and diagnostics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2toda import toda
from g2toda.toda import (
    CONST,
    SexticPoly,
    SolverConfig,
    TodaGrid,
    constants,
    exact_solution,
    rhs,
    rhs_jacobian,
    solve,
    sub_solution,
    super_defect,
    super_solution,
)

small = st.floats(-3, 3)


@pytest.fixture(scope="module")
def small_linear_grid():
    return solve(SexticPoly.monomial(1), SolverConfig(radius=6.0, n=129))


def test_constants_closed_forms():
    c = constants()
    assert c.d == 5 / (6 * math.sqrt(3))
    assert math.isclose(c.c, 0.598791493, rel_tol=1e-8)
    assert math.isclose(c.alpha, 5 ** (1 / 6) * 3 ** 0.25 * 2 ** (1 / 3), rel_tol=1e-14)
    assert math.isclose(c.alpha, math.sqrt(6 * c.d ** (1 / 3)), rel_tol=1e-14)


def test_constants_solve_their_defining_system():
    c, d = CONST.c, CONST.d
    lhs = 5 * c ** (5 / 6) * d ** -0.5
    assert math.isclose(lhs, 2 * c ** (-5 / 3), rel_tol=1e-13)
    assert math.isclose(lhs, 6 * d ** (1 / 3), rel_tol=1e-13)
    assert math.isclose(CONST.b, 3 * d ** (1 / 3), rel_tol=1e-14)


def test_rhs_values():
    f1, f2 = rhs(0.0, 0.0, 0.0)
    assert (f1, f2) == (2.5, 0.5)
    v1, v2 = exact_solution(1.0)
    f1, f2 = rhs(v1, v2, 1.0)
    assert abs(f1) < 1e-14 and abs(f2) < 1e-14


@settings(max_examples=100, deadline=None)
@given(small, small, st.floats(0, 10))
def test_rhs_quasi_monotone(u1, u2, a2):
    _, d12, d21, _ = rhs_jacobian(u1, u2, a2)
    assert d12 <= 0 and d21 <= 0


@settings(max_examples=50, deadline=None)
@given(small, small, st.floats(0, 10))
def test_rhs_jacobian_matches_differences(u1, u2, a2):
    eps = 1e-6
    d11, d12, d21, d22 = rhs_jacobian(u1, u2, a2)
    f_u1 = [(a - b) / (2 * eps) for a, b in zip(rhs(u1 + eps, u2, a2), rhs(u1 - eps, u2, a2))]
    f_u2 = [(a - b) / (2 * eps) for a, b in zip(rhs(u1, u2 + eps, a2), rhs(u1, u2 - eps, a2))]
    scale = 1 + abs(d11) + abs(d22)
    assert np.allclose([d11, d21], f_u1, atol=1e-5 * scale)
    assert np.allclose([d12, d22], f_u2, atol=1e-5 * scale)


def test_far_field_of_constant_q():
    v1, v2 = exact_solution(1.0)
    assert math.isclose(v1, 5 / 6 * math.log(CONST.c))
    assert math.isclose(v2, 1 / 6 * math.log(CONST.d))
    assert math.isclose(v1, -0.4273682, abs_tol=1e-7)
    assert math.isclose(v2, -0.1219380, abs_tol=1e-7)


def test_hyperbolic_density_solves_liouville():
    # (1/4) Euclidean Laplacian of log g equals g
    m, h = 4.0, 1e-3
    for z in (0.0, 1.0 + 2.0j, -3.0 + 0.5j):
        lg = lambda w: math.log(toda.hyperbolic_density(w, m))
        lap = (lg(z + h) + lg(z - h) + lg(z + 1j * h) + lg(z - 1j * h) - 4 * lg(z)) / h**2
        assert math.isclose(lap / 4, toda.hyperbolic_density(z, m), rel_tol=1e-5)
    assert math.isclose(toda.hyperbolic_density(0.0, 4.0), 1 / 32)


def test_sub_solution_is_continuous_across_its_circle():
    q = SexticPoly.monomial(1)
    m = toda.choose_sub_radius(q)
    assert m >= 4 * math.sqrt(2) / 3 and m >= 2 * q.sublevel_radius()
    theta = np.linspace(0, 2 * np.pi, 50)
    inner = sub_solution(q, (m - 1e-7) * np.exp(1j * theta), m)
    outer = sub_solution(q, (m + 1e-7) * np.exp(1j * theta), m)
    for a, b in zip(inner, outer):
        assert np.abs(a - b).max() < 1e-5


def test_super_solution_certificate_on_refined_ring():
    q = SexticPoly.monomial(1)
    _, z = toda.grid_coordinates(8.0, 129)
    pts = z[np.abs(z) < 8.0]
    a = toda.choose_A(q, pts, m=toda.choose_sub_radius(q))
    ring = np.linspace(0, 8.0, 400)[:, None] * np.exp(1j * np.linspace(0, 2 * np.pi, 200))[None, :]
    f1, f2 = super_defect(q, ring.ravel(), a)
    assert f1.min() >= 0 and f2.min() >= 0


def test_super_solution_asymptotics():
    q = SexticPoly.monomial(2)
    z = np.array([1e4, 1e6])
    w1, _ = super_solution(q, z, 8.0)
    assert np.abs(w1 - 5 * 2 / 6 * np.log(np.abs(z))).max() < 1e-6


def test_polynomial_helpers():
    q = SexticPoly((1, 0, 1))
    assert q.degree == 2 and q.monic and q.centered
    assert not SexticPoly((0, 1, 1)).centered
    assert np.isclose(q(2j), -3)
    assert q.derivative().coeffs == (0j, 2 + 0j)
    assert SexticPoly.from_json(q.to_json()) == q
    assert math.isclose(SexticPoly.monomial(3).sublevel_radius(), 1.0, rel_tol=1e-12)


def test_flat_solve_is_constant():
    grid = solve(SexticPoly((1,)), SolverConfig(radius=4.0, n=129))
    v1, v2 = exact_solution(1.0)
    assert np.abs(grid.u1 - v1).max() < 1e-9
    assert np.abs(grid.u2 - v2).max() < 1e-9


def test_monotone_iterates_stay_in_envelope():
    q = SexticPoly.monomial(1)
    radius, n = 6.0, 129
    _, z = toda.grid_coordinates(radius, n)
    m = toda.choose_sub_radius(q)
    sub1, sub2 = sub_solution(q, z, m)
    prob = toda._Problem(q, radius, n, sub1, sub2)
    pts = z.ravel()[prob.a_idx]
    a = toda.choose_A(q, pts, m=m)
    sup1, sup2 = super_solution(q, z, a)
    sub = (sub1.ravel()[prob.a_idx], sub2.ravel()[prob.a_idx])
    sup = (sup1.ravel()[prob.a_idx], sup2.ravel()[prob.a_idx])
    prev = sup
    for u1a, u2a in toda.monotone_iterate(prob, sub, sup, 5):
        assert (u1a - sub[0]).min() > -1e-9 and (sup[0] - u1a).min() > -1e-9
        assert (u2a - sub[1]).min() > -1e-9 and (sup[1] - u2a).min() > -1e-9
        # iterates decrease from the super-solution
        assert (prev[0] - u1a).min() > -1e-9 and (prev[1] - u2a).min() > -1e-9
        prev = (u1a, u2a)


def test_linear_solution_properties(small_linear_grid):
    g = small_linear_grid
    lo, hi = g.envelope_slack()
    assert lo > -1e-9 and hi > -1e-9
    assert g.residual < 1e-8
    ratio = toda.global_bound_ratio(g)[np.abs(g.z) < g.radius - 1]
    assert ratio.min() >= 1 - 1e-6 and ratio.max() <= 1.2 + 1e-6


def test_error_field_signs(small_linear_grid):
    ef = toda.error_fields(small_linear_grid)
    x1, x2 = ef.x1[ef.mask], ef.x2[ef.mask]
    assert x1.min() > -1e-9
    assert (np.abs(x2) <= 3 * x1 + 1e-9).all()


def test_decay_fit_rejects_flat_case():
    grid = solve(SexticPoly((1,)), SolverConfig(radius=4.0, n=129))
    with pytest.raises(toda.FitError):
        toda.decay_fit(grid, 0.3)


def test_solution_json_round_trip(small_linear_grid):
    text = small_linear_grid.to_json()
    back = TodaGrid.from_json(text)
    assert np.array_equal(back.u1, small_linear_grid.u1)
    assert np.array_equal(back.u2, small_linear_grid.u2)
    assert back.q == small_linear_grid.q
    assert back.to_json() == text


def test_non_monic_rejected():
    with pytest.raises(ValueError):
        solve(SexticPoly((0, 2)), SolverConfig(radius=4.0, n=129))


def test_flat_distance_of_monomial():
    # for q = z^n the flat distance from 0 to z is 6/(n+6) |z|^((n+6)/6)
    q = SexticPoly.monomial(2)
    z = 2.5 * np.exp(0.7j)
    # Gauss-Legendre converges slowly on the |t|^(1/3) cusp at the zero
    assert math.isclose(toda.flat_distance_from_origin(q, z), 6 / 8 * abs(z) ** (8 / 6), rel_tol=1e-5)
