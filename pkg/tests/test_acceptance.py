"""Acceptance gate: eleven end-to-end criteria, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v`; the lines are repeated in the
terminal summary under "acceptance criteria".
"""

import math
import time
from fractions import Fraction

import numpy as np

from g2toda import curve, ein23
from g2toda import modelsurface as ms
from g2toda.g2lie import Root, bracket, chevalley, g2_membership_defect, principal_3ds
from g2toda.octonion import (
    SplitOctonion,
    cross_oct,
    from_im,
    mul,
    product_table,
    qform,
    random_g2,
)
from g2toda.toda import (
    CONST,
    SexticPoly,
    decay_fit,
    exact_solution,
    global_bound_ratio,
    growth_slopes,
    stable_angle,
)
from g2toda.transport import MetricField, edge_limit, edge_rays, rk4_transport

from test_octonion import EXPECTED_TABLE


def _rational(rng):
    return Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 8)))


def test_criterion_01_exact_algebra(gate):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    octs = [SplitOctonion(tuple(_rational(rng) for _ in range(8))) for _ in range(1000)]
    ims = [from_im([_rational(rng) for _ in range(7)]) for _ in range(1000)]
    failures = {"moufang": 0, "alternativity": 0, "dcp": 0, "gdcp": 0, "cross normalization": 0}
    for i in range(1000):
        u, v, w = octs[i], octs[(i + 1) % 1000], octs[(i + 2) % 1000]
        if mul(mul(mul(u, v), u), w) != mul(u, mul(v, mul(u, w))):
            failures["moufang"] += 1
        if mul(mul(u, u), v) != mul(u, mul(u, v)) or mul(mul(v, u), u) != mul(v, mul(u, u)):
            failures["alternativity"] += 1
        x, y, z = ims[i], ims[(i + 1) % 1000], ims[(i + 2) % 1000]
        xy = cross_oct(x, y)
        if qform(xy) != qform(x) * qform(y) - qform(x, y) ** 2:
            failures["cross normalization"] += 1
        if cross_oct(x, xy) != x.scale(qform(x, y)) - y.scale(qform(x)):
            failures["dcp"] += 1
        lhs = cross_oct(z, xy) + cross_oct(x, cross_oct(z, y))
        if lhs != x.scale(qform(z, y)) + z.scale(qform(x, y)) - y.scale(2 * qform(z, x)):
            failures["gdcp"] += 1
    table_ok = product_table() == EXPECTED_TABLE
    elapsed = time.perf_counter() - start
    ok = table_ok and not any(failures.values()) and elapsed < 5
    gate(1, "exact algebra", ok, f"table {'matches' if table_ok else 'differs'}, failures {failures}, "
                                 f"{elapsed:.2f} s")


def test_criterion_02_g2_tables(gate):
    norm = 0.0
    derivation = 0.0
    for root in Root:
        c = chevalley(root)
        norm = max(norm, np.abs(bracket(c.t, c.e) - 2 * c.e).max(),
                   np.abs(bracket(c.t, c.e_neg) + 2 * c.e_neg).max(),
                   np.abs(bracket(c.e, c.e_neg) - c.t).max())
        derivation = max(derivation, *(g2_membership_defect(m) for m in (c.e, c.e_neg, c.t)))
    x, e, et = principal_3ds()
    p3ds = max(np.abs(bracket(x, e) - e).max(), np.abs(bracket(e, et) - x).max())
    ok = len(list(Root)) == 6 and norm < 1e-12 and derivation < 1e-10 and p3ds < 1e-12
    gate(2, "g2 tables", ok, f"normalizations {norm:.1e}, derivation defect {derivation:.1e}, "
                             f"principal triple {p3ds:.1e}")


def test_criterion_03_flat_case(gate, flat_grid):
    d_exact = CONST.d == 5 / (6 * math.sqrt(3))
    v1, v2 = exact_solution(1.0)
    dev = max(np.abs(flat_grid.u1 - v1).max(), np.abs(flat_grid.u2 - v2).max())
    ok = d_exact and dev < 1e-6
    gate(3, "constants and flat case", ok, f"d exact {d_exact}, max deviation {dev:.2e}")


def test_criterion_04_envelopes_and_bounds(gate, linear_grid, solve_seconds):
    g = linear_grid
    lo, hi = g.envelope_slack()
    ratio = global_bound_ratio(g)[np.abs(g.z) < g.radius - 1]
    slope_r, slope_s = growth_slopes(g, g.radius - 3, g.radius - 1)
    seconds = solve_seconds["linear"]
    ok = (lo >= -1e-9 and hi >= -1e-9 and ratio.min() >= 1 and ratio.max() <= 1.2 + 1e-6
          and abs(slope_r / (2 / 3) - 1) < 0.05 and abs(slope_s / (1 / 3) - 1) < 0.05 and seconds < 180)
    gate(4, "envelopes and bounds", ok,
         f"slack ({lo:.1e}, {hi:.1e}), bound ratio [{ratio.min():.9f}, {ratio.max():.6f}], "
         f"slopes ({slope_r:.4f}, {slope_s:.4f}), solve {seconds:.1f} s")


def test_criterion_05_decay_rates(gate, linear_grid):
    fit = decay_fit(linear_grid, stable_angle(linear_grid.q))
    alpha = math.sqrt(6 * CONST.d ** (1 / 3))
    rel1 = abs(fit.rate_x1 / (-2 * alpha) - 1)
    rel2 = abs(fit.rate_x2 / (-2 * math.sqrt(3) * alpha) - 1)
    ok = rel1 < 0.05 and rel2 < 0.08 and math.isclose(alpha, 2.1683, abs_tol=1e-4)
    gate(5, "decay rates", ok, f"x1 rate {fit.rate_x1:.4f} ({rel1:.1%} off), "
                               f"x2 rate {fit.rate_x2:.4f} ({rel2:.1%} off)")


def test_criterion_06_model_transport(gate):
    field = MetricField(SexticPoly((1,)))
    worst = 0.0
    for angle in np.linspace(0, 2 * math.pi, 50, endpoint=False):
        z = 3 * np.exp(1j * angle)
        exact = ms.psi0(z)
        worst = max(worst, np.abs(rk4_transport(field, z) - exact).max() / np.abs(exact).max())
    # exact Gram of the clock coordinates; checked against the octonion form in test_octonion
    gram = np.zeros((7, 7))
    for a, b in ((0, 3), (1, 4), (2, 5)):
        gram[a, b] = gram[b, a] = -1
    gram[6, 6] = -1
    rng = np.random.default_rng(6)
    qdev = 0.0
    for _ in range(50):
        z = 3 * math.sqrt(rng.random()) * np.exp(2j * math.pi * rng.random())
        c = ms.nu0_coords(z)
        qdev = max(qdev, abs(c @ gram @ c - 1))
    ok = worst < 1e-6 and qdev < 1e-10
    gate(6, "model transport oracle", ok, f"RK4 vs closed form {worst:.1e} (relative), |q(nu0) - 1| {qdev:.1e}")


def test_criterion_07_hexagon(gate):
    poly, _ = ein23.extract_boundary(SexticPoly((1,)))
    clock = [ein23.NullLine(ms.clock_vector(k)) for k in (1, 3, 5, 7, 9, 11)]
    # rays go counterclockwise, which meets the clock vertices in decreasing order
    best, order = math.inf, ""
    for name, labels in (("x1, x3, ..., x11", clock), ("x11, x9, ..., x1", clock[::-1])):
        for shift in range(6):
            dist = max(poly.vertices[k].angle_to(labels[(k + shift) % 6]) for k in range(6))
            if dist < best:
                best, order = dist, name
    profile_ok = all(sorted(row)[1:] == [1, 1, 2, 2, 3] and row[(i + 3) % 6] == 3
                     and row[(i + 1) % 6] == 1 and row[(i + 2) % 6] == 2
                     for i, row in enumerate(poly.d3_matrix))
    ok = len(poly) == 6 and best < 1e-4 and profile_ok
    gate(7, "hexagon reproduction", ok, f"{len(poly)} vertices, distance to clock basis {best:.1e} in order {order}, "
                                        f"d3 profile (1,2,3) {profile_ok}")


def test_criterion_08_boundary_polygons(gate, linear_field, quadratic_field, solve_seconds):
    start = time.perf_counter()
    details = []
    ok = True
    for field, expected in ((linear_field, 7), (quadratic_field, 8)):
        q = field.q
        poly, _ = ein23.extract_boundary(q, field=field)
        report = ein23.validate(poly)
        worst_edge = 0.0
        converged = True
        for k in range(len(poly)):
            for edge in edge_rays(q, k, [-0.5, 0.0, 0.5]):
                res = edge_limit(field, q, edge, cauchy_tol=1e-8)
                converged &= res.converged
                nxt = poly.vertices[(k + 1) % len(poly)]
                worst_edge = max(worst_edge, ein23.edge_collinearity(res.limit, poly.vertices[k], nxt))
        ok &= len(poly) == expected and report.passed and converged and worst_edge < 1e-4
        details.append(f"deg {q.degree}: {len(poly)} vertices, validate {report.passed}, "
                       f"edge collinearity {worst_edge:.1e}")
    seconds = time.perf_counter() - start + solve_seconds["linear"] + solve_seconds["quadratic"]
    ok &= seconds < 600
    gate(8, "boundary polygons", ok, "; ".join(details) + f"; {seconds:.0f} s with solves")


def test_criterion_09_d3_metric(gate):
    rng = np.random.default_rng(9)
    asym = triangle = undetermined = 0
    for _ in range(10_000):
        x = ein23.random_null_line(rng)
        y = ein23.random_neighbor(rng, x, int(rng.integers(0, 4)))
        z = ein23.random_neighbor(rng, y, int(rng.integers(0, 4)))
        a, b, c = ein23.d3(x, y), ein23.d3(y, z), ein23.d3(x, z)
        if None in (a, b, c):
            undetermined += 1
            continue
        asym += a != ein23.d3(y, x)
        triangle += not (c <= a + b and a <= b + c and b <= a + c)
    invariance = 0
    lines_ok = True
    for _ in range(20):
        pairs = [ein23.random_pair(rng, k) for k in (1, 2, 3) for _ in range(10)]
        rep = ein23.g2_action_isometry_check(random_g2(rng), pairs)
        invariance = max(invariance, rep.max_defect)
        lines_ok &= rep.annihilator_lines_ok
        undetermined += rep.undetermined
    midpoint_fail = 0
    for _ in range(1000):
        x, y = ein23.random_pair(rng, 2)
        m = ein23.midpoint(x, y)
        midpoint_fail += not (ein23.d3(x, m) == 1 and ein23.d3(m, y) == 1)
    ok = asym == 0 and triangle == 0 and undetermined == 0 and invariance == 0 and lines_ok \
        and midpoint_fail == 0
    gate(9, "d3 metric suite", ok, f"asymmetric {asym}, triangle violations {triangle}, "
                                   f"undetermined {undetermined}, invariance defect {invariance}, "
                                   f"midpoint failures {midpoint_fail}")


def test_criterion_10_normalization(gate):
    rng = np.random.default_rng(10)
    idem = invariance = 0.0
    for i in range(100):
        poly = ein23.random_polygon(rng, 8 + i % 3)
        first, _ = ein23.normalize(poly)
        again, _ = ein23.normalize(first)
        moved, _ = ein23.normalize(poly.transform(random_g2(rng)))
        idem = max(idem, ein23.polygons_match(first, again))
        invariance = max(invariance, ein23.polygons_match(first, moved))
    ok = idem < 1e-8 and invariance < 1e-6
    gate(10, "moduli normalization", ok, f"idempotence {idem:.1e}, translate invariance {invariance:.1e}")


def test_criterion_11_curve_suite(gate, linear_field):
    samples = [curve.sample(linear_field, z) for z in curve.sample_points(linear_field.q, 50)]
    qdef = max(curve.q_defect(cs) for cs in samples)
    acdef = max(curve.almost_complex_defect(cs) for cs in samples)
    hs = max(max(curve.harmonic_sequence(cs).relative_errors) for cs in samples)
    spread = curve.ratio_spread(curve.recover_q(samples, rtol=math.inf))
    rank_linear = curve.linear_fullness(samples)
    model = MetricField(SexticPoly((1,)))
    model_samples = [curve.sample(model, z)
                     for z in curve.sample_points(SexticPoly((1,)), 50, max_radius=1.5)]
    rank_model = curve.linear_fullness(model_samples)
    ok = qdef < 1e-6 and acdef < 1e-5 and hs < 1e-4 and spread < 1e-3 and rank_linear == 7 \
        and rank_model == 6
    gate(11, "curve suite", ok, f"|q(nu) - 1| {qdef:.1e}, almost-complex {acdef:.1e}, harmonic sequence "
                                f"{hs:.1e}, recover_q spread {spread:.1e}, ranks {rank_linear}/{rank_model}")
