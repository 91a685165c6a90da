"""The g2 affine Toda system for a polynomial sextic differential.

With u1 = log r + u2 and u2 = (1/2) log s the Hitchin equations become

    2 Lap u1 = 5 exp(u1 - 3 u2) - 2 exp(-2 u1) |q|^2
    2 Lap u2 = 6 exp(2 u2) - 5 exp(u1 - 3 u2)

where Lap = d/dz d/dzbar is one quarter of the Euclidean Laplacian.  The exact
solution for q = 1 scaled by |q| gives the far-field model

    v = ((5/6) log(c |q|), (1/6) log(d |q|)).

The solver works on the square [-R, R]^2 with the nodes inside the open disk of
radius R active and the remaining nodes held at the sub-solution.  The
discretisation is the fourth-order compact (Mehrstellen) scheme

    (1/4) L9 u = B F(u),   B = I + (h^2/12) L5,

solved by a few monotone sub/super-solution steps followed by Newton-Krylov
with an algebraic multigrid preconditioner in the decoupled variables
x1 = u1 + u2 and x2 = u1 - 3 u2.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pyamg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import RectBivariateSpline

log = logging.getLogger(__name__)

EXP_CLAMP = 50.0


class ConvergenceError(RuntimeError):
    pass


class EnvelopeError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class SexticPoly:
    """A polynomial sextic differential q(z) dz^6 with ascending coefficients."""

    coeffs: tuple

    def __post_init__(self):
        c = [complex(x) for x in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0j]
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, n):
        return cls((0,) * n + (1,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def monic(self) -> bool:
        return self.coeffs[-1] == 1

    @property
    def centered(self) -> bool:
        return self.degree < 1 or self.coeffs[-2] == 0

    @property
    def is_monomial(self) -> bool:
        return all(c == 0 for c in self.coeffs[:-1])

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], z)

    def derivative(self) -> "SexticPoly":
        if self.degree == 0:
            return SexticPoly((0,))
        return SexticPoly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def roots(self) -> np.ndarray:
        if self.degree == 0:
            return np.zeros(0, dtype=complex)
        return np.roots(self.coeffs[::-1])

    def sublevel_radius(self) -> float:
        """Radius of a disk containing {|q| <= 1}; infinite for constants of modulus <= 1."""
        if self.degree == 0:
            return math.inf if abs(self.coeffs[0]) <= 1 else 0.0
        lead = abs(self.coeffs[-1])
        lower = [abs(c) for c in self.coeffs[:-1]]

        def margin(rad):
            return lead * rad**self.degree - sum(a * rad**k for k, a in enumerate(lower)) - 1

        rad = 1.0
        while margin(rad) <= 0:
            rad *= 2
        lo, hi = 0.0, rad
        for _ in range(60):
            mid = (lo + hi) / 2
            if margin(mid) > 0:
                hi = mid
            else:
                lo = mid
        return hi

    def to_json(self):
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data):
        return cls(tuple(complex(a, b) for a, b in data))


# ---------------------------------------------------------------------------
# constants and pointwise model


@dataclass(frozen=True)
class TodaConstants:
    c: float
    d: float
    b: float
    alpha: float


def constants() -> TodaConstants:
    d = 5 / (6 * math.sqrt(3))
    c = (2 / 5) ** (2 / 5) * d ** (1 / 5)
    b = 3 * d ** (1 / 3)
    return TodaConstants(c=c, d=d, b=b, alpha=math.sqrt(2 * b))


CONST = constants()


def _exp(x):
    return np.exp(np.clip(x, -EXP_CLAMP, EXP_CLAMP))


def rhs(u1, u2, absq2):
    """(F1, F2) with Lap u = F(u)."""
    mixed = _exp(u1 - 3 * u2)
    f1 = 2.5 * mixed - _exp(-2 * u1) * absq2
    f2 = 3 * _exp(2 * u2) - 2.5 * mixed
    return f1, f2


def rhs_jacobian(u1, u2, absq2):
    """Entries (d11, d12, d21, d22) of dF/du."""
    mixed = _exp(u1 - 3 * u2)
    decay = _exp(-2 * u1) * absq2
    return (2.5 * mixed + 2 * decay, -7.5 * mixed, -2.5 * mixed, 6 * _exp(2 * u2) + 7.5 * mixed)


def clamp_touched(u1, u2) -> bool:
    args = (u1 - 3 * u2, -2 * u1, 2 * u2)
    return any(np.any(np.abs(a) >= EXP_CLAMP) for a in args)


def exact_solution(absq):
    """The far-field model v; -inf at zeros of q."""
    with np.errstate(divide="ignore"):
        la = np.log(absq)
    return 5 / 6 * (math.log(CONST.c) + la), 1 / 6 * (math.log(CONST.d) + la)


# ---------------------------------------------------------------------------
# sub- and super-solutions


def hyperbolic_density(z, m):
    """g = 8 M^2 / (4 M^2 - |z|^2)^2, which satisfies Lap log g = g on |z| < 2M."""
    return 8 * m**2 / (4 * m**2 - np.abs(z) ** 2) ** 2


def choose_sub_radius(q: SexticPoly) -> float:
    """Radius M for the sub-solution: the model dominates the hyperbolic pair on |z| = M."""
    if q.degree == 0:
        return math.inf
    m = max(2 * q.sublevel_radius(), 4 * math.sqrt(2) / 3)
    theta = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    for _ in range(60):
        ring = m * np.exp(1j * theta)
        v1, v2 = exact_solution(np.abs(q(ring)))
        lg = np.log(hyperbolic_density(ring, m))
        if np.all(v1 >= 2.5 * lg) and np.all(v2 >= 0.5 * lg):
            return m
        m *= 2
    raise ConvergenceError("no admissible sub-solution radius found")


def sub_solution(q: SexticPoly, z, m=None):
    """Componentwise max of the model and the hyperbolic pair inside |z| < M."""
    z = np.asarray(z, dtype=complex)
    v1, v2 = exact_solution(np.abs(q(z)))
    if q.degree == 0:
        return v1, v2
    m = choose_sub_radius(q) if m is None else m
    inside = np.abs(z) < m
    with np.errstate(invalid="ignore", divide="ignore"):
        lg = np.where(inside, np.log(np.where(inside, hyperbolic_density(z, m), 1.0)), -np.inf)
    return np.maximum(v1, 2.5 * lg), np.maximum(v2, 0.5 * lg)


def super_solution(q: SexticPoly, z, a):
    z = np.asarray(z, dtype=complex)
    absq2 = np.abs(q(z)) ** 2
    return 5 / 12 * np.log(absq2 + a), 1 / 12 * np.log(absq2 + 2 * a)


def super_defect(q: SexticPoly, z, a):
    """(F1(W) - Lap W1, F2(W) - Lap W2) for the super-solution W; both >= 0 when valid."""
    z = np.asarray(z, dtype=complex)
    absq2 = np.abs(q(z)) ** 2
    dq2 = np.abs(q.derivative()(z)) ** 2
    w1, w2 = super_solution(q, z, a)
    f1, f2 = rhs(w1, w2, absq2)
    lap1 = 5 / 12 * a * dq2 / (absq2 + a) ** 2
    lap2 = 1 / 6 * a * dq2 / (absq2 + 2 * a) ** 2
    return f1 - lap1, f2 - lap2


def choose_A(q: SexticPoly, points, cap=2.0**40, m=None):
    """Smallest A in the doubling sequence 1, 2, 4, ... that certifies the super-solution.

    The super-solution must satisfy its differential inequalities and dominate
    the sub-solution at every point.
    """
    points = np.asarray(points, dtype=complex)
    s1, s2 = sub_solution(q, points, m)
    a = 1.0
    while a <= cap:
        f1, f2 = super_defect(q, points, a)
        w1, w2 = super_solution(q, points, a)
        if f1.min() >= 0 and f2.min() >= 0 and np.all(w1 >= s1) and np.all(w2 >= s2):
            return a
        a *= 2
    f1, f2 = super_defect(q, points, cap)
    raise ConvergenceError(f"A exceeded {cap}: min defects {f1.min():.3e}, {f2.min():.3e}")


# ---------------------------------------------------------------------------
# discretisation


@dataclass
class _Stencils:
    lap_aa: sp.csr_matrix
    lap_ab: sp.csr_matrix
    mass_aa: sp.csr_matrix
    mass_ab: sp.csr_matrix


def _stencils(n, h, active):
    one = sp.identity(n, format="csr")
    nb = sp.diags([1.0, 1.0], [-1, 1], shape=(n, n), format="csr")
    edge = sp.kron(one, nb) + sp.kron(nb, one)
    corner = sp.kron(nb, nb)
    eye = sp.identity(n * n, format="csr")
    lap9 = ((4 * edge + corner - 20 * eye) / (6 * h * h)).tocsr()
    mass = (eye + (edge - 4 * eye) / 12).tocsr()
    flat = active.ravel()
    a_idx = np.flatnonzero(flat)
    b_idx = np.flatnonzero(~flat)
    return _Stencils(
        lap_aa=lap9[a_idx][:, a_idx].tocsr(),
        lap_ab=lap9[a_idx][:, b_idx].tocsr(),
        mass_aa=mass[a_idx][:, a_idx].tocsr(),
        mass_ab=mass[a_idx][:, b_idx].tocsr(),
    )


def grid_coordinates(radius, n):
    x = np.linspace(-radius, radius, n)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    return x, xx + 1j * yy


@dataclass
class SolverConfig:
    radius: float = 8.0
    n: int = 257
    tol: float = 1e-11
    monotone_steps: int = 6
    newton_max: int = 40
    gmres_rtol: float = 1e-8
    amg_tol: float = 1e-10
    a_super: float | None = None
    m_sub: float | None = None


@dataclass
class TodaGrid:
    """Discrete solution on the square [-R, R]^2; the open disk |z| < R is active."""

    q: SexticPoly
    radius: float
    n: int
    u1: np.ndarray
    u2: np.ndarray
    sub1: np.ndarray
    sub2: np.ndarray
    sup1: np.ndarray
    sup2: np.ndarray
    residual: float
    a_super: float
    m_sub: float
    history: list = field(default_factory=list)

    @property
    def x(self):
        return np.linspace(-self.radius, self.radius, self.n)

    @property
    def h(self):
        return 2 * self.radius / (self.n - 1)

    @property
    def z(self):
        return grid_coordinates(self.radius, self.n)[1]

    @property
    def active(self):
        return np.abs(self.z) < self.radius

    @property
    def r(self):
        return np.exp(self.u1 - self.u2)

    @property
    def s(self):
        return np.exp(2 * self.u2)

    def envelope_slack(self):
        """min over active nodes of u - sub and sup - u (negative means a violation)."""
        a = self.active
        return (
            float(min((self.u1 - self.sub1)[a].min(), (self.u2 - self.sub2)[a].min())),
            float(min((self.sup1 - self.u1)[a].min(), (self.sup2 - self.u2)[a].min())),
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "radius": self.radius,
                "n_nodes": self.n,
                "q_coeffs": self.q.to_json(),
                "u1": self.u1.ravel().tolist(),
                "u2": self.u2.ravel().tolist(),
                "residual": self.residual,
                "a_super": self.a_super,
                "m_sub": self.m_sub if math.isfinite(self.m_sub) else None,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "TodaGrid":
        data = json.loads(text)
        q = SexticPoly.from_json(data["q_coeffs"])
        n, radius = data["n_nodes"], data["radius"]
        m_sub = data.get("m_sub")
        m_sub = math.inf if m_sub is None else m_sub
        _, z = grid_coordinates(radius, n)
        sub1, sub2 = sub_solution(q, z, m_sub if q.degree else None)
        sup1, sup2 = super_solution(q, z, data["a_super"])
        return cls(
            q=q,
            radius=radius,
            n=n,
            u1=np.array(data["u1"]).reshape(n, n),
            u2=np.array(data["u2"]).reshape(n, n),
            sub1=sub1,
            sub2=sub2,
            sup1=sup1,
            sup2=sup2,
            residual=data["residual"],
            a_super=data["a_super"],
            m_sub=m_sub,
        )


class _Problem:
    """Residual, Jacobian and preconditioners for the active unknowns."""

    def __init__(self, q, radius, n, sub1, sub2):
        self.n = n
        self.h = 2 * radius / (n - 1)
        _, z = grid_coordinates(radius, n)
        self.active = np.abs(z) < radius
        flat = self.active.ravel()
        self.a_idx = np.flatnonzero(flat)
        self.b_idx = np.flatnonzero(~flat)
        self.absq2_full = (np.abs(q(z)) ** 2).ravel()
        self.absq2 = self.absq2_full[self.a_idx]
        self.st = _stencils(n, self.h, self.active)
        b1 = sub1.ravel()[self.b_idx]
        b2 = sub2.ravel()[self.b_idx]
        self.bnd = (b1, b2)
        g1, g2 = rhs(b1, b2, self.absq2_full[self.b_idx])
        # constant contributions of the Dirichlet nodes
        self.const1 = 0.25 * (self.st.lap_ab @ b1) - self.st.mass_ab @ g1
        self.const2 = 0.25 * (self.st.lap_ab @ b2) - self.st.mass_ab @ g2
        self.size = self.a_idx.size

    def residual(self, u1a, u2a):
        f1, f2 = rhs(u1a, u2a, self.absq2)
        st = self.st
        r1 = 0.25 * (st.lap_aa @ u1a) - st.mass_aa @ f1 + self.const1
        r2 = 0.25 * (st.lap_aa @ u2a) - st.mass_aa @ f2 + self.const2
        return r1, r2

    def jacobian(self, u1a, u2a):
        d11, d12, d21, d22 = rhs_jacobian(u1a, u2a, self.absq2)
        lap = 0.25 * self.st.lap_aa
        mass = self.st.mass_aa
        m = self.size

        def matvec(v):
            v1, v2 = v[:m], v[m:]
            return np.concatenate(
                [lap @ v1 - mass @ (d11 * v1 + d12 * v2), lap @ v2 - mass @ (d21 * v1 + d22 * v2)]
            )

        return spla.LinearOperator((2 * m, 2 * m), matvec=matvec, dtype=float)

    def full(self, ua, which):
        out = np.empty(self.n * self.n)
        out[self.a_idx] = ua
        out[self.b_idx] = self.bnd[which]
        return out.reshape(self.n, self.n)

    def decoupled_preconditioner(self, u1a, u2a):
        """Approximate inverse Jacobian through the eigen-variables x = T u.

        In x1 = u1 + u2, x2 = u1 - 3 u2 the linearisation of F at the model is
        diagonal with eigenvalues 2 beta and 6 beta; here the diagonal is read off
        the actual Jacobian at the current iterate.
        """
        d11, d12, d21, d22 = rhs_jacobian(u1a, u2a, self.absq2)
        # T J_F T^-1 with T = [[1, 1], [1, -3]], T^-1 = [[3, 1], [1, -1]] / 4
        lam1 = ((d11 + d21) * 3 + (d12 + d22)) / 4
        lam2 = ((d11 - 3 * d21) - (d12 - 3 * d22)) / 4
        base = -0.25 * self.st.lap_aa
        solvers = []
        for lam in (lam1, lam2):
            lam = np.clip(lam, 0.0, None)
            mat = (base + sp.diags(lam)).tocsr()
            solvers.append(pyamg.ruge_stuben_solver(mat).aspreconditioner(cycle="V"))
        m = self.size

        def apply(v):
            v1, v2 = v[:m], v[m:]
            y1 = v1 + v2
            y2 = v1 - 3 * v2
            x1 = -solvers[0] @ y1
            x2 = -solvers[1] @ y2
            return np.concatenate([(3 * x1 + x2) / 4, (x1 - x2) / 4])

        return spla.LinearOperator((2 * m, 2 * m), matvec=apply, dtype=float)


def _monotone_bounds(problem, sub, sup):
    """Spatially constant shifts bounding dF_i/du_i over the envelope box."""
    (s1, s2), (p1, p2) = sub, sup
    mixed = _exp(p1 - 3 * s2)
    decay = _exp(-2 * s1) * problem.absq2
    m1 = float(np.max(2.5 * mixed + 2 * decay))
    m2 = float(np.max(6 * _exp(2 * p2) + 7.5 * mixed))
    return m1, m2


def monotone_iterate(problem: _Problem, sub, sup, steps, tol=1e-10):
    """Monotone iteration from the super-solution; yields the iterates.

    Each step solves (-(1/4) L + M B) u_new = B (M u - F(u)) + boundary terms,
    which is order preserving because B >= 0 and the operator is an M-matrix
    when M h^2 <= 2.
    """
    m1, m2 = _monotone_bounds(problem, sub, sup)
    if max(m1, m2) * problem.h**2 > 2:
        log.warning("monotone shift %.3g exceeds 2/h^2; order preservation not guaranteed",
                    max(m1, m2))
    st = problem.st
    ops = []
    for m in (m1, m2):
        mat = (-0.25 * st.lap_aa + m * st.mass_aa).tocsr()
        ops.append((m, pyamg.ruge_stuben_solver(mat)))
    u1a, u2a = sup[0].copy(), sup[1].copy()
    for _ in range(steps):
        f1, f2 = rhs(u1a, u2a, problem.absq2)
        new = []
        for (m, solver), ua, fa, const in zip(ops, (u1a, u2a), (f1, f2), (problem.const1, problem.const2)):
            b = st.mass_aa @ (m * ua - fa) + const
            new.append(solver.solve(b, x0=ua, tol=tol, accel="cg", maxiter=200))
        u1a, u2a = new
        yield u1a, u2a


def solve(q: SexticPoly, config: SolverConfig | None = None) -> TodaGrid:
    """Solve the Dirichlet problem u = u_sub on the boundary of the disk."""
    cfg = config or SolverConfig()
    if not q.monic:
        raise ValueError("q must be monic")
    radius, n = cfg.radius, cfg.n
    _, z = grid_coordinates(radius, n)
    m_sub = cfg.m_sub if cfg.m_sub is not None else choose_sub_radius(q)
    sub1, sub2 = sub_solution(q, z, m_sub if q.degree else None)
    problem = _Problem(q, radius, n, sub1, sub2)
    zs = z.ravel()[problem.a_idx]
    a_super = cfg.a_super if cfg.a_super is not None else choose_A(q, zs, m=m_sub if q.degree else None)
    sup1, sup2 = super_solution(q, z, a_super)

    sub = (sub1.ravel()[problem.a_idx], sub2.ravel()[problem.a_idx])
    sup = (sup1.ravel()[problem.a_idx], sup2.ravel()[problem.a_idx])
    history = []
    u1a, u2a = sup
    for u1a, u2a in monotone_iterate(problem, sub, sup, cfg.monotone_steps):
        r1, r2 = problem.residual(u1a, u2a)
        history.append(("monotone", float(max(np.abs(r1).max(), np.abs(r2).max()))))

    u1a, u2a, res = _newton(problem, u1a, u2a, cfg, history)
    u1 = problem.full(u1a, 0)
    u2 = problem.full(u2a, 1)
    if clamp_touched(u1a, u2a):
        raise ConvergenceError("converged solution touches the exponent clamp")
    grid = TodaGrid(q, radius, n, u1, u2, sub1, sub2, sup1, sup2, res, a_super, m_sub, history)
    lo, hi = grid.envelope_slack()
    if lo < -1e-9 or hi < -1e-9:
        raise EnvelopeError(f"envelope violated: slack {lo:.3e}, {hi:.3e}")
    return grid


def _newton(problem, u1a, u2a, cfg, history):
    m = problem.size
    precond = problem.decoupled_preconditioner(u1a, u2a)
    for it in range(cfg.newton_max):
        r1, r2 = problem.residual(u1a, u2a)
        rvec = np.concatenate([r1, r2])
        res = float(np.abs(rvec).max())
        history.append(("newton", res))
        log.debug("newton %d residual %.3e", it, res)
        if res < cfg.tol:
            return u1a, u2a, res
        jac = problem.jacobian(u1a, u2a)
        step, info = spla.gmres(jac, -rvec, rtol=cfg.gmres_rtol, restart=60, maxiter=20, M=precond)
        if info < 0:
            raise ConvergenceError("GMRES breakdown")
        norm0 = np.linalg.norm(rvec)
        lam = 1.0
        while lam > 1e-4:
            c1, c2 = u1a + lam * step[:m], u2a + lam * step[m:]
            t1, t2 = problem.residual(c1, c2)
            if np.linalg.norm(np.concatenate([t1, t2])) < (1 - 1e-4 * lam) * norm0:
                break
            lam /= 2
        else:
            # the floor of round-off has been reached
            return u1a, u2a, res
        u1a, u2a = c1, c2
        if lam < 1 and it % 4 == 3:
            precond = problem.decoupled_preconditioner(u1a, u2a)
    r1, r2 = problem.residual(u1a, u2a)
    res = float(max(np.abs(r1).max(), np.abs(r2).max()))
    if res < cfg.tol:
        return u1a, u2a, res
    raise ConvergenceError(f"Newton did not converge: residual {res:.3e}")


# ---------------------------------------------------------------------------
# diagnostics


def global_bound_ratio(grid: TodaGrid):
    """e^(u1 - 5 u2), bounded in [1, 6/5] for the solution on the plane."""
    return np.exp(grid.u1 - 5 * grid.u2)


def growth_slopes(grid: TodaGrid, inner, outer):
    """Least-squares slopes of log r and log s against log|z| on an annulus."""
    z = grid.z
    ring = (np.abs(z) >= inner) & (np.abs(z) <= outer)
    lz = np.log(np.abs(z[ring]))
    lr = np.log(grid.r[ring])
    ls = np.log(grid.s[ring])
    return float(np.polyfit(lz, lr, 1)[0]), float(np.polyfit(lz, ls, 1)[0])


def flat_distance_from_origin(q: SexticPoly, z, nodes=64):
    """Integral of |q|^(1/6) along the straight segment from 0 to z."""
    z = np.asarray(z, dtype=complex)
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    t = (xg + 1) / 2
    pts = z[..., None] * t
    vals = np.abs(q(pts)) ** (1 / 6)
    return np.abs(z) * (vals @ wg) / 2


def flat_distance_to_zeros(q: SexticPoly, z, nodes=64):
    """Upper bound for the q-flat distance from z to the zero set, via straight segments."""
    z = np.asarray(z, dtype=complex)
    roots = q.roots()
    if roots.size == 0:
        return np.full(z.shape, np.inf)
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    t = (xg + 1) / 2
    best = np.full(z.shape, np.inf)
    for r0 in roots:
        pts = r0 + (z - r0)[..., None] * t
        vals = np.abs(q(pts)) ** (1 / 6)
        best = np.minimum(best, np.abs(z - r0) * (vals @ wg) / 2)
    return best


@dataclass
class ErrorField:
    """x1 = e1 + e2 and x2 = e1 - 3 e2 for the deviation e = u - v from the model."""

    x1: np.ndarray
    x2: np.ndarray
    mask: np.ndarray
    u_tilde1: np.ndarray
    u_tilde2: np.ndarray


def error_fields(grid: TodaGrid, mask_radius=1.0) -> ErrorField:
    """Deviation from the model, masked within q-distance `mask_radius` of the zeros."""
    z = grid.z
    absq = np.abs(grid.q(z))
    v1, v2 = exact_solution(absq)
    with np.errstate(invalid="ignore"):
        e1 = grid.u1 - v1
        e2 = grid.u2 - v2
        x1, x2 = e1 + e2, e1 - 3 * e2
    mask = grid.active & (flat_distance_to_zeros(grid.q, z) >= mask_radius) & np.isfinite(e1)
    return ErrorField(x1=x1, x2=x2, mask=mask, u_tilde1=e1, u_tilde2=e2)


def _patched(field_values, bad):
    out = field_values.copy()
    for i, j in zip(*np.nonzero(bad)):
        nb = [out[a, b] for a, b in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1))
              if 0 <= a < out.shape[0] and 0 <= b < out.shape[1] and not bad[a, b]]
        out[i, j] = np.mean(nb)
    return out


def error_splines(grid: TodaGrid, ef: ErrorField | None = None):
    """Quintic splines of the deviation fields; nodes at zeros of q take neighbour averages."""
    ef = ef or error_fields(grid)
    bad = ~np.isfinite(ef.u_tilde1)
    x = grid.x
    e1 = _patched(np.where(bad, 0.0, ef.u_tilde1), bad)
    e2 = _patched(np.where(bad, 0.0, ef.u_tilde2), bad)
    return (RectBivariateSpline(x, x, e1, kx=5, ky=5), RectBivariateSpline(x, x, e2, kx=5, ky=5))


@dataclass(frozen=True)
class DecayFit:
    rate_x1: float
    rate_x2: float
    samples_x1: int
    samples_x2: int


class FitError(ValueError):
    pass


def decay_fit(grid: TodaGrid, angle, t_min=1.0, floor=1e-13, margin=1.0, samples=400):
    """Slopes of log(|x_i| sqrt(t)) against the flat distance t along a ray from the origin."""
    spl1, spl2 = error_splines(grid)
    s = np.linspace(0, grid.radius - margin, samples)[1:]
    pts = s * np.exp(1j * angle)
    e1 = spl1.ev(pts.real, pts.imag)
    e2 = spl2.ev(pts.real, pts.imag)
    t = flat_distance_from_origin(grid.q, pts)
    rates = []
    counts = []
    for xi in (e1 + e2, e1 - 3 * e2):
        use = (t >= t_min) & (np.abs(xi) > floor)
        # keep the leading run of usable samples
        if use.any():
            first = np.argmax(use)
            stop = first + np.argmin(np.append(use[first:], False))
            use = np.zeros_like(use)
            use[first:stop] = True
        if use.sum() < 8:
            raise FitError("too few usable samples for the decay fit")
        y = np.log(np.abs(xi[use]) * np.sqrt(t[use]))
        rates.append(float(np.polyfit(t[use], y, 1)[0]))
        counts.append(int(use.sum()))
    return DecayFit(rates[0], rates[1], counts[0], counts[1])


def stable_angle(q: SexticPoly, k=1):
    """Direction 2 pi (k + 1/4) / (n + 6) of the k-th vertex ray."""
    return 2 * math.pi * (k + 0.25) / (q.degree + 6)
