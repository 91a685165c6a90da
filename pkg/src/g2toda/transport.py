"""Parallel transport of the curve vector along paths, and natural coordinates.

The flat connection on the Higgs bundle is A = (D_H + phi) dz + phi^*h dzbar in
the complex basis.  If F is a parallel frame (dF = -A F, F(0) = I) then
Psi = F^-1 solves Psi' = Psi A along a path and the curve is nu = Psi u_0.

To keep the coefficients bounded we integrate Psi~ = Psi H^(-1/2), for which
the connection becomes G^-1 A G + G^-1 dG with G = H^(-1/2); the D_H part turns
skew-Hermitian and phi, phi^*h are balanced.  Steps are fourth-order Magnus
exponentials, so every step is an exact element of the complexified G2 and the
quadratic form of nu is conserved to round-off.  Psi~ is rescaled after each
step and the logarithm of the scale is accumulated.

Vectors at the origin are read in real M coordinates through the metric there:
x -> M_B H(0)^(1/2) x, which carries the h-unitary real frame onto (i, ..., lk).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import RectBivariateSpline
from scipy.linalg import expm

from .g2lie import chevalley, principal_3ds, Root
from .octonion import MB
from .toda import CONST, SexticPoly, TodaGrid

ZETA = cmath.exp(2j * math.pi / 6)
_, _, E_TILDE = principal_3ds()
E_GAMMA = chevalley(Root.GAMMA).e


class TransportError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# metric data along paths


@dataclass(frozen=True)
class MetricSample:
    """r, s and their holomorphic log-derivatives at a point."""

    z: complex
    q: complex
    dq: complex
    r: float
    s: float
    dlog_r: complex
    dlog_s: complex
    ddlog_r: complex = 0j
    ddlog_s: complex = 0j


def _fd4(f, h, axis):
    """Fourth-order centred first derivative; two boundary layers are left as nan."""
    out = np.full(f.shape, np.nan)
    sl = [slice(None)] * f.ndim

    def take(offset):
        s = list(sl)
        s[axis] = slice(2 + offset, f.shape[axis] - 2 + offset)
        return f[tuple(s)]

    core = list(sl)
    core[axis] = slice(2, f.shape[axis] - 2)
    out[tuple(core)] = (-take(2) + 8 * take(1) - 8 * take(-1) + take(-2)) / (12 * h)
    return out


def _fd4_second(f, h, axis):
    out = np.full(f.shape, np.nan)
    sl = [slice(None)] * f.ndim

    def take(offset):
        s = list(sl)
        s[axis] = slice(2 + offset, f.shape[axis] - 2 + offset)
        return f[tuple(s)]

    core = list(sl)
    core[axis] = slice(2, f.shape[axis] - 2)
    out[tuple(core)] = (-take(2) + 16 * take(1) - 30 * take(0) + 16 * take(-1) - take(-2)) / (12 * h * h)
    return out


class MetricField:
    """Harmonic metric data from a solved grid, with the exact model far out.

    Inside |z| < inner the fields u1, u2 and their derivatives (fourth-order
    centred differences at the nodes) are interpolated by quintic splines;
    beyond it the model v with |q| is used, whose derivatives are analytic.
    """

    def __init__(self, q: SexticPoly, grid: TodaGrid | None = None, inner=None):
        self.q = q
        self.dq = q.derivative()
        self.ddq = self.dq.derivative()
        self.grid = grid
        if grid is None:
            self.inner = 0.0
            return
        self.inner = grid.radius - 1.0 if inner is None else inner
        h = grid.h
        x = grid.x
        lr = grid.u1 - grid.u2
        ls = 2 * grid.u2
        fields = {}
        for name, f in (("lr", lr), ("ls", ls)):
            fx = _fd4(f, h, 0)
            fy = _fd4(f, h, 1)
            fxx = _fd4_second(f, h, 0)
            fyy = _fd4_second(f, h, 1)
            fxy = _fd4(fx, h, 1)
            fields[name] = f
            fields[name + "_x"], fields[name + "_y"] = fx, fy
            fields[name + "_xx"], fields[name + "_yy"], fields[name + "_xy"] = fxx, fyy, fxy
        # nodes with a full double stencil
        core = slice(4, grid.n - 4)
        xc = x[core]
        self._splines = {
            name: RectBivariateSpline(xc, xc, f[core, core], kx=5, ky=5) for name, f in fields.items()
        }

    def _model(self, z):
        qv = complex(self.q(z))
        dq = complex(self.dq(z))
        ddq = complex(self.ddq(z))
        aq = abs(qv)
        r = CONST.c ** (5 / 6) * CONST.d ** (-1 / 6) * aq ** (2 / 3)
        s = (CONST.d * aq) ** (1 / 3)
        if aq == 0:
            return MetricSample(z, qv, dq, r, s, 0j, 0j)
        dlog = dq / qv  # d log q, and d log|q| = dlog / 2
        ddlog = ddq / qv - dlog**2
        return MetricSample(z, qv, dq, r, s, dlog / 3, dlog / 6, ddlog / 3, ddlog / 6)

    def sample(self, z) -> MetricSample:
        z = complex(z)
        if self.grid is None or abs(z) >= self.inner:
            return self._model(z)
        x, y = z.real, z.imag
        sp = self._splines

        def ev(name):
            return float(sp[name].ev(x, y))

        lr, ls = ev("lr"), ev("ls")
        d_lr = 0.5 * (ev("lr_x") - 1j * ev("lr_y"))
        d_ls = 0.5 * (ev("ls_x") - 1j * ev("ls_y"))
        dd_lr = 0.25 * (ev("lr_xx") - ev("lr_yy") - 2j * ev("lr_xy"))
        dd_ls = 0.25 * (ev("ls_xx") - ev("ls_yy") - 2j * ev("ls_xy"))
        return MetricSample(z, complex(self.q(z)), complex(self.dq(z)), math.exp(lr), math.exp(ls),
                            d_lr, d_ls, dd_lr, dd_ls)


def metric_diag(r, s):
    return np.array([1 / (r * s), 1 / r, 1 / s, 1, s, r, r * s])


def _dlog_h(m: MetricSample):
    a, b = m.dlog_r, m.dlog_s
    return np.array([-(a + b), -a, -b, 0, b, a, a + b])


def connection(m: MetricSample):
    """(A^{1,0}, A^{0,1}) in the complex basis at a point."""
    phi = E_TILDE + m.q * E_GAMMA
    hd = metric_diag(m.r, m.s)
    phi_adj = (phi.conj().T * hd[None, :]) / hd[:, None]
    return np.diag(_dlog_h(m)) + phi, phi_adj


def balanced_connection(m: MetricSample, dz):
    """The path-contracted connection in the balanced gauge Psi~ = Psi H^(-1/2)."""
    a10, a01 = connection(m)
    g = metric_diag(m.r, m.s) ** -0.5
    a = a10 * dz + a01 * np.conj(dz)
    a = a * g[None, :] / g[:, None]
    # G^-1 dG = -(1/2) d log H = -Re(d log H dz)
    return a - np.diag((_dlog_h(m) * dz).real)


# ---------------------------------------------------------------------------
# paths


@dataclass
class Path:
    """A parametrised path z(t), t in [0, length], with velocity dz(t)."""

    z: callable
    dz: callable
    length: float
    label: str = ""


def segment(z0, z1) -> Path:
    d = complex(z1) - complex(z0)
    return Path(lambda t: z0 + d * t, lambda t: d, 1.0, "segment")


def euclidean_ray(angle, base=0j, length=40.0) -> Path:
    e = cmath.exp(1j * angle)
    return Path(lambda t: base + e * t, lambda t: e, length, f"ray {angle:.6f}")


def _root6_near(value, ref):
    """The sixth root of `value` closest to `ref`."""
    r = complex(value) ** (1 / 6)
    roots = [r * ZETA**j for j in range(6)]
    return min(roots, key=lambda w: abs(w - ref))


@dataclass(frozen=True)
class NaturalChart:
    """w_k with dw_k = beta_k q^(1/6) dz, beta_k = zeta^-k, centred on the k-th vertex ray."""

    q: SexticPoly
    k: int

    @property
    def n(self):
        return self.q.degree

    @property
    def beta(self):
        return ZETA ** (-self.k)

    @property
    def center_angle(self):
        return 2 * math.pi * (self.k + 0.25) / (self.n + 6)

    def root6(self, z):
        """Branch of q^(1/6) asymptotic to z^(n/6) with arg z taken near the centre angle."""
        z = complex(z)
        phase = cmath.phase(z * cmath.exp(-1j * self.center_angle)) + self.center_angle
        guess = abs(z) ** (self.n / 6) * cmath.exp(1j * self.n * phase / 6)
        return _root6_near(self.q(z), guess)

    def dw(self, z):
        return self.beta * self.root6(z)

    def w(self, z, nodes=200):
        """Chart value by quadrature along the segment from the origin, tracking the branch."""
        z = complex(z)
        xg, wg = np.polynomial.legendre.leggauss(nodes)
        t = (xg + 1) / 2
        order = np.argsort(-t)
        vals = np.empty(nodes, dtype=complex)
        ref = self.root6(z)
        for i in order:
            pt = z * t[i]
            ref = _root6_near(self.q(pt), ref)
            vals[i] = ref
        return self.beta * z * (vals @ wg) / 2

    def monomial_inverse(self, w):
        """Inverse of w = beta (6/(n+6)) z^((n+6)/6) on the chart's sector."""
        p = (self.n + 6) / 6
        base = complex(w) / (self.beta / p)
        rho = abs(base) ** (1 / p)
        # choose the preimage angle nearest the centre angle
        ph = cmath.phase(base)
        cands = [(ph + 2 * math.pi * j) / p for j in range(-self.n - 7, self.n + 8)]
        ang = min(cands, key=lambda a: abs(a - self.center_angle))
        return rho * cmath.exp(1j * ang)

    def inverse(self, w, tol=1e-12):
        z = self.monomial_inverse(w)
        if self.q.is_monomial:
            return z
        for _ in range(50):
            step = (self.w(z) - w) / self.dw(z)
            z -= step
            if abs(step) < tol * max(1, abs(z)):
                return z
        raise TransportError("chart inverse did not converge")


def charts(q: SexticPoly):
    return [NaturalChart(q, k) for k in range(q.degree + 6)]


def chart_path(chart: NaturalChart, direction, offset, t0, length) -> Path:
    """Preimage of w(t) = t e^(i direction) + i offset, t >= t0, under the chart.

    Solves dz/dt = e^(i direction) / (beta q(z)^(1/6)) with the branch continued
    from the starting point.
    """
    e = cmath.exp(1j * direction)
    z_start = chart.inverse(t0 * e + 1j * offset)
    state = {"ref": chart.root6(z_start)}

    def rhs(t, y):
        z = complex(y[0], y[1])
        root = _root6_near(chart.q(z), state["ref"])
        state["ref"] = root
        v = e / (chart.beta * root)
        return [v.real, v.imag]

    sol = solve_ivp(rhs, (0.0, length), [z_start.real, z_start.imag], method="DOP853",
                    rtol=1e-12, atol=1e-12, dense_output=True)
    if not sol.success:
        raise TransportError(sol.message)

    def z_of(t):
        y = sol.sol(t)
        return complex(y[0], y[1])

    def dz_of(t):
        y = sol.sol(t)
        return complex(*rhs(t, y))

    return Path(z_of, dz_of, length, f"chart {chart.k} dir {direction:.4f} offset {offset:.4f}")


@dataclass(frozen=True)
class Ray:
    """A Euclidean ray from the origin with its stability classification."""

    angle: float
    degree: int
    index: int | None = None

    @property
    def chart_angle(self):
        return (self.degree + 6) * self.angle / 6

    @property
    def critical_distance(self):
        """Distance of the asymptotic chart angle from the critical set {k pi/6}."""
        a = self.chart_angle % (math.pi / 6)
        return min(a, math.pi / 6 - a)

    @property
    def stable(self):
        return self.critical_distance >= math.pi / 24

    def path(self, length=40.0):
        return euclidean_ray(self.angle, 0j, length)


def vertex_rays(q: SexticPoly):
    n = q.degree
    return [Ray(2 * math.pi * (k + 0.25) / (n + 6), n, k) for k in range(n + 6)]


@dataclass
class EdgeSpec:
    chart: int
    offset: float
    direction: float = math.pi / 3


def edge_rays(q: SexticPoly, k, offsets, direction=math.pi / 3):
    """Critical paths in chart k whose limits sweep the edge between vertices k and k+1."""
    return [EdgeSpec(k, float(y0), direction) for y0 in offsets]


# ---------------------------------------------------------------------------
# integration


def real_frame_at_origin(field: MetricField):
    """Matrix taking ComplexB coordinates at the origin to real M coordinates."""
    m = field.sample(0j)
    return MB @ np.diag(metric_diag(m.r, m.s) ** 0.5)


def _magnus_step(field, path, t, h):
    c1, c2 = 0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6
    a1 = balanced_connection(field.sample(path.z(t + c1 * h)), path.dz(t + c1 * h))
    a2 = balanced_connection(field.sample(path.z(t + c2 * h)), path.dz(t + c2 * h))
    omega = 0.5 * h * (a1 + a2) + (math.sqrt(3) / 12) * h * h * (a1 @ a2 - a2 @ a1)
    return expm(omega), max(np.abs(a1).sum(axis=0).max(), np.abs(a2).sum(axis=0).max())


@dataclass
class FrameState:
    """Rescaled balanced transport matrix Psi~ and its accumulated log-scale."""

    psi: np.ndarray
    log_scale: float = 0.0


def initial_state(field: MetricField) -> FrameState:
    m = field.sample(0j)
    return FrameState(np.diag(metric_diag(m.r, m.s) ** -0.5).astype(complex))


def advance(field, path: Path, state: FrameState, t_end, h_max=0.05, step_bound=0.1, on_step=None):
    """Integrate the balanced transport along `path` from 0 to t_end in place."""
    t = 0.0
    h = min(h_max, t_end)
    while t < t_end - 1e-14:
        h = min(h, t_end - t)
        step, norm = _magnus_step(field, path, t, h)
        if norm * h > step_bound and h > 1e-6:
            # the safety factor stops a shrinking step from chasing a rising norm forever
            h = 0.8 * step_bound / norm
            continue
        state.psi = state.psi @ step
        scale = np.abs(state.psi).max()
        state.psi /= scale
        state.log_scale += math.log(scale)
        t += h
        if on_step is not None:
            on_step(t, state)
        h = min(h_max, step_bound / max(norm, 1e-12))
    return state


def transport_to(field: MetricField, z, h_max=0.02) -> FrameState:
    """Balanced transport along the straight segment from the origin to z."""
    state = initial_state(field)
    if z != 0:
        advance(field, segment(0j, complex(z)), state, 1.0, h_max=h_max / max(abs(z), 1e-12))
    return state


def rk4_transport(field: MetricField, z, steps=400) -> np.ndarray:
    """Psi(z) along the segment from the origin by classical RK4 on Psi' = Psi A, unbalanced.

    An independent route to the Magnus integrator; only sensible where Psi stays
    moderate, e.g. the model surface at small |z|.
    """
    z = complex(z)

    def a_at(t):
        a10, a01 = connection(field.sample(t * z))
        return a10 * z + a01 * np.conj(z)

    psi = np.eye(7, dtype=complex)
    h = 1.0 / steps
    for k in range(steps):
        t = k * h
        a0, am, a1 = a_at(t), a_at(t + h / 2), a_at(t + h)
        k1 = psi @ a0
        k2 = (psi + h / 2 * k1) @ am
        k3 = (psi + h / 2 * k2) @ am
        k4 = (psi + h * k3) @ a1
        psi = psi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi


def projective_distance(u, v):
    """sin of the angle between the lines spanned by u and v."""
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    return float(np.linalg.norm(u - np.vdot(v, u) * v))


@dataclass
class TransportResult:
    limit: np.ndarray
    converged: bool
    cauchy: float
    log_scale: list = field(default_factory=list)
    samples: list = field(default_factory=list)
    isotropy_drift: float = 0.0
    label: str = ""

    def to_json(self, angle=None, stable=None):
        return json.dumps({
            "angle": angle,
            "stable": stable,
            "limit_vector": [float(x) for x in self.limit],
            "cauchy": self.cauchy,
            "log_scale": self.log_scale[-1][1] if self.log_scale else 0.0,
        })


def _real_unit(frame_map, state: FrameState):
    v = frame_map @ state.psi[:, 3]
    if np.abs(v.imag).max() > 1e-6 * np.abs(v).max():
        raise TransportError("transported curve vector left the real form")
    v = v.real
    return v / np.linalg.norm(v)


def _q_real(v):
    return float(v[:3] @ v[:3] - v[3:] @ v[3:])


def transport_nu(field: MetricField, path: Path, prefix: Path | None = None, cauchy_tol=1e-6,
                 sample_ratio=1.15, t_first=1.0, h_max=0.05) -> TransportResult:
    """Transport u_0 along `prefix` (if any) then `path`, until the projective limit settles.

    Samples are taken at t = t_first * sample_ratio^j; the limit is declared when
    three successive samples are pairwise within `cauchy_tol`.
    """
    frame_map = real_frame_at_origin(field)
    state = initial_state(field)
    if prefix is not None:
        advance(field, prefix, state, prefix.length, h_max=h_max / max(abs(prefix.dz(0)), 1e-12))
    samples = []
    scales = []
    drift = 0.0
    t_done = 0.0
    t_next = t_first
    while t_next <= path.length:
        shifted = Path(lambda s, t0=t_done: path.z(t0 + s), lambda s, t0=t_done: path.dz(t0 + s),
                       t_next - t_done)
        advance(field, shifted, state, t_next - t_done, h_max=h_max)
        t_done = t_next
        v = _real_unit(frame_map, state)
        raw = (frame_map @ state.psi[:, 3]).real
        # q(nu) = 1 for nu = e^L raw, so the unit vector has q = exp(-2 L) / |raw|^2
        expected = math.exp(-2 * (state.log_scale + math.log(np.linalg.norm(raw))))
        drift = max(drift, abs(_q_real(v) - expected))
        samples.append((t_done, v))
        scales.append((t_done, state.log_scale))
        if len(samples) >= 3:
            last = [s[1] for s in samples[-3:]]
            inc = max(projective_distance(last[0], last[1]), projective_distance(last[1], last[2]),
                      projective_distance(last[0], last[2]))
            if inc < cauchy_tol:
                return TransportResult(v, True, inc, scales, samples, drift, path.label)
        t_next *= sample_ratio
    inc = projective_distance(samples[-1][1], samples[-2][1]) if len(samples) > 1 else math.inf
    return TransportResult(samples[-1][1], False, inc, scales, samples, drift, path.label)


def ray_limit(field: MetricField, ray: Ray, length=None, **kw) -> TransportResult:
    n = ray.degree
    if length is None:
        # about 40 flat units
        length = (40 * (n + 6) / 6) ** (6 / (n + 6)) + 2
    return transport_nu(field, ray.path(length), **kw)


def edge_limit(field: MetricField, q: SexticPoly, edge: EdgeSpec, t0=1.0, length=40.0, **kw):
    """Limit along a critical chart path, reached from the origin by a straight segment."""
    chart = NaturalChart(q, edge.chart)
    path = chart_path(chart, edge.direction, edge.offset, t0, length)
    return transport_nu(field, path, prefix=segment(0j, path.z(0.0)), **kw)
