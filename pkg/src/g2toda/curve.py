"""The almost-complex curve nu and its differential geometry at sample points.

At a point z the curve and its holomorphic derivatives are nu^(k) = Psi(z) p_k
with p_0 = u_0 and p_(k+1) = d p_k + A^{1,0} p_k, where Psi is the transport
matrix (Psi' = Psi A) and A^{1,0} = D_H + phi.  Since A^{1,0} u_0 = e~ u_0 is
constant,

    p_1 = e~ u_0,   p_2 = A^{1,0} p_1,   p_3 = (d A^{1,0}) p_1 + A^{1,0} p_2,

with d A^{1,0} = diag(d d log H) + q' e_gamma.  Psi is taken from the balanced
transport along the segment [0, z] and read in real M coordinates at the origin,
so all samples live in one copy of Im Oct' (complexified for derivatives).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .g2lie import higgs, unitary_frame
from .octonion import Q7, ImVector, cross_m, dot_m
from .transport import (
    E_GAMMA,
    E_TILDE,
    MetricField,
    connection,
    metric_diag,
    real_frame_at_origin,
    transport_to,
)

U0 = np.eye(7, dtype=complex)[3]


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class CurveSample:
    z: complex
    q: complex
    r: float
    s: float
    nu: ImVector
    nu_z: ImVector
    nu_zz: ImVector
    nu_zzz: ImVector
    frame: tuple  # w_1..w_7 transported, as real StandardM ImVectors

    def arrays(self):
        return tuple(v.array() for v in (self.nu, self.nu_z, self.nu_zz, self.nu_zzz))

    def frame_matrix(self) -> np.ndarray:
        return np.column_stack([w.array().real for w in self.frame])


def _ddlog_h(m):
    a, b = m.ddlog_r, m.ddlog_s
    return np.array([-(a + b), -a, -b, 0, b, a, a + b])


def derivative_vectors(m):
    """(p_0, p_1, p_2, p_3) in the complex basis at the sample point."""
    a10, _ = connection(m)
    da10 = np.diag(_ddlog_h(m)) + m.dq * E_GAMMA
    p1 = E_TILDE @ U0
    p2 = a10 @ p1
    p3 = da10 @ p1 + a10 @ p2
    return U0, p1, p2, p3


def _to_fibre(field: MetricField, z):
    """Matrix taking complex-basis coordinates at z to real M coordinates at the origin."""
    state = transport_to(field, z)
    m = field.sample(z)
    return math.exp(state.log_scale) * real_frame_at_origin(field) @ state.psi @ np.diag(
        metric_diag(m.r, m.s) ** 0.5), m


def sample(field: MetricField, z) -> CurveSample:
    z = complex(z)
    psi, m = _to_fibre(field, z)
    nu, nz, nzz, nzzz = (psi @ p for p in derivative_vectors(m))
    if np.abs(nu.imag).max() > 1e-8 * np.abs(nu).max():
        raise CurveError("curve vector is not real")
    frame_b = unitary_frame(m.r, m.s)
    frame = psi @ frame_b
    frame_vectors = tuple(ImVector(tuple(frame[:, k].real)) for k in range(7))
    return CurveSample(z, m.q, m.r, m.s, ImVector(tuple(nu.real)), ImVector(tuple(nz)),
                       ImVector(tuple(nzz)), ImVector(tuple(nzzz)), frame_vectors)


def sample_points(q, count=50, min_flat=2.0, max_radius=None, seed=0):
    """Points of a coarse lattice at q-flat distance >= min_flat from the zeros of q.

    The lattice is a polar grid (radii x angles) in the annulus between the
    smallest radius satisfying the distance bound on every ray and max_radius,
    thinned deterministically by the seed to `count` points.
    """
    from .toda import flat_distance_to_zeros

    roots = q.roots()
    centre = complex(np.mean(roots)) if roots.size else 0j
    angles = np.linspace(0, 2 * math.pi, 24, endpoint=False)
    radii = np.linspace(0.25, 8, 160)
    inner = 0.5
    if roots.size:
        for a in angles:
            pts = centre + radii * np.exp(1j * a)
            ok = flat_distance_to_zeros(q, pts) >= min_flat
            inner = max(inner, radii[np.argmax(ok)])
    max_radius = inner + 0.5 if max_radius is None else max_radius
    ring = np.linspace(inner, max_radius, 5)
    lattice = np.array([centre + r * np.exp(1j * (a + 0.13 * k)) for k, r in enumerate(ring)
                        for a in angles])
    rng = np.random.default_rng(seed)
    pick = rng.choice(lattice.size, size=min(count, lattice.size), replace=False)
    return lattice[np.sort(pick)]


# ---------------------------------------------------------------------------
# checks on a single sample


def hermitian(u, v):
    """<u, v> = q(u, conj v)."""
    return complex(dot_m(np.asarray(u), np.conj(np.asarray(v))))


def q_defect(cs: CurveSample) -> float:
    nu = cs.nu.array()
    return abs(complex(dot_m(nu, nu)) - 1)


def almost_complex_defect(cs: CurveSample, orientation=1) -> float:
    """|nu x nu_z - orientation i nu_z| / |nu_z|."""
    nu, nz = cs.nu.array(), cs.nu_z.array()
    return float(np.linalg.norm(cross_m(nu, nz) - orientation * 1j * nz) / np.linalg.norm(nz))


def induced_metric(cs: CurveSample, rtol=1e-4) -> float:
    """The conformal factor -12 s, checked against q(nu_x, nu_x) with nu_x = 2 Re nu_z."""
    expected = -12 * cs.s
    nu_x = 2 * cs.nu_z.array().real
    measured = float(dot_m(nu_x, nu_x).real)
    if abs(measured - expected) > rtol * abs(expected):
        raise CurveError(f"q(nu_x, nu_x) = {measured:.8g} but -12 s = {expected:.8g}")
    return expected


def conformality_defect(cs: CurveSample) -> float:
    nz = cs.nu_z.array()
    return abs(complex(dot_m(nz, nz))) / np.linalg.norm(nz) ** 2


@dataclass(frozen=True)
class HarmonicSequence:
    vectors: tuple  # nu~_0 .. nu~_3
    h: tuple  # h_1, h_2, h_3
    expected: tuple

    @property
    def relative_errors(self):
        return tuple(abs(a - b) / abs(b) for a, b in zip(self.h, self.expected))


def harmonic_sequence(cs: CurveSample) -> HarmonicSequence:
    """Gram-Schmidt of (nu, nu_z, nu_zz, nu_zzz) for <u, v> = q(u, conj v)."""
    seq = []
    for v in cs.arrays():
        w = v.copy()
        for b in seq:
            w = w - hermitian(w, b) / hermitian(b, b) * b
        seq.append(w)
    h = tuple(hermitian(b, b).real for b in seq[1:])
    if any(abs(x) < 1e-12 for x in h):
        raise CurveError("harmonic sequence is degenerate")
    r, s, aq2 = cs.r, cs.s, abs(cs.q) ** 2
    expected = (-6 * s, 30 * r, -30 * (aq2 / (r * s) + 3 * r * s))
    return HarmonicSequence(tuple(seq), h, expected)


def third_isotropy(cs: CurveSample) -> complex:
    """q(nu~_3, nu~_3), proportional to q(z) with constant 60 sqrt 3."""
    v = harmonic_sequence(cs).vectors[3]
    return complex(dot_m(v, v))


def recover_q(samples, rtol=1e-3) -> np.ndarray:
    """Ratios (nu_z x nu_zz) . nu_zzz / q(z); they must agree to rtol."""
    if len(samples) < 2:
        raise CurveError("need at least two samples")
    ratios = []
    for cs in samples:
        if cs.q == 0:
            raise CurveError("q vanishes at a sample")
        _, nz, nzz, nzzz = cs.arrays()
        ratios.append(complex(dot_m(cross_m(nz, nzz), nzzz)) / cs.q)
    ratios = np.array(ratios)
    spread = ratio_spread(ratios)
    if spread > rtol:
        raise CurveError(f"recovered q ratios spread by {spread:.3e}")
    return ratios


def ratio_spread(ratios) -> float:
    ratios = np.asarray(ratios)
    mean = ratios.mean()
    return float(np.abs(ratios - mean).max() / abs(mean))


# ---------------------------------------------------------------------------
# lifts


@dataclass(frozen=True)
class Lifts:
    f: np.ndarray  # 7x3, columns w1, w2, w3
    point: np.ndarray
    planes: tuple  # P, Q, R as 7x2 arrays
    closure_defect: float
    orthogonality_defect: float
    signatures: tuple
    product_defect: float
    nu_defect: float


def _span_defect(vectors, basis):
    qb, _ = np.linalg.qr(basis)
    return max(float(np.linalg.norm(v - qb @ (qb.T @ v)) / np.linalg.norm(v)) for v in vectors)


def _signature(block):
    g = block.T @ Q7 @ block
    ev = np.linalg.eigvalsh((g + g.T) / 2)
    return int((ev > 0).sum()), int((ev < 0).sum())


def lifts(cs: CurveSample, tol=1e-8) -> Lifts:
    """f = span(w1, w2, w3) and G = (w1, span(w2, w3), span(w4, w5), span(w6, w7))."""
    w = cs.frame_matrix()
    f = w[:, :3]
    closure = _span_defect([cross_m(f[:, a], f[:, b]) for a in range(3) for b in range(a + 1, 3)], f)
    blocks = [w[:, [0]], w[:, 1:3], w[:, 3:5], w[:, 5:7]]
    scale = np.linalg.norm(w, axis=0).max() ** 2
    orth = max(float(np.abs(blocks[a].T @ Q7 @ blocks[b]).max()) for a in range(4)
               for b in range(a + 1, 4)) / scale
    sigs = tuple(_signature(b) for b in blocks[1:])
    prod = _span_defect([cross_m(blocks[1][:, a], blocks[2][:, b]) for a in range(2)
                         for b in range(2)], blocks[3])
    nu = cs.nu.array().real
    nu_def = float(np.linalg.norm(nu / np.linalg.norm(nu) - w[:, 0] / np.linalg.norm(w[:, 0])))
    out = Lifts(f, w[:, 0], tuple(blocks[1:]), closure, orth, sigs, prod, nu_def)
    if sigs != ((2, 0), (0, 2), (0, 2)):
        raise CurveError(f"plane signatures {sigs}")
    return out


def frame_gram_defect(cs: CurveSample) -> float:
    """max |q-Gram(w) - diag(1, 1, 1, -1, -1, -1, -1)|: the frame is a real multiplication frame."""
    w = cs.frame_matrix()
    return float(np.abs(w.T @ Q7 @ w - Q7).max())


def symmetric_space_metric(qval, r, s) -> float:
    """2 tr(phi phi^*h), the conformal factor of the minimal surface in G2'/K."""
    data = higgs(qval, r, s)
    return 2 * float(np.trace(data.phi @ data.phi_adj).real)


# ---------------------------------------------------------------------------
# global checks


def linear_fullness(samples, rel_tol=1e-8) -> int:
    """Numerical rank of the unit-normalised sample vectors."""
    if len(samples) < 20:
        raise CurveError("linear fullness needs at least 20 samples")
    mat = np.array([cs.nu.array().real / np.linalg.norm(cs.nu.array()) for cs in samples])
    sv = np.linalg.svd(mat, compute_uv=False)
    return int((sv > rel_tol * sv[0]).sum())


def singular_values(samples) -> np.ndarray:
    mat = np.array([cs.nu.array().real / np.linalg.norm(cs.nu.array()) for cs in samples])
    return np.linalg.svd(mat, compute_uv=False)


def finite_difference_nu_z(field: MetricField, z, step=1e-3) -> np.ndarray:
    """nu_z from central differences of separately transported curve vectors."""
    def nu_at(w):
        psi, _ = _to_fibre(field, w)
        return (psi @ U0).real

    dx = (nu_at(z + step) - nu_at(z - step)) / (2 * step)
    dy = (nu_at(z + 1j * step) - nu_at(z - 1j * step)) / (2 * step)
    return 0.5 * (dx - 1j * dy)


def harmonic_sequence_residual(grid, margin=1.0):
    """max |(log|h_i|)_{z zbar} - (h_(i+1)/h_i - h_i/h_(i-1))| for i = 1, 2 on grid nodes.

    (.)_{z zbar} is a quarter of the fourth-order five-point Laplacian; nodes
    within `margin` of the boundary or of a zero of q are skipped.
    """
    from .transport import _fd4_second

    r, s = grid.r, grid.s
    aq2 = np.abs(grid.q(grid.z)) ** 2
    h = {0: np.ones_like(r), 1: -6 * s, 2: 30 * r, 3: -30 * (aq2 / (r * s) + 3 * r * s)}
    mask = (np.abs(grid.x)[:, None] < grid.radius - margin) & (np.abs(grid.x)[None, :] < grid.radius - margin)
    roots = grid.q.roots()
    for z0 in roots:
        mask &= np.abs(grid.z - z0) > margin
    out = []
    for i in (1, 2):
        lg = np.log(np.abs(h[i]))
        lap = (_fd4_second(lg, grid.h, 0) + _fd4_second(lg, grid.h, 1)) / 4
        rhs = h[i + 1] / h[i] - h[i] / h[i - 1]
        out.append(float(np.abs(lap - rhs)[mask].max()))
    return tuple(out)

