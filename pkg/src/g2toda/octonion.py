"""Split octonions, their cross product, and the bases used throughout the package.

The split octonions are built by doubling the quaternions: a pair (a, b) of
quaternions stands for a + l b, and

    (a, b) (c, d) = (a c + d b*, a* d + c b).

The standard multiplication basis is M = (1, i, j, k, l, li, lj, lk) and the
quadratic form q(x) = x x* is diag(1, 1, 1, 1, -1, -1, -1, -1) in it.

Two arithmetic paths are kept separate.  `SplitOctonion` works on exact
rationals (or on complex floats) through an integer structure-constant table,
and the vectorised helpers (`mul_array`, `cross_m`, ...) act on numpy arrays of
7- or 8-vectors for the numerical parts of the pipeline.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Number

import numpy as np

NAMES = ("1", "i", "j", "k", "l", "li", "lj", "lk")
IM_NAMES = NAMES[1:]

Q8 = np.diag([1.0, 1, 1, 1, -1, -1, -1, -1])
Q7 = np.diag([1.0, 1, 1, -1, -1, -1, -1])

DEFAULT_TOL = 1e-10


class KindMismatchError(TypeError):
    """Raised when exact and floating scalars are mixed in one operation."""


class DomainError(ValueError):
    """Raised when an operation receives input outside its domain."""


# ---------------------------------------------------------------------------
# structure constants


def _quat_mul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def _quat_conj(a):
    return (a[0], -a[1], -a[2], -a[3])


def _doubled_mul(x, y):
    a, b = x[:4], x[4:]
    c, d = y[:4], y[4:]
    first = tuple(s + t for s, t in zip(_quat_mul(a, c), _quat_mul(d, _quat_conj(b))))
    second = tuple(s + t for s, t in zip(_quat_mul(_quat_conj(a), d), _quat_mul(c, b)))
    return first + second


def _build_table():
    """Product of basis elements as (sign, index) pairs."""
    units = [tuple(int(i == k) for i in range(8)) for k in range(8)]
    table = []
    for a in range(8):
        row = []
        for b in range(8):
            prod = _doubled_mul(units[a], units[b])
            (idx,) = [k for k in range(8) if prod[k] != 0]
            row.append((prod[idx], idx))
        table.append(tuple(row))
    return tuple(table)


TABLE = _build_table()

MULT = np.zeros((8, 8, 8))
for _a in range(8):
    for _b in range(8):
        _sign, _c = TABLE[_a][_b]
        MULT[_a, _b, _c] = _sign

# cross product on imaginary parts: x cross y = Im(x y) for imaginary x, y
CROSS = MULT[1:, 1:, 1:].copy()


def product_table():
    """The 8x8 multiplication table as strings such as '-li'."""
    return [
        [("-" if TABLE[a][b][0] < 0 else "") + NAMES[TABLE[a][b][1]] for b in range(8)]
        for a in range(8)
    ]


# ---------------------------------------------------------------------------
# scalar kinds


def _is_exact(value):
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def scalar_kind(coords):
    """Return 'exact' when every coordinate is rational, else 'float'."""
    return "exact" if all(_is_exact(c) for c in coords) else "float"


def _common_denominator(coords):
    return reduce(math.lcm, (Fraction(c).denominator for c in coords), 1)


@dataclass(frozen=True)
class SplitOctonion:
    """An element of Oct' with coordinates in the basis (1, i, j, k, l, li, lj, lk)."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(self.coords)
        if len(coords) != 8:
            raise ValueError("a split octonion needs 8 coordinates")
        if scalar_kind(coords) == "exact":
            coords = tuple(Fraction(c) for c in coords)
        else:
            coords = tuple(complex(c) for c in coords)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def basis(cls, name, exact=True):
        k = NAMES.index(name)
        one = Fraction(1) if exact else 1.0 + 0j
        zero = Fraction(0) if exact else 0j
        return cls(tuple(one if i == k else zero for i in range(8)))

    @property
    def kind(self):
        return "exact" if isinstance(self.coords[0], Fraction) else "float"

    def _check_kind(self, other):
        if self.kind != other.kind:
            raise KindMismatchError(f"cannot combine {self.kind} and {other.kind} scalars")

    def __add__(self, other):
        self._check_kind(other)
        return SplitOctonion(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check_kind(other)
        return SplitOctonion(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return SplitOctonion(tuple(-a for a in self.coords))

    def scale(self, factor):
        if self.kind == "exact" and not _is_exact(factor):
            raise KindMismatchError("exact octonion scaled by a float")
        return SplitOctonion(tuple(factor * a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.scale(other)
        return mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def conj(self):
        return conj(self)

    @property
    def real(self):
        return self.coords[0]

    def is_imaginary(self):
        return self.coords[0] == 0

    def im(self):
        return self.coords[1:]


def mul(a: SplitOctonion, b: SplitOctonion) -> SplitOctonion:
    """The split-octonion product a b."""
    a._check_kind(b)
    if a.kind == "exact":
        da, db = _common_denominator(a.coords), _common_denominator(b.coords)
        xa = [int(c * da) for c in a.coords]
        xb = [int(c * db) for c in b.coords]
        out = [0] * 8
        for i, ai in enumerate(xa):
            if ai == 0:
                continue
            row = TABLE[i]
            for j, bj in enumerate(xb):
                if bj:
                    sign, k = row[j]
                    out[k] += sign * ai * bj
        den = da * db
        return SplitOctonion(tuple(Fraction(c, den) for c in out))
    out = [0j] * 8
    for i, ai in enumerate(a.coords):
        if ai == 0:
            continue
        row = TABLE[i]
        for j, bj in enumerate(b.coords):
            if bj != 0:
                sign, k = row[j]
                out[k] += sign * ai * bj
    return SplitOctonion(tuple(out))


def conj(a: SplitOctonion) -> SplitOctonion:
    """Conjugation: fixes the reals and negates the imaginary part."""
    return SplitOctonion((a.coords[0],) + tuple(-c for c in a.coords[1:]))


def qform(a: SplitOctonion, b: SplitOctonion | None = None):
    """The split quadratic form q(a) or its polarisation q(a, b)."""
    b = a if b is None else b
    a._check_kind(b)
    signs = (1, 1, 1, 1, -1, -1, -1, -1)
    return sum(s * x * y for s, x, y in zip(signs, a.coords, b.coords))


def norm_via_conj(a: SplitOctonion):
    """q(a) computed as the real part of a a*; the imaginary part vanishes."""
    prod = mul(a, conj(a))
    return prod.coords[0], prod.coords[1:]


def cross_oct(a: SplitOctonion, b: SplitOctonion) -> SplitOctonion:
    """Cross product of imaginary octonions, the imaginary part of a b."""
    if not (a.is_imaginary() and b.is_imaginary()):
        raise DomainError("cross product is defined on imaginary octonions")
    prod = mul(a, b)
    zero = Fraction(0) if prod.kind == "exact" else 0j
    return SplitOctonion((zero,) + prod.coords[1:])


def triple_oct(a, b, c):
    """Scalar triple product (a x b) . c on imaginary octonions."""
    return qform(cross_oct(a, b), c)


def from_im(coords) -> SplitOctonion:
    """Embed 7 imaginary coordinates as an octonion."""
    coords = tuple(coords)
    zero = Fraction(0) if scalar_kind(coords) == "exact" else 0j
    return SplitOctonion((zero,) + coords)


# ---------------------------------------------------------------------------
# vectorised float helpers on the imaginary part, basis (i, j, k, l, li, lj, lk)


def mul_array(x, y):
    """Product of octonions stored along the last axis (length 8)."""
    return np.einsum("...a,...b,abc->...c", x, y, MULT)


def cross_m(x, y):
    """Cross product of imaginary vectors in M coordinates (last axis length 7)."""
    return np.einsum("...a,...b,abc->...c", x, y, CROSS)


def dot_m(x, y):
    """Complex-bilinear q on imaginary vectors in M coordinates."""
    return np.einsum("...a,a,...a->...", x, np.diag(Q7), y)


def triple_m(x, y, z):
    return dot_m(cross_m(x, y), z)


# ---------------------------------------------------------------------------
# distinguished bases


def _im_unit(name):
    v = np.zeros(7, dtype=complex)
    v[IM_NAMES.index(name)] = 1
    return v


def _im_product(p, r):
    """Imaginary part of the product of two named basis elements."""
    x = np.zeros(8)
    y = np.zeros(8)
    x[NAMES.index(p)] = 1
    y[NAMES.index(r)] = 1
    return mul_array(x, y)[1:].astype(complex)


def _complex_basis():
    s2 = math.sqrt(2)
    jl, kl, il = _im_product("j", "l"), _im_product("k", "l"), _im_product("i", "l")
    j, k, l = _im_unit("j"), _im_unit("k"), _im_unit("l")
    u3 = (jl + 1j * kl) / s2
    u2 = (j + 1j * k) / s2
    u1 = (l + 1j * il) / s2
    u0 = _im_unit("i")
    return np.column_stack([u3, u2, u1, u0, u1.conj(), u2.conj(), u3.conj()])


# columns are u_3, u_2, u_1, u_0, u_-1, u_-2, u_-3 in M coordinates
MB = _complex_basis()
MB_INV = np.linalg.inv(MB)
COMPLEX_LABELS = (3, 2, 1, 0, -1, -2, -3)

XI = np.exp(1j * np.pi / 6)

# anti-diagonal exchange matrix
QFLIP = np.fliplr(np.eye(7))


def _clock_s():
    a = 1 / math.sqrt(2)
    r3 = 1j * math.sqrt(3)
    x = XI
    rows = [
        [a] * 6 + [r3],
        [x**11, x**9, x**7, x**5, x**3, x, 0],
        [x**10, -1, x**2, x**10, -1, x**2, 0],
        [-1, 1, -1, 1, -1, 1, 0],
        [x**2, -1, x**10, x**2, -1, x**10, 0],
        [x, x**3, x**5, x**7, x**9, x**11, 0],
        [a] * 6 + [-r3],
    ]
    return np.array(rows, dtype=complex) / math.sqrt(6)


# S: eigenbasis factor in complex-basis coordinates, columns x_1, x_3, ..., x_11, x_0
CLOCK_S = _clock_s()
CLOCK_LABELS = (1, 3, 5, 7, 9, 11, 0)

# W: the same vectors in graded order x_3, x_5, x_1, x_0, x_7, x_11, x_9
GRADED_LABELS = (3, 5, 1, 0, 7, 11, 9)
CLOCK_W = CLOCK_S[:, [CLOCK_LABELS.index(k) for k in GRADED_LABELS]]


def model_metric_diag():
    """Diagonal of the constant harmonic metric for the constant sextic differential."""
    d = 5 / (6 * math.sqrt(3))
    r0 = (2 / 5) ** (1 / 3)
    s0 = d ** (1 / 3)
    return np.array([1 / (r0 * s0), 1 / r0, 1 / s0, 1, s0, r0, r0 * s0])


class BasisTag(str, enum.Enum):
    STANDARD_M = "StandardM"
    COMPLEX_B = "ComplexB"
    CLOCK_W = "ClockW"
    CLOCK_C = "ClockC"
    GRADED_E0 = "GradedE0"


def basis_matrix(tag) -> np.ndarray:
    """Columns are the basis vectors of `tag` written in M coordinates.

    The clock bases are real: they are read through the unitary real frame
    H^(-1/2) M, in which the metric factor drops out.  GradedE0 is the complex
    eigenbasis E0 = H0^(-1/2) S read through the complex basis itself.
    """
    tag = BasisTag(tag)
    if tag is BasisTag.STANDARD_M:
        return np.eye(7, dtype=complex)
    if tag is BasisTag.COMPLEX_B:
        return MB
    if tag is BasisTag.CLOCK_C:
        return (MB @ CLOCK_S).real.astype(complex)
    if tag is BasisTag.CLOCK_W:
        return (MB @ CLOCK_W).real.astype(complex)
    return MB @ np.diag(model_metric_diag() ** -0.5) @ CLOCK_S


def conversion_matrix(src, dst) -> np.ndarray:
    """Matrix taking coordinates in `src` to coordinates in `dst`."""
    src, dst = BasisTag(src), BasisTag(dst)
    return np.linalg.solve(basis_matrix(dst), basis_matrix(src))


def gram_matrix(tag) -> np.ndarray:
    """The bilinear form q in the basis `tag`."""
    b = basis_matrix(tag)
    return b.T @ Q7 @ b


@dataclass(frozen=True)
class ImVector:
    """Seven coordinates of a vector of (Im Oct')^C in a tagged basis."""

    coords: tuple
    basis: BasisTag = BasisTag.STANDARD_M

    def __post_init__(self):
        coords = tuple(self.coords)
        if len(coords) != 7:
            raise ValueError("an imaginary vector needs 7 coordinates")
        if scalar_kind(coords) == "exact":
            coords = tuple(Fraction(c) for c in coords)
        else:
            coords = tuple(complex(c) for c in coords)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "basis", BasisTag(self.basis))

    @property
    def kind(self):
        return "exact" if isinstance(self.coords[0], Fraction) else "float"

    def array(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coords])

    def to(self, tag) -> "ImVector":
        return change_basis(self, tag)

    def standard(self) -> np.ndarray:
        return change_basis(self, BasisTag.STANDARD_M).array()


def change_basis(v: ImVector, to) -> ImVector:
    """Re-express `v` in the basis `to`.

    Exact StandardM vectors stay exact when the target is StandardM.
    """
    to = BasisTag(to)
    if to is v.basis:
        return v
    out = conversion_matrix(v.basis, to) @ v.array()
    return ImVector(tuple(out), to)


def qform_im(u: ImVector, v: ImVector | None = None):
    """q(u, v) evaluated in u's basis (v is converted to it)."""
    v = u if v is None else v.to(u.basis)
    if u.kind == "exact" and v.kind == "exact" and u.basis is BasisTag.STANDARD_M:
        return qform(from_im(u.coords), from_im(v.coords))
    return complex(u.array() @ gram_matrix(u.basis) @ v.array())


def cross(u: ImVector, v: ImVector) -> ImVector:
    """Cross product, returned in u's basis."""
    if u.kind == "exact" and v.kind == "exact" and u.basis is v.basis is BasisTag.STANDARD_M:
        return ImVector(cross_oct(from_im(u.coords), from_im(v.coords)).im())
    x = cross_m(u.standard(), v.standard())
    return ImVector(tuple(x), BasisTag.STANDARD_M).to(u.basis)


def triple(x: ImVector, y: ImVector, z: ImVector):
    """Scalar triple product (x cross y) . z."""
    return qform_im(cross(x, y), z)


def cross_endomorphism(u_m) -> np.ndarray:
    """Matrix of y -> u x y in M coordinates."""
    return np.einsum("a,abc->cb", np.asarray(u_m), CROSS)


# ---------------------------------------------------------------------------
# cross-product preserving maps


def _probe_pairs():
    return [(a, b) for a in range(7) for b in range(a + 1, 7)]


def _as_m_matrix(matrix, basis):
    b = basis_matrix(basis)
    return b @ np.asarray(matrix, dtype=complex) @ np.linalg.inv(b)


def multiplicativity_defect(matrix, basis=BasisTag.STANDARD_M) -> float:
    """max over the 21 basis pairs of |g(x cross y) - g x cross g y|."""
    g = _as_m_matrix(matrix, basis)
    e = np.eye(7)
    worst = 0.0
    for a, b in _probe_pairs():
        lhs = g @ cross_m(e[a], e[b])
        rhs = cross_m(g[:, a], g[:, b])
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def derivation_defect(matrix, basis=BasisTag.STANDARD_M) -> float:
    """max over basis pairs of |A(x cross y) - Ax cross y - x cross Ay|."""
    a_m = _as_m_matrix(matrix, basis)
    e = np.eye(7)
    worst = 0.0
    for a in range(7):
        for b in range(7):
            lhs = a_m @ cross_m(e[a], e[b])
            rhs = cross_m(a_m[:, a], e[b]) + cross_m(e[a], a_m[:, b])
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


@dataclass(frozen=True)
class G2Certificate:
    defect: float
    det_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.defect <= self.tol and self.det_error <= self.tol


def is_g2(matrix, tol=DEFAULT_TOL, basis=BasisTag.STANDARD_M) -> G2Certificate:
    """Certify that `matrix` preserves the cross product.

    The defect is scaled by the largest column norm squared so the tolerance
    is relative.
    """
    g = _as_m_matrix(matrix, basis)
    scale = max(1.0, float(np.abs(g).max()) ** 2)
    defect = multiplicativity_defect(g) / scale
    det_error = abs(np.linalg.det(g) - 1)
    return G2Certificate(defect, det_error, tol)


@dataclass(frozen=True)
class G2Matrix:
    """A 7x7 matrix carrying its cross-product certificate."""

    entries: np.ndarray
    basis: BasisTag
    certificate: G2Certificate

    def in_basis(self, tag) -> np.ndarray:
        b = basis_matrix(tag)
        return np.linalg.solve(b, _as_m_matrix(self.entries, self.basis) @ b)

    def apply(self, v: ImVector) -> ImVector:
        return ImVector(tuple(self.in_basis(v.basis) @ v.array()), v.basis)

    def __matmul__(self, other: "G2Matrix") -> "G2Matrix":
        m = self.in_basis(BasisTag.STANDARD_M) @ other.in_basis(BasisTag.STANDARD_M)
        return certify(m, tol=max(self.certificate.tol, other.certificate.tol))


class NotG2Error(ValueError):
    pass


def certify(matrix, basis=BasisTag.STANDARD_M, tol=DEFAULT_TOL) -> G2Matrix:
    cert = is_g2(matrix, tol, basis)
    if not cert.passed:
        raise NotG2Error(f"cross-product defect {cert.defect:.3e}, det error {cert.det_error:.3e}")
    return G2Matrix(np.asarray(matrix, dtype=complex), BasisTag(basis), cert)


def _vec(x):
    if isinstance(x, ImVector):
        return x.standard()
    return np.asarray(x, dtype=complex)


def triplet_defect(x, y, z) -> float:
    """How far (x, y, z) is from x.x = y.y = 1, z.z = -1, orthogonal, z.(x cross y) = 0."""
    x, y, z = _vec(x), _vec(y), _vec(z)
    conds = [
        dot_m(x, x) - 1,
        dot_m(y, y) - 1,
        dot_m(z, z) + 1,
        dot_m(x, y),
        dot_m(x, z),
        dot_m(y, z),
        triple_m(x, y, z),
    ]
    return float(max(abs(c) for c in conds))


def build_mult_basis(x, y, z, tol=1e-8):
    """Multiplication basis (x, y, xy, z, zx, zy, z(xy)) from a valid triplet.

    Returned as a 7x7 array whose columns are in M coordinates.  Starting from
    (i, j, l) it reproduces M itself.
    """
    x, y, z = _vec(x), _vec(y), _vec(z)
    if triplet_defect(x, y, z) > tol:
        raise DomainError("triplet conditions violated")
    xy = cross_m(x, y)
    cols = [x, y, xy, z, cross_m(z, x), cross_m(z, y), cross_m(z, xy)]
    return np.column_stack(cols)


def stiefel_to_g2(src, dst, tol=1e-8) -> G2Matrix:
    """The unique G2' element carrying the triplet `src` to `dst`."""
    b_src = build_mult_basis(*src, tol=tol)
    b_dst = build_mult_basis(*dst, tol=tol)
    return certify(b_dst @ np.linalg.inv(b_src), tol=max(tol, DEFAULT_TOL))


def null_triple_defect(u, v, w) -> float:
    u, v, w = _vec(u), _vec(v), _vec(w)
    conds = [dot_m(u, u), dot_m(v, v), dot_m(w, w), dot_m(u, v), dot_m(v, w), dot_m(u, w),
             triple_m(v, w, u) - 1]
    return float(max(abs(c) for c in conds))


def _null_triple_residual(u, v, w):
    return np.array([dot_m(u, u), dot_m(v, v), dot_m(w, w), dot_m(u, v), dot_m(v, w), dot_m(u, w),
                     triple_m(v, w, u) - 1])


def snap_null_triple(u, v, w, iterations=8, tol=1e-14):
    """Nearest exact normalised null triple, by least-norm Gauss-Newton corrections.

    Meant for triples read off numerical data, whose defects are small but far
    above round-off.
    """
    u, v, w = (_vec(x).copy() for x in (u, v, w))
    for _ in range(iterations):
        res = _null_triple_residual(u, v, w)
        if np.abs(res).max() < tol:
            break
        qu, qv, qw = Q7 @ u, Q7 @ v, Q7 @ w
        zero = np.zeros(7)
        jac = np.array([
            np.concatenate([2 * qu, zero, zero]),
            np.concatenate([zero, 2 * qv, zero]),
            np.concatenate([zero, zero, 2 * qw]),
            np.concatenate([qv, qu, zero]),
            np.concatenate([zero, qw, qv]),
            np.concatenate([qw, zero, qu]),
            # d/du (v x w).u, d/dv (w x u).v, d/dw (u x v).w
            np.concatenate([Q7 @ cross_m(v, w), Q7 @ cross_m(w, u), Q7 @ cross_m(u, v)]),
        ])
        step = np.linalg.lstsq(jac, -res, rcond=None)[0]
        u, v, w = u + step[:7], v + step[7:14], w + step[14:]
    return u, v, w


def null_completion(u, v, w) -> np.ndarray:
    """Columns (u, v, w, u x v, v x w, w x u, (w x u) x v) of a null triple."""
    u, v, w = _vec(u), _vec(v), _vec(w)
    wu = cross_m(w, u)
    return np.column_stack([u, v, w, cross_m(u, v), cross_m(v, w), wu, cross_m(wu, v)])


def nulltriple_to_g2(src, dst, tol=1e-8) -> G2Matrix:
    """The unique G2' element carrying one normalised null triple to another."""
    for t in (src, dst):
        if null_triple_defect(*t) > tol:
            raise DomainError("not a normalised null triple")
    c_src = null_completion(*src)
    c_dst = null_completion(*dst)
    if abs(np.linalg.det(c_src)) < tol or abs(np.linalg.det(c_dst)) < tol:
        raise DomainError("null completion is degenerate")
    return certify(c_dst @ np.linalg.inv(c_src), tol=max(tol, DEFAULT_TOL))


def random_triplet(rng, scale=1.0):
    """A random element of the Stiefel set of (+, +, -) triplets.

    Gram-Schmidt on random vectors with q, then the last vector is also made
    orthogonal to x cross y.
    """
    def normalize(v, sign):
        n = dot_m(v, v).real
        if n * sign <= 1e-3:
            return None
        return v / math.sqrt(n * sign)

    while True:
        x = normalize(rng.normal(size=7) * scale, 1)
        if x is None:
            continue
        y = rng.normal(size=7) * scale
        y = normalize(y - dot_m(x, y).real * x, 1)
        if y is None:
            continue
        xy = cross_m(x, y).real
        z = rng.normal(size=7) * scale
        for b, s in ((x, 1), (y, 1), (xy, 1)):
            z = z - s * dot_m(b, z).real * b
        z = normalize(z, -1)
        if z is None:
            continue
        return x.astype(complex), y.astype(complex), z.astype(complex)


def random_g2(rng, scale=0.6) -> G2Matrix:
    """A random G2' element from the identity triplet to a random one."""
    i, j, l = _im_unit("i"), _im_unit("j"), _im_unit("l")
    return stiefel_to_g2((i, j, l), random_triplet(rng, scale))


def standard_null_triple():
    """The null triple (k + lk, i + li, j + lj) scaled so that v.(w x u) = 1.

    (i + li, j - lj, k - lk) would not do: all three lie in one annihilator, so
    their triple product vanishes.
    """
    u = _im_unit("k") + _im_unit("lk")
    v = _im_unit("i") + _im_unit("li")
    w = _im_unit("j") + _im_unit("lj")
    t = triple_m(v, w, u)
    return u / t, v, w


def random_null_triple(rng) -> tuple:
    g = random_g2(rng)
    return tuple(g.in_basis(BasisTag.STANDARD_M) @ x for x in standard_null_triple())
