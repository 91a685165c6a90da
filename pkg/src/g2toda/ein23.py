"""Null lines of Im Oct', the discrete metric d3 and annihilator polygons.

Points of Ein^{2,3} are stored as unit Euclidean representatives in real M
coordinates.  Every classification compares the relevant quantity, divided by
the Euclidean norms involved, against `tol`; values inside [tol, 10 tol] are
reported as undetermined (None) rather than forced into a class.

The graded real cross-product basis used for normalisation is the clock basis
in the order (x_3, x_5, x_1, x_0, x_7, x_11, x_9), relabelled by grade as
(a_3, a_2, a_1, a_0, a_-1, a_-2, a_-3).  In it a_i x a_j is a multiple of
a_(i+j), q is anti-diagonal with q(a_i, a_-i) = -1, and a_0 x a = +a on
span(a_3, a_-1, a_-2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .octonion import (
    BasisTag,
    G2Matrix,
    ImVector,
    basis_matrix,
    certify,
    cross_endomorphism,
    cross_m,
    dot_m,
    mul_array,
    null_triple_defect,
    nulltriple_to_g2,
    random_null_triple,
    snap_null_triple,
    triple_m,
)

DEFAULT_TOL = 1e-6
BAND = 10.0

GRADES = (3, 2, 1, 0, -1, -2, -3)
GRADED = basis_matrix(BasisTag.CLOCK_W).real.copy()
GRADED_INV = np.linalg.inv(GRADED)


def graded(k) -> np.ndarray:
    """Basis vector a_k of the graded real basis, in M coordinates."""
    return GRADED[:, GRADES.index(k)]


def graded_coords(v) -> np.ndarray:
    return GRADED_INV @ np.asarray(v, dtype=float)


# (a_3 / t, a_-1, a_-2) is a normalised null triple
_T = triple_m(graded(-1), graded(-2), graded(3)).real
GRADED_TRIPLE = (graded(3) / _T, graded(-1), graded(-2))


class NotNullError(ValueError):
    pass


class AnnihilatorError(ValueError):
    pass


class D3ClassError(ValueError):
    pass


class NonGenericError(ValueError):
    pass


class BoundaryError(RuntimeError):
    pass


def _real(v) -> np.ndarray:
    if isinstance(v, ImVector):
        v = v.standard()
    v = np.asarray(v)
    if np.iscomplexobj(v):
        if np.abs(v.imag).max() > 1e-12 * max(np.abs(v).max(), 1.0):
            raise ValueError("null lines are real")
        v = v.real
    return v.astype(float)


def _q(v) -> float:
    return float(v[:3] @ v[:3] - v[3:] @ v[3:])


def _sign_fixed(v):
    k = int(np.argmax(np.abs(v)))
    return v if v[k] > 0 else -v


@dataclass(frozen=True)
class NullLine:
    """A point [x] of Ein^{2,3} with a unit representative."""

    rep: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        v = _real(self.rep)
        n = np.linalg.norm(v)
        if n == 0:
            raise NotNullError("zero vector")
        v = _sign_fixed(v / n)
        if abs(_q(v)) >= self.tol:
            raise NotNullError(f"|q| = {abs(_q(v)):.3e} is not below {self.tol:g}")
        object.__setattr__(self, "rep", v)

    @classmethod
    def of(cls, v, tol=DEFAULT_TOL) -> "NullLine":
        return v if isinstance(v, NullLine) else cls(v, tol)

    @property
    def vector(self) -> ImVector:
        return ImVector(tuple(self.rep), BasisTag.STANDARD_M)

    def angle_to(self, other: "NullLine") -> float:
        """sin of the angle between the two lines."""
        return float(np.linalg.norm(other.rep - (self.rep @ other.rep) * self.rep))

    def same_as(self, other: "NullLine") -> bool:
        return self.angle_to(other) < min(self.tol, other.tol)

    def transform(self, g) -> "NullLine":
        m = g.in_basis(BasisTag.STANDARD_M).real if isinstance(g, G2Matrix) else np.asarray(g).real
        return NullLine(m @ self.rep, self.tol)


# ---------------------------------------------------------------------------
# d3


@dataclass(frozen=True)
class PairMeasure:
    """Scale-free sizes of the invariants of a pair of unit null vectors."""

    angle: float
    cross: float
    dot: float


def pair_measure(x: NullLine, y: NullLine) -> PairMeasure:
    return PairMeasure(x.angle_to(y), float(np.linalg.norm(cross_m(x.rep, y.rep))),
                       abs(float(dot_m(x.rep, y.rep).real)))


def _level(value, tol):
    """0 for clearly zero, 1 for clearly nonzero, None inside the band."""
    if value < tol:
        return 0
    if value < BAND * tol:
        return None
    return 1


def d3(x, y, tol=None) -> int | None:
    """The discrete distance in {0, 1, 2, 3}, or None when undetermined."""
    x, y = NullLine.of(x), NullLine.of(y)
    tol = min(x.tol, y.tol) if tol is None else tol
    m = pair_measure(x, y)
    same = _level(m.angle, tol)
    if same is None:
        return None
    if same == 0:
        return 0
    crossed = _level(m.cross, tol)
    if crossed is None:
        return None
    if crossed == 0:
        return 1
    dotted = _level(m.dot, tol)
    if dotted is None:
        return None
    return 2 if dotted == 0 else 3


# ---------------------------------------------------------------------------
# annihilators


def annihilator(u, rel_tol=1e-4) -> np.ndarray:
    """Orthonormal (Euclidean) basis of Ann(u) as the columns of a 7x3 array.

    The kernel of y -> u x y is read from the SVD; singular values below
    rel_tol times the largest count as zero, and exactly three must.
    """
    u = NullLine.of(u)
    c = cross_endomorphism(u.rep).real
    _, sv, vt = np.linalg.svd(c)
    small = sv < rel_tol * sv[0]
    if int(small.sum()) != 3:
        raise AnnihilatorError(f"kernel dimension {int(small.sum())}, singular values {sv}")
    return vt[small].T


def span_residual(vectors, basis) -> float:
    """Largest distance from a unit vector in `vectors` to the column span of `basis`."""
    qb, _ = np.linalg.qr(np.asarray(basis))
    worst = 0.0
    for v in vectors:
        v = np.asarray(v) / np.linalg.norm(v)
        worst = max(worst, float(np.linalg.norm(v - qb @ (qb.T @ v))))
    return worst


def midpoint(x, y) -> NullLine:
    """The unique point at distance one from both ends of a distance-two pair."""
    x, y = NullLine.of(x), NullLine.of(y)
    dist = d3(x, y)
    if dist != 2:
        raise D3ClassError(f"midpoint needs d3 = 2, got {dist}")
    return NullLine(cross_m(x.rep, y.rep).real, max(x.tol, y.tol))


# ---------------------------------------------------------------------------
# polygons


@dataclass(frozen=True)
class GenericityReport:
    status: str  # "generic", "non-generic" or "undetermined"
    pairs: dict = field(default_factory=dict)  # (i, j) -> d3 for cyclic distance >= 3

    @property
    def generic(self) -> bool | None:
        return {"generic": True, "non-generic": False}.get(self.status)

    def to_json_obj(self):
        return {"status": self.status,
                "pairs": [[i, j, v] for (i, j), v in sorted(self.pairs.items())]}


def cyclic_distance(i, j, n) -> int:
    d = abs(i - j) % n
    return min(d, n - d)


def d3_matrix(vertices, tol=None) -> list:
    n = len(vertices)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            out[i][j] = out[j][i] = d3(vertices[i], vertices[j], tol)
    return out


def genericity_from_matrix(dmat) -> GenericityReport:
    n = len(dmat)
    pairs = {}
    for i in range(n):
        for j in range(i + 1, n):
            if cyclic_distance(i, j, n) >= 3:
                pairs[(i, j)] = dmat[i][j]
    values = list(pairs.values())
    if any(v is None for v in values):
        status = "undetermined"
    elif all(v == 3 for v in values):
        status = "generic"
    else:
        status = "non-generic"
    return GenericityReport(status, pairs)


@dataclass(frozen=True)
class AnnihilatorPolygon:
    """A cyclically ordered list of null lines with its d3 data."""

    vertices: tuple
    marked: int = 0
    d3_matrix: list = None
    generic: GenericityReport = None

    def __post_init__(self):
        verts = tuple(NullLine.of(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if self.d3_matrix is None:
            object.__setattr__(self, "d3_matrix", d3_matrix(verts))
        if self.generic is None:
            object.__setattr__(self, "generic", genericity_from_matrix(self.d3_matrix))

    def __len__(self):
        return len(self.vertices)

    def vertex(self, i) -> NullLine:
        """Vertex i counted cyclically from the marked one."""
        return self.vertices[(self.marked + i) % len(self.vertices)]

    def array(self) -> np.ndarray:
        return np.array([v.rep for v in self.vertices])

    def transform(self, g) -> "AnnihilatorPolygon":
        return AnnihilatorPolygon(tuple(v.transform(g) for v in self.vertices), self.marked)

    def to_json(self) -> str:
        return json.dumps({
            "vertices": [[float(c) for c in v.rep] for v in self.vertices],
            "marked": int(self.marked),
            "d3_matrix": self.d3_matrix,
            "generic_report": self.generic.to_json_obj(),
            "tol": self.vertices[0].tol if self.vertices else DEFAULT_TOL,
        }, indent=1)

    @classmethod
    def from_json(cls, text) -> "AnnihilatorPolygon":
        data = json.loads(text)
        tol = float(data.get("tol", DEFAULT_TOL))
        verts = tuple(NullLine(np.array(v, dtype=float), tol) for v in data["vertices"])
        return cls(verts, int(data.get("marked", 0)))


def polygon(vectors, marked=0, tol=DEFAULT_TOL) -> AnnihilatorPolygon:
    return AnnihilatorPolygon(tuple(NullLine(v, tol) for v in vectors), marked)


# ---------------------------------------------------------------------------
# validation


CONDITIONS = ("self_product", "adjacent_product", "orthogonal", "opposite_dot", "cross_midpoint",
              "annihilator_span")


@dataclass
class ValidationReport:
    """Per-condition worst values and failing indices."""

    worst: dict
    failures: dict
    tol: float

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())

    def passed_condition(self, name) -> bool:
        return not self.failures[name]

    def to_json_obj(self):
        return {"passed": self.passed,
                "conditions": {k: {"pass": not self.failures[k], "worst": self.worst[k],
                                   "failing_indices": self.failures[k]} for k in CONDITIONS}}


def _octonion(v):
    return np.concatenate([[0.0], v])


def validate(poly: AnnihilatorPolygon, tol=None, ann_tol=1e-4) -> ValidationReport:
    """Check the annihilator-polygon conditions vertex by vertex.

    self_product      p_i p_i = 0 (nullity)
    adjacent_product  p_i p_(i+1) = 0 (octonion product)
    orthogonal        p_i . p_(i+1) = 0 and p_i . p_(i+2) = 0
    opposite_dot      p_i . p_(i+3) is clearly nonzero
    cross_midpoint    p_i x p_(i+2) is a nonzero multiple of p_(i+1)
    annihilator_span  Ann(p_i) = span(p_(i-1), p_i, p_(i+1))
    """
    verts = [v.rep for v in poly.vertices]
    n = len(verts)
    if n < 6:
        raise ValueError("a polygon needs at least six vertices")
    tol = poly.vertices[0].tol if tol is None else tol
    worst = {k: 0.0 for k in CONDITIONS}
    failures = {k: [] for k in CONDITIONS}

    def record(name, i, value, ok):
        if name == "opposite_dot":
            worst[name] = value if i == 0 else min(worst[name], value)
        else:
            worst[name] = max(worst[name], value)
        if not ok and i not in failures[name]:
            failures[name].append(i)

    for i in range(n):
        p0, p1, p2, p3 = (verts[(i + k) % n] for k in range(4))
        pm = verts[(i - 1) % n]
        sq = float(np.abs(mul_array(_octonion(p0), _octonion(p0))).max())
        record("self_product", i, sq, sq < tol)
        ad = float(np.abs(mul_array(_octonion(p0), _octonion(p1))).max())
        record("adjacent_product", i, ad, ad < tol)
        orth = max(abs(float(dot_m(p0, p1).real)), abs(float(dot_m(p0, p2).real)))
        record("orthogonal", i, orth, orth < tol)
        op = abs(float(dot_m(p0, p3).real))
        record("opposite_dot", i, op, op >= BAND * tol)
        c = cross_m(p0, p2).real
        cn = np.linalg.norm(c)
        off = float(np.linalg.norm(c / cn - (c / cn @ p1) * p1)) if cn > BAND * tol else math.inf
        record("cross_midpoint", i, off, off < tol)
        try:
            ann = annihilator(poly.vertices[i], ann_tol)
            nb = np.column_stack([pm, p0, p1])
            sv = np.linalg.svd(nb, compute_uv=False)
            res = span_residual([pm, p0, p1], ann) if sv[-1] > BAND * tol else math.inf
        except AnnihilatorError:
            res = math.inf
        record("annihilator_span", i, res, res < tol)
    return ValidationReport(worst, failures, tol)


def genericity(poly: AnnihilatorPolygon) -> GenericityReport:
    return genericity_from_matrix(poly.d3_matrix)


def consecutive_rank(poly: AnnihilatorPolygon, window=6, rel_tol=1e-8) -> int:
    """Smallest numerical rank over cyclic windows of consecutive vertices."""
    a = poly.array()
    n = len(a)
    ranks = []
    for i in range(n):
        block = np.array([a[(i + k) % n] for k in range(window)])
        sv = np.linalg.svd(block, compute_uv=False)
        ranks.append(int((sv > rel_tol * sv[0]).sum()))
    return min(ranks)


# ---------------------------------------------------------------------------
# constructions


def hexagon_from_null_triple(u, v, w) -> AnnihilatorPolygon:
    """([u], [u x v], [v], [v x w], [w], [w x u]) for a null triple."""
    u, v, w = (np.asarray(x).real for x in (u, v, w))
    return polygon([u, cross_m(u, v).real, v, cross_m(v, w).real, w, cross_m(w, u).real])


def _unit(v):
    return v / np.linalg.norm(v)


def _random_in_annihilator(rng, prev, avoid, tries=200):
    """A random point of Ann(prev) off the orthogonal complements of `avoid`."""
    basis = annihilator(prev)
    for _ in range(tries):
        v = basis @ rng.normal(size=3)
        v = _unit(v)
        if all(abs(float(dot_m(v, a).real)) > 1e-2 for a in avoid):
            return v
    raise NonGenericError("could not find a generic point")


def random_polygon(rng, n, attempts=50) -> AnnihilatorPolygon:
    """A random generic annihilator polygon with n >= 7 vertices.

    Vertices are chosen one at a time in the annihilator of the previous one and
    off the orthogonal complement of every vertex at cyclic distance >= 3.  The
    last two close the loop: p_(n-1) lies in Ann(p_(n-2)) and is orthogonal to
    p_0, and p_n-1 = p_(n-2) x p_0 is forced.
    """
    if n < 7:
        raise ValueError("random generic polygons need at least 7 vertices")
    for _ in range(attempts):
        u, v, w = (np.asarray(x).real for x in random_null_triple(rng))
        pts = [_unit(u), _unit(cross_m(u, v).real)]
        try:
            for k in range(2, n - 2):
                avoid = [pts[j] for j in range(k) if cyclic_distance(j, k, n) >= 3]
                pts.append(_random_in_annihilator(rng, pts[-1], avoid))
            # p_(n-2): in Ann(p_(n-3)), orthogonal to p_0
            basis = annihilator(pts[-1])
            coeff = np.array([float(dot_m(basis[:, j], pts[0]).real) for j in range(3)])
            _, _, vt = np.linalg.svd(coeff[None, :])
            plane = basis @ vt[1:].T
            k = n - 2
            avoid = [pts[j] for j in range(k) if cyclic_distance(j, k, n) >= 3]
            for _ in range(200):
                cand = _unit(plane @ rng.normal(size=2))
                if all(abs(float(dot_m(cand, a).real)) > 1e-2 for a in avoid):
                    break
            else:
                continue
            pts.append(cand)
            last = cross_m(pts[-1], pts[0]).real
            if np.linalg.norm(last) < 1e-3:
                continue
            pts.append(_unit(last))
            poly = polygon(pts)
            if validate(poly).passed and poly.generic.status == "generic":
                return poly
        except (NonGenericError, AnnihilatorError):
            continue
    raise NonGenericError("failed to generate a generic polygon")


def degenerate_octagon(rng) -> AnnihilatorPolygon:
    """An annihilator octagon whose vertices span only six dimensions.

    Four points A, B, C, D of the isotropic eigenspace V = span(a_3, a_-1, a_-2)
    of a_0 x (.) and the joining vectors A x B, ... (which lie in the opposite
    eigenspace) give (A, A x B, B, B x C, C, C x D, D, D x A).  Everything sits
    in a_0^perp, and A . C = 0 although A and C are four steps apart.  A random
    G2' element moves the result off the coordinate axes.
    """
    v_basis = np.column_stack([graded(3), graded(-1), graded(-2)])
    g = random_g2_real(rng)
    for _ in range(50):
        a, b, c, d = (_unit(v_basis @ rng.normal(size=3)) for _ in range(4))
        pts = []
        for x, y in ((a, b), (b, c), (c, d), (d, a)):
            pts += [x, _unit(cross_m(x, y).real)]
        poly = polygon([g @ x for x in pts])
        if validate(poly).passed:
            return poly
    raise NonGenericError("could not build a degenerate octagon")


def random_g2_real(rng) -> np.ndarray:
    from .octonion import random_g2

    return random_g2(rng).in_basis(BasisTag.STANDARD_M).real


# ---------------------------------------------------------------------------
# normalisation


def _graded_triple_images(g_m):
    return tuple(g_m @ x for x in GRADED_TRIPLE)


# numerical polygons are moved onto exact null triples only from this close
SNAP_LIMIT = 1e-4


def _first_step(poly: AnnihilatorPolygon):
    """G2' element taking (p_1, p_2, p_3, p_4) to ([a_3], [a_2], [a_-1], [a_-3])."""
    p1, p3 = poly.vertex(0).rep, poly.vertex(2).rep
    # Ann(p4) meets p1^perp in a plane containing p3; w spans the rest of it
    ann = annihilator(poly.vertex(3))
    coeff = np.array([float(dot_m(ann[:, j], p1).real) for j in range(3)])
    _, _, vt = np.linalg.svd(coeff[None, :])
    plane = ann @ vt[1:].T
    rest = plane - np.outer(p3, p3 @ plane)
    w = _unit(rest[:, int(np.argmax(np.linalg.norm(rest, axis=0)))])
    t = triple_m(p3, w, p1).real
    if abs(t) < 1e-8:
        raise NonGenericError("first four vertices do not determine a null triple")
    # spread the normalisation over all three vectors so none of them is huge
    k = np.cbrt(1 / t)
    src = (k * p1, k * p3, k * w)
    defect = null_triple_defect(*src)
    if defect > SNAP_LIMIT:
        raise AnnihilatorError(f"first vertices are {defect:.2e} away from a null triple")
    src = tuple(x.real for x in snap_null_triple(*src))
    return nulltriple_to_g2(src, GRADED_TRIPLE)


def _diag_g2(d) -> G2Matrix:
    """G2' element diagonal in the graded basis with entries d (grades 3..-3)."""
    return certify(GRADED @ np.diag(d) @ GRADED_INV, tol=1e-8)


def normalize(poly: AnnihilatorPolygon, tol=1e-8) -> tuple:
    """Put a marked polygon in standard position.

    Returns (normalised polygon, the G2' element used).  Counting from the
    marked vertex, p_1..p_4 go to [a_3], [a_2], [a_-1], [a_-3] and p_5 to
    [a_-2 + a_-3].  The remaining one-parameter stabiliser diag(r, r, 1, 1, 1,
    1/r, 1/r) is fixed by giving p_6, scaled to a_0 coefficient 1, the
    coefficient 1 on a_-2.  For a hexagon p_5 is forced onto [a_-2] and the
    polygon is already rigid after the first two steps.
    """
    n = len(poly)
    if n < 6:
        raise ValueError("normalize needs at least six vertices")
    if n >= 8 and poly.generic.status != "generic":
        raise NonGenericError(f"polygon is {poly.generic.status}")
    g = _first_step(poly)
    gm = g.in_basis(BasisTag.STANDARD_M).real

    # p_5 = [a_-2 + a a_-1 + b a_-3]
    c5 = graded_coords(gm @ poly.vertex(4).rep)
    scale = c5[GRADES.index(-2)]
    if abs(scale) < tol * np.abs(c5).max():
        raise NonGenericError("fifth vertex has no a_-2 component")
    c5 = c5 / scale
    a = c5[GRADES.index(-1)]
    b = c5[GRADES.index(-3)]
    shear_dst = (GRADED_TRIPLE[0], GRADED_TRIPLE[1], GRADED_TRIPLE[2] - a * GRADED_TRIPLE[1])
    shear = nulltriple_to_g2(GRADED_TRIPLE, shear_dst, tol=1e-6)
    g = shear @ g
    if n > 6:
        if abs(b) < 1e-6:
            raise NonGenericError("fifth vertex is orthogonal to the first")
        # (a_3, a_-1, a_-2) -> (b a_3, a_-1 / b, a_-2)
        g = _diag_g2([b, 1, b, 1, 1 / b, 1, 1 / b]) @ g
        gm = g.in_basis(BasisTag.STANDARD_M).real
        c6 = graded_coords(gm @ poly.vertex(5).rep)
        lead = c6[GRADES.index(0)]
        if abs(lead) < 1e-8 * np.abs(c6).max():
            raise NonGenericError("sixth vertex has no a_0 component")
        c6 = c6 / lead
        r = c6[GRADES.index(-2)]
        if abs(r) < 1e-8:
            raise NonGenericError("sixth vertex has no a_-2 component")
        g = _diag_g2([r, r, 1, 1, 1, 1 / r, 1 / r]) @ g
    gm = g.in_basis(BasisTag.STANDARD_M).real
    out = AnnihilatorPolygon(tuple(NullLine(gm @ v.rep, v.tol) for v in poly.vertices), poly.marked)
    return out, g


def standard_position(n) -> list:
    """Where normalize sends the first five vertices, as unit M vectors."""
    five = [graded(3), graded(2), graded(-1), graded(-3), graded(-2) + graded(-3)]
    if n == 6:
        five[4] = graded(-2)
    return [_unit(v) for v in five]


def polygons_match(p: AnnihilatorPolygon, q: AnnihilatorPolygon) -> float:
    """Largest projective distance between corresponding vertices."""
    if len(p) != len(q):
        return math.inf
    return max(p.vertex(i).angle_to(q.vertex(i)) for i in range(len(p)))


# ---------------------------------------------------------------------------
# G2' acts by isometries


@dataclass(frozen=True)
class IsometryReport:
    max_defect: int
    undetermined: int
    pairs: int
    annihilator_lines_ok: bool


def random_null_line(rng) -> NullLine:
    """A random null line: pick a random spacelike 3-vector a and timelike 4-vector b with |a| = |b|."""
    a = _unit(rng.normal(size=3))
    b = _unit(rng.normal(size=4))
    return NullLine(np.concatenate([a, b]))


def random_pair(rng, distance) -> tuple:
    """A random pair of null lines at the requested d3 distance (1, 2 or 3)."""
    u, v, w = (np.asarray(x).real for x in random_null_triple(rng))
    x = NullLine(u)
    if distance == 1:
        ann = annihilator(x)
        return x, NullLine(ann @ rng.normal(size=3))
    if distance == 2:
        return x, NullLine(v)
    return x, random_null_line(rng)


def random_neighbor(rng, x, distance, margin=1e-3, tries=100) -> NullLine:
    """A random null line at the requested d3 distance (0 to 3) from x.

    Distance two goes through a random point m of Ann(x): a generic point of
    Ann(m) is orthogonal to x but does not annihilate it.  Draws whose
    nonvanishing invariants fall below `margin` are redrawn, so the result is
    well clear of the ambiguity band.
    """
    x = NullLine.of(x)
    if distance == 0:
        return NullLine(x.rep * rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0), x.tol)
    if distance not in (1, 2, 3):
        raise ValueError(f"d3 distances are 0..3, got {distance}")
    for _ in range(tries):
        if distance == 1:
            y = NullLine(annihilator(x) @ rng.normal(size=3), x.tol)
        elif distance == 2:
            m = NullLine(annihilator(x) @ rng.normal(size=3), x.tol)
            y = NullLine(annihilator(m) @ rng.normal(size=3), x.tol)
        else:
            y = random_null_line(rng)
        pm = pair_measure(x, y)
        needed = [pm.angle, pm.cross, pm.dot][:distance]
        if min(needed) > margin:
            return y
    raise NonGenericError(f"no well-separated point at distance {distance} in {tries} draws")


def g2_action_isometry_check(g: G2Matrix, pairs) -> IsometryReport:
    """max |d3(gx, gy) - d3(x, y)| over the sampled pairs.

    Pairs in the ambiguity band on either side are counted separately.  For
    d3 = 1 pairs the projective line through them must stay inside Ann of the
    image of its endpoints.
    """
    gm = g.in_basis(BasisTag.STANDARD_M).real
    worst = 0
    undetermined = 0
    lines_ok = True
    for x, y in pairs:
        gx, gy = x.transform(gm), y.transform(gm)
        before, after = d3(x, y), d3(gx, gy)
        if before is None or after is None:
            undetermined += 1
            continue
        worst = max(worst, abs(after - before))
        if before == 1:
            mid = NullLine(x.rep + y.rep)
            gmid = mid.transform(gm)
            if d3(gx, gmid) not in (0, 1) or d3(gy, gmid) not in (0, 1):
                lines_ok = False
    return IsometryReport(worst, undetermined, len(pairs), lines_ok)


# ---------------------------------------------------------------------------
# boundary extraction


def extract_boundary(q, grid=None, tol=DEFAULT_TOL, cauchy_tol=1e-8, field=None, **kw):
    """Boundary polygon from transport of the curve vector along vertex rays.

    One vertex per ray at angle 2 pi (k + 1/4) / (deg q + 6), in order of k;
    the marked vertex is k = 1.  Returns (polygon, transport results).
    """
    from .transport import MetricField, ray_limit, vertex_rays

    field = MetricField(q, grid) if field is None else field
    results = []
    for ray in vertex_rays(q):
        res = ray_limit(field, ray, cauchy_tol=cauchy_tol, **kw)
        if not res.converged:
            raise BoundaryError(f"ray {ray.index} at angle {ray.angle:.4f} did not converge "
                                f"(increment {res.cauchy:.2e})")
        results.append(res)
    verts = tuple(NullLine(r.limit, tol) for r in results)
    return AnnihilatorPolygon(verts, marked=1 % len(verts)), results


def edge_collinearity(limit, p, q) -> float:
    """Distance of a unit edge limit from span(p, q)."""
    return span_residual([limit], np.column_stack([p.rep, q.rep]))


# ---------------------------------------------------------------------------
# SVG


DEFAULT_CHART = (0, 1)


def _chart_points(vectors, chart, normal):
    a, b = chart
    pts = []
    for v in vectors:
        v = v if v @ normal >= 0 else -v
        v = v / (v @ normal)
        pts.append((float(v[a]), float(v[b])))
    return pts


def to_svg(poly: AnnihilatorPolygon, chart=DEFAULT_CHART, size=400, samples=24) -> str:
    """Draw the polygon in the affine chart {x . N = 1}.

    N is the sum of the sign-aligned vertex representatives; the plotted
    coordinates are the M components selected by `chart`.  Edges are the
    projective segments cos(t) p_i + sin(t) p_(i+1), t in [0, pi/2], with
    p_(i+1) sign-aligned to p_i.
    """
    reps = [v.rep for v in poly.vertices]
    aligned = [reps[0]]
    for v in reps[1:]:
        aligned.append(v if v @ aligned[-1] >= 0 else -v)
    normal = np.sum(aligned, axis=0)
    if np.linalg.norm(normal) < 1e-9:
        normal = aligned[0]
    n = len(aligned)
    edges = []
    for i in range(n):
        p, r = aligned[i], aligned[(i + 1) % n]
        r = r if r @ p >= 0 else -r
        ts = np.linspace(0, math.pi / 2, samples)
        edges.append(_chart_points([math.cos(t) * p + math.sin(t) * r for t in ts], chart, normal))
    verts = _chart_points(aligned, chart, normal)
    allpts = np.array([pt for e in edges for pt in e] + verts)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = max(hi - lo) or 1.0
    pad = 20

    def tr(pt):
        x = pad + (pt[0] - lo[0]) / span * (size - 2 * pad)
        y = size - pad - (pt[1] - lo[1]) / span * (size - 2 * pad)
        return f"{x:.3f},{y:.3f}"

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">']
    for e in edges:
        pts = " ".join(tr(pt) for pt in e)
        lines.append(f'  <polyline class="edge" fill="none" stroke="black" points="{pts}"/>')
    for i, pt in enumerate(verts):
        x, y = tr(pt).split(",")
        colour = "red" if i == poly.marked else "blue"
        lines.append(f'  <circle class="vertex" cx="{x}" cy="{y}" r="4" fill="{colour}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
