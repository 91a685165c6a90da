"""
Split octonions and the group G2'
=================================

The split octonions are eight-dimensional, non-associative, and carry a
quadratic form of signature (4, 4) that the product preserves.  This walk-through
prints the product table, checks two identities in exact arithmetic and builds
an element of G2' from a pair of null triples.
"""

from fractions import Fraction

import numpy as np

from g2toda import octonion as oc

# The table is generated from the Cayley-Dickson doubling of the quaternions.
for row in oc.product_table():
    print(" ".join(f"{entry:>4}" for entry in row))

# Exact rational coordinates keep identities exact, not just close.
x = oc.SplitOctonion((Fraction(1, 2), 1, 0, -2, 0, 3, 0, 1))
y = oc.SplitOctonion((0, 1, Fraction(2, 3), 0, 1, 0, -1, 0))
print("N(xy) = N(x) N(y):", oc.qform(oc.mul(x, y)) == oc.qform(x) * oc.qform(y))
print("(xx)y = x(xy):    ", oc.mul(oc.mul(x, x), y) == oc.mul(x, oc.mul(x, y)))

# The imaginary part carries a cross product; a null vector u has a
# three-dimensional annihilator {v : u x v = 0}.
u = np.array([1.0, 0, 0, 1.0, 0, 0, 0])
print("q(u) =", oc.dot_m(u, u))
print("rank of v -> u x v:", np.linalg.matrix_rank(oc.cross_endomorphism(u).real))

# G2' acts simply transitively on normalised null triples.
rng = np.random.default_rng(0)
src, dst = oc.random_null_triple(rng), oc.random_null_triple(rng)
g = oc.nulltriple_to_g2(src, dst, tol=1e-7)
print("certificate defect:", g.certificate.defect)
gm = g.in_basis(oc.BasisTag.STANDARD_M)
print("maps the triple:", all(np.allclose(gm @ a, b, atol=1e-7 * np.abs(gm).max()) for a, b in zip(src, dst)))
