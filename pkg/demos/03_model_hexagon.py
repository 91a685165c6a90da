"""
The model surface and its hexagon
=================================

For q = 1 everything is explicit: the transport matrix is a matrix exponential
and the curve runs off to six vertices of the null quadric, one per sector of
angle pi/3.  We compare the closed form with a numerical transport.
"""

import math

import numpy as np

from g2toda import ein23
from g2toda import modelsurface as ms
from g2toda.toda import SexticPoly
from g2toda.transport import MetricField, rk4_transport

r0, s0, _ = ms.model_metric()
print(f"r0 = {r0:.7f}, s0 = {s0:.7f}")

field = MetricField(SexticPoly((1,)))
z = 3 * np.exp(0.4j)
exact = ms.psi0(z)
print("closed form vs RK4 at |z| = 3:", np.abs(rk4_transport(field, z) - exact).max() / np.abs(exact).max())

# Which exponent dominates depends only on the direction.
for theta in np.linspace(0, 2 * math.pi, 7)[:-1] + math.pi / 6:
    k = int(np.argmax(ms.direction_profile(theta)[:6]))
    print(f"direction {theta:.3f}: dominant exponent {k + 1}")

# Transporting along the six vertex rays recovers the clock hexagon.
poly, results = ein23.extract_boundary(SexticPoly((1,)))
for k, v in enumerate(poly.vertices):
    label = min((1, 3, 5, 7, 9, 11), key=lambda j: v.angle_to(ein23.NullLine(ms.clock_vector(j))))
    print(f"vertex {k}: [x_{label}], converged after t = {results[k].samples[-1][0]:.1f}")
print("d3 row of vertex 0:", poly.d3_matrix[0])
print("validates:", ein23.validate(poly).passed)
