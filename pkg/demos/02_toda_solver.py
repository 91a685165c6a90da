"""
Solving the affine Toda system
==============================

For a polynomial sextic differential q the harmonic metric is diag-encoded by two
functions u1, u2 on the plane.  We solve on a disk between a sub- and a
super-solution and look at how the solution approaches its far-field model.
"""

import math
import time

import numpy as np

from g2toda import toda
from g2toda.toda import CONST, SexticPoly, SolverConfig

print(f"c = {CONST.c:.12f}, d = {CONST.d:.12f}, alpha = {CONST.alpha:.12f}")

# For q = 1 the solution is constant and known in closed form.
flat = toda.solve(SexticPoly((1,)), SolverConfig(radius=6.0, n=257))
v1, v2 = toda.exact_solution(1.0)
print("flat case, max deviation:", max(np.abs(flat.u1 - v1).max(), np.abs(flat.u2 - v2).max()))

# For q = z the solution is sandwiched between the envelopes and grows like
# |z|^(2/3) and |z|^(1/3) in r and s.
start = time.perf_counter()
grid = toda.solve(SexticPoly.monomial(1), SolverConfig(radius=8.0, n=257))
print(f"q = z solved in {time.perf_counter() - start:.1f} s, residual {grid.residual:.1e}")
print("envelope slack:", grid.envelope_slack())
ratio = toda.global_bound_ratio(grid)[np.abs(grid.z) < grid.radius - 1]
print(f"e^(u1 - 5 u2) ranges over [{ratio.min():.4f}, {ratio.max():.4f}]")
print("growth slopes of log r, log s:", toda.growth_slopes(grid, 5.0, 7.0))

# Away from the zero the error to the far-field model decays exponentially in
# the flat distance, at rates 2 alpha and 2 sqrt(3) alpha.
fit = toda.decay_fit(grid, toda.stable_angle(grid.q))
print(f"decay rates {fit.rate_x1:.3f}, {fit.rate_x2:.3f}; "
      f"expected {-2 * CONST.alpha:.3f}, {-2 * math.sqrt(3) * CONST.alpha:.3f}")
