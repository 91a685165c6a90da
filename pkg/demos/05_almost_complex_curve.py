"""
The almost-complex curve
========================

At any point the transported frame gives the curve nu and its first three
holomorphic derivatives.  The curve lies on the pseudo-sphere q = 1, is
J-holomorphic, and its third derivative recovers q up to a universal constant.
"""

import math

import numpy as np

from g2toda import curve
from g2toda.toda import SexticPoly, SolverConfig, solve
from g2toda.transport import MetricField

# third derivatives need the finer grid: at 257 nodes the ratios spread by about 2e-3
q = SexticPoly.monomial(1)
field = MetricField(q, solve(q, SolverConfig(radius=8.0, n=513)))
samples = [curve.sample(field, z) for z in curve.sample_points(q, 50)]

print("max |q(nu) - 1|:         ", max(curve.q_defect(cs) for cs in samples))
print("max almost-complex defect:", max(curve.almost_complex_defect(cs) for cs in samples))
print("max harmonic-sequence err:", max(max(curve.harmonic_sequence(cs).relative_errors) for cs in samples))

# The triple product of three large, nearly parallel vectors loses digits to
# round-off; the loss grows with |z|, so the spread is reported, not enforced.
ratios = curve.recover_q(samples, rtol=math.inf)
print(f"(nu_z x nu_zz) . nu_zzz / q = {ratios.mean():.5f}, compare 60 sqrt(3) i = {60 * math.sqrt(3):.5f}i")
print("spread of the ratios:", curve.ratio_spread(ratios))

# For q = z the curve is linearly full; the model curve sits in a hyperplane.
print("rank for q = z:", curve.linear_fullness(samples))
print("singular values:", np.round(curve.singular_values(samples), 4))
