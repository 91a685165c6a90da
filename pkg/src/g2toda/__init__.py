"""Cyclic G2 Higgs bundles over the plane for polynomial sextic differentials.

Modules, bottom up:

octonion      split octonions, the cross product on Im Oct' and G2' certificates
g2lie         the 7x7 model of g2, the cyclic Higgs field and its real structures
toda          the affine Toda system, its sub/super-solutions and a grid solver
modelsurface  closed forms for the constant differential
transport     parallel transport of the curve vector along rays and critical paths
ein23         the null quadric, the d3 distance and annihilator polygons
curve         the almost-complex curve and its pointwise invariants
cli           the g2toda command
"""

__version__ = "0.1.0"
