"""
Boundary polygons for q = z and q = z^2
=======================================

The curve of a degree-n polynomial differential has n + 6 asymptotic vertices.
We extract them by transport along one ray per vertex, check that they form an
annihilator polygon, sample an edge, and put the polygon in normal form.
"""

import time

import numpy as np

from g2toda import ein23
from g2toda.toda import SexticPoly, SolverConfig, solve
from g2toda.transport import MetricField, edge_limit, edge_rays

for degree in (1, 2):
    start = time.perf_counter()
    q = SexticPoly.monomial(degree)
    field = MetricField(q, solve(q, SolverConfig(radius=8.0, n=257)))
    poly, _ = ein23.extract_boundary(q, field=field, tol=1e-5)
    report = ein23.validate(poly)
    print(f"q = z^{degree}: {len(poly)} vertices, validate {report.passed}, {poly.generic.status}")

    # points on the edge between vertices 0 and 1, reached along critical paths
    for edge in edge_rays(q, 0, [-0.5, 0.0, 0.5]):
        res = edge_limit(field, q, edge)
        off = ein23.edge_collinearity(res.limit, poly.vertices[0], poly.vertices[1])
        print(f"  edge sample at offset {edge.offset:+.1f}: distance from the edge line {off:.1e}")

    normal, _ = ein23.normalize(poly)
    print("  normal form, first vertices in graded coordinates:")
    print(np.array([ein23.graded_coords(normal.vertex(k).rep) for k in range(5)]).round(3))
    with open(f"boundary_z{degree}.svg", "w") as fh:
        fh.write(ein23.to_svg(poly))
    print(f"  wrote boundary_z{degree}.svg in {time.perf_counter() - start:.1f} s")
