"""Build finite balls of each lattice family and inspect their structure."""

import json

from percolab import LatticeSpec, ball_to_json, build_ball, lazy_neighbors

for spec, radii in [
    (LatticeSpec.hypercubic(1), (1, 2, 3)),
    (LatticeSpec.hypercubic(2), (1, 2, 3)),
    (LatticeSpec.triangular(), (1, 2)),
    (LatticeSpec.regular_tree(3), (1, 2, 3)),
]:
    label = spec.family + (f" d={spec.dimension}" if spec.dimension else "") \
        + (f" r={spec.tree_degree}" if spec.tree_degree else "")
    print(f"\n{label} (degree {spec.degree})")
    for n in radii:
        ball = build_ball(spec, n)
        interior = sum(1 for v in range(ball.n_vertices) if ball.distance[v] < n)
        print(f"  radius {n}: |V|={ball.n_vertices:4d}  |E|={ball.n_edges:4d}  "
              f"interior vertices {interior}")

# adjacency can also be walked lazily, without building any ball
print("\nneighbors of the square-lattice origin:",
      lazy_neighbors(LatticeSpec.hypercubic(2), (0, 0)))

ball = build_ball(LatticeSpec.hypercubic(2), 1)
print("\nJSON export of the radius-1 square ball:")
print(json.dumps(ball_to_json(ball), indent=2, sort_keys=True))
