"""Tabulate the point-diameter field of a triangle and find where it is continuous on the boundary.

Writes ``ek_triangle.csv`` (columns x, y, e) to the current directory and
prints the continuity counts for an equilateral and a 3-4-5 triangle.
"""

import numpy as np

from convexwidth import Polytope, body_stats
from convexwidth.point_diameter import boundary_points, continuity_check, ek_grid, epsilon_estimate, grid_csv


def continuous_count(K, samples=300):
    return sum(continuity_check(K, O).continuous for O in boundary_points(K, samples))


def main():
    triangle = Polytope([[0, 0], [5, 0], [3.2, 2.4]])
    equilateral = Polytope([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])

    xs, ys, table = ek_grid(triangle, (-4, 9, -5, 7), 80, 60)
    with open("ek_triangle.csv", "w", encoding="utf-8") as fh:
        fh.write(grid_csv(xs, ys, table))
    print(f"e on the grid ranges over [{table.min():.4f}, {table.max():.4f}]; thickness is 2.4")

    # far from the body e approaches the thickness from above
    est = epsilon_estimate(triangle, 20, 201)
    print(f"smallest sampled e on a radius-20 lattice: {est.value:.4f} at {np.round(est.argmin, 3)}")

    print("continuous boundary points out of 300:")
    print(f"  equilateral {continuous_count(equilateral)}")
    print(f"  3-4-5       {continuous_count(triangle)}")

    parallelogram = Polytope([[0, 0], [4, 0], [5, 1], [1, 1]])
    est = epsilon_estimate(parallelogram, 20, 201)
    print(f"parallelogram: thickness {body_stats(parallelogram).omega:.4f}, "
          f"smallest sampled e {est.value:.4f} (the infimum is not attained)")


if __name__ == "__main__":
    main()
