"""Bodies on which the Lipschitz constants are attained, and polygons shrinking to a disc.

A unit disc cut by a slab of width omega realises both M and N as local
moduli; circumscribed regular polygons show how s and r behave in the limit.
"""

import numpy as np

from convexwidth import Ball
from convexwidth.harness import monotone_approx_suite, sharpness_suite


def main():
    print("omega   width modulus (expected)      diameter modulus (expected)")
    for row in sharpness_suite([0.5, 1.0, 1.5, 2.0]):
        print(f"{row.omega:4.1f}   {row.width_derivative:9.6f} ({row.width_expected:9.6f})"
              f"      {row.diameter_derivative:9.6f} ({row.diameter_expected:9.6f})")

    rep = monotone_approx_suite(Ball(1.0, [0.0, 0.0]), polygon_sides=(8, 16, 32, 64, 128), seed=0)
    print("\nsides   width      s - 2       r - 2")
    for row in rep.rows:
        print(f"{row.sides:5d}   {row.width:.6f}   {row.s_excess:.6f}   {row.r_excess: .1e}")
    print(f"2 sec(pi/8) - 2 = {2 / np.cos(np.pi / 8) - 2:.6f}")


if __name__ == "__main__":
    main()
