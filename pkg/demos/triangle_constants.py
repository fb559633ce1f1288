"""Lipschitz constants of the 3-4-5 triangle, from the crude bounds to the sharp ones.

Run with ``python3 demos/triangle_constants.py``.
"""

import numpy as np

from convexwidth import Polytope, body_stats, hat_constants
from convexwidth.harness import sup_delta_estimate, verify_bounds


def main():
    K = Polytope([[0, 0], [5, 0], [3.2, 2.4]])
    stats = body_stats(K)
    print(f"diameter {stats.delta:.6f}, thickness {stats.omega:.6f}")
    print(f"M = sqrt(delta^2 - omega^2) = {stats.M:.6f}")
    print(f"N = (delta / omega) M      = {stats.N:.6f}")

    hat = hat_constants(K)
    print(f"refined: M_hat = max p = {hat.M_hat:.6f}, N_hat = max q = {hat.N_hat:.6f} (exact: {hat.exact})")

    # the refined constants are attained as suprema of the difference quotients
    sw = sup_delta_estimate(K, "width")
    sd = sup_delta_estimate(K, "diameter")
    print(f"searched sup dw = {sw:.6f}, sup dd = {sd:.6f}")

    report = verify_bounds(K, pairs=100_000, seed=42, hat=hat)
    print(f"100000 random pairs: max dw {report.max_delta_w:.6f}, max dd {report.max_delta_d:.6f}")
    print("violations:", report.violations)
    print("gap between M and M_hat:", np.round(stats.M - hat.M_hat, 6))


if __name__ == "__main__":
    main()
