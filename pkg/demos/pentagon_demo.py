"""The regular pentagon: a non-consensus fixed point on the circle that is
neutral rather than unstable.

Five agents sit at the fifth roots of unity; each weights itself 3 and its
two ring neighbors 1. The weighted sum of every agent's neighborhood points
exactly along the agent itself, so one iteration returns the same
configuration, and the linearization is right-stochastic with spectral
radius exactly 1: the instability mechanism that rules out such points for
d >= 3 has no grip on the circle.
"""

import numpy as np

from spherecon import (classify_configuration, differential_report,
                       fixed_point_residual)
from spherecon.experiments import pentagon_configuration, pentagon_weight_matrix


def main():
    a = pentagon_weight_matrix()
    c = pentagon_configuration()

    print("weight matrix:")
    print(a.entries)
    print()
    print("configuration (rows on the unit circle):")
    print(np.round(c.rows, 6))
    print()

    residual = fixed_point_residual(a, c)
    cls = classify_configuration(c)
    print(f"fixed-point residual ||f(x) - x|| = {residual:.3e}")
    print(f"classification: {cls.kind}, rank {cls.rank}")

    rep = differential_report(a, c)
    print(f"spectral radius of the differential: {rep.spectral_radius:.12f}")
    print("eigenvalue magnitudes:",
          np.round(np.sort(np.abs(rep.eigenvalues))[::-1], 8))

    gram = c.rows @ c.rows.T
    print(f"neighbor dot products: {gram[0, 1]:.6f} "
          f"(= cos(2*pi/5) = {np.cos(2 * np.pi / 5):.6f} > 0)")


if __name__ == "__main__":
    main()
