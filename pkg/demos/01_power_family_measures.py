# Two routes to the equilibrium measure of <z^2, z^3>.
#
# Backward orbits of a point and repelling fixed points of words should
# both spread out over the unit circle.  How fast depends on where the
# backward orbits start.

import numpy as np

from ratcorr import pullback_exact, repelling_measure, binned_tv, power_family
from ratcorr.measures import angular_histogram, mass_near_circle
from ratcorr.sphere import P1Point, random_point

chain = power_family([2, 3])
print(chain)

# %% repelling fixed points of all words of length 5
mu, points = repelling_measure(chain, 5)
print(f"mu_5: {len(points)} repelling points, mass {mu.mass:.5f} (1 - 2^5/5^5 = {1 - 32/3125:.5f})")

# %% pullback from a point already on the circle
on_circle = pullback_exact(chain, P1Point.from_complex(np.exp(1j)), 5)
print("TV(mu_5, pullback from e^i)   =", round(binned_tv(mu, on_circle, 8), 4))

# %% pullback from a generic point: the atoms creep toward the circle like |w0|^(1/deg)
w0 = random_point(1)
generic = pullback_exact(chain, w0, 5)
print(f"|w0| = {abs(w0.value):.3f}")
print("TV(mu_5, pullback from w0)    =", round(binned_tv(mu, generic, 8), 4))
print("mass within 1e-3 of circle    =", round(mass_near_circle(generic), 4))
for n in (5, 6, 7):
    hist = angular_histogram(pullback_exact(chain, w0, n), 36)
    print(f"n={n}: worst 36-arc deviation from uniform {np.abs(hist * 36 - 1).max():.4f}")
