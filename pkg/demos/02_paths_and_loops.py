"""Scale factors along lattice paths.

For link exponents that come from a scalar theta the product along a path
depends only on its end points, so every closed loop gives 1. Adding an
exponent on a single link breaks that and the loop picks up its circulation.
"""
import math

import numpy as np

from scalegauge import Lattice, LinkExponentField, ThetaField, path_product, scale_factor
from scalegauge.harness.experiments import monotone_path, random_loop

lat = Lattice((16, 16), 1.0)
rng = np.random.default_rng(0)
theta = ThetaField(lat, rng.standard_normal(lat.extent))
links = LinkExponentField.from_theta(theta)

# %% Two different shortest paths between the same corners.
a, b = lat.site(1, 2), lat.site(12, 9)
p1 = path_product(links, monotone_path(lat, a, b, rng))
p2 = path_product(links, monotone_path(lat, a, b, rng))
print(f"path 1 {p1:.15g}  path 2 {p2:.15g}  r(b, a) {scale_factor(theta, b, a).value:.15g}")

# %% A random closed loop.
loop = random_loop(lat, lat.site(8, 8), 20, rng)
print(f"loop of {len(loop) - 1} steps: product {path_product(links, loop):.15g}")

# %% One link with an extra exponent of 0.3.
ex = np.array(links.exponents)
ex[4, 4, 0] += 0.3
curled = LinkExponentField(lat, ex)
plaquette = [lat.site(4, 4), lat.site(5, 4), lat.site(5, 5), lat.site(4, 5), lat.site(4, 4)]
print(f"plaquette product {path_product(curled, plaquette):.15g}, exp(0.3) = {math.exp(0.3):.15g}")
