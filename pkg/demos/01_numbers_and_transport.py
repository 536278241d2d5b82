"""Scaled number structures and moving numbers between sites.

Run with ``python3 demos/01_numbers_and_transport.py``.
"""
import math

import numpy as np

from scalegauge import (
    Lattice,
    LocalNumber,
    ScaledStructure,
    StructureMismatch,
    ThetaField,
    check_field_axioms,
    combine,
    parallel_transport,
    scaled_mul,
    scaled_transport,
)
from scalegauge.scaled_numbers import RationalTerm, broken_ops, correspond_to_base, lift_term

# %% A structure scaled by r keeps its numbers as base images r*a.
s = ScaledStructure(2.0)
six, four = correspond_to_base(3, s), correspond_to_base(2, s)
print("3 * 2 computed on images:", scaled_mul(six, four, s), "= image of 6:", correspond_to_base(6, s))

# %% The scaled operations satisfy the field axioms; plain multiplication on images does not.
print("scaled ops pass:", check_field_axioms(ScaledStructure(7.25), 1000).passed)
bad = check_field_axioms(ScaledStructure(7.25), 1000, ops=broken_ops(ScaledStructure(7.25)))
print("broken ops, mul_identity fail fraction:", bad.results["mul_identity"].fail_fraction)

# %% Lifting a^2 / b picks up exactly one net factor of r.
print("lifted 2^2/4 with r=3:", lift_term(RationalTerm(2, 1, 2, 4), ScaledStructure(3.0)))

# %% Numbers live at sites. Combining across sites is refused until one is transported.
lat = Lattice((8,), 1.0)
theta = ThetaField.linear(lat, math.log(2))
y, x = lat.site(2), lat.site(1)
a, b = LocalNumber(y, 5.0), LocalNumber(x, 1.0)
try:
    combine(a, b, "+")
except StructureMismatch as e:
    print("refused:", e)
print("same value at x:", parallel_transport(a, x).value)
print("scaled representation at x (r = 2):", scaled_transport(a, x, theta).value)

# %% Going through an intermediate site gives the same scaled value.
z = lat.site(6)
via = scaled_transport(scaled_transport(a, z, theta), x, theta)
print("via z:", via.value, " direct:", scaled_transport(a, x, theta).value)
print("agree to rounding:", np.isclose(via.value, 10.0))
