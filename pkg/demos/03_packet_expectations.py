"""Expectation values of a wave packet under external and internal scaling.

External scaling multiplies the whole expectation value computed at y by
r(y, x). Internal scaling carries each site's contribution to x with its own
factor. The two agree when theta is constant.
"""
from scalegauge import (
    Lattice,
    Observable,
    ThetaField,
    WavePacket,
    expectation_external,
    expectation_internal,
    expectation_unscaled,
    region_L_analysis,
    transfer_internal,
)

lat = Lattice((256,), 0.1)
psi = WavePacket.gaussian(lat, 3.2, 0.5)
pos = Observable.position(lat)
x, y, z = lat.site(0), lat.site(32), lat.site(200)

for label, theta in [("constant", ThetaField.constant(lat, 1.0)), ("linear 0.05", ThetaField.linear(lat, 0.05))]:
    u = expectation_unscaled(psi, pos, x).value.real
    e = expectation_external(psi, pos, y, x, theta).value.real
    i = expectation_internal(psi, pos, x, theta).value.real
    print(f"{label:12s} unscaled {u:.10f}  external {e:.10f}  internal {i:.10f}")

# %% Moving an internal value from x to z agrees with recomputing it at z.
theta = ThetaField.linear(lat, 0.05)
at_x = expectation_internal(psi, pos, x, theta)
print("transferred:", transfer_internal(at_x, z, theta).value.real,
      " direct:", expectation_internal(psi, pos, z, theta).value.real)

# %% Region L: a packet far from x; r_zx is the factor between its region and x.
far = WavePacket.gaussian(lat, 15.0, 0.5)
theta = ThetaField.linear(lat, 0.01)
for tol in (1e-3, 1e-2, 0.2):
    rep = region_L_analysis(far, x, theta, tol)
    print(f"tol {tol:<6g} z={rep.z}  r_zx={rep.r_zx.value:.6f}  internal deviation "
          f"{rep.max_internal_deviation:.4f}  within_L {rep.within_L}")
