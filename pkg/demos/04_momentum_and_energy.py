"""Canonical momentum with a scale field, and the energy eigen-equation.

Carrying the neighbour amplitude back with its scale factor adds a term
i*hbar*A*psi to the forward difference, with A the gradient of theta. The
exact and first-order forms differ by O(spacing).
"""
import numpy as np

from scalegauge import (
    Lattice,
    Observable,
    ThetaField,
    WavePacket,
    canonical_momentum_apply,
    energy_equation_check,
)

# %% Convergence of the two forms as the spacing halves.
prev = None
for f in (1, 2, 4, 8):
    lat = Lattice((256 * f,), 0.1 / f)
    theta = ThetaField.gaussian_bump(lat, 12.8, 2.0, 1.0)
    psi = WavePacket.gaussian(lat, 12.8, 1.0, 2.0)
    d = canonical_momentum_apply(psi, 0, theta).max_discrepancy()
    ratio = f"{prev / d:.3f}" if prev else "-"
    print(f"spacing {lat.spacing:<8g} max discrepancy {d:.3e}  ratio {ratio}")
    prev = d

# %% Energy eigenstates: the position-weighted equation only holds for flat theta.
lat = Lattice((64,), 0.1)
rng = np.random.default_rng(1)
H = Observable.hamiltonian(lat, 5.0 * rng.uniform(-1, 1, 64))
for label, theta in [("constant", ThetaField.constant(lat)), ("bump", ThetaField.gaussian_bump(lat, 3.2, 1.0, 0.4))]:
    rep = energy_equation_check(H, lat.site(0), theta, lat.site(40))
    print(f"{label:9s} eigen {rep.unscaled_residual:.1e}  position-weighted {rep.position_basis_residual:.1e}  "
          f"energy basis {rep.energy_basis_residual:.1e}  transfer vs direct {rep.transfer_vs_direct_residual:.1e}")
