"""Wave packets and expectation values under external and internal scaling.

Conventions
-----------
* Packets are normalised as ``sum |psi|**2 * dV = 1`` with ``dV = spacing**dims``.
  The measure is attached once, at summation time, as an unscaled quantity.
* The momentum operator keeps the sign ``+i*hbar*d/dy`` and, by default, the
  forward difference ``(psi(y+h) - psi(y)) / h``. The forward scheme is not
  Hermitian; ``scheme="central"`` gives a Hermitian alternative.
* Internal scaling carries each per-site integrand to the reference site
  with ``r(y, x)``; inside a difference stencil, each neighbour amplitude
  ``psi(w)`` is first carried to ``y`` with ``r(w, y)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .lattice_field import (
    Lattice,
    ScaleFactor,
    SiteId,
    ThetaField,
    gradient,
    neighbor_indices,
    scale_factor,
    scale_factors_to,
)
from .number_transport import LocalNumber
from .scaled_hilbert import LocalState, scaled_transport_state, transport_state
from .scaled_numbers import ScaledStructure, correspond_to_base, scaled_mul

SUPPORT_EPSILON = 1e-8
NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class WavePacket:
    """Per-site amplitudes; the amplitude at ``y`` is a number of the structure at ``y``."""

    lattice: Lattice
    amplitudes: np.ndarray
    support_epsilon: float = SUPPORT_EPSILON

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size != self.lattice.n_sites:
            raise DomainError(f"packet needs {self.lattice.n_sites} amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise DomainError("packet amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        if abs(self.norm_sq - 1.0) > NORM_TOL:
            raise DomainError(f"packet is not normalised: sum |psi|^2 dV = {self.norm_sq!r}")

    @classmethod
    def from_array(cls, lattice: Lattice, amps, normalize: bool = True) -> WavePacket:
        amps = np.asarray(amps, dtype=complex).ravel()
        if normalize:
            n2 = np.sum(np.abs(amps) ** 2) * lattice.volume_element
            if n2 == 0:
                raise DomainError("cannot normalise an all-zero packet")
            amps = amps / math.sqrt(n2)
        return cls(lattice, amps)

    @classmethod
    def gaussian(cls, lattice: Lattice, center, sigma: float, k0=0.0) -> WavePacket:
        """``exp(-|y-center|**2 / (4 sigma**2) + i k0.y)``, so ``|psi|**2`` has width sigma."""
        if not sigma > 0:
            raise DomainError("sigma must be positive")
        y = lattice.coordinates()
        center = np.broadcast_to(np.asarray(center, dtype=float), (lattice.dims,))
        k0 = np.broadcast_to(np.asarray(k0, dtype=float), (lattice.dims,))
        d2 = np.sum((y - center) ** 2, axis=1)
        return cls.from_array(lattice, np.exp(-d2 / (4 * sigma**2) + 1j * (y @ k0)))

    @classmethod
    def delta(cls, site: SiteId) -> WavePacket:
        lat = site.lattice
        amps = np.zeros(lat.n_sites, dtype=complex)
        amps[site.index] = 1.0 / math.sqrt(lat.volume_element)
        return cls(lat, amps)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.lattice.volume_element)

    def amplitude(self, site: SiteId) -> LocalNumber:
        self.lattice.check(site)
        return LocalNumber(site, self.amplitudes[site.index])

    def support(self) -> np.ndarray:
        """Flat boolean mask of the region where ``|psi| > support_epsilon * max|psi|``."""
        mag = np.abs(self.amplitudes)
        return mag > self.support_epsilon * mag.max()


# -- observables -----------------------------------------------------------


def _shift_matrix(lat: Lattice, axis: int, step: int) -> np.ndarray:
    """``(S psi)(y) = psi(y + step e_axis)``, zero past an open edge."""
    n = lat.n_sites
    nb = neighbor_indices(lat, axis, step)
    s = np.zeros((n, n))
    rows = np.nonzero(nb >= 0)[0]
    s[rows, nb[rows]] = 1.0
    return s


def forward_valid(lat: Lattice, axis: int) -> np.ndarray:
    """Sites whose forward neighbour along ``axis`` exists."""
    return neighbor_indices(lat, axis, 1) >= 0


@dataclass(frozen=True, eq=False)
class Observable:
    kind: str
    lattice: Lattice
    matrix: np.ndarray
    axis: int = 0
    label: str = ""

    @property
    def name(self) -> str:
        return self.label or self.kind

    @classmethod
    def position(cls, lattice: Lattice, axis: int = 0) -> Observable:
        coords = lattice.coordinates()[:, axis]
        return cls("position", lattice, np.diag(coords).astype(complex), axis,
                   f"position[{axis}]" if lattice.dims > 1 else "position")

    @classmethod
    def momentum(cls, lattice: Lattice, axis: int = 0, hbar: float = 1.0,
                 scheme: str = "forward") -> Observable:
        """``i*hbar*d/dy`` along ``axis``.

        Forward rows at an open far edge are zero: those sites have no
        forward neighbour and are excluded from every sum.
        """
        h = lattice.spacing
        fwd = _shift_matrix(lattice, axis, 1)
        if scheme == "forward":
            d = (fwd - np.diag(forward_valid(lattice, axis).astype(float))) / h
        elif scheme == "central":
            d = (fwd - _shift_matrix(lattice, axis, -1)) / (2 * h)
        else:
            raise ConfigError(f"momentum scheme must be 'forward' or 'central', got {scheme!r}")
        label = "momentum" if lattice.dims == 1 else f"momentum[{axis}]"
        return cls("momentum", lattice, 1j * hbar * d, axis, label)

    @classmethod
    def hamiltonian(cls, lattice: Lattice, potential=None, mass: float = 1.0,
                    hbar: float = 1.0) -> Observable:
        """``-hbar**2/(2 mass) * Laplacian + V``, three-point stencil per axis.

        Open edges act as Dirichlet walls.
        """
        if not mass > 0:
            raise DomainError("mass must be positive")
        n, h = lattice.n_sites, lattice.spacing
        lap = -2.0 * lattice.dims * np.eye(n)
        for j in range(lattice.dims):
            lap += _shift_matrix(lattice, j, 1) + _shift_matrix(lattice, j, -1)
        v = np.zeros(n) if potential is None else np.asarray(potential, dtype=float).ravel()
        if v.size != n:
            raise DomainError(f"potential needs {n} values, got {v.size}")
        mat = -(hbar**2) / (2 * mass) * lap / h**2 + np.diag(v)
        return cls("hamiltonian", lattice, mat.astype(complex), 0, "hamiltonian")

    def apply(self, amps) -> np.ndarray:
        return self.matrix @ np.asarray(amps)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        m = self.matrix
        return bool(np.max(np.abs(m - m.conj().T)) <= tol * max(1.0, np.max(np.abs(m))))


@dataclass(frozen=True)
class ExpectationReport:
    observable: str
    mode: str
    site: SiteId
    value: LocalNumber

    def to_dict(self) -> dict:
        return {
            "observable": self.observable,
            "mode": self.mode,
            "site": list(self.site.coords),
            "re": self.value.value.real,
            "im": self.value.value.imag,
        }


# -- states and expectation values -----------------------------------------


def pack_external(psi: WavePacket, at: SiteId) -> LocalState:
    """All amplitudes, read as same values, assembled into one state at ``at``."""
    psi.lattice.check(at)
    return LocalState(at, psi.amplitudes, "position")


def externally_scaled_state(psi_at_y: LocalState, x: SiteId, theta: ThetaField) -> LocalState:
    return scaled_transport_state(psi_at_y, x, theta)


def _check_obs(psi: WavePacket, obs: Observable):
    if obs.lattice != psi.lattice:
        raise ConfigError("observable and packet are defined on different lattices")


def expectation_unscaled(psi: WavePacket, obs: Observable, at: SiteId) -> LocalNumber:
    _check_obs(psi, obs)
    psi.lattice.check(at)
    amps = psi.amplitudes
    val = np.vdot(amps, obs.apply(amps)) * psi.lattice.volume_element
    return LocalNumber(at, val)


def expectation_external(psi: WavePacket, obs: Observable, y: SiteId, x: SiteId,
                         theta: ThetaField) -> LocalNumber:
    """Representation at ``x`` of the expectation value computed at ``y``."""
    r = scale_factor(theta, y, x).value
    return LocalNumber(x, r * expectation_unscaled(psi, obs, x).value)


def covariant_apply(obs: Observable, amps, theta: ThetaField) -> np.ndarray:
    """Apply ``obs`` at each site y after carrying each neighbour amplitude to y.

    Entry ``(y, w)`` of the matrix is weighted by ``r(w, y)``.
    """
    b = theta.base.ravel()
    amps = np.asarray(amps, dtype=complex)
    rows, cols = np.nonzero(obs.matrix)
    terms = obs.matrix[rows, cols] * np.exp(b[cols] - b[rows]) * amps[cols]
    out = np.zeros(amps.shape, dtype=complex)
    np.add.at(out, rows, terms)
    return out


def internal_integrand(psi: WavePacket, obs: Observable, theta: ThetaField) -> np.ndarray:
    """Per-site integrand ``psi*(y) (O psi)(y) dV``, each a number at its own site y."""
    _check_obs(psi, obs)
    if obs.kind not in ("position", "momentum"):
        raise ConfigError(f"internal scaling is defined for position and momentum, not {obs.kind!r}")
    amps = psi.amplitudes
    return np.conj(amps) * covariant_apply(obs, amps, theta) * psi.lattice.volume_element


def expectation_internal(psi: WavePacket, obs: Observable, x: SiteId, theta: ThetaField) -> LocalNumber:
    """Sum at ``x`` of per-site integrands, each carried over with ``r(y, x)``."""
    integrand = internal_integrand(psi, obs, theta)
    return LocalNumber(x, np.sum(scale_factors_to(theta, x) * integrand))


def transfer_internal(value_at_x: LocalNumber, z: SiteId, theta: ThetaField) -> LocalNumber:
    """Carry an internally scaled value from its site to ``z`` with ``r(x, z)``."""
    r = scale_factor(theta, value_at_x.site, z).value
    return LocalNumber(z, r * value_at_x.value)


def expectation(psi: WavePacket, obs: Observable, mode: str, x: SiteId, theta: ThetaField,
                y: SiteId | None = None) -> ExpectationReport:
    if mode == "unscaled":
        val = expectation_unscaled(psi, obs, x)
    elif mode == "external":
        if y is None:
            raise ConfigError("external mode needs the source site y")
        val = expectation_external(psi, obs, y, x, theta)
    elif mode == "internal":
        val = expectation_internal(psi, obs, x, theta)
    else:
        raise ConfigError(f"unknown expectation mode {mode!r}")
    return ExpectationReport(obs.name, mode, x, val)


def scaled_identity_operator(x: SiteId, theta: ThetaField) -> np.ndarray:
    """``diag(r(y, x) * dV)`` over the position basis."""
    return np.diag(scale_factors_to(theta, x) * theta.lattice.volume_element)


def momentum_eigenstate(k, x: SiteId, theta: ThetaField) -> LocalState:
    """Position-basis coefficients ``r(y, x) exp(i k.y) dV`` at ``x``; periodic lattices only."""
    lat = theta.lattice
    if not lat.periodic:
        raise ConfigError("momentum eigenstates need a periodic lattice")
    k = np.broadcast_to(np.asarray(k, dtype=float), (lat.dims,))
    n = k * np.asarray(lat.extent) * lat.spacing / (2 * np.pi)
    if np.any(np.abs(n - np.round(n)) > 1e-9):
        raise ConfigError(f"k = {k.tolist()} is not on the reciprocal grid 2 pi n / (N spacing)")
    y = lat.coordinates()
    amps = scale_factors_to(theta, x) * np.exp(1j * (y @ k)) * lat.volume_element
    return LocalState(x, amps, "position")


@dataclass(frozen=True, eq=False)
class CovariantMomentum:
    """Both forms of ``p_j psi`` per site; entries outside ``valid`` are NaN."""

    discrete: np.ndarray
    expanded: np.ndarray
    valid: np.ndarray

    def max_discrepancy(self) -> float:
        return float(np.max(np.abs(self.discrete[self.valid] - self.expanded[self.valid])))


def canonical_momentum_apply(psi, axis: int, theta: ThetaField, hbar: float = 1.0) -> CovariantMomentum:
    """Momentum with the neighbour amplitude carried back with its scale factor.

    ``discrete``: ``i hbar (r(y+h, y) psi(y+h) - psi(y)) / h``.
    ``expanded``: ``i hbar ((psi(y+h) - psi(y)) / h + A(y) psi(y))`` with A the
    discrete gradient of theta, i.e. the first-order expansion ``r ~ 1 + A h``.
    """
    lat = theta.lattice
    amps = psi.amplitudes if isinstance(psi, WavePacket) else np.asarray(psi, dtype=complex).ravel()
    h = lat.spacing
    nb = neighbor_indices(lat, axis, 1)
    valid = nb >= 0
    b = theta.base.ravel()
    idx = np.where(valid, nb, 0)
    ahead = amps[idx]
    r = np.exp(b[idx] - b)
    a = gradient(theta)[..., axis].ravel()
    discrete = 1j * hbar * (r * ahead - amps) / h
    expanded = 1j * hbar * ((ahead - amps) / h + a * amps)
    discrete = np.where(valid, discrete, np.nan)
    expanded = np.where(valid, expanded, np.nan)
    return CovariantMomentum(discrete, expanded, valid)


# -- energy equation -------------------------------------------------------


@dataclass
class EnergyReport:
    eigenvalues: np.ndarray
    unscaled_residual: float
    position_basis_residual: float
    energy_basis_residual: float
    transfer_vs_direct_residual: float
    transferred_gap: float
    r_yx: float

    def to_dict(self) -> dict:
        return {
            "unscaled_residual": self.unscaled_residual,
            "position_basis_residual": self.position_basis_residual,
            "energy_basis_residual": self.energy_basis_residual,
            "transfer_vs_direct_residual": self.transfer_vs_direct_residual,
            "transferred_gap": self.transferred_gap,
            "r_yx": self.r_yx,
        }


def energy_equation_check(H: Observable, x: SiteId, theta: ThetaField, y: SiteId | None = None,
                          n_states: int | None = None) -> EnergyReport:
    """Plain eigenproblem versus its position-weighted form, at ``y`` and transferred to ``x``.

    * ``unscaled_residual``: ``max_n |H psi_n - E_n psi_n|``.
    * ``position_basis_residual``: ``max_n |H R_y psi_n - E_n psi_n|`` with
      ``R_y = diag(r(w, y))``; zero only when theta is constant.
    * ``energy_basis_residual``: the same equation expanded in eigenstates of
      H; no scale factor enters, so it vanishes for any theta.
    * ``transfer_vs_direct_residual``: both sides scaled to ``x`` with
      ``r(y, x)``, the common factor cancelled, compared with the equation
      built directly at ``x`` from transported states and weights ``r(w, y)``.
    * ``transferred_gap``: left minus right side at ``x``; equals the gap at
      ``y`` because the internal weights survive the transfer.
    """
    if H.kind != "hamiltonian" or not H.is_hermitian():
        raise ConfigError("energy_equation_check needs a Hermitian hamiltonian")
    lat = theta.lattice
    if H.lattice != lat:
        raise ConfigError("hamiltonian and theta are defined on different lattices")
    y = x if y is None else y
    evals, evecs = np.linalg.eigh(H.matrix)
    count = len(evals) if n_states is None else min(n_states, len(evals))
    weights_y = scale_factors_to(theta, y)
    r_yx = scale_factor(theta, y, x).value

    unscaled = position = energy = transfer = gap = 0.0
    for n in range(count):
        vec, e = evecs[:, n], evals[n]
        unscaled = max(unscaled, float(np.linalg.norm(H.matrix @ vec - e * vec)))
        lhs_y = LocalState(y, H.matrix @ (weights_y * vec))
        rhs_y = LocalState(y, e * vec)
        position = max(position, (lhs_y - rhs_y).norm())
        coeffs = evecs.conj().T @ vec
        energy = max(energy, float(np.linalg.norm(evecs @ (evals * coeffs) - e * vec)))

        # external transfer of both sides, then cancel the common factor
        lhs_t = scaled_transport_state(lhs_y, x, theta) * (1.0 / r_yx)
        rhs_t = scaled_transport_state(rhs_y, x, theta) * (1.0 / r_yx)
        # direct construction at x: transported state, weights r(w, y) read as same values
        vec_x = transport_state(LocalState(y, vec), x).amplitudes
        lhs_x = LocalState(x, H.matrix @ (weights_y * vec_x))
        rhs_x = LocalState(x, e * vec_x)
        transfer = max(transfer, (lhs_t - lhs_x).norm(), (rhs_t - rhs_x).norm())
        gap = max(gap, (lhs_x - rhs_x).norm())
    return EnergyReport(evals, unscaled, position, energy, transfer, gap, r_yx)


# -- equation invariance and region analysis --------------------------------


def equation_invariance_check(m: float, c: float, E: float, r: float, tol: float = 1e-12) -> bool:
    """Does ``E = m c**2`` hold when every quantity is carried into the structure scaled by r?

    The images ``rE, rm, rc`` are compared using the scaled product ``* / r``.
    """
    s = ScaledStructure(r)
    lhs = correspond_to_base(E, s)
    rhs = scaled_mul(scaled_mul(correspond_to_base(m, s), correspond_to_base(c, s), s),
                     correspond_to_base(c, s), s)
    return bool(abs(lhs - rhs) <= tol * abs(rhs))


@dataclass
class RegionReport:
    region: np.ndarray
    z: SiteId
    x: SiteId
    max_internal_deviation: float
    theta_spread: float
    r_zx: ScaleFactor
    within_L: bool
    tol_r: float

    def to_dict(self) -> dict:
        return {
            "region_size": int(self.region.size),
            "z": list(self.z.coords),
            "x": list(self.x.coords),
            "max_internal_deviation": self.max_internal_deviation,
            "theta_spread": self.theta_spread,
            "r_zx": self.r_zx.value,
            "within_L": self.within_L,
            "tol_r": self.tol_r,
        }


def region_boundary(lat: Lattice, mask: np.ndarray) -> np.ndarray:
    """Flat indices of region sites that touch the outside or an open lattice edge."""
    edge = np.zeros(lat.n_sites, dtype=bool)
    for j in range(lat.dims):
        for step in (1, -1):
            nb = neighbor_indices(lat, j, step)
            outside = (nb < 0) | ~mask[np.where(nb >= 0, nb, 0)]
            edge |= outside
    return np.nonzero(mask & edge)[0]


def region_L_analysis(psi: WavePacket, x: SiteId, theta: ThetaField, tol_r: float,
                      z: SiteId | None = None) -> RegionReport:
    """Split ``r(y, x) = r(y, z) r(z, x)`` with ``z`` on the packet's support boundary.

    ``z`` defaults to the boundary site nearest ``x`` (lowest flat index on
    ties). ``within_L`` is ``|r(z, x) - 1| <= tol_r``.
    """
    if not tol_r > 0:
        raise ConfigError("tol_r must be positive")
    lat = theta.lattice
    lat.check(x)
    mask = psi.support()
    region = np.nonzero(mask)[0]
    if region.size == 0:
        raise DomainError("packet has empty support")
    if z is None:
        edge = region_boundary(lat, mask)
        dist = np.linalg.norm(lat.coordinates()[edge] - x.position, axis=1)
        z = lat.site_at(int(edge[np.argmin(dist)]))
    r_inside = scale_factors_to(theta, z)[region]
    r_zx = scale_factor(theta, z, x)
    return RegionReport(
        region=region,
        z=z,
        x=x,
        max_internal_deviation=float(np.max(np.abs(r_inside - 1.0))),
        theta_spread=theta.spread(mask),
        r_zx=r_zx,
        within_L=bool(abs(r_zx.value - 1.0) <= tol_r),
        tol_r=float(tol_r),
    )
