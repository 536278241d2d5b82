"""Site-local finite-dimensional Hilbert structures and their scaled representations.

The transport between sites is a retag of the amplitude vector. The scaled
representation of a site's Hilbert structure on another site holds states as
``r * psi`` and divides scalar multiplication and the inner product by ``r``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, StructureMismatch
from .lattice_field import SiteId, ThetaField, scale_factor
from .number_transport import LocalNumber
from .scaled_numbers import AxiomReport, random_complex, record_axiom

BASES = ("position", "momentum", "abstract")
VARIANTS = ("standard", "unscaled_states")


@dataclass(frozen=True, eq=False)
class LocalState:
    site: SiteId
    amplitudes: np.ndarray
    basis: str = "position"

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        if self.basis not in BASES:
            raise DomainError(f"basis must be one of {BASES}, got {self.basis!r}")
        if self.basis == "position" and amps.size != self.site.lattice.n_sites:
            raise DomainError(
                f"position-basis state needs {self.site.lattice.n_sites} amplitudes, got {amps.size}"
            )
        if not np.all(np.isfinite(amps)):
            raise DomainError("state amplitudes must be finite")

    def __mul__(self, a):
        return LocalState(self.site, complex(a) * self.amplitudes, self.basis)

    __rmul__ = __mul__

    def __add__(self, other: LocalState) -> LocalState:
        _same_structure(self, other)
        return LocalState(self.site, self.amplitudes + other.amplitudes, self.basis)

    def __sub__(self, other: LocalState) -> LocalState:
        _same_structure(self, other)
        return LocalState(self.site, self.amplitudes - other.amplitudes, self.basis)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _same_structure(phi: LocalState, psi: LocalState):
    if phi.site != psi.site:
        raise StructureMismatch(phi.site, psi.site, what="state")
    if phi.basis != psi.basis:
        raise StructureMismatch(f"{phi.site}[{phi.basis}]", f"{psi.site}[{psi.basis}]", what="state")


def inner_product(phi: LocalState, psi: LocalState) -> LocalNumber:
    _same_structure(phi, psi)
    return LocalNumber(phi.site, np.vdot(phi.amplitudes, psi.amplitudes))


def transport_state(phi: LocalState, to: SiteId) -> LocalState:
    """Same state in the Hilbert structure at ``to``."""
    phi.site.lattice.check(to)
    return LocalState(to, phi.amplitudes, phi.basis)


def scaled_transport_state(phi: LocalState, to: SiteId, theta: ThetaField) -> LocalState:
    """``r(phi.site, to)`` times the transported state."""
    r = scale_factor(theta, phi.site, to).value
    return LocalState(to, r * phi.amplitudes, phi.basis)


@dataclass(frozen=True)
class ScaledHilbertView:
    """Scaled representation, on the Hilbert structure at ``base_site``, of another one.

    ``variant="standard"`` uses states ``r*psi``, scalar product ``./r`` and
    inner product ``<,>/r``. ``variant="unscaled_states"`` is the rejected
    alternative with unscaled states and ``r*<,>``; it satisfies the axioms
    but is not isomorphic to n copies of the scaled number structure.
    """

    base_site: SiteId
    r: float
    variant: str = "standard"

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError(f"r must be positive, got {self.r}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}")

    def represent(self, amps):
        return self.r * amps if self.variant == "standard" else amps

    def scalar_mul(self, a_rep, amps):
        return np.asarray(a_rep)[..., None] * amps / self.r if np.ndim(a_rep) else a_rep * amps / self.r

    def inner(self, phi_amps, psi_amps):
        raw = np.sum(np.conj(phi_amps) * psi_amps, axis=-1)
        return raw / self.r if self.variant == "standard" else self.r * raw


def scaled_inner_product(phi: LocalState, psi: LocalState, view: ScaledHilbertView) -> LocalNumber:
    _same_structure(phi, psi)
    if phi.site != view.base_site:
        raise StructureMismatch(view.base_site, phi.site, what="state")
    return LocalNumber(view.base_site, view.inner(phi.amplitudes, psi.amplitudes))


def scaled_scalar_mul(a_rep: complex, psi: LocalState, view: ScaledHilbertView) -> LocalState:
    return LocalState(psi.site, view.scalar_mul(a_rep, psi.amplitudes), psi.basis)


def compare_states(phi: LocalState, psi: LocalState, theta: ThetaField | None = None,
                   mode: str = "plain") -> float:
    """Norm distance at ``psi.site`` between ``phi`` carried over and ``psi``.

    ``plain`` uses the value-preserving transport; ``scaled`` multiplies by
    ``r(phi.site, psi.site)`` first.
    """
    if mode == "plain":
        moved = transport_state(phi, psi.site)
    elif mode == "scaled":
        if theta is None:
            raise ConfigError("scaled comparison needs a theta field")
        moved = scaled_transport_state(phi, psi.site, theta)
    else:
        raise ConfigError(f"mode must be 'plain' or 'scaled', got {mode!r}")
    return (moved - psi).norm()


def check_hilbert_axioms(view: ScaledHilbertView, dim: int = 8, count: int = 200, seed: int = 0,
                         tol: float = 1e-12) -> AxiomReport:
    """Inner-product space axioms for the view's ops on random represented states.

    Scalars are drawn as values of the scaled number structure and held by
    their images ``r*a``; scalar products of them use ``* / r``.
    """
    rng = np.random.default_rng(seed)
    r = view.r
    states = [view.represent(random_complex(rng, count * dim).reshape(count, dim)) for _ in range(3)]
    phi, psi, chi = states
    a = r * random_complex(rng, count)
    b = r * random_complex(rng, count)
    report = AxiomReport(r=r, count=count, tol=tol, ops=f"hilbert-{view.variant}")

    def check(name, lhs, rhs, samples):
        lhs, rhs = np.asarray(lhs), np.asarray(rhs)
        if lhs.ndim == 2:
            res = np.max(np.abs(lhs - rhs), axis=-1)
            mag = np.maximum(np.max(np.abs(lhs), axis=-1), np.max(np.abs(rhs), axis=-1))
        else:
            res = np.abs(lhs - rhs)
            mag = np.maximum(np.abs(lhs), np.abs(rhs))
        scale = np.maximum.reduce([np.ones(count), np.full(count, r), mag])
        report.results[name] = record_axiom(name, res, scale, samples, tol)

    smul, inner = view.scalar_mul, view.inner
    ip = inner(phi, psi)
    check("inner_linearity", inner(phi, smul(a, psi) + chi), a * ip / r + inner(phi, chi), (a,))
    check("conjugate_symmetry", ip, np.conj(inner(psi, phi)), (ip,))
    norms = inner(phi, phi)
    # positive definiteness: real part > 0, imaginary part vanishes
    pd_res = np.abs(norms.imag) + np.where(norms.real > 0, 0.0, 1.0 + np.abs(norms.real))
    report.results["positive_definite"] = record_axiom(
        "positive_definite", pd_res, np.maximum(1.0, np.abs(norms)), (norms,), tol)
    check("scalar_identity", smul(np.full(count, complex(r)), psi), psi, (a,))
    check("scalar_associative", smul(a, smul(b, psi)), smul(a * b / r, psi), (a, b))
    check("scalar_distributive", smul(a + b, psi), smul(a, psi) + smul(b, psi), (a, b))
    check("vector_distributive", smul(a, psi + chi), smul(a, psi) + smul(a, chi), (a,))
    return report


def cn_consistency_residual(view: ScaledHilbertView, phi_amps, psi_amps) -> float:
    """Relative gap between the view's inner product and the componentwise scaled-number one.

    Components of a represented state are treated as images of numbers of
    the scaled structure and combined with ``* / r`` and ``+``; for the
    standard variant the two agree, for the unscaled_states variant they differ by
    ``r**2``.
    """
    rp, rq = view.represent(np.asarray(phi_amps)), view.represent(np.asarray(psi_amps))
    direct = view.inner(rp, rq)
    componentwise = np.sum(np.conj(rp) * rq / view.r)
    return float(abs(direct - componentwise) / max(abs(direct), abs(componentwise), 1e-300))
