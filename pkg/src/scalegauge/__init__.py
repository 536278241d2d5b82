"""Local number structures linked by a scale field theta on a lattice.

Numbers at different sites live in different structures. Moving a value
between sites is either a plain retagging (parallel transport) or a
rescaling by ``r(y, x) = exp(theta(y) - theta(x))``.
"""
from .errors import (
    ConfigError,
    DomainError,
    FormatError,
    NonFiniteError,
    PathError,
    ScalegaugeError,
    StructureMismatch,
)
from .lattice_field import (
    Lattice,
    LinkExponentField,
    ScaleFactor,
    SiteId,
    ThetaField,
    field_from_spec,
    gradient,
    link_factor,
    path_product,
    scale_factor,
    shift_theta,
)
from .number_transport import (
    LocalNumber,
    TransportMap,
    combine,
    factorize,
    parallel_transport,
    scaled_transport,
)
from .quantum_scaling import (
    Observable,
    WavePacket,
    canonical_momentum_apply,
    energy_equation_check,
    equation_invariance_check,
    expectation,
    expectation_external,
    expectation_internal,
    expectation_unscaled,
    momentum_eigenstate,
    region_L_analysis,
    transfer_internal,
)
from .scaled_hilbert import LocalState, ScaledHilbertView, check_hilbert_axioms, inner_product
from .scaled_numbers import (
    ScaledStructure,
    check_field_axioms,
    lift_polynomial,
    lift_term,
    scaled_add,
    scaled_div,
    scaled_mul,
    scaled_sub,
)

__version__ = "0.1.0"
