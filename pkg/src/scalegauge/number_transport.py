"""Site-tagged numbers, parallel transport between sites, and its factorisation.

Every number lives in the structure of one site. Arithmetic between
numbers at different sites raises StructureMismatch; to combine them, one
must first be carried over with ``parallel_transport`` (same value) or
``scaled_transport`` (value multiplied by ``r``).
"""
from __future__ import annotations

import math
import operator
from dataclasses import dataclass

from .errors import DomainError, StructureMismatch
from .lattice_field import SiteId, ThetaField, scale_factor
from .scaled_numbers import ScaledStructure

_OPS = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
}


@dataclass(frozen=True)
class LocalNumber:
    site: SiteId
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise DomainError(f"local number at {self.site} is not finite: {v}")
        object.__setattr__(self, "value", v)

    def _same_site(self, other):
        if not isinstance(other, LocalNumber):
            return NotImplemented
        if other.site != self.site:
            raise StructureMismatch(self.site, other.site)
        return other

    def __add__(self, other):
        other = self._same_site(other)
        if other is NotImplemented:
            return other
        return LocalNumber(self.site, self.value + other.value)

    def __sub__(self, other):
        other = self._same_site(other)
        if other is NotImplemented:
            return other
        return LocalNumber(self.site, self.value - other.value)

    def __mul__(self, other):
        other = self._same_site(other)
        if other is NotImplemented:
            return other
        return LocalNumber(self.site, self.value * other.value)

    def __truediv__(self, other):
        other = self._same_site(other)
        if other is NotImplemented:
            return other
        return LocalNumber(self.site, self.value / other.value)

    def __neg__(self):
        return LocalNumber(self.site, -self.value)


def combine(a: LocalNumber, b: LocalNumber, op: str) -> LocalNumber:
    if op not in _OPS:
        raise ValueError(f"unknown operation {op!r}; expected one of {sorted(_OPS)}")
    return _OPS[op](a, b)


def parallel_transport(a: LocalNumber, to: SiteId) -> LocalNumber:
    """Same number value in the structure at ``to``."""
    a.site.lattice.check(to)
    return LocalNumber(to, a.value)


def scaled_transport(a: LocalNumber, to: SiteId, theta: ThetaField) -> LocalNumber:
    """Scaled representation ``r(a.site, to) * a`` at ``to``."""
    r = scale_factor(theta, a.site, to).value
    return LocalNumber(to, r * a.value)


@dataclass(frozen=True)
class TransportMap:
    """Map from the structure at ``source`` to the one at ``target``, with its scale factor."""

    source: SiteId
    target: SiteId
    r: float

    @classmethod
    def between(cls, theta: ThetaField, source: SiteId, target: SiteId) -> TransportMap:
        return cls(source, target, scale_factor(theta, source, target).value)


@dataclass(frozen=True)
class ScaledLocalNumber:
    """A number of the scaled structure sitting on ``site``, held by its base image ``rep``."""

    site: SiteId
    rep: complex
    structure: ScaledStructure

    @property
    def value(self) -> complex:
        return self.rep / self.structure.r


@dataclass(frozen=True)
class WPart:
    """Scaling step at the target site: ``a -> r * a`` with ``*`` and ``/`` rescaled."""

    site: SiteId
    structure: ScaledStructure

    def __call__(self, a: LocalNumber) -> ScaledLocalNumber:
        if a.site != self.site:
            raise StructureMismatch(self.site, a.site)
        return ScaledLocalNumber(self.site, self.structure.r * a.value, self.structure)

    def inverse(self, s: ScaledLocalNumber) -> LocalNumber:
        return LocalNumber(self.site, s.value)


@dataclass(frozen=True)
class ZPart:
    """Pure retagging from the scaled structure at ``origin`` onto the structure at ``site``.

    Keeps the value a number has inside its structure; never rescales.
    """

    origin: SiteId
    site: SiteId
    structure: ScaledStructure

    def __call__(self, s: ScaledLocalNumber) -> LocalNumber:
        if s.site != self.origin:
            raise StructureMismatch(self.origin, s.site)
        return LocalNumber(self.site, s.value)

    def inverse(self, a: LocalNumber) -> ScaledLocalNumber:
        if a.site != self.site:
            raise StructureMismatch(self.site, a.site)
        return ScaledLocalNumber(self.origin, self.structure.r * a.value, self.structure)


def factorize(m: TransportMap) -> tuple[WPart, ZPart]:
    """Split the transport from ``m.target`` to ``m.source`` as ``Z . W``.

    W lives at the target and scales by ``m.r``; Z retags onto the source.
    ``Z.inverse`` of a source number gives its scaled representation at the
    target, whose ``rep`` equals ``scaled_transport``.
    """
    s = ScaledStructure(m.r)
    return WPart(m.target, s), ZPart(m.target, m.source, s)
