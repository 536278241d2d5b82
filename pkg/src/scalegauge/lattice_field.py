"""Discrete space, the scalar field theta, its gradient and the scale factors it induces.

Scale factors between sites are always rebuilt from differences of theta,
``r(y, x) = exp(theta(y) - theta(x))``, never from ratios of exponentials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .errors import ConfigError, DomainError, PathError

BOUNDARIES = ("open", "periodic")
DEFAULT_MAX_SITES = 2**20
THETA_CAP = 500.0


@dataclass(frozen=True)
class Lattice:
    """Hypercubic lattice with ``extent[d]`` sites along axis ``d``.

    Physical coordinate of a site along each axis is ``origin + i * spacing``.
    """

    extent: tuple[int, ...] = (256,)
    spacing: float = 0.1
    boundary: str = "open"
    origin: float = 0.0
    max_sites: int = field(default=DEFAULT_MAX_SITES, compare=False, repr=False)

    def __post_init__(self):
        extent = tuple(int(n) for n in np.atleast_1d(self.extent))
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "origin", float(self.origin))
        if len(extent) not in (1, 2, 3):
            raise DomainError(f"lattice must have 1, 2 or 3 dimensions, got {len(extent)}")
        if any(n < 2 for n in extent):
            raise DomainError(f"every extent must be >= 2, got {extent}")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise DomainError(f"spacing must be positive and finite, got {self.spacing}")
        if not math.isfinite(self.origin):
            raise DomainError("origin must be finite")
        if self.boundary not in BOUNDARIES:
            raise DomainError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.n_sites > self.max_sites:
            raise DomainError(f"{self.n_sites} sites exceeds the cap of {self.max_sites}")

    @property
    def dims(self) -> int:
        return len(self.extent)

    @property
    def n_sites(self) -> int:
        return math.prod(self.extent)

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"

    @property
    def volume_element(self) -> float:
        """Measure attached to one site, ``spacing ** dims``."""
        return self.spacing**self.dims

    def site(self, *coords) -> SiteId:
        if len(coords) == 1 and isinstance(coords[0], (tuple, list, np.ndarray)):
            coords = tuple(coords[0])
        return SiteId(tuple(int(c) for c in coords), self)

    def site_at(self, index: int) -> SiteId:
        if not 0 <= index < self.n_sites:
            raise DomainError(f"flat index {index} outside [0, {self.n_sites})")
        return SiteId(tuple(int(c) for c in np.unravel_index(index, self.extent)), self)

    def sites(self) -> Iterator[SiteId]:
        for coords in product(*(range(n) for n in self.extent)):
            yield SiteId(coords, self)

    def check(self, site: SiteId) -> SiteId:
        if site.lattice != self:
            raise DomainError(f"site {site} belongs to a different lattice")
        return site

    def coordinates(self) -> np.ndarray:
        """Physical coordinates of every site, shape ``(n_sites, dims)`` in flat order."""
        axes = [self.origin + self.spacing * np.arange(n) for n in self.extent]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def neighbor(self, site: SiteId, axis: int, step: int = 1) -> SiteId:
        """Nearest neighbour ``site + step * e_axis``; raises DomainError past an open edge."""
        self.check(site)
        if not 0 <= axis < self.dims:
            raise DomainError(f"axis {axis} outside [0, {self.dims})")
        if step not in (1, -1):
            raise DomainError(f"step must be +1 or -1, got {step}")
        coords = list(site.coords)
        c = coords[axis] + step
        n = self.extent[axis]
        if self.periodic:
            c %= n
        elif not 0 <= c < n:
            raise DomainError(f"neighbour of {site} along axis {axis} step {step} is off the lattice")
        coords[axis] = c
        return SiteId(tuple(coords), self)

    def link_between(self, a: SiteId, b: SiteId) -> tuple[int, int] | None:
        """Return ``(axis, step)`` with ``neighbor(a, axis, step) == b``, or None."""
        for axis in range(self.dims):
            for step in (1, -1):
                try:
                    if self.neighbor(a, axis, step) == b:
                        return axis, step
                except DomainError:
                    continue
        return None


@dataclass(frozen=True)
class SiteId:
    """A lattice point; tags which site-local structure a value inhabits."""

    coords: tuple[int, ...]
    lattice: Lattice = field(repr=False)

    def __post_init__(self):
        ext = self.lattice.extent
        if len(self.coords) != len(ext):
            raise DomainError(f"site {self.coords} has wrong dimension for extent {ext}")
        if any(not 0 <= c < n for c, n in zip(self.coords, ext)):
            raise DomainError(f"site {self.coords} out of bounds for extent {ext}")

    @property
    def index(self) -> int:
        return int(np.ravel_multi_index(self.coords, self.lattice.extent))

    @property
    def position(self) -> np.ndarray:
        return self.lattice.origin + self.lattice.spacing * np.asarray(self.coords, dtype=float)

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True, eq=False)
class ThetaField:
    """Scalar field theta on a lattice.

    Stored as a per-site ``base`` array plus a global ``offset``. Only
    differences of ``base`` ever enter scale factors, so shifting theta by a
    constant leaves every factor bit-identical.
    """

    lattice: Lattice
    base: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        base = np.array(self.base, dtype=float).reshape(self.lattice.extent)
        base.flags.writeable = False
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "offset", float(self.offset))
        if not np.all(np.isfinite(base)) or not math.isfinite(self.offset):
            raise DomainError("theta must be finite at every site")
        peak = float(np.max(np.abs(base + self.offset)))
        if peak > THETA_CAP:
            raise DomainError(f"|theta| reaches {peak:g}, above the cap of {THETA_CAP:g}")

    @classmethod
    def constant(cls, lattice: Lattice, c: float = 0.0) -> ThetaField:
        return cls(lattice, np.zeros(lattice.extent), c)

    @classmethod
    def linear(cls, lattice: Lattice, slope) -> ThetaField:
        slope = np.broadcast_to(np.asarray(slope, dtype=float), (lattice.dims,))
        return cls(lattice, (lattice.coordinates() @ slope).reshape(lattice.extent))

    @classmethod
    def gaussian_bump(cls, lattice: Lattice, center, width: float, height: float) -> ThetaField:
        if not width > 0:
            raise DomainError("gaussian_bump width must be positive")
        center = np.broadcast_to(np.asarray(center, dtype=float), (lattice.dims,))
        d2 = np.sum((lattice.coordinates() - center) ** 2, axis=1)
        return cls(lattice, (height * np.exp(-d2 / (2 * width**2))).reshape(lattice.extent))

    @property
    def values(self) -> np.ndarray:
        return self.base + self.offset

    def __call__(self, site: SiteId) -> float:
        self.lattice.check(site)
        return float(self.base[site.coords] + self.offset)

    def difference(self, y: SiteId, x: SiteId) -> float:
        """``theta(y) - theta(x)`` from the stored base values."""
        self.lattice.check(y)
        self.lattice.check(x)
        return float(self.base[y.coords] - self.base[x.coords])

    def spread(self, mask=None) -> float:
        """max - min of theta over the lattice or over a flat boolean mask."""
        flat = self.base.ravel()
        if mask is not None:
            flat = flat[np.asarray(mask, dtype=bool)]
        return float(flat.max() - flat.min())


@dataclass(frozen=True, eq=False)
class LinkExponentField:
    """Per-link exponents ``A_j(x) * spacing`` on the forward links of every site.

    ``exponents`` has shape ``extent + (dims,)``; links that leave an open
    lattice hold NaN and are never read.
    """

    lattice: Lattice
    exponents: np.ndarray
    is_gradient: bool = False

    def __post_init__(self):
        lat = self.lattice
        ex = np.array(self.exponents, dtype=float).reshape(lat.extent + (lat.dims,))
        valid = _valid_links(lat)
        ex[~valid] = np.nan
        if not np.all(np.isfinite(ex[valid])):
            raise DomainError("link exponents must be finite on every lattice link")
        ex.flags.writeable = False
        object.__setattr__(self, "exponents", ex)

    @classmethod
    def from_theta(cls, theta: ThetaField) -> LinkExponentField:
        """Exact lattice line integral of grad theta: ``theta(x + e_j) - theta(x)`` per link."""
        lat = theta.lattice
        b = theta.base
        ex = np.stack([np.roll(b, -1, axis=j) - b for j in range(lat.dims)], axis=-1)
        return cls(lat, ex, is_gradient=True)

    def exponent(self, x: SiteId, axis: int, step: int = 1) -> float:
        y = self.lattice.neighbor(x, axis, step)
        if step == 1:
            return float(self.exponents[x.coords + (axis,)])
        return -float(self.exponents[y.coords + (axis,)])


def neighbor_indices(lat: Lattice, axis: int, step: int = 1) -> np.ndarray:
    """Flat index of ``site + step * e_axis`` for every site; -1 past an open edge."""
    idx = np.indices(lat.extent)
    shifted = idx[axis] + step
    n = lat.extent[axis]
    if lat.periodic:
        shifted %= n
        off = np.zeros(lat.extent, dtype=bool)
    else:
        off = (shifted < 0) | (shifted >= n)
        shifted = np.clip(shifted, 0, n - 1)
    idx[axis] = shifted
    flat = np.ravel_multi_index(tuple(idx), lat.extent)
    flat[off] = -1
    return flat.ravel()


def _valid_links(lat: Lattice) -> np.ndarray:
    valid = np.ones(lat.extent + (lat.dims,), dtype=bool)
    if not lat.periodic:
        for j in range(lat.dims):
            idx = [slice(None)] * lat.dims + [j]
            idx[j] = -1
            valid[tuple(idx)] = False
    return valid


@dataclass(frozen=True)
class ScaleFactor:
    """``r(source, target)``: a positive number in the target site's structure."""

    source: SiteId
    target: SiteId
    value: float

    def __post_init__(self):
        if not (self.value > 0 and math.isfinite(self.value)):
            raise DomainError(f"scale factor must be positive and finite, got {self.value}")

    def __float__(self):
        return self.value


def gradient(theta: ThetaField) -> np.ndarray:
    """Discrete gradient of theta at every site, shape ``extent + (dims,)``.

    Central differences in the interior, first-order one-sided differences
    at open edges, wrap-around on periodic lattices.
    """
    lat = theta.lattice
    b, h = theta.base, lat.spacing
    parts = []
    for j in range(lat.dims):
        if lat.periodic:
            parts.append((np.roll(b, -1, axis=j) - np.roll(b, 1, axis=j)) / (2 * h))
        else:
            parts.append(np.gradient(b, h, axis=j, edge_order=1))
    return np.stack(parts, axis=-1)


def gradient_at(theta: ThetaField, x: SiteId) -> np.ndarray:
    theta.lattice.check(x)
    lat = theta.lattice
    b, h = theta.base, lat.spacing
    out = np.empty(lat.dims)
    for j in range(lat.dims):
        try:
            fwd = b[lat.neighbor(x, j, 1).coords]
            has_fwd = True
        except DomainError:
            has_fwd = False
        try:
            bwd = b[lat.neighbor(x, j, -1).coords]
            has_bwd = True
        except DomainError:
            has_bwd = False
        here = b[x.coords]
        if has_fwd and has_bwd:
            out[j] = (fwd - bwd) / (2 * h)
        elif has_fwd:
            out[j] = (fwd - here) / h
        else:
            out[j] = (here - bwd) / h
    return out


def link_factor(field: ThetaField | LinkExponentField, x: SiteId, axis: int, step: int = 1) -> float:
    """Neighbour scale factor ``exp(A_axis(x) * step * spacing)``.

    For a ThetaField, A is ``gradient_at``; for a LinkExponentField the
    stored exponent of the traversed link is used (negated when walking it
    backwards).
    """
    field.lattice.neighbor(x, axis, step)
    if isinstance(field, LinkExponentField):
        return math.exp(field.exponent(x, axis, step))
    a = gradient_at(field, x)[axis]
    return math.exp(step * a * field.lattice.spacing)


def scale_factor(theta: ThetaField, y: SiteId, x: SiteId) -> ScaleFactor:
    """``r(y, x) = exp(theta(y) - theta(x))``, valid for any pair of sites."""
    return ScaleFactor(y, x, math.exp(theta.difference(y, x)))


def scale_factors_to(theta: ThetaField, x: SiteId) -> np.ndarray:
    """``r(y, x)`` for every site y, flat site order."""
    theta.lattice.check(x)
    b = theta.base.ravel()
    return np.exp(b - b[x.index])


def path_exponent(field: LinkExponentField, path: Sequence[SiteId]) -> float:
    """Sum of traversed link exponents along a path (its circulation for a loop)."""
    lat = field.lattice
    total = 0.0
    for a, b in zip(path[:-1], path[1:]):
        lat.check(a)
        lat.check(b)
        link = lat.link_between(a, b)
        if link is None:
            raise PathError(f"sites {a} and {b} are not neighbours")
        total += field.exponent(a, *link)
    return total


def path_product(field: LinkExponentField, path: Sequence[SiteId]) -> float:
    """Ordered product of link factors along ``path``; 1 for a path of length < 2.

    Exponents are summed first and exponentiated once.
    """
    if len(path) == 1:
        field.lattice.check(path[0])
    return math.exp(path_exponent(field, list(path)))


def shift_theta(theta: ThetaField, c: float) -> ThetaField:
    if not math.isfinite(c):
        raise DomainError("shift must be finite")
    return ThetaField(theta.lattice, theta.base, theta.offset + c)


THETA_KINDS = ("constant", "linear", "gaussian_bump", "explicit", "link_explicit")


def field_from_spec(lattice: Lattice, spec: dict) -> ThetaField | LinkExponentField:
    """Build a field from a config mapping.

    Kinds: ``constant{c}``, ``linear{slope}``, ``gaussian_bump{center, width,
    height}``, ``explicit{values}``, ``link_explicit{exponents}``. An optional
    ``shift`` adds a constant to theta (ignored by link fields).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("theta spec must be a mapping with a 'kind' key")
    kind = spec["kind"]
    try:
        if kind == "constant":
            theta = ThetaField.constant(lattice, float(spec.get("c", 0.0)))
        elif kind == "linear":
            theta = ThetaField.linear(lattice, spec["slope"])
        elif kind == "gaussian_bump":
            theta = ThetaField.gaussian_bump(lattice, spec["center"], float(spec["width"]),
                                             float(spec["height"]))
        elif kind == "explicit":
            values = np.asarray(spec["values"], dtype=float)
            if values.size != lattice.n_sites:
                raise ConfigError(f"explicit theta needs {lattice.n_sites} values, got {values.size}")
            theta = ThetaField(lattice, values)
        elif kind == "link_explicit":
            ex = np.asarray(spec["exponents"], dtype=float)
            if ex.size != lattice.n_sites * lattice.dims:
                raise ConfigError(f"link_explicit needs {lattice.n_sites * lattice.dims} exponents")
            return LinkExponentField(lattice, ex)
        else:
            raise ConfigError(f"unknown theta kind {kind!r}; expected one of {THETA_KINDS}")
    except KeyError as e:
        raise ConfigError(f"theta spec of kind {kind!r} is missing {e}") from None
    shift = float(spec.get("shift", 0.0))
    return shift_theta(theta, shift) if shift else theta
