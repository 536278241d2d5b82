"""The scaled complex-number structure represented on the base complex numbers.

A number of the structure scaled by ``r`` is always stored by its image in
the base structure (the value ``a`` is held as ``r * a``). On those images,
``+`` and ``-`` are unchanged, multiplication becomes ``a * b / r``, division
becomes ``r * (a / b)``, and the constants 0 and 1 are held as 0 and ``r``.

All operations accept Python scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, DomainError, NonFiniteError


@dataclass(frozen=True)
class ScaledStructure:
    r: float = 1.0

    def __post_init__(self):
        r = float(self.r)
        if not (r > 0 and math.isfinite(r)):
            raise DomainError(f"scaling factor must be positive and finite, got {self.r}")
        object.__setattr__(self, "r", r)

    @property
    def zero(self) -> complex:
        return 0j

    @property
    def one(self) -> complex:
        return complex(self.r)


def _checked(v):
    if not np.all(np.isfinite(v)):
        raise NonFiniteError("scaled arithmetic produced a non-finite representation")
    return v


def scaled_add(a, b):
    return _checked(a + b)


def scaled_sub(a, b):
    return _checked(a - b)


def scaled_mul(a, b, s: ScaledStructure):
    return _checked(a * b / s.r)


def scaled_div(a, b, s: ScaledStructure):
    if np.any(np.asarray(b) == 0):
        raise ZeroDivisionError("division by the zero of a scaled structure")
    return _checked(s.r * (a / b))


def identity_element(s: ScaledStructure) -> complex:
    return s.one


def correspond_to_base(a_value, s: ScaledStructure):
    """Image in the base structure of the value ``a_value`` of the scaled structure."""
    return _checked(s.r * a_value)


def value_in_structure(rep, s: ScaledStructure):
    """Inverse of ``correspond_to_base``."""
    return rep / s.r


def same_value_view(a_value):
    """The same value in another structure is written with the same numeral."""
    return a_value


# -- operation tables ------------------------------------------------------


@dataclass(frozen=True)
class OpTable:
    """Arithmetic on base representations of one structure."""

    name: str
    r: float
    add: Callable
    sub: Callable
    mul: Callable
    div: Callable
    zero: complex
    one: complex


def scaled_ops(s: ScaledStructure) -> OpTable:
    return OpTable(
        name="scaled",
        r=s.r,
        add=lambda a, b: a + b,
        sub=lambda a, b: a - b,
        mul=lambda a, b: a * b / s.r,
        div=lambda a, b: s.r * (a / b),
        zero=0j,
        one=complex(s.r),
    )


def broken_ops(s: ScaledStructure) -> OpTable:
    """Deliberately wrong table: plain ``*`` in place of ``* / r``."""
    ok = scaled_ops(s)
    return OpTable(name="broken", r=s.r, add=ok.add, sub=ok.sub, mul=lambda a, b: a * b,
                   div=ok.div, zero=ok.zero, one=ok.one)


# -- axiom verification ----------------------------------------------------


@dataclass
class AxiomResult:
    passed: bool
    max_residual: float
    worst_sample: tuple
    fail_fraction: float

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "max_residual": self.max_residual,
            "worst_sample": [_complex_pair(v) for v in self.worst_sample],
            "fail_fraction": self.fail_fraction,
        }


@dataclass
class AxiomReport:
    r: float
    count: int
    tol: float
    ops: str
    results: dict[str, AxiomResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(res.passed for res in self.results.values())

    def to_dict(self) -> dict:
        return {name: res.to_dict() for name, res in self.results.items()}


def _complex_pair(v) -> list[float]:
    v = complex(v)
    return [v.real, v.imag]


def random_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _scale(r, *arrays):
    """Residual normaliser ``max(1, r, |values|)`` per sample."""
    mags = [np.abs(np.asarray(a)) for a in arrays]
    return np.maximum.reduce([np.ones_like(mags[0]), np.full_like(mags[0], r), *mags])


def record_axiom(name, residual, scale, samples, tol) -> AxiomResult:
    rel = np.abs(residual) / scale
    k = int(np.argmax(rel))
    return AxiomResult(
        passed=bool(np.all(rel <= tol)),
        max_residual=float(rel[k]),
        worst_sample=tuple(np.asarray(s)[k] for s in samples),
        fail_fraction=float(np.mean(rel > tol)),
    )


def check_field_axioms(s: ScaledStructure, count: int = 1000, seed: int = 0,
                       tol: float = 1e-12, ops: OpTable | None = None) -> AxiomReport:
    """Check the complex field axioms on ``count`` seeded random triples.

    Triples are drawn as values of the scaled structure and converted to
    their base representations before the op table is applied. Residuals are
    relative to ``max(1, r, |operands|, |results|)``.
    """
    if count < 1 or not tol > 0:
        raise ConfigError("count must be >= 1 and tol > 0")
    ops = ops or scaled_ops(s)
    rng = np.random.default_rng(seed)
    a, b, c = (correspond_to_base(random_complex(rng, count), s) for _ in range(3))
    add, sub, mul, div = ops.add, ops.sub, ops.mul, ops.div
    zero, one = ops.zero, ops.one
    report = AxiomReport(r=s.r, count=count, tol=tol, ops=ops.name)

    def check(name, lhs, rhs, samples):
        report.results[name] = record_axiom(name, lhs - rhs, _scale(s.r, lhs, rhs, *samples),
                                            samples, tol)

    check("add_commutative", add(a, b), add(b, a), (a, b))
    check("add_associative", add(add(a, b), c), add(a, add(b, c)), (a, b, c))
    check("mul_commutative", mul(a, b), mul(b, a), (a, b))
    check("mul_associative", mul(mul(a, b), c), mul(a, mul(b, c)), (a, b, c))
    check("distributive", mul(a, add(b, c)), add(mul(a, b), mul(a, c)), (a, b, c))
    check("add_identity", add(a, zero), a, (a,))
    check("mul_identity", mul(a, one), a, (a,))
    check("add_inverse", add(a, sub(zero, a)), np.zeros_like(a), (a,))
    inv = div(one, a)
    check("mul_inverse", mul(a, inv), np.full_like(a, one), (a,))
    return report


# -- lifting of rational terms and polynomials ------------------------------


@dataclass(frozen=True)
class RationalTerm:
    """The monomial ratio ``a**m / b**n``."""

    m: int
    n: int
    a: complex
    b: complex

    def __post_init__(self):
        if not (1 <= self.m <= 16 and 1 <= self.n <= 16):
            raise DomainError("term degrees must lie in [1, 16]")
        if self.b == 0:
            raise ZeroDivisionError("denominator base value is zero")

    def plain(self) -> complex:
        return self.a**self.m / self.b**self.n


def _scaled_power(rep, k: int, s: ScaledStructure):
    out = rep
    for _ in range(k - 1):
        out = scaled_mul(out, rep, s)
    return out


def lift_term(t: RationalTerm, s: ScaledStructure) -> complex:
    """Evaluate ``a**m / b**n`` with scaled operations on the images ``r*a``, ``r*b``.

    The result is the image ``r * (a**m / b**n)``.
    """
    num = _scaled_power(correspond_to_base(t.a, s), t.m, s)
    den = _scaled_power(correspond_to_base(t.b, s), t.n, s)
    return scaled_div(num, den, s)


def lift_exponent(m: int, n: int) -> int:
    """Net power of r picked up by a lifted ``a**m / b**n``, counted symbolically.

    Each factor contributes +1, each scaled product -1, and the scaled
    division +1 on top of the numerator-minus-denominator count.
    """
    numerator = m - (m - 1)
    denominator = n - (n - 1)
    return numerator - denominator + 1


def lift_polynomial(coeffs: Sequence[complex], a_rep, s: ScaledStructure):
    """Horner evaluation of ``sum(coeffs[k] * a**k)`` entirely in the scaled structure.

    ``a_rep`` is the base image of the argument; coefficients are values of
    the scaled structure and get corresponded first. Returns the base image
    of ``p(a)``.
    """
    if len(coeffs) == 0:
        return 0j
    acc = correspond_to_base(complex(coeffs[-1]), s)
    for c in reversed(coeffs[:-1]):
        acc = scaled_add(scaled_mul(acc, a_rep, s), correspond_to_base(complex(c), s))
    return acc
