"""Comparison of outcomes produced at different sites.

An outcome is a physical record (here, a string of decimal symbols) at a
site. Interpreting it yields a number in that site's structure;
transmitting it moves the record itself, so no scale factor is involved.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import FormatError
from ..lattice_field import SiteId
from ..number_transport import LocalNumber

_NUMERAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")


@dataclass(frozen=True)
class OutcomeState:
    site: SiteId
    symbols: str


def format_outcome(value: float) -> str:
    """Write a real number as a numeral with 17 significant digits."""
    return format(float(value), ".17g")


def interpret(o: OutcomeState) -> LocalNumber:
    s = o.symbols.strip()
    if not _NUMERAL.fullmatch(s):
        raise FormatError(f"cannot interpret {o.symbols!r} as a number")
    v = float(s)
    if v != v or v in (float("inf"), float("-inf")):
        raise FormatError(f"{o.symbols!r} is not a finite number")
    return LocalNumber(o.site, v + 0.0)


def transmit(o: OutcomeState, to: SiteId) -> OutcomeState:
    """Carry the record unchanged to ``to``."""
    o.site.lattice.check(to)
    return OutcomeState(to, o.symbols)


def compare_outcomes(a: OutcomeState, b: OutcomeState, at: SiteId) -> bool:
    """Transmit both records to ``at``, interpret there, compare the numbers exactly."""
    va = interpret(transmit(a, at))
    vb = interpret(transmit(b, at))
    return (va - vb).value == 0
