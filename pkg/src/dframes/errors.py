"""Exception hierarchy and capacity guards.

Mathematical failures (a law does not hold) are reported as values with
witnesses; exceptions are reserved for malformed input, broken
preconditions and exhausted size guards.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


class DFrameError(Exception):
    """Base class for every error raised by this package."""


class StructureError(DFrameError):
    """Malformed structure: non-total tables, out-of-range indices, bad covers."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PreconditionError(DFrameError):
    """A checked precondition of an operation failed; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CapacityError(DFrameError):
    """An exhaustive enumeration would exceed its configured size guard."""


class ParseError(DFrameError):
    def __init__(self, message, line=0, column=0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Limits:
    ideal_base: int = 20          # |B| for 2^|B| C-ideal enumeration
    hom_space: int = 10**12       # |dst|^|src| for hom enumeration
    generators: int = 16          # |gens| per side for the D-bar subset scan
    exhaustive_base: int = 3      # |B| in exhaustive presentation sweeps
    directed_subsets: int = 2     # max size of literally enumerated directed subsets


def limits() -> Limits:
    """Default limits, overridden by ``DFRM_CAPACITY=key=value,...``."""
    spec = os.environ.get("DFRM_CAPACITY", "").strip()
    if not spec:
        return Limits()
    known = {f.name for f in fields(Limits)}
    updates = {}
    for item in spec.split(","):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"unknown capacity key {key!r} in DFRM_CAPACITY")
        updates[key] = int(float(value))
    return replace(Limits(), **updates)
