"""System tags and semi-axes parameters shared by all modules."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Tuple

from .errors import CoincidentAxesError
from .exact import BigRational, Q


class System(str, enum.Enum):
    JACOBI_MOSER = "jacobi-moser"
    NEUMANN = "neumann"
    DUAL_MOSER = "dual-moser"

    @classmethod
    def parse(cls, s) -> "System":
        if isinstance(s, System):
            return s
        key = str(s).strip().lower().replace("_", "-")
        aliases = {"neumann-uhlenbeck": "neumann", "jm": "jacobi-moser", "dm": "dual-moser",
                   "moser": "jacobi-moser", "nu": "neumann"}
        key = aliases.get(key, key)
        for m in cls:
            if m.value == key:
                return m
        raise ValueError(f"unknown system {s!r}")


ALL_SYSTEMS = (System.JACOBI_MOSER, System.NEUMANN, System.DUAL_MOSER)

DEFAULT_AXES = (1, 2, 4, 7, 11)


@dataclass(frozen=True)
class SemiAxes:
    """0 < a_0 < a_1 < ... < a_n, exact."""
    a: Tuple[BigRational, ...]

    def __init__(self, a: Sequence):
        vals = tuple(Q(x) for x in a)
        if len(vals) < 2:
            raise ValueError("need at least two semi-axes")
        if any(x <= 0 for x in vals):
            raise ValueError("semi-axes must be positive")
        if len(set(vals)) != len(vals):
            raise CoincidentAxesError()
        if any(x >= y for x, y in zip(vals, vals[1:])):
            raise ValueError("semi-axes must be strictly increasing")
        object.__setattr__(self, "a", vals)

    @classmethod
    def default(cls, n: int) -> "SemiAxes":
        return cls(DEFAULT_AXES[: n + 1])

    @classmethod
    def parse(cls, text: str) -> "SemiAxes":
        return cls([t for t in text.replace(" ", "").split(",") if t])

    @property
    def n(self) -> int:
        return len(self.a) - 1

    def __len__(self):
        return len(self.a)

    def __iter__(self):
        return iter(self.a)

    def __getitem__(self, i):
        return self.a[i]


def as_axes(a) -> SemiAxes:
    return a if isinstance(a, SemiAxes) else SemiAxes(a)
