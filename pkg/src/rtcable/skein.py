"""Index calculus for the torus vector space.

The vectors e_i are defined for every integer i through e_{-i} = -e_i and
e_{i+kr} = (-1)^k e_i; every e_i is then zero or +-e_j with 1 <= j <= m.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Literal

import numpy as np

from rtcable.cyclotomic import CycElem, Monomial, RootSystem, cyc_add, eval_complex
from rtcable.params import CableParams

__all__ = [
    "ReducedIndex",
    "SkeinVector",
    "f_raw",
    "f_tilde",
    "fpm_reduced",
    "reduce_index",
    "reduce_indices",
]

Sign = Literal[1, -1]


@dataclass(frozen=True)
class ReducedIndex:
    """sign * e_j with j in [1, m], or the zero vector (sign 0, j 0)."""

    sign: int
    j: int

    def __post_init__(self) -> None:
        if (self.j == 0) != (self.sign == 0):
            raise ValueError(f"inconsistent reduced index ({self.sign}, {self.j})")

    def __neg__(self) -> ReducedIndex:
        return ReducedIndex(-self.sign, self.j)

    def __bool__(self) -> bool:
        return self.sign != 0


ZERO_INDEX = ReducedIndex(0, 0)


def reduce_index(i: int, sys: RootSystem) -> ReducedIndex:
    r, m = sys.r, sys.m
    t = i % (2 * r)
    sign = 1
    if t >= r:
        t -= r
        sign = -1
    if t == 0:
        return ZERO_INDEX
    # e_t = e_{r-t} for 0 < t < r
    return ReducedIndex(sign, t if t <= m else r - t)


def reduce_indices(i: np.ndarray, sys: RootSystem) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`reduce_index`; returns (signs, js) arrays."""
    r, m = sys.r, sys.m
    t = np.asarray(i, dtype=np.int64) % (2 * r)
    sign = np.where(t >= r, -1, 1)
    t = np.where(t >= r, t - r, t)
    j = np.where(t <= m, t, r - t)
    sign = np.where(t == 0, 0, sign)
    return sign, j


@dataclass(frozen=True)
class SkeinVector:
    """Sparse vector over e_1..e_m with group-ring coefficients."""

    items: tuple[tuple[int, CycElem], ...] = ()

    @classmethod
    def from_mapping(cls, entries: Mapping[int, CycElem]) -> SkeinVector:
        return cls(tuple(sorted((j, c) for j, c in entries.items() if c)))

    @classmethod
    def collect(cls, terms, sys: RootSystem) -> SkeinVector:
        """Sum (coefficient Monomial, raw integer index) terms after reduction."""
        acc: dict[int, CycElem] = {}
        for mono, idx in terms:
            red = reduce_index(idx, sys)
            if not red or not mono:
                continue
            c = CycElem.from_monomial(Monomial(mono.sign * red.sign, mono.exp))
            acc[red.j] = cyc_add(acc[red.j], c) if red.j in acc else c
        return cls.from_mapping(acc)

    @property
    def entries(self) -> dict[int, CycElem]:
        return dict(self.items)

    def support(self) -> list[int]:
        return [j for j, _ in self.items]

    def norm_sq(self, sys: RootSystem) -> float:
        return float(sum(abs(eval_complex(c, sys)) ** 2 for _, c in self.items))

    def to_complex(self, sys: RootSystem) -> np.ndarray:
        out = np.zeros(sys.m, dtype=complex)
        for j, c in self.items:
            out[j - 1] = eval_complex(c, sys)
        return out


def _check_l(l: int, params: CableParams) -> None:
    if not 0 <= l <= params.m - 1:
        raise ValueError(f"l must lie in [0, {params.m - 1}], got {l}")


def f_raw(l: int, params: CableParams) -> list[tuple[Monomial, int]]:
    """Unreduced terms of f_l as (coefficient, index) pairs.

    f_0 = e_1 and f_l = e_{ql+1} - A^{2pl} e_{ql-1}; A^{2pl} is zeta^{4pl}.
    """
    _check_l(l, params)
    if l == 0:
        return [(Monomial.ONE, 1)]
    q = params.q
    return [
        (Monomial.ONE, q * l + 1),
        (params.sys.mono(-1, 4 * params.p * l), q * l - 1),
    ]


def f_tilde(l: int, params: CableParams) -> SkeinVector:
    return SkeinVector.collect(f_raw(l, params), params.sys)


def fpm_reduced(l: int, sign: Sign, params: CableParams) -> ReducedIndex:
    """Reduction of e_{ql+1} (sign +1) or e_{ql-1} (sign -1).

    For l = 0 the convention is f_0^+ = e_1 and f_0^- = 0.
    """
    _check_l(l, params)
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if l == 0:
        return ReducedIndex(1, 1) if sign == 1 else ZERO_INDEX
    return reduce_index(params.q * l + sign, params.sys)
