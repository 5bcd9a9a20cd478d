"""Signed monomials and group-ring elements in a primitive 4r-th root of unity.

All exponents are measured in units of zeta = exp(i*pi/(2r)), so the skein
variable A is zeta**2 and half-integer powers of A become integer powers of
zeta.  Equality is tested in the group ring Z[zeta]/(zeta**(4r) - 1); no
cyclotomic relations are used.  Group-ring equality implies equality of the
complex values, which is all the exact checks in this package need.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "CycElem",
    "CycMatrix",
    "Monomial",
    "RootSystem",
    "cyc_add",
    "cyc_mul",
    "cyc_neg",
    "eval_complex",
    "mono_inv",
    "mono_mul",
]


@dataclass(frozen=True)
class RootSystem:
    """Level data for an odd r >= 3: m = (r - 1)/2 and exponent modulus 4r."""

    r: int
    m: int = field(init=False)
    order: int = field(init=False)

    def __post_init__(self) -> None:
        if not isinstance(self.r, (int, np.integer)) or self.r < 3 or self.r % 2 == 0:
            raise ValueError(f"r must be an odd integer >= 3, got {self.r!r}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "m", (self.r - 1) // 2)
        object.__setattr__(self, "order", 4 * self.r)

    def mono(self, sign: int, exp: int) -> Monomial:
        """Canonical monomial sign * zeta**exp."""
        if sign == 0:
            return Monomial.ZERO
        if sign not in (1, -1):
            raise ValueError(f"sign must be -1, 0 or +1, got {sign}")
        return Monomial(sign, exp % self.order)

    @cached_property
    def zeta_powers(self) -> np.ndarray:
        """Complex values zeta**k for k = 0 .. 4r-1."""
        k = np.arange(self.order)
        out = np.exp(1j * np.pi * k / (2 * self.r))
        out.setflags(write=False)
        return out


@dataclass(frozen=True)
class Monomial:
    """sign * zeta**exp with sign in {-1, 0, +1}; sign 0 is the canonical zero."""

    sign: int
    exp: int = 0

    ZERO = None  # type: Monomial
    ONE = None  # type: Monomial

    def __post_init__(self) -> None:
        if self.sign == 0 and self.exp != 0:
            raise ValueError("zero monomial must have exp 0")

    def __bool__(self) -> bool:
        return self.sign != 0

    def __neg__(self) -> Monomial:
        return Monomial(-self.sign, self.exp) if self.sign else self


Monomial.ZERO = Monomial(0, 0)
Monomial.ONE = Monomial(1, 0)


def mono_mul(a: Monomial, b: Monomial, sys: RootSystem) -> Monomial:
    if a.sign == 0 or b.sign == 0:
        return Monomial.ZERO
    return Monomial(a.sign * b.sign, (a.exp + b.exp) % sys.order)


def mono_inv(a: Monomial, sys: RootSystem) -> Monomial:
    if a.sign == 0:
        raise ZeroDivisionError("zero monomial has no inverse")
    return Monomial(a.sign, (-a.exp) % sys.order)


@dataclass(frozen=True)
class CycElem:
    """Integer combination of powers of zeta, stored as sorted (exp, coeff) pairs.

    Build instances with :meth:`from_mapping` or :meth:`from_monomial`; the raw
    constructor assumes its input is already canonical.
    """

    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_mapping(cls, coeffs: Mapping[int, int], sys: RootSystem) -> CycElem:
        acc: dict[int, int] = {}
        for e, c in coeffs.items():
            k = e % sys.order
            acc[k] = acc.get(k, 0) + int(c)
        return cls(tuple(sorted((e, c) for e, c in acc.items() if c != 0)))

    @classmethod
    def from_monomial(cls, mono: Monomial) -> CycElem:
        if mono.sign == 0:
            return cls()
        return cls(((mono.exp, mono.sign),))

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def as_monomial(self) -> Monomial | None:
        """The equivalent monomial if this element has at most one term of
        coefficient +-1, otherwise None."""
        if not self.terms:
            return Monomial.ZERO
        if len(self.terms) == 1 and self.terms[0][1] in (1, -1):
            e, c = self.terms[0]
            return Monomial(c, e)
        return None


def cyc_add(a: CycElem, b: CycElem) -> CycElem:
    acc = dict(a.terms)
    for e, c in b.terms:
        acc[e] = acc.get(e, 0) + c
    return CycElem(tuple(sorted((e, c) for e, c in acc.items() if c != 0)))


def cyc_neg(a: CycElem) -> CycElem:
    return CycElem(tuple((e, -c) for e, c in a.terms))


def cyc_mul(a: CycElem, b: CycElem, sys: RootSystem) -> CycElem:
    acc: dict[int, int] = {}
    for e1, c1 in a.terms:
        for e2, c2 in b.terms:
            k = (e1 + e2) % sys.order
            acc[k] = acc.get(k, 0) + c1 * c2
    return CycElem(tuple(sorted((e, c) for e, c in acc.items() if c != 0)))


def eval_complex(x: CycElem | Monomial, sys: RootSystem) -> complex:
    """Value at zeta = exp(i*pi/(2r)), in double precision."""
    z = sys.zeta_powers
    if isinstance(x, Monomial):
        return complex(x.sign * z[x.exp]) if x.sign else 0j
    return complex(sum(c * z[e] for e, c in x.terms))


class CycMatrix:
    """Square matrix over the group ring, stored as canonical term arrays.

    Each term is (row, col, exp, coeff) with 1-based row/col; terms are sorted
    by (row, col, exp), exponents are reduced mod 4r, duplicates are merged and
    zero coefficients dropped.  Two matrices are equal iff their term arrays
    are identical, which makes exact comparison a single array check.
    """

    def __init__(self, dim: int, sys: RootSystem, rows, cols, exps, coeffs):
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        exps = np.asarray(exps, dtype=np.int64).ravel() % sys.order
        coeffs = np.asarray(coeffs, dtype=np.int64).ravel()
        if not (len(rows) == len(cols) == len(exps) == len(coeffs)):
            raise ValueError("term arrays must have equal length")
        if len(rows) and (rows.min() < 1 or rows.max() > dim or cols.min() < 1 or cols.max() > dim):
            raise ValueError("term index outside 1..dim")
        key = (rows * (dim + 1) + cols) * sys.order + exps
        uniq, inv = np.unique(key, return_inverse=True)
        summed = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(summed, inv, coeffs)
        keep = summed != 0
        uniq, summed = uniq[keep], summed[keep]
        self.dim = dim
        self.sys = sys
        self.exps = uniq % sys.order
        rc = uniq // sys.order
        self.rows = rc // (dim + 1)
        self.cols = rc % (dim + 1)
        self.coeffs = summed
        for a in (self.rows, self.cols, self.exps, self.coeffs):
            a.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CycMatrix):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.sys == other.sys
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.exps, other.exps)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"CycMatrix(dim={self.dim}, r={self.sys.r}, terms={len(self.rows)})"

    @property
    def nterms(self) -> int:
        return len(self.rows)

    def entry(self, row: int, col: int) -> CycElem:
        sel = (self.rows == row) & (self.cols == col)
        return CycElem(tuple(zip(self.exps[sel].tolist(), self.coeffs[sel].tolist())))

    def column(self, col: int) -> dict[int, CycElem]:
        out: dict[int, list[tuple[int, int]]] = {}
        sel = self.cols == col
        for i, e, c in zip(self.rows[sel].tolist(), self.exps[sel].tolist(), self.coeffs[sel].tolist()):
            out.setdefault(i, []).append((e, c))
        return {i: CycElem(tuple(t)) for i, t in out.items()}

    def support(self) -> set[tuple[int, int]]:
        """Positions (row, col) holding a nonzero group-ring element."""
        return set(zip(self.rows.tolist(), self.cols.tolist()))

    def zero_rows(self) -> list[int]:
        present = set(self.rows.tolist())
        return [i for i in range(1, self.dim + 1) if i not in present]

    def to_complex(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        np.add.at(out, (self.rows - 1, self.cols - 1), self.coeffs * self.sys.zeta_powers[self.exps])
        return out

    def terms(self) -> Iterable[tuple[int, int, int, int]]:
        return zip(self.rows.tolist(), self.cols.tolist(), self.exps.tolist(), self.coeffs.tolist())
