"""Morton's cabling formula, the reduced f-basis and the operator factorisation.

The operator of the (p,q)-cable space sends e_i to

    A^{pq(i^2-1)/2} * sum_{k in S_i} A^{-2pk(qk+1)} e_{2qk+1},

with S_i = {-(i-1)/2, ..., (i-1)/2}.  Writing j = 2k (so j runs over
-(i-1), -(i-3), ..., i-1) and A = zeta^2, the k-th term is
zeta^{pq(i^2-1) - pq j^2 - 2pj} e_{qj+1}, with integer exponent and index.
Terms j and -j pair into a multiple of f_j = e_{qj+1} - A^{2pj} e_{qj-1}, so in
the f-basis the operator is diag * (0/1 upper triangular) * diag.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from rtcable.cyclotomic import CycElem, CycMatrix, Monomial, RootSystem, mono_inv
from rtcable.errors import ConsistencyError
from rtcable.params import CableParams
from rtcable.skein import SkeinVector, f_tilde, reduce_indices

__all__ = [
    "CableParams",
    "FactorTriple",
    "RmMatrix",
    "build_Rm",
    "f_expansion",
    "factor_matrices",
    "inverse_factors",
    "morton_assembly",
    "morton_column",
    "rt_matrix_e_basis",
    "t_index_set",
]


def _check_i(i: int, params: CableParams) -> None:
    if not 1 <= i <= params.m:
        raise ValueError(f"colour index i must lie in [1, {params.m}], got {i}")


def t_index_set(i: int) -> range:
    """l-values of the f-expansion of column i: {0,2,..,i-1} or {1,3,..,i-1}."""
    return range((i - 1) % 2, i, 2)


def morton_column(i: int, params: CableParams) -> SkeinVector:
    """Image of e_i under the cable operator, reduced into e_1..e_m."""
    _check_i(i, params)
    p, q, sys = params.p, params.q, params.sys
    head = p * q * (i * i - 1)
    terms = [
        (sys.mono(1, head - p * q * j * j - 2 * p * j), q * j + 1)
        for j in range(-(i - 1), i, 2)
    ]
    return SkeinVector.collect(terms, sys)


def f_expansion(i: int, params: CableParams) -> dict[int, Monomial]:
    """Coefficients of f~_l in the image of e_i, keyed by l."""
    _check_i(i, params)
    p, q, sys = params.p, params.q, params.sys
    head = p * q * (i * i - 1)
    return {l: sys.mono(1, head - p * q * l * l - 2 * p * l) for l in t_index_set(i)}


@dataclass(frozen=True)
class RmMatrix:
    """Columns f~_0 .. f~_{m-1} written in the e_1..e_m basis.

    When gcd(r, q) = 1 every nonzero entry is a single signed monomial.  When
    r and q share a factor, one column can have both of its terms land on
    e_1, so entries are kept as group-ring elements in general.
    """

    dim: int
    sys: RootSystem
    cols: tuple[SkeinVector, ...]

    def entry(self, row: int, col: int) -> CycElem:
        return self.cols[col - 1].entries.get(row, CycElem())

    def monomial(self, row: int, col: int) -> Monomial | None:
        return self.entry(row, col).as_monomial()

    def is_monomial(self) -> bool:
        return all(c.as_monomial() is not None for v in self.cols for _, c in v.items)

    def support(self) -> set[tuple[int, int]]:
        return {(row, c + 1) for c, v in enumerate(self.cols) for row in v.support()}

    def col_counts(self) -> list[int]:
        return [len(v.items) for v in self.cols]

    def row_counts(self) -> list[int]:
        counts = [0] * self.dim
        for v in self.cols:
            for row in v.support():
                counts[row - 1] += 1
        return counts

    def rows_of(self) -> dict[int, list[int]]:
        """Row index -> sorted list of columns holding a nonzero in that row."""
        out: dict[int, list[int]] = {i: [] for i in range(1, self.dim + 1)}
        for c, v in enumerate(self.cols):
            for row in v.support():
                out[row].append(c + 1)
        return out

    def nnz(self) -> int:
        return sum(self.col_counts())

    def term_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(rows, cols, exps, coeffs) over all group-ring terms of all entries."""
        out = [
            (row, c + 1, e, k)
            for c, v in enumerate(self.cols)
            for row, elem in v.items
            for e, k in elem.terms
        ]
        if not out:
            z = np.zeros(0, dtype=np.int64)
            return z, z, z, z
        a = np.array(out, dtype=np.int64)
        return a[:, 0], a[:, 1], a[:, 2], a[:, 3]

    def to_cycmatrix(self) -> CycMatrix:
        return CycMatrix(self.dim, self.sys, *self.term_arrays())

    def to_complex(self) -> np.ndarray:
        return self.to_cycmatrix().to_complex()


@lru_cache(maxsize=256)
def build_Rm(params: CableParams) -> RmMatrix:
    m = params.m
    return RmMatrix(m, params.sys, tuple(f_tilde(l, params) for l in range(m)))


@dataclass(frozen=True)
class FactorTriple:
    """Operator in the f~-basis as D1 @ U @ D2.

    D2[i-1] = zeta^{pq(i^2-1)}, D1[l] = zeta^{-2pl - pql^2}, and
    U[l, i-1] = 1 iff l is in the index set of column i.
    """

    D1: tuple[Monomial, ...]
    U: np.ndarray
    D2: tuple[Monomial, ...]

    @property
    def d1_exps(self) -> np.ndarray:
        return np.array([d.exp for d in self.D1], dtype=np.int64)

    @property
    def d2_exps(self) -> np.ndarray:
        return np.array([d.exp for d in self.D2], dtype=np.int64)


def _upper_parity_matrix(m: int) -> np.ndarray:
    a = np.arange(1, m + 1)
    # 1-based (row, col): row <= col and row = col mod 2
    u = ((a[:, None] <= a[None, :]) & ((a[None, :] - a[:, None]) % 2 == 0)).astype(np.int8)
    u.setflags(write=False)
    return u


@lru_cache(maxsize=256)
def factor_matrices(params: CableParams) -> FactorTriple:
    p, q, m, sys = params.p, params.q, params.m, params.sys
    d1 = tuple(sys.mono(1, -2 * p * l - p * q * l * l) for l in range(m))
    d2 = tuple(sys.mono(1, p * q * (i * i - 1)) for i in range(1, m + 1))
    return FactorTriple(d1, _upper_parity_matrix(m), d2)


def inverse_factors(params: CableParams) -> tuple[tuple[Monomial, ...], np.ndarray, tuple[Monomial, ...]]:
    """(D2^-1, U^-1, D1^-1); U^-1 has 1 on the diagonal and -1 two places right of it."""
    f = factor_matrices(params)
    m = params.m
    u_inv = np.eye(m, dtype=np.int64) - np.eye(m, k=2, dtype=np.int64)
    if not np.array_equal(f.U.astype(np.int64) @ u_inv, np.eye(m, dtype=np.int64)):
        raise ConsistencyError(f"U @ U_inv != I for m={m}")
    u_inv.setflags(write=False)
    sys = params.sys
    return (
        tuple(mono_inv(d, sys) for d in f.D2),
        u_inv,
        tuple(mono_inv(d, sys) for d in f.D1),
    )


def morton_assembly(params: CableParams) -> CycMatrix:
    """All m columns of the cable operator straight from the cabling formula."""
    p, q, m, sys = params.p, params.q, params.m, params.sys
    sizes = np.arange(1, m + 1)
    i = np.repeat(sizes, sizes)
    starts = np.repeat(np.cumsum(sizes) - sizes, sizes)
    j = -(i - 1) + 2 * (np.arange(len(i)) - starts)
    exps = p * q * (i * i - 1) - p * q * j * j - 2 * p * j
    sign, row = reduce_indices(q * j + 1, sys)
    keep = sign != 0
    return CycMatrix(m, sys, row[keep], i[keep], exps[keep], sign[keep])


def factored_assembly(params: CableParams) -> CycMatrix:
    """R_m @ D1 @ U @ D2 multiplied out in the group ring."""
    m, sys = params.m, params.sys
    f = factor_matrices(params)
    rr, rc, re, rk = build_Rm(params).term_arrays()
    # middle factor terms: (f-row a, e-col i, exp)
    a_idx, i_idx = np.nonzero(f.U)
    mid_exp = f.d1_exps[a_idx] + f.d2_exps[i_idx]
    a_idx = a_idx + 1
    i_idx = i_idx + 1

    order = np.argsort(rc, kind="stable")
    rr, rc, re, rk = rr[order], rc[order], re[order], rk[order]
    counts = np.bincount(rc, minlength=m + 1)
    first = np.concatenate(([0], np.cumsum(counts)[:-1]))
    rows, cols, exps, coeffs = [], [], [], []
    for slot in range(int(counts.max()) if len(counts) else 0):
        sel = counts[a_idx] > slot
        t = first[a_idx[sel]] + slot
        rows.append(rr[t])
        cols.append(i_idx[sel])
        exps.append(re[t] + mid_exp[sel])
        coeffs.append(rk[t])
    if not rows:
        return CycMatrix(m, sys, [], [], [], [])
    return CycMatrix(
        m, sys, np.concatenate(rows), np.concatenate(cols), np.concatenate(exps), np.concatenate(coeffs)
    )


@lru_cache(maxsize=64)
def rt_matrix_e_basis(params: CableParams) -> CycMatrix:
    """Cable operator in the e-basis, assembled twice and compared exactly.

    Raises ConsistencyError if the cabling-formula columns differ from the
    factored product R_m @ D1 @ U @ D2.
    """
    direct = morton_assembly(params)
    factored = factored_assembly(params)
    if direct != factored:
        raise ConsistencyError(f"cabling-formula and factored assemblies differ for {params}")
    return direct
